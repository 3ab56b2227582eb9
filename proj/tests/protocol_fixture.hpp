#pragma once

// In-process HTTP server speaking the /v1 wire protocol. It mirrors a
// PatchClassifier from the decoded float32 payload, validates requests the
// way a conforming server must, and can inject transient 503 failures.

#include <atomic>
#include <memory>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "mindful/classifier.hpp"
#include "mindful/remote_classifier.hpp"

namespace mindful::testing {

class MirrorPatchServer {
 public:
  explicit MirrorPatchServer(PatchClassifier model) : model_(std::move(model)) {
    server_.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
      nlohmann::ordered_json j;
      j["status"] = "ok";
      j["classes"] = model_.classes();
      res.set_content(j.dump(), "application/json");
    });
    server_.Post("/v1/predict", [this](const httplib::Request& req, httplib::Response& res) {
      handle_predict(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MirrorPatchServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  MirrorPatchServer(const MirrorPatchServer&) = delete;
  MirrorPatchServer& operator=(const MirrorPatchServer&) = delete;

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int requests() const { return requests_.load(); }

  // The next n predict requests fail with 503.
  void fail_next(int n) { failures_.store(n); }

  // Replies carry this id instead of the request's.
  void force_reply_id(std::string id) { forced_id_ = std::move(id); }

 private:
  static void reply_error(httplib::Response& res, int status, const std::string& id,
                          const std::string& message) {
    nlohmann::ordered_json j;
    j["id"] = id;
    j["error"] = message;
    res.status = status;
    res.set_content(j.dump(), "application/json");
  }

  void handle_predict(const httplib::Request& req, httplib::Response& res) {
    ++requests_;
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const std::exception&) {
      reply_error(res, 400, "", "malformed JSON");
      return;
    }
    const std::string id = body.value("id", std::string());
    if (failures_.load() > 0) {
      --failures_;
      reply_error(res, 503, id, "temporarily unavailable");
      return;
    }
    try {
      const int w = body.at("width").get<int>();
      const int h = body.at("height").get<int>();
      const int c = body.at("channels").get<int>();
      const auto pixels = decode_pixels(body.at("pixels_b64").get<std::string>());
      if (w <= 0 || h <= 0 || (c != 1 && c != 3) ||
          pixels.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h) *
                               static_cast<std::size_t>(c)) {
        reply_error(res, 400, id, "pixel payload does not match width*height*channels");
        return;
      }
      const auto classes = body.at("classes").get<std::vector<std::string>>();
      for (const auto& k : classes)
        if (!model_.has_class(k)) {
          reply_error(res, 400, id, "unknown class " + k);
          return;
        }
      const ImageBuffer image(w, h, c, pixels);
      const auto out = model_.predict(image);
      nlohmann::ordered_json j;
      j["id"] = forced_id_.empty() ? id : forced_id_;
      nlohmann::ordered_json probs = nlohmann::ordered_json::object();
      for (const auto& k : classes) probs[k] = out.at(k);
      j["probs"] = probs;
      j["model_id"] = "mirror-patch";
      res.set_content(j.dump(), "application/json");
    } catch (const std::exception& e) {
      reply_error(res, 400, id, e.what());
    }
  }

  PatchClassifier model_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> requests_{0};
  std::atomic<int> failures_{0};
  std::string forced_id_;
};

}  // namespace mindful::testing
