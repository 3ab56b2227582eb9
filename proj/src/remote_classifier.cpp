#include "mindful/remote_classifier.hpp"

#include <bit>
#include <cstring>
#include <future>

#include "httplib.h"

namespace mindful {

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::unique_ptr<httplib::Client> make_client(const std::string& url, int timeout_seconds) {
  auto client = std::make_unique<httplib::Client>(url);
  client->set_connection_timeout(timeout_seconds, 0);
  client->set_read_timeout(timeout_seconds, 0);
  client->set_write_timeout(timeout_seconds, 0);
  return client;
}

std::string error_message(const httplib::Result& res) {
  try {
    const auto body = nlohmann::json::parse(res->body);
    if (body.contains("error")) return body["error"].get<std::string>();
  } catch (const std::exception&) {
  }
  return res->body;
}

}  // namespace

std::string base64_encode(std::span<const unsigned char> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const unsigned v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (i + 1 == bytes.size()) {
    const unsigned v = bytes[i] << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (i + 2 == bytes.size()) {
    const unsigned v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
  if (text.size() % 4 != 0) throw FormatError("base64: length not a multiple of 4");
  auto value = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  std::vector<unsigned char> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int v[4];
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + static_cast<std::size_t>(k)];
      if (c == '=' && i + 4 == text.size() && k >= 2) {
        v[k] = 0;
        ++pad;
      } else {
        if (pad > 0) throw FormatError("base64: data after padding");
        v[k] = value(c);
        if (v[k] < 0) throw FormatError("base64: invalid character");
      }
    }
    const unsigned bits = (static_cast<unsigned>(v[0]) << 18) | (static_cast<unsigned>(v[1]) << 12) |
                          (static_cast<unsigned>(v[2]) << 6) | static_cast<unsigned>(v[3]);
    out.push_back(static_cast<unsigned char>(bits >> 16));
    if (pad < 2) out.push_back(static_cast<unsigned char>((bits >> 8) & 0xFF));
    if (pad < 1) out.push_back(static_cast<unsigned char>(bits & 0xFF));
  }
  return out;
}

std::string encode_pixels(const ImageBuffer& image) {
  const auto data = image.data();
  std::vector<unsigned char> bytes(data.size() * 4);
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto bits = std::bit_cast<std::uint32_t>(data[i]);
    for (int b = 0; b < 4; ++b) bytes[i * 4 + static_cast<std::size_t>(b)] =
        static_cast<unsigned char>((bits >> (8 * b)) & 0xFF);
  }
  return base64_encode(bytes);
}

std::vector<float> decode_pixels(const std::string& b64) {
  const auto bytes = base64_decode(b64);
  if (bytes.size() % 4 != 0) throw FormatError("pixel payload is not a whole number of float32");
  std::vector<float> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b)
      bits |= static_cast<std::uint32_t>(bytes[i * 4 + static_cast<std::size_t>(b)]) << (8 * b);
    out[i] = std::bit_cast<float>(bits);
  }
  return out;
}

nlohmann::ordered_json make_predict_request(const std::string& id, const ImageBuffer& image,
                                    const std::vector<std::string>& classes) {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["width"] = image.width();
  j["height"] = image.height();
  j["channels"] = image.channels();
  j["pixels_b64"] = encode_pixels(image);
  j["classes"] = classes;
  return j;
}

HealthStatus check_health(const std::string& url, int timeout_seconds) {
  auto client = make_client(url, timeout_seconds);
  auto res = client->Get("/v1/health");
  if (!res) throw ClassifierError("health check transport failure: " + httplib::to_string(res.error()),
                                  {}, true);
  if (res->status != 200)
    throw ClassifierError("health check returned HTTP " + std::to_string(res->status));
  try {
    const auto body = nlohmann::json::parse(res->body);
    HealthStatus h;
    h.status = body.at("status").get<std::string>();
    h.classes = body.at("classes").get<std::vector<std::string>>();
    return h;
  } catch (const std::exception& e) {
    throw ClassifierError(std::string("malformed health response: ") + e.what());
  }
}

RemoteClassifier::RemoteClassifier(RemoteClassifierOptions options) : options_(std::move(options)) {
  if (options_.url.empty()) throw ContractViolation("remote classifier: empty URL");
  if (options_.max_attempts < 1) options_.max_attempts = 1;
  if (options_.max_in_flight < 1) options_.max_in_flight = 1;
  if (options_.classes.empty()) {
    options_.classes = check_health(options_.url, options_.timeout_seconds).classes;
    if (options_.classes.empty()) throw ClassifierError("remote classifier reports no classes");
  }
}

std::string RemoteClassifier::model_id() const {
  const std::lock_guard lock(model_mutex_);
  return model_id_;
}

std::string RemoteClassifier::next_request_id() const {
  return "req-" + std::to_string(counter_.fetch_add(1));
}

ClassifierOutput RemoteClassifier::predict(const ImageBuffer& image) const {
  return predict_with_id(image, next_request_id());
}

ClassifierOutput RemoteClassifier::predict_with_id(const ImageBuffer& image,
                                                   const std::string& request_id) const {
  const std::string body = make_predict_request(request_id, image, options_.classes).dump();
  auto client = make_client(options_.url, options_.timeout_seconds);
  std::string last_error;
  for (int attempt = 0; attempt < options_.max_attempts; ++attempt) {
    auto res = client->Post("/v1/predict", body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status) + ": " + error_message(res);
      continue;
    }
    if (res->status != 200)
      throw ClassifierError("remote classifier rejected request " + request_id + ": HTTP " +
                                std::to_string(res->status) + ": " + error_message(res),
                            request_id, false);
    try {
      const auto reply = nlohmann::json::parse(res->body);
      if (reply.at("id").get<std::string>() != request_id)
        throw ClassifierError("response id mismatch for " + request_id, request_id);
      ClassifierOutput out;
      for (const auto& id : options_.classes) {
        const double p = reply.at("probs").at(id).get<double>();
        if (!(p >= 0.0 && p <= 1.0))
          throw ClassifierError("probability out of range for class " + id, request_id);
        out.probabilities[id] = p;
      }
      if (reply.contains("model_id")) {
        const std::lock_guard lock(model_mutex_);
        if (model_id_.empty()) model_id_ = reply["model_id"].get<std::string>();
      }
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw ClassifierError("malformed response to " + request_id + ": " + e.what(), request_id);
    }
  }
  throw ClassifierError("remote classifier transport failure for " + request_id + ": " + last_error,
                        request_id, true);
}

std::vector<ClassifierOutput> RemoteClassifier::predict_batch(
    std::span<const ImageBuffer> images) const {
  std::vector<ClassifierOutput> out(images.size());
  const auto window = static_cast<std::size_t>(options_.max_in_flight);
  for (std::size_t start = 0; start < images.size(); start += window) {
    const std::size_t end = std::min(images.size(), start + window);
    std::vector<std::future<ClassifierOutput>> pending;
    for (std::size_t i = start; i < end; ++i) {
      const std::string id = next_request_id();
      pending.push_back(std::async(std::launch::async,
                                   [this, &images, i, id] { return predict_with_id(images[i], id); }));
    }
    // Results are delivered in request order; the first failure wins.
    for (std::size_t i = start; i < end; ++i) {
      try {
        out[i] = pending[i - start].get();
      } catch (const ClassifierError& e) {
        for (std::size_t j = i + 1; j < end; ++j) pending[j - start].wait();
        throw ClassifierError("batch element " + std::to_string(i) + ": " + e.what(),
                              e.request_id(), e.retryable());
      }
    }
  }
  return out;
}

}  // namespace mindful
