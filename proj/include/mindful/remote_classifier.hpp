#pragma once

#include <atomic>
#include <mutex>
#include <string>

#include "json.hpp"
#include "mindful/classifier.hpp"

namespace mindful {

struct RemoteClassifierOptions {
  std::string url;                    // e.g. http://127.0.0.1:8080
  std::vector<std::string> classes;   // empty: fetched from /v1/health
  int timeout_seconds = 30;
  int max_attempts = 3;               // transport failures are retried
  int max_in_flight = 4;              // predict_batch concurrency
  bool deterministic = true;          // declared by the operator
};

// HTTP/1.1 JSON client for the /v1/predict wire protocol (PROTOCOL.md).
class RemoteClassifier final : public Classifier {
 public:
  explicit RemoteClassifier(RemoteClassifierOptions options);

  const std::vector<std::string>& classes() const override { return options_.classes; }
  ClassifierOutput predict(const ImageBuffer& image) const override;
  std::vector<ClassifierOutput> predict_batch(std::span<const ImageBuffer> images) const override;
  bool deterministic() const override { return options_.deterministic; }
  std::string kind() const override { return "remote"; }

  // Reported by the server on the first successful reply.
  std::string model_id() const;

 private:
  ClassifierOutput predict_with_id(const ImageBuffer& image, const std::string& request_id) const;
  std::string next_request_id() const;

  RemoteClassifierOptions options_;
  mutable std::atomic<unsigned long long> counter_{0};
  mutable std::mutex model_mutex_;
  mutable std::string model_id_;
};

struct HealthStatus {
  std::string status;
  std::vector<std::string> classes;
};

HealthStatus check_health(const std::string& url, int timeout_seconds = 10);

// Wire helpers, shared with tests and the in-process protocol fixtures.
std::string base64_encode(std::span<const unsigned char> bytes);
std::vector<unsigned char> base64_decode(const std::string& text);
std::string encode_pixels(const ImageBuffer& image);
std::vector<float> decode_pixels(const std::string& b64);
nlohmann::ordered_json make_predict_request(const std::string& id, const ImageBuffer& image,
                                    const std::vector<std::string>& classes);

}  // namespace mindful
