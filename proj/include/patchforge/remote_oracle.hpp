#ifndef PATCHFORGE_REMOTE_ORACLE_HPP
#define PATCHFORGE_REMOTE_ORACLE_HPP

#include "patchforge/oracle.hpp"

#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace patchforge {

/// Transport-level failure talking to a detector service. `http_status` is 0
/// when no response arrived at all.
class TransportError : public std::runtime_error {
 public:
  TransportError(const std::string& what, int attempts, int http_status)
      : std::runtime_error(what), attempts_(attempts), http_status_(http_status) {}
  int attempts() const { return attempts_; }
  int http_status() const { return http_status_; }

 private:
  int attempts_;
  int http_status_;
};

// Wire format shared with the detector service:
//   POST /detect  {"image": <base64 PNG>, "modality": "visible"|"infrared"}
//   200           {"detections": [{"class": s, "confidence": x, "bbox": [x, y, w, h]}]}
//   GET /health   {"status": "ok", "model": s}

std::string encode_detect_request(const Image& image, Modality modality);
/// Throws InputError on a malformed body.
std::pair<Image, Modality> decode_detect_request(std::string_view body);
std::string encode_detect_response(const std::vector<Detection>& detections);
/// Throws TransportError (status 200) on a body that does not match the schema.
std::vector<Detection> decode_detect_response(std::string_view body);

struct HealthStatus {
  std::string status;
  std::string model;
};

struct RemoteOracleConfig {
  std::string endpoint;  // e.g. http://127.0.0.1:8080
  Modality modality = Modality::Visible;
  int max_attempts = 3;
  double connect_timeout_s = 5.0;
  double read_timeout_s = 60.0;
  /// Set only when the backing server handles concurrent requests.
  bool concurrent = false;
};

class RemoteOracle final : public DetectorOracle {
 public:
  explicit RemoteOracle(RemoteOracleConfig cfg);
  ~RemoteOracle() override;

  HealthStatus health();
  bool concurrent_safe() const override { return cfg_.concurrent; }
  const RemoteOracleConfig& config() const { return cfg_; }

 protected:
  std::vector<Detection> do_detect(const Image& image) override;

 private:
  struct Impl;
  RemoteOracleConfig cfg_;
  std::unique_ptr<Impl> impl_;
  std::mutex mutex_;
};

}  // namespace patchforge

#endif  // PATCHFORGE_REMOTE_ORACLE_HPP
