#include "patchforge/remote_oracle.hpp"

#include "patchforge/base64.hpp"
#include "patchforge/png_io.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cmath>

namespace patchforge {

using nlohmann::json;

namespace {

std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  const auto scheme = endpoint.find("://");
  const auto path_start = endpoint.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_start == std::string::npos) return {endpoint, ""};
  std::string prefix = endpoint.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {endpoint.substr(0, path_start), prefix};
}

}  // namespace

std::string encode_detect_request(const Image& image, Modality modality) {
  const auto png = encode_png(image);
  json body{{"image", base64_encode(png)}, {"modality", to_string(modality)}};
  return body.dump();
}

std::pair<Image, Modality> decode_detect_request(std::string_view body) {
  const json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw InputError("request body is not a JSON object");
  if (!j.contains("image") || !j["image"].is_string()) throw InputError("request lacks an image string");
  if (!j.contains("modality") || !j["modality"].is_string()) throw InputError("request lacks a modality");
  const auto m = j["modality"].get<std::string>();
  if (m != "visible" && m != "infrared") throw InputError("unknown modality: " + m);
  const auto bytes = base64_decode(j["image"].get<std::string>());
  if (!bytes) throw InputError("image is not valid base64");
  Image img;
  try {
    img = decode_png(*bytes);
  } catch (const ImageIoError& e) {
    throw InputError(e.what());
  }
  return {std::move(img), m == "visible" ? Modality::Visible : Modality::Infrared};
}

std::string encode_detect_response(const std::vector<Detection>& detections) {
  json arr = json::array();
  for (const auto& d : detections) {
    arr.push_back({{"class", d.class_label},
                   {"confidence", d.confidence},
                   {"bbox", {d.box.x, d.box.y, d.box.w, d.box.h}}});
  }
  return json{{"detections", arr}}.dump();
}

std::vector<Detection> decode_detect_response(std::string_view body) {
  const json j = json::parse(body, nullptr, false);
  auto bad = [](const std::string& why) { return TransportError("malformed detect response: " + why, 1, 200); };
  if (j.is_discarded() || !j.is_object()) throw bad("not a JSON object");
  if (!j.contains("detections") || !j["detections"].is_array()) throw bad("missing detections array");
  std::vector<Detection> out;
  for (const auto& d : j["detections"]) {
    if (!d.is_object() || !d.contains("class") || !d["class"].is_string() || !d.contains("confidence") ||
        !d["confidence"].is_number() || !d.contains("bbox") || !d["bbox"].is_array() || d["bbox"].size() != 4)
      throw bad("detection entry does not match the schema");
    Detection det;
    det.class_label = d["class"].get<std::string>();
    det.confidence = d["confidence"].get<double>();
    if (!(det.confidence >= 0.0 && det.confidence <= 1.0)) throw bad("confidence outside [0,1]");
    std::array<int, 4> b{};
    for (std::size_t i = 0; i < 4; ++i) {
      if (!d["bbox"][i].is_number()) throw bad("bbox entries must be numbers");
      b[i] = static_cast<int>(std::lround(d["bbox"][i].get<double>()));
    }
    det.box = {b[0], b[1], b[2], b[3]};
    out.push_back(std::move(det));
  }
  return out;
}

struct RemoteOracle::Impl {
  httplib::Client client;
  std::string prefix;
  Impl(const std::string& base, std::string p) : client(base), prefix(std::move(p)) {}
};

RemoteOracle::RemoteOracle(RemoteOracleConfig cfg) : DetectorOracle(cfg.modality), cfg_(std::move(cfg)) {
  if (cfg_.endpoint.empty()) throw InputError("remote oracle needs an endpoint");
  if (cfg_.max_attempts < 1) throw InputError("remote oracle needs max_attempts >= 1");
  auto [base, prefix] = split_endpoint(cfg_.endpoint);
  impl_ = std::make_unique<Impl>(base, prefix);
  if (!impl_->client.is_valid()) throw InputError("invalid endpoint: " + cfg_.endpoint);
  const auto secs = [](double s) { return std::chrono::microseconds(static_cast<long long>(s * 1e6)); };
  impl_->client.set_connection_timeout(secs(cfg_.connect_timeout_s));
  impl_->client.set_read_timeout(secs(cfg_.read_timeout_s));
}

RemoteOracle::~RemoteOracle() = default;

HealthStatus RemoteOracle::health() {
  std::lock_guard lock(mutex_);
  auto res = impl_->client.Get(impl_->prefix + "/health");
  if (!res) throw TransportError("GET /health failed: " + httplib::to_string(res.error()), 1, 0);
  if (res->status != 200)
    throw TransportError("GET /health returned HTTP " + std::to_string(res->status), 1, res->status);
  const json j = json::parse(res->body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw TransportError("malformed health response", 1, 200);
  return {j.value("status", ""), j.value("model", "")};
}

std::vector<Detection> RemoteOracle::do_detect(const Image& image) {
  const std::string body = encode_detect_request(image, modality());
  // One client connection; requests are serialized.
  std::lock_guard lock(mutex_);
  std::string last_error;
  int last_status = 0;
  for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
    auto res = impl_->client.Post(impl_->prefix + "/detect", body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      last_status = 0;
      continue;
    }
    if (res->status == 200) return decode_detect_response(res->body);
    last_status = res->status;
    last_error = "HTTP " + std::to_string(res->status);
    // Client errors will not improve on retry.
    if (res->status >= 400 && res->status < 500) {
      throw TransportError("POST /detect to " + cfg_.endpoint + " failed: " + last_error, attempt, last_status);
    }
  }
  throw TransportError("POST /detect to " + cfg_.endpoint + " failed after " +
                           std::to_string(cfg_.max_attempts) + " attempt(s): " + last_error,
                       cfg_.max_attempts, last_status);
}

}  // namespace patchforge
