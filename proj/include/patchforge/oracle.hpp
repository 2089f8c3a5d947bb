#ifndef PATCHFORGE_ORACLE_HPP
#define PATCHFORGE_ORACLE_HPP

#include "patchforge/color_grid.hpp"
#include "patchforge/geometry.hpp"
#include "patchforge/image.hpp"

#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace patchforge {

struct Detection {
  std::string class_label;
  double confidence = 0.0;
  BoundingBox box;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Raised when an oracle query fails; carries how many queries had already
/// completed in the failing batch.
class OracleError : public std::runtime_error {
 public:
  OracleError(const std::string& what, std::uint64_t completed_queries)
      : std::runtime_error(what), completed_queries_(completed_queries) {}
  std::uint64_t completed_queries() const { return completed_queries_; }

 private:
  std::uint64_t completed_queries_;
};

/// Opaque detector. Every detect() call is one query, counted atomically.
class DetectorOracle {
 public:
  explicit DetectorOracle(Modality modality) : modality_(modality) {}
  virtual ~DetectorOracle() = default;
  DetectorOracle(const DetectorOracle&) = delete;
  DetectorOracle& operator=(const DetectorOracle&) = delete;

  Modality modality() const { return modality_; }

  std::vector<Detection> detect(const Image& image) {
    require_modality(image, modality_);
    queries_.fetch_add(1, std::memory_order_relaxed);
    return do_detect(image);
  }

  std::uint64_t query_count() const { return queries_.load(std::memory_order_relaxed); }

  /// Whether detect() may be called from several threads at once.
  virtual bool concurrent_safe() const { return false; }

 protected:
  virtual std::vector<Detection> do_detect(const Image& image) = 0;

 private:
  Modality modality_;
  std::atomic<std::uint64_t> queries_{0};
};

inline constexpr double kMatchIou = 0.5;

/// Highest confidence among detections of `class_label` overlapping `target`
/// with IoU >= 0.5; 0 when the target vanished.
double target_confidence(DetectorOracle& oracle, const Image& image, const BoundingBox& target,
                         std::string_view class_label);

/// The matching rule of target_confidence, applied to a detection list.
double matched_confidence(const std::vector<Detection>& detections, const BoundingBox& target,
                          std::string_view class_label);

struct ToyInfraredParams {
  double dark_threshold = 0.3;
  double saturation = 0.5;
};

struct ToyVisibleParams {
  Rgb reference_color{0.2, 0.4, 0.6};
  double color_threshold = 0.25;
  double saturation = 0.5;
};

/// 1 - d / d0 clipped at 0, where d is the fraction of box pixels darker
/// than the threshold.
double toy_infrared_confidence(const Image& image, const BoundingBox& box,
                               const ToyInfraredParams& params = {});

/// 1 - c / c0 clipped at 0, where c is the fraction of box pixels farther
/// than the threshold (Euclidean RGB) from the reference color.
double toy_visible_confidence(const Image& image, const BoundingBox& box,
                              const ToyVisibleParams& params = {});

/// Analytic infrared detector watching one registered box. Reports a
/// single detection while its confidence is positive.
class ToyInfraredOracle final : public DetectorOracle {
 public:
  ToyInfraredOracle(BoundingBox box, std::string class_label, ToyInfraredParams params = {})
      : DetectorOracle(Modality::Infrared),
        box_(box),
        label_(std::move(class_label)),
        params_(params) {}
  bool concurrent_safe() const override { return true; }

 protected:
  std::vector<Detection> do_detect(const Image& image) override;

 private:
  BoundingBox box_;
  std::string label_;
  ToyInfraredParams params_;
};

class ToyVisibleOracle final : public DetectorOracle {
 public:
  ToyVisibleOracle(BoundingBox box, std::string class_label, ToyVisibleParams params = {})
      : DetectorOracle(Modality::Visible),
        box_(box),
        label_(std::move(class_label)),
        params_(params) {}
  bool concurrent_safe() const override { return true; }

 protected:
  std::vector<Detection> do_detect(const Image& image) override;

 private:
  BoundingBox box_;
  std::string label_;
  ToyVisibleParams params_;
};

}  // namespace patchforge

#endif  // PATCHFORGE_ORACLE_HPP
