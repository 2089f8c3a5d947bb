#ifndef PATCHFORGE_DATASET_HPP
#define PATCHFORGE_DATASET_HPP

#include "patchforge/attack.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace patchforge {

/// One JSON line of the annotations file:
///   {"id": s?, "visible": path, "infrared": path, "bbox": [x, y, w, h], "class": s?}
/// Image paths are relative to the image root. The pair is assumed
/// registered, so a single box applies to both images.
struct AnnotationRecord {
  std::string id;
  std::filesystem::path visible_path;
  std::filesystem::path infrared_path;
  BoundingBox box;
  std::string class_label = "car";
};

struct Rejection {
  int line = 0;
  std::string reason;
};

struct DatasetLoad {
  std::vector<AttackTask> tasks;
  std::vector<Rejection> rejections;
  std::vector<std::string> warnings;
};

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws DatasetError when the file is missing or yields no valid record.
DatasetLoad load_dataset(const std::filesystem::path& annotations, const std::filesystem::path& image_root = {},
                         double delta = 0.5);

}  // namespace patchforge

#endif  // PATCHFORGE_DATASET_HPP
