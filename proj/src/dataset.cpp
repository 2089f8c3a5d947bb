#include "patchforge/dataset.hpp"

#include "patchforge/png_io.hpp"

#include <json.hpp>

#include <fstream>

namespace patchforge {

using nlohmann::json;

namespace {

AnnotationRecord parse_record(const std::string& line, int lineno) {
  const json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw InputError("not a JSON object");
  AnnotationRecord rec;
  rec.id = j.value("id", "task_" + std::to_string(lineno));
  if (!j.contains("visible") || !j["visible"].is_string()) throw InputError("missing \"visible\" path");
  if (!j.contains("infrared") || !j["infrared"].is_string()) throw InputError("missing \"infrared\" path");
  rec.visible_path = j["visible"].get<std::string>();
  rec.infrared_path = j["infrared"].get<std::string>();
  if (!j.contains("bbox") || !j["bbox"].is_array() || j["bbox"].size() != 4)
    throw InputError("\"bbox\" must be [x, y, w, h]");
  for (const auto& v : j["bbox"])
    if (!v.is_number_integer()) throw InputError("bbox entries must be integers");
  rec.box = {j["bbox"][0].get<int>(), j["bbox"][1].get<int>(), j["bbox"][2].get<int>(), j["bbox"][3].get<int>()};
  if (j.contains("class")) {
    if (!j["class"].is_string()) throw InputError("\"class\" must be a string");
    rec.class_label = j["class"].get<std::string>();
  }
  return rec;
}

Image as_rgb(const Image& x) {
  if (x.channels() == 3) return x;
  Image out(x.width(), x.height(), 3);
  for (int c = 0; c < 3; ++c) out.plane(c) = x.plane(0);
  return out;
}

}  // namespace

DatasetLoad load_dataset(const std::filesystem::path& annotations, const std::filesystem::path& image_root,
                         double delta) {
  std::ifstream in(annotations);
  if (!in) throw DatasetError("cannot open annotations " + annotations.string());
  const auto root = image_root.empty() ? annotations.parent_path() : image_root;

  DatasetLoad out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto rec = parse_record(line, lineno);
      AttackTask task;
      task.id = rec.id;
      task.class_label = rec.class_label;
      task.box = rec.box;
      task.delta = delta;
      task.visible = as_rgb(read_png(root / rec.visible_path));
      task.infrared = to_grayscale(read_png(root / rec.infrared_path));
      task.validate();
      if (task.visible.width() != task.infrared.width() || task.visible.height() != task.infrared.height()) {
        out.warnings.push_back("line " + std::to_string(lineno) + " (" + rec.id +
                               "): visible and infrared sizes differ; assuming registered coordinates");
      }
      out.tasks.push_back(std::move(task));
    } catch (const std::exception& e) {
      out.rejections.push_back({lineno, e.what()});
    }
  }
  if (out.tasks.empty())
    throw DatasetError("no valid records in " + annotations.string() + " (" +
                       std::to_string(out.rejections.size()) + " rejected)");
  return out;
}

}  // namespace patchforge
