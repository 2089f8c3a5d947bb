#include "patchforge/commands.hpp"

#include "patchforge/dataset.hpp"
#include "patchforge/png_io.hpp"
#include "patchforge/remote_oracle.hpp"
#include "patchforge/serialize.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace patchforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::optional<DatasetLoad> load_tasks(const RunConfig& cfg, std::ostream& log) {
  if (cfg.dataset.annotations.empty()) {
    log << "error: no dataset.annotations configured\n";
    return std::nullopt;
  }
  try {
    auto load = load_dataset(cfg.dataset.annotations, cfg.dataset.image_root, cfg.delta);
    for (const auto& w : load.warnings) log << "warning: " << w << "\n";
    for (const auto& r : load.rejections) log << "rejected line " << r.line << ": " << r.reason << "\n";
    log << "loaded " << load.tasks.size() << " task(s), rejected " << load.rejections.size() << "\n";
    return load;
  } catch (const DatasetError& e) {
    log << "error: " << e.what() << "\n";
    return std::nullopt;
  }
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw InputError("cannot open " + p.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw InputError("malformed JSON in " + p.string());
  return j;
}

}  // namespace

OracleFactory make_oracle_factory(const RunConfig& cfg) {
  const auto oracle = cfg.oracle;
  if (oracle.kind == "remote") {
    return [oracle](const AttackTask&, Modality m) -> std::unique_ptr<DetectorOracle> {
      RemoteOracleConfig rc;
      rc.endpoint = oracle.endpoint;
      rc.modality = m;
      rc.max_attempts = oracle.max_attempts;
      rc.read_timeout_s = oracle.timeout_s;
      return std::make_unique<RemoteOracle>(rc);
    };
  }
  return [oracle](const AttackTask& task, Modality m) -> std::unique_ptr<DetectorOracle> {
    if (m == Modality::Infrared)
      return std::make_unique<ToyInfraredOracle>(task.box, task.class_label, oracle.toy_infrared);
    return std::make_unique<ToyVisibleOracle>(task.box, task.class_label, oracle.toy_visible);
  };
}

void export_patch(const fs::path& dir, const UnifiedPatch& patch, const BoundingBox& box) {
  fs::create_directories(dir);
  const auto mask = rasterize_mask(patch.shape, box.w, box.h);
  write_png(dir / "patch_visible.png", render_grid(patch.grid, box.w, box.h), &mask.pixels);
  Image ir(box.w, box.h, 1);
  ir.plane(0) = mask.pixels.cast<double>();
  write_png(dir / "patch_infrared.png", ir);
}

int cmd_attack(const RunConfig& cfg, const AttackOptions& opts, const OracleFactory& factory, std::ostream& log) {
  try {
    cfg.validate();
  } catch (const InputError& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  auto load = load_tasks(cfg, log);
  if (!load) return kExitUsage;
  if (opts.dry_run) {
    log << "dry run: configuration and dataset are valid; no oracle queries made\n";
    return kExitOk;
  }

  fs::create_directories(cfg.output_dir);
  write_text(cfg.output_dir / "resolved_config.toml", to_config_text(cfg));
  const auto& settings = cfg.attack;
  const auto records = evaluate(load->tasks, factory, settings, cfg.jobs);
  const json echo = config_to_json(cfg);

  int failures = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.error) {
      ++failures;
      log << "task " << rec.task_id << ": oracle failure: " << *rec.error << "\n";
      continue;
    }
    const fs::path task_dir = cfg.output_dir / rec.task_id;
    fs::create_directories(task_dir);
    json doc{{"index", i}, {"task_seed", derive_seed(settings.seed, i)}, {"record", record_to_json(rec)},
             {"config", echo}};
    write_text(task_dir / "outcome.json", doc.dump(2) + "\n");
    if (rec.outcome) {
      export_patch(task_dir, rec.outcome->patch, load->tasks[i].box);
      log << "task " << rec.task_id << ": infrared " << rec.outcome->infrared_final_confidence << ", visible "
          << rec.outcome->visible_final_confidence << (rec.outcome->success_cross ? " -> success" : " -> failure")
          << " (" << rec.outcome->queries_infrared << "+" << rec.outcome->queries_visible << " queries)\n";
    } else {
      log << "task " << rec.task_id << ": not detected on clean images, skipped\n";
    }
  }
  const auto summaries = summarize(records, cfg.delta);
  emit_report(cfg.output_dir, summaries, records);
  for (const auto& s : summaries)
    log << to_string(s.mode) << ": ASR " << s.asr << " over " << s.n_counted << " task(s), mean queries "
        << s.mean_queries << "\n";
  if (failures > 0) {
    log << failures << " task(s) failed on oracle errors; completed results kept in " << cfg.output_dir.string()
        << "\n";
    return kExitOracle;
  }
  return kExitOk;
}

int cmd_attack(const RunConfig& cfg, const AttackOptions& opts, std::ostream& log) {
  return cmd_attack(cfg, opts, make_oracle_factory(cfg), log);
}

int cmd_demo(const fs::path& dir, int count, std::uint64_t seed, std::ostream& log, const RunConfig& base) {
  if (count < 0) {
    log << "error: count must be >= 0\n";
    return kExitUsage;
  }
  constexpr int kWidth = 128;
  constexpr int kHeight = 96;
  constexpr double kTargetInfrared = 0.8;
  fs::create_directories(dir);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> warm(0.35, 0.65);
  const Rgb reference = base.oracle.toy_visible.reference_color;

  std::ostringstream annotations;
  for (int i = 0; i < count; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "task_%03d", i);
    const int w = std::uniform_int_distribution<int>(48, 72)(rng);
    const int h = std::uniform_int_distribution<int>(36, 56)(rng);
    const BoundingBox box{std::uniform_int_distribution<int>(0, kWidth - w)(rng),
                          std::uniform_int_distribution<int>(0, kHeight - h)(rng), w, h};

    Image ir(kWidth, kHeight, 1);
    for (int y = 0; y < kHeight; ++y)
      for (int x = 0; x < kWidth; ++x) ir(x, y) = warm(rng);
    ir.plane(0).block(box.y, box.x, box.h, box.w).setConstant(kTargetInfrared);

    Image vis(kWidth, kHeight, 3);
    for (int y = 0; y < kHeight; ++y)
      for (int x = 0; x < kWidth; ++x)
        for (int c = 0; c < 3; ++c) vis(x, y, c) = unit(rng);
    for (int c = 0; c < 3; ++c) vis.plane(c).block(box.y, box.x, box.h, box.w).setConstant(reference[c]);

    const std::string vis_name = std::string(id) + "_visible.png";
    const std::string ir_name = std::string(id) + "_infrared.png";
    write_png(dir / vis_name, vis);
    write_png(dir / ir_name, ir);
    json rec{{"id", id}, {"visible", vis_name}, {"infrared", ir_name}, {"bbox", {box.x, box.y, box.w, box.h}},
             {"class", "car"}};
    annotations << rec.dump() << "\n";
  }
  write_text(dir / "annotations.jsonl", annotations.str());

  RunConfig cfg = base;
  cfg.dataset.annotations = "annotations.jsonl";
  cfg.dataset.image_root = "";
  cfg.output_dir = "out";
  write_text(dir / "config.toml", to_config_text(cfg));
  log << "wrote " << count << " synthetic pair(s) to " << dir.string() << "\n";
  return kExitOk;
}

int cmd_ablate(const RunConfig& cfg, const std::string& sweep, const OracleFactory& factory, std::ostream& log) {
  if (sweep != "shape" && sweep != "k") {
    log << "error: unknown sweep '" << sweep << "' (expected shape or k)\n";
    return kExitUsage;
  }
  try {
    cfg.validate();
  } catch (const InputError& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  auto load = load_tasks(cfg, log);
  if (!load) return kExitUsage;
  const auto& settings = cfg.attack;
  std::vector<AblationRow> rows;
  try {
    rows = sweep == "shape" ? ablate_shape(load->tasks, kShapeSweep, factory, settings, cfg.jobs)
                            : ablate_k(load->tasks, kGridSweep, factory, settings, cfg.jobs);
  } catch (const UndefinedAsrError& e) {
    log << "error: " << e.what() << "\n";
    return kExitOracle;
  }
  const std::string column = sweep == "shape" ? "n" : "k";
  const std::string table = ablation_csv(rows, column);
  fs::create_directories(cfg.output_dir);
  write_text(cfg.output_dir / ("ablation_" + sweep + ".csv"), table);
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back({{column, r.value},
                   {"cross", summary_to_json(r.cross)},
                   {"infrared", summary_to_json(r.infrared)},
                   {"visible", summary_to_json(r.visible)}});
  write_text(cfg.output_dir / ("ablation_" + sweep + ".json"),
             json{{"sweep", sweep}, {"rows", arr}, {"config", config_to_json(cfg)}}.dump(2) + "\n");
  log << table;
  return kExitOk;
}

int cmd_ablate(const RunConfig& cfg, const std::string& sweep, std::ostream& log) {
  return cmd_ablate(cfg, sweep, make_oracle_factory(cfg), log);
}

int cmd_report(const fs::path& run_dir, const fs::path& out_dir, std::ostream& log) {
  if (!fs::is_directory(run_dir)) {
    log << "error: not a directory: " << run_dir.string() << "\n";
    return kExitUsage;
  }
  std::vector<std::pair<std::size_t, EvalRecord>> indexed;
  double delta = 0.5;
  try {
    for (const auto& entry : fs::directory_iterator(run_dir)) {
      const auto file = entry.path() / "outcome.json";
      if (!entry.is_directory() || !fs::exists(file)) continue;
      const json doc = read_json(file);
      indexed.emplace_back(doc.at("index").get<std::size_t>(), record_from_json(doc.at("record")));
      delta = doc.at("config").at("attack").at("delta").get<double>();
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::sort(indexed.begin(), indexed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<EvalRecord> records;
  for (auto& [_, r] : indexed) records.push_back(std::move(r));
  const auto summaries = summarize(records, delta);
  emit_report(out_dir, summaries, records);
  log << summaries_csv(summaries);
  return kExitOk;
}

}  // namespace patchforge
