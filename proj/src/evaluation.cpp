#include "patchforge/evaluation.hpp"

#include "patchforge/serialize.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <thread>

namespace patchforge {

using nlohmann::json;

namespace {

std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

bool counted(const EvalRecord& r, AsrMode mode) {
  switch (mode) {
    case AsrMode::Infrared: return r.clean_detected_infrared;
    case AsrMode::Visible: return r.clean_detected_visible;
    case AsrMode::Cross: return r.clean_detected_infrared && r.clean_detected_visible;
  }
  return false;
}

}  // namespace

const char* to_string(AsrMode m) {
  switch (m) {
    case AsrMode::Infrared: return "infrared";
    case AsrMode::Visible: return "visible";
    case AsrMode::Cross: return "cross";
  }
  return "cross";
}

AsrMode asr_mode_from_string(const std::string& s) {
  if (s == "infrared") return AsrMode::Infrared;
  if (s == "visible") return AsrMode::Visible;
  if (s == "cross") return AsrMode::Cross;
  throw InputError("unknown ASR mode: " + s);
}

EvalSummary asr(std::span<const EvalRecord> records, double delta, AsrMode mode) {
  EvalSummary s;
  s.mode = mode;
  double q_ir = 0.0;
  double q_vis = 0.0;
  for (const auto& r : records) {
    // Failed tasks have no final confidences to score.
    if (r.error || !counted(r, mode)) continue;
    if (!r.outcome) throw InputError("task " + r.task_id + " counts toward N but has no outcome");
    const auto& o = *r.outcome;
    ++s.n_counted;
    const bool ir = o.infrared_final_confidence < delta;
    const bool vis = o.visible_final_confidence < delta;
    const bool success = mode == AsrMode::Infrared ? ir : mode == AsrMode::Visible ? vis : (ir && vis);
    if (success) ++s.successes;
    q_ir += static_cast<double>(o.queries_infrared);
    q_vis += static_cast<double>(o.queries_visible);
  }
  if (s.n_counted == 0)
    throw UndefinedAsrError(std::string("no clean-detected tasks in ") + to_string(mode) + " mode");
  const double n = s.n_counted;
  s.asr = s.successes / n;
  s.mean_queries_infrared = q_ir / n;
  s.mean_queries_visible = q_vis / n;
  s.mean_queries = mode == AsrMode::Infrared  ? s.mean_queries_infrared
                   : mode == AsrMode::Visible ? s.mean_queries_visible
                                              : (q_ir + q_vis) / n;
  return s;
}

EvalRecord evaluate_task(const AttackTask& task, const OracleFactory& factory, const AttackSettings& settings) {
  EvalRecord rec;
  rec.task_id = task.id;
  try {
    {
      auto ir = factory(task, Modality::Infrared);
      auto vis = factory(task, Modality::Visible);
      rec.clean_detected_infrared =
          target_confidence(*ir, task.infrared, task.box, task.class_label) >= task.delta;
      rec.clean_detected_visible = target_confidence(*vis, task.visible, task.box, task.class_label) >= task.delta;
    }
    if (!rec.clean_detected_infrared && !rec.clean_detected_visible) return rec;
    auto ir = factory(task, Modality::Infrared);
    auto vis = factory(task, Modality::Visible);
    rec.outcome = attack(task, *ir, *vis, settings);
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

std::vector<EvalRecord> evaluate(std::span<const AttackTask> tasks, const OracleFactory& factory,
                                 const AttackSettings& settings, int jobs) {
  std::vector<EvalRecord> records(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  auto one = [&](std::size_t i) {
    AttackSettings s = settings;
    s.seed = derive_seed(settings.seed, i);
    try {
      records[i] = evaluate_task(tasks[i], factory, s);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), tasks.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) one(i);
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return records;
}

namespace {

std::vector<AblationRow> sweep(std::span<const AttackTask> tasks, const std::vector<int>& values,
                               const OracleFactory& factory, const AttackSettings& settings, int jobs,
                               int AttackSettings::*field) {
  std::vector<AblationRow> rows;
  for (int v : values) {
    AttackSettings s = settings;
    s.*field = v;
    const auto records = evaluate(tasks, factory, s, jobs);
    const double delta = tasks.empty() ? 0.5 : tasks.front().delta;
    AblationRow row;
    row.value = v;
    row.cross = asr(records, delta, AsrMode::Cross);
    row.infrared = asr(records, delta, AsrMode::Infrared);
    row.visible = asr(records, delta, AsrMode::Visible);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::vector<AblationRow> ablate_shape(std::span<const AttackTask> tasks, const std::vector<int>& n_values,
                                      const OracleFactory& factory, const AttackSettings& settings, int jobs) {
  for (int n : n_values)
    if (n < kMinVertices || n > kMaxVertices)
      throw InputError("shape ablation: vertex count must be in [3,8], got " + std::to_string(n));
  return sweep(tasks, n_values, factory, settings, jobs, &AttackSettings::n_vertices);
}

std::vector<AblationRow> ablate_k(std::span<const AttackTask> tasks, const std::vector<int>& k_values,
                                  const OracleFactory& factory, const AttackSettings& settings, int jobs) {
  for (int k : k_values)
    if (k < 1) throw InputError("K ablation: K must be >= 1, got " + std::to_string(k));
  return sweep(tasks, k_values, factory, settings, jobs, &AttackSettings::grid_k);
}

std::string summaries_csv(std::span<const EvalSummary> summaries) {
  std::string out = "mode,n_counted,asr,mean_queries\n";
  for (const auto& s : summaries) {
    out += std::string(to_string(s.mode)) + "," + std::to_string(s.n_counted) + "," + fmt_num(s.asr) + "," +
           fmt_num(s.mean_queries) + "\n";
  }
  return out;
}

std::string ablation_csv(std::span<const AblationRow> rows, const std::string& column) {
  std::string out = column + ",asr,mean_queries\n";
  for (const auto& r : rows)
    out += std::to_string(r.value) + "," + fmt_num(r.cross.asr) + "," + fmt_num(r.cross.mean_queries) + "\n";
  return out;
}

json summary_to_json(const EvalSummary& s) {
  return {{"mode", to_string(s.mode)},
          {"n_counted", s.n_counted},
          {"successes", s.successes},
          {"asr", s.asr},
          {"mean_queries", s.mean_queries},
          {"mean_queries_infrared", s.mean_queries_infrared},
          {"mean_queries_visible", s.mean_queries_visible}};
}

EvalSummary summary_from_json(const json& j) {
  EvalSummary s;
  s.mode = asr_mode_from_string(j.at("mode").get<std::string>());
  s.n_counted = j.at("n_counted").get<int>();
  s.successes = j.at("successes").get<int>();
  s.asr = j.at("asr").get<double>();
  s.mean_queries = j.at("mean_queries").get<double>();
  s.mean_queries_infrared = j.at("mean_queries_infrared").get<double>();
  s.mean_queries_visible = j.at("mean_queries_visible").get<double>();
  return s;
}

json record_to_json(const EvalRecord& r) {
  json j{{"task_id", r.task_id},
         {"clean_detected_infrared", r.clean_detected_infrared},
         {"clean_detected_visible", r.clean_detected_visible}};
  j["outcome"] = r.outcome ? outcome_to_json(*r.outcome) : json(nullptr);
  j["error"] = r.error ? json(*r.error) : json(nullptr);
  return j;
}

EvalRecord record_from_json(const json& j) {
  EvalRecord r;
  r.task_id = j.at("task_id").get<std::string>();
  r.clean_detected_infrared = j.at("clean_detected_infrared").get<bool>();
  r.clean_detected_visible = j.at("clean_detected_visible").get<bool>();
  if (j.contains("outcome") && !j["outcome"].is_null()) r.outcome = outcome_from_json(j["outcome"]);
  if (j.contains("error") && !j["error"].is_null()) r.error = j["error"].get<std::string>();
  return r;
}

json report_json(std::span<const EvalSummary> summaries, std::span<const EvalRecord> records) {
  json s = json::array();
  for (const auto& x : summaries) s.push_back(summary_to_json(x));
  json r = json::array();
  for (const auto& x : records) r.push_back(record_to_json(x));
  return {{"summaries", s}, {"records", r}};
}

std::vector<EvalSummary> summaries_from_report(const json& report) {
  std::vector<EvalSummary> out;
  for (const auto& s : report.at("summaries")) out.push_back(summary_from_json(s));
  return out;
}

std::vector<EvalSummary> summarize(std::span<const EvalRecord> records, double delta) {
  std::vector<EvalSummary> out;
  for (auto mode : {AsrMode::Infrared, AsrMode::Visible, AsrMode::Cross}) {
    try {
      out.push_back(asr(records, delta, mode));
    } catch (const UndefinedAsrError&) {
    }
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void emit_report(const std::filesystem::path& dir, std::span<const EvalSummary> summaries,
                 std::span<const EvalRecord> records) {
  std::filesystem::create_directories(dir);
  for (const auto& s : summaries) {
    write_text(dir / (std::string(to_string(s.mode)) + "_summary.csv"), summaries_csv(std::span(&s, 1)));
  }
  write_text(dir / "report.json", report_json(summaries, records).dump(2) + "\n");
}

}  // namespace patchforge
