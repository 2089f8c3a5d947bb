#include "patchforge/serialize.hpp"

#include <cstdio>
#include <cstdlib>

namespace patchforge {

using nlohmann::json;

double round_sig9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::strtod(buf, nullptr);
}

json patch_to_json(const PolygonPatch& p) {
  json cells = json::array();
  json offsets = json::array();
  for (const auto& v : p.vertices()) {
    cells.push_back(v.cell);
    offsets.push_back({round_sig9(v.u), round_sig9(v.v)});
  }
  return {{"n", p.size()}, {"cells", cells}, {"offsets", offsets}};
}

PolygonPatch patch_from_json(const json& j) {
  try {
    const int n = j.at("n").get<int>();
    const auto& cells = j.at("cells");
    const auto& offsets = j.at("offsets");
    if (!cells.is_array() || !offsets.is_array() || static_cast<int>(cells.size()) != n ||
        static_cast<int>(offsets.size()) != n)
      throw InputError("patch json: cells/offsets must have n entries");
    std::vector<GridCellVertex> vs;
    for (int k = 0; k < n; ++k) {
      const auto& o = offsets.at(static_cast<std::size_t>(k));
      if (!o.is_array() || o.size() != 2) throw InputError("patch json: offsets must be [u, v] pairs");
      vs.push_back({cells.at(static_cast<std::size_t>(k)).get<int>(), o[0].get<double>(), o[1].get<double>()});
    }
    return PolygonPatch(std::move(vs));
  } catch (const json::exception& e) {
    throw InputError(std::string("patch json: ") + e.what());
  }
}

json grid_to_json(const ColorGrid& g) {
  json colors = json::array();
  for (const auto& c : g.colors()) colors.push_back({c[0], c[1], c[2]});
  return {{"k", g.k()}, {"colors", colors}};
}

ColorGrid grid_from_json(const json& j) {
  try {
    const int k = j.at("k").get<int>();
    std::vector<Rgb> colors;
    for (const auto& c : j.at("colors")) {
      if (!c.is_array() || c.size() != 3) throw InputError("grid json: colors must be [r, g, b]");
      colors.emplace_back(c[0].get<double>(), c[1].get<double>(), c[2].get<double>());
    }
    return ColorGrid(k, std::move(colors));
  } catch (const json::exception& e) {
    throw InputError(std::string("grid json: ") + e.what());
  }
}

json unified_to_json(const UnifiedPatch& p) { return {{"shape", patch_to_json(p.shape)}, {"grid", grid_to_json(p.grid)}}; }

UnifiedPatch unified_from_json(const json& j) {
  return {patch_from_json(j.at("shape")), grid_from_json(j.at("grid"))};
}

json history_to_json(const std::vector<GenerationRecord>& h) {
  json arr = json::array();
  for (const auto& r : h)
    arr.push_back({{"generation", r.generation}, {"best_fitness", r.best_fitness}, {"evaluations", r.evaluations}});
  return arr;
}

std::vector<GenerationRecord> history_from_json(const json& j) {
  std::vector<GenerationRecord> out;
  for (const auto& r : j)
    out.push_back({r.at("generation").get<int>(), r.at("best_fitness").get<double>(),
                   r.at("evaluations").get<std::int64_t>()});
  return out;
}

namespace {

json stage_to_json(const StageSummary& s) {
  return {{"best_fitness", s.best_fitness},   {"evaluations", s.evaluations}, {"generations", s.generations},
          {"stopped_early", s.stopped_early}, {"queries", s.queries},         {"history", history_to_json(s.history)}};
}

StageSummary stage_from_json(const json& j) {
  StageSummary s;
  s.best_fitness = j.at("best_fitness").get<double>();
  s.evaluations = j.at("evaluations").get<std::int64_t>();
  s.generations = j.at("generations").get<int>();
  s.stopped_early = j.at("stopped_early").get<bool>();
  s.queries = j.at("queries").get<std::uint64_t>();
  s.history = history_from_json(j.at("history"));
  return s;
}

}  // namespace

json outcome_to_json(const AttackOutcome& o) {
  return {{"task_id", o.task_id},
          {"patch", unified_to_json(o.patch)},
          {"delta", o.delta},
          {"seed", o.seed},
          {"infrared_final_confidence", o.infrared_final_confidence},
          {"visible_final_confidence", o.visible_final_confidence},
          {"success_infrared", o.success_infrared},
          {"success_visible", o.success_visible},
          {"success_cross", o.success_cross},
          {"queries_infrared", o.queries_infrared},
          {"queries_visible", o.queries_visible},
          {"eval_queries_infrared", o.eval_queries_infrared},
          {"eval_queries_visible", o.eval_queries_visible},
          {"stage_one", stage_to_json(o.stage_one)},
          {"stage_two", stage_to_json(o.stage_two)}};
}

AttackOutcome outcome_from_json(const json& j) {
  try {
    AttackOutcome o{.task_id = j.at("task_id").get<std::string>(), .patch = unified_from_json(j.at("patch"))};
    o.delta = j.at("delta").get<double>();
    o.seed = j.at("seed").get<std::uint64_t>();
    o.infrared_final_confidence = j.at("infrared_final_confidence").get<double>();
    o.visible_final_confidence = j.at("visible_final_confidence").get<double>();
    o.success_infrared = j.at("success_infrared").get<bool>();
    o.success_visible = j.at("success_visible").get<bool>();
    o.success_cross = j.at("success_cross").get<bool>();
    o.queries_infrared = j.at("queries_infrared").get<std::uint64_t>();
    o.queries_visible = j.at("queries_visible").get<std::uint64_t>();
    o.eval_queries_infrared = j.at("eval_queries_infrared").get<std::uint64_t>();
    o.eval_queries_visible = j.at("eval_queries_visible").get<std::uint64_t>();
    o.stage_one = stage_from_json(j.at("stage_one"));
    o.stage_two = stage_from_json(j.at("stage_two"));
    return o;
  } catch (const json::exception& e) {
    throw InputError(std::string("outcome json: ") + e.what());
  }
}

json swarm_to_json(const SwarmConfig<double>& cfg) {
  json j{{"alpha", cfg.alpha},
         {"m_max", cfg.m_max},
         {"omega", cfg.omega},
         {"c1", cfg.c1},
         {"c2", cfg.c2},
         {"r_mode", cfg.r_mode == CoefficientMode::Fixed ? "fixed" : "stochastic"},
         {"r1", cfg.r1},
         {"r2", cfg.r2},
         {"seed", cfg.seed},
         {"abort_within_generation", cfg.abort_within_generation},
         {"workers", cfg.workers}};
  j["early_stop_threshold"] = cfg.early_stop_threshold ? json(*cfg.early_stop_threshold) : json(nullptr);
  return j;
}

json eot_to_json(const EotConfig& cfg) {
  auto range = [](const Range& r) { return json::array({r.lo, r.hi}); };
  return {{"n_samples", cfg.n_samples},
          {"eval_samples", cfg.eval_samples},
          {"rotation_deg", range(cfg.rotation_deg)},
          {"translation", range(cfg.translation)},
          {"scale", range(cfg.scale)},
          {"brightness", range(cfg.brightness)},
          {"downsample", range(cfg.downsample)},
          {"seed", cfg.seed}};
}

}  // namespace patchforge
