#include "patchforge/attack.hpp"

#include <random>
#include <span>

namespace patchforge {

namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

SwarmConfig<double> stage_swarm(const SwarmConfig<double>& base, Eigen::Index dim, double delta,
                                const DetectorOracle& oracle) {
  SwarmConfig<double> cfg = base;
  cfg.set_bounds(dim, 0.0, 1.0);
  if (cfg.v_max.size() != dim) cfg.v_max.resize(0);
  cfg.early_stop_threshold = delta;
  if (!oracle.concurrent_safe()) cfg.workers = 1;
  return cfg;
}

template <typename Run>
StageSummary run_stage(const char* name, DetectorOracle& oracle, Run&& body) {
  const std::uint64_t start = oracle.query_count();
  try {
    RunResult<double> r = body();
    StageSummary s;
    s.best_fitness = r.best_fitness;
    s.evaluations = r.evaluations;
    s.generations = r.generations;
    s.stopped_early = r.stopped_early;
    s.queries = oracle.query_count() - start;
    s.history = std::move(r.history);
    return s;
  } catch (const FitnessError& e) {
    std::string why = e.what();
    try {
      if (e.cause()) std::rethrow_exception(e.cause());
    } catch (const InputError&) {
      throw;
    } catch (const std::exception& inner) {
      why = inner.what();
    }
    throw StageError(std::string(name) + " failed: " + why, name, oracle.query_count() - start, e.evaluations(),
                     e.history());
  }
}

}  // namespace

void AttackTask::validate() const {
  require_modality(visible, Modality::Visible);
  require_modality(infrared, Modality::Infrared);
  if (!box.fits_in(visible.width(), visible.height()))
    throw InputError("task " + id + ": box exceeds the visible image");
  if (!box.fits_in(infrared.width(), infrared.height()))
    throw InputError("task " + id + ": box exceeds the infrared image");
  if (!(delta > 0.0 && delta <= 1.0)) throw InputError("task " + id + ": delta must lie in (0,1]");
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

StageOneResult stage_one(const AttackTask& task, DetectorOracle& infrared_oracle,
                         const SwarmConfig<double>& swarm_cfg, const EotConfig& eot_cfg, int n_vertices,
                         ColdIntensity cold) {
  task.validate();
  if (infrared_oracle.modality() != Modality::Infrared) throw InputError("stage one needs an infrared oracle");
  default_cells(n_vertices);  // validates n
  const Eigen::Index dim = 2 * n_vertices;
  const auto cfg = stage_swarm(swarm_cfg, dim, task.delta, infrared_oracle);

  std::mt19937_64 eot_rng(eot_cfg.seed);
  const auto transforms = sample_transforms(eot_cfg, eot_rng);

  const Fitness<double> fitness = [&](const Eigen::VectorXd& raw) {
    const PolygonPatch shape = clamp_to_cells(as_span(raw));
    return expected_confidence(
        infrared_oracle, [&] { return fuse_infrared(task.infrared, task.box, shape, cold); }, transforms,
        task.box, task.class_label);
  };

  Eigen::VectorXd best;
  auto summary = run_stage("stage one", infrared_oracle, [&] {
    std::mt19937_64 rng(cfg.seed);
    auto r = run(cfg, dim, fitness, rng);
    best = r.best_position;
    return r;
  });
  return {clamp_to_cells(as_span(best)), std::move(summary)};
}

StageTwoResult stage_two(const AttackTask& task, DetectorOracle& visible_oracle, const PolygonPatch& shape,
                         const SwarmConfig<double>& swarm_cfg, const EotConfig& eot_cfg, int k) {
  task.validate();
  if (visible_oracle.modality() != Modality::Visible) throw InputError("stage two needs a visible oracle");
  if (k < 1) throw InputError("grid dimension K must be >= 1");
  const Eigen::Index dim = 3 * static_cast<Eigen::Index>(k) * k;
  const auto cfg = stage_swarm(swarm_cfg, dim, task.delta, visible_oracle);

  std::mt19937_64 eot_rng(eot_cfg.seed);
  const auto transforms = sample_transforms(eot_cfg, eot_rng);

  const Fitness<double> fitness = [&](const Eigen::VectorXd& raw) {
    const UnifiedPatch patch{shape, ColorGrid::from_raw(k, as_span(raw))};
    return expected_confidence(
        visible_oracle, [&] { return fuse_visible(task.visible, task.box, patch); }, transforms, task.box,
        task.class_label);
  };

  Eigen::VectorXd best;
  auto summary = run_stage("stage two", visible_oracle, [&] {
    std::mt19937_64 rng(cfg.seed);
    auto r = run(cfg, dim, fitness, rng);
    best = r.best_position;
    return r;
  });
  return {ColorGrid::from_raw(k, as_span(best)), std::move(summary)};
}

AttackOutcome attack(const AttackTask& task, DetectorOracle& infrared_oracle, DetectorOracle& visible_oracle,
                     const AttackSettings& settings) {
  task.validate();
  settings.eot.validate();
  const std::uint64_t ir_start = infrared_oracle.query_count();
  const std::uint64_t vis_start = visible_oracle.query_count();

  auto swarm = settings.swarm;
  auto eot = settings.eot;
  swarm.seed = derive_seed(settings.seed, seed_stream::kStageOneSwarm);
  eot.seed = derive_seed(settings.seed, seed_stream::kStageOneEot);
  auto one = stage_one(task, infrared_oracle, swarm, eot, settings.n_vertices, settings.cold);

  swarm.seed = derive_seed(settings.seed, seed_stream::kStageTwoSwarm);
  eot.seed = derive_seed(settings.seed, seed_stream::kStageTwoEot);
  auto two = stage_two(task, visible_oracle, one.shape, swarm, eot, settings.grid_k);

  AttackOutcome out{.task_id = task.id, .patch = UnifiedPatch{one.shape, two.grid}};
  out.delta = task.delta;
  out.seed = settings.seed;
  out.stage_one = std::move(one.summary);
  out.stage_two = std::move(two.summary);

  std::mt19937_64 eval_rng(derive_seed(settings.seed, seed_stream::kEvaluationEot));
  const auto eval_transforms = sample_transforms(settings.eot, settings.eot.eval_samples, eval_rng);
  const std::uint64_t ir_before_eval = infrared_oracle.query_count();
  const std::uint64_t vis_before_eval = visible_oracle.query_count();
  try {
    out.infrared_final_confidence = expected_confidence(
        infrared_oracle, [&] { return fuse_infrared(task.infrared, task.box, out.patch.shape, settings.cold); },
        eval_transforms, task.box, task.class_label);
    out.visible_final_confidence = expected_confidence(
        visible_oracle, [&] { return fuse_visible(task.visible, task.box, out.patch); }, eval_transforms,
        task.box, task.class_label);
  } catch (const OracleError& e) {
    throw StageError(std::string("final measurement failed: ") + e.what(), "evaluation",
                     infrared_oracle.query_count() - ir_start + visible_oracle.query_count() - vis_start, 0, {});
  }
  out.eval_queries_infrared = infrared_oracle.query_count() - ir_before_eval;
  out.eval_queries_visible = visible_oracle.query_count() - vis_before_eval;
  out.queries_infrared = infrared_oracle.query_count() - ir_start;
  out.queries_visible = visible_oracle.query_count() - vis_start;
  out.success_infrared = out.infrared_final_confidence < task.delta;
  out.success_visible = out.visible_final_confidence < task.delta;
  out.success_cross = out.success_infrared && out.success_visible;
  return out;
}

}  // namespace patchforge
