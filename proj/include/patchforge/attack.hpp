#ifndef PATCHFORGE_ATTACK_HPP
#define PATCHFORGE_ATTACK_HPP

#include "patchforge/color_grid.hpp"
#include "patchforge/eot.hpp"
#include "patchforge/fusion.hpp"
#include "patchforge/geometry.hpp"
#include "patchforge/oracle.hpp"
#include "patchforge/pso.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace patchforge {

/// Registered visible/infrared pair with the target box shared by both.
struct AttackTask {
  std::string id;
  Image visible;
  Image infrared;
  BoundingBox box;
  std::string class_label = "car";
  double delta = 0.5;

  void validate() const;
};

struct AttackSettings {
  /// Bounds are set per stage; everything else applies to both stages.
  SwarmConfig<double> swarm;
  EotConfig eot;
  int n_vertices = 8;
  int grid_k = 18;
  ColdIntensity cold;
  std::uint64_t seed = 0;
};

/// splitmix64 of (base, stream); used to give every stage and task its own
/// reproducible random stream.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

struct StageSummary {
  double best_fitness = 0.0;
  std::int64_t evaluations = 0;
  int generations = 0;
  bool stopped_early = false;
  std::uint64_t queries = 0;
  std::vector<GenerationRecord> history;
};

struct StageOneResult {
  PolygonPatch shape;
  StageSummary summary;
};

struct StageTwoResult {
  ColorGrid grid;
  StageSummary summary;
};

/// A stage failed because its oracle did. Carries the queries and fitness
/// evaluations completed before the failure.
class StageError : public std::runtime_error {
 public:
  StageError(const std::string& what, std::string stage, std::uint64_t queries, std::int64_t evaluations,
             std::vector<GenerationRecord> history)
      : std::runtime_error(what),
        stage_(std::move(stage)),
        queries_(queries),
        evaluations_(evaluations),
        history_(std::move(history)) {}
  const std::string& stage() const { return stage_; }
  std::uint64_t queries() const { return queries_; }
  std::int64_t evaluations() const { return evaluations_; }
  const std::vector<GenerationRecord>& history() const { return history_; }

 private:
  std::string stage_;
  std::uint64_t queries_;
  std::int64_t evaluations_;
  std::vector<GenerationRecord> history_;
};

/// Optimizes the polygon shape against the infrared oracle. The swarm
/// searches the 2n cell offsets; early stop at task.delta. Uses
/// swarm_cfg.seed and eot_cfg.seed as given.
StageOneResult stage_one(const AttackTask& task, DetectorOracle& infrared_oracle,
                         const SwarmConfig<double>& swarm_cfg, const EotConfig& eot_cfg, int n_vertices,
                         ColdIntensity cold = ColdIntensity{});

/// Optimizes the K x K colors against the visible oracle with `shape` frozen
/// as the mask. The swarm searches 3K^2 channel values in [0,1].
StageTwoResult stage_two(const AttackTask& task, DetectorOracle& visible_oracle, const PolygonPatch& shape,
                         const SwarmConfig<double>& swarm_cfg, const EotConfig& eot_cfg, int k);

struct AttackOutcome {
  std::string task_id;
  UnifiedPatch patch;
  double delta = 0.5;
  std::uint64_t seed = 0;
  double infrared_final_confidence = 1.0;
  double visible_final_confidence = 1.0;
  bool success_infrared = false;
  bool success_visible = false;
  bool success_cross = false;
  /// Every query the attack sent to each oracle, final measurement included.
  std::uint64_t queries_infrared = 0;
  std::uint64_t queries_visible = 0;
  /// The part of the above spent on the final measurement.
  std::uint64_t eval_queries_infrared = 0;
  std::uint64_t eval_queries_visible = 0;
  StageSummary stage_one;
  StageSummary stage_two;
};

/// Stage one, stage two, then a success measurement on a fresh set of
/// eot.eval_samples transforms. Success in a modality means the measured
/// confidence is below delta; cross-modal success needs both.
AttackOutcome attack(const AttackTask& task, DetectorOracle& infrared_oracle, DetectorOracle& visible_oracle,
                     const AttackSettings& settings);

/// Stage seeds derived by attack() from settings.seed.
namespace seed_stream {
inline constexpr std::uint64_t kStageOneSwarm = 1;
inline constexpr std::uint64_t kStageOneEot = 2;
inline constexpr std::uint64_t kStageTwoSwarm = 3;
inline constexpr std::uint64_t kStageTwoEot = 4;
inline constexpr std::uint64_t kEvaluationEot = 5;
}  // namespace seed_stream

}  // namespace patchforge

#endif  // PATCHFORGE_ATTACK_HPP
