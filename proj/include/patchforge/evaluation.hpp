#ifndef PATCHFORGE_EVALUATION_HPP
#define PATCHFORGE_EVALUATION_HPP

#include "patchforge/attack.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace patchforge {

enum class AsrMode { Infrared, Visible, Cross };

const char* to_string(AsrMode m);
AsrMode asr_mode_from_string(const std::string& s);

/// Raised when no task in a record set counts toward N.
class UndefinedAsrError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvalRecord {
  std::string task_id;
  bool clean_detected_infrared = false;
  bool clean_detected_visible = false;
  std::optional<AttackOutcome> outcome;
  /// Set when the task could not be completed (e.g. oracle failure).
  std::optional<std::string> error;
};

struct EvalSummary {
  AsrMode mode = AsrMode::Cross;
  int n_counted = 0;
  int successes = 0;
  double asr = 0.0;
  /// Mode queries: infrared, visible, or their sum in cross mode.
  double mean_queries = 0.0;
  double mean_queries_infrared = 0.0;
  double mean_queries_visible = 0.0;

  friend bool operator==(const EvalSummary&, const EvalSummary&) = default;
};

/// Success fraction over the tasks detected on clean images in the mode's
/// modality (both modalities in cross mode). Success compares the final
/// confidences against `delta`. Throws UndefinedAsrError when N = 0.
EvalSummary asr(std::span<const EvalRecord> records, double delta, AsrMode mode);

/// Builds a fresh oracle for a task; called once per use so that every
/// attack sees its own query counters.
using OracleFactory = std::function<std::unique_ptr<DetectorOracle>(const AttackTask&, Modality)>;

/// Clean detection check (one query per modality on separate oracle
/// instances), then a full attack when the target is detected in at least
/// one modality. Task i uses seed derive_seed(settings.seed, i).
std::vector<EvalRecord> evaluate(std::span<const AttackTask> tasks, const OracleFactory& factory,
                                 const AttackSettings& settings, int jobs = 1);

EvalRecord evaluate_task(const AttackTask& task, const OracleFactory& factory, const AttackSettings& settings);

struct AblationRow {
  int value = 0;  // n or K
  EvalSummary cross;
  EvalSummary infrared;
  EvalSummary visible;
};

/// Full evaluation per vertex count, identical per-task seeds across rows.
std::vector<AblationRow> ablate_shape(std::span<const AttackTask> tasks, const std::vector<int>& n_values,
                                      const OracleFactory& factory, const AttackSettings& settings, int jobs = 1);

/// Same for the grid dimension K.
std::vector<AblationRow> ablate_k(std::span<const AttackTask> tasks, const std::vector<int>& k_values,
                                  const OracleFactory& factory, const AttackSettings& settings, int jobs = 1);

inline const std::vector<int> kShapeSweep{3, 4, 5, 6, 7, 8};
inline const std::vector<int> kGridSweep{1, 6, 12, 18, 24, 30};

/// "mode,n_counted,asr,mean_queries" plus one line per summary.
std::string summaries_csv(std::span<const EvalSummary> summaries);
/// "<column>,asr,mean_queries" over the cross-modal summaries.
std::string ablation_csv(std::span<const AblationRow> rows, const std::string& column);

nlohmann::json summary_to_json(const EvalSummary& s);
EvalSummary summary_from_json(const nlohmann::json& j);
nlohmann::json record_to_json(const EvalRecord& r);
EvalRecord record_from_json(const nlohmann::json& j);

nlohmann::json report_json(std::span<const EvalSummary> summaries, std::span<const EvalRecord> records);
std::vector<EvalSummary> summaries_from_report(const nlohmann::json& report);

/// Summaries in the modes that have N > 0.
std::vector<EvalSummary> summarize(std::span<const EvalRecord> records, double delta);

/// Writes <dir>/<mode>_summary.csv per summary and <dir>/report.json.
void emit_report(const std::filesystem::path& dir, std::span<const EvalSummary> summaries,
                 std::span<const EvalRecord> records);

/// Text with a trailing newline; the same inputs always give the same bytes.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace patchforge

#endif  // PATCHFORGE_EVALUATION_HPP
