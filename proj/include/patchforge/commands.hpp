#ifndef PATCHFORGE_COMMANDS_HPP
#define PATCHFORGE_COMMANDS_HPP

#include "patchforge/config.hpp"
#include "patchforge/evaluation.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace patchforge {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,    // bad flags, config or dataset
  kExitOracle = 2,   // oracle/transport failure; completed tasks are kept
};

/// Toy or remote oracles per the config's oracle section.
OracleFactory make_oracle_factory(const RunConfig& cfg);

/// Writes the box-sized visible patch (RGBA, mask as alpha) and the
/// infrared mask (gray, 255 inside the patch).
void export_patch(const std::filesystem::path& dir, const UnifiedPatch& patch, const BoundingBox& box);

struct AttackOptions {
  bool dry_run = false;
};

/// Runs every task of the dataset and writes, under cfg.output_dir:
///   <task>/outcome.json, <task>/patch_visible.png, <task>/patch_infrared.png,
///   <mode>_summary.csv, report.json, resolved_config.toml
int cmd_attack(const RunConfig& cfg, const AttackOptions& opts, const OracleFactory& factory, std::ostream& log);
int cmd_attack(const RunConfig& cfg, const AttackOptions& opts, std::ostream& log);

/// Synthetic registered pairs for the toy oracles: a bright infrared target
/// and a reference-colored visible target on noise backgrounds. Also writes
/// annotations.jsonl and a matching config.toml.
int cmd_demo(const std::filesystem::path& dir, int count, std::uint64_t seed, std::ostream& log,
             const RunConfig& base = RunConfig{});

/// sweep: "shape" (n = 3..8) or "k" (K in {1, 6, 12, 18, 24, 30}).
int cmd_ablate(const RunConfig& cfg, const std::string& sweep, const OracleFactory& factory, std::ostream& log);
int cmd_ablate(const RunConfig& cfg, const std::string& sweep, std::ostream& log);

/// Rebuilds the summaries of an attack run directory from its outcome files.
int cmd_report(const std::filesystem::path& run_dir, const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace patchforge

#endif  // PATCHFORGE_COMMANDS_HPP
