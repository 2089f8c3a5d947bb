#include "patchforge/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <thread>

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> oracle;
  std::optional<std::string> endpoint;
  std::optional<std::string> out;
  std::optional<int> vertices;
  std::optional<int> grid_k;
  std::optional<double> delta;
  std::optional<std::string> annotations;
};

void add_run_flags(CLI::App* cmd, std::string& config_path, Overrides& o) {
  cmd->add_option("--config", config_path, "Run config file (TOML-style sections)");
  cmd->add_option("--seed", o.seed, "Global seed");
  cmd->add_option("--jobs", o.jobs, "Tasks run in parallel (default: logical cores)");
  cmd->add_option("--oracle", o.oracle, "Oracle kind")->check(CLI::IsMember({"toy", "remote"}));
  cmd->add_option("--endpoint", o.endpoint, "Detector service URL for --oracle remote");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--vertices", o.vertices, "Polygon vertex count (3..8)");
  cmd->add_option("--grid-k", o.grid_k, "Color grid dimension K");
  cmd->add_option("--delta", o.delta, "Confidence threshold");
  cmd->add_option("--annotations", o.annotations, "Annotations file (JSON lines)");
}

patchforge::RunConfig resolve(const std::string& config_path, const Overrides& o) {
  patchforge::RunConfig cfg = config_path.empty() ? patchforge::RunConfig{} : patchforge::load_config(config_path);
  if (!o.jobs) cfg.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  patchforge::apply_environment(cfg);
  if (o.seed) cfg.attack.seed = *o.seed;
  if (o.jobs) cfg.jobs = *o.jobs;
  if (o.oracle) cfg.oracle.kind = *o.oracle;
  if (o.endpoint) cfg.oracle.endpoint = *o.endpoint;
  if (o.out) cfg.output_dir = *o.out;
  if (o.vertices) cfg.attack.n_vertices = *o.vertices;
  if (o.grid_k) cfg.attack.grid_k = *o.grid_k;
  if (o.delta) cfg.delta = *o.delta;
  if (o.annotations) cfg.dataset.annotations = *o.annotations;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"patchforge: two-stage black-box cross-modal adversarial patch optimizer"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides overrides;
  bool dry_run = false;
  auto* attack = app.add_subcommand("attack", "Optimize a unified patch for every dataset task");
  add_run_flags(attack, config_path, overrides);
  attack->add_flag("--dry-run", dry_run, "Validate config and dataset without querying any oracle");

  std::string sweep;
  auto* ablate = app.add_subcommand("ablate", "Run the vertex-count or grid-size sweep");
  ablate->add_option("sweep", sweep, "shape | k")->required();
  add_run_flags(ablate, config_path, overrides);

  std::string demo_dir = "demo";
  int demo_count = 20;
  std::uint64_t demo_seed = 0;
  auto* demo = app.add_subcommand("demo", "Write synthetic registered pairs for the toy oracles");
  demo->add_option("--out", demo_dir, "Output directory");
  demo->add_option("--count", demo_count, "Number of pairs");
  demo->add_option("--seed", demo_seed, "Generator seed");

  std::string run_dir;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Rebuild summaries from an attack run directory");
  report->add_option("run_dir", run_dir, "Directory written by `attack`")->required();
  report->add_option("--out", report_out, "Where to write the report (default: run_dir)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*attack) {
      return patchforge::cmd_attack(resolve(config_path, overrides), {dry_run}, std::cerr);
    }
    if (*ablate) {
      if (sweep != "shape" && sweep != "k") {
        std::cerr << "error: unknown sweep '" << sweep << "' (expected shape or k)\n";
        return patchforge::kExitUsage;
      }
      return patchforge::cmd_ablate(resolve(config_path, overrides), sweep, std::cerr);
    }
    if (*demo) return patchforge::cmd_demo(demo_dir, demo_count, demo_seed, std::cerr);
    if (*report) return patchforge::cmd_report(run_dir, report_out.empty() ? run_dir : report_out, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return patchforge::kExitUsage;
  }
  return patchforge::kExitUsage;
}
