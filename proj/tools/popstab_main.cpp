/// popstab: population-stability metrics for credit scorecards.
///
/// Subcommands: compute, pvalue, critical, simulate, reproduce,
/// scorecard-fit. Exit status: 0 success, 1 error, 2 when at least one
/// row classifies as a substantial change (compute/pvalue/critical) or
/// a gated benchmark comparison fails (reproduce).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "popstab/pipeline.hpp"
#include "popstab/report.hpp"
#include "popstab/reproduce.hpp"
#include "popstab/version.hpp"

namespace {

using namespace popstab;

struct CommonFlags {
  std::string format = "table";
  std::string out;
  std::uint64_t seed = kDefaultSeed;
};

void add_format_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--format", flags.format, "Output format")
      ->check(CLI::IsMember({"json", "table", "csv"}))
      ->capture_default_str();
  cmd->add_option("--out", flags.out, "Write the report to this path");
}

void add_seed_flag(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--seed", flags.seed, "RNG seed")
      ->envname("POPSTAB_SEED")
      ->capture_default_str();
}

std::string render(const report::StabilityReport& rep,
                   const std::string& format) {
  if (format == "json") return report::render_json(rep);
  if (format == "csv") return report::render_csv(rep);
  return report::render_text(rep);
}

int emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return 1;
    }
    out << text;
  }
  return 0;
}

std::vector<Metric> parse_metrics(const std::vector<std::string>& names) {
  if (names.empty()) return report::default_metrics();
  std::vector<Metric> metrics;
  for (const auto& name : names) {
    const auto metric = report::metric_from_string(name);
    if (!metric || *metric == Metric::Pai) {
      throw StabilityError(ErrorCode::InvalidArgument,
                           "unknown snapshot metric '" + name + "'");
    }
    metrics.push_back(*metric);
  }
  return metrics;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"population stability metrics for credit scorecards"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // ---- compute ----
  std::string compute_input;
  std::vector<std::string> compute_metrics;
  report::Thresholds compute_thresholds;
  double compute_overlap_threshold = -1.0;
  CommonFlags compute_flags;
  auto* cmd_compute = app.add_subcommand(
      "compute", "Compute stability metrics for a snapshot file");
  cmd_compute->add_option("snapshot", compute_input, "Snapshot CSV path")
      ->required();
  cmd_compute->add_option("--metrics", compute_metrics,
                          "Metrics (psi,dpv,effect_size,overlapping,ks)")
      ->delimiter(',');
  cmd_compute
      ->add_option("--delta", compute_thresholds.delta,
                   "Materiality threshold for the max-ratio statistic")
      ->capture_default_str();
  cmd_compute
      ->add_option("--gamma-cutoff", compute_thresholds.gamma_cutoff,
                   "Practical-significance cutoff for the weighted effect "
                   "size")
      ->capture_default_str();
  cmd_compute->add_option(
      "--overlap-threshold", compute_overlap_threshold,
      "Classify overlapping below this value as substantial (off by "
      "default)");
  add_format_flags(cmd_compute, compute_flags);
  add_seed_flag(cmd_compute, compute_flags);

  // ---- pvalue / critical ----
  struct McCommand {
    std::string input;
    std::string metric = "psi";
    long m = 0;
    long b = 10000;
    double alpha = 0.05;
    CommonFlags flags;
  };
  McCommand pvalue_cmd;
  auto* cmd_pvalue = app.add_subcommand(
      "pvalue",
      "Attach simulated null p-values and critical values to a snapshot");
  cmd_pvalue->add_option("snapshot", pvalue_cmd.input, "Snapshot CSV path")
      ->required();
  cmd_pvalue
      ->add_option("--metric", pvalue_cmd.metric,
                   "Metric (psi,dpv,effect_size,overlapping,ks)")
      ->capture_default_str();
  cmd_pvalue->add_option(
      "--m", pvalue_cmd.m,
      "Null sample size (defaults to the review counts in the file)");
  cmd_pvalue->add_option("--b", pvalue_cmd.b, "Null replications")
      ->capture_default_str();
  cmd_pvalue->add_option("--alpha", pvalue_cmd.alpha, "Significance level")
      ->capture_default_str();
  add_format_flags(cmd_pvalue, pvalue_cmd.flags);
  add_seed_flag(cmd_pvalue, pvalue_cmd.flags);

  McCommand critical_cmd;
  auto* cmd_critical = app.add_subcommand(
      "critical",
      "Simulated null critical values for the development proportions");
  cmd_critical->add_option("snapshot", critical_cmd.input,
                           "Snapshot CSV path")
      ->required();
  cmd_critical
      ->add_option("--metric", critical_cmd.metric,
                   "Metric (psi,dpv,effect_size,overlapping,ks)")
      ->capture_default_str();
  cmd_critical->add_option(
      "--m", critical_cmd.m,
      "Null sample size (defaults to the review counts in the file)");
  cmd_critical->add_option("--b", critical_cmd.b, "Null replications")
      ->capture_default_str();
  cmd_critical
      ->add_option("--alpha", critical_cmd.alpha, "Significance level")
      ->capture_default_str();
  add_format_flags(cmd_critical, critical_cmd.flags);
  add_seed_flag(cmd_critical, critical_cmd.flags);

  // ---- simulate ----
  std::string simulate_scenario;
  std::string simulate_config_path;
  long simulate_size = 10000;
  std::string simulate_out_dir = ".";
  CommonFlags simulate_flags;
  auto* cmd_simulate = app.add_subcommand(
      "simulate",
      "Draw development/review populations for a built-in or JSON scenario");
  cmd_simulate
      ->add_option("scenario", simulate_scenario,
                   "stable | stable_outcome | unstable | path to a scenario "
                   "JSON file")
      ->required();
  cmd_simulate->add_option("--size", simulate_size, "Population size")
      ->capture_default_str();
  cmd_simulate
      ->add_option("--out-dir", simulate_out_dir, "Output directory")
      ->capture_default_str();
  add_seed_flag(cmd_simulate, simulate_flags);

  // ---- reproduce ----
  repro::ReproduceOptions repro_options;
  std::string repro_out_dir = "reproduction";
  auto* cmd_reproduce = app.add_subcommand(
      "reproduce",
      "Run the three built-in benchmark scenarios and compare against the "
      "bundled reference values");
  cmd_reproduce
      ->add_option("--out-dir", repro_out_dir, "Output directory")
      ->capture_default_str();
  cmd_reproduce->add_option("--size", repro_options.size, "Population size")
      ->capture_default_str();
  cmd_reproduce
      ->add_option("--b", repro_options.b,
                   "Null replications for the attached p-values (0 = skip)")
      ->capture_default_str();
  CommonFlags repro_flags;
  add_seed_flag(cmd_reproduce, repro_flags);

  // ---- scorecard-fit ----
  std::string fit_input;
  std::string fit_model_out;
  double fit_smoothing = 0.0;
  auto* cmd_fit = app.add_subcommand(
      "scorecard-fit",
      "Fit a WOE-logistic scorecard on a population CSV and export it");
  cmd_fit->add_option("population", fit_input, "Population CSV path")
      ->required();
  cmd_fit->add_option("--out", fit_model_out, "Model JSON output path");
  cmd_fit
      ->add_option("--woe-smoothing", fit_smoothing,
                   "Additive smoothing constant for degenerate levels")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_compute->parsed()) {
      if (compute_overlap_threshold >= 0.0) {
        compute_thresholds.overlap_threshold = compute_overlap_threshold;
      }
      const auto data = io::read_snapshot_file(compute_input);
      const auto metrics = parse_metrics(compute_metrics);
      const auto rep = report::build_report(data, metrics,
                                            compute_thresholds,
                                            compute_flags.seed);
      if (int rc = emit(render(rep, compute_flags.format),
                        compute_flags.out)) {
        return rc;
      }
      return report::exit_status(rep);
    }

    for (const auto& [cmd, mc_command, critical_only] :
         {std::tuple<CLI::App*, McCommand*, bool>{cmd_pvalue, &pvalue_cmd,
                                                  false},
          std::tuple<CLI::App*, McCommand*, bool>{cmd_critical,
                                                  &critical_cmd, true}}) {
      if (!cmd->parsed()) continue;
      const auto metric = report::metric_from_string(mc_command->metric);
      if (!metric || *metric == Metric::Pai) {
        throw StabilityError(ErrorCode::InvalidArgument,
                             "unknown metric '" + mc_command->metric + "'");
      }
      const auto data = io::read_snapshot_file(mc_command->input);
      auto rep = report::build_report(data, {*metric}, report::Thresholds{},
                                      mc_command->flags.seed);
      std::optional<long> m_override;
      if (mc_command->m > 0) m_override = mc_command->m;
      report::attach_mc(rep, *metric, mc_command->b, mc_command->alpha,
                        m_override, mc_command->flags.seed, critical_only);
      if (int rc = emit(render(rep, mc_command->flags.format),
                        mc_command->flags.out)) {
        return rc;
      }
      return report::exit_status(rep);
    }

    if (cmd_simulate->parsed()) {
      sim::ScenarioConfig config;
      if (auto kind = sim::scenario_from_string(simulate_scenario)) {
        config = sim::builtin_scenarios()[static_cast<std::size_t>(*kind)];
      } else if (std::filesystem::exists(simulate_scenario)) {
        std::ifstream in(simulate_scenario);
        std::stringstream buffer;
        buffer << in.rdbuf();
        config = sim::scenario_from_json(buffer.str());
      } else {
        throw StabilityError(ErrorCode::UnknownScenario, simulate_scenario);
      }
      config.population_size = simulate_size;

      const auto development = sim::simulate(
          config, sim::PopulationRole::Development, simulate_flags.seed);
      const auto review = sim::simulate(config, sim::PopulationRole::Review,
                                        simulate_flags.seed);

      io::SnapshotData snapshot;
      for (const auto& attribute : config.base) {
        snapshot.attributes.push_back(
            {attribute.name,
             sim::snapshot(development, review, attribute.name)});
      }

      namespace fs = std::filesystem;
      fs::create_directories(simulate_out_dir);
      const fs::path base(simulate_out_dir);
      const std::vector<std::string> comments = {
          "popstab " + std::string(kVersion),
          "scenario: " + config.name,
          "seed: " + std::to_string(simulate_flags.seed),
          "size: " + std::to_string(simulate_size)};
      io::write_snapshot_file(
          (base / (config.name + "_snapshot.csv")).string(), snapshot, true,
          comments);
      io::write_population_csv(
          (base / (config.name + "_population_dev.csv")).string(),
          development, comments);
      io::write_population_csv(
          (base / (config.name + "_population_review.csv")).string(), review,
          comments);
      std::cout << "wrote " << config.name << " snapshot and populations to "
                << simulate_out_dir << "\n";
      return 0;
    }

    if (cmd_reproduce->parsed()) {
      repro_options.seed = repro_flags.seed;
      repro_options.with_pvalues = repro_options.b > 0;
      const auto result = repro::run(repro_options);
      repro::write_outputs(result, repro_out_dir);
      std::cout << repro::render_comparison_text(result);
      std::cout << "outputs written to " << repro_out_dir << "\n";
      return result.pass() ? 0 : 2;
    }

    if (cmd_fit->parsed()) {
      const auto data = io::read_population_csv(fit_input);
      const auto fitted = pipeline::fit_scorecard(data, fit_smoothing);
      std::cout << "observations: " << data.size() << "\n";
      std::cout << "attribute          IV        band\n";
      for (std::size_t a = 0; a < fitted.attribute_names.size(); ++a) {
        char line[96];
        std::snprintf(line, sizeof(line), "%-18s %-9.5f %s",
                      fitted.attribute_names[a].c_str(),
                      fitted.information_values[a].value,
                      scorecard::to_string(
                          fitted.information_values[a].band)
                          .c_str());
        std::cout << line << "\n";
      }
      std::cout << "intercept: " << fitted.fit.intercept
                << "  iterations: " << fitted.fit.iterations
                << "  converged: " << (fitted.fit.converged ? "yes" : "no")
                << "\n";
      if (fitted.fit.separation_suspected) {
        std::cout << "warning: separation suspected (a coefficient hit the "
                     "cap)\n";
      }
      if (!fit_model_out.empty()) {
        std::ofstream out(fit_model_out);
        if (!out) {
          std::cerr << "error: cannot write " << fit_model_out << "\n";
          return 1;
        }
        out << scorecard::model_to_json(fitted.model);
        std::cout << "model written to " << fit_model_out << "\n";
      }
      return 0;
    }
  } catch (const StabilityError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  return 0;
}
