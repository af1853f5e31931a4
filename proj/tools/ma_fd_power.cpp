// ma-fd-power: desk-scale experiments for movable-antenna full-duplex
// satellite power minimization.
//
//   ma-fd-power <convergence|tradeoff|si-sweep|single> --config <path>
//               --seeds <list> --out <dir> [--full-scale] [--audit]
//   ma-fd-power plot --out <dir>
//
// Exit codes: 0 success, 1 runtime or audit failure, 2 configuration error,
// 3 every cell infeasible.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "mafd/errors.hpp"
#include "mafd/experiments.hpp"
#include "mafd/plots.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

// "1,2,5-8" -> 1 2 5 6 7 8
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    pos = comma == std::string::npos ? text.size() + 1 : comma + 1;
    if (item.empty()) throw mafd::ConfigError("--seeds: empty entry in '" + text + "'");
    const std::size_t dash = item.find('-');
    try {
      std::size_t used = 0;
      if (dash == std::string::npos) {
        out.push_back(std::stoull(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } else {
        const std::string a = item.substr(0, dash);
        const std::string b = item.substr(dash + 1);
        std::size_t ua = 0, ub = 0;
        const auto lo = std::stoull(a, &ua);
        const auto hi = std::stoull(b, &ub);
        if (ua != a.size() || ub != b.size() || hi < lo || hi - lo > 100000) throw std::invalid_argument(item);
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw mafd::ConfigError("--seeds: cannot parse '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Movable-antenna full-duplex satellite power minimization experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string seeds_text;
  std::string out_dir = "out";
  bool full = false;
  bool audit = false;
  bool no_plots = false;
  int threads = 0;

  struct Command {
    CLI::App* app;
    mafd::ExperimentKind kind;
  };
  std::vector<Command> commands;
  auto add_experiment = [&](const char* name, const char* help, mafd::ExperimentKind kind) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Key = value configuration file");
    sub->add_option("--seeds", seeds_text, "Root seeds, e.g. 1,2,5-8");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_flag("--full-scale", full, "Use the full-scale system (M = N = 16, J = 6, Z = 30, Q = 100)");
    sub->add_flag("--audit", audit, "Re-solve every recorded layout and compare (T1, T2)");
    sub->add_flag("--no-plots", no_plots, "Skip SVG rendering");
    sub->add_option("--threads", threads, "Fitness evaluation workers")->check(CLI::Range(1, 256));
    commands.push_back({sub, kind});
  };
  add_experiment("convergence", "PSO convergence traces per region size", mafd::ExperimentKind::convergence);
  add_experiment("tradeoff", "UL/DL power trade-off over the weight grid", mafd::ExperimentKind::tradeoff);
  add_experiment("si-sweep", "Powers versus the SI loss coefficient", mafd::ExperimentKind::si_sweep);
  add_experiment("single", "One MA optimization and the FPA baseline", mafd::ExperimentKind::single);
  CLI::App* plot = app.add_subcommand("plot", "Render SVG figures from the CSVs in a directory");
  plot->add_option("--out", out_dir, "Directory holding the CSVs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (plot->parsed()) {
      const auto files = mafd::emit_plots(out_dir);
      if (files.empty()) {
        std::cerr << "error: no plottable CSV in '" << out_dir << "'\n";
        return kExitConfig;
      }
      for (const auto& f : files) std::cout << f << '\n';
      return 0;
    }

    mafd::ExperimentSpec spec;
    for (const Command& c : commands) {
      if (c.app->parsed()) spec.kind = c.kind;
    }
    if (full) spec = mafd::full_scale(spec);
    if (!config_path.empty()) spec = mafd::load_experiment(config_path, spec);
    if (!seeds_text.empty()) spec.seeds = parse_seeds(seeds_text);
    spec.output_dir = out_dir;
    spec.audit = audit;
    spec.write_plots = !no_plots;
    if (threads > 0) spec.threads = threads;
    mafd::validate(spec);

    const mafd::ExperimentReport report = mafd::run_experiment(spec);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& f : report.files) std::cout << f << '\n';
    std::cout << mafd::to_string(spec.kind) << ": " << report.feasible_cells << " of " << report.cells
              << " cells feasible\n";
    if (spec.audit) {
      std::cout << "audit: " << report.audit_checks << " rows re-solved, " << report.audit_failures
                << " failures, max deviation " << report.audit_max_deviation << '\n';
    }
    if (report.all_infeasible()) {
      std::cerr << "error: every cell is infeasible\n";
      return kExitInfeasible;
    }
    if (report.audit_failures > 0) return kExitRuntime;
    return 0;
  } catch (const mafd::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mafd::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
