#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mafd/channel.hpp"
#include "mafd/pso.hpp"
#include "mafd/robust_inner.hpp"
#include "mafd/scenario.hpp"

namespace mafd {

enum class ExperimentKind { convergence, tradeoff, si_sweep, single };

const char* to_string(ExperimentKind kind);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::single;
  SystemConfig system = desk_config();
  SwarmConfig swarm = desk_swarm_config();
  std::vector<double> region_sizes = {3.0, 5.0};  // wavelengths (convergence)
  double weight_step = 0.1;                       // tradeoff grid on lambda_1
  std::vector<double> rho_db = {-120.0, -110.0, -100.0, -90.0};
  std::vector<int> fpa_antennas = {8};  // N~ per side for the FPA baseline
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::string output_dir = "out";
  bool audit = false;
  int threads = 1;
  bool write_plots = true;
};

/// Full-scale system and swarm (M = N = 16, J = 6, Z = 30, Q = 100).
ExperimentSpec full_scale(ExperimentSpec spec);

/// Throws ConfigError on an empty sweep, a weight step that does not divide
/// 1 evenly, a bad FPA size or an invalid system/swarm configuration.
void validate(const ExperimentSpec& spec);

/// Reads system keys (as parse_config) plus the experiment keys
/// swarm_particles, swarm_iterations, inertia_min, inertia_max, cognitive,
/// social, penalty, init_velocity_fraction, region_sizes_wavelengths,
/// weight_step, rho_db, fpa_antennas, threads.
ExperimentSpec parse_experiment(std::istream& in, const std::string& source, ExperimentSpec base = {});
ExperimentSpec load_experiment(const std::string& path, ExperimentSpec base = {});

/// splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);
/// Seed of one experiment cell: a pure function of the root seed, the stream
/// tag and the cell index.
std::uint64_t cell_seed(std::uint64_t root, std::uint64_t stream, std::uint64_t index);

/// Scenario drawn for root seed `seed` (independent of sweep values).
Scenario instance(const SystemConfig& base, std::uint64_t seed);

/// lambda_1 grid 0, step, ..., 1.
std::vector<double> weight_grid(double step);

/// Uniform planar array with lambda/2 pitch, n antennas per side, centered.
/// Columns = smallest divisor of n not below sqrt(n).
AntennaLayout fpa_layout(int n, double wavelength);

/// "x1 y1 x2 y2 ..." for the stacked [t; r] vector, 17 significant digits.
std::string encode_layout(const AntennaLayout& layout);
AntennaLayout decode_layout(const std::string& text, int num_tx, int num_rx);

/// First iteration after which the gbest fitness changes by less than `tol`.
int iterations_to_stability(const SwarmTrace& trace, double tol = 1e-6);

struct ExperimentReport {
  std::vector<std::string> files;     // every file written
  std::vector<std::string> warnings;  // per-cell failures and solver warnings
  int cells = 0;
  int feasible_cells = 0;
  int audit_checks = 0;
  int audit_failures = 0;
  double audit_max_deviation = 0.0;
  bool all_infeasible() const { return cells > 0 && feasible_cells == 0; }
};

ExperimentReport run_convergence(const ExperimentSpec& spec);
ExperimentReport run_tradeoff(const ExperimentSpec& spec);
ExperimentReport run_si_sweep(const ExperimentSpec& spec);
ExperimentReport run_single(const ExperimentSpec& spec);
ExperimentReport run_experiment(const ExperimentSpec& spec);

/// Re-solves the layout written in a CSV row and returns
/// max(|T1 - T1'|, |T2 - T2'|) / max(1, |T1|, |T2|).
double audit_row(const Scenario& scenario, const std::string& layout_text, int num_tx, int num_rx, double total_ul,
                 double total_dl, const InnerOptions& options);

}  // namespace mafd
