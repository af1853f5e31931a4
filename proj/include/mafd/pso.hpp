#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "mafd/channel.hpp"
#include "mafd/robust_inner.hpp"
#include "mafd/scenario.hpp"

namespace mafd {

struct SwarmConfig {
  int num_particles = 30;    // Z
  int max_iterations = 100;  // Q
  double inertia_min = 0.4;  // omega_min
  double inertia_max = 0.9;  // omega_max
  double cognitive = 1.4;    // alpha_1
  double social = 1.4;       // alpha_2
  double penalty = 1.0;      // beta
  /// Initial velocities are uniform in [-f A, f A] per coordinate.
  double init_velocity_fraction = 0.25;
  /// Attempts per antenna set before falling back to a centered grid.
  int max_init_attempts = 2000;
  std::uint64_t rng_seed = 1;

  bool operator==(const SwarmConfig&) const = default;
};

/// Z = 20, Q = 60 (desk scale).
SwarmConfig desk_swarm_config();

/// Throws ConfigError naming the first violated invariant.
void validate(const SwarmConfig& config);

inline constexpr double kInfeasibleFitness = std::numeric_limits<double>::infinity();

/// Per-coordinate box of the stacked position vector u = [t; r].
struct RegionBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};
RegionBounds region_bounds(const SystemConfig& sys);

/// Throws ConfigError when a region cannot host its antennas at spacing D on
/// a ceil(sqrt(n)) x ceil(sqrt(n)) grid.
void check_packing(const SystemConfig& sys);

/// n positions uniform in [-A/2, A/2]^2, pairwise at least `min_spacing`
/// apart. Rejection sampling; after `max_attempts` failed draws of the whole
/// set the centered grid of pitch A / (ceil(sqrt(n)) - 1) is returned.
Eigen::Matrix2Xd sample_spaced_positions(int n, double region, double min_spacing, int max_attempts, std::mt19937_64& rng);

/// Centered ceil(sqrt(n))-column grid with the given pitch, filled row by row.
Eigen::Matrix2Xd centered_grid(int n, double pitch);

struct Particle {
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  Eigen::VectorXd pbest_u;
  double pbest_fitness = kInfeasibleFitness;
  int pbest_penalty = 0;
};

struct Swarm {
  std::vector<Particle> particles;
  Eigen::VectorXd gbest_u;
  double gbest_fitness = kInfeasibleFitness;
  int gbest_penalty = 0;
  std::mt19937_64 rng;
};

/// Positions satisfy C4-C6 (rejection sampled), velocities uniform, pbest = u.
/// Fitness values are not evaluated; gbest is the first particle until
/// `run_swarm` folds the initial evaluations.
Swarm init_swarm(const SwarmConfig& cfg, const SystemConfig& sys);

/// omega(q) = omega_max - (omega_max - omega_min) q / Q.
double inertia(int q, const SwarmConfig& cfg);

Eigen::VectorXd update_velocity(const Particle& particle, const Eigen::VectorXd& gbest_u, int q, const SwarmConfig& cfg,
                                std::mt19937_64& rng);

/// Clamp of u + v into the region box.
Eigen::VectorXd update_position(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const RegionBounds& bounds);

/// Number of antennas (not pairs) that have a same-region neighbour closer
/// than `min_spacing`, summed over the two regions.
int penalty_count(const AntennaLayout& layout, double min_spacing);

struct FitnessResult {
  double fitness = kInfeasibleFitness;
  int penalty = 0;
  double tau = kInfeasibleFitness;
  conic::SolveStatus status = conic::SolveStatus::infeasible;
  std::string warning;  // nonempty for numerical failures and singular channels
};

using FitnessFn = std::function<FitnessResult(const Eigen::VectorXd& u)>;

/// tau(u) + beta xi(u); +infinity when the inner problem has no solution.
FitnessResult fitness(const AntennaLayout& layout, const Scenario& scenario, double beta,
                      const InnerOptions& options = {});

struct TraceRow {
  int iteration = 0;
  double gbest_fitness = kInfeasibleFitness;
  int gbest_penalty = 0;
  Eigen::VectorXd gbest_u;
};

class SwarmTrace {
 public:
  /// Throws ContractViolation if the fitness increases.
  void append(TraceRow row);
  const std::vector<TraceRow>& rows() const { return rows_; }
  /// iteration,gbest_fitness,gbest_penalty
  void write_csv(std::ostream& out) const;

 private:
  std::vector<TraceRow> rows_;
};

struct SwarmResult {
  Eigen::VectorXd best_u;
  double best_fitness = kInfeasibleFitness;
  int best_penalty = 0;
  SwarmTrace trace;
  std::vector<std::string> warnings;
  int evaluations = 0;
  bool found_feasible() const { return best_fitness < kInfeasibleFitness; }
};

/// The PSO loop over an arbitrary fitness. Fitness values of one iteration
/// are evaluated with up to `threads` workers and folded in particle order.
SwarmResult run_swarm(const SwarmConfig& cfg, const SystemConfig& sys, const FitnessFn& fitness_fn, int threads = 1);

struct PsoResult {
  AntennaLayout best_layout;
  InnerSolution solution;  // re-solved at best_layout
  SwarmTrace trace;
  double best_fitness = kInfeasibleFitness;
  int best_penalty = 0;
  std::vector<std::string> warnings;
  int evaluations = 0;
  bool found_feasible = false;
};

/// Optimizes antenna positions for `scenario`. When no particle ever reaches
/// a finite fitness, found_feasible is false and the solution is the re-solve
/// of the first initial particle.
PsoResult run(const Scenario& scenario, const SwarmConfig& cfg, const InnerOptions& options = {}, int threads = 1);

}  // namespace mafd
