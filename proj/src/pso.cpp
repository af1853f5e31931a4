#include "mafd/pso.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <ostream>
#include <sstream>
#include <thread>

#include "mafd/errors.hpp"
#include "text_util.hpp"

namespace mafd {

SwarmConfig desk_swarm_config() {
  SwarmConfig c;
  c.num_particles = 20;
  c.max_iterations = 60;
  return c;
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(std::string("invalid swarm configuration: ") + what);
}

int grid_columns(int n) { return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)) - 1e-12)); }

}  // namespace

void validate(const SwarmConfig& c) {
  require(c.num_particles >= 1, "num_particles >= 1");
  require(c.max_iterations >= 0, "max_iterations >= 0");
  require(c.inertia_min >= 0.0 && c.inertia_min <= c.inertia_max, "0 <= inertia_min <= inertia_max");
  require(c.cognitive >= 0.0 && c.social >= 0.0, "learning factors >= 0");
  require(c.penalty > 0.0, "penalty > 0");
  require(c.init_velocity_fraction >= 0.0, "init_velocity_fraction >= 0");
  require(c.max_init_attempts >= 1, "max_init_attempts >= 1");
}

RegionBounds region_bounds(const SystemConfig& sys) {
  const int m = sys.num_tx_antennas;
  const int n = sys.num_rx_antennas;
  RegionBounds b;
  b.upper.resize(2 * (m + n));
  b.upper.head(2 * m).setConstant(0.5 * sys.region_size_tx);
  b.upper.tail(2 * n).setConstant(0.5 * sys.region_size_rx);
  b.lower = -b.upper;
  return b;
}

void check_packing(const SystemConfig& sys) {
  auto fits = [&](int n, double region) {
    const int cols = grid_columns(n);
    if (cols <= 1) return true;
    return region / (cols - 1) >= sys.min_spacing;
  };
  if (!fits(sys.num_tx_antennas, sys.region_size_tx)) {
    throw ConfigError("invalid configuration: transmit region cannot host num_tx_antennas at min_spacing");
  }
  if (!fits(sys.num_rx_antennas, sys.region_size_rx)) {
    throw ConfigError("invalid configuration: receive region cannot host num_rx_antennas at min_spacing");
  }
}

Eigen::Matrix2Xd centered_grid(int n, double pitch) {
  const int cols = std::max(1, grid_columns(n));
  const int rows = (n + cols - 1) / cols;
  Eigen::Matrix2Xd out(2, n);
  for (int i = 0; i < n; ++i) {
    out(0, i) = (i % cols - 0.5 * (cols - 1)) * pitch;
    out(1, i) = (i / cols - 0.5 * (rows - 1)) * pitch;
  }
  return out;
}

Eigen::Matrix2Xd sample_spaced_positions(int n, double region, double min_spacing, int max_attempts,
                                         std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coord(-0.5 * region, 0.5 * region);
  constexpr int kTriesPerAntenna = 64;
  Eigen::Matrix2Xd out(2, n);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      ok = false;
      for (int t = 0; t < kTriesPerAntenna && !ok; ++t) {
        const double x = coord(rng);
        const double y = coord(rng);
        out(0, i) = x;
        out(1, i) = y;
        ok = true;
        for (int k = 0; k < i && ok; ++k) ok = (out.col(k) - out.col(i)).norm() >= min_spacing;
      }
    }
    if (ok) return out;
  }
  const int cols = grid_columns(n);
  return centered_grid(n, cols > 1 ? region / (cols - 1) : 0.0);
}

Swarm init_swarm(const SwarmConfig& cfg, const SystemConfig& sys) {
  validate(cfg);
  check_packing(sys);
  Swarm swarm;
  swarm.rng.seed(cfg.rng_seed);
  const int m = sys.num_tx_antennas;
  const int n = sys.num_rx_antennas;
  const double vt = cfg.init_velocity_fraction * sys.region_size_tx;
  const double vr = cfg.init_velocity_fraction * sys.region_size_rx;
  for (int z = 0; z < cfg.num_particles; ++z) {
    AntennaLayout layout;
    layout.tx = sample_spaced_positions(m, sys.region_size_tx, sys.min_spacing, cfg.max_init_attempts, swarm.rng);
    layout.rx = sample_spaced_positions(n, sys.region_size_rx, sys.min_spacing, cfg.max_init_attempts, swarm.rng);
    Particle p;
    p.u = layout.to_vector();
    p.v.resize(p.u.size());
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (Eigen::Index i = 0; i < p.v.size(); ++i) p.v[i] = unit(swarm.rng) * (i < 2 * m ? vt : vr);
    p.pbest_u = p.u;
    swarm.particles.push_back(std::move(p));
  }
  swarm.gbest_u = swarm.particles.front().u;
  return swarm;
}

double inertia(int q, const SwarmConfig& cfg) {
  if (cfg.max_iterations == 0) return cfg.inertia_max;
  return cfg.inertia_max - (cfg.inertia_max - cfg.inertia_min) * static_cast<double>(q) / cfg.max_iterations;
}

Eigen::VectorXd update_velocity(const Particle& particle, const Eigen::VectorXd& gbest_u, int q, const SwarmConfig& cfg,
                                std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Eigen::Index d = particle.u.size();
  Eigen::VectorXd e1(d), e2(d);
  for (Eigen::Index i = 0; i < d; ++i) e1[i] = unit(rng);
  for (Eigen::Index i = 0; i < d; ++i) e2[i] = unit(rng);
  return inertia(q, cfg) * particle.v + cfg.cognitive * e1.cwiseProduct(particle.pbest_u - particle.u) +
         cfg.social * e2.cwiseProduct(gbest_u - particle.u);
}

Eigen::VectorXd update_position(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const RegionBounds& bounds) {
  return (u + v).cwiseMax(bounds.lower).cwiseMin(bounds.upper);
}

int penalty_count(const AntennaLayout& layout, double min_spacing) {
  auto count = [min_spacing](const Eigen::Matrix2Xd& pos) {
    std::vector<char> bad(pos.cols(), 0);
    for (int a = 0; a < pos.cols(); ++a) {
      for (int b = a + 1; b < pos.cols(); ++b) {
        if ((pos.col(a) - pos.col(b)).norm() < min_spacing) bad[a] = bad[b] = 1;
      }
    }
    return static_cast<int>(std::count(bad.begin(), bad.end(), 1));
  };
  return count(layout.tx) + count(layout.rx);
}

FitnessResult fitness(const AntennaLayout& layout, const Scenario& scenario, double beta, const InnerOptions& options) {
  FitnessResult r;
  r.penalty = penalty_count(layout, scenario.config.min_spacing);
  try {
    const InnerProblemData data = make_inner_data(scenario, layout);
    const InnerSolution sol = solve_inner(data, options);
    r.status = sol.status;
    if (sol.optimal()) {
      r.tau = sol.tau;
      r.fitness = sol.tau + beta * r.penalty;
    } else if (sol.status == conic::SolveStatus::numerical_failure) {
      r.warning = "inner solver failed: " + sol.message;
    }
  } catch (const SingularityError& e) {
    r.status = conic::SolveStatus::infeasible;
    r.warning = e.what();
  }
  return r;
}

void SwarmTrace::append(TraceRow row) {
  if (!rows_.empty() && row.gbest_fitness > rows_.back().gbest_fitness) {
    std::ostringstream msg;
    msg << "swarm trace: gbest fitness increased at iteration " << row.iteration;
    throw ContractViolation(msg.str());
  }
  rows_.push_back(std::move(row));
}

void SwarmTrace::write_csv(std::ostream& out) const {
  out << "iteration,gbest_fitness,gbest_penalty\n";
  for (const TraceRow& r : rows_) out << r.iteration << ',' << text::num(r.gbest_fitness) << ',' << r.gbest_penalty << '\n';
}

namespace {

std::vector<FitnessResult> evaluate_all(const std::vector<Particle>& particles, const FitnessFn& fn, int threads) {
  std::vector<FitnessResult> out(particles.size());
  const int workers = std::clamp(threads, 1, static_cast<int>(particles.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < particles.size(); ++i) out[i] = fn(particles[i].u);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < particles.size(); i += workers) out[i] = fn(particles[i].u);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace

SwarmResult run_swarm(const SwarmConfig& cfg, const SystemConfig& sys, const FitnessFn& fitness_fn, int threads) {
  Swarm swarm = init_swarm(cfg, sys);
  const RegionBounds bounds = region_bounds(sys);
  SwarmResult result;

  auto fold = [&](const std::vector<FitnessResult>& values, int q) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      const FitnessResult& f = values[i];
      if (!f.warning.empty()) result.warnings.push_back("iteration " + std::to_string(q) + ", particle " + std::to_string(i) + ": " + f.warning);
      Particle& p = swarm.particles[i];
      if (f.fitness < p.pbest_fitness) {
        p.pbest_fitness = f.fitness;
        p.pbest_penalty = f.penalty;
        p.pbest_u = p.u;
      }
      if (f.fitness < swarm.gbest_fitness) {
        swarm.gbest_fitness = f.fitness;
        swarm.gbest_penalty = f.penalty;
        swarm.gbest_u = p.u;
      }
    }
    result.evaluations += static_cast<int>(values.size());
    result.trace.append({q, swarm.gbest_fitness, swarm.gbest_penalty, swarm.gbest_u});
  };

  std::vector<FitnessResult> initial = evaluate_all(swarm.particles, fitness_fn, threads);
  // Before any finite value the penalty reported is that of the first particle.
  swarm.gbest_penalty = initial.front().penalty;
  fold(initial, 0);

  for (int q = 1; q <= cfg.max_iterations; ++q) {
    for (Particle& p : swarm.particles) {
      p.v = update_velocity(p, swarm.gbest_u, q, cfg, swarm.rng);
      p.u = update_position(p.u, p.v, bounds);
    }
    fold(evaluate_all(swarm.particles, fitness_fn, threads), q);
  }

  result.best_u = swarm.gbest_u;
  result.best_fitness = swarm.gbest_fitness;
  result.best_penalty = swarm.gbest_penalty;
  return result;
}

PsoResult run(const Scenario& scenario, const SwarmConfig& cfg, const InnerOptions& options, int threads) {
  const SystemConfig& sys = scenario.config;
  const int m = sys.num_tx_antennas;
  const int n = sys.num_rx_antennas;
  auto fn = [&](const Eigen::VectorXd& u) {
    return fitness(AntennaLayout::from_vector(u, m, n), scenario, cfg.penalty, options);
  };
  SwarmResult swarm = run_swarm(cfg, sys, fn, threads);

  PsoResult out;
  out.best_layout = AntennaLayout::from_vector(swarm.best_u, m, n);
  out.trace = std::move(swarm.trace);
  out.best_fitness = swarm.best_fitness;
  out.best_penalty = swarm.best_penalty;
  out.warnings = std::move(swarm.warnings);
  out.evaluations = swarm.evaluations;
  out.found_feasible = swarm.found_feasible();
  try {
    out.solution = solve_inner(make_inner_data(scenario, out.best_layout), options);
  } catch (const SingularityError& e) {
    out.solution.status = conic::SolveStatus::infeasible;
    out.solution.message = e.what();
  }
  return out;
}

}  // namespace mafd
