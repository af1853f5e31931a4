#include "mafd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "mafd/errors.hpp"
#include "mafd/plots.hpp"
#include "mafd/units.hpp"
#include "text_util.hpp"

namespace mafd {

namespace fs = std::filesystem;

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::convergence: return "convergence";
    case ExperimentKind::tradeoff: return "tradeoff";
    case ExperimentKind::si_sweep: return "si-sweep";
    case ExperimentKind::single: return "single";
  }
  return "unknown";
}

ExperimentSpec full_scale(ExperimentSpec spec) {
  const SystemConfig& d = spec.system;
  SystemConfig p = paper_config();
  // Keep the user's non-size settings; sizes and size-dependent lists follow the full-scale system.
  p.si_loss = d.si_loss;
  p.weight_ul = d.weight_ul;
  p.weight_dl = d.weight_dl;
  p.ref_ul = d.ref_ul;
  p.ref_dl = d.ref_dl;
  p.rng_seed = d.rng_seed;
  spec.system = p;
  spec.swarm.num_particles = 30;
  spec.swarm.max_iterations = 100;
  spec.fpa_antennas = {16, 25};
  return spec;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid experiment: " + what);
}

}  // namespace

void validate(const ExperimentSpec& s) {
  validate(s.system);
  validate(s.swarm);
  require(!s.seeds.empty(), "at least one seed");
  require(!s.region_sizes.empty(), "at least one region size");
  for (double a : s.region_sizes) require(a > 0.0 && std::isfinite(a), "region sizes > 0");
  require(s.weight_step > 0.0 && s.weight_step <= 1.0, "0 < weight_step <= 1");
  const double points = 1.0 / s.weight_step;
  require(std::abs(points - std::round(points)) < 1e-9 * points, "weight_step divides 1 evenly");
  require(!s.rho_db.empty(), "at least one rho value");
  for (double r : s.rho_db) require(std::isfinite(r), "finite rho values");
  require(!s.fpa_antennas.empty(), "at least one FPA size");
  for (int n : s.fpa_antennas) require(n >= s.system.num_ul_uts, "FPA antennas >= num_ul_uts");
  require(s.threads >= 1, "threads >= 1");
  require(!s.output_dir.empty(), "output directory");
  if (s.kind == ExperimentKind::convergence) {
    for (double a : s.region_sizes) {
      SystemConfig c = s.system;
      c.region_size_tx = c.region_size_rx = a * c.wavelength;
      check_packing(c);
    }
  } else {
    check_packing(s.system);
  }
}

// ------------------------------------------------------------------ parsing

ExperimentSpec parse_experiment(std::istream& in, const std::string& source, ExperimentSpec base) {
  std::ostringstream system_text;
  std::map<std::string, std::pair<std::vector<std::string>, int>> own;
  static const char* kKeys[] = {"swarm_particles", "swarm_iterations", "inertia_min", "inertia_max",
                                "cognitive", "social", "penalty", "init_velocity_fraction",
                                "region_sizes_wavelengths", "weight_step", "rho_db", "fpa_antennas", "threads"};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string body = line.substr(0, line.find('#'));
    const auto eq = body.find('=');
    const std::string key = eq == std::string::npos ? std::string() : text::trim(body.substr(0, eq));
    if (std::find(std::begin(kKeys), std::end(kKeys), key) != std::end(kKeys)) {
      if (own.count(key)) throw ParseError(source, lineno, "duplicate key '" + key + "'");
      auto tokens = text::split(body.substr(eq + 1));
      if (tokens.empty()) throw ParseError(source, lineno, key + ": missing value");
      own[key] = {std::move(tokens), lineno};
      system_text << '\n';  // keeps line numbers of the remaining keys
    } else {
      system_text << line << '\n';
    }
  }
  std::istringstream system_in(system_text.str());
  base.system = parse_config(system_in, source, base.system);

  auto numbers = [&](const std::string& key) {
    std::vector<double> out;
    for (const auto& tok : own[key].first) {
      auto v = text::to_double(tok);
      if (!v) throw ParseError(source, own[key].second, key + ": expected a number, got '" + tok + "'");
      out.push_back(*v);
    }
    return out;
  };
  auto number = [&](const std::string& key) {
    auto v = numbers(key);
    if (v.size() != 1) throw ParseError(source, own[key].second, key + ": expected exactly one value");
    return v[0];
  };
  auto count = [&](const std::string& key) {
    const double v = number(key);
    if (v != std::floor(v) || v < 0 || v > 1e6) throw ParseError(source, own[key].second, key + ": expected a count");
    return static_cast<int>(v);
  };

  if (own.count("swarm_particles")) base.swarm.num_particles = count("swarm_particles");
  if (own.count("swarm_iterations")) base.swarm.max_iterations = count("swarm_iterations");
  if (own.count("inertia_min")) base.swarm.inertia_min = number("inertia_min");
  if (own.count("inertia_max")) base.swarm.inertia_max = number("inertia_max");
  if (own.count("cognitive")) base.swarm.cognitive = number("cognitive");
  if (own.count("social")) base.swarm.social = number("social");
  if (own.count("penalty")) base.swarm.penalty = number("penalty");
  if (own.count("init_velocity_fraction")) base.swarm.init_velocity_fraction = number("init_velocity_fraction");
  if (own.count("region_sizes_wavelengths")) base.region_sizes = numbers("region_sizes_wavelengths");
  if (own.count("weight_step")) base.weight_step = number("weight_step");
  if (own.count("rho_db")) base.rho_db = numbers("rho_db");
  if (own.count("threads")) base.threads = count("threads");
  if (own.count("fpa_antennas")) {
    base.fpa_antennas.clear();
    for (double v : numbers("fpa_antennas")) {
      if (v != std::floor(v) || v < 1) throw ParseError(source, own["fpa_antennas"].second, "fpa_antennas: expected counts");
      base.fpa_antennas.push_back(static_cast<int>(v));
    }
  }
  return base;
}

ExperimentSpec load_experiment(const std::string& path, ExperimentSpec base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  return parse_experiment(in, path, std::move(base));
}

// -------------------------------------------------------------------- seeds

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t cell_seed(std::uint64_t root, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(root) ^ stream) ^ index);
}

namespace {

enum Stream : std::uint64_t { kScenario = 1, kConvergence = 2, kTradeoff = 3, kSweep = 4, kSingle = 5 };

}  // namespace

Scenario instance(const SystemConfig& base, std::uint64_t seed) {
  SystemConfig c = base;
  c.rng_seed = cell_seed(seed, kScenario, 0);
  return generate(c);
}

std::vector<double> weight_grid(double step) {
  const int n = static_cast<int>(std::round(1.0 / step));
  std::vector<double> out;
  for (int i = 0; i <= n; ++i) out.push_back(static_cast<double>(i) / n);
  return out;
}

AntennaLayout fpa_layout(int n, double wavelength) {
  int cols = n;
  for (int c = 1; c <= n; ++c) {
    if (n % c == 0 && static_cast<double>(c) * c >= n) {
      cols = c;
      break;
    }
  }
  const int rows = n / cols;
  const double pitch = 0.5 * wavelength;
  Eigen::Matrix2Xd grid(2, n);
  for (int i = 0; i < n; ++i) {
    grid(0, i) = (i % cols - 0.5 * (cols - 1)) * pitch;
    grid(1, i) = (i / cols - 0.5 * (rows - 1)) * pitch;
  }
  return {grid, grid};
}

std::string encode_layout(const AntennaLayout& layout) {
  const Eigen::VectorXd u = layout.to_vector();
  std::string out;
  for (Eigen::Index i = 0; i < u.size(); ++i) out += (i ? " " : "") + text::num(u[i]);
  return out;
}

AntennaLayout decode_layout(const std::string& s, int num_tx, int num_rx) {
  const auto tokens = text::split(s);
  if (static_cast<int>(tokens.size()) != 2 * (num_tx + num_rx)) {
    throw ContractViolation("decode_layout: expected " + std::to_string(2 * (num_tx + num_rx)) + " coordinates");
  }
  Eigen::VectorXd u(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto v = text::to_double(tokens[i]);
    if (!v) throw ContractViolation("decode_layout: bad coordinate '" + tokens[i] + "'");
    u[i] = *v;
  }
  return AntennaLayout::from_vector(u, num_tx, num_rx);
}

int iterations_to_stability(const SwarmTrace& trace, double tol) {
  const auto& rows = trace.rows();
  if (rows.empty()) return 0;
  int last_change = rows.front().iteration;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double a = rows[i - 1].gbest_fitness;
    const double b = rows[i].gbest_fitness;
    const bool same = (a == b) || (std::isfinite(a) && std::abs(a - b) < tol);
    if (!same) last_change = rows[i].iteration;
  }
  return last_change;
}

double audit_row(const Scenario& scenario, const std::string& layout_text, int num_tx, int num_rx, double total_ul,
                 double total_dl, const InnerOptions& options) {
  const AntennaLayout layout = decode_layout(layout_text, num_tx, num_rx);
  const InnerSolution sol = solve_inner(make_inner_data(scenario, layout), options);
  if (!sol.optimal()) return std::numeric_limits<double>::infinity();
  const double scale = std::max({1.0, std::abs(total_ul), std::abs(total_dl)});
  return std::max(std::abs(sol.total_ul - total_ul), std::abs(sol.total_dl - total_dl)) / scale;
}

// -------------------------------------------------------------- experiments

namespace {

constexpr double kAuditTolerance = 1e-6;

std::string fmt(double v) { return text::num(v); }

class CsvFile {
 public:
  CsvFile(const fs::path& path, const std::string& header, ExperimentReport& report) : out_(path) {
    if (!out_) throw ConfigError("cannot write '" + path.string() + "'");
    out_ << header << '\n';
    report.files.push_back(path.string());
  }
  std::ofstream& out() { return out_; }

 private:
  std::ofstream out_;
};

fs::path prepare(const ExperimentSpec& spec) {
  validate(spec);
  fs::path dir(spec.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

// Points of one experiment, one per (scheme, antenna count).
struct Outcome {
  std::string scheme;
  int antennas = 0;
  std::string status;
  double total_ul = std::nan("");
  double total_dl = std::nan("");
  double tau = std::nan("");
  double fitness = std::nan("");
  int penalty = 0;
  double min_rank_ratio = std::nan("");
  AntennaLayout layout;
  bool feasible = false;
};

Outcome from_solution(const std::string& scheme, int antennas, const AntennaLayout& layout, const InnerSolution& sol) {
  Outcome o;
  o.scheme = scheme;
  o.antennas = antennas;
  o.layout = layout;
  o.status = conic::to_string(sol.status);
  o.feasible = sol.optimal();
  if (o.feasible) {
    o.total_ul = sol.total_ul;
    o.total_dl = sol.total_dl;
    o.tau = sol.tau;
    o.fitness = sol.tau;
    o.min_rank_ratio = sol.rank_ratio.empty() ? 1.0 : *std::min_element(sol.rank_ratio.begin(), sol.rank_ratio.end());
  }
  return o;
}

Outcome solve_fpa(const Scenario& scenario, int n, const InnerOptions& options) {
  const AntennaLayout layout = fpa_layout(n, scenario.config.wavelength);
  try {
    return from_solution("FPA", n, layout, solve_inner(make_inner_data(scenario, layout), options));
  } catch (const SingularityError& e) {
    Outcome o;
    o.scheme = "FPA";
    o.antennas = n;
    o.layout = layout;
    o.status = "singular";
    return o;
  }
}

Outcome solve_ma(const Scenario& scenario, SwarmConfig swarm, std::uint64_t seed, const ExperimentSpec& spec,
                 const InnerOptions& options, ExperimentReport& report, SwarmTrace* trace = nullptr) {
  swarm.rng_seed = seed;
  PsoResult r = run(scenario, swarm, options, spec.threads);
  for (auto& w : r.warnings) report.warnings.push_back(std::move(w));
  Outcome o = from_solution("MA", scenario.config.num_tx_antennas, r.best_layout, r.solution);
  o.penalty = r.best_penalty;
  o.fitness = r.best_fitness;
  if (!r.found_feasible) {
    o.status = "no_feasible_layout";
    o.feasible = false;
  }
  if (trace) *trace = r.trace;
  return o;
}

void audit(const Scenario& scenario, const Outcome& o, const InnerOptions& options, ExperimentReport& report) {
  if (!o.feasible) return;
  const double dev = audit_row(scenario, encode_layout(o.layout), o.layout.num_tx(), o.layout.num_rx(), o.total_ul, o.total_dl, options);
  ++report.audit_checks;
  report.audit_max_deviation = std::max(report.audit_max_deviation, dev);
  if (!(dev <= kAuditTolerance)) {
    ++report.audit_failures;
    report.warnings.push_back("audit: " + o.scheme + " row deviates by " + fmt(dev));
  }
}

void count(const Outcome& o, ExperimentReport& report) {
  ++report.cells;
  if (o.feasible) ++report.feasible_cells;
}

// Feasible-seed averages keyed by an arbitrary row prefix.
struct MeanTable {
  struct Acc {
    int runs = 0;
    int feasible = 0;
    double ul = 0.0;
    double dl = 0.0;
  };
  std::vector<std::string> order;
  std::map<std::string, Acc> acc;

  void add(const std::string& key, const Outcome& o) {
    if (!acc.count(key)) order.push_back(key);
    Acc& a = acc[key];
    ++a.runs;
    if (o.feasible) {
      ++a.feasible;
      a.ul += o.total_ul;
      a.dl += o.total_dl;
    }
  }

  void write(std::ostream& out) const {
    for (const auto& key : order) {
      const Acc& a = acc.at(key);
      const double ul = a.feasible ? a.ul / a.feasible : std::nan("");
      const double dl = a.feasible ? a.dl / a.feasible : std::nan("");
      out << key << ',' << a.runs << ',' << a.feasible << ',' << fmt(ul) << ',' << fmt(dl) << '\n';
    }
  }
};

std::string region_tag(double a) {
  std::ostringstream s;
  s << a;
  return s.str();
}

InnerOptions inner_options() { return InnerOptions{}; }

}  // namespace

ExperimentReport run_convergence(const ExperimentSpec& spec) {
  const fs::path dir = prepare(spec);
  ExperimentReport report;
  const InnerOptions options = inner_options();
  CsvFile summary(dir / "convergence_summary.csv",
                  "region_wavelengths,seed,cell_seed,status,final_fitness,final_penalty,iterations_to_stability,"
                  "total_ul,total_dl,tau,layout",
                  report);
  struct Mean {
    int runs = 0, feasible = 0, zero_penalty = 0;
    double fitness = 0.0, stability = 0.0;
  };
  std::vector<Mean> means(spec.region_sizes.size());

  for (std::size_t ai = 0; ai < spec.region_sizes.size(); ++ai) {
    const double a = spec.region_sizes[ai];
    for (std::uint64_t seed : spec.seeds) {
      SystemConfig sys = spec.system;
      sys.region_size_tx = sys.region_size_rx = a * sys.wavelength;
      Scenario scenario = instance(sys, seed);
      // Keyed by the region size in milli-wavelengths, so a run does not depend on
      // which other sizes share the sweep.
      const auto tag = static_cast<std::uint64_t>(std::llround(a * 1000.0));
      const std::uint64_t cs = cell_seed(seed, kConvergence, tag);
      SwarmTrace trace;
      const Outcome o = solve_ma(scenario, spec.swarm, cs, spec, options, report, &trace);
      count(o, report);
      if (spec.audit) audit(scenario, o, options, report);

      const fs::path trace_path = dir / ("convergence_A" + region_tag(a) + "_seed" + std::to_string(seed) + ".csv");
      std::ofstream tf(trace_path);
      if (!tf) throw ConfigError("cannot write '" + trace_path.string() + "'");
      trace.write_csv(tf);
      report.files.push_back(trace_path.string());

      const int stable = iterations_to_stability(trace);
      summary.out() << fmt(a) << ',' << seed << ',' << cs << ',' << o.status << ',' << fmt(o.fitness) << ','
                    << o.penalty << ',' << stable << ',' << fmt(o.total_ul) << ',' << fmt(o.total_dl) << ','
                    << fmt(o.tau) << ',' << encode_layout(o.layout) << '\n';
      Mean& m = means[ai];
      ++m.runs;
      if (o.feasible) {
        ++m.feasible;
        m.fitness += o.fitness;
        m.stability += stable;
        if (o.penalty == 0) ++m.zero_penalty;
      }
    }
  }
  CsvFile mean(dir / "convergence_mean.csv",
               "region_wavelengths,runs,feasible_runs,mean_final_fitness,zero_penalty_fraction,mean_iterations_to_stability",
               report);
  for (std::size_t ai = 0; ai < means.size(); ++ai) {
    const Mean& m = means[ai];
    const double f = m.feasible ? m.fitness / m.feasible : std::nan("");
    const double z = m.runs ? static_cast<double>(m.zero_penalty) / m.runs : std::nan("");
    const double s = m.feasible ? m.stability / m.feasible : std::nan("");
    mean.out() << fmt(spec.region_sizes[ai]) << ',' << m.runs << ',' << m.feasible << ',' << fmt(f) << ',' << fmt(z)
               << ',' << fmt(s) << '\n';
  }
  return report;
}

ExperimentReport run_tradeoff(const ExperimentSpec& spec) {
  const fs::path dir = prepare(spec);
  ExperimentReport report;
  const InnerOptions options = inner_options();
  const std::vector<double> weights = weight_grid(spec.weight_step);
  CsvFile rows(dir / "tradeoff.csv",
               "seed,cell_seed,scheme,antennas,weight_ul,weight_dl,status,total_ul,total_dl,tau,layout", report);
  MeanTable table;
  for (std::uint64_t seed : spec.seeds) {
    const Scenario base = instance(spec.system, seed);
    for (std::size_t wi = 0; wi < weights.size(); ++wi) {
      Scenario scenario = base;
      scenario.config.weight_ul = weights[wi];
      scenario.config.weight_dl = 1.0 - weights[wi];
      const std::uint64_t cs = cell_seed(seed, kTradeoff, wi);
      std::vector<Outcome> outcomes;
      for (int n : spec.fpa_antennas) outcomes.push_back(solve_fpa(scenario, n, options));
      outcomes.push_back(solve_ma(scenario, spec.swarm, cs, spec, options, report));
      for (const Outcome& o : outcomes) {
        count(o, report);
        if (spec.audit) audit(scenario, o, options, report);
        rows.out() << seed << ',' << cs << ',' << o.scheme << ',' << o.antennas << ',' << fmt(weights[wi]) << ','
                   << fmt(1.0 - weights[wi]) << ',' << o.status << ',' << fmt(o.total_ul) << ',' << fmt(o.total_dl)
                   << ',' << fmt(o.tau) << ',' << encode_layout(o.layout) << '\n';
        table.add(o.scheme + ',' + std::to_string(o.antennas) + ',' + fmt(weights[wi]) + ',' + fmt(1.0 - weights[wi]), o);
      }
    }
  }
  CsvFile mean(dir / "tradeoff_mean.csv",
               "scheme,antennas,weight_ul,weight_dl,runs,feasible_runs,mean_total_ul,mean_total_dl", report);
  table.write(mean.out());
  return report;
}

ExperimentReport run_si_sweep(const ExperimentSpec& spec) {
  const fs::path dir = prepare(spec);
  ExperimentReport report;
  const InnerOptions options = inner_options();
  CsvFile rows(dir / "si_sweep.csv", "seed,cell_seed,rho_db,scheme,antennas,status,total_ul,total_dl,tau,layout", report);
  MeanTable table;
  for (std::uint64_t seed : spec.seeds) {
    const Scenario base = instance(spec.system, seed);
    for (std::size_t ri = 0; ri < spec.rho_db.size(); ++ri) {
      Scenario scenario = base;
      scenario.config.si_loss = db_to_linear(spec.rho_db[ri]);
      const std::uint64_t cs = cell_seed(seed, kSweep, ri);
      std::vector<Outcome> outcomes;
      for (int n : spec.fpa_antennas) outcomes.push_back(solve_fpa(scenario, n, options));
      outcomes.push_back(solve_ma(scenario, spec.swarm, cs, spec, options, report));
      for (const Outcome& o : outcomes) {
        count(o, report);
        if (spec.audit) audit(scenario, o, options, report);
        rows.out() << seed << ',' << cs << ',' << fmt(spec.rho_db[ri]) << ',' << o.scheme << ',' << o.antennas << ','
                   << o.status << ',' << fmt(o.total_ul) << ',' << fmt(o.total_dl) << ',' << fmt(o.tau) << ','
                   << encode_layout(o.layout) << '\n';
        table.add(fmt(spec.rho_db[ri]) + ',' + o.scheme + ',' + std::to_string(o.antennas), o);
      }
    }
  }
  CsvFile mean(dir / "si_sweep_mean.csv", "rho_db,scheme,antennas,runs,feasible_runs,mean_total_ul,mean_total_dl", report);
  table.write(mean.out());
  return report;
}

ExperimentReport run_single(const ExperimentSpec& spec) {
  const fs::path dir = prepare(spec);
  ExperimentReport report;
  const InnerOptions options = inner_options();
  CsvFile rows(dir / "single.csv",
               "seed,cell_seed,scheme,antennas,status,fitness,penalty,total_ul,total_dl,tau,min_rank_ratio,layout", report);
  for (std::uint64_t seed : spec.seeds) {
    const Scenario scenario = instance(spec.system, seed);
    const std::uint64_t cs = cell_seed(seed, kSingle, 0);
    SwarmTrace trace;
    std::vector<Outcome> outcomes;
    for (int n : spec.fpa_antennas) outcomes.push_back(solve_fpa(scenario, n, options));
    outcomes.push_back(solve_ma(scenario, spec.swarm, cs, spec, options, report, &trace));
    for (const Outcome& o : outcomes) {
      count(o, report);
      if (spec.audit) audit(scenario, o, options, report);
      rows.out() << seed << ',' << cs << ',' << o.scheme << ',' << o.antennas << ',' << o.status << ',' << fmt(o.fitness)
                 << ',' << o.penalty << ',' << fmt(o.total_ul) << ',' << fmt(o.total_dl) << ',' << fmt(o.tau) << ','
                 << fmt(o.min_rank_ratio) << ',' << encode_layout(o.layout) << '\n';
    }
    const fs::path trace_path = dir / ("single_trace_seed" + std::to_string(seed) + ".csv");
    std::ofstream tf(trace_path);
    if (!tf) throw ConfigError("cannot write '" + trace_path.string() + "'");
    trace.write_csv(tf);
    report.files.push_back(trace_path.string());
  }
  return report;
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  ExperimentReport report;
  switch (spec.kind) {
    case ExperimentKind::convergence: report = run_convergence(spec); break;
    case ExperimentKind::tradeoff: report = run_tradeoff(spec); break;
    case ExperimentKind::si_sweep: report = run_si_sweep(spec); break;
    case ExperimentKind::single: report = run_single(spec); break;
  }
  if (spec.write_plots && !report.all_infeasible()) {
    for (auto& f : emit_plots(spec.output_dir)) report.files.push_back(std::move(f));
  }
  return report;
}

}  // namespace mafd
