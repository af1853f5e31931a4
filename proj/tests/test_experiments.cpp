#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "mafd/errors.hpp"
#include "mafd/experiments.hpp"
#include "mafd/plots.hpp"

using namespace mafd;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mafd_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ExperimentSpec tiny_spec(ExperimentKind kind, const fs::path& out) {
  ExperimentSpec spec;
  spec.kind = kind;
  spec.swarm.num_particles = 3;
  spec.swarm.max_iterations = 2;
  spec.seeds = {1, 2};
  spec.output_dir = out.string();
  spec.write_plots = false;
  return spec;
}

}  // namespace

TEST_CASE("weight grid") {
  const auto g = weight_grid(0.25);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 0.0);
  CHECK(g[2] == 0.5);
  CHECK(g.back() == 1.0);
  CHECK(weight_grid(0.01).size() == 101);
  ExperimentSpec spec;
  spec.weight_step = 0.3;
  CHECK_THROWS_AS(validate(spec), ConfigError);
}

TEST_CASE("FPA layout") {
  const double lambda = desk_config().wavelength;
  const AntennaLayout l = fpa_layout(8, lambda);
  CHECK(l.num_tx() == 8);
  CHECK(l.num_rx() == 8);
  CHECK(l.tx == l.rx);
  CHECK(min_pairwise_distance(l.tx) == doctest::Approx(lambda / 2));
  CHECK(l.tx.rowwise().mean().norm() < 1e-15);
  CHECK((l.tx.row(0).maxCoeff() - l.tx.row(0).minCoeff()) == doctest::Approx(1.5 * lambda));
  CHECK((l.tx.row(1).maxCoeff() - l.tx.row(1).minCoeff()) == doctest::Approx(0.5 * lambda));
  const AntennaLayout square = fpa_layout(16, lambda);
  CHECK((square.tx.row(1).maxCoeff() - square.tx.row(1).minCoeff()) == doctest::Approx(1.5 * lambda));
}

TEST_CASE("layout text round trip") {
  const AntennaLayout l = fpa_layout(8, 0.0374740573);
  const std::string text = encode_layout(l);
  CHECK(decode_layout(text, 8, 8) == l);
  CHECK_THROWS(decode_layout("1 2 3", 1, 1));
  CHECK_THROWS(decode_layout("1 2 x 4", 1, 1));
}

TEST_CASE("cell seeds") {
  CHECK(cell_seed(1, 2, 3) == cell_seed(1, 2, 3));
  std::set<std::uint64_t> seen;
  for (std::uint64_t root = 1; root <= 10; ++root)
    for (std::uint64_t stream = 1; stream <= 5; ++stream)
      for (std::uint64_t i = 0; i < 20; ++i) seen.insert(cell_seed(root, stream, i));
  CHECK(seen.size() == 1000);
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  SystemConfig c = desk_config();
  c.si_loss = 1e-12;
  const Scenario a = instance(c, 7);
  c.si_loss = 1e-9;
  const Scenario b = instance(c, 7);
  CHECK(a.si_core == b.si_core);
  CHECK(a.cci_est == b.cci_est);
}

TEST_CASE("iterations to stability") {
  SwarmTrace t;
  for (int q = 0; q <= 6; ++q) t.append({q, q < 3 ? 5.0 - q : 2.0, 0, {}});
  CHECK(iterations_to_stability(t) == 3);
  SwarmTrace flat;
  flat.append({0, 1.0, 0, {}});
  CHECK(iterations_to_stability(flat) == 0);
}

TEST_CASE("experiment files") {
  std::istringstream in(
      "num_tx_antennas = 6\n"
      "swarm_particles = 4\n"
      "swarm_iterations = 9\n"
      "rho_db = -120 -100\n"
      "region_sizes_wavelengths = 3 4 5\n"
      "weight_step = 0.5\n"
      "fpa_antennas = 8 16\n");
  const ExperimentSpec s = parse_experiment(in, "exp");
  CHECK(s.system.num_tx_antennas == 6);
  CHECK(s.swarm.num_particles == 4);
  CHECK(s.swarm.max_iterations == 9);
  CHECK(s.rho_db == std::vector<double>{-120.0, -100.0});
  CHECK(s.region_sizes.size() == 3);
  CHECK(s.fpa_antennas == std::vector<int>{8, 16});

  std::istringstream bad("swarm_particles = 4\n\nmystery = 1\n");
  try {
    parse_experiment(bad, "exp");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  std::istringstream empty_sweep("rho_db = \n");
  CHECK_THROWS(validate(parse_experiment(empty_sweep, "exp")));

  const ExperimentSpec full = full_scale(ExperimentSpec{});
  CHECK(full.system.num_tx_antennas == 16);
  CHECK(full.swarm.num_particles == 30);
  CHECK(full.swarm.max_iterations == 100);
}

TEST_CASE("convergence runs with zero iterations give single-row traces") {
  const fs::path out = scratch("conv");
  ExperimentSpec spec = tiny_spec(ExperimentKind::convergence, out);
  spec.swarm.max_iterations = 0;
  spec.seeds = {1};
  const ExperimentReport r = run_experiment(spec);
  CHECK(r.cells == 2);
  const CsvTable t = read_csv((out / "convergence_A5_seed1.csv").string());
  CHECK(t.rows.size() == 1);
  CHECK(t.header == std::vector<std::string>{"iteration", "gbest_fitness", "gbest_penalty"});
  const CsvTable summary = read_csv((out / "convergence_summary.csv").string());
  CHECK(summary.rows.size() == 2);
  CHECK(summary.column("iterations_to_stability") >= 0);
  fs::remove_all(out);
}

TEST_CASE("reruns are byte-identical and audits pass") {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  ExperimentSpec spec = tiny_spec(ExperimentKind::single, a);
  spec.audit = true;
  const ExperimentReport ra = run_experiment(spec);
  spec.output_dir = b.string();
  const ExperimentReport rb = run_experiment(spec);
  CHECK(ra.audit_failures == 0);
  CHECK(ra.audit_checks == 4);
  REQUIRE(ra.files.size() == rb.files.size());
  for (std::size_t i = 0; i < ra.files.size(); ++i)
    CHECK(slurp(ra.files[i]) == slurp(rb.files[i]));
  const CsvTable t = read_csv((a / "single.csv").string());
  CHECK(t.rows.size() == 4);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("trade-off grid rows") {
  const fs::path out = scratch("tradeoff");
  ExperimentSpec spec = tiny_spec(ExperimentKind::tradeoff, out);
  spec.seeds = {1};
  spec.weight_step = 0.25;
  const ExperimentReport r = run_experiment(spec);
  const CsvTable t = read_csv((out / "tradeoff.csv").string());
  const int scheme = t.column("scheme");
  int ma = 0, fpa = 0;
  for (const auto& row : t.rows) (row[scheme] == "MA" ? ma : fpa)++;
  CHECK(ma == 5);
  CHECK(fpa == 5);
  CHECK(r.cells == 10);
  fs::remove_all(out);
}

TEST_CASE("weights shift power between the links") {
  SystemConfig c = desk_config();
  const Scenario s = instance(c, 3);
  InnerProblemData d = make_inner_data(s, fpa_layout(8, c.wavelength));
  const ReferencePowers ref = calibrate_references(d);
  REQUIRE(ref.feasible);
  d.ref_ul = ref.total_ul;
  d.ref_dl = ref.total_dl;
  d.weight_ul = 0.8;
  d.weight_dl = 0.2;
  const InnerSolution ul_heavy = solve_inner(d);
  d.weight_ul = 0.2;
  d.weight_dl = 0.8;
  const InnerSolution dl_heavy = solve_inner(d);
  REQUIRE(ul_heavy.optimal());
  REQUIRE(dl_heavy.optimal());
  CHECK(ul_heavy.total_ul <= dl_heavy.total_ul * (1 + 1e-6));
  CHECK(ul_heavy.total_dl >= dl_heavy.total_dl * (1 - 1e-6));
}

TEST_CASE("perfect SI cancellation puts both schemes on the UL floor") {
  SystemConfig c = desk_config();
  c.num_ul_uts = 1;
  c.ul_rate_threshold = {0.5};
  c.si_loss = 0.0;
  const Scenario s = instance(c, 4);
  const double gamma = std::exp2(0.5) - 1.0;

  const AntennaLayout fpa = fpa_layout(8, c.wavelength);
  const InnerProblemData fd = make_inner_data(s, fpa);
  const InnerSolution fs_ = solve_inner(fd);
  REQUIRE(fs_.optimal());
  CHECK(fs_.total_ul == doctest::Approx(gamma * fd.zf.b[0].squaredNorm() * c.ul_noise).epsilon(1e-5));

  SwarmConfig cfg;
  cfg.num_particles = 3;
  cfg.max_iterations = 2;
  const PsoResult ma = run(s, cfg);
  REQUIRE(ma.found_feasible);
  const InnerProblemData md = make_inner_data(s, ma.best_layout);
  CHECK(ma.solution.total_ul == doctest::Approx(gamma * md.zf.b[0].squaredNorm() * c.ul_noise).epsilon(1e-5));
}

TEST_CASE("CSV reading") {
  const CsvTable t = parse_csv("a,b\n1,2\n3,nan\n", "mem");
  CHECK(t.column("b") == 1);
  CHECK(t.number(0, 1) == 2.0);
  CHECK(std::isnan(t.number(1, 1)));
  CHECK_THROWS_WITH_AS(t.column("c"), doctest::Contains("'c'"), ConfigError);
  CHECK_THROWS_AS(parse_csv("", "mem"), ConfigError);
  CHECK_THROWS_AS(parse_csv("a,b\n1\n", "mem"), ConfigError);
}

TEST_CASE("plot emission errors") {
  const fs::path out = scratch("plots");
  { std::ofstream(out / "si_sweep_mean.csv"); }
  CHECK_THROWS_AS(emit_plots(out.string()), ConfigError);
  CHECK_FALSE(fs::exists(out / "si_sweep.svg"));

  { std::ofstream(out / "si_sweep_mean.csv") << "rho_db,scheme,runs\n-100,MA,3\n"; }
  CHECK_THROWS_WITH_AS(emit_plots(out.string()), doctest::Contains("mean_total_ul"), ConfigError);
  fs::remove_all(out);

  const fs::path none = scratch("noplots");
  CHECK(emit_plots(none.string()).empty());
  fs::remove_all(none);
}

TEST_CASE("convergence chart is stepped and matches the golden file") {
  const fs::path data(MAFD_TEST_DATA_DIR);
  const CsvTable trace = read_csv((data / "convergence_fixture.csv").string());
  const LineChart chart = convergence_chart({trace});
  REQUIRE(chart.series.size() == 1);
  CHECK(chart.series[0].stepped);
  const auto& pts = chart.series[0].points;
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].second <= pts[i - 1].second);
  const std::string svg = render_svg(chart);
  CHECK(svg == slurp(data / "convergence_golden.svg"));
  CHECK(render_svg(chart) == svg);
}
