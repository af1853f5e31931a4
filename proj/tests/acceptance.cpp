// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any selected criterion fails.
//
//   acceptance [--work-dir DIR] [--only 1,2,...]

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "mafd/channel.hpp"
#include "mafd/experiments.hpp"
#include "mafd/plots.hpp"
#include "mafd/pso.hpp"
#include "mafd/receiver.hpp"
#include "mafd/robust_inner.hpp"
#include "mafd/scenario.hpp"
#include "mafd/units.hpp"
#include "support.hpp"

using namespace mafd;
namespace fs = std::filesystem;
using testing::cd;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

AntennaLayout spaced_layout(const SystemConfig& c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  AntennaLayout l;
  l.tx = sample_spaced_positions(c.num_tx_antennas, c.region_size_tx, c.min_spacing, 2000, rng);
  l.rx = sample_spaced_positions(c.num_rx_antennas, c.region_size_rx, c.min_spacing, 2000, rng);
  return l;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Equation-level oracles on 100 random instances, 1e-9 relative, < 10 s.
Verdict criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  double field = 0, hsi = 0, zf = 0, orth = 0, ul = 0, dl = 0, si = 0;
  for (int i = 0; i < 100; ++i) {
    SystemConfig c = desk_config();
    c.rng_seed = 1000 + i;
    const Scenario s = generate(c);
    std::mt19937_64 rng(i);
    const AntennaLayout layout = testing::random_layout(c, rng);
    const double lambda = c.wavelength;

    for (int n = 0; n < c.num_rx_antennas; ++n) {
      const Eigen::VectorXcd f = field_response(layout.rx.col(n), s.si_rx_angles, lambda);
      for (int a = 0; a < c.si_paths_rx; ++a)
        field = std::max(field, testing::rel_diff(f(a), testing::scalar_response(layout.rx(0, n), layout.rx(1, n),
                                                                                 s.si_rx_angles[a], lambda)));
    }

    const ChannelSet ch = assemble(layout, s);
    for (int n = 0; n < c.num_rx_antennas; ++n) {
      for (int m = 0; m < c.num_tx_antennas; ++m) {
        cd acc = 0.0;
        for (int a = 0; a < c.si_paths_rx; ++a) {
          const cd fa = testing::scalar_response(layout.rx(0, n), layout.rx(1, n), s.si_rx_angles[a], lambda);
          for (int b = 0; b < c.si_paths_tx; ++b)
            acc += std::conj(fa) * s.si_core(a, b) *
                   testing::scalar_response(layout.tx(0, m), layout.tx(1, m), s.si_tx_angles[b], lambda);
        }
        hsi = std::max(hsi, testing::rel_diff(ch.h_si(n, m), acc));
      }
    }

    const ZfBank bank = zf_bank(ch);
    const Eigen::MatrixXcd L = ch.ul_matrix();
    const Eigen::MatrixXcd inv = (L.adjoint() * L).fullPivLu().inverse();
    for (int j = 0; j < c.num_ul_uts; ++j) {
      const Eigen::VectorXcd oracle = L * inv.col(j);
      zf = std::max(zf, (bank.b[j] - oracle).norm() / oracle.norm());
      for (int q = 0; q < c.num_ul_uts; ++q)
        orth = std::max(orth, std::abs(bank.b[j].dot(ch.ul[q]) - (q == j ? 1.0 : 0.0)));
    }

    // Operating point near the rate targets: powers around the noise floors,
    // SI comparable to the UL noise.
    std::uniform_real_distribution<double> logu(-1.0, 1.0);
    std::vector<double> p;
    for (int j = 0; j < c.num_ul_uts; ++j) p.push_back(bank.b[j].squaredNorm() * c.ul_noise * std::pow(10.0, logu(rng)));
    const double w_unit = c.ul_noise / (c.si_loss * ch.h_si.squaredNorm());
    std::vector<Eigen::MatrixXcd> w;
    for (int k = 0; k < c.num_dl_uts; ++k)
      w.push_back(w_unit * std::pow(10.0, logu(rng)) * testing::random_psd(c.num_tx_antennas, 1 + k, rng));

    for (int j = 0; j < c.num_ul_uts; ++j) {
      ul = std::max(ul, testing::rel_diff(ul_sinr(bank, ch, p, w, c.si_loss, c.ul_noise, j),
                                          testing::ul_sinr_oracle(ch, bank.b[j], p, w, c.si_loss, c.ul_noise, j)));
      double oracle = 0.0;
      for (int n = 0; n < c.num_rx_antennas; ++n) {
        double diag = 0.0;
        for (const auto& wk : w) {
          cd acc = 0.0;
          for (int a = 0; a < c.num_tx_antennas; ++a)
            for (int b = 0; b < c.num_tx_antennas; ++b) acc += ch.h_si(n, a) * wk(a, b) * std::conj(ch.h_si(n, b));
          diag += acc.real();
        }
        oracle += std::norm(bank.b[j](n)) * c.si_loss * diag;
      }
      si = std::max(si, testing::rel_diff(residual_si(bank, ch.h_si, w, c.si_loss, j), oracle));
    }
    for (int k = 0; k < c.num_dl_uts; ++k) {
      const Eigen::VectorXcd ck = s.cci_actual(k);
      double interference = 0.0, cci = 0.0;
      for (int q = 0; q < c.num_dl_uts; ++q)
        if (q != k) interference += testing::quad(ch.dl[k], w[q]);
      for (int j = 0; j < c.num_ul_uts; ++j) cci += p[j] * std::norm(ck(j));
      const double oracle = testing::quad(ch.dl[k], w[k]) / (interference + cci + c.dl_noise[k]);
      dl = std::max(dl, testing::rel_diff(dl_sinr(ch, w, ck, p, c.dl_noise[k], k), oracle));
    }
  }
  const double elapsed = seconds_since(t0);
  const double worst = std::max({field, hsi, zf, orth, ul, dl, si});
  std::ostringstream d;
  d << "max rel err field " << field << ", H_SI " << hsi << ", ZF " << zf << " (orthogonality " << orth << "), UL SINR "
    << ul << ", DL SINR " << dl << ", S_j " << si << "; " << fmt("%.1f s", elapsed);
  return {worst <= 1e-9 && elapsed < 10.0, d.str()};
}

// Sampled robustness certificate on 20 solved instances, < 2 min.
Verdict criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  int solved = 0, tried = 0, violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 1; solved < 20 && seed <= 60; ++seed) {
    ++tried;
    SystemConfig c = desk_config();
    c.rng_seed = seed;
    const Scenario s = generate(c);
    const InnerProblemData d = make_inner_data(s, spaced_layout(c, seed));
    const InnerSolution sol = solve_inner(d);
    if (!sol.optimal()) continue;
    ++solved;
    for (int k = 0; k < c.num_dl_uts; ++k) {
      const double r = worst_case_dl_rate(d.channels, sol.W, d.cci_est[k], d.cci_radius[k], sol.p, d.dl_noise[k], k,
                                          10000, 7000 + seed);
      const double margin = r - c.dl_rate_threshold[k];
      worst_margin = std::min(worst_margin, margin);
      if (margin < -1e-6) ++violations;
    }
  }
  const double elapsed = seconds_since(t0);
  std::ostringstream d;
  d << solved << " solved of " << tried << " seeds, 1e4 samples per DL UT, " << violations
    << " violations, min margin " << worst_margin << " bps/Hz; " << fmt("%.1f s", elapsed);
  return {solved == 20 && violations == 0 && elapsed < 120.0, d.str()};
}

// Tiny instance against a dense grid over (p_1, beam direction), 2%.
Verdict criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  SystemConfig c = desk_config();
  c.num_tx_antennas = 2;
  c.num_rx_antennas = 2;
  c.num_ul_uts = 1;
  c.num_dl_uts = 1;
  c.si_loss = 0.0;
  c.cci_error_fraction = 0.0;
  c.ul_rate_threshold = {0.5};
  c.dl_rate_threshold = {1.0};
  c.dl_noise = {dbm_to_watts(-100.0)};
  c.rng_seed = 3;
  const Scenario s = generate(c);
  InnerProblemData data = make_inner_data(s, spaced_layout(c, 3));

  const Eigen::VectorXcd l = data.channels.ul[0];
  const Eigen::VectorXcd h = data.channels.dl[0];
  const cd cci = data.cci_est[0](0);
  const double g_ul = sinr_threshold(0.5);
  const double g_dl = sinr_threshold(1.0);
  const double s_ul = c.ul_noise;
  const double s_dl = c.dl_noise[0];
  // References at half the single-link noise-limited powers keep tau of order one.
  data.ref_ul = 0.5 * g_ul * s_ul / l.squaredNorm();
  data.ref_dl = 0.5 * g_dl * s_dl / h.squaredNorm();
  const double lam1 = data.weight_ul;
  const double lam2 = data.weight_dl;

  const InnerSolution sol = solve_inner(data);

  // Grid: UL power on [0, 6 ref_ul], DL beam u = (cos a, sin a e^{jb}) with the
  // smallest power meeting the DL target for that direction.
  const Eigen::VectorXcd b = l / l.squaredNorm();
  const int np = 600, na = 200, nb = 200;
  double best = std::numeric_limits<double>::infinity(), best_p = 0, best_w = 0;
  std::vector<double> gains;
  gains.reserve(na * nb);
  for (int ia = 0; ia <= na; ++ia) {
    const double a = 0.5 * kPi * ia / na;
    for (int ib = 0; ib < nb; ++ib) {
      const double phase = 2.0 * kPi * ib / nb;
      const cd proj = std::conj(h(0)) * std::cos(a) + std::conj(h(1)) * std::sin(a) * std::polar(1.0, phase);
      gains.push_back(std::norm(proj));
    }
  }
  for (int ip = 0; ip <= np; ++ip) {
    const double p = 6.0 * data.ref_ul * ip / np;
    const double ul_sinr_value = p * std::norm(b.dot(l)) / (b.squaredNorm() * s_ul);
    if (ul_sinr_value < g_ul) continue;
    for (double g : gains) {
      if (g <= 0.0) continue;
      const double pw = g_dl * (s_dl + p * std::norm(cci)) / g;
      const double tau = std::max(lam1 * (p - data.ref_ul) / data.ref_ul, lam2 * (pw - data.ref_dl) / data.ref_dl);
      if (tau < best) {
        best = tau;
        best_p = p;
        best_w = pw;
      }
    }
  }
  const double elapsed = seconds_since(t0);
  const double rel = std::abs(sol.tau - best) / std::abs(best);
  std::ostringstream d;
  d << "SDP tau " << sol.tau << " (T1 " << sol.total_ul << ", T2 " << sol.total_dl << "), grid tau " << best << " (T1 "
    << best_p << ", T2 " << best_w << "), rel diff " << rel << "; " << fmt("%.1f s", elapsed);
  return {sol.optimal() && rel <= 0.02 && elapsed < 60.0, d.str()};
}

// Rank ratio >= 0.99 for all k on >= 95% of 50 desk solves.
Verdict criterion4() {
  int solved = 0, tight = 0, tried = 0;
  double worst = 1.0;
  for (std::uint64_t seed = 1; solved < 50 && seed <= 150; ++seed) {
    ++tried;
    SystemConfig c = desk_config();
    c.rng_seed = 100 + seed;
    const Scenario s = generate(c);
    const InnerSolution sol = solve_inner(make_inner_data(s, spaced_layout(c, 5000 + seed)));
    if (!sol.optimal()) continue;
    ++solved;
    const double r = *std::min_element(sol.rank_ratio.begin(), sol.rank_ratio.end());
    worst = std::min(worst, r);
    if (r >= 0.99) ++tight;
  }
  std::ostringstream d;
  d << tight << " of " << solved << " solves tight (" << tried << " seeds tried), min rank ratio " << worst;
  return {solved == 50 && tight >= 0.95 * solved, d.str()};
}

ExperimentSpec batch(ExperimentKind kind, const fs::path& dir) {
  ExperimentSpec spec;
  spec.kind = kind;
  spec.output_dir = dir.string();
  spec.write_plots = false;
  return spec;
}

std::vector<std::uint64_t> seed_range(std::uint64_t n) {
  std::vector<std::uint64_t> s;
  for (std::uint64_t i = 1; i <= n; ++i) s.push_back(i);
  return s;
}

struct ConvergenceRow {
  std::string status;
  double fitness = 0.0;
  int penalty = 0;
};

std::map<std::uint64_t, ConvergenceRow> read_summary(const fs::path& dir) {
  const CsvTable t = read_csv((dir / "convergence_summary.csv").string());
  const int seed = t.column("seed"), status = t.column("status"), fit = t.column("final_fitness"),
            pen = t.column("final_penalty");
  std::map<std::uint64_t, ConvergenceRow> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    out[std::stoull(t.rows[r][seed])] = {t.rows[r][status], t.number(r, fit), std::stoi(t.rows[r][pen])};
  return out;
}

// PSO contract on 20 seeds at A = 5 lambda (shared with criterion 6).
Verdict criterion5(const fs::path& work) {
  const fs::path dir = work / "criterion5";
  ExperimentSpec spec = batch(ExperimentKind::convergence, dir);
  spec.region_sizes = {5.0};
  spec.seeds = seed_range(20);
  const auto t0 = std::chrono::steady_clock::now();
  run_experiment(spec);
  const double elapsed = seconds_since(t0);

  int increases = 0, rows = 0;
  for (std::uint64_t seed : spec.seeds) {
    const CsvTable t = read_csv((dir / ("convergence_A5_seed" + std::to_string(seed) + ".csv")).string());
    const int col = t.column("gbest_fitness");
    for (std::size_t r = 1; r < t.rows.size(); ++r) {
      ++rows;
      if (t.number(r, col) > t.number(r - 1, col)) ++increases;
    }
  }
  int zero = 0;
  std::string misses;
  for (const auto& [seed, row] : read_summary(dir)) {
    if (row.status == "optimal" && row.penalty == 0) {
      ++zero;
    } else {
      misses += " " + std::to_string(seed) + ":" + row.status + "/xi=" + std::to_string(row.penalty);
    }
  }
  std::ostringstream d;
  d << increases << " fitness increases over " << rows << " trace steps; final xi = 0 in " << zero << " of 20 runs"
    << (misses.empty() ? "" : " (misses" + misses + ")") << "; " << fmt("%.1f s", elapsed);
  return {increases == 0 && zero >= 19 && elapsed < 600.0, d.str()};
}

// Mean converged fitness at 5 lambda <= at 3 lambda over seeds 1..10.
Verdict criterion6(const fs::path& work) {
  const fs::path dir = work / "criterion6";
  ExperimentSpec spec = batch(ExperimentKind::convergence, dir);
  spec.region_sizes = {3.0};
  spec.seeds = seed_range(10);
  run_experiment(spec);
  const auto small = read_summary(dir);
  std::map<std::uint64_t, ConvergenceRow> large;
  const fs::path five = work / "criterion5";
  if (fs::exists(five / "convergence_summary.csv")) {
    large = read_summary(five);
  } else {
    ExperimentSpec again = batch(ExperimentKind::convergence, five);
    again.region_sizes = {5.0};
    again.seeds = seed_range(10);
    run_experiment(again);
    large = read_summary(five);
  }
  double m3 = 0, m5 = 0;
  int infeasible = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto a = small.find(seed);
    const auto b = large.find(seed);
    if (a == small.end() || b == large.end() || a->second.status != "optimal" || b->second.status != "optimal") {
      ++infeasible;
      continue;
    }
    m3 += a->second.fitness / 10;
    m5 += b->second.fitness / 10;
  }
  std::ostringstream d;
  d << "mean final fitness 5 lambda " << m5 << ", 3 lambda " << m3 << ", runs without a feasible layout " << infeasible;
  return {infeasible == 0 && m5 <= m3, d.str()};
}

struct Point {
  bool feasible = false;
  double t1 = std::numeric_limits<double>::infinity();
  double t2 = std::numeric_limits<double>::infinity();
};

bool dominates(const Point& a, const Point& b) {
  if (!a.feasible) return false;
  if (!b.feasible) return true;
  const double tol = 1e-6;
  const bool no_worse = a.t1 <= b.t1 * (1 + tol) && a.t2 <= b.t2 * (1 + tol);
  const bool better = a.t1 < b.t1 * (1 - tol) || a.t2 < b.t2 * (1 - tol);
  return no_worse && better;
}

SwarmConfig reduced_swarm() {
  SwarmConfig s = desk_swarm_config();
  s.num_particles = 10;
  s.max_iterations = 20;
  return s;
}

// MA not dominated by FPA at matched weights; lower T1 + T2 at (0.5, 0.5).
Verdict criterion7(const fs::path& work) {
  const fs::path dir = work / "criterion7";
  ExperimentSpec spec = batch(ExperimentKind::tradeoff, dir);
  spec.weight_step = 0.25;
  spec.seeds = seed_range(10);
  spec.swarm = reduced_swarm();
  const auto t0 = std::chrono::steady_clock::now();
  run_experiment(spec);
  const double elapsed = seconds_since(t0);

  const CsvTable t = read_csv((dir / "tradeoff.csv").string());
  const int cs = t.column("seed"), csch = t.column("scheme"), cw = t.column("weight_ul"), cst = t.column("status"),
            c1 = t.column("total_ul"), c2 = t.column("total_dl");
  std::map<std::tuple<std::string, std::string, std::string>, Point> pts;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Point p;
    p.feasible = t.rows[r][cst] == "optimal";
    if (p.feasible) {
      p.t1 = t.number(r, c1);
      p.t2 = t.number(r, c2);
    }
    pts[{t.rows[r][cs], t.rows[r][csch], t.rows[r][cw]}] = p;
  }
  int good_seeds = 0;
  double ma_sum = 0, fpa_sum = 0;
  for (std::uint64_t seed : spec.seeds) {
    const std::string s = std::to_string(seed);
    bool ok = true;
    for (double w : weight_grid(0.25)) {
      const std::string ws = fmt("%.17g", w);
      const Point& ma = pts[{s, "MA", ws}];
      const Point& fpa = pts[{s, "FPA", ws}];
      if (!ma.feasible || dominates(fpa, ma)) ok = false;
    }
    good_seeds += ok;
    const Point& ma = pts[{s, "MA", "0.5"}];
    const Point& fpa = pts[{s, "FPA", "0.5"}];
    ma_sum += ma.t1 + ma.t2;
    fpa_sum += fpa.t1 + fpa.t2;
  }
  const double n = static_cast<double>(spec.seeds.size());
  std::ostringstream d;
  d << "MA undominated at every weight in " << good_seeds << " of " << spec.seeds.size()
    << " seeds; mean T1+T2 at (0.5, 0.5): MA " << ma_sum / n << " W, FPA " << fpa_sum / n << " W; Z = " << spec.swarm.num_particles
    << ", Q = " << spec.swarm.max_iterations << "; " << fmt("%.1f s", elapsed);
  return {good_seeds >= 0.9 * n && ma_sum < fpa_sum, d.str()};
}

// Powers non-decreasing in rho within 5%; MA at or below FPA on average.
Verdict criterion8(const fs::path& work) {
  const fs::path dir = work / "criterion8";
  ExperimentSpec spec = batch(ExperimentKind::si_sweep, dir);
  spec.rho_db = {-120.0, -110.0, -100.0, -90.0};
  spec.seeds = seed_range(10);
  // The reduced swarm leaves search noise above 5% on the MA UL curve.
  spec.swarm = desk_swarm_config();
  const auto t0 = std::chrono::steady_clock::now();
  run_experiment(spec);
  const double elapsed = seconds_since(t0);

  const CsvTable t = read_csv((dir / "si_sweep_mean.csv").string());
  const int cr = t.column("rho_db"), csch = t.column("scheme"), cruns = t.column("runs"),
            cfeas = t.column("feasible_runs"), c1 = t.column("mean_total_ul"), c2 = t.column("mean_total_dl");
  std::map<std::string, std::map<double, std::pair<double, double>>> curve;
  int incomplete = 0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.rows[r][cruns] != t.rows[r][cfeas]) ++incomplete;
    curve[t.rows[r][csch]][t.number(r, cr)] = {t.number(r, c1), t.number(r, c2)};
  }
  int drops = 0, above = 0;
  std::ostringstream d;
  for (const auto& [scheme, pts] : curve) {
    d << scheme << " (T1, T2):";
    const std::pair<double, double>* prev = nullptr;
    for (const auto& [rho, v] : pts) {
      d << fmt(" %g:", rho) << fmt("(%.4g, %.4g)", v.first, v.second);
      if (prev && (v.first < 0.95 * prev->first || v.second < 0.95 * prev->second)) ++drops;
      prev = &v;
    }
    d << "; ";
  }
  for (const auto& [rho, v] : curve["MA"]) {
    const auto& f = curve["FPA"][rho];
    if (v.first > f.first || v.second > f.second) ++above;
  }
  d << drops << " drops beyond 5%, " << above << " points with MA above FPA, " << incomplete
    << " points with infeasible seeds; Z = " << spec.swarm.num_particles << ", Q = " << spec.swarm.max_iterations
    << "; " << fmt("%.1f s", elapsed);
  return {drops == 0 && above == 0 && incomplete == 0 && curve.size() == 2, d.str()};
}

// Every experiment kind rerun with the same root seeds gives identical bytes.
Verdict criterion9(const fs::path& work) {
  int files = 0, differ = 0;
  for (ExperimentKind kind :
       {ExperimentKind::convergence, ExperimentKind::tradeoff, ExperimentKind::si_sweep, ExperimentKind::single}) {
    std::vector<std::map<std::string, std::string>> contents;
    for (const char* run : {"a", "b"}) {
      const fs::path dir = work / "criterion9" / to_string(kind) / run;
      fs::remove_all(dir);
      ExperimentSpec spec = batch(kind, dir);
      spec.seeds = {3, 4};
      spec.swarm.num_particles = 4;
      spec.swarm.max_iterations = 3;
      spec.weight_step = 0.5;
      spec.rho_db = {-110.0, -100.0};
      spec.write_plots = true;
      run_experiment(spec);
      std::map<std::string, std::string> m;
      for (const auto& e : fs::directory_iterator(dir)) m[e.path().filename().string()] = slurp(e.path());
      contents.push_back(std::move(m));
    }
    for (const auto& [name, bytes] : contents[0]) {
      ++files;
      const auto other = contents[1].find(name);
      if (other == contents[1].end() || other->second != bytes) ++differ;
    }
    if (contents[0].size() != contents[1].size()) ++differ;
  }
  std::ostringstream d;
  d << files << " files compared across two runs of each experiment kind, " << differ << " differ";
  return {differ == 0 && files > 0, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string work_dir = "acceptance_out";
  std::vector<int> only;
  app.add_option("--work-dir", work_dir, "Directory for experiment outputs");
  app.add_option("--only", only, "Criteria to run (default: all)")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const fs::path work(work_dir);
  fs::create_directories(work);
  const std::vector<std::pair<int, std::function<Verdict()>>> criteria = {
      {1, criterion1},
      {2, criterion2},
      {3, criterion3},
      {4, criterion4},
      {5, [&] { return criterion5(work); }},
      {6, [&] { return criterion6(work); }},
      {7, [&] { return criterion7(work); }},
      {8, [&] { return criterion8(work); }},
      {9, [&] { return criterion9(work); }},
  };
  int failures = 0;
  for (const auto& [id, run] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << id << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << std::endl;
    failures += !v.pass;
  }
  return failures == 0 ? 0 : 1;
}
