#include "mafd/robust_inner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "mafd/errors.hpp"
#include "mafd/units.hpp"

namespace mafd {

using conic::ConicProgram;
using conic::LinExpr;
using conic::MatExpr;
using conic::SolveStatus;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

// Thresholds below this are treated as this value when choosing scales only.
constexpr double kScaleGammaFloor = 1e-6;
// Weight of delta in the objective; picks the smallest admissible multiplier.
constexpr double kDeltaWeight = 1e-7;
// Weight of the secondary objective in the single-objective modes.
constexpr double kSecondaryWeight = 1e-6;

double c1_normalizer(const InnerProblemData& d, int j) {
  return std::max(d.gamma_ul[j], kScaleGammaFloor) * d.zf.b[j].squaredNorm() * d.ul_noise;
}

}  // namespace

InnerProblemData make_inner_data(const Scenario& scenario, const AntennaLayout& layout) {
  return make_inner_data(scenario, assemble(layout, scenario));
}

InnerProblemData make_inner_data(const Scenario& s, ChannelSet channels) {
  InnerProblemData d;
  d.zf = zf_bank(channels);
  d.channels = std::move(channels);
  const SystemConfig& c = s.config;
  for (double r : c.ul_rate_threshold) d.gamma_ul.push_back(sinr_threshold(r));
  for (double r : c.dl_rate_threshold) d.gamma_dl.push_back(sinr_threshold(r));
  for (int k = 0; k < c.num_dl_uts; ++k) {
    d.cci_est.push_back(s.cci_estimate(k));
    d.cci_radius.push_back(s.cci_radius(k));
  }
  d.weight_ul = c.weight_ul;
  d.weight_dl = c.weight_dl;
  d.ref_ul = c.ref_ul;
  d.ref_dl = c.ref_dl;
  d.ul_noise = c.ul_noise;
  d.dl_noise = c.dl_noise;
  d.rho = c.si_loss;
  return d;
}

void validate(const InnerProblemData& d) {
  const int J = d.num_ul();
  const int K = d.num_dl();
  if (J < 1 || K < 1) throw ConfigError("inner problem: need at least one UL and one DL UT");
  if (static_cast<int>(d.channels.ul.size()) != J || static_cast<int>(d.zf.b.size()) != J) {
    throw ConfigError("inner problem: UL channel count does not match the thresholds");
  }
  if (static_cast<int>(d.channels.dl.size()) != K || static_cast<int>(d.cci_est.size()) != K ||
      static_cast<int>(d.cci_radius.size()) != K || static_cast<int>(d.dl_noise.size()) != K) {
    throw ConfigError("inner problem: DL sizes do not match the thresholds");
  }
  for (double g : d.gamma_ul) {
    if (!(g >= 0.0)) throw ConfigError("inner problem: UL SINR thresholds must be >= 0");
  }
  for (double g : d.gamma_dl) {
    if (!(g > 0.0)) throw ConfigError("inner problem: DL SINR thresholds must be > 0");
  }
  if (d.ref_ul == 0.0 || d.ref_dl == 0.0) throw ConfigError("inner problem: reference objectives must be nonzero");
  if (d.weight_ul < 0.0 || d.weight_dl < 0.0 || std::abs(d.weight_ul + d.weight_dl - 1.0) > 1e-12) {
    throw ConfigError("inner problem: weights must be >= 0 and sum to 1");
  }
  if (!(d.ul_noise > 0.0)) throw ConfigError("inner problem: UL noise must be > 0");
  for (double n : d.dl_noise) {
    if (!(n > 0.0)) throw ConfigError("inner problem: DL noise must be > 0");
  }
  if (!(d.rho >= 0.0)) throw ConfigError("inner problem: SI loss must be >= 0");
}

std::vector<double> InnerVariables::pack(int num_scalars, std::span<const double> p_watts,
                                         std::span<const MatrixXcd> w_watts, std::span<const double> delta_watts,
                                         double tau_value) const {
  std::vector<double> y(num_scalars, 0.0);
  for (std::size_t j = 0; j < p.size(); ++j) y[p[j].id] = p_watts[j] / p_scale;
  for (std::size_t k = 0; k < w.size(); ++k) w[k].store(w_watts[k] / w_scale, y);
  for (std::size_t k = 0; k < delta.size(); ++k) y[delta[k].id] = delta_watts[k] / delta_scale;
  y[tau.id] = tau_value;
  return y;
}

InnerVariables declare_inner_variables(ConicProgram& program, const InnerProblemData& d) {
  InnerVariables v;
  const int J = d.num_ul();
  const int K = d.num_dl();
  double ps = 0.0;
  for (int j = 0; j < J; ++j) {
    const double gain = std::norm(d.zf.b[j].dot(d.channels.ul[j]));
    ps += c1_normalizer(d, j) / gain;
  }
  v.p_scale = ps / J;
  double ws = 0.0;
  for (int k = 0; k < K; ++k) {
    ws += std::max(d.gamma_dl[k], kScaleGammaFloor) * d.dl_noise[k] / d.channels.dl[k].squaredNorm();
  }
  v.w_scale = ws / K;
  v.delta_scale = v.p_scale;

  for (int j = 0; j < J; ++j) v.p.push_back(program.add_scalar("p" + std::to_string(j)));
  for (int k = 0; k < K; ++k) v.w.push_back(program.add_hermitian("W" + std::to_string(k), d.num_tx()));
  for (int k = 0; k < K; ++k) v.delta.push_back(program.add_scalar("delta" + std::to_string(k)));
  v.tau = program.add_scalar("tau");
  return v;
}

LinExpr build_c1(const InnerProblemData& d, const InnerVariables& v, int j) {
  const VectorXcd& bj = d.zf.b[j];
  const double g = d.gamma_ul[j];
  const double norm = 1.0 / c1_normalizer(d, j);
  LinExpr e;
  for (int i = 0; i < d.num_ul(); ++i) {
    const double gain = std::norm(bj.dot(d.channels.ul[i])) * v.p_scale;
    e.add(v.p[i], (i == j ? gain : -g * gain) * norm);
  }
  if (g > 0.0 && d.rho > 0.0) {
    const MatrixXcd q = si_coupling(d.zf, d.channels.h_si, j);
    for (const auto& wk : v.w) e -= (g * d.rho * v.w_scale * norm) * wk.trace_with(q);
  }
  e.add_constant(-g * bj.squaredNorm() * d.ul_noise * norm);
  return e;
}

MatExpr build_lmi(const InnerProblemData& d, const InnerVariables& v, int k) {
  const int J = d.num_ul();
  const int n = J + 1;
  const double d1sq = 1.0 / v.p_scale;
  const double d2sq = 1.0 / d.dl_noise[k];
  const double d12 = std::sqrt(d1sq * d2sq);
  const VectorXcd& c = d.cci_est[k];
  const double eps2 = d.cci_radius[k] * d.cci_radius[k];
  const MatrixXcd hk = d.channels.dl[k] * d.channels.dl[k].adjoint();

  MatExpr m(2 * n);
  for (int i = 0; i < J; ++i) {
    conic::add_hermitian_term(m, n, v.delta[k], i, i, v.delta_scale * d1sq);
    conic::add_hermitian_term(m, n, v.p[i], i, i, -v.p_scale * d1sq);
    conic::add_hermitian_term(m, n, v.p[i], i, J, -v.p_scale * d12 * c[i]);
  }
  LinExpr chi;
  chi.add(v.delta[k], -v.delta_scale * eps2 * d2sq);
  for (int j = 0; j < J; ++j) chi.add(v.p[j], -v.p_scale * std::norm(c[j]) * d2sq);
  for (int i = 0; i < d.num_dl(); ++i) {
    const double coef = (i == k ? 1.0 / d.gamma_dl[k] : -1.0) * v.w_scale * d2sq;
    chi += coef * v.w[i].trace_with(hk);
  }
  chi.add_constant(-1.0);  // -sigma^2 * d2^2
  conic::add_hermitian_diagonal(m, n, J, chi);
  return m;
}

namespace {

LinExpr total_ul_expr(const InnerVariables& v) {
  LinExpr e;
  for (const auto& p : v.p) e.add(p, v.p_scale);
  return e;
}

LinExpr total_dl_expr(const InnerVariables& v) {
  LinExpr e;
  for (const auto& w : v.w) e += v.w_scale * w.trace();
  return e;
}

}  // namespace

void build_tchebycheff(const InnerProblemData& d, const InnerVariables& v, ConicProgram& program) {
  if (d.ref_ul == 0.0 || d.ref_dl == 0.0) throw ConfigError("Tchebycheff: reference objectives must be nonzero");
  // tau - lambda_i (T_i - T*_i) / |T*_i| >= 0
  LinExpr ul = LinExpr(v.tau) - (d.weight_ul / std::abs(d.ref_ul)) * (total_ul_expr(v) - d.ref_ul);
  LinExpr dl = LinExpr(v.tau) - (d.weight_dl / std::abs(d.ref_dl)) * (total_dl_expr(v) - d.ref_dl);
  program.add_inequality(std::move(ul), "C9 UL");
  program.add_inequality(std::move(dl), "C9 DL");
}

ConicProgram build_inner_program(const InnerProblemData& d, const InnerOptions& options, InnerVariables& v) {
  validate(d);
  ConicProgram prog;
  v = declare_inner_variables(prog, d);
  const int J = d.num_ul();
  const int K = d.num_dl();

  for (int j = 0; j < J; ++j) prog.add_inequality(build_c1(d, v, j), "C1 UL " + std::to_string(j));
  for (int k = 0; k < K; ++k) prog.add_psd(build_lmi(d, v, k), "C2 DL " + std::to_string(k));
  for (int j = 0; j < J; ++j) prog.add_inequality(LinExpr(v.p[j]), "C3 p" + std::to_string(j));
  for (int k = 0; k < K; ++k) prog.add_psd(v.w[k].embedded(), "C7 W" + std::to_string(k));
  for (int k = 0; k < K; ++k) prog.add_inequality(LinExpr(v.delta[k]), "C10 delta" + std::to_string(k));

  LinExpr sum_p;
  for (const auto& p : v.p) sum_p.add(p, 1.0);
  LinExpr sum_w;
  for (const auto& w : v.w) sum_w += w.trace();
  LinExpr sum_delta;
  for (const auto& dk : v.delta) sum_delta.add(dk, 1.0);
  prog.add_inequality(options.power_cap * J - sum_p, "cap UL");
  prog.add_inequality(options.power_cap * K - sum_w, "cap DL");
  for (int k = 0; k < K; ++k) {
    prog.add_inequality(options.power_cap * J - LinExpr(v.delta[k]), "cap delta" + std::to_string(k));
  }

  LinExpr objective;
  switch (options.objective) {
    case InnerObjective::tchebycheff: {
      build_tchebycheff(d, v, prog);
      const double eta = options.augmentation;
      const double eta0 = options.augmentation_floor;
      objective = LinExpr(v.tau) + (eta * (d.weight_ul + eta0) / std::abs(d.ref_ul)) * total_ul_expr(v) +
                  (eta * (d.weight_dl + eta0) / std::abs(d.ref_dl)) * total_dl_expr(v);
      break;
    }
    case InnerObjective::total_ul:
      // tau is pinned at zero so the feasible set stays bounded.
      prog.add_inequality(LinExpr(v.tau), "tau unused");
      objective = (1.0 / J) * sum_p + (kSecondaryWeight / K) * sum_w + LinExpr(v.tau);
      break;
    case InnerObjective::total_dl:
      prog.add_inequality(LinExpr(v.tau), "tau unused");
      objective = (1.0 / K) * sum_w + (kSecondaryWeight / J) * sum_p + LinExpr(v.tau);
      break;
  }
  objective += kDeltaWeight * sum_delta;
  prog.minimize(std::move(objective));
  return prog;
}

BeamformerExtraction extract_beamformers(std::span<const MatrixXcd> w) {
  BeamformerExtraction out;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const MatrixXcd herm = 0.5 * (w[k] + w[k].adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(herm);
    const Eigen::Index top = herm.rows() - 1;
    const double lmax = std::max(eig.eigenvalues()(top), 0.0);
    const double trace = herm.trace().real();
    const double ratio = trace > 0.0 ? std::min(1.0, lmax / trace) : 1.0;
    out.w.push_back(std::sqrt(lmax) * eig.eigenvectors().col(top));
    out.rank_ratio.push_back(ratio);
    if (ratio < 0.95) {
      out.warnings.push_back("W" + std::to_string(k) + ": rank ratio " + std::to_string(ratio) +
                             " < 0.95, extracted beamformer is degraded");
    }
  }
  return out;
}

double tchebycheff_value(double weight_ul, double weight_dl, double ref_ul, double ref_dl, double total_ul,
                         double total_dl) {
  return std::max(weight_ul * (total_ul - ref_ul) / std::abs(ref_ul), weight_dl * (total_dl - ref_dl) / std::abs(ref_dl));
}

namespace {

std::string failure_dump(const InnerOptions& options, const ConicProgram& prog) {
  if (options.failure_dump_dir.empty()) return {};
  static std::atomic<int> counter{0};
  std::filesystem::create_directories(options.failure_dump_dir);
  const std::string path =
      (std::filesystem::path(options.failure_dump_dir) / ("inner-failure-" + std::to_string(counter++) + ".dat-s")).string();
  std::ofstream out(path);
  prog.write_sdpa(out);
  return path;
}

}  // namespace

InnerSolution solve_inner(const InnerProblemData& d, const InnerOptions& options) {
  InnerVariables v;
  const ConicProgram prog = build_inner_program(d, options, v);
  if (!options.dump_path.empty()) {
    std::ofstream out(options.dump_path);
    prog.write_sdpa(out);
  }
  const conic::SolveReport report = conic::solve(prog, options.solver);

  InnerSolution sol;
  sol.status = report.status;
  sol.solve_time = report.solve_time;
  sol.iterations = report.iterations;
  sol.message = report.message;
  sol.tau = std::numeric_limits<double>::quiet_NaN();
  if (report.status == SolveStatus::numerical_failure) {
    sol.dump_path = failure_dump(options, prog);
    return sol;
  }
  if (!report.optimal()) return sol;

  const int J = d.num_ul();
  const int K = d.num_dl();
  double sum_p = 0.0;
  double sum_w = 0.0;
  for (int j = 0; j < J; ++j) {
    const double scaled = report.value(v.p[j]);
    sum_p += scaled;
    sol.p.push_back(std::max(0.0, scaled) * v.p_scale);
  }
  for (int k = 0; k < K; ++k) {
    MatrixXcd wk = v.w[k].value(report);
    sum_w += wk.trace().real();
    sol.W.push_back(v.w_scale * wk);
    sol.delta.push_back(report.value(v.delta[k]) * v.delta_scale);
  }
  if (sum_p > 0.999 * options.power_cap * J || sum_w > 0.999 * options.power_cap * K) {
    sol.status = SolveStatus::infeasible;
    sol.message = "rate targets need powers beyond the cap";
    sol.p.clear();
    sol.W.clear();
    sol.delta.clear();
    return sol;
  }
  sol.total_ul = std::accumulate(sol.p.begin(), sol.p.end(), 0.0);
  for (const auto& wk : sol.W) sol.total_dl += wk.trace().real();
  sol.tau = tchebycheff_value(d.weight_ul, d.weight_dl, d.ref_ul, d.ref_dl, sol.total_ul, sol.total_dl);
  BeamformerExtraction ex = extract_beamformers(sol.W);
  sol.w = std::move(ex.w);
  sol.rank_ratio = std::move(ex.rank_ratio);
  sol.warnings = std::move(ex.warnings);
  return sol;
}

ReferencePowers calibrate_references(const InnerProblemData& d, const InnerOptions& options) {
  ReferencePowers ref;
  InnerOptions o = options;
  o.dump_path.clear();
  o.objective = InnerObjective::total_ul;
  const InnerSolution ul = solve_inner(d, o);
  o.objective = InnerObjective::total_dl;
  const InnerSolution dl = solve_inner(d, o);
  ref.feasible = ul.optimal() && dl.optimal();
  if (ref.feasible) {
    ref.total_ul = ul.total_ul;
    ref.total_dl = dl.total_dl;
  }
  return ref;
}

InnerAudit audit_solution(const InnerProblemData& d, const InnerSolution& sol, int dl_samples, std::uint64_t seed) {
  if (!sol.optimal()) throw ContractViolation("audit_solution: solution is not optimal");
  InnerAudit a;
  a.min_ul_rate_margin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < d.num_ul(); ++j) {
    const double r = std::log2(1.0 + ul_sinr(d.zf, d.channels, sol.p, sol.W, d.rho, d.ul_noise, j));
    a.min_ul_rate_margin = std::min(a.min_ul_rate_margin, r - std::log2(1.0 + d.gamma_ul[j]));
  }
  a.min_dl_rate_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < d.num_dl(); ++k) {
    const double r = worst_case_dl_rate(d.channels, sol.W, d.cci_est[k], d.cci_radius[k], sol.p, d.dl_noise[k], k,
                                        dl_samples, seed + static_cast<std::uint64_t>(k));
    a.min_dl_rate_margin = std::min(a.min_dl_rate_margin, r - std::log2(1.0 + d.gamma_dl[k]));
  }
  a.min_w_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& wk : sol.W) {
    const double lmin = Eigen::SelfAdjointEigenSolver<MatrixXcd>(wk, Eigen::EigenvaluesOnly).eigenvalues()(0);
    a.min_w_eigenvalue = std::min(a.min_w_eigenvalue, lmin);
  }
  a.min_power = *std::min_element(sol.p.begin(), sol.p.end());
  return a;
}

}  // namespace mafd
