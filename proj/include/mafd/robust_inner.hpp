#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

#include "mafd/channel.hpp"
#include "mafd/conic.hpp"
#include "mafd/receiver.hpp"
#include "mafd/scenario.hpp"

namespace mafd {

/// Everything the inner problem needs at one fixed antenna layout.
struct InnerProblemData {
  ChannelSet channels;
  ZfBank zf;
  std::vector<double> gamma_ul;           // 2^R - 1 per UL UT
  std::vector<double> gamma_dl;           // 2^R - 1 per DL UT
  std::vector<Eigen::VectorXcd> cci_est;  // c^_k, J entries each
  std::vector<double> cci_radius;         // eps_k
  double weight_ul = 0.5;
  double weight_dl = 0.5;
  double ref_ul = 1.0;  // T*_1, watts
  double ref_dl = 1.0;  // T*_2, watts
  double ul_noise = 0.0;
  std::vector<double> dl_noise;
  double rho = 0.0;

  int num_ul() const { return static_cast<int>(gamma_ul.size()); }
  int num_dl() const { return static_cast<int>(gamma_dl.size()); }
  int num_tx() const { return static_cast<int>(channels.h_si.cols()); }
};

/// Channels, ZF bank and thresholds at `layout`. Throws SingularityError when
/// the UL channels are not separable by ZF.
InnerProblemData make_inner_data(const Scenario& scenario, const AntennaLayout& layout);
InnerProblemData make_inner_data(const Scenario& scenario, ChannelSet channels);

/// Throws ConfigError on a zero reference, a non-positive DL threshold or
/// mismatched sizes.
void validate(const InnerProblemData& data);

/// What the inner program minimizes.
enum class InnerObjective { tchebycheff, total_ul, total_dl };

struct InnerOptions {
  InnerObjective objective = InnerObjective::tchebycheff;
  conic::SolverOptions solver{};
  /// Weight of the tie-breaking term eta * sum_i (lambda_i + eta0) T_i / |T*_i|
  /// added to tau. It selects a properly Pareto-optimal point among the
  /// minimizers of tau and does not change the reported tau.
  double augmentation = 1e-4;
  double augmentation_floor = 1e-3;
  /// Powers are capped at this multiple of the interference-free floor; a
  /// solution on the cap is reported as infeasible.
  double power_cap = 1e6;
  /// When nonempty, every assembled program is written here (SDPA sparse).
  std::string dump_path;
  /// When nonempty, programs that fail numerically are written into this directory.
  std::string failure_dump_dir;
};

/// Decision variables of the inner program. The program works in scaled
/// units: physical = scale * scaled.
struct InnerVariables {
  std::vector<conic::Var> p;
  std::vector<conic::HermitianVar> w;
  std::vector<conic::Var> delta;
  conic::Var tau;
  double p_scale = 1.0;
  double w_scale = 1.0;
  double delta_scale = 1.0;

  /// Scaled-variable vector for physical values (for evaluating constraints).
  std::vector<double> pack(int num_scalars, std::span<const double> p_watts, std::span<const Eigen::MatrixXcd> w_watts,
                           std::span<const double> delta_watts, double tau_value) const;
};

InnerVariables declare_inner_variables(conic::ConicProgram& program, const InnerProblemData& data);

/// C1 for UL UT j, normalized by its interference-free noise term:
/// [Tr{L_j B_j} p_j - gamma_j (sum_{i != j} Tr{L_i B_j} p_i + S_j + Tr{B_j} sigma^2)] / (gamma_j Tr{B_j} sigma^2) >= 0.
conic::LinExpr build_c1(const InnerProblemData& data, const InnerVariables& vars, int j);

/// Robust DL constraint for DL UT k as the real embedding of
/// D [[delta I - P, -P c^], [-c^H P, chi]] D, D = diag(d1 I_J, d2) > 0.
conic::MatExpr build_lmi(const InnerProblemData& data, const InnerVariables& vars, int k);

/// Adds lambda_i (T_i - T*_i) / |T*_i| <= tau for i = 1, 2.
void build_tchebycheff(const InnerProblemData& data, const InnerVariables& vars, conic::ConicProgram& program);

/// Full inner program (C1, LMI, p >= 0, W PSD, C9, delta >= 0, caps, objective).
conic::ConicProgram build_inner_program(const InnerProblemData& data, const InnerOptions& options, InnerVariables& vars);

struct InnerSolution {
  conic::SolveStatus status = conic::SolveStatus::numerical_failure;
  std::vector<double> p;                // watts
  std::vector<Eigen::MatrixXcd> W;      // watts
  std::vector<Eigen::VectorXcd> w;      // principal-eigenvector beamformers
  std::vector<double> delta;
  double tau = 0.0;       // max_i lambda_i (T_i - T*_i) / |T*_i|
  double total_ul = 0.0;  // T_1
  double total_dl = 0.0;  // T_2
  std::vector<double> rank_ratio;  // lambda_max(W_k) / Tr(W_k)
  std::vector<std::string> warnings;
  double solve_time = 0.0;
  int iterations = 0;
  std::string message;
  std::string dump_path;

  bool optimal() const { return status == conic::SolveStatus::optimal; }
};

InnerSolution solve_inner(const InnerProblemData& data, const InnerOptions& options = {});

struct BeamformerExtraction {
  std::vector<Eigen::VectorXcd> w;
  std::vector<double> rank_ratio;
  std::vector<std::string> warnings;  // one per W_k with rank_ratio < 0.95
};

/// w_k = sqrt(lambda_max) v_max.
BeamformerExtraction extract_beamformers(std::span<const Eigen::MatrixXcd> w);

/// max_i lambda_i (T_i - T*_i) / |T*_i|.
double tchebycheff_value(double weight_ul, double weight_dl, double ref_ul, double ref_dl, double total_ul, double total_dl);

/// Optimal T_1 and T_2 of the two single-objective problems (for calibrated references).
struct ReferencePowers {
  double total_ul = 0.0;
  double total_dl = 0.0;
  bool feasible = false;
};
ReferencePowers calibrate_references(const InnerProblemData& data, const InnerOptions& options = {});

/// Independent re-check of a solution against the receiver-level SINRs.
struct InnerAudit {
  double min_ul_rate_margin = 0.0;  // min_j R_j - R_TH,j (bps/Hz)
  double min_dl_rate_margin = 0.0;  // min_k sampled worst-case R_k - R_TH,k
  double min_w_eigenvalue = 0.0;    // relative to max(1, Tr W_k)
  double min_power = 0.0;           // watts
};
InnerAudit audit_solution(const InnerProblemData& data, const InnerSolution& solution, int dl_samples,
                          std::uint64_t seed);

}  // namespace mafd
