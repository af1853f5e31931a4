#pragma once

// Primal-dual path-following solver for block-structured SDPs in the form
//
//   (D)  maximize  b'y        s.t.  S = C - sum_i y_i A_i  is PSD
//   (P)  minimize  <C, X>     s.t.  <A_i, X> = b_i,  X PSD
//
// with dense PSD blocks and diagonal (LP) blocks. HKM search direction with a
// Mehrotra predictor-corrector step.

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace mafd::conic::detail {

/// Matrix coefficient. For PSD blocks both triangles are stored explicitly.
struct Entry {
  int row;
  int col;
  double value;
};

struct Block {
  int dim = 0;
  bool diagonal = false;
  /// Excluded from the residual normalization (artificial box rows).
  bool artificial = false;
  /// Dense symmetric dim x dim for PSD blocks, dim x 1 for diagonal blocks.
  Eigen::MatrixXd c;
  /// Variables touching this block with their coefficient entries.
  std::vector<std::pair<int, std::vector<Entry>>> vars;
};

struct StandardForm {
  int m = 0;
  Eigen::VectorXd b;
  std::vector<Block> blocks;
};

struct IpmSettings {
  double tol = 1e-8;
  int max_iterations = 120;
  double step_fraction = 0.95;
  /// On a stall, the best iterate is accepted when its residuals and gap are
  /// within this multiple of tol.
  double stall_acceptance = 100.0;
  bool verbose = false;
};

struct IpmState {
  Eigen::VectorXd y;
  std::vector<Eigen::MatrixXd> x;
  std::vector<Eigen::MatrixXd> s;
};

struct IpmResult {
  bool converged = false;
  bool stopped_early = false;
  /// Converged only to stall_acceptance * tol.
  bool reduced_accuracy = false;
  int iterations = 0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double relative_gap = 0.0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  IpmState state;
  std::string message;
};

/// Returns true to stop after an iterate (used by phase I).
using EarlyExit = std::function<bool(const Eigen::VectorXd& y)>;

/// Solves from the infeasible start X = xi I, S = eta I, y = 0, or, when
/// `dual_start` is given, from that y with S = C - A'y (must be PD).
IpmResult run_ipm(const StandardForm& form, const IpmSettings& settings,
                  const Eigen::VectorXd* dual_start = nullptr, const EarlyExit& early_exit = {});

/// S = C - sum y_i A_i for every block.
std::vector<Eigen::MatrixXd> dual_slack(const StandardForm& form, const Eigen::VectorXd& y);

}  // namespace mafd::conic::detail
