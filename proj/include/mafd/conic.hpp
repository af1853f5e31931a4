#pragma once

// Solver-agnostic model of real symmetric-cone programs:
//
//   minimize    f(y)
//   subject to  g_i(y) == 0         (linear equalities)
//               h_i(y) >= 0         (linear inequalities)
//               M_k(y) is PSD       (affine symmetric matrix expressions)
//
// over a vector y of real scalars. Matrix-valued decision variables are
// declared as blocks of scalars; complex Hermitian variables are carried in
// their real 2n x 2n embedding.

#include <Eigen/Dense>

#include <complex>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mafd::conic {

struct Var {
  int id = -1;
};

/// Affine scalar expression: constant + sum coef * var.
class LinExpr {
 public:
  LinExpr() = default;
  LinExpr(double constant) : constant_(constant) {}  // NOLINT(google-explicit-constructor)
  LinExpr(Var v) { add(v, 1.0); }                     // NOLINT(google-explicit-constructor)

  LinExpr& add(Var v, double coef);
  LinExpr& add_constant(double c) {
    constant_ += c;
    return *this;
  }

  LinExpr& operator+=(const LinExpr& other);
  LinExpr& operator-=(const LinExpr& other);
  LinExpr& operator*=(double s);

  double constant() const { return constant_; }
  const std::vector<std::pair<int, double>>& terms() const { return terms_; }

  double evaluate(std::span<const double> values) const;

 private:
  std::vector<std::pair<int, double>> terms_;
  double constant_ = 0.0;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator*(double s, LinExpr a);
LinExpr operator*(LinExpr a, double s);

/// One coefficient of a symmetric matrix; off-diagonal entries stand for both
/// (row, col) and (col, row).
struct SymEntry {
  int row;
  int col;
  double value;
};

/// Affine symmetric matrix expression: C + sum_v y_v * A_v with sparse A_v.
class MatExpr {
 public:
  explicit MatExpr(int dim) : dim_(dim) {}

  int dim() const { return dim_; }

  MatExpr& add_constant(int row, int col, double value);
  MatExpr& add_constant(const Eigen::MatrixXd& symmetric);
  MatExpr& add_term(Var v, int row, int col, double coef);
  /// Adds e * E where E is the constant symmetric pattern `pattern` (dense).
  MatExpr& add_scaled(const LinExpr& e, const Eigen::MatrixXd& pattern);
  /// Places `block` at offset (at, at).
  MatExpr& add_block(int at, const MatExpr& block);

  const std::vector<SymEntry>& constant_entries() const { return constant_; }
  const std::vector<std::pair<int, SymEntry>>& terms() const { return terms_; }

  Eigen::MatrixXd evaluate(std::span<const double> values) const;

 private:
  int dim_;
  std::vector<SymEntry> constant_;
  std::vector<std::pair<int, SymEntry>> terms_;
};

/// Helpers for building the real embedding of an n x n Hermitian matrix
/// expression inside a 2n x 2n MatExpr. (row, col) addresses the Hermitian
/// matrix; the conjugate entry (col, row) is implied.
void add_hermitian_term(MatExpr& m, int n, Var v, int row, int col, std::complex<double> coef);
void add_hermitian_constant(MatExpr& m, int n, int row, int col, std::complex<double> value);
/// Adds the real expression e to the diagonal entry (i, i).
void add_hermitian_diagonal(MatExpr& m, int n, int i, const LinExpr& e);

class SolveReport;

/// Real symmetric n x n matrix variable, stored as n(n+1)/2 scalars.
class SymmetricVar {
 public:
  SymmetricVar() = default;
  SymmetricVar(int first, int n) : first_(first), n_(n) {}

  int dim() const { return n_; }
  Var at(int row, int col) const;
  MatExpr expr() const;
  LinExpr trace() const;
  Eigen::MatrixXd value(const SolveReport& report) const;

 private:
  int first_ = -1;
  int n_ = 0;
};

/// Complex Hermitian n x n matrix variable, stored as n^2 real scalars
/// (n real diagonal entries, then real and imaginary parts of the strict
/// upper triangle).
class HermitianVar {
 public:
  HermitianVar() = default;
  HermitianVar(int first, int n) : first_(first), n_(n) {}

  int dim() const { return n_; }
  int scalar_count() const { return n_ * n_; }

  /// Real 2n x 2n embedding [[Re W, -Im W], [Im W, Re W]] as an affine expression.
  MatExpr embedded() const;
  /// Real-valued Tr(W H) for a Hermitian coefficient matrix H.
  LinExpr trace_with(const Eigen::MatrixXcd& h) const;
  LinExpr trace() const;

  Eigen::MatrixXcd value(const SolveReport& report) const;
  Eigen::MatrixXcd value(std::span<const double> values) const;
  /// Inverse of value(): writes the scalars of a Hermitian matrix into `values`.
  void store(const Eigen::MatrixXcd& w, std::span<double> values) const;

 private:
  Var diag(int a) const { return {first_ + a}; }
  Var re(int a, int b) const;
  Var im(int a, int b) const;

  int first_ = -1;
  int n_ = 0;
};

enum class ConstraintKind { equality, inequality, psd };

class ConicProgram {
 public:
  Var add_scalar(const std::string& name);
  SymmetricVar add_symmetric(const std::string& name, int n);
  HermitianVar add_hermitian(const std::string& name, int n);

  /// e == 0
  void add_equality(LinExpr e, std::string label = {});
  /// e >= 0
  void add_inequality(LinExpr e, std::string label = {});
  /// m is positive semidefinite
  void add_psd(MatExpr m, std::string label = {});
  void minimize(LinExpr objective);

  int num_scalars() const { return static_cast<int>(scalar_names_.size()); }
  const std::string& scalar_name(int id) const { return scalar_names_.at(id); }
  const LinExpr& objective() const { return objective_; }
  const std::vector<LinExpr>& equalities() const { return equalities_; }
  const std::vector<LinExpr>& inequalities() const { return inequalities_; }
  const std::vector<MatExpr>& psd_constraints() const { return psd_; }
  const std::vector<std::string>& inequality_labels() const { return inequality_labels_; }
  const std::vector<std::string>& psd_labels() const { return psd_labels_; }

  /// Largest violation of any constraint at `values` (0 when feasible).
  /// PSD violations are measured by the most negative eigenvalue.
  double max_violation(std::span<const double> values) const;

  /// Sparse SDPA text dump (".dat-s"): minimize c'x s.t. sum F_i x_i - F_0 PSD,
  /// with one diagonal block holding the inequalities. Equalities are written
  /// as a pair of opposite inequalities.
  void write_sdpa(std::ostream& out) const;

 private:
  void check_vars(const LinExpr& e) const;
  void check_vars(const MatExpr& m) const;

  std::vector<std::string> scalar_names_;
  LinExpr objective_;
  std::vector<LinExpr> equalities_;
  std::vector<LinExpr> inequalities_;
  std::vector<std::string> equality_labels_;
  std::vector<std::string> inequality_labels_;
  std::vector<MatExpr> psd_;
  std::vector<std::string> psd_labels_;
};

enum class SolveStatus { optimal, infeasible, unbounded, numerical_failure };

const char* to_string(SolveStatus s);

struct SolverOptions {
  /// Relative tolerance on primal/dual residuals and on the duality gap.
  double tol = 1e-8;
  int max_iterations = 120;
  /// Every scalar is confined to [-box, box]; an optimum on the box is
  /// reported as unbounded.
  double box = 1e7;
  /// Normalized phase-I margin above which the program is declared infeasible.
  double infeasibility_margin = 1e-7;
  bool verbose = false;
};

class SolveReport {
 public:
  SolveStatus status = SolveStatus::numerical_failure;
  double objective_value = 0.0;  // NaN unless optimal
  std::vector<double> values;
  double solve_time = 0.0;  // seconds
  int iterations = 0;       // phase I + phase II
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double relative_gap = 0.0;
  /// Optimal normalized phase-I margin (negative: strictly feasible).
  double feasibility_margin = 0.0;
  std::string message;

  double value(Var v) const { return values.at(v.id); }
  bool optimal() const { return status == SolveStatus::optimal; }
};

SolveReport solve(const ConicProgram& program, const SolverOptions& options = {});

/// [[Re H, -Im H], [Im H, Re H]]. Throws ContractViolation when H is not
/// Hermitian to `tol` (absolute, scaled by max(1, max|H_ij|)).
Eigen::MatrixXd hermitian_embed(const Eigen::MatrixXcd& h, double tol = 1e-10);

}  // namespace mafd::conic
