#include "mafd/conic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "interior_point.hpp"
#include "mafd/errors.hpp"

namespace mafd::conic {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------- LinExpr

LinExpr& LinExpr::add(Var v, double coef) {
  if (v.id < 0) throw ContractViolation("LinExpr: undeclared variable");
  if (coef == 0.0) return *this;
  for (auto& [id, c] : terms_) {
    if (id == v.id) {
      c += coef;
      return *this;
    }
  }
  terms_.emplace_back(v.id, coef);
  return *this;
}

LinExpr& LinExpr::operator+=(const LinExpr& other) {
  for (const auto& [id, c] : other.terms_) add(Var{id}, c);
  constant_ += other.constant_;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& other) {
  for (const auto& [id, c] : other.terms_) add(Var{id}, -c);
  constant_ -= other.constant_;
  return *this;
}

LinExpr& LinExpr::operator*=(double s) {
  for (auto& term : terms_) term.second *= s;
  constant_ *= s;
  return *this;
}

double LinExpr::evaluate(std::span<const double> values) const {
  double acc = constant_;
  for (const auto& [id, c] : terms_) acc += c * values[id];
  return acc;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator*(double s, LinExpr a) { return a *= s; }
LinExpr operator*(LinExpr a, double s) { return a *= s; }

// ---------------------------------------------------------------- MatExpr

namespace {

void check_index(int dim, int row, int col) {
  if (row < 0 || col < 0 || row >= dim || col >= dim) throw ContractViolation("MatExpr: index out of range");
}

}  // namespace

MatExpr& MatExpr::add_constant(int row, int col, double value) {
  check_index(dim_, row, col);
  if (value != 0.0) constant_.push_back({std::min(row, col), std::max(row, col), value});
  return *this;
}

MatExpr& MatExpr::add_constant(const MatrixXd& symmetric) {
  if (symmetric.rows() != dim_ || symmetric.cols() != dim_) throw ContractViolation("MatExpr: dimension mismatch");
  for (int c = 0; c < dim_; ++c) {
    for (int r = 0; r <= c; ++r) add_constant(r, c, r == c ? symmetric(r, c) : 0.5 * (symmetric(r, c) + symmetric(c, r)));
  }
  return *this;
}

MatExpr& MatExpr::add_term(Var v, int row, int col, double coef) {
  check_index(dim_, row, col);
  if (v.id < 0) throw ContractViolation("MatExpr: undeclared variable");
  if (coef != 0.0) terms_.push_back({v.id, {std::min(row, col), std::max(row, col), coef}});
  return *this;
}

MatExpr& MatExpr::add_scaled(const LinExpr& e, const MatrixXd& pattern) {
  if (pattern.rows() != dim_ || pattern.cols() != dim_) throw ContractViolation("MatExpr: dimension mismatch");
  for (int c = 0; c < dim_; ++c) {
    for (int r = 0; r <= c; ++r) {
      const double p = r == c ? pattern(r, c) : 0.5 * (pattern(r, c) + pattern(c, r));
      if (p == 0.0) continue;
      add_constant(r, c, p * e.constant());
      for (const auto& [id, coef] : e.terms()) add_term(Var{id}, r, c, p * coef);
    }
  }
  return *this;
}

MatExpr& MatExpr::add_block(int at, const MatExpr& block) {
  if (at < 0 || at + block.dim() > dim_) throw ContractViolation("MatExpr: block out of range");
  for (const SymEntry& e : block.constant_) constant_.push_back({e.row + at, e.col + at, e.value});
  for (const auto& [id, e] : block.terms_) terms_.push_back({id, {e.row + at, e.col + at, e.value}});
  return *this;
}

MatrixXd MatExpr::evaluate(std::span<const double> values) const {
  MatrixXd out = MatrixXd::Zero(dim_, dim_);
  auto place = [&out](const SymEntry& e, double v) {
    out(e.row, e.col) += v;
    if (e.row != e.col) out(e.col, e.row) += v;
  };
  for (const SymEntry& e : constant_) place(e, e.value);
  for (const auto& [id, e] : terms_) place(e, e.value * values[id]);
  return out;
}

void add_hermitian_term(MatExpr& m, int n, Var v, int row, int col, std::complex<double> coef) {
  if (row == col) {
    m.add_term(v, row, row, coef.real());
    m.add_term(v, n + row, n + row, coef.real());
    return;
  }
  if (row > col) {
    std::swap(row, col);
    coef = std::conj(coef);
  }
  m.add_term(v, row, col, coef.real());
  m.add_term(v, n + row, n + col, coef.real());
  m.add_term(v, row, n + col, -coef.imag());
  m.add_term(v, col, n + row, coef.imag());
}

void add_hermitian_constant(MatExpr& m, int n, int row, int col, std::complex<double> value) {
  if (row == col) {
    m.add_constant(row, row, value.real());
    m.add_constant(n + row, n + row, value.real());
    return;
  }
  if (row > col) {
    std::swap(row, col);
    value = std::conj(value);
  }
  m.add_constant(row, col, value.real());
  m.add_constant(n + row, n + col, value.real());
  m.add_constant(row, n + col, -value.imag());
  m.add_constant(col, n + row, value.imag());
}

void add_hermitian_diagonal(MatExpr& m, int n, int i, const LinExpr& e) {
  add_hermitian_constant(m, n, i, i, e.constant());
  for (const auto& [id, c] : e.terms()) add_hermitian_term(m, n, Var{id}, i, i, c);
}

// --------------------------------------------------------- matrix variables

Var SymmetricVar::at(int row, int col) const {
  const int a = std::min(row, col);
  const int b = std::max(row, col);
  if (a < 0 || b >= n_) throw ContractViolation("SymmetricVar: index out of range");
  return {first_ + a * n_ - a * (a - 1) / 2 + (b - a)};
}

MatExpr SymmetricVar::expr() const {
  MatExpr m(n_);
  for (int a = 0; a < n_; ++a) {
    for (int b = a; b < n_; ++b) m.add_term(at(a, b), a, b, 1.0);
  }
  return m;
}

LinExpr SymmetricVar::trace() const {
  LinExpr e;
  for (int a = 0; a < n_; ++a) e.add(at(a, a), 1.0);
  return e;
}

MatrixXd SymmetricVar::value(const SolveReport& report) const {
  MatrixXd out(n_, n_);
  for (int a = 0; a < n_; ++a) {
    for (int b = a; b < n_; ++b) out(a, b) = out(b, a) = report.value(at(a, b));
  }
  return out;
}

Var HermitianVar::re(int a, int b) const {
  const int k = a * n_ - a * (a + 1) / 2 + (b - a - 1);
  return {first_ + n_ + 2 * k};
}

Var HermitianVar::im(int a, int b) const {
  const int k = a * n_ - a * (a + 1) / 2 + (b - a - 1);
  return {first_ + n_ + 2 * k + 1};
}

MatExpr HermitianVar::embedded() const {
  MatExpr m(2 * n_);
  for (int a = 0; a < n_; ++a) {
    m.add_term(diag(a), a, a, 1.0);
    m.add_term(diag(a), n_ + a, n_ + a, 1.0);
    for (int b = a + 1; b < n_; ++b) {
      m.add_term(re(a, b), a, b, 1.0);
      m.add_term(re(a, b), n_ + a, n_ + b, 1.0);
      m.add_term(im(a, b), a, n_ + b, -1.0);
      m.add_term(im(a, b), b, n_ + a, 1.0);
    }
  }
  return m;
}

LinExpr HermitianVar::trace_with(const MatrixXcd& h) const {
  if (h.rows() != n_ || h.cols() != n_) throw ContractViolation("HermitianVar: coefficient dimension mismatch");
  LinExpr e;
  for (int a = 0; a < n_; ++a) {
    e.add(diag(a), h(a, a).real());
    for (int b = a + 1; b < n_; ++b) {
      // Hermitian part of h only; Tr(W h) for non-Hermitian h is not real.
      const std::complex<double> hab = 0.5 * (h(a, b) + std::conj(h(b, a)));
      e.add(re(a, b), 2.0 * hab.real());
      e.add(im(a, b), 2.0 * hab.imag());
    }
  }
  return e;
}

LinExpr HermitianVar::trace() const {
  LinExpr e;
  for (int a = 0; a < n_; ++a) e.add(diag(a), 1.0);
  return e;
}

MatrixXcd HermitianVar::value(std::span<const double> values) const {
  MatrixXcd w(n_, n_);
  for (int a = 0; a < n_; ++a) {
    w(a, a) = values[diag(a).id];
    for (int b = a + 1; b < n_; ++b) {
      const std::complex<double> v(values[re(a, b).id], values[im(a, b).id]);
      w(a, b) = v;
      w(b, a) = std::conj(v);
    }
  }
  return w;
}

void HermitianVar::store(const MatrixXcd& w, std::span<double> values) const {
  if (w.rows() != n_ || w.cols() != n_) throw ContractViolation("HermitianVar: dimension mismatch");
  for (int a = 0; a < n_; ++a) {
    values[diag(a).id] = w(a, a).real();
    for (int b = a + 1; b < n_; ++b) {
      values[re(a, b).id] = w(a, b).real();
      values[im(a, b).id] = w(a, b).imag();
    }
  }
}

MatrixXcd HermitianVar::value(const SolveReport& report) const { return value(std::span<const double>(report.values)); }

// ------------------------------------------------------------ ConicProgram

Var ConicProgram::add_scalar(const std::string& name) {
  scalar_names_.push_back(name);
  return {num_scalars() - 1};
}

SymmetricVar ConicProgram::add_symmetric(const std::string& name, int n) {
  if (n < 1) throw ContractViolation("add_symmetric: dimension must be positive");
  const int first = num_scalars();
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) scalar_names_.push_back(name + "[" + std::to_string(a) + "," + std::to_string(b) + "]");
  }
  return {first, n};
}

HermitianVar ConicProgram::add_hermitian(const std::string& name, int n) {
  if (n < 1) throw ContractViolation("add_hermitian: dimension must be positive");
  const int first = num_scalars();
  for (int a = 0; a < n; ++a) scalar_names_.push_back(name + "[" + std::to_string(a) + "," + std::to_string(a) + "]");
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const std::string idx = "[" + std::to_string(a) + "," + std::to_string(b) + "]";
      scalar_names_.push_back("re " + name + idx);
      scalar_names_.push_back("im " + name + idx);
    }
  }
  return {first, n};
}

void ConicProgram::check_vars(const LinExpr& e) const {
  for (const auto& [id, c] : e.terms()) {
    if (id >= num_scalars()) throw ContractViolation("constraint references an undeclared variable");
  }
}

void ConicProgram::check_vars(const MatExpr& m) const {
  for (const auto& [id, e] : m.terms()) {
    if (id >= num_scalars()) throw ContractViolation("constraint references an undeclared variable");
  }
}

void ConicProgram::add_equality(LinExpr e, std::string label) {
  check_vars(e);
  equalities_.push_back(std::move(e));
  equality_labels_.push_back(std::move(label));
}

void ConicProgram::add_inequality(LinExpr e, std::string label) {
  check_vars(e);
  inequalities_.push_back(std::move(e));
  inequality_labels_.push_back(std::move(label));
}

void ConicProgram::add_psd(MatExpr m, std::string label) {
  check_vars(m);
  psd_.push_back(std::move(m));
  psd_labels_.push_back(std::move(label));
}

void ConicProgram::minimize(LinExpr objective) {
  check_vars(objective);
  objective_ = std::move(objective);
}

double ConicProgram::max_violation(std::span<const double> values) const {
  double worst = 0.0;
  for (const LinExpr& e : equalities_) worst = std::max(worst, std::abs(e.evaluate(values)));
  for (const LinExpr& e : inequalities_) worst = std::max(worst, -e.evaluate(values));
  for (const MatExpr& m : psd_) {
    const MatrixXd v = m.evaluate(values);
    const double lmin = Eigen::SelfAdjointEigenSolver<MatrixXd>(v, Eigen::EigenvaluesOnly).eigenvalues()(0);
    worst = std::max(worst, -lmin);
  }
  return worst;
}

void ConicProgram::write_sdpa(std::ostream& out) const {
  const int lp_rows = static_cast<int>(inequalities_.size() + 2 * equalities_.size());
  const int nblocks = static_cast<int>(psd_.size()) + (lp_rows > 0 ? 1 : 0);
  out << "\"ma-fd-power conic program: minimize c'x s.t. sum F_i x_i - F_0 PSD\n";
  out << num_scalars() << " = m\n" << nblocks << " = nBlocks\n";
  if (lp_rows > 0) out << -lp_rows << (psd_.empty() ? "" : " ");
  for (std::size_t k = 0; k < psd_.size(); ++k) out << psd_[k].dim() << (k + 1 < psd_.size() ? " " : "");
  out << "\n";
  std::vector<double> c(num_scalars(), 0.0);
  for (const auto& [id, v] : objective_.terms()) c[id] += v;
  out << std::setprecision(17);
  for (int i = 0; i < num_scalars(); ++i) out << c[i] << (i + 1 < num_scalars() ? " " : "\n");
  if (num_scalars() == 0) out << "\n";

  auto emit = [&out](int mat, int blk, int r, int col, double v) {
    if (v != 0.0) out << mat << " " << blk << " " << r + 1 << " " << col + 1 << " " << v << "\n";
  };
  int blk = 1;
  if (lp_rows > 0) {
    int row = 0;
    auto emit_row = [&](const LinExpr& e, double sign) {
      emit(0, blk, row, row, -sign * e.constant());
      for (const auto& [id, v] : e.terms()) emit(id + 1, blk, row, row, sign * v);
      ++row;
    };
    for (const LinExpr& e : inequalities_) emit_row(e, 1.0);
    for (const LinExpr& e : equalities_) {
      emit_row(e, 1.0);
      emit_row(e, -1.0);
    }
    ++blk;
  }
  for (const MatExpr& m : psd_) {
    std::map<std::tuple<int, int, int>, double> merged;
    for (const SymEntry& e : m.constant_entries()) merged[{0, e.row, e.col}] -= e.value;
    for (const auto& [id, e] : m.terms()) merged[{id + 1, e.row, e.col}] += e.value;
    for (const auto& [key, v] : merged) emit(std::get<0>(key), blk, std::get<1>(key), std::get<2>(key), v);
    ++blk;
  }
}

// ------------------------------------------------------------------ solve

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::infeasible:
      return "infeasible";
    case SolveStatus::unbounded:
      return "unbounded";
    case SolveStatus::numerical_failure:
      return "numerical-failure";
  }
  return "unknown";
}

namespace {

using detail::Block;
using detail::Entry;
using detail::StandardForm;

// Merges duplicate (row, col) coefficients and expands symmetric pairs.
std::vector<Entry> expand(const std::map<std::pair<int, int>, double>& upper, bool diagonal) {
  std::vector<Entry> out;
  for (const auto& [pos, v] : upper) {
    if (v == 0.0) continue;
    out.push_back({pos.first, pos.second, v});
    if (!diagonal && pos.first != pos.second) out.push_back({pos.second, pos.first, v});
  }
  return out;
}

// Block in upper-triangular accumulation form, before expansion.
struct RawBlock {
  int dim = 0;
  bool diagonal = false;
  MatrixXd c;
  std::map<int, std::map<std::pair<int, int>, double>> a;
};

Block finish(const RawBlock& raw) {
  Block blk;
  blk.dim = raw.dim;
  blk.diagonal = raw.diagonal;
  blk.c = raw.c;
  for (const auto& [var, upper] : raw.a) {
    auto entries = expand(upper, raw.diagonal);
    if (!entries.empty()) blk.vars.emplace_back(var, std::move(entries));
  }
  return blk;
}

// Constraint data over the declared scalars y, in S = C - sum y_i A_i form.
std::vector<RawBlock> raw_blocks(const ConicProgram& prog) {
  std::vector<RawBlock> blocks;
  if (!prog.inequalities().empty()) {
    RawBlock lp;
    lp.dim = static_cast<int>(prog.inequalities().size());
    lp.diagonal = true;
    lp.c = MatrixXd::Zero(lp.dim, 1);
    for (int r = 0; r < lp.dim; ++r) {
      const LinExpr& e = prog.inequalities()[r];
      lp.c(r, 0) = e.constant();
      for (const auto& [id, v] : e.terms()) lp.a[id][{r, r}] -= v;
    }
    blocks.push_back(std::move(lp));
  }
  for (const MatExpr& m : prog.psd_constraints()) {
    RawBlock blk;
    blk.dim = m.dim();
    blk.c = MatrixXd::Zero(m.dim(), m.dim());
    for (const SymEntry& e : m.constant_entries()) {
      blk.c(e.row, e.col) += e.value;
      if (e.row != e.col) blk.c(e.col, e.row) += e.value;
    }
    for (const auto& [id, e] : m.terms()) blk.a[id][{e.row, e.col}] -= e.value;
    blocks.push_back(std::move(blk));
  }
  return blocks;
}

// y = offset + basis * z parametrizes the equality-constrained subspace.
struct Reduction {
  VectorXd offset;
  MatrixXd basis;
  bool identity = true;
  bool consistent = true;
};

Reduction reduce_equalities(const ConicProgram& prog) {
  const int m = prog.num_scalars();
  Reduction red;
  red.offset = VectorXd::Zero(m);
  if (prog.equalities().empty()) return red;
  red.identity = false;
  const int k = static_cast<int>(prog.equalities().size());
  MatrixXd e = MatrixXd::Zero(k, m);
  VectorXd rhs(k);
  for (int r = 0; r < k; ++r) {
    const LinExpr& eq = prog.equalities()[r];
    for (const auto& [id, v] : eq.terms()) e(r, id) += v;
    rhs[r] = -eq.constant();
  }
  Eigen::FullPivLU<MatrixXd> lu(e);
  lu.setThreshold(1e-12);
  red.offset = lu.solve(rhs);
  if ((e * red.offset - rhs).norm() > 1e-9 * (1.0 + rhs.norm())) red.consistent = false;
  if (lu.rank() == m) {
    red.basis = MatrixXd::Zero(m, 0);
  } else {
    red.basis = lu.kernel();
  }
  return red;
}

std::vector<RawBlock> substitute(const std::vector<RawBlock>& blocks, const Reduction& red) {
  if (red.identity) return blocks;
  std::vector<RawBlock> out;
  for (const RawBlock& raw : blocks) {
    RawBlock blk;
    blk.dim = raw.dim;
    blk.diagonal = raw.diagonal;
    blk.c = raw.c;
    for (const auto& [var, upper] : raw.a) {
      const double yi = red.offset[var];
      for (const auto& [pos, v] : upper) {
        if (raw.diagonal) {
          blk.c(pos.first, 0) -= yi * v;
        } else {
          blk.c(pos.first, pos.second) -= yi * v;
          if (pos.first != pos.second) blk.c(pos.second, pos.first) -= yi * v;
        }
      }
      for (int j = 0; j < red.basis.cols(); ++j) {
        const double nij = red.basis(var, j);
        if (std::abs(nij) < 1e-15) continue;
        for (const auto& [pos, v] : upper) blk.a[j][pos] += nij * v;
      }
    }
    out.push_back(std::move(blk));
  }
  return out;
}

RawBlock box_block(int nz, double box) {
  RawBlock blk;
  blk.dim = 2 * nz;
  blk.diagonal = true;
  blk.c = MatrixXd::Constant(blk.dim, 1, box);
  for (int j = 0; j < nz; ++j) {
    blk.a[j][{2 * j, 2 * j}] = 1.0;           // box - z_j >= 0
    blk.a[j][{2 * j + 1, 2 * j + 1}] = -1.0;  // box + z_j >= 0
  }
  return blk;
}

// Normalization of each constraint row / block for the phase-I margin.
double block_scale(const RawBlock& blk, int row) {
  double scale = 0.0;
  if (blk.diagonal) {
    scale = std::abs(blk.c(row, 0));
    for (const auto& [var, upper] : blk.a) {
      auto it = upper.find({row, row});
      if (it != upper.end()) scale = std::max(scale, std::abs(it->second));
    }
  } else {
    scale = blk.c.cwiseAbs().maxCoeff();
    for (const auto& [var, upper] : blk.a) {
      for (const auto& [pos, v] : upper) scale = std::max(scale, std::abs(v));
    }
  }
  return scale > 0.0 ? scale : 1.0;
}

}  // namespace

SolveReport solve(const ConicProgram& prog, const SolverOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SolveReport report;
  report.objective_value = std::numeric_limits<double>::quiet_NaN();
  auto finish_report = [&](SolveReport& r) -> SolveReport {
    r.solve_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  };

  const Reduction red = reduce_equalities(prog);
  if (!red.consistent) {
    report.status = SolveStatus::infeasible;
    report.message = "inconsistent equality constraints";
    return finish_report(report);
  }
  const std::vector<RawBlock> blocks = substitute(raw_blocks(prog), red);
  const int nz = red.identity ? prog.num_scalars() : static_cast<int>(red.basis.cols());

  VectorXd f = VectorXd::Zero(prog.num_scalars());
  for (const auto& [id, v] : prog.objective().terms()) f[id] += v;
  const VectorXd fz = red.identity ? f : VectorXd(red.basis.transpose() * f);

  auto to_values = [&](const VectorXd& z) {
    VectorXd y = red.identity ? z : VectorXd(red.offset + red.basis * z);
    return std::vector<double>(y.data(), y.data() + y.size());
  };

  if (nz == 0) {
    report.values = to_values(VectorXd::Zero(0));
    const double viol = prog.max_violation(report.values);
    report.primal_residual = viol;
    if (viol <= options.tol) {
      report.status = SolveStatus::optimal;
      report.objective_value = prog.objective().evaluate(report.values);
    } else {
      report.status = SolveStatus::infeasible;
      report.message = "equalities fix every scalar and the point violates a constraint";
    }
    return finish_report(report);
  }

  detail::IpmSettings settings;
  settings.tol = options.tol;
  settings.max_iterations = options.max_iterations;
  settings.verbose = options.verbose;

  // Phase I: minimize s subject to every constraint relaxed by s * scale,
  // with s >= -1. A negative optimum certifies strict feasibility.
  VectorXd warm;
  bool have_warm = false;
  if (!blocks.empty()) {
    StandardForm p1;
    p1.m = nz + 1;
    const int s_var = nz;
    double s0 = 0.0;
    for (const RawBlock& raw : blocks) {
      Block blk = finish(raw);
      std::vector<Entry> relax;
      if (raw.diagonal) {
        for (int r = 0; r < raw.dim; ++r) {
          const double w = block_scale(raw, r);
          relax.push_back({r, r, -w});
          s0 = std::max(s0, -raw.c(r, 0) / w);
        }
      } else {
        const double w = block_scale(raw, 0);
        for (int r = 0; r < raw.dim; ++r) relax.push_back({r, r, -w});
        const double lmin = Eigen::SelfAdjointEigenSolver<MatrixXd>(raw.c, Eigen::EigenvaluesOnly).eigenvalues()(0);
        s0 = std::max(s0, -lmin / w);
      }
      blk.vars.emplace_back(s_var, std::move(relax));
      p1.blocks.push_back(std::move(blk));
    }
    s0 += 1.0;
    RawBlock box = box_block(nz, options.box);
    box.dim += 2;
    box.c.conservativeResize(box.dim, 1);
    box.c(box.dim - 2, 0) = std::max(options.box, 10.0 * s0);  // s <= box
    box.c(box.dim - 1, 0) = 1.0;                               // s >= -1
    box.a[s_var][{box.dim - 2, box.dim - 2}] = 1.0;
    box.a[s_var][{box.dim - 1, box.dim - 1}] = -1.0;
    Block box_blk = finish(box);
    box_blk.artificial = true;
    p1.blocks.push_back(std::move(box_blk));
    p1.b = VectorXd::Zero(p1.m);
    p1.b[s_var] = -1.0;

    VectorXd y0 = VectorXd::Zero(p1.m);
    y0[s_var] = s0;
    constexpr double kExitMargin = 0.1;
    const auto phase1 = detail::run_ipm(p1, settings, &y0, [&](const VectorXd& y) { return y[s_var] < -kExitMargin; });
    report.iterations += phase1.iterations;
    const double s_final = phase1.state.y[s_var];
    report.feasibility_margin = s_final;
    if (phase1.converged && s_final > options.infeasibility_margin) {
      report.status = SolveStatus::infeasible;
      report.message = "phase I optimum " + std::to_string(s_final) + " > 0";
      return finish_report(report);
    }
    if (s_final < 0.0) {
      warm = phase1.state.y.head(nz);
      have_warm = true;
    }
  }

  // Phase II.
  StandardForm p2;
  p2.m = nz;
  for (const RawBlock& raw : blocks) p2.blocks.push_back(finish(raw));
  Block box_blk = finish(box_block(nz, options.box));
  box_blk.artificial = true;
  p2.blocks.push_back(std::move(box_blk));
  p2.b = -fz;

  if (have_warm) {
    const auto slack = detail::dual_slack(p2, warm);
    for (std::size_t b = 0; b < slack.size() && have_warm; ++b) {
      if (p2.blocks[b].diagonal) {
        have_warm = slack[b].minCoeff() > 0.0;
      } else {
        have_warm = Eigen::LLT<MatrixXd>(slack[b]).info() == Eigen::Success;
      }
    }
  }
  const auto phase2 = detail::run_ipm(p2, settings, have_warm ? &warm : nullptr);
  report.iterations += phase2.iterations;
  report.values = to_values(phase2.state.y);
  report.primal_residual = phase2.dual_infeasibility;
  report.dual_residual = phase2.primal_infeasibility;
  report.relative_gap = phase2.relative_gap;

  if (!phase2.converged) {
    report.status = SolveStatus::numerical_failure;
    report.message = "phase II: " + phase2.message;
    return finish_report(report);
  }
  if (phase2.state.y.cwiseAbs().maxCoeff() > 0.999 * options.box) {
    report.status = SolveStatus::unbounded;
    report.message = "optimum lies on the artificial box";
    return finish_report(report);
  }
  report.status = SolveStatus::optimal;
  if (phase2.reduced_accuracy) report.message = "reduced accuracy after " + phase2.message;
  report.objective_value = prog.objective().evaluate(report.values);
  return finish_report(report);
}

// --------------------------------------------------------- hermitian_embed

MatrixXd hermitian_embed(const MatrixXcd& h, double tol) {
  if (h.rows() != h.cols()) throw ContractViolation("hermitian_embed: matrix is not square");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > tol * scale) {
    throw ContractViolation("hermitian_embed: matrix is not Hermitian");
  }
  const int n = static_cast<int>(h.rows());
  MatrixXd out(2 * n, 2 * n);
  const MatrixXd re = h.real();
  const MatrixXd im = h.imag();
  out.topLeftCorner(n, n) = re;
  out.topRightCorner(n, n) = -im;
  out.bottomLeftCorner(n, n) = im;
  out.bottomRightCorner(n, n) = re;
  return out;
}

}  // namespace mafd::conic
