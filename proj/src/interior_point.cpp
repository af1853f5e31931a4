#include "interior_point.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <tuple>

namespace mafd::conic::detail {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

MatrixXd zeros_like(const Block& blk) {
  return blk.diagonal ? MatrixXd::Zero(blk.dim, 1) : MatrixXd::Zero(blk.dim, blk.dim);
}

double inner(const MatrixXd& a, const MatrixXd& b) { return (a.array() * b.array()).sum(); }

MatrixXd apply_adjoint(const Block& blk, const VectorXd& y) {
  MatrixXd out = zeros_like(blk);
  for (const auto& [var, entries] : blk.vars) {
    const double yi = y[var];
    if (yi == 0.0) continue;
    if (blk.diagonal) {
      for (const Entry& e : entries) out(e.row, 0) += yi * e.value;
    } else {
      for (const Entry& e : entries) out(e.row, e.col) += yi * e.value;
    }
  }
  return out;
}

// out_i += <A_i, Z> for the variables of this block (Z need not be symmetric).
void accumulate_operator(const Block& blk, const MatrixXd& z, VectorXd& out) {
  for (const auto& [var, entries] : blk.vars) {
    double acc = 0.0;
    if (blk.diagonal) {
      for (const Entry& e : entries) acc += e.value * z(e.row, 0);
    } else {
      for (const Entry& e : entries) acc += e.value * z(e.row, e.col);
    }
    out[var] += acc;
  }
}

// Largest alpha with x + alpha * dx still PSD (infinity if unrestricted).
double max_step(const Block& blk, const MatrixXd& x, const MatrixXd& dx) {
  if (blk.diagonal) {
    double alpha = kInf;
    for (int r = 0; r < blk.dim; ++r) {
      if (dx(r, 0) < 0.0) alpha = std::min(alpha, -x(r, 0) / dx(r, 0));
    }
    return alpha;
  }
  Eigen::LLT<MatrixXd> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  MatrixXd u = llt.matrixL().solve(dx);
  MatrixXd t = llt.matrixL().solve(u.transpose());
  t = 0.5 * (t + t.transpose());
  const double lmin = Eigen::SelfAdjointEigenSolver<MatrixXd>(t, Eigen::EigenvaluesOnly).eigenvalues()(0);
  return lmin >= 0.0 ? kInf : -1.0 / lmin;
}

struct RowTerm {
  int var;
  double value;
};

// Row-wise view of diagonal blocks for the Schur complement.
std::vector<std::vector<std::vector<RowTerm>>> diagonal_rows(const StandardForm& form) {
  std::vector<std::vector<std::vector<RowTerm>>> rows(form.blocks.size());
  for (std::size_t b = 0; b < form.blocks.size(); ++b) {
    const Block& blk = form.blocks[b];
    if (!blk.diagonal) continue;
    rows[b].resize(blk.dim);
    for (const auto& [var, entries] : blk.vars) {
      for (const Entry& e : entries) rows[b][e.row].push_back({var, e.value});
    }
  }
  return rows;
}

// Variables of a dense block whose coefficient matrices are multiples of one
// shared pattern. Their Schur entries differ only by the product of scales.
struct Group {
  std::vector<Entry> pattern;
  std::vector<RowTerm> members;  // var, scale
};

std::vector<std::vector<Group>> dense_groups(const StandardForm& form) {
  std::vector<std::vector<Group>> out(form.blocks.size());
  for (std::size_t b = 0; b < form.blocks.size(); ++b) {
    const Block& blk = form.blocks[b];
    if (blk.diagonal) continue;
    std::map<std::vector<std::tuple<int, int, double>>, int> index;
    for (const auto& [var, entries] : blk.vars) {
      const double lead = entries.front().value;
      std::vector<std::tuple<int, int, double>> key;
      key.reserve(entries.size());
      for (const Entry& e : entries) key.emplace_back(e.row, e.col, e.value / lead);
      auto [it, inserted] = index.emplace(std::move(key), static_cast<int>(out[b].size()));
      if (inserted) {
        Group g;
        for (const Entry& e : entries) g.pattern.push_back({e.row, e.col, e.value / lead});
        out[b].push_back(std::move(g));
      }
      out[b][it->second].members.push_back({var, lead});
    }
  }
  return out;
}

struct Direction {
  VectorXd dy;
  std::vector<MatrixXd> dx;
  std::vector<MatrixXd> ds;
};

class Solver {
 public:
  Solver(const StandardForm& form, const IpmSettings& settings)
      : form_(form), settings_(settings), rows_(diagonal_rows(form)), groups_(dense_groups(form)) {
    total_dim_ = 0;
    c_norm_ = 0.0;
    for (const Block& blk : form_.blocks) {
      total_dim_ += blk.dim;
      if (!blk.artificial) c_norm_ += blk.c.squaredNorm();
    }
    c_norm_ = std::sqrt(c_norm_);
    b_norm_ = form_.b.norm();
  }

  IpmResult run(const VectorXd* dual_start, const EarlyExit& early_exit) {
    IpmResult result;
    initialize(dual_start);
    const int nb = static_cast<int>(form_.blocks.size());

    IpmResult best;
    IpmState best_state;
    double best_error = std::numeric_limits<double>::infinity();

    for (int iter = 0;; ++iter) {
      residuals();
      result.iterations = iter;
      result.primal_infeasibility = pinf_;
      result.dual_infeasibility = dinf_;
      result.relative_gap = gap_;
      result.primal_objective = pobj_;
      result.dual_objective = dobj_;
      const double error = std::max({pinf_, dinf_, gap_});
      if (std::isfinite(error) && error < best_error) {
        best_error = error;
        best = result;
        best_state = {y_, x_, s_};
      }
      if (settings_.verbose) {
        std::fprintf(stderr, "ipm %3d  pobj % .10e  dobj % .10e  pinf %.2e  dinf %.2e  gap %.2e  mu %.2e\n", iter,
                     pobj_, dobj_, pinf_, dinf_, gap_, mu_);
      }
      if (!std::isfinite(pobj_) || !std::isfinite(dobj_) || !std::isfinite(mu_)) {
        result.message = "non-finite iterate";
        break;
      }
      if (pinf_ <= settings_.tol && dinf_ <= settings_.tol && gap_ <= settings_.tol) {
        result.converged = true;
        break;
      }
      if (iter >= settings_.max_iterations) {
        result.message = "iteration limit";
        break;
      }
      if (!factor()) {
        result.message = "Schur complement factorization failed";
        break;
      }

      // Predictor.
      std::vector<MatrixXd> rc(nb);
      for (int b = 0; b < nb; ++b) rc[b] = complementarity_residual(b, 0.0, nullptr);
      Direction affine = direction(rc);
      const double ap_aff = std::min(1.0, step_length(x_, affine.dx));
      const double ad_aff = std::min(1.0, step_length(s_, affine.ds));
      double mu_aff = 0.0;
      for (int b = 0; b < nb; ++b) {
        mu_aff += inner(x_[b] + ap_aff * affine.dx[b], s_[b] + ad_aff * affine.ds[b]);
      }
      mu_aff /= total_dim_;
      const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu_, 3.0), 0.0, 1.0);

      // Corrector.
      for (int b = 0; b < nb; ++b) rc[b] = complementarity_residual(b, sigma * mu_, &affine);
      Direction step = direction(rc);
      const double ap = std::min(1.0, settings_.step_fraction * step_length(x_, step.dx));
      const double ad = std::min(1.0, settings_.step_fraction * step_length(s_, step.ds));
      if (ap < 1e-12 && ad < 1e-12) {
        result.message = "step length stall";
        break;
      }
      for (int b = 0; b < nb; ++b) {
        x_[b] += ap * step.dx[b];
        s_[b] += ad * step.ds[b];
        if (!form_.blocks[b].diagonal) {
          x_[b] = 0.5 * (x_[b] + x_[b].transpose());
          s_[b] = 0.5 * (s_[b] + s_[b].transpose());
        }
      }
      y_ += ad * step.dy;

      if (early_exit && early_exit(y_)) {
        residuals();
        result.iterations = iter + 1;
        result.stopped_early = true;
        result.primal_infeasibility = pinf_;
        result.dual_infeasibility = dinf_;
        result.relative_gap = gap_;
        result.primal_objective = pobj_;
        result.dual_objective = dobj_;
        break;
      }
    }
    result.state = {y_, x_, s_};
    if (!result.converged && !result.stopped_early && best_error <= settings_.stall_acceptance * settings_.tol) {
      const int iterations = result.iterations;
      std::string message = std::move(result.message);
      result = best;
      result.iterations = iterations;
      result.message = std::move(message);
      result.state = std::move(best_state);
      result.converged = true;
      result.reduced_accuracy = true;
    }
    return result;
  }

 private:
  void initialize(const VectorXd* dual_start) {
    const int nb = static_cast<int>(form_.blocks.size());
    x_.assign(nb, MatrixXd());
    s_.assign(nb, MatrixXd());
    y_ = dual_start ? *dual_start : VectorXd::Zero(form_.m);
    std::vector<MatrixXd> slack;
    if (dual_start) slack = dual_slack(form_, y_);

    double mu_sum = 0.0;
    int mu_dim = 0;
    for (int b = 0; b < nb; ++b) {
      const Block& blk = form_.blocks[b];
      if (blk.artificial) continue;
      const double n = blk.dim;
      double a_max = 0.0;
      double xi_scale = 0.0;
      for (const auto& [var, entries] : blk.vars) {
        double norm = 0.0;
        for (const Entry& e : entries) norm += e.value * e.value;
        norm = std::sqrt(norm);
        a_max = std::max(a_max, norm);
        xi_scale = std::max(xi_scale, (1.0 + std::abs(form_.b[var])) / (1.0 + norm));
      }
      const double xi = std::max({10.0, std::sqrt(n), n * xi_scale});
      const double eta = std::max({10.0, std::sqrt(n), blk.c.norm(), a_max});
      if (blk.diagonal) {
        x_[b] = MatrixXd::Constant(blk.dim, 1, xi);
        s_[b] = dual_start ? slack[b] : MatrixXd::Constant(blk.dim, 1, eta);
        continue;
      }
      x_[b] = xi * MatrixXd::Identity(blk.dim, blk.dim);
      s_[b] = dual_start ? slack[b] : eta * MatrixXd::Identity(blk.dim, blk.dim);
      mu_sum += inner(x_[b], s_[b]);
      mu_dim += blk.dim;
    }
    // Diagonal rows start centered at the mean complementarity of the dense
    // blocks, so that rows with large constants do not inflate mu.
    double mu_target = mu_dim > 0 ? mu_sum / mu_dim : 0.0;
    if (mu_dim == 0) {
      for (int b = 0; b < nb; ++b) {
        if (form_.blocks[b].artificial) continue;
        mu_sum += inner(x_[b], s_[b]);
        mu_dim += form_.blocks[b].dim;
      }
      mu_target = mu_dim > 0 ? mu_sum / mu_dim : 1.0;
    }
    for (int b = 0; b < nb; ++b) {
      const Block& blk = form_.blocks[b];
      if (!blk.diagonal) continue;
      if (blk.artificial) s_[b] = dual_start ? slack[b] : blk.c - apply_adjoint(blk, y_);
      x_[b] = MatrixXd(blk.dim, 1);
      for (int r = 0; r < blk.dim; ++r) x_[b](r, 0) = mu_target / std::max(s_[b](r, 0), 1e-300);
    }
  }

  void residuals() {
    const int nb = static_cast<int>(form_.blocks.size());
    VectorXd ax = VectorXd::Zero(form_.m);
    double rd_sq = 0.0;
    pobj_ = 0.0;
    double xs = 0.0;
    rd_.assign(nb, MatrixXd());
    for (int b = 0; b < nb; ++b) {
      const Block& blk = form_.blocks[b];
      accumulate_operator(blk, x_[b], ax);
      rd_[b] = blk.c - apply_adjoint(blk, y_) - s_[b];
      rd_sq += rd_[b].squaredNorm();
      pobj_ += inner(blk.c, x_[b]);
      xs += inner(x_[b], s_[b]);
    }
    rp_ = form_.b - ax;
    dobj_ = form_.b.dot(y_);
    mu_ = xs / total_dim_;
    pinf_ = rp_.norm() / (1.0 + b_norm_);
    dinf_ = std::sqrt(rd_sq) / (1.0 + c_norm_);
    gap_ = std::abs(pobj_ - dobj_) / (1.0 + std::abs(pobj_) + std::abs(dobj_));
  }

  bool factor() {
    const int nb = static_cast<int>(form_.blocks.size());
    sinv_.assign(nb, MatrixXd());
    MatrixXd schur = MatrixXd::Zero(form_.m, form_.m);
    for (int b = 0; b < nb; ++b) {
      const Block& blk = form_.blocks[b];
      if (blk.diagonal) {
        sinv_[b] = s_[b].cwiseInverse();
        for (int r = 0; r < blk.dim; ++r) {
          const double d = x_[b](r, 0) * sinv_[b](r, 0);
          const auto& row = rows_[b][r];
          for (std::size_t p = 0; p < row.size(); ++p) {
            const double vp = d * row[p].value;
            schur(row[p].var, row[p].var) += vp * row[p].value;
            for (std::size_t q = p + 1; q < row.size(); ++q) {
              const double v = vp * row[q].value;
              schur(row[p].var, row[q].var) += v;
              schur(row[q].var, row[p].var) += v;
            }
          }
        }
        continue;
      }
      Eigen::LLT<MatrixXd> llt(s_[b]);
      if (llt.info() != Eigen::Success) return false;
      sinv_[b] = llt.solve(MatrixXd::Identity(blk.dim, blk.dim));
      const MatrixXd& xb = x_[b];
      const MatrixXd& si = sinv_[b];
      const auto& groups = groups_[b];
      for (std::size_t g = 0; g < groups.size(); ++g) {
        const Group& gi = groups[g];
        for (std::size_t h = g; h < groups.size(); ++h) {
          const Group& gj = groups[h];
          double acc = 0.0;
          for (const Entry& e : gi.pattern) {
            for (const Entry& f : gj.pattern) acc += e.value * f.value * xb(e.col, f.row) * si(f.col, e.row);
          }
          if (acc == 0.0) continue;
          for (const RowTerm& u : gi.members) {
            const double au = acc * u.value;
            for (const RowTerm& v : gj.members) {
              const double val = au * v.value;
              schur(u.var, v.var) += val;
              if (g != h) schur(v.var, u.var) += val;
            }
          }
        }
      }
    }
    schur = 0.5 * (schur + schur.transpose());
    schur_llt_.compute(schur);
    if (schur_llt_.info() == Eigen::Success) return true;
    const double scale = std::max(schur.diagonal().cwiseAbs().maxCoeff(), 1e-300);
    for (double ridge = 1e-14; ridge <= 1e-6; ridge *= 100.0) {
      MatrixXd regularized = schur;
      regularized.diagonal().array() += ridge * scale;
      schur_llt_.compute(regularized);
      if (schur_llt_.info() == Eigen::Success) return true;
    }
    return false;
  }

  // sigma_mu I - X S  (minus dXa dSa when a predictor direction is supplied).
  MatrixXd complementarity_residual(int b, double sigma_mu, const Direction* affine) const {
    const Block& blk = form_.blocks[b];
    if (blk.diagonal) {
      MatrixXd rc = (-x_[b].array() * s_[b].array()).matrix();
      rc.array() += sigma_mu;
      if (affine) rc.array() -= affine->dx[b].array() * affine->ds[b].array();
      return rc;
    }
    MatrixXd rc = -x_[b] * s_[b];
    rc.diagonal().array() += sigma_mu;
    if (affine) rc -= affine->dx[b] * affine->ds[b];
    return rc;
  }

  Direction direction(const std::vector<MatrixXd>& rc) const {
    const int nb = static_cast<int>(form_.blocks.size());
    VectorXd rhs = rp_;
    VectorXd correction = VectorXd::Zero(form_.m);
    for (int b = 0; b < nb; ++b) {
      const Block& blk = form_.blocks[b];
      MatrixXd z;
      if (blk.diagonal) {
        z = ((rc[b].array() - x_[b].array() * rd_[b].array()) * sinv_[b].array()).matrix();
      } else {
        z = (rc[b] - x_[b] * rd_[b]) * sinv_[b];
      }
      accumulate_operator(blk, z, correction);
    }
    rhs -= correction;

    Direction d;
    d.dy = schur_llt_.solve(rhs);
    d.dx.resize(nb);
    d.ds.resize(nb);
    for (int b = 0; b < nb; ++b) {
      const Block& blk = form_.blocks[b];
      d.ds[b] = rd_[b] - apply_adjoint(blk, d.dy);
      if (blk.diagonal) {
        d.dx[b] = ((rc[b].array() - x_[b].array() * d.ds[b].array()) * sinv_[b].array()).matrix();
      } else {
        MatrixXd dx = (rc[b] - x_[b] * d.ds[b]) * sinv_[b];
        d.dx[b] = 0.5 * (dx + dx.transpose());
      }
    }
    return d;
  }

  double step_length(const std::vector<MatrixXd>& current, const std::vector<MatrixXd>& delta) const {
    double alpha = kInf;
    for (std::size_t b = 0; b < form_.blocks.size(); ++b) {
      alpha = std::min(alpha, max_step(form_.blocks[b], current[b], delta[b]));
    }
    return alpha;
  }

  const StandardForm& form_;
  IpmSettings settings_;
  std::vector<std::vector<std::vector<RowTerm>>> rows_;
  std::vector<std::vector<Group>> groups_;
  int total_dim_ = 0;
  double c_norm_ = 0.0;
  double b_norm_ = 0.0;

  VectorXd y_;
  std::vector<MatrixXd> x_, s_, sinv_, rd_;
  VectorXd rp_;
  Eigen::LLT<MatrixXd> schur_llt_;
  double pobj_ = 0.0, dobj_ = 0.0, mu_ = 0.0, pinf_ = 0.0, dinf_ = 0.0, gap_ = 0.0;
};

}  // namespace

std::vector<MatrixXd> dual_slack(const StandardForm& form, const VectorXd& y) {
  std::vector<MatrixXd> out;
  out.reserve(form.blocks.size());
  for (const Block& blk : form.blocks) out.push_back(blk.c - apply_adjoint(blk, y));
  return out;
}

IpmResult run_ipm(const StandardForm& form, const IpmSettings& settings, const VectorXd* dual_start,
                  const EarlyExit& early_exit) {
  Solver solver(form, settings);
  return solver.run(dual_start, early_exit);
}

}  // namespace mafd::conic::detail
