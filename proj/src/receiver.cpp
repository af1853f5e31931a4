#include "mafd/receiver.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "mafd/errors.hpp"

namespace mafd {

ZfBank zf_bank(const ChannelSet& channels) {
  const Eigen::MatrixXcd l = channels.ul_matrix();
  if (l.cols() == 0) throw ContractViolation("zf_bank: no UL channels");
  if (l.rows() < l.cols()) {
    throw SingularityError("zf_bank: fewer receive antennas than UL UTs", std::numeric_limits<double>::infinity());
  }
  const Eigen::MatrixXcd gram = l.adjoint() * l;
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(gram, Eigen::EigenvaluesOnly).eigenvalues();
  const double cond = ev(0) > 0.0 ? ev(ev.size() - 1) / ev(0) : std::numeric_limits<double>::infinity();
  if (!(cond <= kMaxGramCondition)) {
    std::ostringstream msg;
    msg << "zf_bank: L^H L is singular (condition number " << cond << ")";
    throw SingularityError(msg.str(), cond);
  }
  const Eigen::MatrixXcd pinv_h = l * gram.ldlt().solve(Eigen::MatrixXcd::Identity(l.cols(), l.cols()));
  ZfBank zf;
  zf.condition_number = cond;
  for (int j = 0; j < l.cols(); ++j) zf.b.push_back(pinv_h.col(j));
  return zf;
}

Eigen::MatrixXcd si_coupling(const ZfBank& zf, const Eigen::MatrixXcd& h_si, int j) {
  const Eigen::VectorXd weight = zf.b[j].cwiseAbs2();
  return h_si.adjoint() * weight.asDiagonal() * h_si;
}

double residual_si(const ZfBank& zf, const Eigen::MatrixXcd& h_si, std::span<const Eigen::MatrixXcd> w, double rho, int j) {
  if (rho == 0.0 || w.empty()) return 0.0;
  Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(h_si.cols(), h_si.cols());
  for (const auto& wk : w) cov += wk;
  const Eigen::VectorXd weight = zf.b[j].cwiseAbs2();
  double acc = 0.0;
  for (int n = 0; n < h_si.rows(); ++n) {
    const Eigen::RowVectorXcd row = h_si.row(n);
    acc += weight[n] * (row * cov * row.adjoint())(0, 0).real();
  }
  return rho * acc;
}

double ul_sinr(const ZfBank& zf, const ChannelSet& channels, std::span<const double> p, std::span<const Eigen::MatrixXcd> w,
               double rho, double noise, int j) {
  const Eigen::VectorXcd& bj = zf.b[j];
  double interference = 0.0;
  for (std::size_t i = 0; i < channels.ul.size(); ++i) {
    if (static_cast<int>(i) == j) continue;
    interference += std::norm(bj.dot(channels.ul[i])) * p[i];
  }
  const double signal = std::norm(bj.dot(channels.ul[j])) * p[j];
  return signal / (interference + residual_si(zf, channels.h_si, w, rho, j) + bj.squaredNorm() * noise);
}

double dl_sinr(const ChannelSet& channels, std::span<const Eigen::MatrixXcd> w, const Eigen::VectorXcd& c_k,
               std::span<const double> p, double noise, int k) {
  const Eigen::VectorXcd& h = channels.dl[k];
  auto received = [&h](const Eigen::MatrixXcd& wi) { return (h.adjoint() * wi * h)(0, 0).real(); };
  double interference = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (static_cast<int>(i) != k) interference += received(w[i]);
  }
  double cci = 0.0;
  for (int j = 0; j < c_k.size(); ++j) cci += std::norm(c_k[j]) * p[j];
  return received(w[k]) / (interference + cci + noise);
}

double worst_case_dl_rate(const ChannelSet& channels, std::span<const Eigen::MatrixXcd> w, const Eigen::VectorXcd& c_hat,
                          double eps, std::span<const double> p, double noise, int k, int samples, std::uint64_t seed) {
  if (samples < 1) throw ContractViolation("worst_case_dl_rate: samples must be >= 1");
  auto rate = [&](const Eigen::VectorXcd& c) { return std::log2(1.0 + dl_sinr(channels, w, c, p, noise, k)); };
  double worst = rate(c_hat);
  if (eps <= 0.0) return worst;

  const int J = static_cast<int>(c_hat.size());
  const double norm = c_hat.norm();
  if (norm > 0.0) {
    worst = std::min(worst, rate(c_hat + (eps / norm) * c_hat));
    worst = std::min(worst, rate(c_hat - (eps / norm) * c_hat));
  }
  for (int j = 0; j < J; ++j) {
    const std::complex<double> dir = std::abs(c_hat[j]) > 0.0 ? c_hat[j] / std::abs(c_hat[j]) : 1.0;
    for (double sign : {1.0, -1.0}) {
      Eigen::VectorXcd c = c_hat;
      c[j] += sign * eps * dir;
      worst = std::min(worst, rate(c));
    }
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXcd d(J);
    for (int j = 0; j < J; ++j) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      d[j] = {re, im};
    }
    const double radius = eps * std::pow(unit(rng), 1.0 / (2.0 * J));
    const double dn = d.norm();
    if (dn == 0.0) continue;
    worst = std::min(worst, rate(c_hat + (radius / dn) * d));
  }
  return worst;
}

LinkRates link_rates(const ZfBank& zf, const ChannelSet& channels, std::span<const double> p,
                     std::span<const Eigen::MatrixXcd> w, double rho, double ul_noise, std::span<const double> dl_noise,
                     std::span<const Eigen::VectorXcd> cci) {
  LinkRates r;
  for (std::size_t j = 0; j < channels.ul.size(); ++j) {
    r.ul_sinr.push_back(ul_sinr(zf, channels, p, w, rho, ul_noise, static_cast<int>(j)));
    r.ul_rate.push_back(std::log2(1.0 + r.ul_sinr.back()));
  }
  for (std::size_t k = 0; k < channels.dl.size(); ++k) {
    r.dl_sinr.push_back(dl_sinr(channels, w, cci[k], p, dl_noise[k], static_cast<int>(k)));
    r.dl_rate.push_back(std::log2(1.0 + r.dl_sinr.back()));
  }
  return r;
}

}  // namespace mafd
