#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "mafd/channel.hpp"

namespace mafd {

struct ZfBank {
  std::vector<Eigen::VectorXcd> b;  // b_j, N each
  double condition_number = 1.0;    // of L^H L

  Eigen::MatrixXcd outer(int j) const { return b[j] * b[j].adjoint(); }  // B_j
};

/// Condition number of L^H L above which zf_bank refuses to build a receiver.
inline constexpr double kMaxGramCondition = 1e12;

/// b_j = (z_j (L^H L)^{-1} L^H)^H. Throws SingularityError when L^H L is
/// numerically singular.
ZfBank zf_bank(const ChannelSet& channels);

/// Q_j = H^H diag(|b_j|^2) H, so that S_j = rho * sum_k Tr(W_k Q_j).
Eigen::MatrixXcd si_coupling(const ZfBank& zf, const Eigen::MatrixXcd& h_si, int j);

/// S_j = rho * Tr{B_j diag(sum_k H W_k H^H)}.
double residual_si(const ZfBank& zf, const Eigen::MatrixXcd& h_si, std::span<const Eigen::MatrixXcd> w, double rho, int j);

/// UL SINR with the full trace expression (cross terms Tr{L_i B_j} kept).
double ul_sinr(const ZfBank& zf, const ChannelSet& channels, std::span<const double> p,
               std::span<const Eigen::MatrixXcd> w, double rho, double noise, int j);

/// DL SINR at the CCI realization `c_k` (J entries).
double dl_sinr(const ChannelSet& channels, std::span<const Eigen::MatrixXcd> w, const Eigen::VectorXcd& c_k,
               std::span<const double> p, double noise, int k);

/// Minimum sampled DL rate over ||dc|| <= eps: `samples` uniform draws in the
/// 2J-dimensional ball plus 2J boundary probes (+/- c^/||c^|| and
/// +/- the per-entry phase-aligned unit vectors), all scaled to radius eps.
double worst_case_dl_rate(const ChannelSet& channels, std::span<const Eigen::MatrixXcd> w, const Eigen::VectorXcd& c_hat,
                          double eps, std::span<const double> p, double noise, int k, int samples, std::uint64_t seed);

struct LinkRates {
  std::vector<double> ul_sinr, dl_sinr;
  std::vector<double> ul_rate, dl_rate;  // log2(1 + sinr)
};

LinkRates link_rates(const ZfBank& zf, const ChannelSet& channels, std::span<const double> p,
                     std::span<const Eigen::MatrixXcd> w, double rho, double ul_noise,
                     std::span<const double> dl_noise, std::span<const Eigen::VectorXcd> cci);

}  // namespace mafd
