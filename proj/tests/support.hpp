#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <vector>

#include "mafd/channel.hpp"
#include "mafd/scenario.hpp"

namespace testing {

using cd = std::complex<double>;

inline Eigen::MatrixXcd random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXcd m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = cd(n(rng), n(rng));
  return m;
}

inline Eigen::VectorXcd random_vector(int n, std::mt19937_64& rng) { return random_matrix(n, 1, rng).col(0); }

// A A^H for a random n x rank A.
inline Eigen::MatrixXcd random_psd(int n, int rank, std::mt19937_64& rng) {
  const Eigen::MatrixXcd a = random_matrix(n, rank, rng);
  return a * a.adjoint();
}

inline mafd::PathAngles random_angles(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> a(0.0, 3.14159265358979323846);
  return {a(rng), a(rng)};
}

// Positions uniform in [-A/2, A/2]^2 with no spacing guarantee.
inline mafd::AntennaLayout random_layout(const mafd::SystemConfig& c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> tx(-c.region_size_tx / 2, c.region_size_tx / 2);
  std::uniform_real_distribution<double> rx(-c.region_size_rx / 2, c.region_size_rx / 2);
  mafd::AntennaLayout l;
  l.tx.resize(2, c.num_tx_antennas);
  l.rx.resize(2, c.num_rx_antennas);
  for (int m = 0; m < c.num_tx_antennas; ++m) l.tx.col(m) = Eigen::Vector2d(tx(rng), tx(rng));
  for (int n = 0; n < c.num_rx_antennas; ++n) l.rx.col(n) = Eigen::Vector2d(rx(rng), rx(rng));
  return l;
}

inline double rel_diff(cd a, cd b) { return std::abs(a - b) / std::max(1e-300, std::max(std::abs(a), std::abs(b))); }

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(1e-300, std::max(std::abs(a), std::abs(b)));
}

// exp(j 2 pi / lambda (x sin(theta) cos(phi) + y cos(theta))) in long double.
inline cd scalar_response(double x, double y, const mafd::PathAngles& a, double lambda) {
  const long double pi = 3.141592653589793238462643383279502884L;
  const long double d = static_cast<long double>(x) * std::sin(static_cast<long double>(a.elevation)) *
                            std::cos(static_cast<long double>(a.azimuth)) +
                        static_cast<long double>(y) * std::cos(static_cast<long double>(a.elevation));
  const long double phase = 2.0L * pi / static_cast<long double>(lambda) * d;
  return {static_cast<double>(std::cos(phase)), static_cast<double>(std::sin(phase))};
}

// Independent UL SINR: scalar sums over antennas.
inline double ul_sinr_oracle(const mafd::ChannelSet& ch, const Eigen::VectorXcd& b, const std::vector<double>& p,
                             const std::vector<Eigen::MatrixXcd>& w, double rho, double noise, int j) {
  const int N = static_cast<int>(b.size());
  auto gain = [&](int i) {
    cd acc = 0.0;
    for (int n = 0; n < N; ++n) acc += std::conj(b(n)) * ch.ul[i](n);
    return std::norm(acc);
  };
  double si = 0.0;
  for (int n = 0; n < N; ++n) {
    double diag = 0.0;
    for (const auto& wk : w) {
      cd acc = 0.0;
      for (int a = 0; a < wk.rows(); ++a)
        for (int c = 0; c < wk.cols(); ++c) acc += ch.h_si(n, a) * wk(a, c) * std::conj(ch.h_si(n, c));
      diag += acc.real();
    }
    si += std::norm(b(n)) * rho * diag;
  }
  double bb = 0.0;
  for (int n = 0; n < N; ++n) bb += std::norm(b(n));
  double interference = 0.0;
  for (int i = 0; i < static_cast<int>(ch.ul.size()); ++i)
    if (i != j) interference += gain(i) * p[i];
  return gain(j) * p[j] / (interference + si + bb * noise);
}

inline double quad(const Eigen::VectorXcd& h, const Eigen::MatrixXcd& w) {
  cd acc = 0.0;
  for (int a = 0; a < h.size(); ++a)
    for (int c = 0; c < h.size(); ++c) acc += std::conj(h(a)) * w(a, c) * h(c);
  return acc.real();
}

}  // namespace testing
