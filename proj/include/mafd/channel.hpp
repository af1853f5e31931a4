#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "mafd/scenario.hpp"

namespace mafd {

/// Antenna coordinates in meters. Both regions are centered at their local
/// origins and span [-A/2, A/2] on each axis.
struct AntennaLayout {
  Eigen::Matrix2Xd tx;  // 2 x M
  Eigen::Matrix2Xd rx;  // 2 x N

  int num_tx() const { return static_cast<int>(tx.cols()); }
  int num_rx() const { return static_cast<int>(rx.cols()); }

  /// Stacked [t; r] as a 2(M+N) vector (x then y per antenna).
  Eigen::VectorXd to_vector() const;
  static AntennaLayout from_vector(const Eigen::VectorXd& u, int num_tx, int num_rx);

  /// Every antenna at its region origin.
  static AntennaLayout origin(int num_tx, int num_rx);

  /// Constraint C4: every coordinate within its region.
  bool within_regions(double region_tx, double region_rx, double slack = 1e-12) const;
  /// Constraints C5/C6: every same-region pair at least `min_spacing` apart.
  bool spacing_ok(double min_spacing) const;

  bool operator==(const AntennaLayout& o) const { return tx == o.tx && rx == o.rx; }
};

/// Minimum pairwise distance among the columns of `positions` (infinity for
/// fewer than two columns).
double min_pairwise_distance(const Eigen::Matrix2Xd& positions);

/// x sin(theta) cos(phi) + y cos(theta).
double path_delta(const Eigen::Vector2d& position, const PathAngles& angles);

/// Element l is exp(j 2 pi / lambda * path_delta(position, angles[l])).
Eigen::VectorXcd field_response(const Eigen::Vector2d& position, std::span<const PathAngles> angles, double wavelength);

/// H_SI = F^H Sigma G with column m of G = g(t_m), column n of F = f(r_n).
Eigen::MatrixXcd si_channel(const AntennaLayout& layout, const Scenario& scenario);

/// l_j(r) = ell_j * [exp(j 2 pi / lambda * rho_UL,j(r_n))]_n. `j` is 0-based.
Eigen::VectorXcd ul_channel(const AntennaLayout& layout, const Scenario& scenario, int j);
/// h_k(t) = hbar_k * [exp(j 2 pi / lambda * rho_DL,k(t_m))]_m. `k` is 0-based.
Eigen::VectorXcd dl_channel(const AntennaLayout& layout, const Scenario& scenario, int k);

struct ChannelSet {
  Eigen::MatrixXcd h_si;             // N x M
  std::vector<Eigen::VectorXcd> ul;  // l_j, N each
  std::vector<Eigen::VectorXcd> dl;  // h_k, M each

  /// L = [l_1 ... l_J].
  Eigen::MatrixXcd ul_matrix() const;
};

ChannelSet assemble(const AntennaLayout& layout, const Scenario& scenario);

}  // namespace mafd
