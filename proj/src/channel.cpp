#include "mafd/channel.hpp"

#include <cmath>
#include <limits>

#include "mafd/errors.hpp"
#include "mafd/units.hpp"

namespace mafd {

Eigen::VectorXd AntennaLayout::to_vector() const {
  Eigen::VectorXd u(2 * (tx.cols() + rx.cols()));
  u.head(2 * tx.cols()) = Eigen::Map<const Eigen::VectorXd>(tx.data(), 2 * tx.cols());
  u.tail(2 * rx.cols()) = Eigen::Map<const Eigen::VectorXd>(rx.data(), 2 * rx.cols());
  return u;
}

AntennaLayout AntennaLayout::from_vector(const Eigen::VectorXd& u, int num_tx, int num_rx) {
  if (u.size() != 2 * (num_tx + num_rx)) throw ContractViolation("layout vector has the wrong length");
  AntennaLayout layout;
  layout.tx = Eigen::Map<const Eigen::Matrix2Xd>(u.data(), 2, num_tx);
  layout.rx = Eigen::Map<const Eigen::Matrix2Xd>(u.data() + 2 * num_tx, 2, num_rx);
  return layout;
}

AntennaLayout AntennaLayout::origin(int num_tx, int num_rx) {
  return {Eigen::Matrix2Xd::Zero(2, num_tx), Eigen::Matrix2Xd::Zero(2, num_rx)};
}

bool AntennaLayout::within_regions(double region_tx, double region_rx, double slack) const {
  const double ht = 0.5 * region_tx * (1.0 + slack);
  const double hr = 0.5 * region_rx * (1.0 + slack);
  return tx.cwiseAbs().maxCoeff() <= ht && rx.cwiseAbs().maxCoeff() <= hr;
}

bool AntennaLayout::spacing_ok(double min_spacing) const {
  return min_pairwise_distance(tx) >= min_spacing && min_pairwise_distance(rx) >= min_spacing;
}

double min_pairwise_distance(const Eigen::Matrix2Xd& positions) {
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < positions.cols(); ++a) {
    for (int b = a + 1; b < positions.cols(); ++b) best = std::min(best, (positions.col(a) - positions.col(b)).norm());
  }
  return best;
}

double path_delta(const Eigen::Vector2d& p, const PathAngles& a) {
  return p.x() * std::sin(a.elevation) * std::cos(a.azimuth) + p.y() * std::cos(a.elevation);
}

Eigen::VectorXcd field_response(const Eigen::Vector2d& position, std::span<const PathAngles> angles, double wavelength) {
  if (angles.empty()) throw ContractViolation("field_response: at least one path is required");
  Eigen::VectorXcd out(static_cast<Eigen::Index>(angles.size()));
  const double k0 = 2.0 * kPi / wavelength;
  for (std::size_t l = 0; l < angles.size(); ++l) out[l] = std::polar(1.0, k0 * path_delta(position, angles[l]));
  return out;
}

Eigen::MatrixXcd si_channel(const AntennaLayout& layout, const Scenario& s) {
  const double lambda = s.config.wavelength;
  Eigen::MatrixXcd g(s.si_tx_angles.size(), layout.num_tx());
  for (int m = 0; m < layout.num_tx(); ++m) g.col(m) = field_response(layout.tx.col(m), s.si_tx_angles, lambda);
  Eigen::MatrixXcd f(s.si_rx_angles.size(), layout.num_rx());
  for (int n = 0; n < layout.num_rx(); ++n) f.col(n) = field_response(layout.rx.col(n), s.si_rx_angles, lambda);
  return f.adjoint() * s.si_core * g;
}

Eigen::VectorXcd ul_channel(const AntennaLayout& layout, const Scenario& s, int j) {
  if (j < 0 || j >= static_cast<int>(s.ul_angles.size())) throw ContractViolation("ul_channel: UL UT index out of range");
  Eigen::VectorXcd l(layout.num_rx());
  const double k0 = 2.0 * kPi / s.config.wavelength;
  for (int n = 0; n < layout.num_rx(); ++n) {
    l[n] = s.ul_coeffs[j] * std::polar(1.0, k0 * path_delta(layout.rx.col(n), s.ul_angles[j]));
  }
  return l;
}

Eigen::VectorXcd dl_channel(const AntennaLayout& layout, const Scenario& s, int k) {
  if (k < 0 || k >= static_cast<int>(s.dl_angles.size())) throw ContractViolation("dl_channel: DL UT index out of range");
  Eigen::VectorXcd h(layout.num_tx());
  const double k0 = 2.0 * kPi / s.config.wavelength;
  for (int m = 0; m < layout.num_tx(); ++m) {
    h[m] = s.dl_coeffs[k] * std::polar(1.0, k0 * path_delta(layout.tx.col(m), s.dl_angles[k]));
  }
  return h;
}

Eigen::MatrixXcd ChannelSet::ul_matrix() const {
  if (ul.empty()) return {};
  Eigen::MatrixXcd l(ul.front().size(), static_cast<Eigen::Index>(ul.size()));
  for (std::size_t j = 0; j < ul.size(); ++j) l.col(j) = ul[j];
  return l;
}

ChannelSet assemble(const AntennaLayout& layout, const Scenario& s) {
  if (!layout.tx.allFinite() || !layout.rx.allFinite()) throw ContractViolation("assemble: non-finite antenna position");
  ChannelSet cs;
  cs.h_si = si_channel(layout, s);
  for (int j = 0; j < s.config.num_ul_uts; ++j) cs.ul.push_back(ul_channel(layout, s, j));
  for (int k = 0; k < s.config.num_dl_uts; ++k) cs.dl.push_back(dl_channel(layout, s, k));
  return cs;
}

}  // namespace mafd
