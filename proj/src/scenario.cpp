#include "mafd/scenario.hpp"

#include <cmath>
#include <random>

#include "mafd/errors.hpp"
#include "mafd/units.hpp"

namespace mafd {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid configuration: " + what);
}

template <typename A, typename B>
bool same(const A& a, const B& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

bool in_range(const PathAngles& a) {
  return a.elevation >= 0.0 && a.elevation <= kPi && a.azimuth >= 0.0 && a.azimuth <= kPi;
}

}  // namespace

SystemConfig paper_config() {
  SystemConfig c;
  c.num_tx_antennas = 16;
  c.num_rx_antennas = 16;
  c.num_ul_uts = 6;
  c.num_dl_uts = 2;
  c.wavelength = wavelength_from_ghz(8.0);
  c.region_size_tx = 5.0 * c.wavelength;
  c.region_size_rx = 5.0 * c.wavelength;
  c.min_spacing = 0.5 * c.wavelength;
  c.si_paths_tx = 10;
  c.si_paths_rx = 10;
  c.si_loss = db_to_linear(-100.0);
  c.si_channel_gain = db_to_linear(-50.0);
  c.ul_noise = dbm_to_watts(-110.0);
  c.dl_noise.assign(c.num_dl_uts, dbm_to_watts(-100.0));
  c.ul_rate_threshold.assign(c.num_ul_uts, 0.5);
  c.dl_rate_threshold.assign(c.num_dl_uts, 1.0);
  c.sat_antenna_gain = db_to_linear(20.0);
  c.cci_error_fraction = 0.05;
  return c;
}

SystemConfig desk_config() {
  SystemConfig c = paper_config();
  c.num_tx_antennas = 8;
  c.num_rx_antennas = 8;
  c.num_ul_uts = 3;
  c.num_dl_uts = 2;
  c.dl_noise.assign(c.num_dl_uts, dbm_to_watts(-100.0));
  c.ul_rate_threshold.assign(c.num_ul_uts, 0.5);
  c.dl_rate_threshold.assign(c.num_dl_uts, 1.0);
  return c;
}

void validate(const SystemConfig& c) {
  require(c.num_tx_antennas >= 1, "num_tx_antennas >= 1");
  require(c.num_ul_uts >= 1, "num_ul_uts >= 1");
  require(c.num_dl_uts >= 1, "num_dl_uts >= 1");
  require(c.num_rx_antennas >= c.num_ul_uts, "num_rx_antennas >= num_ul_uts (ZF needs N >= J)");
  require(c.wavelength > 0.0 && std::isfinite(c.wavelength), "wavelength > 0");
  require(c.region_size_tx >= 0.0 && c.region_size_rx >= 0.0, "region sizes >= 0");
  require(c.min_spacing > 0.0, "min_spacing > 0");
  require(c.si_paths_tx >= 1 && c.si_paths_rx >= 1, "SI path counts >= 1");
  require(c.si_loss >= 0.0 && std::isfinite(c.si_loss), "si_loss >= 0");
  require(c.si_channel_gain > 0.0, "si_channel_gain > 0");
  require(c.ul_noise > 0.0, "ul_noise > 0");
  require(static_cast<int>(c.dl_noise.size()) == c.num_dl_uts, "one dl_noise value per DL UT");
  for (double v : c.dl_noise) require(v > 0.0, "dl_noise > 0");
  require(static_cast<int>(c.ul_rate_threshold.size()) == c.num_ul_uts, "one UL rate threshold per UL UT");
  require(static_cast<int>(c.dl_rate_threshold.size()) == c.num_dl_uts, "one DL rate threshold per DL UT");
  for (double v : c.ul_rate_threshold) require(v >= 0.0 && std::isfinite(v), "UL rate thresholds >= 0");
  for (double v : c.dl_rate_threshold) require(v > 0.0 && std::isfinite(v), "DL rate thresholds > 0");
  require(c.sat_antenna_gain > 0.0, "sat_antenna_gain > 0");
  require(c.cci_error_fraction >= 0.0 && std::isfinite(c.cci_error_fraction), "cci_error_fraction >= 0");
  require(c.weight_ul >= 0.0 && c.weight_dl >= 0.0, "weights >= 0");
  require(std::abs(c.weight_ul + c.weight_dl - 1.0) <= 1e-12, "weight_ul + weight_dl == 1");
  require(c.ref_ul > 0.0 && c.ref_dl > 0.0, "reference objectives > 0");
  require(c.altitude > 0.0, "altitude > 0");
  require(c.path_loss_exponent > 0.0, "path_loss_exponent > 0");
  require(c.ut_distance_min > 0.0 && c.ut_distance_min <= c.ut_distance_max, "0 < ut_distance_min <= ut_distance_max");
}

double Scenario::cci_radius(int k) const { return cci_radii.col(k).norm(); }

bool Scenario::operator==(const Scenario& o) const {
  return config == o.config && si_tx_angles == o.si_tx_angles && si_rx_angles == o.si_rx_angles &&
         same(si_core, o.si_core) && ul_angles == o.ul_angles && dl_angles == o.dl_angles &&
         same(ul_coeffs, o.ul_coeffs) && same(dl_coeffs, o.dl_coeffs) && same(cci_true, o.cci_true) &&
         same(cci_est, o.cci_est) && same(cci_radii, o.cci_radii);
}

Scenario generate(const SystemConfig& config) {
  validate(config);
  const int J = config.num_ul_uts;
  const int K = config.num_dl_uts;
  const int lt = config.si_paths_tx;
  const int lr = config.si_paths_rx;

  std::mt19937_64 rng(config.rng_seed);
  std::uniform_real_distribution<double> angle(0.0, kPi);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  auto draw_angles = [&](int n) {
    std::vector<PathAngles> out(n);
    for (auto& a : out) {
      a.elevation = angle(rng);
      a.azimuth = angle(rng);
    }
    return out;
  };

  Scenario s;
  s.config = config;
  s.si_tx_angles = draw_angles(lt);
  s.si_rx_angles = draw_angles(lr);
  const double sd = std::sqrt(config.si_channel_gain / (2.0 * lt * lr));
  s.si_core.resize(lr, lt);
  for (int a = 0; a < lr; ++a) {
    for (int b = 0; b < lt; ++b) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      s.si_core(a, b) = {sd * re, sd * im};
    }
  }
  s.ul_angles = draw_angles(J);
  s.dl_angles = draw_angles(K);

  // Satellite links: free space over the slant range with the satellite gain.
  std::uniform_real_distribution<double> ground(0.0, config.ut_distance_max);
  auto satellite_link = [&]() {
    const double offset = ground(rng);
    const double d = std::hypot(config.altitude, offset);
    const double amp = std::sqrt(config.sat_antenna_gain) * config.wavelength / (4.0 * kPi * d);
    return std::polar(amp, phase(rng));
  };
  s.ul_coeffs.resize(J);
  for (int j = 0; j < J; ++j) s.ul_coeffs[j] = satellite_link();
  s.dl_coeffs.resize(K);
  for (int k = 0; k < K; ++k) s.dl_coeffs[k] = satellite_link();

  // Terrestrial UT-to-UT links: log-distance path loss.
  std::uniform_real_distribution<double> ut_distance(config.ut_distance_min, config.ut_distance_max);
  s.cci_true.resize(J, K);
  s.cci_est.resize(J, K);
  s.cci_radii.resize(J, K);
  const double root_fraction = std::sqrt(config.cci_error_fraction);
  for (int j = 0; j < J; ++j) {
    for (int k = 0; k < K; ++k) {
      const double d = ut_distance(rng);
      const double amp =
          config.wavelength / (4.0 * kPi) * std::pow(d, -0.5 * config.path_loss_exponent);
      const std::complex<double> c = std::polar(amp, phase(rng));
      const double eps = root_fraction * amp;
      // Uniform in the open disk: radius eps * sqrt(U), U in [0, 1).
      const std::complex<double> err = std::polar(eps * std::sqrt(unit(rng)), phase(rng));
      s.cci_true(j, k) = c;
      s.cci_radii(j, k) = eps;
      s.cci_est(j, k) = c - err;
    }
  }
  return s;
}

void validate(const Scenario& s) {
  validate(s.config);
  const auto& c = s.config;
  const int J = c.num_ul_uts;
  const int K = c.num_dl_uts;
  require(static_cast<int>(s.si_tx_angles.size()) == c.si_paths_tx, "si_tx_angles has L^t entries");
  require(static_cast<int>(s.si_rx_angles.size()) == c.si_paths_rx, "si_rx_angles has L^r entries");
  require(s.si_core.rows() == c.si_paths_rx && s.si_core.cols() == c.si_paths_tx, "si_core is L^r x L^t");
  require(static_cast<int>(s.ul_angles.size()) == J, "ul_angles has J entries");
  require(static_cast<int>(s.dl_angles.size()) == K, "dl_angles has K entries");
  require(s.ul_coeffs.size() == J && s.dl_coeffs.size() == K, "coefficient counts match J and K");
  require(s.cci_true.rows() == J && s.cci_true.cols() == K, "cci_true is J x K");
  require(s.cci_est.rows() == J && s.cci_est.cols() == K, "cci_est is J x K");
  require(s.cci_radii.rows() == J && s.cci_radii.cols() == K, "cci_radii is J x K");
  for (const auto* list : {&s.si_tx_angles, &s.si_rx_angles, &s.ul_angles, &s.dl_angles}) {
    for (const PathAngles& a : *list) require(in_range(a), "angles within [0, pi]");
  }
  require(s.si_core.allFinite() && s.ul_coeffs.allFinite() && s.dl_coeffs.allFinite(), "finite channel coefficients");
  for (int j = 0; j < J; ++j) {
    for (int k = 0; k < K; ++k) {
      const double eps = s.cci_radii(j, k);
      require(eps >= 0.0 && std::isfinite(eps), "cci radii >= 0");
      require(std::abs(s.cci_est(j, k) - s.cci_true(j, k)) <= eps * (1.0 + 1e-12),
              "CCI estimate lies inside its uncertainty disk");
    }
  }
}

}  // namespace mafd
