#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mafd {

struct PathAngles {
  double elevation = 0.0;  // radians, [0, pi]
  double azimuth = 0.0;    // radians, [0, pi]

  bool operator==(const PathAngles&) const = default;
};

/// System parameters in linear SI units (meters, watts, power ratios).
struct SystemConfig {
  int num_tx_antennas = 8;  // M
  int num_rx_antennas = 8;  // N
  int num_ul_uts = 3;       // J
  int num_dl_uts = 2;       // K

  double wavelength = 0.0;      // meters
  double region_size_tx = 0.0;  // A^t, meters
  double region_size_rx = 0.0;  // A^r, meters
  double min_spacing = 0.0;     // D, meters

  int si_paths_tx = 10;  // L^t
  int si_paths_rx = 10;  // L^r
  double si_loss = 1e-10;                // rho
  double si_channel_gain = 1e-5;         // variance scale of the SI core
  double ul_noise = 1e-14;               // sigma^2_UL, watts
  std::vector<double> dl_noise;          // sigma^2_DL,k, watts, one per DL UT
  std::vector<double> ul_rate_threshold; // bps/Hz, one per UL UT
  std::vector<double> dl_rate_threshold; // bps/Hz, one per DL UT

  double sat_antenna_gain = 100.0;  // linear
  double cci_error_fraction = 0.05; // eps_jk^2 / |c_jk|^2
  double weight_ul = 0.5;           // lambda_1
  double weight_dl = 0.5;           // lambda_2
  double ref_ul = 1.0;              // T*_1, watts
  double ref_dl = 1.0;              // T*_2, watts

  double altitude = 600e3;             // meters
  double path_loss_exponent = 2.8;     // UT-to-UT links
  double ut_distance_min = 1e3;        // meters
  double ut_distance_max = 10e3;       // meters

  std::uint64_t rng_seed = 1;

  bool operator==(const SystemConfig&) const = default;
};

/// Full-scale parameters: M = N = 16, J = 6, K = 2, A = 5 lambda at 8 GHz.
SystemConfig paper_config();
/// Desk-scale parameters: M = N = 8, J = 3, K = 2, A = 5 lambda.
SystemConfig desk_config();

/// Throws ConfigError naming the first violated invariant.
void validate(const SystemConfig& config);

struct Scenario {
  SystemConfig config;
  std::vector<PathAngles> si_tx_angles;  // L^t
  std::vector<PathAngles> si_rx_angles;  // L^r
  Eigen::MatrixXcd si_core;              // Sigma, L^r x L^t
  std::vector<PathAngles> ul_angles;     // J
  std::vector<PathAngles> dl_angles;     // K
  Eigen::VectorXcd ul_coeffs;            // ell_j
  Eigen::VectorXcd dl_coeffs;            // hbar_k
  Eigen::MatrixXcd cci_true;             // c_jk, J x K
  Eigen::MatrixXcd cci_est;              // c^_jk, J x K
  Eigen::MatrixXd cci_radii;             // eps_jk, J x K

  /// eps_k = sqrt(sum_j eps_jk^2).
  double cci_radius(int k) const;
  Eigen::VectorXcd cci_estimate(int k) const { return cci_est.col(k); }
  Eigen::VectorXcd cci_actual(int k) const { return cci_true.col(k); }

  bool operator==(const Scenario& other) const;
};

/// Draws a scenario from config.rng_seed. Pure function of the config.
Scenario generate(const SystemConfig& config);

/// Checks the scenario invariants (shapes, angle ranges, estimate inside its
/// uncertainty disk). Throws ConfigError.
void validate(const Scenario& scenario);

/// Key/value configuration text with explicit units in key names.
SystemConfig parse_config(std::istream& in, const std::string& source, SystemConfig base = desk_config());
SystemConfig load_config(const std::string& path, SystemConfig base = desk_config());
void write_config(std::ostream& out, const SystemConfig& config);

/// Versioned scenario file; values are written with 17 significant digits so
/// that load(save(s)) == s.
void write_scenario(std::ostream& out, const Scenario& scenario);
Scenario read_scenario(std::istream& in, const std::string& source);
void save(const Scenario& scenario, const std::string& path);
Scenario load(const std::string& path);

}  // namespace mafd
