#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include "mafd/errors.hpp"
#include "mafd/scenario.hpp"
#include "mafd/units.hpp"
#include "text_util.hpp"

namespace mafd {

namespace {

constexpr const char* kScenarioHeader = "ma-fd-power-scenario 1";

struct RawValue {
  std::vector<std::string> tokens;
  int line = 0;
};

// ------------------------------------------------------------ config text

class ConfigReader {
 public:
  ConfigReader(std::map<std::string, RawValue> values, std::string source)
      : values_(std::move(values)), source_(std::move(source)) {}

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  double number(const std::string& key) {
    const RawValue& v = single(key);
    auto d = text::to_double(v.tokens[0]);
    if (!d) throw ParseError(source_, v.line, key + ": expected a number, got '" + v.tokens[0] + "'");
    return *d;
  }

  int count(const std::string& key) {
    const RawValue& v = single(key);
    auto i = text::to_int(v.tokens[0]);
    if (!i || *i < 0 || *i > 1000000) throw ParseError(source_, v.line, key + ": expected a count, got '" + v.tokens[0] + "'");
    return static_cast<int>(*i);
  }

  std::uint64_t seed(const std::string& key) {
    const RawValue& v = single(key);
    auto u = text::to_uint(v.tokens[0]);
    if (!u) throw ParseError(source_, v.line, key + ": expected an unsigned integer, got '" + v.tokens[0] + "'");
    return *u;
  }

  /// One value broadcast to n entries, or exactly n values.
  std::vector<double> list(const std::string& key, int n) {
    RawValue& v = values_.at(key);
    used_.insert(key);
    if (v.tokens.size() != 1 && static_cast<int>(v.tokens.size()) != n) {
      throw ParseError(source_, v.line, key + ": expected 1 or " + std::to_string(n) + " values");
    }
    std::vector<double> out;
    for (const std::string& tok : v.tokens) {
      auto d = text::to_double(tok);
      if (!d) throw ParseError(source_, v.line, key + ": expected a number, got '" + tok + "'");
      out.push_back(*d);
    }
    if (out.size() == 1) out.assign(n, out[0]);
    return out;
  }

  void check_all_used() const {
    for (const auto& [key, v] : values_) {
      if (!used_.count(key)) throw ParseError(source_, v.line, "unknown key '" + key + "'");
    }
  }

 private:
  const RawValue& single(const std::string& key) {
    const RawValue& v = values_.at(key);
    used_.insert(key);
    if (v.tokens.size() != 1) throw ParseError(source_, v.line, key + ": expected exactly one value");
    return v;
  }

  std::map<std::string, RawValue> values_;
  std::set<std::string> used_;
  std::string source_;
};

std::map<std::string, RawValue> read_key_values(std::istream& in, const std::string& source) {
  std::map<std::string, RawValue> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, lineno, "expected 'key = value'");
    const std::string key = text::trim(line.substr(0, eq));
    RawValue v{text::split(line.substr(eq + 1)), lineno};
    if (key.empty()) throw ParseError(source, lineno, "missing key");
    if (v.tokens.empty()) throw ParseError(source, lineno, key + ": missing value");
    if (values.count(key)) throw ParseError(source, lineno, "duplicate key '" + key + "'");
    values.emplace(key, std::move(v));
  }
  return values;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + text::num(v[i]);
  return out;
}

// ---------------------------------------------------------- scenario file

class ScenarioReader {
 public:
  ScenarioReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  /// Next non-empty line, split into tokens.
  std::vector<std::string> next(const char* expecting) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      line = text::trim(line);
      if (!line.empty()) return text::split(line);
    }
    throw ParseError(source_, line_, std::string("unexpected end of file, expected ") + expecting);
  }

  void section(const std::string& name) {
    auto tok = next(("[" + name + "]").c_str());
    if (tok.size() != 1 || tok[0] != "[" + name + "]") fail("expected section [" + name + "]");
  }

  double number(const std::string& tok) {
    auto d = text::to_double(tok);
    if (!d) fail("expected a number, got '" + tok + "'");
    return *d;
  }

  std::vector<double> numbers(std::size_t count, const char* what) {
    auto tok = next(what);
    if (tok.size() != count) fail(std::string(what) + ": expected " + std::to_string(count) + " values");
    std::vector<double> out;
    for (const auto& t : tok) out.push_back(number(t));
    return out;
  }

  std::vector<PathAngles> angles(const std::string& name, int n) {
    section(name);
    std::vector<PathAngles> out(n);
    for (auto& a : out) {
      auto v = numbers(2, "elevation azimuth");
      a = {v[0], v[1]};
    }
    return out;
  }

  Eigen::MatrixXcd complex_matrix(const std::string& name, int rows, int cols) {
    section(name);
    Eigen::MatrixXcd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
      auto v = numbers(2 * cols, "complex row (re im pairs)");
      for (int c = 0; c < cols; ++c) m(r, c) = {v[2 * c], v[2 * c + 1]};
    }
    return m;
  }

  Eigen::MatrixXd real_matrix(const std::string& name, int rows, int cols) {
    section(name);
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
      auto v = numbers(cols, "real row");
      for (int c = 0; c < cols; ++c) m(r, c) = v[c];
    }
    return m;
  }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(source_, line_, message); }
  int line() const { return line_; }

 private:
  std::istream& in_;
  std::string source_;
  int line_ = 0;
};

void write_angles(std::ostream& out, const char* name, const std::vector<PathAngles>& angles) {
  out << "[" << name << "]\n";
  for (const auto& a : angles) out << text::num(a.elevation) << " " << text::num(a.azimuth) << "\n";
}

void write_complex(std::ostream& out, const char* name, const Eigen::MatrixXcd& m) {
  out << "[" << name << "]\n";
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      out << (c ? " " : "") << text::num(m(r, c).real()) << " " << text::num(m(r, c).imag());
    }
    out << "\n";
  }
}

}  // namespace

SystemConfig parse_config(std::istream& in, const std::string& source, SystemConfig base) {
  ConfigReader r(read_key_values(in, source), source);
  SystemConfig c = base;
  const double region_tx_wl = base.region_size_tx / base.wavelength;
  const double region_rx_wl = base.region_size_rx / base.wavelength;
  const double spacing_wl = base.min_spacing / base.wavelength;

  if (r.has("num_tx_antennas")) c.num_tx_antennas = r.count("num_tx_antennas");
  if (r.has("num_rx_antennas")) c.num_rx_antennas = r.count("num_rx_antennas");
  if (r.has("num_ul_uts")) c.num_ul_uts = r.count("num_ul_uts");
  if (r.has("num_dl_uts")) c.num_dl_uts = r.count("num_dl_uts");
  if (r.has("carrier_ghz")) c.wavelength = wavelength_from_ghz(r.number("carrier_ghz"));
  c.region_size_tx = (r.has("region_tx_wavelengths") ? r.number("region_tx_wavelengths") : region_tx_wl) * c.wavelength;
  c.region_size_rx = (r.has("region_rx_wavelengths") ? r.number("region_rx_wavelengths") : region_rx_wl) * c.wavelength;
  c.min_spacing = (r.has("min_spacing_wavelengths") ? r.number("min_spacing_wavelengths") : spacing_wl) * c.wavelength;
  if (r.has("si_paths_tx")) c.si_paths_tx = r.count("si_paths_tx");
  if (r.has("si_paths_rx")) c.si_paths_rx = r.count("si_paths_rx");
  if (r.has("si_loss_db")) c.si_loss = db_to_linear(r.number("si_loss_db"));
  if (r.has("si_channel_gain_db")) c.si_channel_gain = db_to_linear(r.number("si_channel_gain_db"));
  if (r.has("ul_noise_dbm")) c.ul_noise = dbm_to_watts(r.number("ul_noise_dbm"));

  auto resize = [](std::vector<double>& v, int n) {
    const double fill = v.empty() ? 0.0 : v.front();
    v.resize(n, fill);
  };
  resize(c.dl_noise, c.num_dl_uts);
  resize(c.ul_rate_threshold, c.num_ul_uts);
  resize(c.dl_rate_threshold, c.num_dl_uts);
  if (r.has("dl_noise_dbm")) {
    c.dl_noise = r.list("dl_noise_dbm", c.num_dl_uts);
    for (double& v : c.dl_noise) v = dbm_to_watts(v);
  }
  if (r.has("ul_rate_bps_hz")) c.ul_rate_threshold = r.list("ul_rate_bps_hz", c.num_ul_uts);
  if (r.has("dl_rate_bps_hz")) c.dl_rate_threshold = r.list("dl_rate_bps_hz", c.num_dl_uts);

  if (r.has("sat_gain_dbi")) c.sat_antenna_gain = db_to_linear(r.number("sat_gain_dbi"));
  if (r.has("cci_error_fraction")) c.cci_error_fraction = r.number("cci_error_fraction");
  if (r.has("weight_ul")) {
    c.weight_ul = r.number("weight_ul");
    c.weight_dl = r.has("weight_dl") ? r.number("weight_dl") : 1.0 - c.weight_ul;
  } else if (r.has("weight_dl")) {
    c.weight_dl = r.number("weight_dl");
    c.weight_ul = 1.0 - c.weight_dl;
  }
  if (r.has("ref_ul_w")) c.ref_ul = r.number("ref_ul_w");
  if (r.has("ref_dl_w")) c.ref_dl = r.number("ref_dl_w");
  if (r.has("seed")) c.rng_seed = r.seed("seed");
  if (r.has("altitude_km")) c.altitude = 1e3 * r.number("altitude_km");
  if (r.has("path_loss_exponent")) c.path_loss_exponent = r.number("path_loss_exponent");
  if (r.has("ut_distance_min_km")) c.ut_distance_min = 1e3 * r.number("ut_distance_min_km");
  if (r.has("ut_distance_max_km")) c.ut_distance_max = 1e3 * r.number("ut_distance_max_km");
  r.check_all_used();
  validate(c);
  return c;
}

SystemConfig load_config(const std::string& path, SystemConfig base) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return parse_config(in, path, std::move(base));
}

void write_config(std::ostream& out, const SystemConfig& c) {
  std::vector<double> dl_noise_dbm;
  for (double v : c.dl_noise) dl_noise_dbm.push_back(watts_to_dbm(v));
  out << "num_tx_antennas = " << c.num_tx_antennas << "\n"
      << "num_rx_antennas = " << c.num_rx_antennas << "\n"
      << "num_ul_uts = " << c.num_ul_uts << "\n"
      << "num_dl_uts = " << c.num_dl_uts << "\n"
      << "carrier_ghz = " << text::num(kSpeedOfLight / c.wavelength / 1e9) << "\n"
      << "region_tx_wavelengths = " << text::num(c.region_size_tx / c.wavelength) << "\n"
      << "region_rx_wavelengths = " << text::num(c.region_size_rx / c.wavelength) << "\n"
      << "min_spacing_wavelengths = " << text::num(c.min_spacing / c.wavelength) << "\n"
      << "si_paths_tx = " << c.si_paths_tx << "\n"
      << "si_paths_rx = " << c.si_paths_rx << "\n"
      << "si_loss_db = " << text::num(linear_to_db(c.si_loss)) << "\n"
      << "si_channel_gain_db = " << text::num(linear_to_db(c.si_channel_gain)) << "\n"
      << "ul_noise_dbm = " << text::num(watts_to_dbm(c.ul_noise)) << "\n"
      << "dl_noise_dbm = " << join(dl_noise_dbm) << "\n"
      << "ul_rate_bps_hz = " << join(c.ul_rate_threshold) << "\n"
      << "dl_rate_bps_hz = " << join(c.dl_rate_threshold) << "\n"
      << "sat_gain_dbi = " << text::num(linear_to_db(c.sat_antenna_gain)) << "\n"
      << "cci_error_fraction = " << text::num(c.cci_error_fraction) << "\n"
      << "weight_ul = " << text::num(c.weight_ul) << "\n"
      << "weight_dl = " << text::num(c.weight_dl) << "\n"
      << "ref_ul_w = " << text::num(c.ref_ul) << "\n"
      << "ref_dl_w = " << text::num(c.ref_dl) << "\n"
      << "seed = " << c.rng_seed << "\n"
      << "altitude_km = " << text::num(c.altitude / 1e3) << "\n"
      << "path_loss_exponent = " << text::num(c.path_loss_exponent) << "\n"
      << "ut_distance_min_km = " << text::num(c.ut_distance_min / 1e3) << "\n"
      << "ut_distance_max_km = " << text::num(c.ut_distance_max / 1e3) << "\n";
}

void write_scenario(std::ostream& out, const Scenario& s) {
  const SystemConfig& c = s.config;
  out << kScenarioHeader << "\n[config]\n"
      << "num_tx_antennas " << c.num_tx_antennas << "\n"
      << "num_rx_antennas " << c.num_rx_antennas << "\n"
      << "num_ul_uts " << c.num_ul_uts << "\n"
      << "num_dl_uts " << c.num_dl_uts << "\n"
      << "wavelength_m " << text::num(c.wavelength) << "\n"
      << "region_size_tx_m " << text::num(c.region_size_tx) << "\n"
      << "region_size_rx_m " << text::num(c.region_size_rx) << "\n"
      << "min_spacing_m " << text::num(c.min_spacing) << "\n"
      << "si_paths_tx " << c.si_paths_tx << "\n"
      << "si_paths_rx " << c.si_paths_rx << "\n"
      << "si_loss " << text::num(c.si_loss) << "\n"
      << "si_channel_gain " << text::num(c.si_channel_gain) << "\n"
      << "ul_noise_w " << text::num(c.ul_noise) << "\n"
      << "dl_noise_w " << join(c.dl_noise) << "\n"
      << "ul_rate_threshold_bps_hz " << join(c.ul_rate_threshold) << "\n"
      << "dl_rate_threshold_bps_hz " << join(c.dl_rate_threshold) << "\n"
      << "sat_antenna_gain " << text::num(c.sat_antenna_gain) << "\n"
      << "cci_error_fraction " << text::num(c.cci_error_fraction) << "\n"
      << "weight_ul " << text::num(c.weight_ul) << "\n"
      << "weight_dl " << text::num(c.weight_dl) << "\n"
      << "ref_ul_w " << text::num(c.ref_ul) << "\n"
      << "ref_dl_w " << text::num(c.ref_dl) << "\n"
      << "altitude_m " << text::num(c.altitude) << "\n"
      << "path_loss_exponent " << text::num(c.path_loss_exponent) << "\n"
      << "ut_distance_min_m " << text::num(c.ut_distance_min) << "\n"
      << "ut_distance_max_m " << text::num(c.ut_distance_max) << "\n"
      << "rng_seed " << c.rng_seed << "\n";
  write_angles(out, "si_tx_angles", s.si_tx_angles);
  write_angles(out, "si_rx_angles", s.si_rx_angles);
  write_complex(out, "si_core", s.si_core);
  write_angles(out, "ul_angles", s.ul_angles);
  write_angles(out, "dl_angles", s.dl_angles);
  write_complex(out, "ul_coeffs", s.ul_coeffs);
  write_complex(out, "dl_coeffs", s.dl_coeffs);
  write_complex(out, "cci_true", s.cci_true);
  write_complex(out, "cci_est", s.cci_est);
  out << "[cci_radii]\n";
  for (int r = 0; r < s.cci_radii.rows(); ++r) {
    for (int col = 0; col < s.cci_radii.cols(); ++col) out << (col ? " " : "") << text::num(s.cci_radii(r, col));
    out << "\n";
  }
}

Scenario read_scenario(std::istream& in, const std::string& source) {
  ScenarioReader r(in, source);
  {
    auto tok = r.next("header");
    if (tok.size() != 2 || tok[0] != "ma-fd-power-scenario") r.fail("missing 'ma-fd-power-scenario' header");
    if (tok[1] != "1") r.fail("unsupported scenario format version " + tok[1]);
  }
  r.section("config");
  Scenario s;
  SystemConfig& c = s.config;

  auto key = [&](const char* name) {
    auto tok = r.next(name);
    if (tok.empty() || tok[0] != name) r.fail(std::string("expected key ") + name);
    if (tok.size() < 2) r.fail(std::string(name) + ": missing value");
    tok.erase(tok.begin());
    return tok;
  };
  auto number = [&](const char* name) {
    auto tok = key(name);
    if (tok.size() != 1) r.fail(std::string(name) + ": expected one value");
    return r.number(tok[0]);
  };
  auto count = [&](const char* name) {
    auto tok = key(name);
    auto i = text::to_int(tok[0]);
    if (tok.size() != 1 || !i || *i < 0 || *i > 1000000) r.fail(std::string(name) + ": expected a count");
    return static_cast<int>(*i);
  };
  auto list = [&](const char* name, int n) {
    auto tok = key(name);
    if (static_cast<int>(tok.size()) != n) r.fail(std::string(name) + ": expected " + std::to_string(n) + " values");
    std::vector<double> out;
    for (const auto& t : tok) out.push_back(r.number(t));
    return out;
  };

  c.num_tx_antennas = count("num_tx_antennas");
  c.num_rx_antennas = count("num_rx_antennas");
  c.num_ul_uts = count("num_ul_uts");
  c.num_dl_uts = count("num_dl_uts");
  c.wavelength = number("wavelength_m");
  c.region_size_tx = number("region_size_tx_m");
  c.region_size_rx = number("region_size_rx_m");
  c.min_spacing = number("min_spacing_m");
  c.si_paths_tx = count("si_paths_tx");
  c.si_paths_rx = count("si_paths_rx");
  c.si_loss = number("si_loss");
  c.si_channel_gain = number("si_channel_gain");
  c.ul_noise = number("ul_noise_w");
  c.dl_noise = list("dl_noise_w", c.num_dl_uts);
  c.ul_rate_threshold = list("ul_rate_threshold_bps_hz", c.num_ul_uts);
  c.dl_rate_threshold = list("dl_rate_threshold_bps_hz", c.num_dl_uts);
  c.sat_antenna_gain = number("sat_antenna_gain");
  c.cci_error_fraction = number("cci_error_fraction");
  c.weight_ul = number("weight_ul");
  c.weight_dl = number("weight_dl");
  c.ref_ul = number("ref_ul_w");
  c.ref_dl = number("ref_dl_w");
  c.altitude = number("altitude_m");
  c.path_loss_exponent = number("path_loss_exponent");
  c.ut_distance_min = number("ut_distance_min_m");
  c.ut_distance_max = number("ut_distance_max_m");
  {
    auto tok = key("rng_seed");
    auto u = text::to_uint(tok[0]);
    if (tok.size() != 1 || !u) r.fail("rng_seed: expected an unsigned integer");
    c.rng_seed = *u;
  }
  validate(c);

  const int J = c.num_ul_uts;
  const int K = c.num_dl_uts;
  s.si_tx_angles = r.angles("si_tx_angles", c.si_paths_tx);
  s.si_rx_angles = r.angles("si_rx_angles", c.si_paths_rx);
  s.si_core = r.complex_matrix("si_core", c.si_paths_rx, c.si_paths_tx);
  s.ul_angles = r.angles("ul_angles", J);
  s.dl_angles = r.angles("dl_angles", K);
  s.ul_coeffs = r.complex_matrix("ul_coeffs", J, 1);
  s.dl_coeffs = r.complex_matrix("dl_coeffs", K, 1);
  s.cci_true = r.complex_matrix("cci_true", J, K);
  s.cci_est = r.complex_matrix("cci_est", J, K);
  s.cci_radii = r.real_matrix("cci_radii", J, K);
  std::string rest;
  while (std::getline(in, rest)) {
    if (!text::trim(rest).empty()) r.fail("trailing content after [cci_radii]");
  }
  validate(s);
  return s;
}

void save(const Scenario& scenario, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path, 0, "cannot open file for writing");
  write_scenario(out, scenario);
  if (!out) throw ParseError(path, 0, "write failed");
}

Scenario load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return read_scenario(in, path);
}

}  // namespace mafd
