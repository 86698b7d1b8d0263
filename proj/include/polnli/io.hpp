// Copyright 2026 The polnli Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serialization: scan CSV files, estimate and calibration JSON, and the
// experiment configuration document.

#pragma once

#include <charconv>
#include <cstdint>
#include <initializer_list>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "polnli/errors.hpp"
#include "polnli/estimation.hpp"
#include "polnli/interferometer.hpp"
#include "polnli/scan_experiment.hpp"
#include "polnli/scan_schedule.hpp"

namespace polnli {

/// Thrown for malformed data files (as opposed to configuration documents).
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal representation.
inline std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline constexpr std::string_view kScanCsvHeader = "step,phi0,delta_phase,expected_N,counts";

inline void write_scan_csv(std::ostream& os, const TimeSeries& series) {
  os << kScanCsvHeader << '\n';
  for (const auto& r : series.records) {
    os << r.step << ',' << format_double(r.phi0) << ',' << format_double(r.delta_phase) << ','
       << format_double(r.expected_N) << ',' << format_double(r.counts) << '\n';
  }
}

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
T parse_field(std::string_view s, std::size_t line_no, std::string_view name) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  T value{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw SchemaError("line " + std::to_string(line_no) + ": bad value for " + std::string(name) +
                      ": '" + std::string(s) + "'");
  }
  return value;
}

}  // namespace detail

inline TimeSeries read_scan_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw SchemaError("scan csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kScanCsvHeader) {
    throw SchemaError("scan csv: line 1: expected header '" + std::string(kScanCsvHeader) +
                      "', got '" + line + "'");
  }
  TimeSeries series;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 5) {
      throw SchemaError("scan csv: line " + std::to_string(line_no) + ": expected 5 fields, got " +
                        std::to_string(f.size()));
    }
    ScanRecord r;
    r.step = detail::parse_field<std::int64_t>(f[0], line_no, "step");
    r.phi0 = detail::parse_field<double>(f[1], line_no, "phi0");
    r.delta_phase = detail::parse_field<double>(f[2], line_no, "delta_phase");
    r.expected_N = detail::parse_field<double>(f[3], line_no, "expected_N");
    r.counts = detail::parse_field<double>(f[4], line_no, "counts");
    series.records.push_back(r);
  }
  if (series.empty()) throw SchemaError("scan csv: no data rows");
  return series;
}

/// Generic numeric table, one header row.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline void write_csv(std::ostream& os, const CsvTable& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
  }
}

// --- JSON ---

using Json = nlohmann::ordered_json;

inline Json to_json(const SampleEstimate& e) {
  Json j;
  j["t_perp"] = e.t_perp;
  j["t_par"] = e.t_par;
  j["tbar"] = e.tbar;
  j["dt"] = e.dt;
  j["phibar"] = e.phibar ? Json(*e.phibar) : Json(nullptr);
  j["dphi"] = e.dphi;
  j["psi"] = e.psi ? Json(*e.psi) : Json(nullptr);
  j["residuals"] = Json::object();
  for (const auto& [k, v] : e.residuals) j["residuals"][k] = v;
  j["flags"] = e.flags;
  return j;
}

inline Json to_json(const CalibrationResult& c) {
  return Json{{"xi_bar", c.xi_bar},
              {"delta_xi", c.delta_xi},
              {"scale", c.scale},
              {"signal_fringe", c.signal_fringe},
              {"idler_fringe", c.idler_fringe},
              {"residual_rms", c.residual_rms}};
}

inline CalibrationResult calibration_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("calibration json: ") + e.what());
  }
  CalibrationResult c;
  auto number = [&](const char* key, bool required) {
    if (!j.contains(key)) {
      if (required) throw SchemaError(std::string("calibration json: missing '") + key + "'");
      return 0.0;
    }
    if (!j[key].is_number()) throw SchemaError(std::string("calibration json: '") + key + "' must be a number");
    return j[key].get<double>();
  };
  c.xi_bar = number("xi_bar", true);
  c.delta_xi = number("delta_xi", true);
  c.scale = number("scale", false);
  c.signal_fringe = number("signal_fringe", false);
  c.idler_fringe = number("idler_fringe", false);
  c.residual_rms = number("residual_rms", false);
  return c;
}

// --- experiment configuration ---

enum class Pipeline { scan, calibration_signal, calibration_idler };

struct ExperimentConfig {
  InterferometerConfig interferometer;
  ScanSchedule schedule;
  NoiseModel noise;
  GainRegime regime = GainRegime::exact;
  Pipeline pipeline = Pipeline::scan;

  void validate() const {
    interferometer.validate();
    schedule.validate();
    noise.validate();
  }
};

/// 1-based line of the key path "a.b.c" in the document text, found by
/// locating each quoted name in turn; 0 if not found.
inline std::size_t line_of_key(std::string_view text, std::string_view path) {
  std::size_t pos = 0;
  std::size_t found = std::string_view::npos;
  while (!path.empty()) {
    const auto dot = path.find('.');
    const auto name = path.substr(0, dot);
    const std::string quoted = "\"" + std::string(name) + "\"";
    const auto at = text.find(quoted, pos);
    if (at == std::string_view::npos) break;
    found = at;
    pos = at + quoted.size();
    if (dot == std::string_view::npos) break;
    path.remove_prefix(dot + 1);
  }
  if (found == std::string_view::npos) return 0;
  std::size_t line = 1;
  for (std::size_t i = 0; i < found; ++i) line += text[i] == '\n';
  return line;
}

namespace detail {

class ConfigReader {
 public:
  const Json& section(const Json& parent, const std::string& path, const char* key, bool required) {
    static const Json empty = Json::object();
    const std::string full = join(path, key);
    if (!parent.contains(key)) {
      if (required) throw ConfigError(full, "missing required section");
      return empty;
    }
    const Json& s = parent[key];
    if (!s.is_object()) throw ConfigError(full, "must be an object");
    return s;
  }

  void allow_only(const Json& obj, const std::string& path,
                  std::initializer_list<std::string_view> keys) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (auto k : keys) ok = ok || it.key() == k;
      if (!ok) throw ConfigError(join(path, it.key()), "unknown key");
    }
  }

  double number(const Json& obj, const std::string& path, const char* key,
                std::optional<double> fallback) {
    const std::string full = join(path, key);
    if (!obj.contains(key)) {
      if (!fallback) throw ConfigError(full, "missing required value");
      return *fallback;
    }
    if (!obj[key].is_number()) throw ConfigError(full, "must be a number");
    return obj[key].get<double>();
  }

  std::int64_t integer(const Json& obj, const std::string& path, const char* key,
                       std::int64_t fallback) {
    const std::string full = join(path, key);
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) throw ConfigError(full, "must be an integer");
    return obj[key].get<std::int64_t>();
  }

  std::string string(const Json& obj, const std::string& path, const char* key,
                     const char* fallback) {
    const std::string full = join(path, key);
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string()) throw ConfigError(full, "must be a string");
    return obj[key].get<std::string>();
  }

  bool boolean(const Json& obj, const std::string& path, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_boolean()) throw ConfigError(join(path, key), "must be true or false");
    return obj[key].get<bool>();
  }

 private:
  static std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
  }
};

}  // namespace detail

/// Parse and validate an experiment document. Unknown keys are rejected.
/// Errors are ConfigError with the dotted key path; use line_of_key to
/// locate them in the text.
inline ExperimentConfig parse_experiment_config(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", e.what());
  }
  if (!root.is_object()) throw ConfigError("", "document must be a JSON object");
  detail::ConfigReader rd;
  rd.allow_only(root, "", {"interferometer", "schedule", "noise", "regime", "pipeline"});

  ExperimentConfig cfg;
  const Json& ifm = rd.section(root, "", "interferometer", true);
  rd.allow_only(ifm, "interferometer",
                {"gain1", "gain2", "signal", "wp1", "wp2", "sample", "psi", "equal_gain_check"});

  auto gain = [&](const char* key) {
    const std::string path = std::string("interferometer.") + key;
    const Json& g = rd.section(ifm, "interferometer", key, true);
    rd.allow_only(g, path, {"V", "pump_phase"});
    return CrystalGain{rd.number(g, path, "V", std::nullopt), rd.number(g, path, "pump_phase", 0.0)};
  };
  cfg.interferometer.gain1 = gain("gain1");
  cfg.interferometer.gain2 = gain("gain2");

  {
    const Json& s = rd.section(ifm, "interferometer", "signal", false);
    rd.allow_only(s, "interferometer.signal", {"t_mag", "t_phase"});
    const double tm = rd.number(s, "interferometer.signal", "t_mag", 1.0);
    if (tm < 0.0) throw ConfigError("interferometer.signal.t_mag", "must be >= 0");
    cfg.interferometer.signal.t_s = std::polar(tm, rd.number(s, "interferometer.signal", "t_phase", 0.0));
  }

  auto waveplate = [&](const char* key) {
    const std::string path = std::string("interferometer.") + key;
    const Json& w = rd.section(ifm, "interferometer", key, true);
    rd.allow_only(w, path, {"gamma", "theta"});
    return WaveplateSetting{rd.number(w, path, "gamma", std::nullopt),
                            rd.number(w, path, "theta", std::nullopt)};
  };
  cfg.interferometer.wp1 = waveplate("wp1");
  cfg.interferometer.wp2 = waveplate("wp2");

  {
    const std::string path = "interferometer.sample";
    const Json& s = rd.section(ifm, "interferometer", "sample", true);
    rd.allow_only(s, path, {"t_perp_mag", "t_perp_phase", "t_par_mag", "t_par_phase"});
    const double pm = rd.number(s, path, "t_perp_mag", 1.0);
    const double am = rd.number(s, path, "t_par_mag", 1.0);
    if (pm < 0.0) throw ConfigError(path + ".t_perp_mag", "must be >= 0");
    if (am < 0.0) throw ConfigError(path + ".t_par_mag", "must be >= 0");
    cfg.interferometer.sample =
        SampleAxes::from_polar(pm, rd.number(s, path, "t_perp_phase", 0.0), am,
                               rd.number(s, path, "t_par_phase", 0.0));
  }
  cfg.interferometer.psi = rd.number(ifm, "interferometer", "psi", 0.0);
  cfg.interferometer.equal_gain_check = rd.boolean(ifm, "interferometer", "equal_gain_check", false);

  {
    const Json& s = rd.section(root, "", "schedule", true);
    rd.allow_only(s, "schedule", {"xi_bar", "delta_xi", "rate_phi0", "rate_delta", "n_samples"});
    cfg.schedule.xi_bar = rd.number(s, "schedule", "xi_bar", 0.0);
    cfg.schedule.delta_xi = rd.number(s, "schedule", "delta_xi", 0.0);
    cfg.schedule.rate_phi0 = rd.number(s, "schedule", "rate_phi0", std::nullopt);
    cfg.schedule.rate_delta = rd.number(s, "schedule", "rate_delta", std::nullopt);
    cfg.schedule.n_samples = rd.integer(s, "schedule", "n_samples", 256);
  }
  {
    const Json& s = rd.section(root, "", "noise", false);
    rd.allow_only(s, "noise", {"mode", "counts_per_unit_N", "seed"});
    const auto mode = rd.string(s, "noise", "mode", "noiseless");
    if (mode == "noiseless") {
      cfg.noise.mode = NoiseMode::noiseless;
    } else if (mode == "poisson") {
      cfg.noise.mode = NoiseMode::poisson;
    } else {
      throw ConfigError("noise.mode", "must be 'noiseless' or 'poisson'");
    }
    cfg.noise.counts_per_unit_N = rd.number(s, "noise", "counts_per_unit_N", 1.0);
    const auto seed = rd.integer(s, "noise", "seed", 0);
    if (seed < 0) throw ConfigError("noise.seed", "must be >= 0");
    cfg.noise.seed = static_cast<std::uint64_t>(seed);
  }
  {
    const auto regime = rd.string(root, "", "regime", "exact");
    if (regime == "exact") {
      cfg.regime = GainRegime::exact;
    } else if (regime == "lowgain") {
      cfg.regime = GainRegime::lowgain;
    } else {
      throw ConfigError("regime", "must be 'exact' or 'lowgain'");
    }
    const auto pipeline = rd.string(root, "", "pipeline", "scan");
    if (pipeline == "scan") {
      cfg.pipeline = Pipeline::scan;
    } else if (pipeline == "calibration_signal") {
      cfg.pipeline = Pipeline::calibration_signal;
    } else if (pipeline == "calibration_idler") {
      cfg.pipeline = Pipeline::calibration_idler;
    } else {
      throw ConfigError("pipeline", "must be 'scan', 'calibration_signal' or 'calibration_idler'");
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace polnli
