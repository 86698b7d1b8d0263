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

// Command-line front end. `run` is callable in-process so the tests can
// drive every subcommand without spawning the binary.

#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polnli.hpp"

namespace polnli::app {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kNumericError = 3,
  kUnidentifiable = 4,
};

namespace detail {

// Reported as exit code 2 alongside config and schema errors.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::ofstream open_out(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  return out;
}

inline TimeSeries read_series(const std::string& path) {
  std::istringstream in(read_file(path));
  try {
    return read_scan_csv(in);
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

inline void write_json(const std::string& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

struct SimulateOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string pipeline;
};

inline int simulate(const SimulateOptions& o, std::ostream& out) {
  const std::string text = read_file(o.config);
  ExperimentConfig cfg;
  try {
    cfg = parse_experiment_config(text);
  } catch (const ConfigError& e) {
    const auto line = line_of_key(text, e.key());
    std::ostringstream msg;
    msg << o.config;
    if (line > 0) msg << ':' << line;
    msg << ": " << e.what();
    throw ConfigError("", msg.str());
  }
  if (o.seed) cfg.noise.seed = *o.seed;
  if (!o.pipeline.empty()) {
    if (o.pipeline == "scan") {
      cfg.pipeline = Pipeline::scan;
    } else if (o.pipeline == "calibration_signal") {
      cfg.pipeline = Pipeline::calibration_signal;
    } else if (o.pipeline == "calibration_idler") {
      cfg.pipeline = Pipeline::calibration_idler;
    } else {
      throw ConfigError("--pipeline", "must be scan, calibration_signal or calibration_idler");
    }
  }

  InterferometerConfig ifm = cfg.interferometer;
  ScanSchedule schedule = cfg.schedule;
  if (cfg.pipeline == Pipeline::calibration_signal) {
    ifm = calibration_config(ifm);
    schedule = signal_calibration_schedule(schedule);
  } else if (cfg.pipeline == Pipeline::calibration_idler) {
    ifm = calibration_config(ifm);
    schedule = idler_calibration_schedule(schedule);
  }
  const auto series = simulate_scan(ifm, schedule, cfg.noise, cfg.regime);
  {
    auto f = open_out(o.out);
    write_scan_csv(f, series);
  }

  const auto expected = series.column(&ScanRecord::expected_N);
  const auto counts = series.column(&ScanRecord::counts);
  const auto [lo, hi] = std::minmax_element(expected.begin(), expected.end());
  double mean_n = 0.0, mean_counts = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    mean_n += expected[i];
    mean_counts += counts[i];
  }
  mean_n /= static_cast<double>(expected.size());
  mean_counts /= static_cast<double>(counts.size());
  Json summary{{"samples", series.size()},
               {"mean_N", mean_n},
               {"mean_counts", mean_counts},
               {"fringe_amplitude", 0.5 * (*hi - *lo)}};
  out << summary.dump() << '\n';
  return kOk;
}

inline int calibrate_cmd(const std::string& signal_path, const std::string& idler_path,
                         const std::string& out_path, std::ostream& out) {
  const auto cal = calibrate(read_series(signal_path), read_series(idler_path));
  const Json j = to_json(cal);
  write_json(out_path, j);
  out << j.dump() << '\n';
  return kOk;
}

struct EstimateOptions {
  std::string pipeline;
  std::vector<std::string> data;
  std::string calibration;
  std::string out;
  std::string sample_class = "isotropic_phase";
  std::optional<double> mean_phase;
};

inline SampleClass parse_sample_class(const std::string& s) {
  if (s == "isotropic_phase") return SampleClass::isotropic_phase;
  if (s == "isotropic_loss") return SampleClass::isotropic_loss;
  if (s == "general") return SampleClass::general;
  throw ConfigError("--sample-class", "must be isotropic_phase, isotropic_loss or general");
}

inline int estimate(const EstimateOptions& o, std::ostream& out, std::ostream& err) {
  std::optional<CalibrationResult> cal;
  if (!o.calibration.empty()) {
    try {
      cal = calibration_from_json(read_file(o.calibration));
    } catch (const SchemaError& e) {
      throw SchemaError(o.calibration + ": " + e.what());
    }
  }

  SampleEstimate est;
  if (o.pipeline == "fourier") {
    if (o.data.size() != 1) throw ConfigError("--data", "the fourier pipeline takes one series");
    if (!cal) throw ConfigError("--calibration", "the fourier pipeline needs a calibration");
    const auto series = read_series(o.data.front());
    const auto d = harmonic_regress(series, equal_scan_rate(series));
    est = extract_sample_fourier(d, 2.0 * d.dc, {cal->xi_bar, cal->delta_xi});
  } else if (o.pipeline == "rotated" || o.pipeline == "ellipse") {
    if (o.data.size() != 2) {
      throw ConfigError("--data", "the " + o.pipeline + " pipeline takes two series (settings 1 and 2)");
    }
    const auto s1 = read_series(o.data[0]);
    const auto s2 = read_series(o.data[1]);
    const auto cls = parse_sample_class(o.sample_class);
    if (o.pipeline == "rotated") {
      est = solve_two_setting(fit_sinusoid(s1), fit_sinusoid(s2), cls, o.mean_phase,
                              cal ? cal->xi_bar : 0.0);
    } else {
      if (s1.column(&ScanRecord::phi0) != s2.column(&ScanRecord::phi0)) {
        throw SchemaError("ellipse pipeline: both series must share the phi0 column");
      }
      std::vector<Point2> pts;
      for (std::size_t i = 0; i < s1.size(); ++i) {
        pts.push_back({s1.records[i].counts, s2.records[i].counts});
      }
      est = estimate_from_ellipse(fit_ellipse(pts, cls));
    }
  } else {
    throw ConfigError("--pipeline", "must be fourier, rotated or ellipse");
  }

  const Json j = to_json(est);
  write_json(o.out, j);
  out << j.dump() << '\n';
  for (const auto& f : est.flags) {
    if (is_unidentifiable_flag(f)) {
      err << "unidentifiable: " << f << '\n';
      return kUnidentifiable;
    }
  }
  return kOk;
}

inline int figures(const std::string& id, const std::string& dir, std::ostream& out) {
  const auto tables = figure_tables(id);
  std::filesystem::create_directories(dir);
  for (const auto& t : tables) {
    const auto path = (std::filesystem::path(dir) / (t.name + ".csv")).string();
    auto f = open_out(path);
    write_csv(f, t.table);
    out << path << '\n';
  }
  return kOk;
}

}  // namespace detail

/// Run one command line (without the program name). Returns the exit code.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Polarization-sensitive nonlinear interferometer simulator"};
  app.name("polnli");
  app.require_subcommand(1);

  detail::SimulateOptions sim;
  std::uint64_t seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Simulate a phase scan and write it as CSV");
  simulate->add_option("--config", sim.config, "Experiment configuration (JSON)")->required();
  simulate->add_option("--out", sim.out, "Output CSV path")->required();
  auto* seed_opt = simulate->add_option("--seed", seed, "Override the noise seed");
  simulate->add_option("--pipeline", sim.pipeline,
                       "Override the pipeline: scan, calibration_signal, calibration_idler");

  std::string signal_scan, idler_scan, cal_out;
  auto* calibrate = app.add_subcommand("calibrate", "Fit the scan offsets from two calibration scans");
  calibrate->add_option("--signal-scan", signal_scan, "Scan of the signal-arm phase")->required();
  calibrate->add_option("--idler-scan", idler_scan, "Scan of the differential idler phase")->required();
  calibrate->add_option("--out", cal_out, "Output JSON path")->required();

  detail::EstimateOptions est;
  double mean_phase = 0.0;
  auto* estimate = app.add_subcommand("estimate", "Recover sample parameters from measured series");
  estimate->add_option("--pipeline", est.pipeline, "fourier, rotated or ellipse")->required();
  estimate->add_option("--data", est.data, "Input CSV (repeat for two-setting pipelines)")->required();
  estimate->add_option("--calibration", est.calibration, "Calibration JSON");
  estimate->add_option("--out", est.out, "Output JSON path")->required();
  estimate->add_option("--sample-class", est.sample_class,
                       "isotropic_phase, isotropic_loss or general (rotated and ellipse)");
  auto* mean_opt = estimate->add_option("--mean-phase", mean_phase,
                                        "Known mean sample phase, radians (general class)");

  std::string figure_id, figure_dir;
  auto* figures = app.add_subcommand("figures", "Write the gridded data behind a figure");
  figures->add_option("--figure", figure_id, "fig3a, fig3b, fig4a, fig4b, fig5b or fig6")->required();
  figures->add_option("--out", figure_dir, "Output directory")->required();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (simulate->parsed()) {
      if (seed_opt->count() > 0) sim.seed = seed;
      return detail::simulate(sim, out);
    }
    if (calibrate->parsed()) return detail::calibrate_cmd(signal_scan, idler_scan, cal_out, out);
    if (estimate->parsed()) {
      if (mean_opt->count() > 0) est.mean_phase = mean_phase;
      return detail::estimate(est, out, err);
    }
    if (figures->parsed()) return detail::figures(figure_id, figure_dir, out);
  } catch (const UnidentifiableError& e) {
    err << "unidentifiable: " << e.flag() << ": " << e.what() << '\n';
    return kUnidentifiable;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << '\n';
    return kConfigError;
  } catch (const detail::IoError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace polnli::app
