#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "covertime/continuum.hpp"
#include "covertime/network.hpp"
#include "covertime/reset_clock.hpp"
#include "covertime/simulation.hpp"

// Parameter sweeps over the resetting rate. A sweep config is an INI-style
// file:
//
//   [sweep]
//   r_min = 0.1            # log-spaced grid ...
//   r_max = 1000
//   r_points = 25
//   # r_grid = 0.5, 1, 2   # ... or an explicit one
//
//   [series.unconstrained] # one block per curve
//   scenario = bm1d_unconstrained
//   a = 1
//   b = 2
//   D = 1
//
//   [mc]                   # optional; enables the Monte Carlo columns
//   n = 10000
//   seed = 0
//   dt = 1e-4
//   r_max = 10             # skip Monte Carlo above this rate
//
// '#' and ';' start comments. Unknown sections and keys are errors.

namespace covertime {

enum class Scenario {
  Bm1dUnconstrained,
  Bm1dConstrained,
  Rtp1dUnconstrained,
  Rtp1dConstrained,
  Network
};

std::string scenario_name(Scenario s);

struct SeriesConfig {
  std::string name;
  Scenario scenario = Scenario::Bm1dUnconstrained;
  double a = 0, b = 0;
  double diffusivity = 0;  // D
  double detection_radius = 0;
  double speed = 0, switch_rate = 0;
  RtpFormula rtp_formula = RtpFormula::Published;
  std::string network_path;  // resolved against the config directory
  ClockFamily clock = ClockFamily::Exponential;
  double clock_shape = 1.0;  // GammaUnitMean
  std::optional<NetworkSpec> network;
  int line = 0;  // where the block starts

  ResetClock make_clock(double r) const;
};

struct McSettings {
  SimConfig sim;
  double r_max = 0;  // 0 = no cap
  NetworkSamplerMethod network_sampler = NetworkSamplerMethod::Auto;
};

struct SweepConfig {
  std::string path;
  std::vector<double> r_grid;
  std::vector<SeriesConfig> series;
  std::optional<McSettings> mc;
  /// Keys that took their default value, for the echo.
  std::vector<std::string> defaults_applied;

  /// Human-readable summary of the effective settings.
  std::string echo() const;
};

/// Strict parse. Throws ValidationError "path:line: message" on missing
/// file, syntax errors, unknown keys (with a suggestion), and invalid values.
SweepConfig parse_config(const std::string& path);
SweepConfig parse_config_text(const std::string& text, const std::string& path = "<config>");

/// CSV columns, in order.
inline constexpr const char* kSweepCsvHeader =
    "series,scenario,r,exact,asymptotic,mc_mean,mc_se,n_samples,rel_err_asym";

/// One row per (series, r) in config order. Refused quantities are left
/// empty and explained on `notes`. Floats use 17 significant digits.
std::string run_sweep(const SweepConfig& config, std::ostream& notes);

/// Writes per-curve two-column .dat files and plot.gp (gnuplot, log-log)
/// into `directory`. Returns the files written. `style` must be "gnuplot".
std::vector<std::string> emit_plot_data(const std::string& csv, const std::string& directory,
                                        const std::string& style = "gnuplot");

}  // namespace covertime
