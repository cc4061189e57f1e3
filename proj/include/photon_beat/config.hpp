#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "photon_beat/events.hpp"
#include "photon_beat/histogram.hpp"

namespace photon_beat {

enum class RunKind { pair, p1 };

/// Everything a simulate / hist / fit chain needs, read from a flat
/// `key = value` file. Keys carry their display unit (`_us`, `_mhz`, ...);
/// a value may override it with an explicit suffix, e.g. `delta_t_us = 360ns`.
/// Blank lines and lines starting with '#' are ignored; unknown keys are errors.
struct SimulationConfig {
    RunConfig run{};
    RunKind kind = RunKind::pair;
    double bin_width = 48e-9;
    BackgroundMode background = BackgroundMode::a_priori;
};

/// Defaults: a 384.23 THz photon of 0.36 us duration at tau0 = 2.5 us, no jitter.
SimulationConfig default_config();

SimulationConfig parse_config(std::string_view text);
SimulationConfig load_config(const std::filesystem::path& path);

/// Applies one `key = value` assignment. Throws ConfigError.
void apply_setting(SimulationConfig& cfg, std::string_view key, std::string_view value);

/// Canonical text form; parse_config(render_config(c)) reproduces c.
std::string render_config(const SimulationConfig& cfg);

enum class Dimension { time, frequency, plain };

/// Parses "0.36", "360ns", "0.36 us", "2.8MHz" into SI (s or rad/s).
/// `default_unit` is the scale applied when no suffix is given.
double parse_quantity(std::string_view text, Dimension dim, double default_unit);

}  // namespace photon_beat
