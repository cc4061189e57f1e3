#include "photon_beat/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>

#include "photon_beat/errors.hpp"
#include "photon_beat/io.hpp"
#include "photon_beat/units.hpp"

namespace photon_beat {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::string_view(" \t\r").find(s.front()) != std::string_view::npos)
        s.remove_prefix(1);
    while (!s.empty() && std::string_view(" \t\r").find(s.back()) != std::string_view::npos)
        s.remove_suffix(1);
    return s;
}

constexpr double kMhz = 2.0 * units::pi * 1e6;  // rad/s per MHz

struct Unit {
    std::string_view suffix;
    Dimension dim;
    double scale;
};

constexpr Unit kUnits[] = {
    {"s", Dimension::time, 1.0},           {"ms", Dimension::time, 1e-3},
    {"us", Dimension::time, 1e-6},         {"ns", Dimension::time, 1e-9},
    {"ps", Dimension::time, 1e-12},        {"rad/s", Dimension::frequency, 1.0},
    {"Hz", Dimension::frequency, 2.0 * units::pi},
    {"kHz", Dimension::frequency, 2.0 * units::pi * 1e3}, {"MHz", Dimension::frequency, kMhz},
    {"GHz", Dimension::frequency, 2.0 * units::pi * 1e9}, {"THz", Dimension::frequency, 2.0 * units::pi * 1e12},
};

std::uint64_t parse_count(std::string_view v, std::string_view key)
{
    v = trim(v);
    std::uint64_t n = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), n);
    if (r.ec == std::errc{} && r.ptr == v.data() + v.size())
        return n;
    // Accept integral floating forms such as 5.56e5.
    const double d = parse_quantity(v, Dimension::plain, 1.0);
    if (d >= 0.0 && d < 1.8e19 && std::floor(d) == d)
        return static_cast<std::uint64_t>(d);
    throw ConfigError("'" + std::string(key) + "' needs a non-negative integer");
}

using Setter = std::function<void(SimulationConfig&, std::string_view)>;

Setter time_key(double RunConfig::*field)
{
    return [field](SimulationConfig& c, std::string_view v) { c.run.*field = parse_quantity(v, Dimension::time, 1e-6); };
}

Setter plain_key(double RunConfig::*field)
{
    return [field](SimulationConfig& c, std::string_view v) { c.run.*field = parse_quantity(v, Dimension::plain, 1.0); };
}

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table = {
        {"delta_t_us", [](auto& c, auto v) { c.run.mode.delta_t = parse_quantity(v, Dimension::time, 1e-6); }},
        {"tau0_us", [](auto& c, auto v) { c.run.mode.tau0 = parse_quantity(v, Dimension::time, 1e-6); }},
        {"center_frequency_thz",
         [](auto& c, auto v) { c.run.mode.omega0 = parse_quantity(v, Dimension::frequency, 2.0 * units::pi * 1e12); }},
        {"mean_delta_mhz", [](auto& c, auto v) { c.run.jitter.mean_delta = parse_quantity(v, Dimension::frequency, kMhz); }},
        {"sigma_delta_mhz",
         [](auto& c, auto v) { c.run.jitter.sigma_delta = parse_quantity(v, Dimension::frequency, kMhz); }},
        {"mean_dtau_us", [](auto& c, auto v) { c.run.jitter.mean_dtau = parse_quantity(v, Dimension::time, 1e-6); }},
        {"sigma_dtau_us", [](auto& c, auto v) { c.run.jitter.sigma_dtau = parse_quantity(v, Dimension::time, 1e-6); }},
        {"stream_dtau_us",
         [](auto& c, auto v) { c.run.stream_delay_jitter = parse_quantity(v, Dimension::time, 1e-6); }},
        {"cos2phi", plain_key(&RunConfig::cos2_phi)},
        {"n_triggers", [](auto& c, auto v) { c.run.n_triggers = parse_count(v, "n_triggers"); }},
        {"trigger_period_us", time_key(&RunConfig::trigger_period)},
        {"pair_delay_us", time_key(&RunConfig::pair_delay)},
        {"pair_probability", plain_key(&RunConfig::pair_probability)},
        {"generation_efficiency", plain_key(&RunConfig::generation_efficiency)},
        {"detector_efficiency_3",
         [](auto& c, auto v) { c.run.detector_efficiency[0] = parse_quantity(v, Dimension::plain, 1.0); }},
        {"detector_efficiency_4",
         [](auto& c, auto v) { c.run.detector_efficiency[1] = parse_quantity(v, Dimension::plain, 1.0); }},
        {"dark_rate_hz", plain_key(&RunConfig::dark_rate)},
        {"window_us", [](auto& c, auto v) { c.run.window = parse_quantity(v, Dimension::time, 1e-6); }},
        {"time_resolution_us", time_key(&RunConfig::time_resolution)},
        {"seed", [](auto& c, auto v) { c.run.seed = parse_count(v, "seed"); }},
        {"threads", [](auto& c, auto v) { c.run.threads = static_cast<unsigned>(parse_count(v, "threads")); }},
        {"bin_width_us", [](auto& c, auto v) { c.bin_width = parse_quantity(v, Dimension::time, 1e-6); }},
        {"background_mode",
         [](auto& c, auto v) {
             if (v == "a_priori")
                 c.background = BackgroundMode::a_priori;
             else if (v == "fitted_tails")
                 c.background = BackgroundMode::fitted_tails;
             else
                 throw ConfigError("background_mode must be a_priori or fitted_tails");
         }},
        {"run_kind",
         [](auto& c, auto v) {
             if (v == "pair")
                 c.kind = RunKind::pair;
             else if (v == "p1")
                 c.kind = RunKind::p1;
             else
                 throw ConfigError("run_kind must be pair or p1");
         }},
    };
    return table;
}

}  // namespace

double parse_quantity(std::string_view text, Dimension dim, double default_unit)
{
    text = trim(text);
    double v = 0.0;
    const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (r.ec != std::errc{} || !std::isfinite(v))
        throw ConfigError("malformed number '" + std::string(text) + "'");
    const auto suffix = trim(std::string_view(r.ptr, static_cast<std::size_t>(text.data() + text.size() - r.ptr)));
    if (suffix.empty())
        return v * default_unit;
    for (const auto& u : kUnits)
        if (u.suffix == suffix) {
            if (u.dim != dim)
                throw ConfigError("unit '" + std::string(suffix) + "' does not fit this quantity");
            return v * u.scale;
        }
    throw ConfigError("unknown unit '" + std::string(suffix) + "'");
}

SimulationConfig default_config()
{
    SimulationConfig c;
    c.run.mode.omega0 = units::angular_from_thz(384.23);
    c.run.mode.delta_t = units::from_us(0.36);
    c.run.mode.tau0 = units::from_us(2.5);
    c.run.n_triggers = 100000;
    return c;
}

void apply_setting(SimulationConfig& cfg, std::string_view key, std::string_view value)
{
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end())
        throw ConfigError("unknown config key '" + std::string(key) + "'");
    it->second(cfg, trim(value));
}

SimulationConfig parse_config(std::string_view text)
{
    SimulationConfig cfg = default_config();
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        try {
            apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    cfg.run.validate();
    return cfg;
}

SimulationConfig load_config(const std::filesystem::path& path) { return parse_config(io::read_file(path)); }

std::string render_config(const SimulationConfig& c)
{
    using io::format_double;
    const auto& r = c.run;
    std::string s = "# photon-beat v1 run configuration\n";
    auto put = [&](std::string_view k, const std::string& v) {
        s += k;
        s += " = ";
        s += v;
        s += '\n';
    };
    auto us = [](double t) { return format_double(t) + "s"; };
    auto hz = [](double w) { return format_double(w) + "rad/s"; };
    put("run_kind", c.kind == RunKind::pair ? "pair" : "p1");
    put("delta_t_us", us(r.mode.delta_t));
    put("tau0_us", us(r.mode.tau0));
    put("center_frequency_thz", hz(r.mode.omega0));
    put("mean_delta_mhz", hz(r.jitter.mean_delta));
    put("sigma_delta_mhz", hz(r.jitter.sigma_delta));
    put("mean_dtau_us", us(r.jitter.mean_dtau));
    put("sigma_dtau_us", us(r.jitter.sigma_dtau));
    if (r.stream_delay_jitter)
        put("stream_dtau_us", us(*r.stream_delay_jitter));
    put("cos2phi", format_double(r.cos2_phi));
    put("n_triggers", std::to_string(r.n_triggers));
    put("trigger_period_us", us(r.trigger_period));
    put("pair_delay_us", us(r.pair_delay));
    put("pair_probability", format_double(r.pair_probability));
    put("generation_efficiency", format_double(r.generation_efficiency));
    put("detector_efficiency_3", format_double(r.detector_efficiency[0]));
    put("detector_efficiency_4", format_double(r.detector_efficiency[1]));
    put("dark_rate_hz", format_double(r.dark_rate));
    if (r.window)
        put("window_us", us(*r.window));
    put("time_resolution_us", us(r.time_resolution));
    put("seed", std::to_string(r.seed));
    put("threads", std::to_string(r.threads));
    put("bin_width_us", us(c.bin_width));
    put("background_mode", c.background == BackgroundMode::a_priori ? "a_priori" : "fitted_tails");
    return s;
}

}  // namespace photon_beat
