#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "photon_beat/characterize.hpp"
#include "photon_beat/config.hpp"
#include "photon_beat/errors.hpp"
#include "photon_beat/interference.hpp"
#include "photon_beat/io.hpp"
#include "photon_beat/jitter.hpp"
#include "photon_beat/oracle_suite.hpp"
#include "photon_beat/pipeline.hpp"
#include "photon_beat/units.hpp"

namespace photon_beat::cli {

namespace {

namespace fs = std::filesystem;
using io::Column;
using io::format_double;

constexpr double kOmega0 = 2.0 * units::pi * 384.23e12;
constexpr double kMhz = 2.0 * units::pi * 1e6;

double time_arg(const std::string& s) { return parse_quantity(s, Dimension::time, 1e-6); }
double freq_arg(const std::string& s) { return parse_quantity(s, Dimension::frequency, kMhz); }

void emit(const std::string& path, const std::string& content, std::ostream& out)
{
    if (path.empty() || path == "-")
        out << content;
    else
        io::write_atomic(path, content);
}

std::vector<double> symmetric_grid(double half, int points)
{
    if (points < 2)
        throw ConfigError("--points must be at least 2");
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        g[static_cast<std::size_t>(i)] = -half + 2.0 * half * i / (points - 1);
    // Exact symmetry and an exact zero for odd point counts.
    for (int i = 0; i < points / 2; ++i)
        g[static_cast<std::size_t>(points - 1 - i)] = -g[static_cast<std::size_t>(i)];
    if (points % 2 == 1)
        g[static_cast<std::size_t>(points / 2)] = 0.0;
    return g;
}

std::vector<double> in_us(const std::vector<double>& s)
{
    std::vector<double> v(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        v[i] = units::to_us(s[i]);
    return v;
}

// ---- curves ---------------------------------------------------------------

struct CurvesArgs {
    std::string model;
    std::string dt = "0.36us";
    double cos2phi = 1.0;
    std::string delta = "0";
    std::string dtau = "0";
    std::string dtau_jitter = "0";
    std::string domega = "0";
    std::string resolution = "1ns";
    int points = 1001;
    double span = 5.0;
    std::string output;
};

std::string run_curves(const CurvesArgs& a)
{
    const double dt = time_arg(a.dt);
    const double delta = freq_arg(a.delta);
    const double dtau = time_arg(a.dtau);
    const double resolution = time_arg(a.resolution);
    JitterSpec j;
    j.sigma_dtau = time_arg(a.dtau_jitter);
    j.sigma_delta = freq_arg(a.domega);
    j.mean_delta = delta;

    PairConfig pair;
    pair.mode1 = {kOmega0, dt, 0.0};
    pair.mode2 = pair.mode1;
    pair.cos2_phi = a.cos2phi;
    pair.detector_resolution = resolution;
    pair.validate();
    PairConfig perp = pair;
    perp.cos2_phi = 0.0;

    if (a.model == "hom") {
        const auto x = symmetric_grid(a.span * dt, a.points);
        std::vector<double> v, vp;
        for (double d : x) {
            v.push_back(p2_hom(pair, delta, d));
            vp.push_back(p2_hom(perp, delta, d));
        }
        const Column cols[] = {{"dtau_us", in_us(x)}, {"p_coincidence", v}, {"p_coincidence_perpendicular", vp}};
        return io::columns_csv(cols);
    }
    if (a.model == "time-resolved") {
        const auto x = symmetric_grid(a.span * dt, a.points);
        std::vector<double> v, vp;
        for (double t : x) {
            v.push_back(p2_time_resolved(pair, delta, dtau, t));
            vp.push_back(p2_time_resolved(perp, delta, dtau, t));
        }
        const Column cols[] = {{"tau_us", in_us(x)}, {"p2", v}, {"p2_perpendicular", vp}};
        return io::columns_csv(cols);
    }
    if (a.model == "freq-jitter" || a.model == "emission-jitter" || a.model == "combined") {
        if (a.model == "freq-jitter" && j.sigma_dtau != 0.0)
            throw ConfigError("freq-jitter takes no --dtau-jitter; use 'combined'");
        if (a.model == "emission-jitter" && j.sigma_delta != 0.0)
            throw ConfigError("emission-jitter takes no --domega; use 'combined'");
        const double t1 = widths_from_jitters(dt, j).t1();
        const auto x = symmetric_grid(a.span * t1, a.points);
        std::vector<double> v, vp;
        for (double t : x) {
            v.push_back(p2_jittered(t, dt, j, a.cos2phi, resolution));
            vp.push_back(p2_jittered(t, dt, j, 0.0, resolution));
        }
        const Column cols[] = {{"tau_us", in_us(x)}, {"p2", v}, {"p2_perpendicular", vp}};
        return io::columns_csv(cols);
    }
    throw CLI::ValidationError("model", "unknown model '" + a.model + "'");
}

// ---- simulate / hist ------------------------------------------------------

struct RunArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string events;
    std::string output;
    std::string autocorrelation;
};

SimulationConfig load_with_overrides(const RunArgs& a)
{
    SimulationConfig cfg = load_config(a.config);
    if (a.seed)
        cfg.run.seed = *a.seed;
    if (a.threads)
        cfg.run.threads = *a.threads;
    cfg.run.validate();
    return cfg;
}

void run_simulate(const RunArgs& a, std::ostream& out)
{
    const SimulationConfig cfg = load_with_overrides(a);
    const auto events = cfg.kind == RunKind::pair ? generate_pair_run(cfg.run) : generate_p1_run(cfg.run);
    emit(a.output, io::events_csv(events), out);
    if (!a.output.empty() && a.output != "-")
        out << "wrote " << events.size() << " events to " << a.output << "\n";
}

void run_hist(const RunArgs& a, std::ostream& out)
{
    const SimulationConfig cfg = load_with_overrides(a);
    const auto events = io::parse_events_csv(io::read_file(a.events));
    if (cfg.kind == RunKind::pair) {
        const auto hist = analyse_pair_run(cfg, cfg.run, events);
        emit(a.output, io::histogram_csv(hist), out);
        return;
    }
    const auto density = detection_time_density(events, 3, cfg.bin_width, cfg.run.window_length(), cfg.run.dark_rate,
                                                cfg.run.n_triggers);
    const Column cols[] = {{"t_s", density.times}, {"density_per_s", density.density}};
    emit(a.output, io::columns_csv(cols), out);
    if (!a.autocorrelation.empty()) {
        const auto ac = autocorrelation(density);
        const Column acols[] = {{"lag_s", ac.lags}, {"autocorrelation_per_s", ac.values}};
        emit(a.autocorrelation, io::columns_csv(acols), out);
        out << "t3_us=" << format_double(units::to_us(ac.t3)) << " +- "
            << format_double(units::to_us(ac.t3_uncertainty)) << "\n";
    }
}

// ---- fit ------------------------------------------------------------------

struct FitArgs {
    std::string perpendicular;
    std::string parallel;
    std::string beat;
    double cos2phi = 0.92;
    std::string output;
};

void run_fit(const FitArgs& a, std::ostream& out)
{
    const auto perp = io::parse_histogram_csv(io::read_file(a.perpendicular));
    std::optional<CoincidenceHistogram> par, beat;
    if (!a.parallel.empty())
        par = io::parse_histogram_csv(io::read_file(a.parallel));
    if (!a.beat.empty())
        beat = io::parse_histogram_csv(io::read_file(a.beat));
    const FitResult fit = two_step_fit(perp, par ? &*par : nullptr, beat ? &*beat : nullptr, a.cos2phi);
    emit(a.output, io::fit_json(fit), out);
}

// ---- characterize ---------------------------------------------------------

struct CharacterizeArgs {
    std::string t1;
    std::string t2;
    std::string fit;
    std::size_t points = 101;
    std::string output;
    std::string report;
};

void run_characterize(const CharacterizeArgs& a, std::ostream& out)
{
    double t1 = 0.0, t2 = 0.0;
    if (!a.fit.empty()) {
        const auto j = nlohmann::json::parse(io::read_file(a.fit));
        t1 = j.at("t1_s").get<double>();
        t2 = j.at("t2_s").is_null() ? std::numeric_limits<double>::infinity() : j.at("t2_s").get<double>();
    } else {
        if (a.t1.empty() || a.t2.empty())
            throw ConfigError("characterize needs --t1 and --t2, or --fit");
        t1 = time_arg(a.t1);
        t2 = a.t2 == "inf" ? std::numeric_limits<double>::infinity() : time_arg(a.t2);
    }
    const Characterization c = characterize(WidthPair(t1, t2), a.points);
    emit(a.output, io::locus_csv(c.locus), out);
    if (!a.report.empty())
        io::write_atomic(a.report, io::characterization_json(c));
    if (!a.output.empty() && a.output != "-")
        out << c.statement << "\n";
}

// ---- oracle-check ---------------------------------------------------------

int run_oracle_check(int points, bool verbose, std::ostream& out)
{
    OracleSuiteOptions o;
    o.points_per_axis = points;
    o.on_case = [&](const OracleComparison& c) {
        if (verbose || !c.pass)
            out << (c.pass ? "ok   " : "FAIL ") << c.function << " " << c.parameters
                << " closed=" << format_double(c.closed_form) << " oracle=" << format_double(c.oracle)
                << " rel=" << format_double(c.rel_error) << "\n";
    };
    const auto r = run_oracle_suite(o);
    out << "oracle-check: " << r.cases.size() << " cases, " << r.compared << " compared, " << r.failures
        << " failures, max relative error " << format_double(r.max_rel_error) << "\n";
    return r.all_pass() ? exit_ok : exit_failure;
}

// ---- reproduce-paper ------------------------------------------------------

void run_reproduce(const std::string& preset, const std::string& out_dir, std::optional<std::uint64_t> seed,
                   std::ostream& out)
{
    PipelineSpec spec = source_preset(parse_preset(preset), seed.value_or(1));
    const PipelineResult r = run_pipeline(spec);
    const fs::path dir(out_dir.empty() ? "." : out_dir);
    fs::create_directories(dir);

    io::write_atomic(dir / "config.txt", render_config(spec.base));
    io::write_atomic(dir / "perpendicular_hist.csv", io::histogram_csv(r.perpendicular.histogram));
    io::write_atomic(dir / "parallel_hist.csv", io::histogram_csv(r.parallel.histogram));
    for (std::size_t i = 0; i < r.beats.size(); ++i) {
        const std::string name = "beat_" + std::to_string(i + 1) + "_hist.csv";
        io::write_atomic(dir / name, io::histogram_csv(r.beats[i].histogram));
    }
    io::write_atomic(dir / "fit.json", io::fit_json(r.fit));
    io::write_atomic(dir / "locus.csv", io::locus_csv(r.characterization->locus));
    io::write_atomic(dir / "characterization.json", io::characterization_json(*r.characterization));
    if (r.p1_density) {
        const Column d[] = {{"t_s", r.p1_density->times}, {"density_per_s", r.p1_density->density}};
        io::write_atomic(dir / "p1_density.csv", io::columns_csv(d));
        const Column ac[] = {{"lag_s", r.autocorrelation->lags}, {"autocorrelation_per_s", r.autocorrelation->values}};
        io::write_atomic(dir / "autocorrelation.csv", io::columns_csv(ac));
    }

    auto r4 = [](double v) { return format_double(std::round(v * 1e4) / 1e4); };
    auto us = [&](double s) { return r4(units::to_us(s)); };
    auto mhz = [&](double w) { return r4(units::mhz_from_angular(w)); };
    out << "preset " << preset << ": " << r.perpendicular.histogram.total_detections << " + "
        << r.parallel.histogram.total_detections << " detections\n";
    out << "T1 = " << us(r.fit.t1) << " +- " << us(r.fit.t1_estimate.sigma) << " us\n";
    if (r.fit.t2_estimate)
        out << "T2 = " << us(r.fit.t2_estimate->value) << " +- " << us(r.fit.t2_estimate->sigma) << " us\n";
    for (std::size_t i = 0; i < r.beat_fits.size(); ++i)
        out << "beat " << i + 1 << ": imposed " << mhz(spec.beats[i].delta) << " MHz, fitted "
            << mhz(r.beat_fits[i].delta.value) << " +- " << mhz(r.beat_fits[i].delta.sigma) << " MHz"
            << (r.beat_fits[i].aliasing ? " (aliasing)" : "") << "\n";
    if (r.autocorrelation)
        out << "T3 = " << us(r.autocorrelation->t3) << " us\n";
    out << r.characterization->statement << "\n";
    out << "artifacts written to " << dir.string() << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"photon-beat: two-photon interference of Gaussian photons with jitter"};
    app.set_version_flag("--version", "photon-beat 1.0");
    app.require_subcommand(0, 1);

    std::string preset, out_dir;
    std::optional<std::uint64_t> preset_seed;
    app.add_option("--reproduce-paper", preset, "Run the full chain with a reference source preset")
        ->check(CLI::IsMember({"optimized", "before"}));
    app.add_option("--out-dir", out_dir, "Directory for --reproduce-paper artifacts (default: .)");
    app.add_option("--seed", preset_seed, "Seed for --reproduce-paper");

    CurvesArgs ca;
    auto* curves = app.add_subcommand("curves", "Emit closed-form model curves as CSV");
    curves->add_option("model", ca.model, "hom | time-resolved | freq-jitter | emission-jitter | combined")
        ->required();
    curves->add_option("--dt", ca.dt, "Photon duration (default unit us)")->capture_default_str();
    curves->add_option("--cos2phi", ca.cos2phi, "Polarization/mode overlap cos^2 phi")->capture_default_str();
    curves->add_option("--delta-mhz", ca.delta, "Frequency difference Delta/2pi (default unit MHz)")
        ->capture_default_str();
    curves->add_option("--dtau", ca.dtau, "Arrival delay (default unit us)")->capture_default_str();
    curves->add_option("--dtau-jitter", ca.dtau_jitter, "Emission-time jitter width (default unit us)")
        ->capture_default_str();
    curves->add_option("--domega", ca.domega, "Frequency jitter width delta_omega/2pi (default unit MHz)")
        ->capture_default_str();
    curves->add_option("--resolution", ca.resolution, "Detector resolution T (default unit us)")
        ->capture_default_str();
    curves->add_option("--points", ca.points, "Grid points")->capture_default_str();
    curves->add_option("--span", ca.span, "Half-range in peak widths")->capture_default_str();
    curves->add_option("-o,--output", ca.output, "Output file (default: stdout)");

    RunArgs sa;
    auto* simulate = app.add_subcommand("simulate", "Generate a detection-event log");
    simulate->add_option("--config", sa.config, "key = value run configuration")->required();
    simulate->add_option("--seed", sa.seed, "Override the configured seed");
    simulate->add_option("--threads", sa.threads, "Worker threads (output does not depend on it)");
    simulate->add_option("-o,--output", sa.output, "Event CSV (default: stdout)");

    RunArgs ha;
    auto* hist = app.add_subcommand("hist", "Histogram an event log (pair runs) or bin P1 (p1 runs)");
    hist->add_option("--config", ha.config, "Configuration the events were generated with")->required();
    hist->add_option("--events", ha.events, "Event CSV")->required();
    hist->add_option("--threads", ha.threads, "Histogram worker threads");
    hist->add_option("-o,--output", ha.output, "Histogram CSV (default: stdout)");
    hist->add_option("--autocorrelation", ha.autocorrelation, "p1 runs: also write the autocorrelation CSV");

    FitArgs fa;
    auto* fit = app.add_subcommand("fit", "Two-step fit: peak, then dip, then beat");
    fit->add_option("--perpendicular", fa.perpendicular, "Perpendicular-polarization histogram")->required();
    fit->add_option("--parallel", fa.parallel, "Parallel-polarization histogram");
    fit->add_option("--beat", fa.beat, "Histogram with a frequency difference");
    fit->add_option("--cos2phi", fa.cos2phi, "cos^2 phi of the parallel runs")->capture_default_str();
    fit->add_option("-o,--output", fa.output, "Fit JSON (default: stdout)");

    CharacterizeArgs ka;
    auto* charact = app.add_subcommand("characterize", "Jitter locus and bounds for measured (T1, T2)");
    charact->add_option("--t1", ka.t1, "Peak width T1 (default unit us)");
    charact->add_option("--t2", ka.t2, "Dip width T2 (default unit us, or inf)");
    charact->add_option("--fit", ka.fit, "Read T1 and T2 from a fit JSON");
    charact->add_option("--points", ka.points, "Locus points")->capture_default_str();
    charact->add_option("-o,--output", ka.output, "Locus CSV (default: stdout)");
    charact->add_option("--report", ka.report, "Characterization JSON");

    int oracle_points = 5;
    bool oracle_verbose = false;
    auto* oracle = app.add_subcommand("oracle-check", "Compare every closed form with the quadrature oracle");
    oracle->add_option("--points-per-axis", oracle_points, "Grid points per parameter axis")->capture_default_str();
    oracle->add_flag("--verbose", oracle_verbose, "Print every case");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (!preset.empty()) {
            if (app.get_subcommands().size() > 0)
                throw ConfigError("--reproduce-paper cannot be combined with a subcommand");
            run_reproduce(preset, out_dir, preset_seed, out);
            return exit_ok;
        }
        if (curves->parsed())
            emit(ca.output, run_curves(ca), out);
        else if (simulate->parsed())
            run_simulate(sa, out);
        else if (hist->parsed())
            run_hist(ha, out);
        else if (fit->parsed())
            run_fit(fa, out);
        else if (charact->parsed())
            run_characterize(ka, out);
        else if (oracle->parsed())
            return run_oracle_check(oracle_points, oracle_verbose, out);
        else {
            err << app.help();
            return exit_usage;
        }
        return exit_ok;
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const FitFailure& e) {
        err << "fit failure: " << e.what() << " (iterations " << e.iterations() << ", gradient ratio "
            << format_double(e.gradient_ratio()) << ")\n";
        return exit_failure;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_failure;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_usage;
    } catch (const DomainError& e) {
        err << "invalid parameters: " << e.what() << "\n";
        return exit_usage;
    } catch (const UnsupportedConfiguration& e) {
        err << "unsupported: " << e.what() << "\n";
        return exit_usage;
    } catch (const nlohmann::json::exception& e) {
        err << "malformed JSON: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_failure;
    }
}

}  // namespace photon_beat::cli
