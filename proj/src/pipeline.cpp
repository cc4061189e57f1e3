#include "photon_beat/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "photon_beat/errors.hpp"
#include "photon_beat/units.hpp"

namespace photon_beat {

namespace {

constexpr std::uint64_t kSeedStride = 0x9e3779b97f4a7c15ULL;

PipelineRun run_pair(const PipelineSpec& spec, RunConfig run)
{
    PipelineRun out;
    auto events = generate_pair_run(run);
    out.histogram = analyse_pair_run(spec.base, run, events);
    if (spec.keep_events)
        out.events = std::move(events);
    out.config = std::move(run);
    return out;
}

}  // namespace

CoincidenceHistogram analyse_pair_run(const SimulationConfig& cfg, const RunConfig& run,
                                      const std::vector<DetectionEvent>& events)
{
    const unsigned threads = run.threads == 0 ? 1u : run.threads;
    auto hist = build_histogram(events, cfg.bin_width, run.pair_delay, threads);
    if (cfg.background == BackgroundMode::a_priori)
        return correct_background(std::move(hist), run.dark_rate,
                                  static_cast<double>(run.n_triggers) * run.window_length());
    return correct_background_from_tails(std::move(hist));
}

PipelineResult run_pipeline(const PipelineSpec& spec)
{
    const RunConfig& base = spec.base.run;
    base.validate();
    PipelineResult r;

    RunConfig perp = base;
    perp.cos2_phi = 0.0;
    perp.seed = base.seed;
    r.perpendicular = run_pair(spec, perp);

    RunConfig par = base;
    par.seed = base.seed + kSeedStride;
    r.parallel = run_pair(spec, par);

    for (std::size_t i = 0; i < spec.beats.size(); ++i) {
        RunConfig beat = base;
        beat.jitter.mean_delta = spec.beats[i].delta;
        if (spec.beats[i].n_triggers > 0)
            beat.n_triggers = spec.beats[i].n_triggers;
        beat.seed = base.seed + (i + 2) * kSeedStride;
        r.beats.push_back(run_pair(spec, beat));
    }

    r.fit = two_step_fit(r.perpendicular.histogram, &r.parallel.histogram, nullptr, base.cos2_phi);
    for (const auto& b : r.beats) {
        const FitResult f = two_step_fit(r.perpendicular.histogram, &r.parallel.histogram, &b.histogram,
                                         base.cos2_phi);
        BeatFit bf;
        bf.delta = *f.delta_estimate;
        bf.aliasing = std::find(f.flags.begin(), f.flags.end(), "aliasing") != f.flags.end();
        r.beat_fits.push_back(bf);
    }
    r.characterization =
        characterize(WidthPair(r.fit.t1, r.fit.t2.value_or(std::numeric_limits<double>::infinity())));

    if (spec.p1_triggers > 0) {
        RunConfig p1 = base;
        p1.n_triggers = spec.p1_triggers;
        p1.seed = base.seed + 101 * kSeedStride;
        const auto events = generate_p1_run(p1);
        r.p1_density = detection_time_density(events, 3, spec.base.bin_width, p1.window_length(), p1.dark_rate,
                                              p1.n_triggers);
        r.autocorrelation = autocorrelation(*r.p1_density);
    }
    return r;
}

PipelineSpec source_preset(SourcePreset which, std::uint64_t seed)
{
    PipelineSpec s;
    s.base = default_config();
    auto& run = s.base.run;
    run.cos2_phi = 0.92;
    run.seed = seed;
    if (which == SourcePreset::optimized) {
        run.mode.delta_t = units::from_us(0.36);
        run.jitter.sigma_dtau = units::from_us(0.53);
        run.stream_delay_jitter = units::from_us(std::sqrt(0.81 * 0.81 - 0.36 * 0.36));
        run.n_triggers = 556000;
        s.base.bin_width = 48e-9;
        s.beats = {{units::angular_from_mhz(2.8), 800000}, {units::angular_from_mhz(3.8), 1200000}};
    } else {
        run.mode.delta_t = units::from_us(0.29);
        run.jitter.sigma_dtau = units::from_us(0.82);
        run.stream_delay_jitter = units::from_us(std::sqrt(1.07 * 1.07 - 0.29 * 0.29));
        run.n_triggers = 292000;
        s.base.bin_width = 120e-9;
    }
    s.p1_triggers = 200000;
    return s;
}

SourcePreset parse_preset(std::string_view name)
{
    if (name == "optimized")
        return SourcePreset::optimized;
    if (name == "before")
        return SourcePreset::before;
    throw ConfigError("preset must be 'optimized' or 'before'");
}

}  // namespace photon_beat
