#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "photon_beat/characterize.hpp"
#include "photon_beat/config.hpp"
#include "photon_beat/events.hpp"
#include "photon_beat/fitting.hpp"
#include "photon_beat/histogram.hpp"

namespace photon_beat {

/// A simulate -> histogram -> fit -> characterize chain. The perpendicular
/// run uses cos2_phi = 0, the parallel run the configured cos2_phi, and each
/// beat run adds a mean frequency difference to the parallel configuration.
struct PipelineSpec {
    SimulationConfig base;
    struct Beat {
        double delta = 0.0;            ///< imposed mean frequency difference, rad/s
        std::uint64_t n_triggers = 0;  ///< 0 keeps the base run length
    };
    std::vector<Beat> beats;
    /// Triggers of the single-detector run feeding the autocorrelation; 0 skips it.
    std::uint64_t p1_triggers = 0;
    bool keep_events = false;
};

struct PipelineRun {
    RunConfig config;
    std::vector<DetectionEvent> events;  ///< empty unless keep_events
    CoincidenceHistogram histogram;      ///< background-corrected
};

struct PipelineResult {
    PipelineRun perpendicular;
    PipelineRun parallel;
    std::vector<PipelineRun> beats;
    std::vector<BeatFit> beat_fits;
    FitResult fit;
    std::optional<Characterization> characterization;
    std::optional<DensityCurve> p1_density;
    std::optional<Autocorrelation> autocorrelation;
};

/// Histogram of a pair run with the configured background treatment.
CoincidenceHistogram analyse_pair_run(const SimulationConfig& cfg, const RunConfig& run,
                                      const std::vector<DetectionEvent>& events);

PipelineResult run_pipeline(const PipelineSpec& spec);

enum class SourcePreset { optimized, before };

/// Reference source parameters. optimized: delta_t = 0.36 us, pair emission
/// jitter 0.53 us, stream jitter sqrt(0.81^2 - 0.36^2) us, 48 ns bins,
/// beat runs at 2.8 and 3.8 MHz with
/// about 2e5 and 3e5 detections. before: delta_t = 0.29 us, pair jitter
/// 0.82 us, stream jitter sqrt(1.07^2 - 0.29^2) us, 120 ns bins.
PipelineSpec source_preset(SourcePreset which, std::uint64_t seed = 1);
SourcePreset parse_preset(std::string_view name);

}  // namespace photon_beat
