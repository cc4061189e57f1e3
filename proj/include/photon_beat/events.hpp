#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

#include "photon_beat/interference.hpp"
#include "photon_beat/rng.hpp"
#include "photon_beat/wavepacket.hpp"

namespace photon_beat {

/// One click. `time` is measured from the start of its trigger slot.
struct DetectionEvent {
    std::uint64_t trigger_index = 0;
    int detector = 3;  ///< 3 or 4, the beam-splitter output port
    double time = 0.0;

    bool operator==(const DetectionEvent&) const = default;
    /// Orders by (trigger_index, time, detector).
    std::partial_ordering operator<=>(const DetectionEvent& o) const
    {
        if (auto c = trigger_index <=> o.trigger_index; c != 0)
            return c;
        if (auto c = time <=> o.time; c != 0)
            return c;
        return detector <=> o.detector;
    }
};

/// Monte Carlo run description. Pair runs model the two-fiber geometry
/// directly: each trigger slot carries a simultaneously impinging photon pair
/// with probability `pair_probability`.
struct RunConfig {
    GaussianMode mode{};
    /// Pair jitter: frequency difference and arrival-delay laws of the two
    /// photons meeting on the beam splitter.
    JitterSpec jitter{};
    /// Emission jitter of the whole photon stream, expressed like
    /// jitter.sigma_dtau (width of the delay between two independent photons).
    /// Single photons are shifted by a law of width stream_delay_jitter / sqrt(2).
    /// Defaults to jitter.sigma_dtau.
    std::optional<double> stream_delay_jitter;
    double cos2_phi = 1.0;
    std::uint64_t n_triggers = 0;
    double trigger_period = 5.28e-6;
    double pair_delay = 5.28e-6;
    double pair_probability = 0.25;
    double generation_efficiency = 0.25;
    std::array<double, 2> detector_efficiency{0.5, 0.5};  ///< detectors 3 and 4
    double dark_rate = 150.0;                              ///< Hz per detector
    /// Dark-count integration window per trigger; defaults to trigger_period.
    std::optional<double> window;
    /// Clicks are floored to multiples of this; 0 disables quantisation.
    double time_resolution = 1e-9;
    std::uint64_t seed = 1;
    /// Worker threads; 0 picks hardware concurrency. Output does not depend on it.
    unsigned threads = 0;

    void validate() const;
    double window_length() const { return window.value_or(trigger_period); }
    double stream_jitter() const { return stream_delay_jitter.value_or(jitter.sigma_dtau); }
    /// Per-photon emission-time width used by single-photon runs.
    double single_photon_jitter() const;
    /// The pair's beam-splitter description for the given photon modes.
    PairConfig pair_config(const GaussianMode& m1, const GaussianMode& m2) const;
};

/// Single-detector run: the long fiber is closed and clicks are recorded at
/// detector 3 relative to their trigger.
std::vector<DetectionEvent> generate_p1_run(const RunConfig& config);

/// Two-photon interference run at detectors 3 and 4.
std::vector<DetectionEvent> generate_pair_run(const RunConfig& config);

/// Outcome of one photon pair at the beam splitter, before detector losses.
struct PairOutcome {
    bool split = false;  ///< one photon in each output port
    double t3 = 0.0;     ///< click time of the photon leaving through port 3 (or the first photon when bunched)
    double t4 = 0.0;     ///< click time of the photon leaving through port 4 (or the second photon when bunched)
};

/// Draws (t1, t2) from the envelope q = (eps1^2(t1) eps2^2(t2) + eps2^2(t1) eps1^2(t2)) / 2,
/// which bounds G2 pointwise, and accepts with probability G2 / q. Acceptance
/// yields a coincidence sampled exactly from G2; rejection is the
/// complementary same-port outcome, so each call consumes one proposal and
/// P(split) equals the coincidence probability. Throws ConfigError if the
/// envelope bound is ever violated.
PairOutcome sample_pair_outcome(const PairConfig& pair, Xoshiro256& rng);

/// Detector time quantisation: floor to a grid aligned at t = 0.
double quantise(double t, double resolution);

}  // namespace photon_beat
