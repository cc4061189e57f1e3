#pragma once

#include <array>
#include <complex>
#include <span>

#include "photon_beat/quadrature.hpp"
#include "photon_beat/wavepacket.hpp"

namespace photon_beat {

/// Two photons meeting on a 50/50 beam splitter, detected at outputs 3 and 4.
struct PairConfig {
    GaussianMode mode1;
    GaussianMode mode2;
    /// cos^2 of the polarization angle; also absorbs transverse mode mismatch.
    double cos2_phi = 1.0;
    /// Detector time resolution T, s.
    double detector_resolution = 1e-9;
    double eta3 = 1.0;
    double eta4 = 1.0;

    void validate() const;
    double efficiency_product() const { return eta3 * eta4; }
    bool equal_durations() const { return mode1.delta_t == mode2.delta_t; }
};

/// Lossless beam-splitter matrix [[sqrt(s), sqrt(1-s)], [-sqrt(1-s), sqrt(s)]].
struct BeamSplitterMatrix {
    double sigma = 0.5;
    std::array<std::array<std::complex<double>, 2>, 2> entries{};

    /// Largest |(B^dagger B - 1)_ij|.
    double unitarity_defect() const;
};

BeamSplitterMatrix beam_splitter(double sigma);

struct G2Components {
    double g2_hv = 0.0;           ///< perpendicular-polarization correlation
    double interference_f = 0.0;  ///< phase-dependent interference term F
    double g2_total = 0.0;        ///< g2_hv - cos2_phi * F
};

/// Second-order correlation for a click at detector 3 at t1 and detector 4 at t2.
G2Components g2_components(const PairConfig& pair, double t1, double t2);

/// |xi1(t1) xi2(t2) - xi2(t1) xi1(t2)|^2 / 4, evaluated from the complex mode
/// amplitudes directly.
double g2_parallel_from_amplitudes(const PairConfig& pair, double t1, double t2);

/// (|xi1(t1) xi2(t2)|^2 + |xi1(t2) xi2(t1)|^2) / 4 from the complex amplitudes.
double g2_perpendicular_from_amplitudes(const PairConfig& pair, double t1, double t2);

/// Coincidence probability without time resolution for a frequency
/// difference `delta` and arrival delay `dtau`, including eta3 * eta4.
/// Requires equal photon durations (UnsupportedConfiguration otherwise).
double p2_hom(const PairConfig& pair, double delta, double dtau);

/// Time-resolved joint detection probability per detector-resolution window
/// at detection-time difference `tau` (detector 4 minus detector 3),
/// including eta3 * eta4 * T. Requires equal durations.
double p2_time_resolved(const PairConfig& pair, double delta, double dtau, double tau);

/// Default oracle quadrature: 61-point Gauss-Kronrod panels, two initial
/// panels per level, relative tolerance 1e-8 on the outermost level (inner
/// levels are tightened further).
inline QuadratureOptions oracle_quadrature()
{
    QuadratureOptions o;
    o.rule_points = 61;
    o.initial_intervals = 2;
    return o;
}

/// Quadrature ground truth for the jitter-averaged time-resolved probability:
/// mode 2 is shifted by a frequency offset and a delay drawn from `jitter`
/// (zero width means no averaging over that variable), and
///   eta3 eta4 T * E[ integral dt0 G2(t0, t0 + tau) ]
/// is evaluated by nested adaptive quadrature of raw mode products. Supports
/// unequal durations. Throws NumericalFailure when the budget is exhausted.
double p2_numeric_oracle(const PairConfig& pair, const JitterSpec& jitter, double tau,
                         const QuadratureOptions& opts = oracle_quadrature());

/// Coincidence probability without time resolution from the same quadrature
/// (integral over tau of p2_numeric_oracle / T).
double p2_coincidence_oracle(const PairConfig& pair, const JitterSpec& jitter,
                             const QuadratureOptions& opts = oracle_quadrature());

/// Trapezoidal integral of a sampled curve. Both endpoint values must be below
/// 1e-12 of the curve's largest magnitude (DomainError otherwise).
double tau_integrate(std::span<const double> tau, std::span<const double> values);

}  // namespace photon_beat
