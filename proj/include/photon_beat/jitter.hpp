#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "photon_beat/wavepacket.hpp"

namespace photon_beat {

/// Widths of the perpendicular-polarization peak (T1) and of the
/// parallel-polarization dip (T2). T2 is stored as 1/T2^2 so that the
/// "no dip narrowing" limit (T2 -> infinity) is representable as zero.
class WidthPair {
public:
    WidthPair() = default;
    /// Throws DomainError unless t1 > 0 and t2 > 0 (t2 may be +infinity).
    WidthPair(double t1, double t2);
    static WidthPair from_inverse_square(double t1, double inv_t2_sq);

    double t1() const { return t1_; }
    double t2() const;
    double inv_t2_sq() const { return inv_t2_sq_; }

private:
    double t1_ = 1.0;
    double inv_t2_sq_ = 0.0;
};

/// A jitter combination compatible with a measured WidthPair.
struct LocusPoint {
    double delta_omega = 0.0;  ///< frequency-jitter width, rad/s
    double delta_tau = 0.0;    ///< emission-delay jitter width, s
    double delta_t = 0.0;      ///< implied photon duration, s
};

enum class PureCase { frequency_only, emission_only };

/// Jitter-averaged time-resolved joint detection probability for
/// simultaneously impinging photons of duration delta_t (unit efficiencies):
///   T / (2 sqrt(pi) T1) exp(-tau^2/T1^2) [1 - cos2_phi cos(mean_delta tau) exp(-tau^2/T2^2)]
/// with T1^2 = delta_t^2 + Delta_tau^2 and 1/T2^2 = delta_omega^2/4 + Delta_tau^2/(delta_t^2 T1^2).
/// A nonzero mean frequency difference only contributes the cosine; a nonzero
/// mean delay is rejected with UnsupportedConfiguration.
double p2_jittered(double tau, double delta_t, const JitterSpec& jitter, double cos2_phi, double T);

/// Coincidence probability without time resolution at mean arrival delay
/// `dtau`, averaged over at most one kind of zero-mean jitter.
double hom_jittered(double dtau, double delta_t, const JitterSpec& jitter, double cos2_phi);

WidthPair widths_from_jitters(double delta_t, const JitterSpec& jitter);

/// All (delta_omega, Delta_tau) pairs that reproduce `widths`, sampled
/// uniformly in Delta_tau from the pure-frequency endpoint (Delta_tau = 0)
/// to the pure-emission endpoint (delta_omega = 0). When T2 is infinite the
/// locus degenerates to the single point (0, 0, T1).
std::vector<LocusPoint> jitter_locus(const WidthPair& widths, std::size_t n_points);

/// Largest emission-delay jitter compatible with `widths`: T1^2 / sqrt(T1^2 + T2^2).
double max_emission_jitter(const WidthPair& widths);

LocusPoint pure_case_inversion(const WidthPair& widths, PureCase which);

/// Locus point at a given emission-delay jitter, 0 <= delta_tau <= max_emission_jitter.
LocusPoint locus_point_at(const WidthPair& widths, double delta_tau);

}  // namespace photon_beat
