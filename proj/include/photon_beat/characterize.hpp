#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "photon_beat/fitting.hpp"
#include "photon_beat/jitter.hpp"

namespace photon_beat {

/// Physical reading of a measured (T1, T2): every jitter combination that
/// explains both widths, and the bounds they imply.
struct Characterization {
    WidthPair widths;
    LocusPoint pure_frequency;  ///< Delta_tau = 0 endpoint
    LocusPoint pure_emission;   ///< delta_omega = 0 endpoint
    std::vector<LocusPoint> locus;
    double min_photon_duration = 0.0;  ///< s
    double max_emission_jitter = 0.0;  ///< s
    double max_frequency_jitter = 0.0; ///< rad/s
    std::string statement;
};

Characterization characterize(const WidthPair& widths, std::size_t n_points = 101);

/// Smallest Mahalanobis distance squared between the measured widths and the
/// widths implied by (delta_t, delta_tau, delta_omega), minimised over the
/// unobserved photon duration delta_t. Within joint 2 sigma means <= 6.18
/// (chi-square, two degrees of freedom, 95.45%).
double locus_distance_sq(const WidthPair& measured, const WidthCovariance& cov, double delta_tau,
                         double delta_omega);

inline constexpr double joint_two_sigma_chi2 = 6.180;

}  // namespace photon_beat
