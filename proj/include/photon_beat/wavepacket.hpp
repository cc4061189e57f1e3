#pragma once

#include <complex>

namespace photon_beat {

// Width convention
// ----------------
// Every width in this library is a 1/e half-width of the *amplitude*
// Gaussian, i.e. a Gaussian is written exp(-x^2 / w^2), never
// exp(-x^2 / (2 sigma^2)). The two differ by sqrt(2): w = sqrt(2) * sigma.
// A photon of duration delta_t therefore has a detection density
// exp(-2 (t - tau0)^2 / delta_t^2) whose standard deviation is delta_t / 2,
// and its spectral amplitude has width kappa = 2 / delta_t.

/// One photon's spatiotemporal mode at the detector plane (z = 0).
struct GaussianMode {
    double omega0 = 0.0;   ///< centre angular frequency, rad/s
    double delta_t = 0.0;  ///< duration, s
    double tau0 = 0.0;     ///< emission (arrival) time, s

    /// Throws DomainError unless delta_t > 0 and omega0 > 0.
    void validate() const;

    /// Spectral width kappa = 2 / delta_t.
    double bandwidth() const { return 2.0 / delta_t; }

    /// False when kappa >= 0.01 omega0; the mode is still usable but the
    /// slowly-varying-envelope description is no longer trustworthy.
    bool is_narrow_band() const { return bandwidth() < 0.01 * omega0; }
};

/// Gaussian laws of the shot-to-shot frequency difference Delta and of the
/// arrival delay delta-tau between the two photons of a pair. A zero width
/// means a delta distribution.
struct JitterSpec {
    double mean_delta = 0.0;   ///< rad/s
    double sigma_delta = 0.0;  ///< delta-omega, rad/s
    double mean_dtau = 0.0;    ///< s
    double sigma_dtau = 0.0;   ///< Delta-tau, s

    void validate() const;
    bool has_frequency_jitter() const { return sigma_delta > 0.0; }
    bool has_emission_jitter() const { return sigma_dtau > 0.0; }
};

/// exp(-(x - mean)^2 / width^2) / (sqrt(pi) width); the normalised jitter law.
double gaussian_law(double x, double mean, double width);

/// Real envelope epsilon(t), normalised so that the integral of its square is 1.
/// Values below 1e-300 are flushed to zero.
double envelope(const GaussianMode& mode, double t);

/// xi(t) = epsilon(t) exp(i omega0 (tau0 - t)).
std::complex<double> mode_amplitude(const GaussianMode& mode, double t);

/// Spectral amplitude chi(omega) of the same mode,
/// (2 / (pi kappa^2))^(1/4) exp(-(omega - omega0)^2 / kappa^2) exp(-i omega tau0).
/// With this phase convention xi(t) = (2 pi)^(-1/2) * integral conj(chi(omega)) exp(-i omega t).
std::complex<double> frequency_amplitude(const GaussianMode& mode, double omega);

/// |xi(t0)|^2 in 1/s. Detector efficiency and resolution are applied by callers.
double detection_density(const GaussianMode& mode, double t0);

/// Detection density averaged over a Gaussian emission-time law of width
/// `emission_jitter_width` (per photon, same width convention). The result is a
/// normal density of variance delta_t^2 / 4 + emission_jitter_width^2 / 2.
/// Frequency jitter has no effect on this quantity, so it takes none.
double average_detection_density(const GaussianMode& mode, double emission_jitter_width, double t0);

/// Standard deviation of average_detection_density.
double average_detection_sigma(const GaussianMode& mode, double emission_jitter_width);

}  // namespace photon_beat
