#include "photon_beat/wavepacket.hpp"

#include <cmath>

#include "photon_beat/errors.hpp"
#include "photon_beat/units.hpp"

namespace photon_beat {

namespace {

constexpr double kUnderflow = 1e-300;

double flush(double v) { return v < kUnderflow ? 0.0 : v; }

}  // namespace

void GaussianMode::validate() const
{
    if (!(delta_t > 0.0) || !std::isfinite(delta_t))
        throw DomainError("GaussianMode: delta_t must be positive and finite");
    if (!(omega0 > 0.0) || !std::isfinite(omega0))
        throw DomainError("GaussianMode: omega0 must be positive and finite");
    if (!std::isfinite(tau0))
        throw DomainError("GaussianMode: tau0 must be finite");
}

void JitterSpec::validate() const
{
    if (!std::isfinite(mean_delta) || !std::isfinite(mean_dtau))
        throw DomainError("JitterSpec: means must be finite");
    if (!(sigma_delta >= 0.0) || !std::isfinite(sigma_delta))
        throw DomainError("JitterSpec: sigma_delta must be >= 0");
    if (!(sigma_dtau >= 0.0) || !std::isfinite(sigma_dtau))
        throw DomainError("JitterSpec: sigma_dtau must be >= 0");
}

double gaussian_law(double x, double mean, double width)
{
    if (!(width > 0.0))
        throw DomainError("gaussian_law: width must be positive");
    const double u = (x - mean) / width;
    return std::exp(-u * u) / (std::sqrt(units::pi) * width);
}

double envelope(const GaussianMode& mode, double t)
{
    const double u = (t - mode.tau0) / mode.delta_t;
    const double norm = std::sqrt(std::sqrt(2.0 / (units::pi * mode.delta_t * mode.delta_t)));
    return flush(norm * std::exp(-u * u));
}

std::complex<double> mode_amplitude(const GaussianMode& mode, double t)
{
    return envelope(mode, t) * std::polar(1.0, mode.omega0 * (mode.tau0 - t));
}

std::complex<double> frequency_amplitude(const GaussianMode& mode, double omega)
{
    const double kappa = mode.bandwidth();
    const double u = (omega - mode.omega0) / kappa;
    const double norm = std::sqrt(std::sqrt(2.0 / (units::pi * kappa * kappa)));
    return flush(norm * std::exp(-u * u)) * std::polar(1.0, -omega * mode.tau0);
}

double detection_density(const GaussianMode& mode, double t0)
{
    const double e = envelope(mode, t0);
    return flush(e * e);
}

double average_detection_sigma(const GaussianMode& mode, double emission_jitter_width)
{
    if (!(emission_jitter_width >= 0.0))
        throw DomainError("average_detection_density: jitter width must be >= 0");
    const double variance = mode.delta_t * mode.delta_t / 4.0
                            + emission_jitter_width * emission_jitter_width / 2.0;
    return std::sqrt(variance);
}

double average_detection_density(const GaussianMode& mode, double emission_jitter_width, double t0)
{
    if (emission_jitter_width == 0.0)
        return detection_density(mode, t0);
    const double sigma = average_detection_sigma(mode, emission_jitter_width);
    const double u = (t0 - mode.tau0) / sigma;
    return flush(std::exp(-0.5 * u * u) / (std::sqrt(2.0 * units::pi) * sigma));
}

}  // namespace photon_beat
