#include "photon_beat/interference.hpp"

#include <algorithm>
#include <cmath>

#include "photon_beat/errors.hpp"
#include "photon_beat/units.hpp"

namespace photon_beat {

void PairConfig::validate() const
{
    mode1.validate();
    mode2.validate();
    if (!(cos2_phi >= 0.0 && cos2_phi <= 1.0))
        throw DomainError("PairConfig: cos2_phi must lie in [0, 1]");
    if (!(detector_resolution > 0.0) || !std::isfinite(detector_resolution))
        throw DomainError("PairConfig: detector resolution must be positive");
    if (!(eta3 >= 0.0 && eta3 <= 1.0) || !(eta4 >= 0.0 && eta4 <= 1.0))
        throw DomainError("PairConfig: detector efficiencies must lie in [0, 1]");
}

double BeamSplitterMatrix::unitarity_defect() const
{
    double worst = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            std::complex<double> sum = 0.0;
            for (int k = 0; k < 2; ++k)
                sum += std::conj(entries[k][i]) * entries[k][j];
            worst = std::max(worst, std::abs(sum - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

BeamSplitterMatrix beam_splitter(double sigma)
{
    if (!(sigma > 0.0 && sigma < 1.0))
        throw DomainError("beam_splitter: transmission must lie in (0, 1)");
    const double t = std::sqrt(sigma);
    const double r = std::sqrt(1.0 - sigma);
    BeamSplitterMatrix b;
    b.sigma = sigma;
    b.entries = {{{t, r}, {-r, t}}};
    return b;
}

G2Components g2_components(const PairConfig& pair, double t1, double t2)
{
    const double e1t1 = envelope(pair.mode1, t1);
    const double e1t2 = envelope(pair.mode1, t2);
    const double e2t1 = envelope(pair.mode2, t1);
    const double e2t2 = envelope(pair.mode2, t2);
    const double direct = e1t1 * e2t2;
    const double exchanged = e1t2 * e2t1;

    // Phi_j(t) = omega0_j (t - tau0_j); the phase sum collapses to Delta * (t2 - t1).
    const double delta = pair.mode2.omega0 - pair.mode1.omega0;
    G2Components g;
    g.g2_hv = (direct * direct + exchanged * exchanged) / 4.0;
    g.interference_f = direct * exchanged / 2.0 * std::cos(delta * (t2 - t1));
    g.g2_total = std::max(0.0, g.g2_hv - pair.cos2_phi * g.interference_f);
    return g;
}

namespace {

// Amplitudes in a frame rotating at mode 1's carrier. |products|^2 are
// unchanged, but the phases stay small enough to keep full precision.
struct RotatingPair {
    GaussianMode m1, m2;
    explicit RotatingPair(const PairConfig& pair) : m1(pair.mode1), m2(pair.mode2)
    {
        m2.omega0 = pair.mode2.omega0 - pair.mode1.omega0;
        m1.omega0 = 0.0;
    }
};

double hh_from(const GaussianMode& m1, const GaussianMode& m2, double t1, double t2)
{
    const auto d = mode_amplitude(m1, t1) * mode_amplitude(m2, t2)
                   - mode_amplitude(m2, t1) * mode_amplitude(m1, t2);
    return std::norm(d) / 4.0;
}

double hv_from(const GaussianMode& m1, const GaussianMode& m2, double t1, double t2)
{
    return (std::norm(mode_amplitude(m1, t1) * mode_amplitude(m2, t2))
            + std::norm(mode_amplitude(m1, t2) * mode_amplitude(m2, t1)))
           / 4.0;
}

void require_equal_durations(const PairConfig& pair, const char* who)
{
    if (!pair.equal_durations())
        throw UnsupportedConfiguration(std::string(who)
                                       + ": closed form needs equal photon durations; "
                                         "use p2_numeric_oracle for unequal durations");
}

}  // namespace

double g2_parallel_from_amplitudes(const PairConfig& pair, double t1, double t2)
{
    RotatingPair r(pair);
    return hh_from(r.m1, r.m2, t1, t2);
}

double g2_perpendicular_from_amplitudes(const PairConfig& pair, double t1, double t2)
{
    RotatingPair r(pair);
    return hv_from(r.m1, r.m2, t1, t2);
}

double p2_hom(const PairConfig& pair, double delta, double dtau)
{
    pair.validate();
    require_equal_durations(pair, "p2_hom");
    const double dt = pair.mode1.delta_t;
    const double overlap = std::exp(-dt * dt * delta * delta / 4.0) * std::exp(-dtau * dtau / (dt * dt));
    return 0.5 * pair.efficiency_product() * (1.0 - pair.cos2_phi * overlap);
}

double p2_time_resolved(const PairConfig& pair, double delta, double dtau, double tau)
{
    pair.validate();
    require_equal_durations(pair, "p2_time_resolved");
    const double dt = pair.mode1.delta_t;
    const double dt2 = dt * dt;
    const double common = std::exp(-(dtau * dtau + tau * tau) / dt2);
    const double beat = 0.5 * (1.0 - pair.cos2_phi * std::cos(delta * tau)) * common;
    // sinh^2(x) e^{-a} written without overflow: exponents 2x - a = -(tau - dtau)^2 / dt^2.
    const double sinh2 = (std::exp(-(tau - dtau) * (tau - dtau) / dt2) - 2.0 * common
                          + std::exp(-(tau + dtau) * (tau + dtau) / dt2))
                         / 4.0;
    const double bracket = beat + std::max(0.0, sinh2);
    return pair.efficiency_product() * pair.detector_resolution / (std::sqrt(units::pi) * dt) * bracket;
}

double tau_integrate(std::span<const double> tau, std::span<const double> values)
{
    if (tau.size() != values.size() || tau.size() < 2)
        throw DomainError("tau_integrate: need at least two samples of matching length");
    double peak = 0.0;
    for (double v : values)
        peak = std::max(peak, std::abs(v));
    const double limit = 1e-12 * peak;
    if (std::abs(values.front()) > limit || std::abs(values.back()) > limit)
        throw DomainError("tau_integrate: curve has not decayed at the grid endpoints");
    double sum = 0.0;
    for (std::size_t i = 1; i < tau.size(); ++i) {
        const double h = tau[i] - tau[i - 1];
        if (!(h > 0.0))
            throw DomainError("tau_integrate: grid must be strictly increasing");
        sum += 0.5 * h * (values[i] + values[i - 1]);
    }
    return sum;
}

}  // namespace photon_beat
