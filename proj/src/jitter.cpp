#include "photon_beat/jitter.hpp"

#include <algorithm>
#include <cmath>

#include "photon_beat/errors.hpp"
#include "photon_beat/units.hpp"

namespace photon_beat {

WidthPair::WidthPair(double t1, double t2)
{
    if (!(t1 > 0.0) || !std::isfinite(t1))
        throw DomainError("WidthPair: T1 must be positive and finite");
    if (!(t2 > 0.0))
        throw DomainError("WidthPair: T2 must be positive");
    t1_ = t1;
    inv_t2_sq_ = std::isinf(t2) ? 0.0 : 1.0 / (t2 * t2);
}

WidthPair WidthPair::from_inverse_square(double t1, double inv_t2_sq)
{
    if (!(inv_t2_sq >= 0.0) || !std::isfinite(inv_t2_sq))
        throw DomainError("WidthPair: 1/T2^2 must be finite and >= 0");
    WidthPair w(t1, std::numeric_limits<double>::infinity());
    w.inv_t2_sq_ = inv_t2_sq;
    return w;
}

double WidthPair::t2() const
{
    return inv_t2_sq_ == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / std::sqrt(inv_t2_sq_);
}

WidthPair widths_from_jitters(double delta_t, const JitterSpec& jitter)
{
    if (!(delta_t > 0.0))
        throw DomainError("widths_from_jitters: delta_t must be positive");
    jitter.validate();
    const double dt2 = delta_t * delta_t;
    const double jt2 = jitter.sigma_dtau * jitter.sigma_dtau;
    const double t1_sq = dt2 + jt2;
    const double inv_t2_sq = jitter.sigma_delta * jitter.sigma_delta / 4.0 + jt2 / (dt2 * t1_sq);
    return WidthPair::from_inverse_square(std::sqrt(t1_sq), inv_t2_sq);
}

double p2_jittered(double tau, double delta_t, const JitterSpec& jitter, double cos2_phi, double T)
{
    if (!(delta_t > 0.0))
        throw DomainError("p2_jittered: delta_t must be positive");
    if (jitter.mean_dtau != 0.0)
        throw UnsupportedConfiguration("p2_jittered: closed form assumes simultaneously impinging photons");
    const WidthPair w = widths_from_jitters(delta_t, jitter);
    const double t1 = w.t1();
    const double peak = std::exp(-tau * tau / (t1 * t1));
    const double dip = std::cos(jitter.mean_delta * tau) * std::exp(-tau * tau * w.inv_t2_sq());
    return T / (2.0 * std::sqrt(units::pi) * t1) * peak * (1.0 - cos2_phi * dip);
}

double hom_jittered(double dtau, double delta_t, const JitterSpec& jitter, double cos2_phi)
{
    if (!(delta_t > 0.0))
        throw DomainError("hom_jittered: delta_t must be positive");
    jitter.validate();
    if (jitter.mean_delta != 0.0 || jitter.mean_dtau != 0.0)
        throw UnsupportedConfiguration("hom_jittered: jitter laws must be zero-mean");
    if (jitter.has_frequency_jitter() && jitter.has_emission_jitter())
        throw UnsupportedConfiguration(
            "hom_jittered: no closed form for simultaneous frequency and emission jitter; "
            "integrate p2_jittered over tau instead");
    const double dt2 = delta_t * delta_t;
    double depth = 1.0;
    double width_sq = dt2;
    if (jitter.has_frequency_jitter()) {
        depth = 2.0 / std::sqrt(4.0 + dt2 * jitter.sigma_delta * jitter.sigma_delta);
    } else if (jitter.has_emission_jitter()) {
        const double jt2 = jitter.sigma_dtau * jitter.sigma_dtau;
        depth = 1.0 / std::sqrt(1.0 + jt2 / dt2);
        width_sq = dt2 + jt2;
    }
    return 0.5 * (1.0 - cos2_phi * depth * std::exp(-dtau * dtau / width_sq));
}

double max_emission_jitter(const WidthPair& widths)
{
    const double t1 = widths.t1();
    // T1^2 / sqrt(T1^2 + T2^2) == T1^2 * sqrt(inv) / sqrt(T1^2 inv + 1)
    const double inv = widths.inv_t2_sq();
    return t1 * t1 * std::sqrt(inv) / std::sqrt(t1 * t1 * inv + 1.0);
}

LocusPoint locus_point_at(const WidthPair& widths, double delta_tau)
{
    const double t1_sq = widths.t1() * widths.t1();
    const double max_jitter = max_emission_jitter(widths);
    if (!(delta_tau >= 0.0) || delta_tau > max_jitter * (1.0 + 1e-12))
        throw DomainError("locus_point_at: emission jitter outside the compatible range");
    delta_tau = std::min(delta_tau, max_jitter);
    LocusPoint p;
    p.delta_tau = delta_tau;
    const double dt_sq = t1_sq - delta_tau * delta_tau;
    p.delta_t = std::sqrt(dt_sq);
    const double remaining = widths.inv_t2_sq() - delta_tau * delta_tau / (dt_sq * t1_sq);
    p.delta_omega = 2.0 * std::sqrt(std::max(0.0, remaining));
    return p;
}

std::vector<LocusPoint> jitter_locus(const WidthPair& widths, std::size_t n_points)
{
    if (n_points < 2)
        throw DomainError("jitter_locus: need at least two points");
    if (widths.inv_t2_sq() == 0.0)
        return {LocusPoint{0.0, 0.0, widths.t1()}};
    const double max_jitter = max_emission_jitter(widths);
    std::vector<LocusPoint> out;
    out.reserve(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double dtau = (i + 1 == n_points)
                                ? max_jitter
                                : max_jitter * static_cast<double>(i) / static_cast<double>(n_points - 1);
        out.push_back(locus_point_at(widths, dtau));
    }
    out.back().delta_omega = 0.0;
    return out;
}

LocusPoint pure_case_inversion(const WidthPair& widths, PureCase which)
{
    const double t1 = widths.t1();
    if (which == PureCase::frequency_only)
        return {2.0 * std::sqrt(widths.inv_t2_sq()), 0.0, t1};
    const double dtau = max_emission_jitter(widths);
    // delta_t = T2 * Delta_tau / T1, written with 1/T2^2 to allow T2 = infinity.
    const double dt = widths.inv_t2_sq() == 0.0 ? t1 : dtau / (t1 * std::sqrt(widths.inv_t2_sq()));
    return {0.0, dtau, dt};
}

}  // namespace photon_beat
