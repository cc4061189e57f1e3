// Brute-force quadrature of the joint detection probability. Nothing here may
// use the closed forms: the integrand is built from the complex mode
// amplitudes and the polarization mixture cos^2 HH + sin^2 HV.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "photon_beat/errors.hpp"
#include "photon_beat/interference.hpp"

namespace photon_beat {

namespace {

// Half-widths of the integration windows: jitter laws in units of their
// width (exp(-49) ~ 5e-22), detection times in units of the longest
// duration (the t0 integrand falls like exp(-4 u^2)).
constexpr double kJitterWindow = 7.0;
constexpr double kTimeWindow = 5.0;

struct OracleSetup {
    GaussianMode m1, m2;  // rotating frame: m1.omega0 == 0
    double cos2_phi;
    double scale;         // 1 / reference duration, the natural size of the t0 integral
};

OracleSetup make_setup(const PairConfig& pair)
{
    pair.validate();
    OracleSetup s;
    s.m1 = pair.mode1;
    s.m2 = pair.mode2;
    s.m2.omega0 = pair.mode2.omega0 - pair.mode1.omega0;
    s.m1.omega0 = 0.0;
    s.cos2_phi = pair.cos2_phi;
    s.scale = 1.0 / std::min(pair.mode1.delta_t, pair.mode2.delta_t);
    return s;
}

// mode_amplitude with the normalisation hoisted out of the integrand.
struct Amplitude {
    double norm, inv_dt, omega0, tau0;

    explicit Amplitude(const GaussianMode& m)
        : norm(std::sqrt(std::sqrt(2.0 / (std::numbers::pi * m.delta_t * m.delta_t)))),
          inv_dt(1.0 / m.delta_t), omega0(m.omega0), tau0(m.tau0) {}

    std::complex<double> operator()(double t) const
    {
        const double u = (t - tau0) * inv_dt;
        const double e = norm * std::exp(-u * u);
        if (omega0 == 0.0)
            return {e, 0.0};
        const double phase = omega0 * (tau0 - t);
        return {e * std::cos(phase), e * std::sin(phase)};
    }
};

double correlation(const OracleSetup& s, const Amplitude& m1, const Amplitude& m2, double t1, double t2)
{
    const auto a11 = m1(t1);
    const auto a12 = m1(t2);
    const auto a21 = m2(t1);
    const auto a22 = m2(t2);
    const double hh = std::norm(a11 * a22 - a21 * a12) / 4.0;
    const double hv = (std::norm(a11 * a22) + std::norm(a12 * a21)) / 4.0;
    return s.cos2_phi * hh + (1.0 - s.cos2_phi) * hv;
}

QuadratureOptions tightened(const QuadratureOptions& o, double factor, double scale)
{
    QuadratureOptions t = o;
    t.abs_tol = o.abs_tol * scale / factor;
    t.rel_tol = o.rel_tol / factor;
    return t;
}

// integral dt0 G(t0, t0 + tau) for fixed modes.
double time_integral(const OracleSetup& s, const GaussianMode& m2, double tau,
                     const QuadratureOptions& opts)
{
    const double w = std::max(s.m1.delta_t, m2.delta_t);
    const double lo = std::min({s.m1.tau0, m2.tau0, s.m1.tau0 - tau, m2.tau0 - tau}) - kTimeWindow * w;
    const double hi = std::max({s.m1.tau0, m2.tau0, s.m1.tau0 - tau, m2.tau0 - tau}) + kTimeWindow * w;
    const Amplitude a1(s.m1), a2(m2);
    auto f = [&](double t0) { return correlation(s, a1, a2, t0, t0 + tau); };
    return integrate(f, lo, hi, opts).value;
}

// Average of `inner(m2)` over the emission-delay law applied to mode 2.
template <typename Inner>
double delay_average(const JitterSpec& j, const QuadratureOptions& opts, GaussianMode m2,
                     Inner&& inner)
{
    const double base = m2.tau0;
    if (j.sigma_dtau == 0.0) {
        m2.tau0 = base + j.mean_dtau;
        return inner(m2);
    }
    auto f = [&](double shift) {
        GaussianMode m = m2;
        m.tau0 = base + shift;
        return gaussian_law(shift, j.mean_dtau, j.sigma_dtau) * inner(m);
    };
    return integrate(f, j.mean_dtau - kJitterWindow * j.sigma_dtau, j.mean_dtau + kJitterWindow * j.sigma_dtau, opts)
        .value;
}

// Average over the frequency-difference law, then over the delay law.
template <typename Inner>
double jitter_average(const OracleSetup& s, const JitterSpec& j, const QuadratureOptions& outer,
                      const QuadratureOptions& middle, Inner&& inner)
{
    const double base = s.m2.omega0;
    auto over_delay = [&](double offset, const QuadratureOptions& o) {
        GaussianMode m2 = s.m2;
        m2.omega0 = base + offset;
        return delay_average(j, o, m2, inner);
    };
    if (j.sigma_delta == 0.0)
        return over_delay(j.mean_delta, outer);
    auto f = [&](double offset) {
        return gaussian_law(offset, j.mean_delta, j.sigma_delta) * over_delay(offset, middle);
    };
    return integrate(f, j.mean_delta - kJitterWindow * j.sigma_delta, j.mean_delta + kJitterWindow * j.sigma_delta,
                     outer)
        .value;
}

}  // namespace

double p2_numeric_oracle(const PairConfig& pair, const JitterSpec& jitter, double tau,
                         const QuadratureOptions& opts)
{
    jitter.validate();
    const OracleSetup s = make_setup(pair);
    const auto outer = tightened(opts, 1.0, s.scale);
    const auto middle = tightened(opts, 3.0, s.scale);
    const auto inner_opts = tightened(opts, 10.0, s.scale);
    auto inner = [&](const GaussianMode& m2) { return time_integral(s, m2, tau, inner_opts); };
    const double avg = jitter_average(s, jitter, outer, middle, inner);
    return pair.efficiency_product() * pair.detector_resolution * avg;
}

double p2_coincidence_oracle(const PairConfig& pair, const JitterSpec& jitter, const QuadratureOptions& opts)
{
    jitter.validate();
    const OracleSetup s = make_setup(pair);
    const auto outer = tightened(opts, 1.0, 1.0);
    const auto middle = tightened(opts, 3.0, 1.0);
    const auto inner_opts = tightened(opts, 10.0, 1.0);
    const auto deepest = tightened(opts, 30.0, s.scale);

    // Window in tau covers both photons' envelopes and the full delay spread.
    const double w = std::max(pair.mode1.delta_t, pair.mode2.delta_t);
    const double reach = std::abs(pair.mode2.tau0 - pair.mode1.tau0) + std::abs(jitter.mean_dtau)
                         + kTimeWindow * w + kJitterWindow * jitter.sigma_dtau;
    auto inner = [&](const GaussianMode& m2) {
        auto f = [&](double tau) { return time_integral(s, m2, tau, deepest); };
        return integrate(f, -reach, reach, inner_opts).value;
    };
    const double avg = jitter_average(s, jitter, outer, middle, inner);
    return pair.efficiency_product() * avg;
}

}  // namespace photon_beat
