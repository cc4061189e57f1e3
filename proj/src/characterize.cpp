#include "photon_beat/characterize.hpp"

#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <cstdio>
#include <limits>

#include "photon_beat/errors.hpp"
#include "photon_beat/units.hpp"

namespace photon_beat {

namespace {

using units::pi;
using units::to_us;

std::string format_statement(const Characterization& c)
{
    char buf[512];
    const double t2 = c.widths.t2();
    std::snprintf(buf, sizeof buf,
                  "T1 = %.4g us, T2 = %.4g us: photon duration >= %.4g us, "
                  "emission-time jitter <= %.4g us, frequency jitter delta_omega/2pi <= %.4g kHz; "
                  "T2 is the shortest coherence time consistent with the data",
                  to_us(c.widths.t1()), std::isinf(t2) ? std::numeric_limits<double>::infinity() : to_us(t2),
                  to_us(c.min_photon_duration), to_us(c.max_emission_jitter),
                  c.max_frequency_jitter / (2.0 * pi) * 1e-3);
    return buf;
}

}  // namespace

Characterization characterize(const WidthPair& widths, std::size_t n_points)
{
    Characterization c;
    c.widths = widths;
    c.locus = jitter_locus(widths, n_points);
    c.pure_frequency = pure_case_inversion(widths, PureCase::frequency_only);
    c.pure_emission = pure_case_inversion(widths, PureCase::emission_only);
    c.min_photon_duration = c.pure_emission.delta_t;
    c.max_emission_jitter = c.pure_emission.delta_tau;
    c.max_frequency_jitter = c.pure_frequency.delta_omega;
    c.statement = format_statement(c);
    return c;
}

double locus_distance_sq(const WidthPair& measured, const WidthCovariance& cov, double delta_tau,
                         double delta_omega)
{
    const double det = cov.var_t1 * cov.var_t2 - cov.cov_t1_t2 * cov.cov_t1_t2;
    if (!(cov.var_t1 > 0.0) || !(cov.var_t2 > 0.0) || !(det > 0.0) || !std::isfinite(det))
        throw DomainError("locus distance: width covariance must be positive definite");
    if (!(delta_tau >= 0.0) || !(delta_omega >= 0.0))
        throw DomainError("locus distance: jitters must be >= 0");
    const double t2m = measured.t2();

    auto d2 = [&](double delta_t) {
        JitterSpec j;
        j.sigma_dtau = delta_tau;
        j.sigma_delta = delta_omega;
        const WidthPair w = widths_from_jitters(delta_t, j);
        const double r1 = w.t1() - measured.t1();
        const double r2 = w.t2() - t2m;
        if (!std::isfinite(r2))
            return std::numeric_limits<double>::infinity();
        return (cov.var_t2 * r1 * r1 - 2.0 * cov.cov_t1_t2 * r1 * r2 + cov.var_t1 * r2 * r2) / det;
    };

    // Search in units of T1; Brent's tolerance has an absolute term of order 1e-8.
    const double scale = measured.t1();
    auto f = [&](double x) { return d2(x * scale); };
    const double hi = 3.0;
    const int n = 400;
    double best_x = hi / n, best = f(best_x);
    for (int k = 2; k <= n; ++k) {
        const double x = hi * k / n;
        const double v = f(x);
        if (v < best) {
            best = v;
            best_x = x;
        }
    }
    const double lo_b = std::max(best_x - hi / n, 1e-6 * hi);
    const double hi_b = best_x + hi / n;
    const auto r = boost::math::tools::brent_find_minima(f, lo_b, hi_b, 50);
    return std::min(best, r.second);
}

}  // namespace photon_beat
