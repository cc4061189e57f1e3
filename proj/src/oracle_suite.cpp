#include "photon_beat/oracle_suite.hpp"

#include <cmath>
#include <cstdio>

#include "photon_beat/interference.hpp"
#include "photon_beat/jitter.hpp"
#include "photon_beat/units.hpp"

namespace photon_beat {

namespace {

using units::angular_from_mhz;
using units::from_us;

constexpr double kOmega0 = 2.0 * units::pi * 384.23e12;
constexpr double kResolution = 1e-9;
constexpr double kCos2[] = {1.0, 0.92, 0.5, 0.0};

// Axis value i of n, linearly between lo and hi.
double axis(int i, int n, double lo, double hi) { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); }

// The modes carry absolute optical frequencies, so the offset actually
// realised is mode2.omega0 - mode1.omega0 (exact by Sterbenz), which differs
// from `delta` by up to half an ulp of omega0. Closed forms receive the
// realised offset.
double realised_offset(const PairConfig& p) { return p.mode2.omega0 - p.mode1.omega0; }

PairConfig make_pair(double delta_t, double delta, double dtau, double cos2, double eta)
{
    PairConfig p;
    p.mode1 = {kOmega0, delta_t, 5.0 * delta_t};
    p.mode2 = {kOmega0 + delta, delta_t, 5.0 * delta_t + dtau};
    p.cos2_phi = cos2;
    p.detector_resolution = kResolution;
    p.eta3 = eta;
    p.eta4 = eta;
    return p;
}

std::string describe(const char* fmt, double a, double b, double c, double d, double e)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, a, b, c, d, e);
    return buf;
}

class Recorder {
public:
    Recorder(OracleSuiteReport& r, const OracleSuiteOptions& o) : report_(r), opts_(o) {}

    void add(std::string function, std::string params, double closed, double oracle)
    {
        OracleComparison c{std::move(function), std::move(params), closed, oracle, 0.0, true, true};
        if (std::abs(oracle) <= opts_.small_value_floor) {
            c.compared = false;
            c.rel_error = std::abs(closed - oracle);
            c.pass = c.rel_error <= opts_.small_value_floor;
        } else {
            c.rel_error = std::abs(closed - oracle) / std::abs(oracle);
            c.pass = c.rel_error <= opts_.rel_tolerance;
            ++report_.compared;
            report_.max_rel_error = std::max(report_.max_rel_error, c.rel_error);
        }
        if (!c.pass)
            ++report_.failures;
        if (opts_.on_case)
            opts_.on_case(c);
        report_.cases.push_back(std::move(c));
    }

private:
    OracleSuiteReport& report_;
    const OracleSuiteOptions& opts_;
};

}  // namespace

OracleSuiteReport run_oracle_suite(const OracleSuiteOptions& opts)
{
    OracleSuiteReport report;
    Recorder rec(report, opts);
    const int n = opts.points_per_axis;
    const double durations[] = {0.1, 0.25, 0.36, 0.6, 1.0};
    auto duration = [&](int i) { return from_us(n == 5 ? durations[i] : axis(i, n, 0.1, 1.0)); };
    int k = 0;

    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c, ++k) {
                const double dt = duration(a);
                const double delta = angular_from_mhz(axis(b, n, 0.0, 3.8));
                const double dtau = axis(c, n, 0.0, 2.0) * dt;
                const double cos2 = kCos2[k % 4];
                const PairConfig pair = make_pair(dt, delta, dtau, cos2, 0.5);
                rec.add("p2_hom",
                        describe("dt=%gus delta/2pi=%gMHz dtau=%gus cos2=%g eta=%g", dt * 1e6, delta / 2e6 / units::pi,
                                 dtau * 1e6, cos2, 0.5),
                        p2_hom(pair, realised_offset(pair), dtau), p2_coincidence_oracle(pair, JitterSpec{}));
            }

    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c, ++k) {
                const double dt = duration(a);
                const double delta = angular_from_mhz(axis(b, n, 0.0, 3.8));
                const double tau = axis(c, n, 0.0, 2.5) * dt;
                const double dtau = (k % 3) * 0.4 * dt;
                const double cos2 = kCos2[k % 4];
                const PairConfig pair = make_pair(dt, delta, dtau, cos2, 0.5);
                rec.add("p2_time_resolved",
                        describe("dt=%gus delta/2pi=%gMHz dtau=%gus tau=%gus cos2=%g", dt * 1e6,
                                 delta / 2e6 / units::pi, dtau * 1e6, tau * 1e6, cos2),
                        p2_time_resolved(pair, realised_offset(pair), dtau, tau), p2_numeric_oracle(pair, JitterSpec{}, tau));
            }

    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c, ++k) {
                const double dt = duration(a);
                JitterSpec j;
                j.sigma_delta = angular_from_mhz(axis(b, n, 0.0, 3.0));
                j.sigma_dtau = axis(c, n, 0.0, 2.0) * dt;
                j.mean_delta = (k % 2) ? angular_from_mhz(2.8) : 0.0;
                const double t1 = widths_from_jitters(dt, j).t1();
                const double tau = axis(k % 3, 3, 0.0, 1.2) * t1;
                const double cos2 = kCos2[k % 4];
                const PairConfig pair = make_pair(dt, 0.0, 0.0, cos2, 1.0);
                rec.add("p2_jittered",
                        describe("dt=%gus sigma_delta/2pi=%gMHz sigma_dtau=%gus tau=%gus mean_delta/2pi=%gMHz",
                                 dt * 1e6, j.sigma_delta / 2e6 / units::pi, j.sigma_dtau * 1e6, tau * 1e6,
                                 j.mean_delta / 2e6 / units::pi),
                        p2_jittered(tau, dt, j, cos2, kResolution), p2_numeric_oracle(pair, j, tau));
            }

    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c, ++k) {
                const double dt = duration(a);
                JitterSpec j;
                // Alternates between the two single-jitter cases the closed form covers.
                if (b % 2 == 0)
                    j.sigma_dtau = axis(b, n, 0.0, 2.0) * dt;
                else
                    j.sigma_delta = angular_from_mhz(axis(b, n, 0.0, 3.0));
                const double dtau = axis(c, n, 0.0, 2.0) * dt;
                const double cos2 = kCos2[k % 4];
                JitterSpec shifted = j;
                shifted.mean_dtau = dtau;
                const PairConfig pair = make_pair(dt, 0.0, 0.0, cos2, 1.0);
                rec.add("hom_jittered",
                        describe("dt=%gus sigma_delta/2pi=%gMHz sigma_dtau=%gus dtau=%gus cos2=%g", dt * 1e6,
                                 j.sigma_delta / 2e6 / units::pi, j.sigma_dtau * 1e6, dtau * 1e6, cos2),
                        hom_jittered(dtau, dt, j, cos2), p2_coincidence_oracle(pair, shifted));
            }
    return report;
}

}  // namespace photon_beat
