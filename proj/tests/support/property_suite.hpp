#pragma once

// Randomized invariant checks shared by the property unit test and the
// acceptance binary. Each suite draws its cases from a fixed seed and returns
// how many failed along with the first offending case.

#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "photon_beat/events.hpp"
#include "photon_beat/histogram.hpp"
#include "photon_beat/interference.hpp"
#include "photon_beat/jitter.hpp"
#include "photon_beat/wavepacket.hpp"
#include "test_support.hpp"

namespace photon_beat::testing {

struct PropertyReport {
    explicit PropertyReport(std::string n) : name(std::move(n)) {}

    std::string name;
    int cases = 0;
    int failures = 0;
    std::string first_failure;

    bool pass() const { return failures == 0 && cases > 0; }
    void record(bool ok, const std::string& what)
    {
        if (ok)
            return;
        if (failures++ == 0)
            first_failure = what;
    }
};

namespace detail {

inline PairConfig random_pair(Random& rng, double cos2)
{
    const double dt = rng.log_uniform(0.05, 2.0) * us;
    auto p = make_pair(dt, rng.uniform(-8.0, 8.0) * mhz, rng.uniform(-2.0, 2.0) * dt, cos2);
    p.mode1.tau0 = rng.uniform(-3.0, 3.0) * us;
    p.mode2.tau0 += p.mode1.tau0;
    p.eta3 = rng.uniform(0.1, 1.0);
    p.eta4 = rng.uniform(0.1, 1.0);
    p.detector_resolution = rng.log_uniform(1e-10, 1e-8);
    return p;
}

inline JitterSpec random_single_jitter(Random& rng, double dt)
{
    JitterSpec j;
    if (rng.integer(0, 1))
        j.sigma_delta = rng.uniform(0.0, 4.0) * mhz;
    else
        j.sigma_dtau = rng.uniform(0.0, 2.0) * dt;
    j.mean_delta = rng.uniform(-5.0, 5.0) * mhz;
    return j;
}

inline std::string describe(const PairConfig& p, double delta, double dtau)
{
    std::ostringstream s;
    s.precision(17);
    s << "dt=" << p.mode1.delta_t << " delta=" << delta << " dtau=" << dtau << " cos2=" << p.cos2_phi;
    return s.str();
}

}  // namespace detail

/// Detection densities integrate to one; the tau integral of the
/// time-resolved probability equals the unresolved coincidence probability.
inline PropertyReport normalization_properties(int n, std::uint64_t seed = 101)
{
    PropertyReport r{"normalization"};
    Random rng(seed);
    for (int k = 0; k < n; ++k, ++r.cases) {
        auto p = detail::random_pair(rng, rng.uniform(0.0, 1.0));
        const auto& m = p.mode1;
        const double area = simpson([&](double t) { return detection_density(m, t); }, m.tau0 - 6 * m.delta_t,
                                    m.tau0 + 6 * m.delta_t, 2000);
        r.record(std::abs(area - 1.0) < 1e-9, "detection density area " + std::to_string(area));

        const double jw = rng.uniform(0.0, 2.0) * m.delta_t;
        const double reach = 6.0 * std::sqrt(m.delta_t * m.delta_t / 2.0 + jw * jw);
        const double javg = simpson([&](double t) { return average_detection_density(m, jw, t); }, m.tau0 - reach,
                                    m.tau0 + reach, 2000);
        r.record(std::abs(javg - 1.0) < 1e-9, "jitter-averaged density area " + std::to_string(javg));

        const double delta = p.mode2.omega0 - p.mode1.omega0, dtau = p.mode2.tau0 - p.mode1.tau0;
        const double span = 8.0 * m.delta_t + std::abs(dtau);
        const double T = p.detector_resolution;
        const double integral =
            simpson([&](double tau) { return p2_time_resolved(p, delta, dtau, tau) / T; }, -span, span, 4000);
        const double hom = p2_hom(p, delta, dtau);
        r.record(std::abs(integral - hom) <= 1e-7 * p.efficiency_product(),
                 "tau integral " + detail::describe(p, delta, dtau));
    }
    return r;
}

/// Mirror symmetries: swapping detectors, swapping photons, reversing the
/// frequency offset or the delay.
inline PropertyReport symmetry_properties(int n, std::uint64_t seed = 202)
{
    PropertyReport r{"symmetry"};
    Random rng(seed);
    for (int k = 0; k < n; ++k, ++r.cases) {
        auto p = detail::random_pair(rng, rng.uniform(0.0, 1.0));
        const double delta = p.mode2.omega0 - p.mode1.omega0, dtau = p.mode2.tau0 - p.mode1.tau0;
        const auto what = detail::describe(p, delta, dtau);
        auto swapped = p;
        std::swap(swapped.mode1, swapped.mode2);

        const double s = p.mode1.delta_t;
        const double t3 = p.mode1.tau0 + rng.uniform(-2.0, 2.0) * s, t4 = p.mode1.tau0 + rng.uniform(-2.0, 2.0) * s;
        const double g = g2_components(p, t3, t4).g2_total;
        const double tol = 1e-11 * g2_components(p, t3, t4).g2_hv + 1e-300;
        r.record(std::abs(g - g2_components(swapped, t3, t4).g2_total) <= tol, "photon swap " + what);
        r.record(std::abs(g - g2_components(p, t4, t3).g2_total) <= tol, "detector swap " + what);

        const double tau = rng.uniform(-3.0, 3.0) * s;
        const double a = p2_time_resolved(p, delta, dtau, tau), b = p2_time_resolved(p, delta, dtau, -tau);
        r.record(rel_err(a, b) < 1e-12 || std::abs(a - b) < 1e-300, "tau reversal " + what);

        const double h = p2_hom(p, delta, dtau);
        r.record(rel_err(h, p2_hom(p, -delta, dtau)) < 1e-12, "offset reversal " + what);
        r.record(rel_err(h, p2_hom(p, delta, -dtau)) < 1e-12, "delay reversal " + what);

        const auto j = detail::random_single_jitter(rng, s);
        const double ja = p2_jittered(tau, s, j, p.cos2_phi, 1e-9), jb = p2_jittered(-tau, s, j, p.cos2_phi, 1e-9);
        r.record(rel_err(ja, jb) < 1e-12 || std::abs(ja - jb) < 1e-300, "jittered tau reversal " + what);
    }
    return r;
}

/// Probabilities are never negative and the unresolved coincidence
/// probability never exceeds the distinguishable-photon value eta3 eta4 / 2.
inline PropertyReport nonnegativity_properties(int n, std::uint64_t seed = 303)
{
    PropertyReport r{"nonnegativity"};
    Random rng(seed);
    for (int k = 0; k < n; ++k, ++r.cases) {
        auto p = detail::random_pair(rng, rng.uniform(0.0, 1.0));
        const double delta = p.mode2.omega0 - p.mode1.omega0, dtau = p.mode2.tau0 - p.mode1.tau0;
        const auto what = detail::describe(p, delta, dtau);
        const double s = p.mode1.delta_t;
        for (int i = 0; i < 5; ++i) {
            const double t3 = p.mode1.tau0 + rng.uniform(-3.0, 3.0) * s;
            const double t4 = p.mode1.tau0 + rng.uniform(-3.0, 3.0) * s;
            const auto g = g2_components(p, t3, t4);
            r.record(g.g2_total >= -1e-12 * g.g2_hv, "g2 " + what);
            const double tau = rng.uniform(-4.0, 4.0) * s;
            r.record(p2_time_resolved(p, delta, dtau, tau) >= 0.0, "time-resolved " + what);
            const auto j = detail::random_single_jitter(rng, s);
            r.record(p2_jittered(tau, s, j, p.cos2_phi, 1e-9) >= 0.0, "jittered " + what);
            auto centred = j;
            centred.mean_delta = 0.0;
            const double hj = hom_jittered(tau, s, centred, p.cos2_phi);
            r.record(hj >= 0.0 && hj <= 0.5 * (1.0 + 1e-12), "jittered HOM " + what);
        }
        const double h = p2_hom(p, delta, dtau);
        r.record(h >= 0.0 && h <= 0.5 * p.efficiency_product() * (1.0 + 1e-12), "HOM bounds " + what);
    }
    return r;
}

/// Identical polarizations never give simultaneous clicks at both detectors,
/// whatever the frequency offset or delay.
inline PropertyReport coincidence_null_properties(int n, std::uint64_t seed = 404)
{
    PropertyReport r{"tau = 0 null"};
    Random rng(seed);
    for (int k = 0; k < n; ++k, ++r.cases) {
        auto p = detail::random_pair(rng, 1.0);
        const double delta = p.mode2.omega0 - p.mode1.omega0, dtau = p.mode2.tau0 - p.mode1.tau0;
        const auto what = detail::describe(p, delta, dtau);
        auto perp = p;
        perp.cos2_phi = 0.0;
        r.record(p2_time_resolved(p, delta, dtau, 0.0) <= 1e-12 * p2_time_resolved(perp, delta, dtau, 0.0),
                 "time-resolved " + what);
        const double t = p.mode1.tau0 + rng.uniform(-2.0, 2.0) * p.mode1.delta_t;
        const auto g = g2_components(p, t, t);
        r.record(std::abs(g.g2_total) <= 1e-12 * g.g2_hv, "g2 " + what);
        const auto j = detail::random_single_jitter(rng, p.mode1.delta_t);
        r.record(p2_jittered(0.0, p.mode1.delta_t, j, 1.0, 1e-9) == 0.0, "jittered " + what);
    }
    return r;
}

/// Event lists and histograms are identical for any worker count.
inline PropertyReport determinism_properties(int n, std::uint64_t seed = 505)
{
    PropertyReport r{"determinism under parallelism"};
    Random rng(seed);
    for (int k = 0; k < n; ++k, ++r.cases) {
        RunConfig c;
        c.mode = {omega_d2, rng.uniform(0.1, 1.0) * us, 2.5 * us};
        c.n_triggers = static_cast<std::uint64_t>(rng.integer(1, 400));
        c.cos2_phi = rng.uniform(0.0, 1.0);
        c.pair_probability = rng.uniform(0.1, 1.0);
        c.dark_rate = rng.log_uniform(1.0, 1e5);
        c.jitter.sigma_dtau = rng.uniform(0.0, 0.8) * us;
        c.jitter.mean_delta = rng.uniform(0.0, 4.0) * mhz;
        c.seed = rng.bits();
        const bool p1 = rng.integer(0, 3) == 0;
        auto generate = [&](unsigned threads) {
            c.threads = threads;
            return p1 ? generate_p1_run(c) : generate_pair_run(c);
        };
        const auto a = generate(1);
        const auto b = generate(static_cast<unsigned>(rng.integer(2, 8)));
        bool same = a.size() == b.size();
        for (std::size_t i = 0; same && i < a.size(); ++i)
            same = a[i].trigger_index == b[i].trigger_index && a[i].detector == b[i].detector &&
                   a[i].time == b[i].time;
        r.record(same, "events differ, seed " + std::to_string(c.seed));
        if (!p1) {
            const auto h1 = build_histogram(a, 48e-9, c.pair_delay, 1);
            const auto h2 = build_histogram(a, 48e-9, c.pair_delay, static_cast<unsigned>(rng.integer(2, 8)));
            r.record(h1.counts == h2.counts, "histograms differ, seed " + std::to_string(c.seed));
        }
    }
    return r;
}

inline std::vector<PropertyReport> run_property_suites(int n)
{
    return {normalization_properties(n), symmetry_properties(n), nonnegativity_properties(n),
            coincidence_null_properties(n), determinism_properties(n)};
}

}  // namespace photon_beat::testing
