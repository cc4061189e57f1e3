#include <doctest.h>

#include <map>

#include "photon_beat/errors.hpp"
#include "photon_beat/events.hpp"
#include "test_support.hpp"

using namespace photon_beat;
using namespace photon_beat::testing;

namespace {

RunConfig base_run(std::uint64_t triggers)
{
    RunConfig c;
    c.mode = {omega_d2, 0.36 * us, 2.5 * us};
    c.n_triggers = triggers;
    c.seed = 42;
    c.threads = 1;
    return c;
}

double normal_cdf(double x, double mean, double sd) { return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0))); }

// tau = t4 - t3 for every trigger with exactly one click at each detector.
std::vector<double> coincidence_taus(const std::vector<DetectionEvent>& ev)
{
    std::vector<double> taus;
    std::size_t i = 0;
    while (i < ev.size()) {
        std::size_t j = i;
        std::vector<double> t3, t4;
        while (j < ev.size() && ev[j].trigger_index == ev[i].trigger_index) {
            (ev[j].detector == 3 ? t3 : t4).push_back(ev[j].time);
            ++j;
        }
        if (t3.size() == 1 && t4.size() == 1)
            taus.push_back(t4[0] - t3[0]);
        i = j;
    }
    return taus;
}

double variance(const std::vector<double>& x)
{
    double m = 0.0;
    for (double v : x)
        m += v;
    m /= static_cast<double>(x.size());
    double s = 0.0;
    for (double v : x)
        s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

}  // namespace

TEST_CASE("single-photon run follows the detection density")
{
    auto c = base_run(100000);
    c.dark_rate = 0.0;
    c.time_resolution = 0.0;
    c.stream_delay_jitter = 0.0;
    const auto ev = generate_p1_run(c);
    std::vector<double> t;
    for (const auto& e : ev)
        t.push_back(e.time);
    REQUIRE(t.size() > 5000);
    CHECK(ks_statistic(t, [&](double x) { return normal_cdf(x, c.mode.tau0, c.mode.delta_t / 2.0); }) < 0.01);
}

TEST_CASE("certain generation and detection give one click per trigger")
{
    auto c = base_run(5000);
    c.dark_rate = 0.0;
    c.generation_efficiency = 1.0;
    c.detector_efficiency = {1.0, 1.0};
    const auto ev = generate_p1_run(c);
    REQUIRE(ev.size() == c.n_triggers);
    for (std::size_t k = 0; k < ev.size(); ++k) {
        CHECK(ev[k].trigger_index == k);
        CHECK(ev[k].detector == 3);
    }
}

TEST_CASE("emission jitter adds its variance to the click times")
{
    auto c = base_run(100000);
    c.dark_rate = 0.0;
    c.time_resolution = 0.0;
    c.generation_efficiency = 1.0;
    c.detector_efficiency = {1.0, 1.0};
    c.stream_delay_jitter = 0.0;
    std::vector<double> plain, jittered;
    for (const auto& e : generate_p1_run(c))
        plain.push_back(e.time);
    c.stream_delay_jitter = 0.8 * us;
    for (const auto& e : generate_p1_run(c))
        jittered.push_back(e.time);
    // Per-photon law of width 0.8/sqrt(2) us, variance 0.8^2/4 us^2.
    const double jitter_var = 0.8 * us * 0.8 * us / 4.0;
    CHECK(rel_err(variance(jittered) - variance(plain), jitter_var) < 0.05);
}

TEST_CASE("identical photons never split")
{
    auto c = base_run(50000);
    c.dark_rate = 0.0;
    c.pair_probability = 1.0;
    c.cos2_phi = 1.0;
    c.detector_efficiency = {1.0, 1.0};
    CHECK(coincidence_taus(generate_pair_run(c)).empty());
}

TEST_CASE("perpendicular pairs spread over one photon duration")
{
    auto c = base_run(100000);
    c.dark_rate = 0.0;
    c.pair_probability = 1.0;
    c.cos2_phi = 0.0;
    c.time_resolution = 0.0;
    c.detector_efficiency = {1.0, 1.0};
    const auto taus = coincidence_taus(generate_pair_run(c));
    // Density exp(-tau^2/dt^2) has variance dt^2/2.
    CHECK(rel_err(std::sqrt(2.0 * variance(taus)), c.mode.delta_t) < 0.03);
}

TEST_CASE("imposed frequency difference produces beats at its period")
{
    auto c = base_run(200000);
    c.dark_rate = 0.0;
    c.pair_probability = 1.0;
    c.cos2_phi = 1.0;
    c.time_resolution = 0.0;
    c.detector_efficiency = {1.0, 1.0};
    c.jitter.mean_delta = 3.8 * mhz;
    const auto taus = coincidence_taus(generate_pair_run(c));
    REQUIRE(taus.size() > 10000);
    const double dt = c.mode.delta_t;

    // Unbinned likelihood of exp(-tau^2/dt^2)(1 - cos(D tau)), scanned over D.
    auto loglik = [&](double d) {
        double s = 0.0;
        for (double t : taus)
            s += std::log(std::max(1.0 - std::cos(d * t), 1e-300));
        return s - static_cast<double>(taus.size()) * std::log(1.0 - std::exp(-d * d * dt * dt / 4.0));
    };
    double best = 0.0, best_ll = -1e300;
    for (double f = 2.0; f <= 6.0; f += 0.002) {
        const double ll = loglik(f * mhz);
        if (ll > best_ll)
            best_ll = ll, best = f;
    }
    CHECK(rel_err(best, 3.8) < 0.03);

    // First zero at tau = 0: the central 20 ns hold almost nothing.
    const auto central = std::count_if(taus.begin(), taus.end(), [](double t) { return std::abs(t) < 10e-9; });
    const auto at_max = std::count_if(taus.begin(), taus.end(), [&](double t) {
        return std::abs(std::abs(t) - pi / (3.8 * mhz)) < 10e-9;
    });
    CHECK(central * 50 < at_max);
}

TEST_CASE("event lists do not depend on the thread count")
{
    auto c = base_run(20000);
    c.cos2_phi = 0.92;
    c.jitter.sigma_dtau = 0.53 * us;
    c.jitter.sigma_delta = 0.3 * mhz;
    c.dark_rate = 5000.0;
    const auto one = generate_pair_run(c);
    for (unsigned t : {2u, 3u, 7u}) {
        auto d = c;
        d.threads = t;
        CHECK(generate_pair_run(d) == one);
        CHECK(generate_p1_run(d) == generate_p1_run(c));
    }
    CHECK(std::is_sorted(one.begin(), one.end()));
    auto other = c;
    other.seed = 43;
    CHECK(generate_pair_run(other) != one);
}

TEST_CASE("pair outcomes conserve probability")
{
    auto c = base_run(100000);
    c.dark_rate = 0.0;
    c.pair_probability = 1.0;
    c.cos2_phi = 0.5;
    c.detector_efficiency = {1.0, 1.0};
    const auto ev = generate_pair_run(c);
    CHECK(ev.size() == 2 * c.n_triggers);
    const double n = static_cast<double>(c.n_triggers);
    const double split = static_cast<double>(coincidence_taus(ev).size());
    const double p = 0.5 * (1.0 - 0.5);
    CHECK(std::abs(split - n * p) < 3.0 * std::sqrt(n * p * (1 - p)));
}

TEST_CASE("rejection sampler reproduces the joint density")
{
    const double dt = 0.36 * us;
    const auto pair = make_pair(dt, 2.8 * mhz, 0.2 * us, 0.92, omega_low);
    Xoshiro256 rng(9);
    const int proposals = 200000;
    const int nb = 10;
    const double lo = -1.2 * dt, hi = 0.2 * us + 1.2 * dt, w = (hi - lo) / nb;
    std::vector<double> observed(nb * nb + 1, 0.0);
    int accepted = 0;
    for (int i = 0; i < proposals; ++i) {
        const auto o = sample_pair_outcome(pair, rng);
        if (!o.split)
            continue;
        ++accepted;
        const int a = static_cast<int>(std::floor((o.t3 - lo) / w));
        const int b = static_cast<int>(std::floor((o.t4 - lo) / w));
        const bool inside = a >= 0 && a < nb && b >= 0 && b < nb;
        observed[inside ? static_cast<std::size_t>(a * nb + b) : nb * nb] += 1.0;
    }
    // Acceptance equals the coincidence probability.
    const double p = p2_hom(pair, 2.8 * mhz, 0.2 * us);
    CHECK(std::abs(accepted - proposals * p) < 3.0 * std::sqrt(proposals * p * (1 - p)));

    auto g2 = [&](double a, double b) { return g2_reference(pair.mode1, pair.mode2, 0.92, a, b); };
    std::vector<double> expected(nb * nb + 1, 0.0);
    double inside_total = 0.0;
    for (int a = 0; a < nb; ++a)
        for (int b = 0; b < nb; ++b) {
            const double e = simpson2(g2, lo + a * w, lo + (a + 1) * w, lo + b * w, lo + (b + 1) * w, 40) / p;
            expected[static_cast<std::size_t>(a * nb + b)] = e * accepted;
            inside_total += e;
        }
    expected[nb * nb] = (1.0 - inside_total) * accepted;

    double chi2 = 0.0, pooled_o = 0.0, pooled_e = 0.0;
    int cells = 0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (expected[i] < 5.0) {
            pooled_o += observed[i];
            pooled_e += expected[i];
            continue;
        }
        chi2 += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
        ++cells;
    }
    if (pooled_e >= 5.0) {
        chi2 += (pooled_o - pooled_e) * (pooled_o - pooled_e) / pooled_e;
        ++cells;
    }
    MESSAGE("chi2 = " << chi2 << " over " << cells << " cells");
    CHECK(chi2_upper_tail(chi2, cells - 1) > 0.01);
}

TEST_CASE("dark counts are uniform and Poisson")
{
    auto c = base_run(100000);
    c.pair_probability = 0.0;
    c.dark_rate = 1e5;
    c.time_resolution = 0.0;
    const auto ev = generate_pair_run(c);
    const double window = c.window_length();
    std::vector<double> t;
    std::map<std::pair<std::uint64_t, int>, int> per_slot;
    for (const auto& e : ev) {
        t.push_back(e.time);
        ++per_slot[{e.trigger_index, e.detector}];
    }
    CHECK(ks_statistic(t, [&](double x) { return x / window; }) < 0.01);

    const double n = 2.0 * static_cast<double>(c.n_triggers);
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& [slot, k] : per_slot) {
        sum += k;
        sum_sq += static_cast<double>(k) * k;
    }
    const double mean = sum / n;
    const double var = (sum_sq - n * mean * mean) / (n - 1);
    CHECK(rel_err(mean, c.dark_rate * window) < 0.01);
    CHECK(std::abs(var / mean - 1.0) < 3.0 * std::sqrt(2.0 / (n - 1)));
}

TEST_CASE("detector time quantisation floors to the grid")
{
    CHECK(quantise(2.7e-9, 1e-9) == doctest::Approx(2e-9));
    CHECK(quantise(-0.3e-9, 1e-9) == doctest::Approx(-1e-9));
    CHECK(quantise(1.234, 0.0) == 1.234);
    auto c = base_run(2000);
    c.time_resolution = 4e-9;
    for (const auto& e : generate_p1_run(c)) {
        const double r = e.time / 4e-9;
        CHECK(std::abs(r - std::round(r)) < 1e-6);
    }
}

TEST_CASE("run validation")
{
    auto c = base_run(10);
    CHECK_NOTHROW(c.validate());
    c.cos2_phi = -0.1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = base_run(10);
    c.pair_probability = 1.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = base_run(10);
    c.trigger_period = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = base_run(10);
    c.dark_rate = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = base_run(10);
    c.mode.delta_t = 0.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("stream jitter defaults to the pair jitter")
{
    auto c = base_run(10);
    c.jitter.sigma_dtau = 0.53 * us;
    CHECK(c.stream_jitter() == 0.53 * us);
    CHECK(c.single_photon_jitter() == doctest::Approx(0.53 * us / std::sqrt(2.0)));
    c.stream_delay_jitter = 0.7256 * us;
    CHECK(c.stream_jitter() == 0.7256 * us);
    CHECK(c.window_length() == c.trigger_period);
}
