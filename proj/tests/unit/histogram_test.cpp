#include <doctest.h>

#include "photon_beat/errors.hpp"
#include "photon_beat/events.hpp"
#include "photon_beat/histogram.hpp"
#include "test_support.hpp"

using namespace photon_beat;
using namespace photon_beat::testing;

namespace {

constexpr double kDelay = 5.28 * us;

RunConfig pair_run(std::uint64_t triggers, double cos2)
{
    RunConfig c;
    c.mode = {omega_d2, 0.36 * us, 2.5 * us};
    c.n_triggers = triggers;
    c.cos2_phi = cos2;
    c.seed = 17;
    c.threads = 1;
    return c;
}

std::size_t bin_of(const CoincidenceHistogram& h, double tau)
{
    for (std::size_t i = 0; i < h.size(); ++i)
        if (std::abs(tau - h.bin_centers[i]) <= 0.5 * h.bin_width)
            return i;
    return h.size();
}

// Straightforward count of detector-3 x detector-4 pairs per trigger inside the range.
std::uint64_t count_pairs(const std::vector<DetectionEvent>& ev, double limit)
{
    std::uint64_t n = 0;
    for (std::size_t a = 0; a < ev.size(); ++a)
        for (std::size_t b = a + 1; b < ev.size() && ev[b].trigger_index == ev[a].trigger_index; ++b)
            if (ev[a].detector != ev[b].detector && std::abs(ev[b].time - ev[a].time) <= limit)
                ++n;
    return n;
}

}  // namespace

TEST_CASE("histogram grid is symmetric with zero at a bin centre")
{
    const auto h = make_histogram_grid(48e-9, 0.5 * kDelay);
    REQUIRE(h.size() % 2 == 1);
    const std::size_t mid = h.size() / 2;
    CHECK(h.bin_centers[mid] == 0.0);
    for (std::size_t i = 0; i < h.size(); ++i)
        CHECK(h.bin_centers[i] == -h.bin_centers[h.size() - 1 - i]);
    CHECK(h.bin_centers.back() + 0.5 * h.bin_width <= 0.5 * kDelay);
    CHECK(h.bin_centers.back() + 1.5 * h.bin_width > 0.5 * kDelay);
    CHECK_THROWS_AS(make_histogram_grid(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(make_histogram_grid(3.0, 1.0), DomainError);
}

TEST_CASE("one coincidence lands in the bin holding its delay")
{
    const std::vector<DetectionEvent> ev{{4, 3, 2.0 * us}, {4, 4, 2.1 * us}};
    const auto h = build_histogram(ev, 48e-9, kDelay);
    CHECK(h.total_counts() == 1);
    CHECK(h.counts[bin_of(h, 0.1 * us)] == 1);
    CHECK(h.total_detections == 2);
}

TEST_CASE("clicks of one detector or of different triggers never pair")
{
    const std::vector<DetectionEvent> ev{{1, 3, 2.0 * us}, {1, 3, 2.2 * us}, {2, 4, 2.1 * us}, {3, 4, 1.0 * us},
                                         {3, 4, 1.5 * us}};
    CHECK(build_histogram(ev, 48e-9, kDelay).total_counts() == 0);
    CHECK(build_histogram({}, 48e-9, kDelay).total_counts() == 0);
    CHECK(build_histogram({}, 48e-9, kDelay).size() > 0);
}

TEST_CASE("unsorted events are rejected")
{
    const std::vector<DetectionEvent> ev{{2, 3, 2.0 * us}, {1, 4, 2.1 * us}};
    CHECK_THROWS_AS(build_histogram(ev, 48e-9, kDelay), DomainError);
}

TEST_CASE("histogram integral counts every coincidence")
{
    auto c = pair_run(100000, 0.0);
    c.pair_probability = 1.0;
    c.dark_rate = 2000.0;
    const auto ev = generate_pair_run(c);
    const auto h = build_histogram(ev, 48e-9, kDelay);
    const double reach = h.bin_centers.back() + 0.5 * h.bin_width;
    CHECK(h.total_counts() == count_pairs(ev, reach - 1e-12));
    CHECK(h.total_detections == ev.size());
    for (unsigned t : {2u, 5u})
        CHECK(build_histogram(ev, 48e-9, kDelay, t).counts == h.counts);
}

TEST_CASE("a-priori correction with no darks changes nothing")
{
    const auto ev = generate_pair_run(pair_run(20000, 0.0));
    const auto h = build_histogram(ev, 48e-9, kDelay);
    const auto c = correct_background(h, 0.0, 20000 * kDelay);
    CHECK(c.background_per_bin == 0.0);
    CHECK(c.counts == h.counts);
    for (std::size_t i = 0; i < h.size(); ++i)
        CHECK(c.corrected()[i] == static_cast<double>(h.counts[i]));
}

TEST_CASE("pure-dark run corrects to zero")
{
    auto c = pair_run(400000, 1.0);
    c.pair_probability = 0.0;
    c.dark_rate = 20000.0;
    const auto ev = generate_pair_run(c);
    const double exposure = static_cast<double>(c.n_triggers) * c.window_length();
    const auto h = correct_background(build_histogram(ev, 120e-9, kDelay), c.dark_rate, exposure);
    CHECK(h.background_per_bin > 5.0);
    // Dark-dark coincidences thin out towards the window edge; compare near the centre.
    const std::size_t mid = h.size() / 2;
    double obs = 0.0, exp = 0.0;
    for (std::size_t i = mid - 2; i <= mid + 2; ++i) {
        const double tri = 1.0 - std::abs(h.bin_centers[i]) / c.window_length();
        obs += static_cast<double>(h.counts[i]);
        exp += h.background_per_bin * tri;
    }
    CHECK(std::abs(obs - exp) < 3.0 * std::sqrt(exp));
    const double central = h.signal()[mid];
    CHECK(std::abs(central) < 3.0 * std::sqrt(h.background_per_bin));
}

TEST_CASE("accidental level at 150 Hz darks and 50 % efficiency")
{
    // 150 Hz darks, 50 % efficiency. One-microsecond bins: the outer bins hold
    // accidentals only. A 10 us window keeps every dark partner of the outer
    // bins inside the window.
    CoincidenceHistogram total;
    double exposure = 0.0;
    for (std::uint64_t chunk = 0; chunk < 10; ++chunk) {
        auto c = pair_run(2000000, 0.0);
        c.pair_probability = 1.0;
        c.dark_rate = 150.0;
        c.detector_efficiency = {0.5, 0.5};
        c.trigger_period = 10.0 * us;
        c.mode.tau0 = 5.0 * us;
        c.seed = 1000 + chunk;
        const auto ev = generate_pair_run(c);
        const auto h = build_histogram(ev, 1.0 * us, kDelay);
        if (chunk == 0)
            total = h;
        else {
            for (std::size_t i = 0; i < h.size(); ++i)
                total.counts[i] += h.counts[i];
            total.total_detections += h.total_detections;
        }
        exposure += static_cast<double>(c.n_triggers) * c.window_length();
    }
    REQUIRE(total.size() == 5);
    const double measured = 0.5 * static_cast<double>(total.counts.front() + total.counts.back());
    const double level = correct_background(total, 150.0, exposure).background_per_bin;
    MESSAGE("accidentals per bin: measured " << measured << ", expected " << level);
    CHECK(rel_err(measured, level) < 0.05);
}

TEST_CASE("tail-fitted background")
{
    CoincidenceHistogram h = make_histogram_grid(1.0, 10.0);
    for (std::size_t i = 0; i < h.size(); ++i)
        h.counts[i] = std::abs(h.bin_centers[i]) >= 8.0 ? 4 : 10;
    const auto c = correct_background_from_tails(h, 0.2);
    CHECK(c.background_per_bin == 4.0);
    CHECK(c.corrected()[h.size() / 2] == 6.0);
    CHECK_THROWS_AS(correct_background_from_tails(h, 0.0), DomainError);
}

TEST_CASE("corrected counts clamp while the signal does not")
{
    CoincidenceHistogram h = make_histogram_grid(1.0, 2.0);
    h.counts = {1, 5, 2};
    h.background_per_bin = 3.0;
    CHECK(h.corrected() == std::vector<double>{0.0, 2.0, 0.0});
    CHECK(h.signal() == std::vector<double>{-2.0, 2.0, -1.0});
    h.counts = {1, 2};
    h.bin_centers = {0.0, 1.0};
    CHECK_THROWS_AS(h.validate(), DomainError);
}

TEST_CASE("single-detector density is dark-corrected and normalised")
{
    RunConfig c = pair_run(200000, 0.0);
    c.dark_rate = 3000.0;
    c.stream_delay_jitter = 0.0;
    const auto ev = generate_p1_run(c);
    const auto d = detection_time_density(ev, 3, 48e-9, c.window_length(), c.dark_rate, c.n_triggers);
    double area = 0.0, core = 0.0, mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < d.density.size(); ++i)
        area += d.density[i] * d.bin_width;
    // Clamped dark noise sits in the far tails; moments use the central 1 us.
    for (std::size_t i = 0; i < d.density.size(); ++i)
        if (std::abs(d.times[i] - c.mode.tau0) < 1.0 * us) {
            core += d.density[i] * d.bin_width;
            mean += d.times[i] * d.density[i] * d.bin_width;
        }
    mean /= core;
    for (std::size_t i = 0; i < d.density.size(); ++i)
        if (std::abs(d.times[i] - c.mode.tau0) < 1.0 * us)
            var += (d.times[i] - mean) * (d.times[i] - mean) * d.density[i] * d.bin_width / core;
    CHECK(area == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(core > 0.97);
    CHECK(std::abs(mean - c.mode.tau0) < 0.01 * us);
    CHECK(rel_err(std::sqrt(var), c.mode.delta_t / 2.0) < 0.05);
    CHECK_THROWS_AS(detection_time_density(ev, 3, 48e-9, c.window_length(), c.dark_rate, 0), DomainError);
}

TEST_CASE("autocorrelation of a Gaussian is a Gaussian wider by sqrt 2")
{
    for (double w : {0.3 * us, 0.5 * us, 0.7 * us}) {
        DensityCurve d;
        d.bin_width = 10e-9;
        for (int i = 0; i < 800; ++i) {
            const double t = (i + 0.5) * d.bin_width;
            d.times.push_back(t);
            d.density.push_back(std::exp(-(t - 4 * us) * (t - 4 * us) / (w * w)) / (std::sqrt(pi) * w));
        }
        const auto a = autocorrelation(d);
        CHECK(rel_err(a.t3, std::sqrt(2.0) * w) < 1e-6);
        for (std::size_t k = 0; k < a.values.size(); ++k)
            CHECK(a.values[k] == doctest::Approx(a.values[a.values.size() - 1 - k]).epsilon(1e-12));
        CHECK(a.lags[a.lags.size() / 2] == 0.0);
    }
}

TEST_CASE("autocorrelation needs eight bins")
{
    DensityCurve d;
    d.bin_width = 1.0;
    d.times = {0.5, 1.5, 2.5, 3.5, 4.5, 5.5, 6.5};
    d.density = {0.0, 0.1, 0.2, 0.4, 0.2, 0.1, 0.0};
    CHECK_THROWS_AS(autocorrelation(d), DomainError);
}
