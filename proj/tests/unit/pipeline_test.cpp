#include <doctest.h>

#include "photon_beat/errors.hpp"
#include "photon_beat/pipeline.hpp"
#include "test_support.hpp"

using namespace photon_beat;
using namespace photon_beat::testing;

namespace {

// Widths implied by photon duration dt and emission-delay jitter j alone.
double t1_of(double dt, double j) { return std::sqrt(dt * dt + j * j); }
double t2_of(double dt, double j) { return dt * t1_of(dt, j) / j; }

}  // namespace

TEST_CASE("optimised preset recovers its widths, beats and stream width")
{
    const auto spec = source_preset(SourcePreset::optimized, 4);
    const auto r = run_pipeline(spec);
    const double dt = 0.36 * us, j = 0.53 * us;
    CHECK(rel_err(r.fit.t1, t1_of(dt, j)) < 0.05);
    REQUIRE(r.fit.t2);
    CHECK(rel_err(*r.fit.t2, t2_of(dt, j)) < 0.08);
    REQUIRE(r.beat_fits.size() == 2);
    CHECK(rel_err(r.beat_fits[0].delta.value, 2.8 * mhz) < 0.03);
    CHECK(rel_err(r.beat_fits[1].delta.value, 3.8 * mhz) < 0.03);
    CHECK(!r.beat_fits[0].aliasing);
    REQUIRE(r.characterization);
    CHECK(r.characterization->locus.size() == 101);
    REQUIRE(r.autocorrelation);
    // Autocorrelation of the single-photon density: duration and stream jitter in quadrature.
    CHECK(rel_err(r.autocorrelation->t3, 0.81 * us) < 0.05);
    CHECK(r.perpendicular.events.empty());
}

TEST_CASE("earlier source preset")
{
    const auto r = run_pipeline(source_preset(SourcePreset::before, 2));
    const double dt = 0.29 * us, j = 0.82 * us;
    CHECK(rel_err(r.fit.t1, t1_of(dt, j)) < 0.05);
    REQUIRE(r.fit.t2);
    CHECK(rel_err(*r.fit.t2, t2_of(dt, j)) < 0.10);
    CHECK(r.beat_fits.empty());
    CHECK(r.perpendicular.histogram.bin_width == 120e-9);
}

TEST_CASE("pipeline output depends on the seed only")
{
    auto spec = source_preset(SourcePreset::optimized, 11);
    spec.base.run.n_triggers = 60000;
    spec.beats.clear();
    spec.p1_triggers = 0;
    spec.keep_events = true;
    spec.base.run.threads = 1;
    const auto a = run_pipeline(spec);
    spec.base.run.threads = 3;
    const auto b = run_pipeline(spec);
    CHECK(a.parallel.histogram.counts == b.parallel.histogram.counts);
    CHECK(a.perpendicular.events.size() == b.perpendicular.events.size());
    CHECK(a.fit.t1 == b.fit.t1);
    spec.base.run.seed = 12;
    const auto c = run_pipeline(spec);
    CHECK(c.parallel.histogram.counts != a.parallel.histogram.counts);
    CHECK(!a.autocorrelation);
}

TEST_CASE("preset names")
{
    CHECK(parse_preset("optimized") == SourcePreset::optimized);
    CHECK(parse_preset("before") == SourcePreset::before);
    CHECK_THROWS_AS(parse_preset("after"), ConfigError);
}
