#include "photon_beat/events.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "photon_beat/errors.hpp"

namespace photon_beat {

namespace {

constexpr std::uint64_t kPairStream = 1;
constexpr std::uint64_t kSingleStream = 2;

bool probability(double p) { return p >= 0.0 && p <= 1.0; }

void add_dark_counts(std::vector<DetectionEvent>& out, std::uint64_t trigger, int detector,
                     double mean_count, double window, double resolution, Xoshiro256& rng)
{
    if (mean_count <= 0.0)
        return;
    std::poisson_distribution<int> count(mean_count);
    const int n = count(rng);
    for (int i = 0; i < n; ++i)
        out.push_back({trigger, detector, quantise(rng.uniform() * window, resolution)});
}

// Runs `per_trigger(k, out)` over all triggers, split into contiguous blocks
// that are concatenated in trigger order.
template <typename PerTrigger>
std::vector<DetectionEvent> run_blocks(const RunConfig& cfg, PerTrigger&& per_trigger)
{
    unsigned workers = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
    const std::uint64_t n = cfg.n_triggers;
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(n, 1)));
    std::vector<std::vector<DetectionEvent>> blocks(workers);
    auto work = [&](unsigned w) {
        const std::uint64_t lo = n * w / workers;
        const std::uint64_t hi = n * (w + 1) / workers;
        auto& out = blocks[w];
        for (std::uint64_t k = lo; k < hi; ++k) {
            const auto first = out.size();
            per_trigger(k, out);
            std::sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end());
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work, w);
    }
    std::vector<DetectionEvent> events;
    std::size_t total = 0;
    for (const auto& b : blocks)
        total += b.size();
    events.reserve(total);
    for (auto& b : blocks)
        events.insert(events.end(), b.begin(), b.end());
    return events;
}

}  // namespace

void RunConfig::validate() const
{
    mode.validate();
    jitter.validate();
    if (!(cos2_phi >= 0.0 && cos2_phi <= 1.0))
        throw ConfigError("cos2_phi must lie in [0, 1]");
    if (!(trigger_period > 0.0) || !(pair_delay > 0.0) || !(window_length() > 0.0))
        throw ConfigError("trigger period, pair delay and window must be positive");
    if (!probability(pair_probability) || !probability(generation_efficiency)
        || !probability(detector_efficiency[0]) || !probability(detector_efficiency[1]))
        throw ConfigError("probabilities and efficiencies must lie in [0, 1]");
    if (!(dark_rate >= 0.0) || !(time_resolution >= 0.0))
        throw ConfigError("dark rate and time resolution must be >= 0");
    if (!(stream_jitter() >= 0.0))
        throw ConfigError("stream emission jitter must be >= 0");
}

double RunConfig::single_photon_jitter() const { return stream_jitter() / std::sqrt(2.0); }

PairConfig RunConfig::pair_config(const GaussianMode& m1, const GaussianMode& m2) const
{
    PairConfig p;
    p.mode1 = m1;
    p.mode2 = m2;
    p.cos2_phi = cos2_phi;
    p.detector_resolution = time_resolution > 0.0 ? time_resolution : 1e-9;
    p.eta3 = detector_efficiency[0];
    p.eta4 = detector_efficiency[1];
    return p;
}

double quantise(double t, double resolution)
{
    if (resolution <= 0.0)
        return t;
    return std::floor(t / resolution) * resolution;
}

PairOutcome sample_pair_outcome(const PairConfig& pair, Xoshiro256& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    const GaussianMode& a = pair.mode1;
    const GaussianMode& b = pair.mode2;
    // eps^2 of a mode is a normal density with standard deviation delta_t / 2.
    const bool swap = rng.uniform() < 0.5;
    const GaussianMode& first = swap ? b : a;
    const GaussianMode& second = swap ? a : b;
    const double t1 = first.tau0 + 0.5 * first.delta_t * normal(rng);
    const double t2 = second.tau0 + 0.5 * second.delta_t * normal(rng);

    const G2Components g = g2_components(pair, t1, t2);
    const double proposal = 2.0 * g.g2_hv;
    if (g.g2_total > proposal * (1.0 + 1e-12))
        throw ConfigError("pair sampler: G2 exceeds its rejection envelope");
    const double u = rng.uniform();
    PairOutcome out;
    out.split = proposal > 0.0 && u * proposal < g.g2_total;
    out.t3 = t1;
    out.t4 = t2;
    return out;
}

std::vector<DetectionEvent> generate_pair_run(const RunConfig& config)
{
    config.validate();
    const double window = config.window_length();
    const double dark_mean = config.dark_rate * window;
    const double res = config.time_resolution;
    const auto& eta = config.detector_efficiency;

    return run_blocks(config, [&](std::uint64_t k, std::vector<DetectionEvent>& out) {
        auto rng = Xoshiro256::substream(config.seed, k, kPairStream);
        add_dark_counts(out, k, 3, dark_mean, window, res, rng);
        add_dark_counts(out, k, 4, dark_mean, window, res, rng);
        if (!(rng.uniform() < config.pair_probability))
            return;

        std::normal_distribution<double> normal(0.0, 1.0);
        const auto& j = config.jitter;
        // Widths w correspond to normal standard deviations w / sqrt(2).
        const double delta = j.mean_delta + (j.sigma_delta > 0.0 ? j.sigma_delta / std::sqrt(2.0) * normal(rng) : 0.0);
        const double dtau = j.mean_dtau + (j.sigma_dtau > 0.0 ? j.sigma_dtau / std::sqrt(2.0) * normal(rng) : 0.0);
        GaussianMode m1 = config.mode, m2 = config.mode;
        m1.omega0 -= 0.5 * delta;
        m2.omega0 += 0.5 * delta;
        m1.tau0 -= 0.5 * dtau;
        m2.tau0 += 0.5 * dtau;

        const PairOutcome o = sample_pair_outcome(config.pair_config(m1, m2), rng);
        if (o.split) {
            if (rng.uniform() < eta[0])
                out.push_back({k, 3, quantise(o.t3, res)});
            if (rng.uniform() < eta[1])
                out.push_back({k, 4, quantise(o.t4, res)});
        } else {
            const int port = rng.uniform() < 0.5 ? 3 : 4;
            const double e = eta[port - 3];
            if (rng.uniform() < e)
                out.push_back({k, port, quantise(o.t3, res)});
            if (rng.uniform() < e)
                out.push_back({k, port, quantise(o.t4, res)});
        }
    });
}

std::vector<DetectionEvent> generate_p1_run(const RunConfig& config)
{
    config.validate();
    const double window = config.window_length();
    const double dark_mean = config.dark_rate * window;
    const double res = config.time_resolution;
    const double p_click = config.generation_efficiency * config.detector_efficiency[0];
    const double emission_sd = config.single_photon_jitter() / std::sqrt(2.0);
    const double shape_sd = 0.5 * config.mode.delta_t;

    return run_blocks(config, [&](std::uint64_t k, std::vector<DetectionEvent>& out) {
        auto rng = Xoshiro256::substream(config.seed, k, kSingleStream);
        add_dark_counts(out, k, 3, dark_mean, window, res, rng);
        if (!(rng.uniform() < p_click))
            return;
        std::normal_distribution<double> normal(0.0, 1.0);
        const double emission = emission_sd > 0.0 ? emission_sd * normal(rng) : 0.0;
        const double t = config.mode.tau0 + emission + shape_sd * normal(rng);
        out.push_back({k, 3, quantise(t, res)});
    });
}

}  // namespace photon_beat
