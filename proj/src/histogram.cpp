#include "photon_beat/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "photon_beat/errors.hpp"
#include "photon_beat/fitting.hpp"

namespace photon_beat {

std::uint64_t CoincidenceHistogram::total_counts() const
{
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::vector<double> CoincidenceHistogram::signal() const
{
    std::vector<double> s(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        s[i] = static_cast<double>(counts[i]) - background_per_bin;
    return s;
}

std::vector<double> CoincidenceHistogram::corrected() const
{
    auto s = signal();
    for (auto& v : s)
        v = std::max(v, 0.0);
    return s;
}

void CoincidenceHistogram::validate() const
{
    if (!(bin_width > 0.0))
        throw DomainError("histogram bin width must be positive");
    if (bin_centers.size() != counts.size() || counts.empty() || counts.size() % 2 == 0)
        throw DomainError("histogram must have an odd, non-zero number of bins");
    if (!(background_per_bin >= 0.0))
        throw DomainError("histogram background must be >= 0");
}

CoincidenceHistogram make_histogram_grid(double bin_width, double half_range)
{
    if (!(bin_width > 0.0) || !(half_range > 0.0))
        throw DomainError("bin width and range must be positive");
    // Outer bin edge (K + 1/2) b stays inside half_range.
    const double k_max = std::floor(half_range / bin_width - 0.5);
    if (k_max < 0.0)
        throw DomainError("bin width exceeds the coincidence range");
    if (k_max > 5e7)
        throw DomainError("too many histogram bins");
    const auto k = static_cast<std::int64_t>(k_max);
    CoincidenceHistogram h;
    h.bin_width = bin_width;
    for (std::int64_t i = -k; i <= k; ++i)
        h.bin_centers.push_back(static_cast<double>(i) * bin_width);
    h.counts.assign(h.bin_centers.size(), 0);
    return h;
}

CoincidenceHistogram build_histogram(std::span<const DetectionEvent> events, double bin_width,
                                     double pair_delay, unsigned threads)
{
    CoincidenceHistogram hist = make_histogram_grid(bin_width, 0.5 * pair_delay);
    hist.total_detections = events.size();
    for (std::size_t i = 1; i < events.size(); ++i)
        if (events[i].trigger_index < events[i - 1].trigger_index)
            throw DomainError("events must be sorted by trigger index");

    const auto k_max = static_cast<std::int64_t>(hist.size() / 2);
    const auto n = events.size();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n / 4096, 1))));

    // Chunk boundaries are moved forward to the next trigger change.
    std::vector<std::size_t> cuts{0};
    for (unsigned w = 1; w < threads; ++w) {
        std::size_t c = std::max(cuts.back(), n * w / threads);
        while (c > 0 && c < n && events[c].trigger_index == events[c - 1].trigger_index)
            ++c;
        cuts.push_back(c);
    }
    cuts.push_back(n);

    std::vector<std::vector<std::uint64_t>> partial(threads, std::vector<std::uint64_t>(hist.size(), 0));
    auto count = [&](unsigned w) {
        auto& bins = partial[w];
        std::size_t i = cuts[w];
        const std::size_t end = cuts[w + 1];
        while (i < end) {
            std::size_t j = i;
            while (j < end && events[j].trigger_index == events[i].trigger_index)
                ++j;
            for (std::size_t a = i; a < j; ++a) {
                if (events[a].detector != 3)
                    continue;
                for (std::size_t b = i; b < j; ++b) {
                    if (events[b].detector != 4)
                        continue;
                    const double tau = events[b].time - events[a].time;
                    const double idx = std::round(tau / bin_width);
                    if (std::abs(idx) <= static_cast<double>(k_max))
                        ++bins[static_cast<std::size_t>(static_cast<std::int64_t>(idx) + k_max)];
                }
            }
            i = j;
        }
    };
    if (threads == 1) {
        count(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back(count, w);
    }
    for (const auto& p : partial)
        for (std::size_t i = 0; i < p.size(); ++i)
            hist.counts[i] += p[i];
    return hist;
}

double expected_accidentals_per_bin(double bin_width, double dark_rate, double exposure,
                                    std::uint64_t total_detections)
{
    if (!(bin_width > 0.0) || !(dark_rate >= 0.0) || !(exposure >= 0.0))
        throw DomainError("accidentals: bin width > 0, dark rate >= 0 and exposure >= 0 required");
    const double darks = 2.0 * dark_rate * exposure;
    const double photons = std::max(static_cast<double>(total_detections) - darks, 0.0);
    return dark_rate * bin_width * photons + dark_rate * dark_rate * bin_width * exposure;
}

CoincidenceHistogram correct_background(CoincidenceHistogram hist, double dark_rate, double exposure)
{
    hist.validate();
    hist.background_per_bin = expected_accidentals_per_bin(hist.bin_width, dark_rate, exposure, hist.total_detections);
    return hist;
}

CoincidenceHistogram correct_background_from_tails(CoincidenceHistogram hist, double tail_fraction)
{
    hist.validate();
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
        throw DomainError("tail fraction must lie in (0, 1)");
    const double edge = hist.bin_centers.back();
    const double cut = (1.0 - tail_fraction) * edge;
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < hist.size(); ++i) {
        if (std::abs(hist.bin_centers[i]) >= cut) {
            sum += static_cast<double>(hist.counts[i]);
            ++n;
        }
    }
    if (n == 0)
        throw DomainError("no tail bins for the background estimate");
    hist.background_per_bin = sum / static_cast<double>(n);
    return hist;
}

DensityCurve detection_time_density(std::span<const DetectionEvent> events, int detector, double bin_width,
                                    double window, double dark_rate, std::uint64_t n_triggers)
{
    if (!(bin_width > 0.0) || !(window > bin_width))
        throw DomainError("density: need 0 < bin width < window");
    if (n_triggers == 0)
        throw DomainError("density: no triggers");
    const auto nbins = static_cast<std::size_t>(std::floor(window / bin_width));
    DensityCurve d;
    d.bin_width = bin_width;
    d.density.assign(nbins, 0.0);
    for (std::size_t i = 0; i < nbins; ++i)
        d.times.push_back((static_cast<double>(i) + 0.5) * bin_width);
    for (const auto& e : events) {
        if (e.detector != detector || e.time < 0.0)
            continue;
        const auto i = static_cast<std::size_t>(e.time / bin_width);
        if (i < nbins)
            d.density[i] += 1.0;
    }
    const double dark_per_bin = dark_rate * bin_width * static_cast<double>(n_triggers);
    double area = 0.0;
    for (auto& v : d.density) {
        v = std::max(v - dark_per_bin, 0.0);
        area += v * bin_width;
    }
    if (!(area > 0.0))
        throw DomainError("density: no signal above the dark level");
    for (auto& v : d.density)
        v /= area;
    return d;
}

Autocorrelation autocorrelation(const DensityCurve& p1)
{
    const auto n = p1.density.size();
    if (n < 8)
        throw DomainError("autocorrelation needs at least 8 bins");
    Autocorrelation a;
    const auto m = static_cast<std::ptrdiff_t>(n);
    for (std::ptrdiff_t k = -(m - 1); k <= m - 1; ++k) {
        double s = 0.0;
        for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(0, -k); i < std::min(m, m - k); ++i)
            s += p1.density[static_cast<std::size_t>(i)] * p1.density[static_cast<std::size_t>(i + k)];
        a.lags.push_back(static_cast<double>(k) * p1.bin_width);
        a.values.push_back(s * p1.bin_width);
    }
    CurveData data;
    data.x = a.lags;
    data.y = a.values;
    data.weight.assign(a.lags.size(), 1.0);
    const PeakFit fit = fit_gaussian(data);
    a.t3 = fit.t1.value;
    // Unit weights: scale the covariance by the residual variance.
    const double dof = static_cast<double>(data.size()) - 2.0;
    a.t3_uncertainty = fit.t1.sigma * std::sqrt(fit.chi2 / dof);
    return a;
}

}  // namespace photon_beat
