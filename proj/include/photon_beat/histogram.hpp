#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "photon_beat/events.hpp"

namespace photon_beat {

/// Joint photodetections binned in the detection-time difference
/// tau = t(detector 4) - t(detector 3). Bins are contiguous, symmetric, and
/// tau = 0 sits at the centre of the middle bin.
struct CoincidenceHistogram {
    double bin_width = 0.0;
    std::vector<double> bin_centers;
    std::vector<std::uint64_t> counts;
    /// Flat accidental level already attributed to each bin (0 = uncorrected).
    double background_per_bin = 0.0;
    /// Every click in the run the histogram was built from, both detectors.
    std::uint64_t total_detections = 0;

    std::size_t size() const { return counts.size(); }
    std::uint64_t total_counts() const;
    /// count - background, clamped at zero.
    std::vector<double> corrected() const;
    /// count - background without clamping; what the fits consume.
    std::vector<double> signal() const;
    void validate() const;
};

/// Symmetric histogram with 2K + 1 bins covering |tau| <= half_range.
CoincidenceHistogram make_histogram_grid(double bin_width, double half_range);

/// Pairs every detector-3 click with every detector-4 click of the same
/// trigger slot. The slot is one pair period long, so only |tau| < pair_delay / 2
/// is histogrammed. Events must be sorted by trigger index. Counting is split
/// over `threads` workers; the merge is an integer sum.
CoincidenceHistogram build_histogram(std::span<const DetectionEvent> events, double bin_width,
                                     double pair_delay, unsigned threads = 1);

/// Expected accidental coincidences per bin from dark counts: each photon
/// click pairs with dark clicks at the other detector (rate * bin_width each)
/// and dark clicks pair among themselves (rate^2 * bin_width * exposure).
/// `exposure` is the summed length of all trigger windows.
double expected_accidentals_per_bin(double bin_width, double dark_rate, double exposure,
                                    std::uint64_t total_detections);

/// A-priori background correction; records the subtracted level.
CoincidenceHistogram correct_background(CoincidenceHistogram hist, double dark_rate, double exposure);

/// Background taken as the mean count of the outer `tail_fraction` of bins.
CoincidenceHistogram correct_background_from_tails(CoincidenceHistogram hist, double tail_fraction = 0.2);

enum class BackgroundMode { a_priori, fitted_tails };

/// Binned single-detector detection density, dark-count corrected and
/// normalised to unit area.
struct DensityCurve {
    double bin_width = 0.0;
    std::vector<double> times;
    std::vector<double> density;
};

DensityCurve detection_time_density(std::span<const DetectionEvent> events, int detector, double bin_width,
                                    double window, double dark_rate, std::uint64_t n_triggers);

struct Autocorrelation {
    std::vector<double> lags;
    std::vector<double> values;
    double t3 = 0.0;  ///< width of the Gaussian fitted as exp(-tau^2 / t3^2)
    double t3_uncertainty = 0.0;
};

/// A(tau_k) = bin_width * sum_i P_i P_{i+k} and its Gaussian width. At least
/// eight bins are required.
Autocorrelation autocorrelation(const DensityCurve& p1);

}  // namespace photon_beat
