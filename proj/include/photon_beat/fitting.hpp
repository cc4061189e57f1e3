#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "photon_beat/histogram.hpp"

namespace photon_beat {

struct Estimate {
    double value = 0.0;
    double sigma = 0.0;
};

struct FitOptions {
    int max_iterations = 200;
    /// Converged once |gradient| < gradient_tolerance * |initial gradient|.
    double gradient_tolerance = 1e-10;
};

/// Samples with inverse-variance weights.
struct CurveData {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> weight;

    std::size_t size() const { return x.size(); }
};

/// Background-subtracted counts with Poisson weights 1 / max(count, 1).
CurveData poisson_data(const CoincidenceHistogram& hist);

/// Model value and gradient with respect to the parameters.
using ModelFn = std::function<double(double x, std::span<const double> params, std::span<double> gradient)>;

struct LeastSquaresResult {
    std::vector<double> params;
    std::vector<double> covariance;  ///< row-major n x n, (J^T W J)^-1
    double chi2 = 0.0;
    double gradient_ratio = 0.0;
    int iterations = 0;
    /// Stopped because no step could lower chi2 in floating point, with a
    /// predicted Gauss-Newton decrease below 1e-13 chi2.
    bool machine_precision = false;
};

/// Weighted Gauss-Newton with Levenberg-Marquardt damping on diagonally
/// scaled normal equations. Throws FitFailure after max_iterations.
LeastSquaresResult levenberg_marquardt(const CurveData& data, const ModelFn& model,
                                       std::vector<double> start, const FitOptions& opts = {});

double chi_square(const CurveData& data, const std::function<double(double)>& model);

/// N0 exp(-tau^2/T1^2) [1 - cos2_phi cos(delta tau) exp(-tau^2 inv_t2_sq)]
double beat_model(double tau, double n0, double t1, double inv_t2_sq, double cos2_phi, double delta);

struct PeakFit {
    Estimate n0;
    Estimate t1;
    double covariance = 0.0;  ///< cov(n0, t1)
    double chi2 = 0.0;
    int iterations = 0;
};

struct DipFit {
    Estimate t2;
    double chi2 = 0.0;
    int iterations = 0;
    bool unbounded = false;  ///< best fit has no dip narrowing (T2 -> infinity)
};

struct BeatFit {
    Estimate delta;
    double chi2 = 0.0;
    int iterations = 0;
    bool aliasing = false;  ///< best delta within 1% of pi / bin_width
};

/// Gaussian N0 exp(-x^2/T^2) fitted to arbitrary weighted data.
PeakFit fit_gaussian(const CurveData& data, const FitOptions& opts = {});

/// First step: N0 and T1 from the perpendicular-polarization histogram.
PeakFit fit_peak(const CoincidenceHistogram& hist, const FitOptions& opts = {});

/// Second step: T2 with N0, T1 and cos2_phi held fixed.
DipFit fit_dip(const CoincidenceHistogram& hist, double n0, double t1, double cos2_phi,
               const FitOptions& opts = {});

/// Third step: the frequency difference with everything else fixed. `t2` may
/// be infinite. A grid over (0, pi / bin_width] seeds local refinements and
/// the global best is returned.
BeatFit fit_beat(const CoincidenceHistogram& hist, double n0, double t1, double t2, double cos2_phi,
                 const FitOptions& opts = {});

/// Joint covariance of (T1, T2) including the propagation of the fixed
/// (N0, T1) into the dip fit.
struct WidthCovariance {
    double var_t1 = 0.0;
    double var_t2 = 0.0;
    double cov_t1_t2 = 0.0;
};

WidthCovariance width_covariance(const CoincidenceHistogram& parallel, const PeakFit& peak, const DipFit& dip,
                                 double cos2_phi);

/// Everything the two-step (or three-step) procedure produced.
struct FitResult {
    double n0 = 0.0;
    double t1 = 0.0;
    std::optional<double> t2;
    std::optional<double> delta;
    double cos2_phi_used = 0.0;
    double residual_norm = 0.0;
    Estimate n0_estimate, t1_estimate;
    std::optional<Estimate> t2_estimate, delta_estimate;
    std::optional<WidthCovariance> widths_covariance;
    std::vector<std::string> flags;
};

/// N0 is carried from the perpendicular histogram to the parallel and beat
/// histograms in proportion to their total_detections, so runs of different
/// length can be combined.
FitResult two_step_fit(const CoincidenceHistogram& perpendicular, const CoincidenceHistogram* parallel,
                       const CoincidenceHistogram* beat, double cos2_phi, const FitOptions& opts = {});

}  // namespace photon_beat
