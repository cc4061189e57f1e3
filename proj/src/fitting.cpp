#include "photon_beat/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "photon_beat/errors.hpp"
#include "photon_beat/units.hpp"

namespace photon_beat {

namespace {

using units::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Normal {
    Eigen::MatrixXd a;  // J^T W J
    Eigen::VectorXd b;  // J^T W r
    double chi2 = 0.0;
};

Normal normal_equations(const CurveData& d, const ModelFn& model, const std::vector<double>& p)
{
    const auto n = static_cast<Eigen::Index>(p.size());
    Normal ne{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n), 0.0};
    std::vector<double> g(p.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double f = model(d.x[i], p, g);
        const double r = d.y[i] - f;
        const double w = d.weight[i];
        ne.chi2 += w * r * r;
        for (Eigen::Index u = 0; u < n; ++u) {
            ne.b(u) += w * r * g[static_cast<std::size_t>(u)];
            for (Eigen::Index v = 0; v <= u; ++v)
                ne.a(u, v) += w * g[static_cast<std::size_t>(u)] * g[static_cast<std::size_t>(v)];
        }
    }
    ne.a = ne.a.selfadjointView<Eigen::Lower>();
    return ne;
}

Eigen::VectorXd column_scale(const Eigen::MatrixXd& a)
{
    Eigen::VectorXd s = a.diagonal().cwiseSqrt();
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (!(s(i) > 0.0) || !std::isfinite(s(i)))
            s(i) = 1.0;
    return s;
}

// Solves (S + lambda I) y = D^-1 b with S = D^-1 A D^-1 and returns D^-1 y.
Eigen::VectorXd damped_step(const Normal& ne, const Eigen::VectorXd& scale, double lambda)
{
    Eigen::MatrixXd s = scale.asDiagonal().inverse() * ne.a * scale.asDiagonal().inverse();
    s.diagonal().array() += lambda;
    Eigen::VectorXd y = s.ldlt().solve(ne.b.cwiseQuotient(scale));
    return y.cwiseQuotient(scale);
}

std::vector<double> covariance_of(const Normal& ne)
{
    const auto n = ne.a.rows();
    const Eigen::VectorXd scale = column_scale(ne.a);
    const Eigen::MatrixXd s = scale.asDiagonal().inverse() * ne.a * scale.asDiagonal().inverse();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(s);
    const auto& sv = svd.singularValues();
    std::vector<double> cov(static_cast<std::size_t>(n * n), kInf);
    if (sv.size() == 0 || !(sv(sv.size() - 1) > 1e-14 * sv(0)))
        return cov;
    const Eigen::MatrixXd inv = scale.asDiagonal().inverse() * s.inverse() * scale.asDiagonal().inverse();
    for (Eigen::Index u = 0; u < n; ++u)
        for (Eigen::Index v = 0; v < n; ++v)
            cov[static_cast<std::size_t>(u * n + v)] = inv(u, v);
    return cov;
}

double sqrt_or_inf(double v) { return std::isfinite(v) && v >= 0.0 ? std::sqrt(v) : kInf; }

double max_abs_x(const CurveData& d)
{
    double m = 0.0;
    for (double x : d.x)
        m = std::max(m, std::abs(x));
    return m;
}

void check_data(const CurveData& d)
{
    if (d.y.size() != d.size() || d.weight.size() != d.size())
        throw DomainError("curve data columns differ in length");
    for (std::size_t i = 0; i < d.size(); ++i)
        if (!std::isfinite(d.x[i]) || !std::isfinite(d.y[i]) || !(d.weight[i] >= 0.0))
            throw DomainError("curve data must be finite with non-negative weights");
}

// Curvature-based standard error of a single parameter: chi2 ~ chi2_min + (p - p0)^2 / sigma^2.
double curvature_sigma(const std::function<double(double)>& chi2_at, double p0, double h)
{
    const double c0 = chi2_at(p0);
    const double curv = (chi2_at(p0 + h) - 2.0 * c0 + chi2_at(p0 - h)) / (h * h);
    return curv > 0.0 ? std::sqrt(2.0 / curv) : kInf;
}

double safe_exp(double x) { return std::exp(std::min(x, 700.0)); }

}  // namespace

CurveData poisson_data(const CoincidenceHistogram& hist)
{
    hist.validate();
    CurveData d;
    d.x = hist.bin_centers;
    d.y = hist.signal();
    d.weight.resize(hist.size());
    for (std::size_t i = 0; i < hist.size(); ++i)
        d.weight[i] = 1.0 / std::max(static_cast<double>(hist.counts[i]), 1.0);
    return d;
}

double chi_square(const CurveData& data, const std::function<double(double)>& model)
{
    double s = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double r = data.y[i] - model(data.x[i]);
        s += data.weight[i] * r * r;
    }
    return s;
}

LeastSquaresResult levenberg_marquardt(const CurveData& data, const ModelFn& model, std::vector<double> start,
                                       const FitOptions& opts)
{
    check_data(data);
    if (start.empty() || data.size() < start.size())
        throw DomainError("least squares: fewer samples than parameters");

    LeastSquaresResult res;
    Normal ne = normal_equations(data, model, start);
    if (!std::isfinite(ne.chi2))
        throw FitFailure("least squares: model is not finite at the starting point");
    const double g0 = ne.b.norm();
    double lambda = 1e-3;
    std::vector<double> p = std::move(start);

    auto finish = [&] {
        res.params = p;
        res.chi2 = ne.chi2;
        res.gradient_ratio = g0 > 0.0 ? ne.b.norm() / g0 : 0.0;
        res.covariance = covariance_of(ne);
        return res;
    };

    for (int it = 0; it < opts.max_iterations; ++it) {
        res.iterations = it;
        if (ne.b.norm() <= opts.gradient_tolerance * g0 || g0 == 0.0)
            return finish();
        const Eigen::VectorXd scale = column_scale(ne.a);
        bool accepted = false;
        while (lambda <= 1e16) {
            const Eigen::VectorXd step = damped_step(ne, scale, lambda);
            std::vector<double> trial = p;
            for (std::size_t k = 0; k < p.size(); ++k)
                trial[k] += step(static_cast<Eigen::Index>(k));
            Normal tn = normal_equations(data, model, trial);
            if (std::isfinite(tn.chi2) && tn.chi2 < ne.chi2) {
                p = std::move(trial);
                ne = std::move(tn);
                lambda = std::max(lambda * 0.1, 1e-12);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            const Eigen::VectorXd gn = damped_step(ne, scale, 0.0);
            const double predicted = 0.5 * gn.dot(ne.b);
            if (!(predicted <= 1e-13 * ne.chi2) && ne.chi2 > 0.0)
                throw FitFailure("least squares: no step lowers chi2", it, g0 > 0.0 ? ne.b.norm() / g0 : 0.0);
            res.machine_precision = true;
            return finish();
        }
    }
    throw FitFailure("least squares: iteration limit reached", opts.max_iterations,
                     g0 > 0.0 ? ne.b.norm() / g0 : 0.0);
}

double beat_model(double tau, double n0, double t1, double inv_t2_sq, double cos2_phi, double delta)
{
    return n0 * std::exp(-tau * tau / (t1 * t1))
         * (1.0 - cos2_phi * std::cos(delta * tau) * std::exp(-tau * tau * inv_t2_sq));
}

PeakFit fit_gaussian(const CurveData& data, const FitOptions& opts)
{
    check_data(data);
    double peak = 0.0, sy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double lo = data.y[i > 0 ? i - 1 : i];
        const double hi = data.y[i + 1 < data.size() ? i + 1 : i];
        peak = std::max(peak, (lo + data.y[i] + hi) / 3.0);
        if (data.y[i] > 0.0) {
            sy += data.y[i];
            sxx += data.y[i] * data.x[i] * data.x[i];
        }
    }
    if (!(peak > 0.0) || !(sy > 0.0))
        throw FitFailure("peak fit: no positive signal");
    const double width0 = std::sqrt(2.0 * sxx / sy);
    const double reach = max_abs_x(data);

    const ModelFn model = [](double x, std::span<const double> p, std::span<double> g) {
        const double u = x / p[1];
        const double e = std::exp(-u * u);
        g[0] = e;
        g[1] = p[0] * e * 2.0 * u * u / p[1];
        return p[0] * e;
    };
    const auto r = levenberg_marquardt(data, model, {peak, width0 > 0.0 ? width0 : reach}, opts);
    const double width = std::abs(r.params[1]);
    if (!(width < 10.0 * reach))
        throw FitFailure("peak fit: width unbounded (flat histogram)", r.iterations, r.gradient_ratio);
    PeakFit f;
    f.n0 = {r.params[0], sqrt_or_inf(r.covariance[0])};
    f.t1 = {width, sqrt_or_inf(r.covariance[3])};
    f.covariance = r.covariance[1] * (r.params[1] < 0.0 ? -1.0 : 1.0);
    f.chi2 = r.chi2;
    f.iterations = r.iterations;
    return f;
}

PeakFit fit_peak(const CoincidenceHistogram& hist, const FitOptions& opts)
{
    const CurveData d = poisson_data(hist);
    const auto nonzero = std::count_if(hist.counts.begin(), hist.counts.end(), [](auto c) { return c > 0; });
    if (nonzero < 8)
        throw FitFailure("peak fit: fewer than 8 non-empty bins");
    return fit_gaussian(d, opts);
}

DipFit fit_dip(const CoincidenceHistogram& hist, double n0, double t1, double cos2_phi, const FitOptions& opts)
{
    if (!(cos2_phi > 0.0 && cos2_phi <= 1.0))
        throw DomainError("dip fit: cos2_phi must lie in (0, 1]; the dip is unidentifiable at 0");
    if (!(n0 > 0.0) || !(t1 > 0.0))
        throw DomainError("dip fit: n0 and t1 must be positive");
    const CurveData d = poisson_data(hist);
    const double reach = max_abs_x(d);

    // Parameter u = 1 / T2^2; u = 0 is a dip with no narrowing.
    auto value = [&](double x, double u) {
        return n0 * std::exp(-x * x / (t1 * t1)) * (1.0 - cos2_phi * safe_exp(-x * x * u));
    };
    const ModelFn model = [&](double x, std::span<const double> p, std::span<double> g) {
        const double base = n0 * std::exp(-x * x / (t1 * t1));
        const double e = safe_exp(-x * x * p[0]);
        g[0] = base * cos2_phi * e * x * x;
        return base * (1.0 - cos2_phi * e);
    };

    // Seed from a log grid in T2 between a bin width and ten times the range.
    double best_u = 0.0;
    double best_chi2 = chi_square(d, [&](double x) { return value(x, 0.0); });
    const int n_grid = 200;
    for (int k = 0; k < n_grid; ++k) {
        const double t2 = hist.bin_width * std::pow(10.0 * reach / hist.bin_width, k / (n_grid - 1.0));
        const double u = 1.0 / (t2 * t2);
        const double c = chi_square(d, [&](double x) { return value(x, u); });
        if (c < best_chi2) {
            best_chi2 = c;
            best_u = u;
        }
    }
    if (best_u == 0.0)
        best_u = 1.0 / (100.0 * reach * reach);
    const auto r = levenberg_marquardt(d, model, {best_u}, opts);
    DipFit f;
    f.chi2 = r.chi2;
    f.iterations = r.iterations;
    const double u = r.params[0];
    if (!(u > 0.0)) {
        f.unbounded = true;
        f.t2 = {kInf, kInf};
        return f;
    }
    double sigma_u = sqrt_or_inf(r.covariance[0]);
    if (!std::isfinite(sigma_u))
        sigma_u = curvature_sigma([&](double v) { return chi_square(d, [&](double x) { return value(x, v); }); },
                                  u, 1e-3 * u);
    f.t2 = {1.0 / std::sqrt(u), 0.5 * sigma_u / (u * std::sqrt(u))};
    return f;
}

BeatFit fit_beat(const CoincidenceHistogram& hist, double n0, double t1, double t2, double cos2_phi,
                 const FitOptions& opts)
{
    if (!(cos2_phi > 0.0 && cos2_phi <= 1.0))
        throw DomainError("beat fit: cos2_phi must lie in (0, 1]");
    if (!(n0 > 0.0) || !(t1 > 0.0) || !(t2 > 0.0))
        throw DomainError("beat fit: n0, t1 and t2 must be positive");
    const CurveData d = poisson_data(hist);
    const double inv_t2_sq = std::isinf(t2) ? 0.0 : 1.0 / (t2 * t2);
    const double nyquist = pi / hist.bin_width;

    auto chi2_at = [&](double delta) {
        return chi_square(d, [&](double x) { return beat_model(x, n0, t1, inv_t2_sq, cos2_phi, delta); });
    };
    const ModelFn model = [&](double x, std::span<const double> p, std::span<double> g) {
        const double base = n0 * std::exp(-x * x / (t1 * t1));
        const double env = cos2_phi * std::exp(-x * x * inv_t2_sq);
        g[0] = base * env * std::sin(p[0] * x) * x;
        return base * (1.0 - env * std::cos(p[0] * x));
    };

    const int n_grid = std::max<int>(2000, 20 * static_cast<int>(d.size()));
    std::vector<double> grid(static_cast<std::size_t>(n_grid) + 1), chi(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        grid[k] = nyquist * static_cast<double>(k) / n_grid;
        chi[k] = chi2_at(grid[k]);
    }
    std::vector<std::size_t> minima;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const bool left = k == 0 || chi[k] <= chi[k - 1];
        const bool right = k + 1 == grid.size() || chi[k] <= chi[k + 1];
        if (left && right)
            minima.push_back(k);
    }
    std::sort(minima.begin(), minima.end(), [&](auto a, auto b) { return chi[a] < chi[b]; });
    if (minima.size() > 5)
        minima.resize(5);

    BeatFit best;
    best.chi2 = kInf;
    bool any = false;
    for (auto k : minima) {
        double delta = grid[k];
        double c = chi[k];
        int iters = 0;
        if (grid[k] > 0.0) {
            try {
                const auto r = levenberg_marquardt(d, model, {grid[k]}, opts);
                delta = std::abs(r.params[0]);
                c = r.chi2;
                iters = r.iterations;
            } catch (const FitFailure&) {
                continue;
            }
        }
        if (c < best.chi2) {
            best.chi2 = c;
            best.delta.value = delta;
            best.iterations = iters;
            any = true;
        }
    }
    if (!any)
        throw FitFailure("beat fit: no local refinement converged");
    const double h = 1e-3 * nyquist;
    best.delta.sigma = curvature_sigma(chi2_at, best.delta.value, h);
    best.aliasing = best.delta.value >= 0.99 * nyquist;
    return best;
}

WidthCovariance width_covariance(const CoincidenceHistogram& parallel, const PeakFit& peak, const DipFit& dip,
                                 double cos2_phi)
{
    WidthCovariance w;
    w.var_t1 = peak.t1.sigma * peak.t1.sigma;
    if (dip.unbounded) {
        w.var_t2 = kInf;
        return w;
    }
    // dT2 / d(n0, t1) by central differences over one standard error.
    auto t2_at = [&](double n0, double t1) { return fit_dip(parallel, n0, t1, cos2_phi).t2.value; };
    const double hn = peak.n0.sigma > 0.0 && std::isfinite(peak.n0.sigma) ? peak.n0.sigma : 1e-3 * peak.n0.value;
    const double ht = peak.t1.sigma > 0.0 && std::isfinite(peak.t1.sigma) ? peak.t1.sigma : 1e-3 * peak.t1.value;
    const double gn = (t2_at(peak.n0.value + hn, peak.t1.value) - t2_at(peak.n0.value - hn, peak.t1.value)) / (2 * hn);
    const double gt = (t2_at(peak.n0.value, peak.t1.value + ht) - t2_at(peak.n0.value, peak.t1.value - ht)) / (2 * ht);
    const double vn = peak.n0.sigma * peak.n0.sigma;
    const double vt = w.var_t1;
    const double c = peak.covariance;
    w.var_t2 = dip.t2.sigma * dip.t2.sigma + gn * gn * vn + 2.0 * gn * gt * c + gt * gt * vt;
    w.cov_t1_t2 = gn * c + gt * vt;
    return w;
}

namespace {

// N0 transferred to a run of different length, in proportion to its clicks.
PeakFit rescaled(const PeakFit& peak, const CoincidenceHistogram& from, const CoincidenceHistogram& to)
{
    if (from.total_detections == 0 || to.total_detections == 0)
        return peak;
    const double s = static_cast<double>(to.total_detections) / static_cast<double>(from.total_detections);
    PeakFit p = peak;
    p.n0.value *= s;
    p.n0.sigma *= s;
    p.covariance *= s;
    return p;
}

}  // namespace

FitResult two_step_fit(const CoincidenceHistogram& perpendicular, const CoincidenceHistogram* parallel,
                       const CoincidenceHistogram* beat, double cos2_phi, const FitOptions& opts)
{
    FitResult out;
    out.cos2_phi_used = cos2_phi;
    const PeakFit peak = fit_peak(perpendicular, opts);
    out.n0 = peak.n0.value;
    out.t1 = peak.t1.value;
    out.n0_estimate = peak.n0;
    out.t1_estimate = peak.t1;
    double chi2 = peak.chi2;
    double t2 = kInf;
    if (parallel != nullptr) {
        const PeakFit p = rescaled(peak, perpendicular, *parallel);
        const DipFit dip = fit_dip(*parallel, p.n0.value, p.t1.value, cos2_phi, opts);
        chi2 += dip.chi2;
        t2 = dip.t2.value;
        out.t2 = t2;
        out.t2_estimate = dip.t2;
        if (dip.unbounded) {
            out.flags.emplace_back("t2_unbounded");
        } else {
            out.widths_covariance = width_covariance(*parallel, p, dip, cos2_phi);
        }
    }
    if (beat != nullptr) {
        const PeakFit p = rescaled(peak, perpendicular, *beat);
        const BeatFit bf = fit_beat(*beat, p.n0.value, p.t1.value, t2, cos2_phi, opts);
        chi2 += bf.chi2;
        out.delta = bf.delta.value;
        out.delta_estimate = bf.delta;
        if (bf.aliasing)
            out.flags.emplace_back("aliasing");
    }
    out.residual_norm = std::sqrt(chi2);
    return out;
}

}  // namespace photon_beat
