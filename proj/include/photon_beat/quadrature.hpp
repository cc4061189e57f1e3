#pragma once

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "photon_beat/errors.hpp"

namespace photon_beat {

struct QuadratureOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-8;
    int initial_intervals = 8;
    int max_intervals = 4000;
    /// Gauss-Kronrod rule: 15, 31 or 61 points.
    int rule_points = 15;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
};

namespace detail {

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

// N-point Gauss-Kronrod rule on [a, b] with QUADPACK's error heuristic.
// Node tables come from Boost.Math; abscissa()[0] is the centre and the
// embedded Gauss nodes sit at even indices when the Gauss order is odd,
// odd indices otherwise.
template <unsigned N, typename F>
Segment kronrod(F& f, double a, double b)
{
    constexpr unsigned G = (N - 1) / 2;
    constexpr unsigned H = (N + 1) / 2;
    const auto& xk = boost::math::quadrature::gauss_kronrod<double, N>::abscissa();
    const auto& wk = boost::math::quadrature::gauss_kronrod<double, N>::weights();
    const auto& wg = boost::math::quadrature::gauss<double, G>::weights();
    constexpr unsigned offset = G % 2 == 1 ? 0 : 1;

    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::array<double, H> fl{}, fr{};
    fl[0] = fr[0] = f(centre);
    for (unsigned j = 1; j < H; ++j) {
        const double dx = half * xk[j];
        fl[j] = f(centre - dx);
        fr[j] = f(centre + dx);
    }
    double kron = wk[0] * fl[0];
    double abs_sum = wk[0] * std::abs(fl[0]);
    for (unsigned j = 1; j < H; ++j) {
        kron += wk[j] * (fl[j] + fr[j]);
        abs_sum += wk[j] * (std::abs(fl[j]) + std::abs(fr[j]));
    }
    double gauss = offset == 0 ? wg[0] * fl[0] : 0.0;
    for (unsigned i = offset == 0 ? 1 : 0; i < wg.size(); ++i) {
        const unsigned j = 2 * i + offset;
        gauss += wg[i] * (fl[j] + fr[j]);
    }
    const double mean = 0.5 * kron;
    double asc = wk[0] * std::abs(fl[0] - mean);
    for (unsigned j = 1; j < H; ++j)
        asc += wk[j] * (std::abs(fl[j] - mean) + std::abs(fr[j] - mean));

    const double value = kron * half;
    const double resabs = abs_sum * std::abs(half);
    const double resasc = asc * std::abs(half);
    double err = std::abs((kron - gauss) * half);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
        err = std::max(50.0 * eps * resabs, err);
    return {a, b, value, err};
}

template <typename F>
Segment apply_rule(int points, F& f, double a, double b)
{
    switch (points) {
    case 15:
        return kronrod<15>(f, a, b);
    case 31:
        return kronrod<31>(f, a, b);
    case 61:
        return kronrod<61>(f, a, b);
    default:
        throw DomainError("quadrature rule must have 15, 31 or 61 points");
    }
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod quadrature of f over [a, b]. The interval
/// with the largest error estimate is bisected until the summed error is
/// below max(abs_tol, rel_tol |value|). Results are independent of any
/// threading in the caller: the subdivision order is fixed by the error
/// estimates alone and the final sum runs over segments sorted by position.
template <typename F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opts = {})
{
    QuadratureResult out;
    if (a == b)
        return out;
    std::priority_queue<detail::Segment> heap;
    const int n0 = std::max(1, opts.initial_intervals);
    const double step = (b - a) / n0;
    double total = 0.0, total_err = 0.0;
    for (int i = 0; i < n0; ++i) {
        const double lo = a + i * step;
        const double hi = (i + 1 == n0) ? b : a + (i + 1) * step;
        auto s = detail::apply_rule(opts.rule_points, f, lo, hi);
        total += s.value;
        total_err += s.error;
        heap.push(s);
    }
    int count = n0;
    while (total_err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
        if (count >= opts.max_intervals) {
            std::ostringstream msg;
            msg << "adaptive quadrature did not converge on [" << a << ", " << b
                << "]: achieved error " << total_err << " for value " << total;
            throw NumericalFailure(msg.str(), total_err);
        }
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        auto left = detail::apply_rule(opts.rule_points, f, worst.a, mid);
        auto right = detail::apply_rule(opts.rule_points, f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
    }

    // Re-sum in positional order so rounding does not depend on heap history.
    std::vector<detail::Segment> segments;
    segments.reserve(heap.size());
    while (!heap.empty()) {
        segments.push_back(heap.top());
        heap.pop();
    }
    std::sort(segments.begin(), segments.end(),
              [](const auto& l, const auto& r) { return l.a < r.a; });
    out.value = 0.0;
    out.error = 0.0;
    for (const auto& s : segments) {
        out.value += s.value;
        out.error += s.error;
    }
    out.evaluations = opts.rule_points * (2 * count - n0);
    return out;
}

}  // namespace photon_beat
