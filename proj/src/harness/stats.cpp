#include "sqlrl/harness/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sqlrl {

namespace {

// Linear interpolation between the two order statistics straddling the
// fractional rank h = (n-1)p.
double quantile_sorted(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = static_cast<double>(n - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= n) return sorted[n - 1];
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

double quantile(std::vector<double> xs, double p) {
    if (xs.empty()) throw std::invalid_argument("quantile of an empty series");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantile p outside [0,1]");
    std::sort(xs.begin(), xs.end());
    return quantile_sorted(xs, p);
}

SummaryStats summarize(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("summarize of an empty series");
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());

    SummaryStats s;
    s.n = sorted.size();
    s.min = sorted.front();
    s.max = sorted.back();
    double sum = 0.0;
    for (double x : sorted) sum += x;
    s.mean = sum / static_cast<double>(s.n);
    double ss = 0.0;
    for (double x : sorted) {
        const double d = x - s.mean;
        ss += d * d;
    }
    s.stddev = std::sqrt(ss / static_cast<double>(s.n));
    s.q1 = quantile_sorted(sorted, 0.25);
    s.median = quantile_sorted(sorted, 0.50);
    s.q3 = quantile_sorted(sorted, 0.75);
    s.notch = 1.57 * (s.q3 - s.q1) / std::sqrt(static_cast<double>(s.n));
    return s;
}

SummaryStats summarize(const std::vector<int>& xs) {
    return summarize(std::vector<double>(xs.begin(), xs.end()));
}

std::vector<double> smooth(const std::vector<double>& xs, std::size_t window) {
    if (window == 0) throw std::invalid_argument("smoothing window must be positive");
    if (xs.empty()) throw std::invalid_argument("smooth of an empty series");
    std::vector<double> out;
    out.reserve((xs.size() + window - 1) / window);
    for (std::size_t begin = 0; begin < xs.size(); begin += window) {
        const std::size_t end = std::min(begin + window, xs.size());
        double sum = 0.0;
        for (std::size_t i = begin; i < end; ++i) sum += xs[i];
        out.push_back(sum / static_cast<double>(end - begin));
    }
    return out;
}

LinearFit linfit(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.empty()) throw std::invalid_argument("linfit of an empty series");
    if (xs.size() != ys.size()) throw std::invalid_argument("linfit length mismatch");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        sxx += dx * dx;
        sxy += dx * (ys[i] - my);
    }

    LinearFit fit;
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
        const double d = ys[i] - my;
        ss_res += r * r;
        ss_tot += d * d;
    }
    // Exact fit of a constant target counts as fully explained.
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
    return fit;
}

}  // namespace sqlrl
