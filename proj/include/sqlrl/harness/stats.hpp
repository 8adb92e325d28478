#pragma once

#include <cstddef>
#include <vector>

namespace sqlrl {

// Five-number summary plus the notch half-width 1.57*IQR/sqrt(n) that marks
// a 95% confidence interval for the median in the test-episode plots.
// Quartiles use the linear-interpolation convention; stddev is the
// population form (divides by n).
struct SummaryStats {
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double notch = 0.0;  // half-width, so the interval is median +- notch
    double min = 0.0;
    double max = 0.0;
    std::size_t n = 0;
};

// Throws std::invalid_argument on an empty series.
SummaryStats summarize(const std::vector<double>& xs);
SummaryStats summarize(const std::vector<int>& xs);

// Linear-interpolation quantile of an unsorted sample, p in [0,1].
double quantile(std::vector<double> xs, double p);

// Non-overlapping block means; a partial final block is averaged over its
// actual length. Throws std::invalid_argument if window == 0 or xs is empty.
std::vector<double> smooth(const std::vector<double>& xs, std::size_t window);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// Ordinary least squares y ~ slope*x + intercept with the coefficient of
// determination. A zero-variance target that the fit reproduces exactly
// reports r2 = 1. Throws std::invalid_argument on empty or length-mismatched
// input.
LinearFit linfit(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace sqlrl
