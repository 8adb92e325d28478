#include "sqlrl/harness/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sqlrl/actionspace.hpp"
#include "sqlrl/harness/stats.hpp"

namespace sqlrl {

namespace {

constexpr const char* kInk = "#222222";
constexpr const char* kGrid = "#d8d8d8";
// One color per agent, cycled.
constexpr const char* kSeries[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr int kSeriesCount = 10;

std::string escape_text(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Tick step on the 1/2/5 ladder giving roughly `target` divisions.
double nice_step(double range, int target) {
    if (range <= 0.0) return 1.0;
    const double raw = range / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) return m * mag;
    }
    return 10.0 * mag;
}

// A chart with margins, linear scales, and a small drawing vocabulary,
// accumulated in memory and written out in one piece.
class Chart {
public:
    Chart(double width, double height, const std::string& title) : w_(width), h_(height) {
        body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\""
              << h_ << "\" viewBox=\"0 0 " << w_ << " " << h_ << "\">\n"
              << "<rect width=\"" << w_ << "\" height=\"" << h_ << "\" fill=\"#ffffff\"/>\n";
        if (!title.empty()) {
            text(w_ / 2, 18, escape_text(title), 14, "middle", kInk, true);
        }
    }

    void set_range(double x0, double x1, double y0, double y1) {
        x0_ = x0;
        x1_ = x1 > x0 ? x1 : x0 + 1.0;
        y0_ = y0;
        y1_ = y1 > y0 ? y1 : y0 + 1.0;
    }

    double sx(double x) const { return left_ + (x - x0_) / (x1_ - x0_) * (w_ - left_ - right_); }
    double sy(double y) const {
        return h_ - bottom_ - (y - y0_) / (y1_ - y0_) * (h_ - top_ - bottom_);
    }

    void axes(const std::string& x_label, const std::string& y_label) {
        const double bx = h_ - bottom_;
        // Grid + ticks from nice steps inside the data range.
        const double xs = nice_step(x1_ - x0_, 6);
        for (double v = std::ceil(x0_ / xs) * xs; v <= x1_ + 1e-9; v += xs) {
            line(sx(v), top_, sx(v), bx, kGrid, 1.0);
            text(sx(v), bx + 16, fmt(v), 11, "middle", kInk);
        }
        const double ys = nice_step(y1_ - y0_, 5);
        for (double v = std::ceil(y0_ / ys) * ys; v <= y1_ + 1e-9; v += ys) {
            line(left_, sy(v), w_ - right_, sy(v), kGrid, 1.0);
            text(left_ - 6, sy(v) + 4, fmt(v), 11, "end", kInk);
        }
        line(left_, bx, w_ - right_, bx, kInk, 1.2);
        line(left_, top_, left_, bx, kInk, 1.2);
        if (!x_label.empty()) text((left_ + w_ - right_) / 2, h_ - 8, escape_text(x_label), 12, "middle", kInk);
        if (!y_label.empty()) {
            body_ << "<text x=\"14\" y=\"" << (top_ + bx) / 2 << "\" font-size=\"12\" fill=\""
                  << kInk << "\" text-anchor=\"middle\" font-family=\"sans-serif\" transform=\"rotate(-90 14 "
                  << (top_ + bx) / 2 << ")\">" << escape_text(y_label) << "</text>\n";
        }
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width, bool dashed = false) {
        body_ << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2)
              << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
              << width << "\"" << (dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                  double width, bool dashed = false) {
        body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << width
              << "\"" << (dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
        for (const auto& [x, y] : pts) body_ << fmt(sx(x)) << ',' << fmt(sy(y)) << ' ';
        body_ << "\"/>\n";
    }

    void polygon(const std::vector<std::pair<double, double>>& pts, const std::string& fill,
                 double opacity) {
        body_ << "<polygon fill=\"" << fill << "\" fill-opacity=\"" << opacity << "\" points=\"";
        for (const auto& [x, y] : pts) body_ << fmt(sx(x)) << ',' << fmt(sy(y)) << ' ';
        body_ << "\"/>\n";
    }

    // Rectangle in data coordinates (y_hi above y_lo).
    void data_rect(double x_lo, double x_hi, double y_lo, double y_hi, const std::string& fill,
                   const std::string& stroke, double opacity = 1.0) {
        body_ << "<rect x=\"" << fmt(sx(x_lo)) << "\" y=\"" << fmt(sy(y_hi)) << "\" width=\""
              << fmt(sx(x_hi) - sx(x_lo)) << "\" height=\"" << fmt(sy(y_lo) - sy(y_hi))
              << "\" fill=\"" << fill << "\" fill-opacity=\"" << opacity << "\" stroke=\""
              << stroke << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, int size, const char* anchor,
              const std::string& fill, bool bold = false) {
        body_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-size=\"" << size
              << "\" fill=\"" << fill << "\" text-anchor=\"" << anchor
              << "\" font-family=\"sans-serif\"" << (bold ? " font-weight=\"bold\"" : "") << ">"
              << s << "</text>\n";
    }

    void legend_entry(int slot, const std::string& color, const std::string& label) {
        const double x = left_ + 10;
        const double y = top_ + 8 + 16 * slot;
        body_ << "<rect x=\"" << x << "\" y=\"" << y - 9 << "\" width=\"12\" height=\"12\" fill=\""
              << color << "\"/>\n";
        text(x + 18, y + 1, escape_text(label), 11, "start", kInk);
    }

    void write(const std::string& path) {
        body_ << "</svg>\n";
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot open " + path + " for writing");
        os << body_.str();
        if (!os) throw std::runtime_error("short write to " + path);
    }

    double left_ = 64, right_ = 20, top_ = 28, bottom_ = 44;

private:
    double w_, h_;
    double x0_ = 0, x1_ = 1, y0_ = 0, y1_ = 1;
    std::ostringstream body_;
};

std::vector<std::pair<double, double>> downsample(const std::vector<TrainRow>& rows,
                                                  double (*pick)(const TrainRow&),
                                                  std::size_t max_points = 1200) {
    std::vector<std::pair<double, double>> pts;
    const std::size_t stride = std::max<std::size_t>(1, rows.size() / max_points);
    for (std::size_t i = 0; i < rows.size(); i += stride) {
        pts.emplace_back(static_cast<double>(rows[i].episode), pick(rows[i]));
    }
    if ((rows.size() - 1) % stride != 0) {
        pts.emplace_back(static_cast<double>(rows.back().episode), pick(rows.back()));
    }
    return pts;
}

void require_rows(const std::vector<std::vector<TrainRow>>& per_agent) {
    if (per_agent.empty()) throw std::runtime_error("no metric series to plot");
    for (const auto& rows : per_agent) {
        if (rows.empty()) throw std::runtime_error("empty metric series");
    }
}

// Histogram over step counts with an overflow bucket, as percentages.
std::vector<double> step_shares(const std::vector<int>& steps, int max_bucket) {
    std::vector<double> shares(max_bucket + 1, 0.0);
    for (int s : steps) {
        const int bucket = s <= max_bucket ? s - 1 : max_bucket;
        shares[std::max(bucket, 0)] += 1.0;
    }
    for (double& v : shares) v = v * 100.0 / static_cast<double>(steps.size());
    return shares;
}

const char* family_color(int action_index) {
    if (action_index < kNumEscapeProbes) return "#1f77b4";
    if (action_index < kNumEscapeProbes + kNumColumnProbes) return "#2ca02c";
    return "#d62728";
}

}  // namespace

void plot_state_growth(const std::string& path,
                       const std::vector<std::vector<TrainRow>>& per_agent, long fit_lo,
                       long fit_hi) {
    require_rows(per_agent);
    double max_states = 0.0;
    long max_episode = 0;
    for (const auto& rows : per_agent) {
        max_states = std::max(max_states, static_cast<double>(rows.back().distinct_states));
        max_episode = std::max(max_episode, rows.back().episode);
    }
    if (fit_lo < 1 || fit_hi > max_episode || fit_lo >= fit_hi) {
        throw std::runtime_error("fit range outside the recorded episodes");
    }

    Chart chart(760, 430, "Distinct states instantiated during training");
    chart.set_range(0, static_cast<double>(max_episode), 0, max_states * 1.05);
    chart.axes("episode", "distinct states");
    for (std::size_t a = 0; a < per_agent.size(); ++a) {
        chart.polyline(
            downsample(per_agent[a],
                       [](const TrainRow& r) { return static_cast<double>(r.distinct_states); }),
            kSeries[a % kSeriesCount], 1.3);
    }

    // Least-squares overlay on the cross-agent mean inside [fit_lo, fit_hi].
    std::vector<double> xs;
    std::vector<double> ys;
    const std::size_t shortest =
        std::min_element(per_agent.begin(), per_agent.end(),
                         [](const auto& l, const auto& r) { return l.size() < r.size(); })
            ->size();
    for (std::size_t i = 0; i < shortest; ++i) {
        const long ep = per_agent[0][i].episode;
        if (ep < fit_lo || ep > fit_hi) continue;
        double sum = 0.0;
        for (const auto& rows : per_agent) sum += static_cast<double>(rows[i].distinct_states);
        xs.push_back(static_cast<double>(ep));
        ys.push_back(sum / static_cast<double>(per_agent.size()));
    }
    if (xs.size() >= 2) {
        const LinearFit fit = linfit(xs, ys);
        chart.polyline({{xs.front(), fit.slope * xs.front() + fit.intercept},
                        {xs.back(), fit.slope * xs.back() + fit.intercept}},
                       kInk, 1.6, /*dashed=*/true);
        char label[96];
        std::snprintf(label, sizeof(label), "fit on [%ld, %ld]: slope %.3f, R2 %.4f", fit_lo,
                      fit_hi, fit.slope, fit.r2);
        chart.legend_entry(0, kInk, label);
    }
    chart.write(path);
}

void plot_steps_curve(const std::string& path, const std::vector<std::vector<TrainRow>>& per_agent,
                      std::size_t window) {
    require_rows(per_agent);
    if (window == 0) throw std::runtime_error("smoothing window must be positive");
    std::vector<std::vector<double>> smoothed;
    std::size_t min_len = SIZE_MAX;
    for (const auto& rows : per_agent) {
        std::vector<double> steps;
        steps.reserve(rows.size());
        for (const TrainRow& r : rows) steps.push_back(static_cast<double>(r.steps));
        smoothed.push_back(smooth(steps, window));
        min_len = std::min(min_len, smoothed.back().size());
    }
    std::vector<double> mean(min_len, 0.0);
    std::vector<double> sd(min_len, 0.0);
    for (std::size_t i = 0; i < min_len; ++i) {
        double sum = 0.0;
        for (const auto& s : smoothed) sum += s[i];
        mean[i] = sum / static_cast<double>(smoothed.size());
        double ss = 0.0;
        for (const auto& s : smoothed) ss += (s[i] - mean[i]) * (s[i] - mean[i]);
        sd[i] = std::sqrt(ss / static_cast<double>(smoothed.size()));
    }
    double y_max = 0.0;
    for (std::size_t i = 0; i < min_len; ++i) y_max = std::max(y_max, mean[i] + sd[i]);

    Chart chart(760, 430, "Steps per episode (block means of " + std::to_string(window) + ")");
    chart.set_range(0, static_cast<double>(min_len) * static_cast<double>(window), 0,
                    y_max * 1.08 + 1e-9);
    chart.axes("episode", "steps");
    const auto block_x = [&](std::size_t i) {
        return (static_cast<double>(i) + 0.5) * static_cast<double>(window);
    };
    std::vector<std::pair<double, double>> band;
    band.reserve(2 * min_len);
    for (std::size_t i = 0; i < min_len; ++i) band.emplace_back(block_x(i), mean[i] + sd[i]);
    for (std::size_t i = min_len; i-- > 0;) band.emplace_back(block_x(i), std::max(0.0, mean[i] - sd[i]));
    chart.polygon(band, kSeries[0], 0.25);
    std::vector<std::pair<double, double>> center;
    center.reserve(min_len);
    for (std::size_t i = 0; i < min_len; ++i) center.emplace_back(block_x(i), mean[i]);
    chart.polyline(center, kSeries[0], 1.8);
    chart.legend_entry(0, kSeries[0], "cross-agent mean, +-1 sd band");
    chart.write(path);
}

void plot_test_notches(const std::string& path,
                       const std::vector<std::vector<int>>& per_agent_steps) {
    if (per_agent_steps.empty()) throw std::runtime_error("no test series to plot");
    std::vector<SummaryStats> stats;
    double y_max = 0.0;
    for (const auto& steps : per_agent_steps) {
        if (steps.empty()) throw std::runtime_error("empty test series");
        stats.push_back(summarize(steps));
        y_max = std::max(y_max, stats.back().max);
    }

    Chart chart(760, 430, "Greedy test episodes per agent");
    chart.set_range(0.0, static_cast<double>(stats.size()), 0.0, y_max * 1.1 + 1.0);
    chart.axes("agent", "steps to flag");
    for (std::size_t a = 0; a < stats.size(); ++a) {
        const SummaryStats& s = stats[a];
        const double cx = static_cast<double>(a) + 0.5;
        const std::string color = kSeries[a % kSeriesCount];
        chart.line(chart.sx(cx), chart.sy(s.min), chart.sx(cx), chart.sy(s.max), kInk, 1.0);
        chart.data_rect(cx - 0.28, cx + 0.28, s.q1, s.q3, color, kInk, 0.5);
        // Notch: the tighter box marks median +- 1.57*IQR/sqrt(n).
        chart.data_rect(cx - 0.16, cx + 0.16, std::max(s.q1, s.median - s.notch),
                        std::min(s.q3, s.median + s.notch), color, kInk, 0.95);
        chart.line(chart.sx(cx - 0.28), chart.sy(s.median), chart.sx(cx + 0.28),
                   chart.sy(s.median), kInk, 1.6);
    }
    chart.write(path);
}

void plot_step_distribution(const std::string& path, const std::vector<int>& steps) {
    if (steps.empty()) throw std::runtime_error("no test episodes to plot");
    constexpr int kMaxBucket = 15;
    const std::vector<double> shares = step_shares(steps, kMaxBucket);

    Chart chart(760, 430, "Steps to flag across test episodes");
    const double y_max = *std::max_element(shares.begin(), shares.end());
    chart.set_range(0.0, static_cast<double>(shares.size()), 0.0, y_max * 1.12 + 1e-9);
    chart.axes("steps (last bucket pools longer episodes)", "% of episodes");
    for (std::size_t b = 0; b < shares.size(); ++b) {
        chart.data_rect(static_cast<double>(b) + 0.12, static_cast<double>(b) + 0.88, 0.0,
                        shares[b], kSeries[0], kInk, 0.9);
        const std::string label = b < shares.size() - 1 ? std::to_string(b + 1)
                                                        : (std::to_string(kMaxBucket + 1) + "+");
        chart.text(chart.sx(static_cast<double>(b) + 0.5), chart.sy(0) + 16, label, 10, "middle",
                   kInk);
    }
    chart.write(path);
}

void plot_comparison(const std::string& path, const std::vector<int>& left_steps,
                     const std::string& left_label, const std::vector<int>& right_steps,
                     const std::string& right_label) {
    if (left_steps.empty() || right_steps.empty()) {
        throw std::runtime_error("both test series are required for a comparison plot");
    }
    constexpr int kMaxBucket = 15;
    const std::vector<double> left = step_shares(left_steps, kMaxBucket);
    const std::vector<double> right = step_shares(right_steps, kMaxBucket);
    double y_max = 0.0;
    for (std::size_t b = 0; b < left.size(); ++b) y_max = std::max({y_max, left[b], right[b]});

    Chart chart(760, 430, "Steps to flag: test distribution comparison");
    chart.set_range(0.0, static_cast<double>(left.size()), 0.0, y_max * 1.12 + 1e-9);
    chart.axes("steps (last bucket pools longer episodes)", "% of episodes");
    for (std::size_t b = 0; b < left.size(); ++b) {
        const double x = static_cast<double>(b);
        chart.data_rect(x + 0.10, x + 0.48, 0.0, left[b], kSeries[0], kInk, 0.9);
        chart.data_rect(x + 0.52, x + 0.90, 0.0, right[b], kSeries[1], kInk, 0.9);
        const std::string label =
            b < left.size() - 1 ? std::to_string(b + 1) : (std::to_string(kMaxBucket + 1) + "+");
        chart.text(chart.sx(x + 0.5), chart.sy(0) + 16, label, 10, "middle", kInk);
    }
    chart.legend_entry(0, kSeries[0], left_label);
    chart.legend_entry(1, kSeries[1], right_label);
    chart.write(path);
}

void plot_q_rows(const std::string& path,
                 const std::vector<std::pair<std::string, QRow>>& rows) {
    if (rows.empty()) throw std::runtime_error("no Q-rows to plot");
    const double panel_h = 150.0;
    const double width = 900.0;
    const double height = panel_h * static_cast<double>(rows.size()) + 40.0;

    std::ostringstream body;
    body << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
         << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
         << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
    for (std::size_t p = 0; p < rows.size(); ++p) {
        const auto& [label, q] = rows[p];
        const double top = 24.0 + panel_h * static_cast<double>(p);
        const double bottom = top + panel_h - 34.0;
        float lo = 0.0f;
        float hi = 0.0f;
        for (float v : q) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo < 1e-6f) hi = lo + 1.0f;
        const auto y_of = [&](double v) {
            return bottom - (v - lo) / (hi - lo) * (bottom - top - 14.0);
        };
        body << "<text x=\"16\" y=\"" << top + 2 << "\" font-size=\"12\" fill=\"" << kInk
             << "\" font-family=\"sans-serif\" font-weight=\"bold\">" << escape_text(label)
             << "</text>\n";
        const double bar_w = (width - 80.0) / static_cast<double>(kNumActions);
        body << "<line x1=\"40\" y1=\"" << y_of(0.0) << "\" x2=\"" << width - 40 << "\" y2=\""
             << y_of(0.0) << "\" stroke=\"" << kGrid << "\" stroke-width=\"1\"/>\n";
        for (int i = 0; i < kNumActions; ++i) {
            const double x = 40.0 + bar_w * static_cast<double>(i);
            const double y0 = y_of(0.0);
            const double y1 = y_of(q[i]);
            body << "<rect x=\"" << fmt(x + 1) << "\" y=\"" << fmt(std::min(y0, y1))
                 << "\" width=\"" << fmt(bar_w - 2) << "\" height=\""
                 << fmt(std::max(1.0, std::fabs(y0 - y1))) << "\" fill=\"" << family_color(i)
                 << "\"/>\n";
        }
        body << "<text x=\"40\" y=\"" << bottom + 14 << "\" font-size=\"10\" fill=\"" << kInk
             << "\" font-family=\"sans-serif\">actions 0-5 escape probes | 6-35 column probes | "
                "36-50 injections</text>\n";
    }
    body << "</svg>\n";
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << body.str();
    if (!os) throw std::runtime_error("short write to " + path);
}

}  // namespace sqlrl
