#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "xlink/error.hpp"
#include "xlink/evaluation.hpp"

namespace xlink {

namespace {

struct Scored {
    double score;
    int label;
};

std::vector<Scored> combine(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        throw ArgumentError("score and label counts differ");
    }
    std::vector<Scored> out;
    out.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (std::isnan(scores[i])) throw EvaluationError("NaN score");
        if (labels[i] != 0 && labels[i] != 1) throw ArgumentError("labels must be 0 or 1");
        out.push_back({scores[i], labels[i]});
    }
    return out;
}

double auc_from(std::vector<Scored> items, std::uint64_t n_pos, std::uint64_t n_neg) {
    if (n_pos == 0 || n_neg == 0) {
        throw EvaluationError("AUC is undefined without both positive and negative scores");
    }
    std::sort(items.begin(), items.end(),
              [](const Scored& a, const Scored& b) { return a.score < b.score; });
    // Twice the Mann-Whitney U, kept integral so ties count exactly one half.
    std::uint64_t twice_u = 0;
    std::uint64_t neg_below = 0;
    for (std::size_t i = 0; i < items.size();) {
        std::size_t j = i;
        std::uint64_t gp = 0, gn = 0;
        while (j < items.size() && items[j].score == items[i].score) {
            (items[j].label == 1 ? gp : gn) += 1;
            ++j;
        }
        twice_u += 2 * gp * neg_below + gp * gn;
        neg_below += gn;
        i = j;
    }
    return static_cast<double>(twice_u) /
           (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

} // namespace

double roc_auc(std::span<const double> scores_pos, std::span<const double> scores_neg) {
    std::vector<Scored> items;
    items.reserve(scores_pos.size() + scores_neg.size());
    for (double s : scores_pos) {
        if (std::isnan(s)) throw EvaluationError("NaN score");
        items.push_back({s, 1});
    }
    for (double s : scores_neg) {
        if (std::isnan(s)) throw EvaluationError("NaN score");
        items.push_back({s, 0});
    }
    return auc_from(std::move(items), scores_pos.size(), scores_neg.size());
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
    auto items = combine(scores, labels);
    const auto n_pos = static_cast<std::uint64_t>(std::count(labels.begin(), labels.end(), 1));
    return auc_from(std::move(items), n_pos, labels.size() - n_pos);
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels) {
    auto items = combine(scores, labels);
    const double n_pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
    const double n_neg = static_cast<double>(labels.size()) - n_pos;
    if (n_pos == 0 || n_neg == 0) throw EvaluationError("ROC curve needs both classes");
    std::sort(items.begin(), items.end(),
              [](const Scored& a, const Scored& b) { return a.score > b.score; });
    std::vector<RocPoint> curve{{0.0, 0.0, std::numeric_limits<double>::infinity()}};
    double tp = 0.0, fp = 0.0;
    for (std::size_t i = 0; i < items.size();) {
        std::size_t j = i;
        while (j < items.size() && items[j].score == items[i].score) {
            (items[j].label == 1 ? tp : fp) += 1.0;
            ++j;
        }
        curve.push_back({fp / n_neg, tp / n_pos, items[i].score});
        i = j;
    }
    return curve;
}

double trapezoid_area(const std::vector<RocPoint>& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        area += (curve[i].fpr - curve[i - 1].fpr) * (curve[i].tpr + curve[i - 1].tpr) / 2.0;
    }
    return area;
}

ConfusionMetrics confusion_metrics(std::span<const double> scores, std::span<const int> labels,
                                   double threshold) {
    const auto items = combine(scores, labels);
    if (items.empty()) throw EvaluationError("confusion metrics need at least one score");
    ConfusionMetrics m;
    for (const auto& it : items) {
        const bool predicted = it.score >= threshold;
        if (it.label == 1) (predicted ? m.tp : m.fn) += 1;
        else (predicted ? m.fp : m.tn) += 1;
    }
    m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(items.size());
    if (m.tp + m.fn > 0) m.tpr = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    if (m.fp + m.tn > 0) m.fpr = static_cast<double>(m.fp) / static_cast<double>(m.fp + m.tn);
    return m;
}

// ---------------------------------------------------------------- incomplete beta

namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
    constexpr double kTiny = 1e-300;
    constexpr double kTolerance = 1e-10;
    constexpr int kMaxIterations = 10000;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kTolerance) return h;
    }
    throw EvaluationError("incomplete beta continued fraction did not converge");
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw ArgumentError("incomplete beta needs a, b > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw ArgumentError("incomplete beta needs x in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_survival(double f, double df1, double df2) {
    if (!(df1 > 0.0) || !(df2 > 0.0)) throw ArgumentError("F distribution needs positive df");
    if (std::isnan(f)) throw ArgumentError("F statistic is NaN");
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    return regularized_incomplete_beta(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f));
}

AnovaResult anova_f(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw ArgumentError("ANOVA needs at least two groups");
    std::size_t n = 0;
    double grand = 0.0;
    for (const auto& g : groups) {
        if (g.size() < 2) throw ArgumentError("every ANOVA group needs at least two values");
        for (double v : g) {
            if (!std::isfinite(v)) throw ArgumentError("ANOVA values must be finite");
            grand += v;
        }
        n += g.size();
    }
    grand /= static_cast<double>(n);

    double ssb = 0.0, ssw = 0.0;
    for (const auto& g : groups) {
        const double mean = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
        ssb += static_cast<double>(g.size()) * (mean - grand) * (mean - grand);
        for (double v : g) ssw += (v - mean) * (v - mean);
    }
    AnovaResult r;
    r.df1 = groups.size() - 1;
    r.df2 = n - groups.size();
    if (ssw <= 0.0) {
        throw EvaluationError(ssb > 0.0
                                  ? "degenerate ANOVA: zero within-group variance, unequal means (F is infinite)"
                                  : "degenerate ANOVA: every value is identical");
    }
    r.f = (ssb / static_cast<double>(r.df1)) / (ssw / static_cast<double>(r.df2));
    r.p = f_survival(r.f, static_cast<double>(r.df1), static_cast<double>(r.df2));
    return r;
}

} // namespace xlink
