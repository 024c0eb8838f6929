#include "xlink/learning.hpp"

#include <algorithm>
#include <numeric>

#include "xlink/error.hpp"

namespace xlink {

namespace {

// Split point strictly between two distinct sorted values.
double midpoint(double lo, double hi) {
    const double m = lo + (hi - lo) / 2.0;
    return m < hi ? m : lo;
}

} // namespace

RegressionStump fit_regression_stump(const TrainingData& data,
                                     const std::vector<std::vector<std::size_t>>& order,
                                     std::span<const double> target,
                                     std::span<const double> weight,
                                     const std::vector<std::size_t>& features) {
    double total_w = 0.0, total_s = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        total_w += weight[i];
        total_s += weight[i] * target[i];
    }
    const double mean = total_w > 0.0 ? total_s / total_w : 0.0;
    RegressionStump best{features.front(), 0.0, mean, mean};
    double best_score = 0.0;
    bool found = false;

    for (std::size_t f : features) {
        const auto& idx = order[f];
        double wl = 0.0, sl = 0.0;
        for (std::size_t r = 0; r + 1 < idx.size(); ++r) {
            const std::size_t i = idx[r];
            wl += weight[i];
            sl += weight[i] * target[i];
            const double v = data.x[i][f];
            const double next = data.x[idx[r + 1]][f];
            if (v == next) continue;
            const double wr = total_w - wl;
            const double sr = total_s - sl;
            if (wl <= 0.0 || wr <= 0.0) continue;
            const double score = sl * sl / wl + sr * sr / wr;
            // Maximizing this is minimizing the weighted squared error.
            if (!found || score > best_score) {
                best_score = score;
                best = {f, midpoint(v, next), sl / wl, sr / wr};
                found = true;
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------- DecisionTree

namespace {

struct TreeBuilder {
    const TrainingData& data;
    std::span<const double> weight;
    const std::vector<std::size_t>& features;
    const TreeOptions& options;
    Rng* rng;
    std::vector<DecisionTree::Node> nodes;

    int build(std::vector<std::size_t>& rows, std::size_t depth) {
        double w = 0.0, wpos = 0.0;
        for (std::size_t i : rows) {
            w += weight[i];
            if (data.y[i] == 1) wpos += weight[i];
        }
        const int id = static_cast<int>(nodes.size());
        nodes.push_back({});
        nodes[id].value = w > 0.0 ? wpos / w : 0.0;

        const bool pure = wpos <= 0.0 || wpos >= w;
        const bool depth_reached = options.max_depth != 0 && depth >= options.max_depth;
        if (pure || depth_reached || rows.size() < 2 * options.min_leaf) return id;

        std::vector<std::size_t> candidates = features;
        if (options.mtry != 0 && options.mtry < features.size()) {
            if (!rng) throw ArgumentError("feature sampling requires a random generator");
            const auto picks = rng->sample_indices(features.size(), options.mtry);
            candidates.clear();
            for (std::size_t p : picks) candidates.push_back(features[p]);
            std::sort(candidates.begin(), candidates.end());
        }

        const double parent_impurity = gini_sum(w, wpos);
        double best_impurity = parent_impurity;
        std::size_t best_feature = 0;
        double best_threshold = 0.0;
        bool found = false;

        std::vector<std::size_t> sorted = rows;
        for (std::size_t f : candidates) {
            std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
                const double va = data.x[a][f], vb = data.x[b][f];
                return va != vb ? va < vb : a < b;
            });
            double wl = 0.0, wposl = 0.0;
            for (std::size_t r = 0; r + 1 < sorted.size(); ++r) {
                const std::size_t i = sorted[r];
                wl += weight[i];
                if (data.y[i] == 1) wposl += weight[i];
                const double v = data.x[i][f];
                const double next = data.x[sorted[r + 1]][f];
                if (v == next) continue;
                const std::size_t n_left = r + 1;
                if (n_left < options.min_leaf || sorted.size() - n_left < options.min_leaf) continue;
                const double wr = w - wl;
                if (wl <= 0.0 || wr <= 0.0) continue;
                const double impurity = gini_sum(wl, wposl) + gini_sum(wr, wpos - wposl);
                if (impurity < best_impurity - 1e-12 * w) {
                    best_impurity = impurity;
                    best_feature = f;
                    best_threshold = midpoint(v, next);
                    found = true;
                }
            }
        }
        if (!found) return id;

        std::vector<std::size_t> left, right;
        for (std::size_t i : rows) {
            (data.x[i][best_feature] <= best_threshold ? left : right).push_back(i);
        }
        rows.clear();
        rows.shrink_to_fit();
        nodes[id].feature = static_cast<int>(best_feature);
        nodes[id].threshold = best_threshold;
        const int l = build(left, depth + 1);
        const int r = build(right, depth + 1);
        nodes[id].left = l;
        nodes[id].right = r;
        return id;
    }

    // Weighted Gini impurity times node weight.
    static double gini_sum(double w, double wpos) {
        if (w <= 0.0) return 0.0;
        const double p = wpos / w;
        return w * 2.0 * p * (1.0 - p);
    }
};

} // namespace

DecisionTree DecisionTree::fit(const TrainingData& data, std::span<const double> weight,
                               const std::vector<std::size_t>& features,
                               const TreeOptions& options, Rng* rng) {
    if (features.empty()) throw ArgumentError("tree needs at least one feature");
    if (weight.size() != data.size()) throw ArgumentError("weight count does not match rows");
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (weight[i] > 0.0) rows.push_back(i);
    }
    TreeBuilder builder{data, weight, features, options, rng, {}};
    builder.build(rows, 0);
    DecisionTree tree;
    tree.nodes_ = std::move(builder.nodes);
    return tree;
}

double DecisionTree::predict(const Row& x) const {
    int id = 0;
    while (nodes_[id].feature >= 0) {
        const auto& n = nodes_[id];
        id = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes_[id].value;
}

std::size_t DecisionTree::depth() const {
    std::vector<std::size_t> d(nodes_.size(), 0);
    std::size_t deepest = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        deepest = std::max(deepest, d[i]);
        if (nodes_[i].feature >= 0) {
            d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
            d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
        }
    }
    return deepest;
}

DecisionTree DecisionTree::from_nodes(std::vector<Node> nodes) {
    if (nodes.empty()) throw ArgumentError("tree has no nodes");
    const int n = static_cast<int>(nodes.size());
    for (int i = 0; i < n; ++i) {
        const auto& node = nodes[static_cast<std::size_t>(i)];
        if (node.feature < 0) {
            if (!(node.value >= 0.0 && node.value <= 1.0)) {
                throw ArgumentError("leaf probability outside [0, 1]");
            }
            continue;
        }
        if (node.feature >= static_cast<int>(kFeatureCount)) throw ArgumentError("bad split feature");
        if (node.left <= i || node.right <= i || node.left >= n || node.right >= n) {
            throw ArgumentError("malformed tree node links");
        }
    }
    DecisionTree tree;
    tree.nodes_ = std::move(nodes);
    return tree;
}

} // namespace xlink
