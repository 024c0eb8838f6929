#include <algorithm>
#include <cmath>
#include <numeric>

#include "xlink/error.hpp"
#include "xlink/learning.hpp"
#include "xlink/parallel.hpp"

namespace xlink {

namespace {

constexpr double kProbabilityFloor = 1e-5;

void require_both_classes(const TrainingData& data) {
    if (data.size() == 0) throw TrainingError("training set is empty");
    const std::size_t pos = data.positives();
    if (pos == 0 || pos == data.size()) {
        throw TrainingError("training set contains a single class (" + std::to_string(pos) +
                            " matches of " + std::to_string(data.size()) + " rows)");
    }
}

std::vector<std::vector<std::size_t>> presort(const TrainingData& data,
                                              const std::vector<std::size_t>& features) {
    std::vector<std::vector<std::size_t>> order(kFeatureCount);
    for (std::size_t f : features) {
        auto& idx = order[f];
        idx.resize(data.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            const double va = data.x[a][f], vb = data.x[b][f];
            return va != vb ? va < vb : a < b;
        });
    }
    return order;
}

double mean_nll(const std::vector<int>& y, const std::vector<double>& p) {
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        total -= y[i] == 1 ? std::log(p[i]) : std::log(1.0 - p[i]);
    }
    return total / static_cast<double>(y.size());
}

} // namespace

TrainedModel train_logitboost(const TrainingData& data, const ModelConfig& config,
                              std::vector<double>* nll_trace) {
    require_both_classes(data);
    const auto& features = config.features.indices();
    const auto order = presort(data, features);
    const std::size_t n = data.size();

    TrainedModel model;
    model.kind = ModelKind::logitboost;
    model.config = config;
    model.config.kind = ModelKind::logitboost;
    model.training_rows = n;

    std::vector<double> score(n, 0.0), p(n, 0.5), z(n), w(n);
    if (nll_trace) {
        nll_trace->clear();
        nll_trace->push_back(mean_nll(data.y, p));
    }
    for (std::size_t m = 0; m < config.iterations; ++m) {
        // Newton step on the logistic loss: weighted least squares on the
        // working response z with weights p(1 - p).
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = p[i] * (1.0 - p[i]);
            z[i] = (static_cast<double>(data.y[i]) - p[i]) / w[i];
        }
        const RegressionStump stump = fit_regression_stump(data, order, z, w, features);
        model.stumps.push_back(stump);
        for (std::size_t i = 0; i < n; ++i) {
            score[i] += 0.5 * stump.predict(data.x[i]);
            const double raw = 1.0 / (1.0 + std::exp(-2.0 * score[i]));
            p[i] = std::clamp(raw, kProbabilityFloor, 1.0 - kProbabilityFloor);
        }
        if (nll_trace) nll_trace->push_back(mean_nll(data.y, p));
    }
    return model;
}

TrainedModel train_adaboost(const TrainingData& data, const ModelConfig& config) {
    require_both_classes(data);
    const std::size_t n = data.size();
    TrainedModel model;
    model.kind = ModelKind::adaboost;
    model.config = config;
    model.config.kind = ModelKind::adaboost;
    model.training_rows = n;

    const TreeOptions options{config.base_depth, std::max<std::size_t>(1, config.min_leaf), 0};
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    std::vector<int> vote(n);
    for (std::size_t m = 0; m < config.iterations; ++m) {
        DecisionTree tree = DecisionTree::fit(data, w, config.features.indices(), options);
        double err = 0.0, total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            vote[i] = tree.predict(data.x[i]) >= 0.5 ? 1 : 0;
            total += w[i];
            if (vote[i] != data.y[i]) err += w[i];
        }
        const double eps = err / total;
        if (eps >= 0.5) {
            // No better than chance: keep a neutral member so the ensemble is never empty.
            if (model.trees.empty()) model.trees.push_back({0.0, std::move(tree)});
            break;
        }
        if (eps <= 0.0) {
            constexpr double kFloor = 1e-10;
            model.trees.push_back({0.5 * std::log((1.0 - kFloor) / kFloor), std::move(tree)});
            break;
        }
        const double alpha = 0.5 * std::log((1.0 - eps) / eps);
        model.trees.push_back({alpha, std::move(tree)});
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double agree = vote[i] == data.y[i] ? 1.0 : -1.0;
            w[i] *= std::exp(-alpha * agree);
            sum += w[i];
        }
        for (auto& wi : w) wi /= sum;
    }
    return model;
}

TrainedModel train_random_forest(const TrainingData& data, const ModelConfig& config) {
    require_both_classes(data);
    if (config.trees == 0) throw TrainingError("forest needs at least one tree");
    const std::size_t n = data.size();
    const auto& features = config.features.indices();
    const std::size_t mtry =
        config.mtry != 0
            ? std::min(config.mtry, features.size())
            : std::max<std::size_t>(
                  1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(features.size())))));

    TrainedModel model;
    model.kind = ModelKind::random_forest;
    model.config = config;
    model.config.kind = ModelKind::random_forest;
    model.training_rows = n;
    model.trees.resize(config.trees);

    const TreeOptions options{config.max_depth, std::max<std::size_t>(1, config.min_leaf), mtry};
    parallel_for(config.trees, config.threads, [&](std::size_t t) {
        Rng rng(derive_seed(config.seed, t));
        std::vector<double> counts(n, 0.0);
        for (std::size_t draw = 0; draw < n; ++draw) counts[rng.below(n)] += 1.0;
        model.trees[t] = {1.0, DecisionTree::fit(data, counts, features, options, &rng)};
    });
    return model;
}

TrainedModel train_model(const TrainingData& data, const ModelConfig& config) {
    switch (config.kind) {
    case ModelKind::logitboost: return train_logitboost(data, config);
    case ModelKind::adaboost: return train_adaboost(data, config);
    case ModelKind::random_forest: return train_random_forest(data, config);
    }
    throw ArgumentError("unknown model kind");
}

} // namespace xlink
