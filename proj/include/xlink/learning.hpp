#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "xlink/feature_table.hpp"
#include "xlink/features.hpp"
#include "xlink/rng.hpp"

namespace xlink {

// Every genuine feature value is >= 0, so masked entries are mapped here and
// trees can split missingness off on its own.
inline constexpr double kMissingSentinel = -1.0;

using Row = std::array<double, kFeatureCount>;

Row to_model_input(const FeatureVector& fv);

// Dense labelled design matrix with missing values already mapped.
struct TrainingData {
    std::vector<Row> x;
    std::vector<int> y; // 1 = match, 0 = non-match

    std::size_t size() const noexcept { return x.size(); }
    void add(const Row& row, int label);
    std::size_t positives() const;

    // Rows without a label are rejected.
    static TrainingData from_table(const FeatureTable& table);
};

enum class ModelKind { logitboost, adaboost, random_forest };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view s); // "logitboost", "adaboost", "rf"

struct ModelConfig {
    ModelKind kind = ModelKind::logitboost;
    // Boosting rounds (LogitBoost, AdaBoost).
    std::size_t iterations = 25;
    // Forest size.
    std::size_t trees = 150;
    // AdaBoost base tree depth.
    std::size_t base_depth = 2;
    // Forest trees: 0 grows to purity.
    std::size_t max_depth = 0;
    std::size_t min_leaf = 1;
    // Features tried per split in a forest; 0 means floor(sqrt(|features|)).
    std::size_t mtry = 0;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    FeatureSubset features;

    // 25 LogitBoost rounds, 200 AdaBoost rounds over depth-2 trees, 150 forest trees.
    static ModelConfig defaults(ModelKind kind);
};

struct RegressionStump {
    std::size_t feature = 0;
    double threshold = 0.0;
    double left = 0.0;  // x <= threshold
    double right = 0.0; // x > threshold

    double predict(const Row& x) const { return x[feature] <= threshold ? left : right; }
    bool operator==(const RegressionStump&) const = default;
};

// Weighted least-squares stump over `features`. `order[f]` lists row indices
// sorted by feature f. Falls back to a constant stump when no split exists.
RegressionStump fit_regression_stump(const TrainingData& data,
                                     const std::vector<std::vector<std::size_t>>& order,
                                     std::span<const double> target,
                                     std::span<const double> weight,
                                     const std::vector<std::size_t>& features);

struct TreeOptions {
    std::size_t max_depth = 0; // 0 = unlimited
    std::size_t min_leaf = 1;
    std::size_t mtry = 0;      // 0 = every candidate feature at every split
};

// Binary classification tree with weighted Gini splits; leaves hold the
// weighted fraction of matches.
class DecisionTree {
public:
    struct Node {
        int feature = -1; // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;

        bool operator==(const Node&) const = default;
    };

    // Rows with zero weight are ignored. `rng` is required when options.mtry
    // is smaller than the candidate feature count.
    static DecisionTree fit(const TrainingData& data, std::span<const double> weight,
                            const std::vector<std::size_t>& features, const TreeOptions& options,
                            Rng* rng = nullptr);

    double predict(const Row& x) const;
    std::size_t depth() const;
    const std::vector<Node>& nodes() const noexcept { return nodes_; }

    static DecisionTree from_nodes(std::vector<Node> nodes);
    bool operator==(const DecisionTree&) const = default;

private:
    std::vector<Node> nodes_;
};

struct WeightedTree {
    double weight = 1.0;
    DecisionTree tree;

    bool operator==(const WeightedTree&) const = default;
};

class TrainedModel {
public:
    ModelKind kind = ModelKind::logitboost;
    ModelConfig config;
    std::size_t training_rows = 0;
    std::vector<RegressionStump> stumps; // LogitBoost
    std::vector<WeightedTree> trees;     // AdaBoost (weight = alpha) and forests (weight 1)

    const FeatureSubset& features() const noexcept { return config.features; }

    // Probability of a match. Reads only the model's feature subset.
    double predict_row(const Row& x) const;
    double predict_proba(const FeatureVector& x) const;
    // Throws ArgumentError unless x has exactly 27 entries.
    double predict_proba(std::span<const double> x) const;
    std::vector<double> predict(const FeatureTable& table) const;

    nlohmann::ordered_json to_json() const;
    static TrainedModel from_json(const nlohmann::json& j);
    std::string serialize() const; // stable bytes for a given model
    void save(const std::filesystem::path& path) const;
    static TrainedModel load(const std::filesystem::path& path);
};

// Additive logistic regression with regression stumps. When `nll_trace` is
// given it receives the mean training negative log-likelihood before the first
// round and after every round.
TrainedModel train_logitboost(const TrainingData& data, const ModelConfig& config,
                              std::vector<double>* nll_trace = nullptr);

// Discrete AdaBoost over shallow classification trees. Stops early when the
// weighted error reaches 0 or 0.5.
TrainedModel train_adaboost(const TrainingData& data, const ModelConfig& config);

// Bagged trees with per-split feature sampling. Trees are trained on
// config.threads workers and merged by index.
TrainedModel train_random_forest(const TrainingData& data, const ModelConfig& config);

TrainedModel train_model(const TrainingData& data, const ModelConfig& config);

} // namespace xlink
