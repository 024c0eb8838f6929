#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "xlink/feature_table.hpp"
#include "xlink/learning.hpp"

namespace xlink {

// ---------------------------------------------------------------- measures

// Mann-Whitney form of the AUC: (#{p > n} + #{p = n} / 2) / (|pos| |neg|).
// O(m log m). Throws EvaluationError if either list is empty or has a NaN.
double roc_auc(std::span<const double> scores_pos, std::span<const double> scores_neg);
// labels: 1 = positive, 0 = negative.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0;
};

// Operating points from (0,0) to (1,1), one per distinct score.
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels);
double trapezoid_area(const std::vector<RocPoint>& curve);

struct ConfusionMetrics {
    double accuracy = 0.0;
    std::optional<double> tpr; // undefined without positives
    std::optional<double> fpr; // undefined without negatives
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

// Predicts a match iff score >= threshold.
ConfusionMetrics confusion_metrics(std::span<const double> scores, std::span<const int> labels,
                                   double threshold = 0.5);

// ---------------------------------------------------------------- ANOVA

// I_x(a, b), continued-fraction evaluation to relative tolerance 1e-10.
double regularized_incomplete_beta(double a, double b, double x);

// P(F > f) for an F(df1, df2) variable.
double f_survival(double f, double df1, double df2);

struct AnovaResult {
    double f = 0.0;
    std::size_t df1 = 0;
    std::size_t df2 = 0;
    double p = 1.0;
};

// One-way ANOVA across groups.
AnovaResult anova_f(const std::vector<std::vector<double>>& groups);

// ---------------------------------------------------------------- scenarios

enum class Scenario {
    A_all,          // every feature
    B_search,       // test pairs restricted to equal Soundex names
    C_deanonymize,  // name features withheld
};

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view s); // "A", "B", "C"

// The features a scenario trains and tests on.
FeatureSubset scenario_features(Scenario s);

struct FoldResult {
    std::size_t fold = 0;
    bool skipped = false;
    std::size_t n_test = 0;
    std::size_t n_test_positives = 0;
    std::optional<double> auc;
    std::optional<double> accuracy;
    std::optional<double> tpr;
    std::optional<double> fpr;
    std::vector<RocPoint> roc;
};

struct MeasureSummary {
    std::optional<double> mean;
    std::optional<double> stddev; // sample standard deviation
    std::size_t count = 0;
};

struct EvalReport {
    Scenario scenario = Scenario::A_all;
    ModelKind classifier = ModelKind::logitboost;
    FeatureSubset feature_subset;
    double threshold = 0.5;
    std::vector<FoldResult> per_fold;
    MeasureSummary auc, accuracy, tpr, fpr;
    std::vector<std::string> warnings;

    // Defined fold AUCs in fold order.
    std::vector<double> fold_aucs() const;
    nlohmann::ordered_json to_json() const;
    // `fold,fpr,tpr` rows.
    std::string roc_csv() const;
};

struct EvalOptions {
    double threshold = 0.5;
    unsigned threads = 1; // folds evaluated concurrently
    // Overrides the scenario's feature subset (ablation).
    std::optional<FeatureSubset> features;
};

// Trains on each fold's training rows and scores its test rows.
// Scenario B raises EvaluationError when no fold has a qualifying test pair.
EvalReport run_scenario(const std::vector<FoldData>& folds, const ModelConfig& config,
                        Scenario scenario, const EvalOptions& options = {});

enum class AblationMode { all_but_x, only_x };

std::string_view to_string(AblationMode m);
AblationMode parse_ablation_mode(std::string_view s); // "all-but-x", "only-x"

struct AblationReport {
    AblationMode mode = AblationMode::only_x;
    ModelKind classifier = ModelKind::logitboost;
    std::vector<double> per_feature; // mean AUC by feature index; NaN when undefined
    std::optional<double> baseline_auc; // all features, scenario A

    // Feature indices by decreasing AUC.
    std::vector<std::size_t> ranking() const;
    nlohmann::ordered_json to_json() const;
    std::string to_csv() const;
};

// One scenario-A evaluation per feature with the corresponding subset.
AblationReport ablation(const std::vector<FoldData>& folds, const ModelConfig& config,
                        AblationMode mode, const EvalOptions& options = {});

struct ComparisonReport {
    std::vector<EvalReport> reports;
    std::optional<AnovaResult> anova; // over per-fold AUCs
    std::vector<std::string> notes;   // why the ANOVA is absent or groups were dropped

    nlohmann::ordered_json to_json() const;
};

// Evaluates several classifiers on the same folds and runs a one-way ANOVA on
// their fold AUCs when at least two have usable results.
ComparisonReport compare_classifiers(const std::vector<FoldData>& folds,
                                     const std::vector<ModelConfig>& configs, Scenario scenario,
                                     const EvalOptions& options = {});

} // namespace xlink
