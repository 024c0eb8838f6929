#include "xlink/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "xlink/error.hpp"
#include "xlink/parallel.hpp"

namespace xlink {

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

MeasureSummary summarize(const std::vector<std::optional<double>>& values) {
    MeasureSummary s;
    std::vector<double> defined;
    for (const auto& v : values) {
        if (v) defined.push_back(*v);
    }
    s.count = defined.size();
    if (defined.empty()) return s;
    const double mean =
        std::accumulate(defined.begin(), defined.end(), 0.0) / static_cast<double>(defined.size());
    s.mean = mean;
    if (defined.size() >= 2) {
        double ss = 0.0;
        for (double v : defined) ss += (v - mean) * (v - mean);
        s.stddev = std::sqrt(ss / static_cast<double>(defined.size() - 1));
    }
    return s;
}

nlohmann::ordered_json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json summary_json(const MeasureSummary& s) {
    return {{"mean", optional_json(s.mean)}, {"std", optional_json(s.stddev)}, {"n", s.count}};
}

bool qualifies_for_search(const FeatureRow& row) {
    constexpr auto f00 = static_cast<std::size_t>(Feature::f00_soundexName);
    return row.features.present(f00) && row.features.values[f00] == 1.0;
}

struct FoldOutcome {
    FoldResult result;
    std::vector<std::string> warnings;
};

FoldOutcome evaluate_fold(std::size_t index, const FoldData& fold, const ModelConfig& config,
                          Scenario scenario, double threshold) {
    FoldOutcome out;
    FoldResult& r = out.result;
    r.fold = index;
    const std::string tag = "fold " + std::to_string(index) + ": ";

    std::vector<const FeatureRow*> test;
    for (const auto& row : fold.test) {
        if (scenario != Scenario::B_search || qualifies_for_search(row)) test.push_back(&row);
    }
    if (test.empty()) {
        r.skipped = true;
        out.warnings.push_back(tag + (fold.test.empty() ? "empty test set, skipped"
                                                        : "no test pair has equal Soundex names, skipped"));
        return out;
    }

    const TrainingData train = TrainingData::from_table(fold.train);
    const TrainedModel model = train_model(train, config);

    std::vector<double> scores;
    std::vector<int> labels;
    for (const FeatureRow* row : test) {
        if (!row->label) {
            throw EvaluationError(tag + "test pair (" + row->id1 + ", " + row->id2 + ") has no label");
        }
        scores.push_back(model.predict_proba(row->features));
        labels.push_back(*row->label == Label::match ? 1 : 0);
    }
    r.n_test = test.size();
    r.n_test_positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));

    const auto cm = confusion_metrics(scores, labels, threshold);
    r.accuracy = cm.accuracy;
    r.tpr = cm.tpr;
    r.fpr = cm.fpr;
    if (r.n_test_positives > 0 && r.n_test_positives < r.n_test) {
        r.auc = roc_auc(scores, labels);
        r.roc = roc_curve(scores, labels);
    } else {
        out.warnings.push_back(tag + "test set holds a single class, AUC undefined");
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------- scenarios

std::string_view to_string(Scenario s) {
    switch (s) {
    case Scenario::A_all: return "A";
    case Scenario::B_search: return "B";
    case Scenario::C_deanonymize: return "C";
    }
    return "?";
}

Scenario parse_scenario(std::string_view s) {
    if (s == "A" || s == "a" || s == "A_all") return Scenario::A_all;
    if (s == "B" || s == "b" || s == "B_search") return Scenario::B_search;
    if (s == "C" || s == "c" || s == "C_deanonymize") return Scenario::C_deanonymize;
    throw ArgumentError("unknown scenario '" + std::string(s) + "' (A, B, C)");
}

FeatureSubset scenario_features(Scenario s) {
    if (s == Scenario::C_deanonymize) {
        return FeatureSubset::range(static_cast<std::size_t>(Feature::f10_hometownDistanceKm),
                                    kFeatureCount - 1);
    }
    return FeatureSubset::all();
}

std::vector<double> EvalReport::fold_aucs() const {
    std::vector<double> out;
    for (const auto& f : per_fold) {
        if (f.auc) out.push_back(*f.auc);
    }
    return out;
}

nlohmann::ordered_json EvalReport::to_json() const {
    nlohmann::ordered_json j;
    j["scenario"] = std::string(to_string(scenario));
    j["classifier"] = std::string(to_string(classifier));
    j["feature_subset"] = feature_subset.indices();
    j["threshold"] = threshold;
    j["summary"] = {{"auc", summary_json(auc)},
                    {"accuracy", summary_json(accuracy)},
                    {"tpr", summary_json(tpr)},
                    {"fpr", summary_json(fpr)}};
    auto folds = nlohmann::ordered_json::array();
    for (const auto& f : per_fold) {
        folds.push_back({{"fold", f.fold},
                         {"skipped", f.skipped},
                         {"n_test", f.n_test},
                         {"n_test_positives", f.n_test_positives},
                         {"auc", optional_json(f.auc)},
                         {"accuracy", optional_json(f.accuracy)},
                         {"tpr", optional_json(f.tpr)},
                         {"fpr", optional_json(f.fpr)}});
    }
    j["per_fold"] = folds;
    j["warnings"] = warnings;
    return j;
}

std::string EvalReport::roc_csv() const {
    std::string out = "fold,fpr,tpr\n";
    for (const auto& f : per_fold) {
        for (const auto& p : f.roc) {
            out += std::to_string(f.fold) + ',' + format_double(p.fpr) + ',' +
                   format_double(p.tpr) + '\n';
        }
    }
    return out;
}

EvalReport run_scenario(const std::vector<FoldData>& folds, const ModelConfig& config,
                        Scenario scenario, const EvalOptions& options) {
    if (folds.empty()) throw ArgumentError("no folds to evaluate");
    if (!(options.threshold >= 0.0 && options.threshold <= 1.0)) {
        throw ArgumentError("threshold must lie in [0, 1]");
    }
    ModelConfig cfg = config;
    cfg.features = options.features ? *options.features : scenario_features(scenario);

    std::vector<FoldOutcome> outcomes(folds.size());
    parallel_for(folds.size(), options.threads, [&](std::size_t i) {
        outcomes[i] = evaluate_fold(i, folds[i], cfg, scenario, options.threshold);
    });

    EvalReport report;
    report.scenario = scenario;
    report.classifier = cfg.kind;
    report.feature_subset = cfg.features;
    report.threshold = options.threshold;
    std::vector<std::optional<double>> aucs, accs, tprs, fprs;
    bool any_evaluated = false;
    for (auto& o : outcomes) {
        any_evaluated = any_evaluated || !o.result.skipped;
        aucs.push_back(o.result.auc);
        accs.push_back(o.result.accuracy);
        tprs.push_back(o.result.tpr);
        fprs.push_back(o.result.fpr);
        for (auto& w : o.warnings) report.warnings.push_back(std::move(w));
        report.per_fold.push_back(std::move(o.result));
    }
    if (!any_evaluated) {
        throw EvaluationError(scenario == Scenario::B_search
                                  ? "scenario B: no fold has a test pair with equal Soundex names"
                                  : "no fold has any test pairs");
    }
    report.auc = summarize(aucs);
    report.accuracy = summarize(accs);
    report.tpr = summarize(tprs);
    report.fpr = summarize(fprs);
    return report;
}

// ---------------------------------------------------------------- ablation

std::string_view to_string(AblationMode m) {
    return m == AblationMode::all_but_x ? "all-but-x" : "only-x";
}

AblationMode parse_ablation_mode(std::string_view s) {
    if (s == "all-but-x" || s == "all_but_x") return AblationMode::all_but_x;
    if (s == "only-x" || s == "only_x") return AblationMode::only_x;
    throw ArgumentError("unknown ablation mode '" + std::string(s) + "' (all-but-x, only-x)");
}

std::vector<std::size_t> AblationReport::ranking() const {
    std::vector<std::size_t> order(per_feature.size());
    std::iota(order.begin(), order.end(), 0);
    // Undefined cells sort last; ties keep feature order.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = per_feature[a], vb = per_feature[b];
        if (std::isnan(va)) return false;
        if (std::isnan(vb)) return true;
        return va > vb;
    });
    return order;
}

nlohmann::ordered_json AblationReport::to_json() const {
    nlohmann::ordered_json j;
    j["mode"] = std::string(to_string(mode));
    j["classifier"] = std::string(to_string(classifier));
    j["baseline_auc"] = optional_json(baseline_auc);
    auto cells = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < per_feature.size(); ++i) {
        const double v = per_feature[i];
        cells.push_back({{"index", i},
                         {"feature", feature_names()[i]},
                         {"auc", std::isnan(v) ? nlohmann::ordered_json(nullptr)
                                               : nlohmann::ordered_json(v)}});
    }
    j["per_feature"] = cells;
    j["ranking"] = ranking();
    return j;
}

std::string AblationReport::to_csv() const {
    std::string out = "index,feature,auc\n";
    for (std::size_t i = 0; i < per_feature.size(); ++i) {
        out += std::to_string(i) + ',' + std::string(feature_names()[i]) + ',' +
               (std::isnan(per_feature[i]) ? std::string() : format_double(per_feature[i])) + '\n';
    }
    return out;
}

AblationReport ablation(const std::vector<FoldData>& folds, const ModelConfig& config,
                        AblationMode mode, const EvalOptions& options) {
    AblationReport report;
    report.mode = mode;
    report.classifier = config.kind;
    report.per_feature.assign(kFeatureCount, std::numeric_limits<double>::quiet_NaN());

    // Cells run concurrently; each cell evaluates its folds sequentially.
    EvalOptions cell = options;
    cell.threads = 1;
    std::vector<std::optional<double>> baseline(1);
    parallel_for(kFeatureCount + 1, options.threads, [&](std::size_t x) {
        EvalOptions o = cell;
        if (x == kFeatureCount) {
            o.features = FeatureSubset::all();
            baseline[0] = run_scenario(folds, config, Scenario::A_all, o).auc.mean;
            return;
        }
        o.features = mode == AblationMode::all_but_x ? FeatureSubset::all_but(x)
                                                     : FeatureSubset::only(x);
        const auto mean = run_scenario(folds, config, Scenario::A_all, o).auc.mean;
        if (mean) report.per_feature[x] = *mean;
    });
    report.baseline_auc = baseline[0];
    return report;
}

// ---------------------------------------------------------------- comparison

nlohmann::ordered_json ComparisonReport::to_json() const {
    nlohmann::ordered_json j;
    auto rs = nlohmann::ordered_json::array();
    for (const auto& r : reports) rs.push_back(r.to_json());
    j["reports"] = rs;
    if (anova) {
        j["anova"] = {{"unit", "fold AUC"},
                      {"f", anova->f},
                      {"df1", anova->df1},
                      {"df2", anova->df2},
                      {"p", anova->p}};
    } else {
        j["anova"] = nullptr;
    }
    j["notes"] = notes;
    return j;
}

ComparisonReport compare_classifiers(const std::vector<FoldData>& folds,
                                     const std::vector<ModelConfig>& configs, Scenario scenario,
                                     const EvalOptions& options) {
    if (configs.empty()) throw ArgumentError("no classifiers to compare");
    ComparisonReport out;
    std::vector<std::vector<double>> groups;
    for (const auto& cfg : configs) {
        out.reports.push_back(run_scenario(folds, cfg, scenario, options));
        auto aucs = out.reports.back().fold_aucs();
        if (aucs.size() >= 2) {
            groups.push_back(std::move(aucs));
        } else {
            out.notes.push_back(std::string(to_string(cfg.kind)) +
                                ": fewer than two defined fold AUCs, left out of the ANOVA");
        }
    }
    if (groups.size() >= 2) {
        try {
            out.anova = anova_f(groups);
        } catch (const EvaluationError& e) {
            out.notes.push_back(e.what());
        }
    } else if (configs.size() >= 2) {
        out.notes.push_back("ANOVA needs at least two classifiers with usable fold AUCs");
    }
    return out;
}

} // namespace xlink
