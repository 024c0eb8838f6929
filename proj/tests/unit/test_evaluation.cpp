#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "xlink/error.hpp"
#include "xlink/evaluation.hpp"

using namespace xlink;

namespace {

// Scores of every row; labels as 0/1.
std::pair<std::vector<double>, std::vector<int>> random_scores(std::mt19937_64& gen, std::size_t n, int levels) {
    std::vector<double> s;
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) {
        s.push_back(static_cast<double>(gen() % levels) / levels);
        y.push_back(static_cast<int>(gen() % 2));
    }
    if (std::count(y.begin(), y.end(), 1) == 0) y[0] = 1;
    if (std::count(y.begin(), y.end(), 0) == 0) y[0] = 0;
    return {s, y};
}

std::vector<FoldData> with_constant(std::vector<FoldData> folds, std::size_t feature, double value) {
    for (auto& f : folds) {
        for (auto* t : {&f.train, &f.test}) {
            for (auto& row : *t) row.features.set(feature, value);
        }
    }
    return folds;
}

EvalOptions parallel(unsigned threads) {
    EvalOptions o;
    o.threads = threads;
    return o;
}

ModelConfig quick() {
    auto c = ModelConfig::defaults(ModelKind::logitboost);
    c.iterations = 15;
    return c;
}

} // namespace

TEST_SUITE("evaluation") {

TEST_CASE("auc examples") {
    const std::vector<double> pos{0.9, 0.8}, neg{0.1, 0.2};
    CHECK(roc_auc(pos, neg) == 1.0);
    CHECK(roc_auc(neg, pos) == 0.0);
    const std::vector<double> same{0.5};
    CHECK(roc_auc(same, same) == 0.5);
    const std::vector<double> p2{0.8, 0.4}, n2{0.6, 0.2};
    CHECK(roc_auc(p2, n2) == 0.75);
    const std::vector<double> empty;
    CHECK_THROWS_AS(roc_auc(empty, neg), EvaluationError);
    const std::vector<double> nan{std::nan("")};
    CHECK_THROWS_AS(roc_auc(nan, neg), EvaluationError);
    const std::vector<int> bad_labels{1, 2};
    const std::vector<double> two{0.1, 0.2};
    CHECK_THROWS_AS(roc_auc(two, bad_labels), ArgumentError);
}

TEST_CASE("auc equals brute force, the ROC area, and flips under negation") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 400; ++trial) {
        const auto [s, y] = random_scores(gen, 1 + gen() % 60, trial % 3 == 0 ? 4 : 1000);
        if (s.size() < 2) continue;
        const double auc = roc_auc(s, y);
        std::vector<double> pos, neg_scores;
        for (std::size_t i = 0; i < s.size(); ++i) (y[i] ? pos : neg_scores).push_back(s[i]);
        CHECK(auc == oracle::brute_auc(pos, neg_scores));
        CHECK(trapezoid_area(roc_curve(s, y)) == doctest::Approx(auc).epsilon(1e-12));
        std::vector<double> neg(s);
        for (auto& v : neg) v = -v;
        CHECK(auc + roc_auc(neg, y) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("roc curve spans the unit square") {
    const std::vector<double> s{0.9, 0.4, 0.6, 0.1};
    const std::vector<int> y{1, 1, 0, 0};
    const auto c = roc_curve(s, y);
    REQUIRE(c.size() == 5);
    CHECK(c.front().fpr == 0.0);
    CHECK(c.front().tpr == 0.0);
    CHECK(c.back().fpr == 1.0);
    CHECK(c.back().tpr == 1.0);
    for (std::size_t i = 1; i < c.size(); ++i) {
        CHECK(c[i].fpr >= c[i - 1].fpr);
        CHECK(c[i].tpr >= c[i - 1].tpr);
    }
}

TEST_CASE("confusion metrics") {
    const std::vector<double> s{0.9, 0.4, 0.6, 0.1};
    const std::vector<int> y{1, 1, 0, 0};
    const auto m = confusion_metrics(s, y);
    CHECK(m.accuracy == 0.5);
    CHECK(m.tpr.value() == 0.5);
    CHECK(m.fpr.value() == 0.5);
    CHECK(m.tp == 1);
    CHECK(m.fp == 1);
    const std::vector<double> at{0.5};
    const std::vector<int> one{1};
    CHECK(confusion_metrics(at, one).tp == 1); // threshold is inclusive
    CHECK_FALSE(confusion_metrics(at, one).fpr.has_value());
}

TEST_CASE("anova examples") {
    const auto r = anova_f({{1, 2, 3}, {4, 5, 6}});
    // SSB = 13.5, SSW = 4: F = 13.5 / (4 / 4).
    CHECK(r.f == doctest::Approx(13.5));
    CHECK(r.df1 == 1);
    CHECK(r.df2 == 4);
    CHECK(r.p == doctest::Approx(oracle::f_survival(13.5, 1, 4)).epsilon(1e-9));

    const auto e = anova_f({{1, 3}, {5, 7}});
    CHECK(e.f == doctest::Approx(8.0));
    CHECK(e.p == doctest::Approx(1.0 - std::sqrt(0.8)).epsilon(1e-9));

    const auto same = anova_f({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}});
    CHECK(same.f == 0.0);
    CHECK(same.p == doctest::Approx(1.0));

    CHECK_THROWS_AS(anova_f({{1, 2, 3}}), ArgumentError);
    CHECK_THROWS_AS(anova_f({{1, 2}, {3}}), ArgumentError);
    CHECK_THROWS_AS(anova_f({{1, 1}, {2, 2}}), EvaluationError);
}

TEST_CASE("anova matches the reference F distribution and ignores shifts") {
    std::mt19937_64 gen(17);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 2 + gen() % 4;
        std::vector<std::vector<double>> groups(k);
        for (std::size_t g = 0; g < k; ++g) {
            const std::size_t n = 2 + gen() % 8;
            for (std::size_t i = 0; i < n; ++i) groups[g].push_back(nd(gen) + 0.3 * static_cast<double>(g));
        }
        const auto r = anova_f(groups);
        CHECK(r.p == doctest::Approx(oracle::f_survival(r.f, r.df1, r.df2)).epsilon(1e-8));
        auto shifted = groups;
        for (auto& g : shifted) {
            for (auto& v : g) v += 10.0;
        }
        CHECK(anova_f(shifted).f == doctest::Approx(r.f).epsilon(1e-8));
    }
    CHECK(regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0);
    CHECK(regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0);
    // I_x(1, 1) = x
    CHECK(regularized_incomplete_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("scenario parsing and subsets") {
    CHECK(parse_scenario("A") == Scenario::A_all);
    CHECK(parse_scenario("C") == Scenario::C_deanonymize);
    CHECK_THROWS_AS(parse_scenario("D"), ArgumentError);
    CHECK(scenario_features(Scenario::A_all).size() == 27);
    CHECK(scenario_features(Scenario::B_search).size() == 27);
    const auto c = scenario_features(Scenario::C_deanonymize);
    CHECK(c.size() == 17);
    for (std::size_t i = 0; i < 10; ++i) CHECK_FALSE(c.contains(i));
}

TEST_CASE("scenario runs on a synthetic corpus") {
    SynthConfig cfg;
    cfg.n_profiles_per_network = 300;
    cfg.n_matched = 150;
    const auto p = fixture::run_pipeline(cfg, {5, 1, 5}, 2);

    const auto a = run_scenario(p.data, quick(), Scenario::A_all, parallel(2));
    CHECK(a.auc.mean.value() > 0.9);
    CHECK(a.per_fold.size() == 5);
    const auto again = run_scenario(p.data, quick(), Scenario::A_all, parallel(1));
    CHECK(a.to_json().dump() == again.to_json().dump());

    // Scenario B only tests pairs whose names share a Soundex code.
    const auto b = run_scenario(p.data, quick(), Scenario::B_search);
    for (std::size_t i = 0; i < b.per_fold.size(); ++i) {
        std::size_t expected = 0;
        for (const auto& row : p.data[i].test) {
            expected += row.features.present(0) && row.features.values[0] == 1.0;
        }
        if (!b.per_fold[i].skipped) CHECK(b.per_fold[i].n_test == expected);
        else CHECK(expected == 0);
    }

    // Scenario C never sees the name features.
    const auto c1 = run_scenario(p.data, quick(), Scenario::C_deanonymize);
    auto scrambled = p.data;
    std::mt19937_64 gen(3);
    for (auto& f : scrambled) {
        for (auto* t : {&f.train, &f.test}) {
            for (auto& row : *t) {
                for (std::size_t i = 0; i < 10; ++i) row.features.set(i, static_cast<double>(gen() % 100));
            }
        }
    }
    const auto c2 = run_scenario(scrambled, quick(), Scenario::C_deanonymize);
    CHECK(c1.to_json().dump() == c2.to_json().dump());
    CHECK(c1.feature_subset == scenario_features(Scenario::C_deanonymize));
}

TEST_CASE("scenario B with no equal Soundex names fails") {
    SynthConfig cfg;
    cfg.n_profiles_per_network = 200;
    cfg.n_matched = 120;
    const auto p = fixture::run_pipeline(cfg, {4, 1, 5}, 2);
    const auto folds = with_constant(p.data, 0, 0.0);
    CHECK_THROWS_AS(run_scenario(folds, quick(), Scenario::B_search), EvaluationError);
}

TEST_CASE("noise-free clones are separated perfectly") {
    SynthConfig cfg;
    cfg.n_profiles_per_network = 200;
    cfg.n_matched = 120;
    cfg.typo_rate = 0.0;
    cfg.token_swap_rate = 0.0;
    cfg.field_drop_rate = 0.0;
    cfg.friend_overlap = 1.0;
    const auto p = fixture::run_pipeline(cfg, {4, 1, 5}, 2);
    const auto r = run_scenario(p.data, quick(), Scenario::A_all);
    CHECK(r.auc.mean.value() == 1.0);
}

TEST_CASE("ablation") {
    SynthConfig cfg;
    cfg.n_profiles_per_network = 300;
    cfg.n_matched = 150;
    cfg.friend_overlap = 0.05;
    const auto p = fixture::run_pipeline(cfg, {5, 1, 5}, 2);

    // A constant column carries no signal.
    const auto flat = with_constant(p.data, 25, 0.5);
    const auto only = ablation(flat, quick(), AblationMode::only_x, parallel(2));
    REQUIRE(only.per_feature.size() == 27);
    CHECK(only.per_feature[25] == doctest::Approx(0.5));
    // Names survive the noise; friend-of-friend overlap does not.
    CHECK(only.per_feature[5] > only.per_feature[25]);
    CHECK(only.ranking().size() == 27);
    CHECK(only.to_csv().find("25,f25_") != std::string::npos);

    const auto abx = ablation(p.data, quick(), AblationMode::all_but_x, parallel(2));
    REQUIRE(abx.baseline_auc.has_value());
    for (std::size_t i = 0; i < 27; ++i) {
        INFO(feature_names()[i]);
        CHECK(abx.per_feature[i] <= *abx.baseline_auc + 0.02);
    }
    CHECK(parse_ablation_mode("all-but-x") == AblationMode::all_but_x);
    CHECK_THROWS_AS(parse_ablation_mode("some"), ArgumentError);
}

TEST_CASE("classifier comparison") {
    SynthConfig cfg;
    cfg.n_profiles_per_network = 300;
    cfg.n_matched = 150;
    const auto p = fixture::run_pipeline(cfg, {5, 1, 5}, 2);
    auto ada = ModelConfig::defaults(ModelKind::adaboost);
    ada.iterations = 30;
    auto rf = ModelConfig::defaults(ModelKind::random_forest);
    rf.trees = 30;
    const auto cmp = compare_classifiers(p.data, {quick(), ada, rf}, Scenario::A_all, parallel(2));
    REQUIRE(cmp.reports.size() == 3);
    const auto j = cmp.to_json();
    if (cmp.anova) {
        CHECK(cmp.anova->df1 == 2);
        std::vector<std::vector<double>> groups;
        for (const auto& r : cmp.reports) groups.push_back(r.fold_aucs());
        CHECK(cmp.anova->f == doctest::Approx(anova_f(groups).f));
        CHECK(j["anova"]["unit"] == "fold AUC");
    } else {
        CHECK_FALSE(cmp.notes.empty());
    }
}

}
