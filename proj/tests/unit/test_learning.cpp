#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "xlink/error.hpp"
#include "xlink/evaluation.hpp"
#include "xlink/learning.hpp"

using namespace xlink;

namespace {

// Label is 1 iff feature 3 exceeds 0.5; every other feature is noise.
TrainingData separable(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    TrainingData d;
    for (std::size_t i = 0; i < n; ++i) {
        Row r;
        for (auto& v : r) v = u(gen);
        r[3] = (i % 2 == 0) ? 0.6 + 0.4 * u(gen) : 0.4 * u(gen);
        d.add(r, i % 2 == 0 ? 1 : 0);
    }
    return d;
}

TrainingData noise(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    TrainingData d;
    for (std::size_t i = 0; i < n; ++i) {
        Row r;
        for (auto& v : r) v = u(gen);
        d.add(r, static_cast<int>(gen() % 2));
    }
    return d;
}

std::vector<double> scores(const TrainedModel& m, const TrainingData& d) {
    std::vector<double> s;
    for (const auto& r : d.x) s.push_back(m.predict_row(r));
    return s;
}

double accuracy(const TrainedModel& m, const TrainingData& d) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < d.size(); ++i) ok += (m.predict_row(d.x[i]) >= 0.5) == (d.y[i] == 1);
    return static_cast<double>(ok) / static_cast<double>(d.size());
}

const std::vector<ModelKind> kKinds{ModelKind::logitboost, ModelKind::adaboost, ModelKind::random_forest};

ModelConfig small(ModelKind kind) {
    auto c = ModelConfig::defaults(kind);
    if (kind == ModelKind::adaboost) c.iterations = 50;
    if (kind == ModelKind::random_forest) c.trees = 40;
    return c;
}

} // namespace

TEST_SUITE("learning") {

TEST_CASE("missing values map to the sentinel") {
    FeatureVector fv;
    fv.values[0] = 0.7;
    fv.set_missing(1);
    const Row r = to_model_input(fv);
    CHECK(r[0] == 0.7);
    CHECK(r[1] == kMissingSentinel);
}

TEST_CASE("model kinds parse") {
    CHECK(parse_model_kind("rf") == ModelKind::random_forest);
    CHECK(parse_model_kind("logitboost") == ModelKind::logitboost);
    CHECK(to_string(ModelKind::adaboost) == "adaboost");
    CHECK_THROWS_AS(parse_model_kind("svm"), ArgumentError);
}

TEST_CASE("separable data is fit exactly by every classifier") {
    const auto train = separable(200, 1);
    const auto test = separable(200, 2);
    for (auto kind : kKinds) {
        INFO(to_string(kind));
        const auto m = train_model(train, small(kind));
        CHECK(m.kind == kind);
        CHECK(accuracy(m, train) == 1.0);
        CHECK(accuracy(m, test) == 1.0);
    }
}

TEST_CASE("random labels do not generalize") {
    const auto train = noise(600, 3);
    const auto test = noise(600, 4);
    for (auto kind : kKinds) {
        INFO(to_string(kind));
        const auto m = train_model(train, small(kind));
        const double auc = roc_auc(scores(m, test), test.y);
        CHECK(std::abs(auc - 0.5) <= 0.1);
    }
}

TEST_CASE("duplicating every row leaves the model unchanged") {
    const auto base = noise(120, 5);
    TrainingData twice = base;
    for (std::size_t i = 0; i < base.size(); ++i) twice.add(base.x[i], base.y[i]);
    const auto probe = noise(200, 6);
    for (auto kind : {ModelKind::logitboost, ModelKind::adaboost}) {
        INFO(to_string(kind));
        const auto a = train_model(base, small(kind));
        const auto b = train_model(twice, small(kind));
        const auto sa = scores(a, probe), sb = scores(b, probe);
        for (std::size_t i = 0; i < sa.size(); ++i) CHECK(sa[i] == doctest::Approx(sb[i]).epsilon(1e-9));
    }
}

TEST_CASE("logitboost with zero rounds predicts one half") {
    auto c = ModelConfig::defaults(ModelKind::logitboost);
    c.iterations = 0;
    const auto m = train_logitboost(noise(50, 7), c);
    CHECK(m.stumps.empty());
    for (double s : scores(m, noise(20, 8))) CHECK(s == 0.5);
}

TEST_CASE("logitboost training loss never increases") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        std::vector<double> trace;
        auto c = ModelConfig::defaults(ModelKind::logitboost);
        c.iterations = 40;
        train_logitboost(seed % 2 ? noise(300, seed) : separable(300, seed), c, &trace);
        REQUIRE(trace.size() == 41);
        CHECK(trace[0] == doctest::Approx(std::log(2.0)));
        for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-9);
    }
}

TEST_CASE("adaboost stops at zero training error") {
    auto c = ModelConfig::defaults(ModelKind::adaboost);
    c.base_depth = 1;
    const auto m = train_adaboost(separable(100, 9), c);
    CHECK(m.trees.size() == 1);
    CHECK(m.trees[0].weight > 0.0);
}

TEST_CASE("a tree on one class predicts that class") {
    TrainingData d;
    Row r{};
    for (int i = 0; i < 10; ++i) {
        r[0] = i;
        d.add(r, 1);
    }
    const std::vector<double> w(d.size(), 1.0);
    const auto t = DecisionTree::fit(d, w, FeatureSubset().indices(), {});
    CHECK(t.nodes().size() == 1);
    CHECK(t.predict(r) == 1.0);
}

TEST_CASE("training is deterministic") {
    const auto d = noise(300, 10);
    for (auto kind : kKinds) {
        INFO(to_string(kind));
        auto c = small(kind);
        c.threads = 4;
        const auto a = train_model(d, c);
        c.threads = 1;
        const auto b = train_model(d, c);
        CHECK(a.serialize() == b.serialize());
    }
}

TEST_CASE("a model reads only its feature subset") {
    const auto d = separable(200, 11);
    for (auto kind : kKinds) {
        INFO(to_string(kind));
        auto c = small(kind);
        c.features = FeatureSubset({2, 3, 4});
        const auto m = train_model(d, c);
        Row x = d.x[0];
        const double before = m.predict_row(x);
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            if (f < 2 || f > 4) x[f] = 1e6;
        }
        CHECK(m.predict_row(x) == before);
    }
}

TEST_CASE("input validation") {
    const auto m = train_model(separable(60, 12), small(ModelKind::logitboost));
    const std::vector<double> short_row(26, 0.0), ok_row(27, 0.0);
    CHECK_THROWS_AS(m.predict_proba(std::span<const double>(short_row)), ArgumentError);
    CHECK_NOTHROW(m.predict_proba(std::span<const double>(ok_row)));

    TrainingData one;
    one.add(Row{}, 1);
    one.add(Row{}, 1);
    for (auto kind : kKinds) CHECK_THROWS_AS(train_model(one, small(kind)), TrainingError);
    CHECK_THROWS_AS(train_model(TrainingData{}, small(ModelKind::logitboost)), TrainingError);
    CHECK_THROWS_AS(one.add(Row{}, 2), ArgumentError);
}

TEST_CASE("models round trip through JSON") {
    const auto d = noise(200, 13);
    const auto probe = noise(100, 14);
    for (auto kind : kKinds) {
        INFO(to_string(kind));
        auto c = small(kind);
        c.features = FeatureSubset::range(10, 26);
        const auto m = train_model(d, c);
        const auto back = TrainedModel::from_json(nlohmann::json::parse(m.serialize()));
        CHECK(back.serialize() == m.serialize());
        CHECK(back.features() == m.features());
        CHECK(scores(back, probe) == scores(m, probe));
    }
    CHECK_THROWS_AS(TrainedModel::from_json(nlohmann::json::parse("{\"format\":\"other\"}")), ArgumentError);
}

TEST_CASE("training data from a feature table") {
    FeatureTable t(2);
    t[0].label = Label::match;
    t[1].label = Label::non_match;
    t[1].features.set_missing(5);
    const auto d = TrainingData::from_table(t);
    CHECK(d.positives() == 1);
    CHECK(d.x[1][5] == kMissingSentinel);
    t[0].label.reset();
    CHECK_THROWS_AS(TrainingData::from_table(t), ArgumentError);
}

}
