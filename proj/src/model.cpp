#include <cmath>
#include <fstream>
#include <sstream>

#include "xlink/error.hpp"
#include "xlink/learning.hpp"

namespace xlink {

Row to_model_input(const FeatureVector& fv) {
    Row row;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        row[i] = fv.missing[i] ? kMissingSentinel : fv.values[i];
    }
    return row;
}

void TrainingData::add(const Row& row, int label) {
    if (label != 0 && label != 1) throw ArgumentError("label must be 0 or 1");
    x.push_back(row);
    y.push_back(label);
}

std::size_t TrainingData::positives() const {
    return static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
}

TrainingData TrainingData::from_table(const FeatureTable& table) {
    TrainingData data;
    data.x.reserve(table.size());
    data.y.reserve(table.size());
    for (const auto& row : table) {
        if (!row.label) {
            throw ArgumentError("row (" + row.id1 + ", " + row.id2 + ") has no label");
        }
        data.add(to_model_input(row.features), *row.label == Label::match ? 1 : 0);
    }
    return data;
}

std::string_view to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::logitboost: return "logitboost";
    case ModelKind::adaboost: return "adaboost";
    case ModelKind::random_forest: return "random_forest";
    }
    return "unknown";
}

ModelKind parse_model_kind(std::string_view s) {
    if (s == "logitboost") return ModelKind::logitboost;
    if (s == "adaboost") return ModelKind::adaboost;
    if (s == "rf" || s == "random_forest" || s == "randomforest") return ModelKind::random_forest;
    throw ArgumentError("unknown model '" + std::string(s) + "' (logitboost, adaboost, rf)");
}

ModelConfig ModelConfig::defaults(ModelKind kind) {
    ModelConfig c;
    c.kind = kind;
    c.iterations = kind == ModelKind::adaboost ? 200 : 25;
    return c;
}

double TrainedModel::predict_row(const Row& x) const {
    switch (kind) {
    case ModelKind::logitboost: {
        double f = 0.0;
        for (const auto& s : stumps) f += 0.5 * s.predict(x);
        return 1.0 / (1.0 + std::exp(-2.0 * f));
    }
    case ModelKind::adaboost: {
        double vote = 0.0, total = 0.0;
        for (const auto& t : trees) {
            vote += t.weight * (t.tree.predict(x) >= 0.5 ? 1.0 : -1.0);
            total += t.weight;
        }
        if (total <= 0.0) return 0.5;
        return std::clamp((vote / total + 1.0) / 2.0, 0.0, 1.0);
    }
    case ModelKind::random_forest: {
        if (trees.empty()) return 0.5;
        double sum = 0.0;
        for (const auto& t : trees) sum += t.tree.predict(x);
        return std::clamp(sum / static_cast<double>(trees.size()), 0.0, 1.0);
    }
    }
    return 0.5;
}

double TrainedModel::predict_proba(const FeatureVector& x) const {
    return predict_row(to_model_input(x));
}

double TrainedModel::predict_proba(std::span<const double> x) const {
    if (x.size() != kFeatureCount) {
        throw ArgumentError("expected " + std::to_string(kFeatureCount) + " features, got " +
                            std::to_string(x.size()));
    }
    Row row;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        row[i] = std::isnan(x[i]) ? kMissingSentinel : x[i];
    }
    return predict_row(row);
}

std::vector<double> TrainedModel::predict(const FeatureTable& table) const {
    std::vector<double> out;
    out.reserve(table.size());
    for (const auto& row : table) out.push_back(predict_proba(row.features));
    return out;
}

// ---------------------------------------------------------------- JSON

nlohmann::ordered_json TrainedModel::to_json() const {
    nlohmann::ordered_json j;
    j["format"] = "xlink-model";
    j["version"] = 1;
    j["kind"] = std::string(to_string(kind));
    j["config"] = {{"iterations", config.iterations},
                   {"trees", config.trees},
                   {"base_depth", config.base_depth},
                   {"max_depth", config.max_depth},
                   {"min_leaf", config.min_leaf},
                   {"mtry", config.mtry},
                   {"seed", config.seed}};
    j["feature_subset"] = config.features.indices();
    auto names = nlohmann::ordered_json::array();
    for (std::size_t i : config.features.indices()) names.push_back(feature_names()[i]);
    j["feature_names"] = names;
    j["missing_sentinel"] = kMissingSentinel;
    j["feature_encoding"] = {{"compressor", "zlib-deflate"},
                             {"compression_level", kCompressionLevel},
                             {"lcs_min_length", 2},
                             {"ngram_denominator", "longer"}};
    j["training_rows"] = training_rows;
    auto members = nlohmann::ordered_json::array();
    if (kind == ModelKind::logitboost) {
        for (const auto& s : stumps) {
            members.push_back({{"feature", s.feature},
                               {"threshold", s.threshold},
                               {"left", s.left},
                               {"right", s.right}});
        }
    } else {
        for (const auto& t : trees) {
            auto nodes = nlohmann::ordered_json::array();
            for (const auto& n : t.tree.nodes()) {
                nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
            }
            members.push_back({{"weight", t.weight}, {"nodes", nodes}});
        }
    }
    j["members"] = members;
    return j;
}

TrainedModel TrainedModel::from_json(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != "xlink-model") {
            throw ArgumentError("not an xlink model file");
        }
        TrainedModel m;
        m.kind = parse_model_kind(j.at("kind").get<std::string>());
        const auto& c = j.at("config");
        m.config.kind = m.kind;
        m.config.iterations = c.at("iterations").get<std::size_t>();
        m.config.trees = c.at("trees").get<std::size_t>();
        m.config.base_depth = c.at("base_depth").get<std::size_t>();
        m.config.max_depth = c.at("max_depth").get<std::size_t>();
        m.config.min_leaf = c.at("min_leaf").get<std::size_t>();
        m.config.mtry = c.at("mtry").get<std::size_t>();
        m.config.seed = c.at("seed").get<std::uint64_t>();
        m.config.features = FeatureSubset(j.at("feature_subset").get<std::vector<std::size_t>>());
        m.training_rows = j.at("training_rows").get<std::size_t>();
        for (const auto& member : j.at("members")) {
            if (m.kind == ModelKind::logitboost) {
                RegressionStump s;
                s.feature = member.at("feature").get<std::size_t>();
                s.threshold = member.at("threshold").get<double>();
                s.left = member.at("left").get<double>();
                s.right = member.at("right").get<double>();
                if (s.feature >= kFeatureCount || !std::isfinite(s.threshold) ||
                    !std::isfinite(s.left) || !std::isfinite(s.right)) {
                    throw ArgumentError("malformed stump");
                }
                m.stumps.push_back(s);
            } else {
                std::vector<DecisionTree::Node> nodes;
                for (const auto& n : member.at("nodes")) {
                    nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(),
                                     n.at(3).get<int>(), n.at(4).get<double>()});
                }
                const double weight = member.at("weight").get<double>();
                if (!std::isfinite(weight)) throw ArgumentError("non-finite member weight");
                m.trees.push_back({weight, DecisionTree::from_nodes(std::move(nodes))});
            }
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("malformed model JSON: ") + e.what());
    }
}

std::string TrainedModel::serialize() const { return to_json().dump(); }

void TrainedModel::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << to_json().dump(1) << '\n';
}

TrainedModel TrainedModel::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string(), 0, e.what());
    }
    return from_json(j);
}

} // namespace xlink
