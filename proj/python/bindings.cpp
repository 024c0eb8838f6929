#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "xlink/dataset.hpp"
#include "xlink/error.hpp"
#include "xlink/evaluation.hpp"
#include "xlink/feature_table.hpp"
#include "xlink/features.hpp"
#include "xlink/learning.hpp"
#include "xlink/profile.hpp"
#include "xlink/string_metrics.hpp"
#include "xlink/synth.hpp"
#include "xlink/text.hpp"

namespace py = pybind11;
using namespace xlink;

namespace {

py::object from_json(const std::string& text) {
    return py::module_::import("json").attr("loads")(text);
}

std::vector<double> as_list(const FeatureVector& fv) {
    std::vector<double> out(kFeatureCount);
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        out[i] = fv.missing[i] ? std::numeric_limits<double>::quiet_NaN() : fv.values[i];
    }
    return out;
}

TrainingData as_training_data(const std::vector<std::vector<double>>& x, const std::vector<int>& y) {
    if (x.size() != y.size()) throw ArgumentError("X and y lengths differ");
    TrainingData data;
    for (std::size_t r = 0; r < x.size(); ++r) {
        if (x[r].size() != kFeatureCount) {
            throw ArgumentError("row " + std::to_string(r) + " does not have 27 features");
        }
        Row row;
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            row[i] = std::isnan(x[r][i]) ? kMissingSentinel : x[r][i];
        }
        data.add(row, y[r]);
    }
    return data;
}

ModelConfig make_config(const std::string& kind, std::optional<std::size_t> iterations,
                        std::optional<std::size_t> trees, std::uint64_t seed, unsigned threads,
                        const std::string& features) {
    ModelConfig c = ModelConfig::defaults(parse_model_kind(kind));
    if (iterations) c.iterations = *iterations;
    if (trees) c.trees = *trees;
    c.seed = seed;
    c.threads = threads;
    c.features = FeatureSubset::parse(features);
    return c;
}

// Owns the corpora the extractor indexes.
struct PairExtractor {
    ProfileCorpus s1;
    ProfileCorpus s2;
    ReferenceData ref;
    FeatureExtractor extractor;

    PairExtractor(const std::filesystem::path& s1_path, const std::filesystem::path& s2_path,
                  const std::optional<std::filesystem::path>& ref_dir)
        : s1(load_corpus(s1_path, Network::S1)),
          s2(load_corpus(s2_path, Network::S2)),
          ref(ref_dir ? load_reference(*ref_dir) : ReferenceData{}),
          extractor(s1, s2, ref) {}

    std::vector<double> extract(const std::string& id1, const std::string& id2) const {
        return as_list(extractor.extract(s1.at(id1), s2.at(id2)));
    }
};

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Native core of xlink: metrics, features, learners and evaluation.";

    // Translators run newest first, so subclasses are registered after the base.
    const auto base = py::register_exception<Error>(m, "XlinkError", PyExc_RuntimeError);
    py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<TrainingError>(m, "TrainingError", base.ptr());
    py::register_exception<EvaluationError>(m, "EvaluationError", base.ptr());
    py::register_exception<GenerationError>(m, "GenerationError", base.ptr());
    py::register_exception<EncodingError>(m, "EncodingError", base.ptr());

    // ---- text and metrics
    m.def("normalize_text", &normalize_text, py::arg("raw"));
    m.def("soundex", [](const std::string& s) { return soundex_encode(s).str(); }, py::arg("s"));
    m.def("soundex_sim", &soundex_sim, py::arg("a"), py::arg("b"));
    m.def("difference_sim", &difference_sim, py::arg("a"), py::arg("b"));
    m.def("lcs_sim", &lcs_sim, py::arg("a"), py::arg("b"), py::arg("min_length") = 2);
    m.def("ncd_sim", &ncd_sim, py::arg("a"), py::arg("b"));
    m.def("levenshtein_distance", &levenshtein_distance, py::arg("a"), py::arg("b"));
    m.def("damerau_levenshtein_distance", &damerau_levenshtein_distance, py::arg("a"), py::arg("b"));
    m.def("damerau_levenshtein_sim", &damerau_levenshtein_sim, py::arg("a"), py::arg("b"));
    m.def("jaro_winkler_sim", &jaro_winkler_sim, py::arg("a"), py::arg("b"));
    m.def("ngram_sim",
          [](const std::string& a, const std::string& b, std::size_t n) { return ngram_sim(a, b, n); },
          py::arg("a"), py::arg("b"), py::arg("n"));
    m.def("vmn_sim", &vmn_sim, py::arg("a"), py::arg("b"));
    m.def("jaccard_tokens", &jaccard_tokens, py::arg("a"), py::arg("b"));
    m.def("cosine_tf", &cosine_tf, py::arg("a"), py::arg("b"));
    m.def("cosine_tfidf", &cosine_tfidf, py::arg("query"), py::arg("doc"), py::arg("corpus"));

    // ---- features
    m.def("feature_names", [] {
        std::vector<std::string> out;
        for (auto n : feature_names()) out.emplace_back(n);
        return out;
    });
    py::class_<PairExtractor>(m, "FeatureExtractor",
                              "Feature extractor over two profile files; missing values are NaN.")
        .def(py::init<const std::filesystem::path&, const std::filesystem::path&,
                      const std::optional<std::filesystem::path>&>(),
             py::arg("s1"), py::arg("s2"), py::arg("reference_dir") = py::none())
        .def("extract", &PairExtractor::extract, py::arg("id1"), py::arg("id2"));

    // ---- pipeline
    m.def(
        "synth",
        [](const std::filesystem::path& out, const std::string& config_json) {
            const auto cfg = SynthConfig::from_json(nlohmann::json::parse(config_json));
            const auto corpora = generate_corpora(cfg);
            write_corpora(corpora, cfg, out);
            return corpora.positives.size();
        },
        py::arg("out_dir"), py::arg("config_json") = "{}");

    m.def(
        "build_folds",
        [](const std::filesystem::path& data_dir, const std::filesystem::path& out_dir,
           std::size_t k, std::uint64_t seed, std::size_t negatives_per_side, unsigned threads) {
            const auto s1 = load_corpus(data_dir / kS1File, Network::S1);
            const auto s2 = load_corpus(data_dir / kS2File, Network::S2);
            const auto ref = load_reference(data_dir);
            const auto positives = load_positive_pairs(data_dir / kPositivesFile);
            validate_pairs(positives, s1, s2);
            const auto set = build_fold_set(s1, s2, positives, {k, seed, negatives_per_side});
            const FeatureExtractor extractor(s1, s2, ref);
            save_fold_manifest(set, materialize_folds(set, extractor, s1, s2, threads), out_dir);
            py::dict summary;
            summary["positives"] = set.positive_count();
            summary["negatives"] = set.negative_count();
            summary["discarded"] = set.discarded.size();
            summary["warnings"] = set.warnings;
            return summary;
        },
        py::arg("data_dir"), py::arg("out_dir"), py::arg("k") = 10, py::arg("seed") = 1,
        py::arg("negatives_per_side") = 5, py::arg("threads") = 1);

    m.def(
        "evaluate",
        [](const std::filesystem::path& manifest, const std::string& scenario,
           const std::string& model, std::optional<std::size_t> iterations,
           std::optional<std::size_t> trees, std::uint64_t seed, unsigned threads, double threshold) {
            const auto folds = load_fold_manifest(manifest).folds;
            EvalOptions o;
            o.threads = threads;
            o.threshold = threshold;
            const auto cfg = make_config(model, iterations, trees, seed, 1, "all");
            return from_json(run_scenario(folds, cfg, parse_scenario(scenario), o).to_json().dump());
        },
        py::arg("manifest"), py::arg("scenario") = "A", py::arg("model") = "logitboost",
        py::arg("iterations") = py::none(), py::arg("trees") = py::none(), py::arg("seed") = 1,
        py::arg("threads") = 1, py::arg("threshold") = 0.5);

    m.def(
        "ablate",
        [](const std::filesystem::path& manifest, const std::string& mode, const std::string& model,
           std::uint64_t seed, unsigned threads) {
            const auto folds = load_fold_manifest(manifest).folds;
            EvalOptions o;
            o.threads = threads;
            const auto cfg = make_config(model, std::nullopt, std::nullopt, seed, 1, "all");
            return from_json(ablation(folds, cfg, parse_ablation_mode(mode), o).to_json().dump());
        },
        py::arg("manifest"), py::arg("mode") = "only-x", py::arg("model") = "logitboost",
        py::arg("seed") = 1, py::arg("threads") = 1);

    // ---- learning
    py::class_<TrainedModel>(m, "Model", "A trained classifier over 27-feature rows (NaN = missing).")
        .def_static(
            "train",
            [](const std::vector<std::vector<double>>& x, const std::vector<int>& y,
               const std::string& kind, std::optional<std::size_t> iterations,
               std::optional<std::size_t> trees, std::uint64_t seed, unsigned threads,
               const std::string& features) {
                return train_model(as_training_data(x, y),
                                   make_config(kind, iterations, trees, seed, threads, features));
            },
            py::arg("X"), py::arg("y"), py::arg("kind") = "logitboost",
            py::arg("iterations") = py::none(), py::arg("trees") = py::none(), py::arg("seed") = 1,
            py::arg("threads") = 1, py::arg("features") = "all")
        .def_static("from_json",
                    [](const std::string& s) { return TrainedModel::from_json(nlohmann::json::parse(s)); })
        .def_property_readonly("kind", [](const TrainedModel& t) { return std::string(to_string(t.kind)); })
        .def_property_readonly("features", [](const TrainedModel& t) { return t.features().indices(); })
        .def("predict_proba",
             [](const TrainedModel& t, const std::vector<std::vector<double>>& x) {
                 std::vector<double> out;
                 out.reserve(x.size());
                 for (const auto& row : x) out.push_back(t.predict_proba(std::span<const double>(row)));
                 return out;
             },
             py::arg("X"))
        .def("to_json", &TrainedModel::serialize);

    // ---- evaluation
    m.def(
        "roc_auc",
        [](const std::vector<double>& pos, const std::vector<double>& neg) { return roc_auc(pos, neg); },
        py::arg("scores_pos"), py::arg("scores_neg"));
    m.def(
        "confusion_metrics",
        [](const std::vector<double>& scores, const std::vector<int>& labels, double threshold) {
            const auto c = confusion_metrics(scores, labels, threshold);
            py::dict d;
            d["accuracy"] = c.accuracy;
            d["tpr"] = c.tpr ? py::cast(*c.tpr) : py::none();
            d["fpr"] = c.fpr ? py::cast(*c.fpr) : py::none();
            return d;
        },
        py::arg("scores"), py::arg("labels"), py::arg("threshold") = 0.5);
    m.def(
        "anova_f",
        [](const std::vector<std::vector<double>>& groups) {
            const auto r = anova_f(groups);
            py::dict d;
            d["F"] = r.f;
            d["df1"] = r.df1;
            d["df2"] = r.df2;
            d["p"] = r.p;
            return d;
        },
        py::arg("groups"));
}
