// Command-line driver: synth -> folds -> train/evaluate/ablate.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "xlink/dataset.hpp"
#include "xlink/error.hpp"
#include "xlink/evaluation.hpp"
#include "xlink/feature_table.hpp"
#include "xlink/features.hpp"
#include "xlink/learning.hpp"
#include "xlink/profile.hpp"
#include "xlink/synth.hpp"

namespace fs = std::filesystem;
using namespace xlink;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
    } else {
        write_text(out_path, text);
    }
}

fs::path manifest_file(const fs::path& p) {
    return fs::is_directory(p) ? p / "manifest.json" : p;
}

unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

// `id1,id2[,label]`; label is match|non_match|1|0 or empty. Header optional.
std::vector<std::pair<LabeledPair, bool>> load_candidate_pairs(const fs::path& path) {
    std::vector<std::pair<LabeledPair, bool>> out;
    std::istringstream in(read_text(path));
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (n == 1 && !cells.empty() && cells[0] == "id1") continue;
        if (cells.size() < 2 || cells.size() > 3 || cells[0].empty() || cells[1].empty()) {
            throw ParseError(path.string(), n, "expected id1,id2[,label]");
        }
        LabeledPair p{cells[0], cells[1], Label::match};
        bool labelled = false;
        if (cells.size() == 3 && !cells[2].empty()) {
            labelled = true;
            if (cells[2] == "1" || cells[2] == "match") p.label = Label::match;
            else if (cells[2] == "0" || cells[2] == "non_match") p.label = Label::non_match;
            else throw ParseError(path.string(), n, "unknown label '" + cells[2] + "'");
        }
        out.emplace_back(std::move(p), labelled);
    }
    return out;
}

struct ModelFlags {
    std::vector<std::string> kinds{"logitboost"};
    std::optional<std::size_t> iterations;
    std::optional<std::size_t> trees;
    std::optional<std::size_t> mtry;
    std::uint64_t seed = 1;
    std::string features;

    void attach(CLI::App* cmd, bool repeatable) {
        if (repeatable) {
            cmd->add_option("--model", kinds, "logitboost | adaboost | rf (repeat to compare)");
        } else {
            cmd->add_option("--model", kinds, "logitboost | adaboost | rf")->expected(1);
        }
        cmd->add_option("--iterations", iterations, "boosting rounds");
        cmd->add_option("--trees", trees, "forest size");
        cmd->add_option("--mtry", mtry, "features tried per forest split");
        cmd->add_option("--seed", seed, "model seed");
    }

    ModelConfig config(const std::string& kind, unsigned threads) const {
        ModelConfig c = ModelConfig::defaults(parse_model_kind(kind));
        if (iterations) c.iterations = *iterations;
        if (trees) c.trees = *trees;
        if (mtry) c.mtry = *mtry;
        c.seed = seed;
        c.threads = threads;
        if (!features.empty()) c.features = FeatureSubset::parse(features);
        return c;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"xlink: cross-network profile matching"};
    app.require_subcommand(1);
    unsigned threads = 1;
    app.add_option("--threads", threads, "worker threads, 0 = all cores")->default_val(1);

    // ---- synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic pair of networks");
    std::string synth_config, synth_out;
    std::optional<std::uint64_t> synth_seed;
    std::optional<std::size_t> synth_profiles, synth_matched;
    std::optional<double> synth_typo, synth_swap, synth_pseudo, synth_overlap, synth_drop;
    synth->add_option("--config", synth_config, "JSON config")->check(CLI::ExistingFile);
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--seed", synth_seed);
    synth->add_option("--profiles", synth_profiles, "profiles per network");
    synth->add_option("--matched", synth_matched, "matched pairs");
    synth->add_option("--typo-rate", synth_typo);
    synth->add_option("--token-swap-rate", synth_swap);
    synth->add_option("--pseudonym-rate", synth_pseudo);
    synth->add_option("--friend-overlap", synth_overlap);
    synth->add_option("--field-drop-rate", synth_drop);

    // ---- ingest
    auto* ingest = app.add_subcommand("ingest", "validate and normalize a profile file");
    std::string ingest_in, ingest_network = "S1", ingest_out;
    ingest->add_option("input", ingest_in, "JSON Lines profile file")->required();
    ingest->add_option("--network", ingest_network, "S1 or S2");
    ingest->add_option("--out", ingest_out, "write the normalized corpus here");

    // ---- features
    auto* features = app.add_subcommand("features", "extract the 27 features for candidate pairs");
    std::string f_s1, f_s2, f_ref, f_pairs, f_out;
    features->add_option("--s1", f_s1)->required();
    features->add_option("--s2", f_s2)->required();
    features->add_option("--ref", f_ref, "directory with name_frequency.tsv and gazetteer.csv");
    features->add_option("--pairs", f_pairs, "CSV id1,id2[,label]")->required();
    features->add_option("--out", f_out, "feature CSV (stdout when absent)");

    // ---- folds
    auto* folds = app.add_subcommand("folds", "build group-partitioned folds with features");
    std::string fo_s1, fo_s2, fo_ref, fo_pos, fo_out;
    FoldOptions fold_options;
    folds->add_option("--s1", fo_s1)->required();
    folds->add_option("--s2", fo_s2)->required();
    folds->add_option("--ref", fo_ref);
    folds->add_option("--positives", fo_pos, "CSV id1,id2")->required();
    folds->add_option("--k", fold_options.k, "number of groups")->default_val(10);
    folds->add_option("--seed", fold_options.seed)->default_val(1);
    folds->add_option("--negatives-per-side", fold_options.negatives_per_side)->default_val(5);
    folds->add_option("--out", fo_out, "output directory")->required();

    // ---- train
    auto* train = app.add_subcommand("train", "train a classifier on a labelled feature table");
    std::string t_in, t_out;
    std::optional<std::size_t> t_fold;
    ModelFlags t_flags;
    t_flags.attach(train, false);
    train->add_option("--features", t_flags.features, "feature subset, e.g. all, non-names, 0-9");
    train->add_option("--input", t_in, "labelled feature CSV or fold manifest")->required();
    train->add_option("--fold", t_fold, "with a manifest: train on this fold's training rows");
    train->add_option("--out", t_out, "model JSON")->required();

    // ---- predict
    auto* predict = app.add_subcommand("predict", "score a feature table with a trained model");
    std::string p_model, p_in, p_out;
    predict->add_option("--model", p_model, "model JSON")->required();
    predict->add_option("--input", p_in, "feature CSV")->required();
    predict->add_option("--out", p_out, "scores CSV (stdout when absent)");

    // ---- evaluate
    auto* evaluate = app.add_subcommand("evaluate", "cross-validated scenario evaluation");
    std::string e_manifest, e_scenario = "A", e_out, e_roc;
    double e_threshold = 0.5;
    ModelFlags e_flags;
    e_flags.attach(evaluate, true);
    evaluate->add_option("--manifest", e_manifest, "fold manifest or its directory")->required();
    evaluate->add_option("--scenario", e_scenario, "A, B or C");
    evaluate->add_option("--threshold", e_threshold);
    evaluate->add_option("--out", e_out, "report JSON (stdout when absent)");
    evaluate->add_option("--roc-out", e_roc, "ROC points CSV (first model)");

    // ---- ablate
    auto* ablate = app.add_subcommand("ablate", "per-feature all-but-x / only-x runs");
    std::string a_manifest, a_mode = "only-x", a_out, a_csv;
    ModelFlags a_flags;
    a_flags.attach(ablate, false);
    ablate->add_option("--manifest", a_manifest, "fold manifest or its directory")->required();
    ablate->add_option("--mode", a_mode, "all-but-x or only-x");
    ablate->add_option("--out", a_out, "report JSON (stdout when absent)");
    ablate->add_option("--csv-out", a_csv, "per-feature CSV");

    CLI11_PARSE(app, argc, argv);
    const unsigned workers = resolve_threads(threads);

    try {
        if (*synth) {
            SynthConfig cfg = synth_config.empty() ? SynthConfig{} : SynthConfig::load(synth_config);
            if (synth_seed) cfg.seed = *synth_seed;
            if (synth_profiles) cfg.n_profiles_per_network = *synth_profiles;
            if (synth_matched) cfg.n_matched = *synth_matched;
            if (synth_typo) cfg.typo_rate = *synth_typo;
            if (synth_swap) cfg.token_swap_rate = *synth_swap;
            if (synth_pseudo) cfg.pseudonym_rate = *synth_pseudo;
            if (synth_overlap) cfg.friend_overlap = *synth_overlap;
            if (synth_drop) cfg.field_drop_rate = *synth_drop;
            const auto corpora = generate_corpora(cfg);
            write_corpora(corpora, cfg, synth_out);
            std::cerr << "wrote " << corpora.s1.size() << " + " << corpora.s2.size()
                      << " profiles and " << corpora.positives.size() << " positives to "
                      << synth_out << '\n';
        } else if (*ingest) {
            const auto corpus = load_corpus(ingest_in, parse_network(ingest_network));
            if (!ingest_out.empty()) save_corpus(corpus, ingest_out);
            std::cerr << ingest_in << ": " << corpus.size() << " profiles\n";
        } else if (*features) {
            const auto s1 = load_corpus(f_s1, Network::S1);
            const auto s2 = load_corpus(f_s2, Network::S2);
            const auto ref = f_ref.empty() ? ReferenceData{} : load_reference(f_ref);
            const auto candidates = load_candidate_pairs(f_pairs);
            std::vector<LabeledPair> pairs;
            for (const auto& [p, labelled] : candidates) pairs.push_back(p);
            validate_pairs(pairs, s1, s2);
            const FeatureExtractor extractor(s1, s2, ref);
            auto table = extract_pairs(extractor, s1, s2, pairs, workers);
            for (std::size_t i = 0; i < table.size(); ++i) {
                if (!candidates[i].second) table[i].label.reset();
            }
            emit(to_feature_csv(table), f_out);
        } else if (*folds) {
            const auto s1 = load_corpus(fo_s1, Network::S1);
            const auto s2 = load_corpus(fo_s2, Network::S2);
            const auto ref = fo_ref.empty() ? ReferenceData{} : load_reference(fo_ref);
            const auto positives = load_positive_pairs(fo_pos);
            validate_pairs(positives, s1, s2);
            const auto set = build_fold_set(s1, s2, positives, fold_options);
            const FeatureExtractor extractor(s1, s2, ref);
            const auto data = materialize_folds(set, extractor, s1, s2, workers);
            save_fold_manifest(set, data, fo_out);
            for (const auto& w : set.warnings) std::cerr << "warning: " << w << '\n';
            std::cerr << "folds: " << set.folds.size() << ", positives kept "
                      << set.positive_count() << ", discarded " << set.discarded.size()
                      << ", negatives " << set.negative_count() << " (ratio "
                      << set.effective_ratio() << ")\n";
        } else if (*train) {
            FeatureTable table;
            const fs::path in = t_in;
            if (fs::is_directory(in) || in.extension() == ".json") {
                const auto manifest = load_fold_manifest(manifest_file(in));
                if (t_fold) {
                    if (*t_fold >= manifest.folds.size()) throw ArgumentError("--fold out of range");
                    table = manifest.folds[*t_fold].train;
                } else {
                    // Every pair appears in exactly one test set.
                    for (const auto& f : manifest.folds) {
                        table.insert(table.end(), f.test.begin(), f.test.end());
                    }
                }
            } else {
                table = load_feature_csv(in);
            }
            const auto model =
                train_model(TrainingData::from_table(table), t_flags.config(t_flags.kinds.front(), workers));
            model.save(t_out);
            std::cerr << "trained " << to_string(model.kind) << " on " << model.training_rows
                      << " rows\n";
        } else if (*predict) {
            const auto model = TrainedModel::load(p_model);
            const auto table = load_feature_csv(p_in);
            const auto scores = model.predict(table);
            std::string csv = "id1,id2,score\n";
            char buf[64];
            for (std::size_t i = 0; i < table.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%.17g", scores[i]);
                csv += table[i].id1 + ',' + table[i].id2 + ',' + buf + '\n';
            }
            emit(csv, p_out);
        } else if (*evaluate) {
            const auto manifest = load_fold_manifest(manifest_file(e_manifest));
            EvalOptions options;
            options.threshold = e_threshold;
            options.threads = workers;
            if (!e_flags.features.empty()) options.features = FeatureSubset::parse(e_flags.features);
            const Scenario scenario = parse_scenario(e_scenario);
            std::vector<ModelConfig> configs;
            for (const auto& k : e_flags.kinds) configs.push_back(e_flags.config(k, 1));
            if (configs.size() == 1) {
                const auto report = run_scenario(manifest.folds, configs[0], scenario, options);
                for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
                emit(report.to_json().dump(2) + '\n', e_out);
                if (!e_roc.empty()) write_text(e_roc, report.roc_csv());
            } else {
                const auto cmp = compare_classifiers(manifest.folds, configs, scenario, options);
                emit(cmp.to_json().dump(2) + '\n', e_out);
                if (!e_roc.empty()) write_text(e_roc, cmp.reports.front().roc_csv());
            }
        } else if (*ablate) {
            const auto manifest = load_fold_manifest(manifest_file(a_manifest));
            EvalOptions options;
            options.threads = workers;
            const auto report = ablation(manifest.folds, a_flags.config(a_flags.kinds.front(), 1),
                                         parse_ablation_mode(a_mode), options);
            emit(report.to_json().dump(2) + '\n', a_out);
            if (!a_csv.empty()) write_text(a_csv, report.to_csv());
        }
    } catch (const std::exception& e) {
        std::cerr << "xlink: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
