#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "xlink/dataset.hpp"
#include "xlink/feature_table.hpp"
#include "xlink/features.hpp"
#include "xlink/profile.hpp"
#include "xlink/synth.hpp"

namespace fixture {

inline xlink::ProfileRecord profile(std::string id, xlink::Network network, std::string name) {
    xlink::ProfileRecord p;
    p.id = std::move(id);
    p.network = network;
    p.full_name = std::move(name);
    return p;
}

struct Pipeline {
    xlink::SynthCorpora corpora;
    xlink::FoldSet folds;
    std::vector<xlink::FoldData> data;
};

// Synthetic corpora -> group-partitioned folds -> feature tables, in memory.
inline Pipeline run_pipeline(const xlink::SynthConfig& cfg, const xlink::FoldOptions& options = {},
                             unsigned threads = 1) {
    Pipeline p;
    p.corpora = xlink::generate_corpora(cfg);
    p.folds = xlink::build_fold_set(p.corpora.s1, p.corpora.s2, p.corpora.positives, options);
    const xlink::FeatureExtractor extractor(p.corpora.s1, p.corpora.s2, p.corpora.reference);
    p.data = xlink::materialize_folds(p.folds, extractor, p.corpora.s1, p.corpora.s2, threads);
    return p;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("xlink_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// Random lowercase ASCII text with occasional spaces.
inline std::string random_text(std::mt19937_64& gen, std::size_t max_length,
                               const std::string& alphabet = "abcdefghijklmnopqrstuvwxyz ") {
    const std::size_t len = gen() % (max_length + 1);
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s += alphabet[gen() % alphabet.size()];
    return s;
}

} // namespace fixture
