#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "xlink/dataset.hpp"
#include "xlink/features.hpp"

namespace xlink {

struct FeatureRow {
    std::string id1;
    std::string id2;
    std::optional<Label> label;
    FeatureVector features;

    bool operator==(const FeatureRow&) const = default;
};

using FeatureTable = std::vector<FeatureRow>;

// CSV: `id1,id2,label,f00_soundexName,...,f26_mutualFriendsOfFriends`.
// Missing features and unknown labels are empty cells; numbers use the
// shortest representation that round-trips.
std::string feature_csv_header();
std::string to_feature_csv(const FeatureTable& table);
FeatureTable parse_feature_csv(std::string_view csv, const std::string& source = "<memory>");
void save_feature_csv(const FeatureTable& table, const std::filesystem::path& path);
FeatureTable load_feature_csv(const std::filesystem::path& path);

// Extracts features for every pair; `threads` workers, output in input order.
FeatureTable extract_pairs(const FeatureExtractor& extractor, const ProfileCorpus& s1,
                           const ProfileCorpus& s2, const std::vector<LabeledPair>& pairs,
                           unsigned threads = 1);

struct FoldData {
    FeatureTable train;
    FeatureTable test;
};

// Fold pairs with their feature vectors. Each pair is extracted once.
std::vector<FoldData> materialize_folds(const FoldSet& folds, const FeatureExtractor& extractor,
                                        const ProfileCorpus& s1, const ProfileCorpus& s2,
                                        unsigned threads = 1);

struct FoldManifest {
    std::uint64_t seed = 0;
    std::size_t negatives_per_positive_per_side = 0;
    std::vector<FoldData> folds;
};

// Writes fold_NN_{train,test}.csv plus manifest.json into `dir`.
void save_fold_manifest(const FoldSet& folds, const std::vector<FoldData>& data,
                        const std::filesystem::path& dir);
FoldManifest load_fold_manifest(const std::filesystem::path& manifest_path);

} // namespace xlink
