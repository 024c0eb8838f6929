#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "xlink/profile.hpp"

namespace xlink {

enum class Label : int { non_match = 0, match = 1 };

// A candidate pair: id1 from S1, id2 from S2.
struct LabeledPair {
    std::string id1;
    std::string id2;
    Label label = Label::match;

    auto operator<=>(const LabeledPair&) const = default;
};

using PairKey = std::pair<std::string, std::string>;
inline PairKey key_of(const LabeledPair& p) { return {p.id1, p.id2}; }

// CSV `id1,id2`; every row is a match. A leading `id1,id2` header is skipped.
std::vector<LabeledPair> load_positive_pairs(const std::filesystem::path& path);
std::vector<LabeledPair> parse_positive_pairs(std::string_view csv, const std::string& source);
void save_positive_pairs(const std::vector<LabeledPair>& pairs, const std::filesystem::path& path);

// Throws ArgumentError when an id is unknown or a pair repeats.
void validate_pairs(const std::vector<LabeledPair>& pairs, const ProfileCorpus& s1,
                    const ProfileCorpus& s2);

// Random assignment of every profile of both networks to one of k groups.
struct GroupAssignment {
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::unordered_map<std::string, std::size_t> s1_group;
    std::unordered_map<std::string, std::size_t> s2_group;
    // Per group, member ids in corpus order.
    std::vector<std::vector<std::string>> s1_members;
    std::vector<std::vector<std::string>> s2_members;
    // Positives whose two profiles share a group, by group.
    std::vector<std::vector<LabeledPair>> positives;
    // Positives split across groups; they are thrown out.
    std::vector<LabeledPair> discarded;
};

GroupAssignment partition_groups(const ProfileCorpus& s1, const ProfileCorpus& s2,
                                 const std::vector<LabeledPair>& positives, std::size_t k,
                                 std::uint64_t seed);

// For each positive (p, q): n_per_side distinct S2 profiles other than q paired
// with p, and n_per_side distinct S1 profiles other than p paired with q, all
// drawn from the group. Never emits a known positive or a repeated pair. Short
// candidate pools yield fewer negatives and a warning.
std::vector<LabeledPair> generate_negatives(const std::vector<std::string>& group_s1,
                                            const std::vector<std::string>& group_s2,
                                            const std::vector<LabeledPair>& positives_in_group,
                                            std::size_t n_per_side, std::uint64_t seed,
                                            const std::set<PairKey>& known_positives = {},
                                            std::vector<std::string>* warnings = nullptr);

struct Fold {
    std::vector<LabeledPair> train;
    std::vector<LabeledPair> test;
};

struct FoldSet {
    std::vector<Fold> folds;
    std::uint64_t seed = 0;
    std::size_t negatives_per_positive_per_side = 5;
    std::vector<LabeledPair> discarded;
    std::vector<std::string> warnings;

    std::size_t positive_count() const;
    std::size_t negative_count() const;
    // negatives per positive over all test sets
    double effective_ratio() const;
};

// Fold i tests on group i and trains on every other group.
FoldSet build_folds(const GroupAssignment& assignment,
                    const std::vector<std::vector<LabeledPair>>& negatives_by_group,
                    std::size_t negatives_per_side);

struct FoldOptions {
    std::size_t k = 10;
    std::uint64_t seed = 1;
    std::size_t negatives_per_side = 5;
};

// partition_groups + generate_negatives per group + build_folds.
FoldSet build_fold_set(const ProfileCorpus& s1, const ProfileCorpus& s2,
                       const std::vector<LabeledPair>& positives, const FoldOptions& options);

} // namespace xlink
