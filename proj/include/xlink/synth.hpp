#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "xlink/dataset.hpp"
#include "xlink/profile.hpp"

namespace xlink {

// Knobs of the synthetic two-network generator. Rates are probabilities.
struct SynthConfig {
    std::size_t n_profiles_per_network = 1000;
    std::size_t n_matched = 200;
    double typo_rate = 0.1;        // per character of a cloned text field
    double token_swap_rate = 0.05; // per cloned multi-token field
    double pseudonym_rate = 0.0;   // per matched pair: S2 name replaced outright
    double friend_overlap = 0.5;   // fraction of friends kept by a clone
    double field_drop_rate = 0.2;  // per optional field of an S2 profile
    std::size_t min_friends = 15;
    std::size_t max_friends = 40;
    std::uint64_t seed = 1;

    // Throws ArgumentError when a rate leaves [0, 1] or n_matched exceeds the
    // network size.
    void validate() const;

    nlohmann::ordered_json to_json() const;
    // Unknown keys are rejected; absent keys keep their defaults.
    static SynthConfig from_json(const nlohmann::json& j);
    static SynthConfig load(const std::filesystem::path& path);
};

struct SynthCorpora {
    ProfileCorpus s1{Network::S1};
    ProfileCorpus s2{Network::S2};
    std::vector<LabeledPair> positives; // sorted by (id1, id2)
    ReferenceData reference;
};

// Deterministic for a given config. Throws GenerationError when the name
// vocabulary cannot supply enough distinct profile names.
SynthCorpora generate_corpora(const SynthConfig& cfg);

// Writes s1.jsonl, s2.jsonl, positives.csv, name_frequency.tsv,
// gazetteer.csv and config.json into `dir`, creating it if needed.
void write_corpora(const SynthCorpora& corpora, const SynthConfig& cfg,
                   const std::filesystem::path& dir);

inline constexpr const char* kS1File = "s1.jsonl";
inline constexpr const char* kS2File = "s2.jsonl";
inline constexpr const char* kPositivesFile = "positives.csv";

} // namespace xlink
