#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string_view>
#include <vector>

#include "xlink/profile.hpp"
#include "xlink/string_metrics.hpp"

namespace xlink {

inline constexpr std::size_t kFeatureCount = 27;

// Canonical feature order. Serialized matrices, ablation indices and scenario
// masks all refer to these positions.
enum Feature : std::size_t {
    f00_soundexName,
    f01_differenceName,
    f02_lcsName,
    f03_compressionName,
    f04_damerauLevenshteinName,
    f05_jaroWinklerName,
    f06_twoGramName,
    f07_threeGramName,
    f08_vmnName,
    f09_namesFrequency,
    f10_hometownDistanceKm,
    f11_currentCityDistanceKm,
    f12_threeGramEmployer,
    f13_damerauLevenshteinEmployer,
    f14_jaroWinklerEmployer,
    f15_jaccardFullProfile,
    f16_jaccardExperience,
    f17_jaccardEducation,
    f18_jaccardInfoFields,
    f19_semiVsmFullProfile,
    f20_semiVsmExperience,
    f21_semiVsmEducation,
    f22_semiVsmInfoFields,
    f23_vsmS1toS2,
    f24_vsmS2toS1,
    f25_mutualFriends,
    f26_mutualFriendsOfFriends,
};

// "f00_soundexName" style column names.
const std::array<std::string_view, kFeatureCount>& feature_names();
std::optional<std::size_t> feature_index(std::string_view name);

// Features that are not bounded to [0, 1].
bool is_unbounded_feature(std::size_t index);

struct FeatureVector {
    std::array<double, kFeatureCount> values{};
    std::array<bool, kFeatureCount> missing{};

    bool present(std::size_t i) const { return !missing[i]; }
    void set(std::size_t i, double v) {
        values[i] = v;
        missing[i] = false;
    }
    void set_missing(std::size_t i) {
        values[i] = 0.0;
        missing[i] = true;
    }

    bool operator==(const FeatureVector&) const = default;
};

// Non-empty set of feature indices, kept sorted.
class FeatureSubset {
public:
    FeatureSubset(); // all 27
    FeatureSubset(std::initializer_list<std::size_t> indices);
    explicit FeatureSubset(std::vector<std::size_t> indices);

    static FeatureSubset all() { return FeatureSubset(); }
    static FeatureSubset range(std::size_t first, std::size_t last); // inclusive
    static FeatureSubset all_but(std::size_t index);
    static FeatureSubset only(std::size_t index) { return FeatureSubset({index}); }
    // "all", "names", "non-names", "0-9,12", or feature names.
    static FeatureSubset parse(std::string_view spec);

    const std::vector<std::size_t>& indices() const noexcept { return indices_; }
    std::size_t size() const noexcept { return indices_.size(); }
    bool contains(std::size_t index) const;

    bool operator==(const FeatureSubset&) const = default;

private:
    std::vector<std::size_t> indices_;
};

inline constexpr double kEarthRadiusKm = 6371.0;

double haversine_km(GeoPoint a, GeoPoint b);

// Great-circle distance between two gazetteer entries; nullopt when either
// name is absent or unknown.
std::optional<double> location_distance_km(const std::optional<std::string>& a,
                                           const std::optional<std::string>& b,
                                           const ReferenceData& ref);

// Mean of the two table frequencies; names missing from the table count 0.
double name_frequency_sim(std::string_view a, std::string_view b, const ReferenceData& ref);

// Size of the multiset intersection of two name lists.
std::int64_t multiset_overlap(const std::vector<std::string>& a, const std::vector<std::string>& b);
std::int64_t mutual_friends(const ProfileRecord& a, const ProfileRecord& b);
std::int64_t mutual_friends_of_friends(const ProfileRecord& a, const ProfileRecord& b);

// Computes all 27 features of a cross-network pair. Holds the per-network
// TF-IDF tables over full-profile documents; immutable and thread-safe.
class FeatureExtractor {
public:
    FeatureExtractor(const ProfileCorpus& s1, const ProfileCorpus& s2, const ReferenceData& ref);
    FeatureExtractor(TfIdfIndex idf_s1, TfIdfIndex idf_s2, const ReferenceData& ref);

    // Throws ArgumentError when both profiles come from the same network.
    // f23 scores `a` against `b` with b's network weighting, f24 the reverse,
    // so swapping the arguments swaps exactly those two features.
    FeatureVector extract(const ProfileRecord& a, const ProfileRecord& b) const;

    const TfIdfIndex& idf(Network n) const { return n == Network::S1 ? idf_s1_ : idf_s2_; }

private:
    TfIdfIndex idf_s1_;
    TfIdfIndex idf_s2_;
    const ReferenceData* ref_;
};

TfIdfIndex build_profile_idf(const ProfileCorpus& corpus);

FeatureVector extract_features(const ProfileRecord& a, const ProfileRecord& b,
                               const ReferenceData& ref, const TfIdfIndex& idf_s1,
                               const TfIdfIndex& idf_s2);

} // namespace xlink
