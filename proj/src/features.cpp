#include "xlink/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>

#include "xlink/error.hpp"

namespace xlink {

const std::array<std::string_view, kFeatureCount>& feature_names() {
    static const std::array<std::string_view, kFeatureCount> names{
        "f00_soundexName",
        "f01_differenceName",
        "f02_lcsName",
        "f03_compressionName",
        "f04_damerauLevenshteinName",
        "f05_jaroWinklerName",
        "f06_twoGramName",
        "f07_threeGramName",
        "f08_vmnName",
        "f09_namesFrequency",
        "f10_hometownDistanceKm",
        "f11_currentCityDistanceKm",
        "f12_threeGramEmployer",
        "f13_damerauLevenshteinEmployer",
        "f14_jaroWinklerEmployer",
        "f15_jaccardFullProfile",
        "f16_jaccardExperience",
        "f17_jaccardEducation",
        "f18_jaccardInfoFields",
        "f19_semiVsmFullProfile",
        "f20_semiVsmExperience",
        "f21_semiVsmEducation",
        "f22_semiVsmInfoFields",
        "f23_vsmS1toS2",
        "f24_vsmS2toS1",
        "f25_mutualFriends",
        "f26_mutualFriendsOfFriends",
    };
    return names;
}

std::optional<std::size_t> feature_index(std::string_view name) {
    const auto& names = feature_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        // Accept both "f05_jaroWinklerName" and "jaroWinklerName".
        if (names[i] == name || names[i].substr(4) == name) return i;
    }
    return std::nullopt;
}

bool is_unbounded_feature(std::size_t index) {
    return index == f09_namesFrequency || index == f10_hometownDistanceKm ||
           index == f11_currentCityDistanceKm || index == f25_mutualFriends ||
           index == f26_mutualFriendsOfFriends;
}

// ---------------------------------------------------------------- FeatureSubset

FeatureSubset::FeatureSubset() : indices_(kFeatureCount) {
    for (std::size_t i = 0; i < kFeatureCount; ++i) indices_[i] = i;
}

FeatureSubset::FeatureSubset(std::initializer_list<std::size_t> indices)
    : FeatureSubset(std::vector<std::size_t>(indices)) {}

FeatureSubset::FeatureSubset(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
    if (indices_.empty()) throw ArgumentError("feature subset must not be empty");
    if (indices_.back() >= kFeatureCount) {
        throw ArgumentError("feature index " + std::to_string(indices_.back()) + " out of range");
    }
}

FeatureSubset FeatureSubset::range(std::size_t first, std::size_t last) {
    if (first > last) throw ArgumentError("empty feature range");
    std::vector<std::size_t> v;
    for (std::size_t i = first; i <= last; ++i) v.push_back(i);
    return FeatureSubset(std::move(v));
}

FeatureSubset FeatureSubset::all_but(std::size_t index) {
    if (index >= kFeatureCount) throw ArgumentError("feature index out of range");
    std::vector<std::size_t> v;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (i != index) v.push_back(i);
    }
    return FeatureSubset(std::move(v));
}

bool FeatureSubset::contains(std::size_t index) const {
    return std::binary_search(indices_.begin(), indices_.end(), index);
}

namespace {

std::size_t parse_index(std::string_view s) {
    if (auto named = feature_index(s)) return *named;
    std::size_t v = 0;
    if (!s.empty() && (s[0] == 'f' || s[0] == 'F')) s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ArgumentError("bad feature reference '" + std::string(s) + "'");
    }
    return v;
}

} // namespace

FeatureSubset FeatureSubset::parse(std::string_view spec) {
    if (spec == "all") return all();
    if (spec == "names") return range(f00_soundexName, f09_namesFrequency);
    if (spec == "non-names") return range(f10_hometownDistanceKm, f26_mutualFriendsOfFriends);
    std::vector<std::size_t> out;
    while (!spec.empty()) {
        const auto comma = spec.find(',');
        std::string_view item = spec.substr(0, comma);
        spec = comma == std::string_view::npos ? std::string_view{} : spec.substr(comma + 1);
        if (item.empty()) continue;
        if (const auto dash = item.find('-'); dash != std::string_view::npos) {
            const std::size_t lo = parse_index(item.substr(0, dash));
            const std::size_t hi = parse_index(item.substr(dash + 1));
            if (lo > hi) throw ArgumentError("bad feature range '" + std::string(item) + "'");
            for (std::size_t i = lo; i <= hi; ++i) out.push_back(i);
        } else {
            out.push_back(parse_index(item));
        }
    }
    return FeatureSubset(std::move(out));
}

// ---------------------------------------------------------------- primitives

double haversine_km(GeoPoint a, GeoPoint b) {
    constexpr double rad = std::numbers::pi / 180.0;
    const double phi1 = a.latitude_deg * rad;
    const double phi2 = b.latitude_deg * rad;
    const double dphi = (b.latitude_deg - a.latitude_deg) * rad;
    const double dlambda = (b.longitude_deg - a.longitude_deg) * rad;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    const double h = std::clamp(s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2, 0.0, 1.0);
    return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

std::optional<double> location_distance_km(const std::optional<std::string>& a,
                                           const std::optional<std::string>& b,
                                           const ReferenceData& ref) {
    if (!a || !b) return std::nullopt;
    const auto ia = ref.gazetteer.find(*a);
    const auto ib = ref.gazetteer.find(*b);
    if (ia == ref.gazetteer.end() || ib == ref.gazetteer.end()) return std::nullopt;
    return haversine_km(ia->second, ib->second);
}

double name_frequency_sim(std::string_view a, std::string_view b, const ReferenceData& ref) {
    auto freq = [&](std::string_view name) -> double {
        const auto it = ref.name_frequency.find(std::string(name));
        return it == ref.name_frequency.end() ? 0.0 : static_cast<double>(it->second);
    };
    return (freq(a) + freq(b)) / 2.0;
}

std::int64_t multiset_overlap(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::map<std::string_view, std::int64_t> counts;
    for (const auto& n : a) ++counts[n];
    std::int64_t overlap = 0;
    for (const auto& n : b) {
        auto it = counts.find(n);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    return overlap;
}

std::int64_t mutual_friends(const ProfileRecord& a, const ProfileRecord& b) {
    return multiset_overlap(a.friend_names, b.friend_names);
}

std::int64_t mutual_friends_of_friends(const ProfileRecord& a, const ProfileRecord& b) {
    return multiset_overlap(a.friend_of_friend_names, b.friend_of_friend_names);
}

// ---------------------------------------------------------------- extraction

TfIdfIndex build_profile_idf(const ProfileCorpus& corpus) {
    std::vector<std::string> docs;
    docs.reserve(corpus.size());
    for (const auto& p : corpus.records()) docs.push_back(full_profile_text(p));
    if (docs.empty()) throw ArgumentError("cannot build TF-IDF table for an empty corpus");
    return TfIdfIndex(docs);
}

FeatureVector extract_features(const ProfileRecord& a, const ProfileRecord& b,
                               const ReferenceData& ref, const TfIdfIndex& idf_s1,
                               const TfIdfIndex& idf_s2) {
    if (a.network == b.network) {
        throw ArgumentError("pair (" + a.id + ", " + b.id + ") is from a single network");
    }
    FeatureVector fv;

    // Name based.
    const std::string& na = a.full_name;
    const std::string& nb = b.full_name;
    try {
        fv.set(f00_soundexName, soundex_sim(na, nb));
        fv.set(f01_differenceName, difference_sim(na, nb));
    } catch (const EncodingError&) {
        fv.set_missing(f00_soundexName);
        fv.set_missing(f01_differenceName);
    }
    fv.set(f02_lcsName, lcs_sim(na, nb));
    fv.set(f03_compressionName, ncd_sim(na, nb));
    fv.set(f04_damerauLevenshteinName, damerau_levenshtein_sim(na, nb));
    fv.set(f05_jaroWinklerName, jaro_winkler_sim(na, nb));
    fv.set(f06_twoGramName, ngram_sim(na, nb, 2));
    fv.set(f07_threeGramName, ngram_sim(na, nb, 3));
    fv.set(f08_vmnName, vmn_sim(na, nb));
    fv.set(f09_namesFrequency, name_frequency_sim(na, nb, ref));

    // User information based.
    auto set_optional = [&fv](std::size_t i, std::optional<double> v) {
        if (v) fv.set(i, *v);
        else fv.set_missing(i);
    };
    set_optional(f10_hometownDistanceKm, location_distance_km(a.hometown, b.hometown, ref));
    set_optional(f11_currentCityDistanceKm, location_distance_km(a.current_city, b.current_city, ref));

    if (a.current_employer && b.current_employer) {
        fv.set(f12_threeGramEmployer, ngram_sim(*a.current_employer, *b.current_employer, 3));
        fv.set(f13_damerauLevenshteinEmployer,
               damerau_levenshtein_sim(*a.current_employer, *b.current_employer));
        fv.set(f14_jaroWinklerEmployer, jaro_winkler_sim(*a.current_employer, *b.current_employer));
    } else {
        fv.set_missing(f12_threeGramEmployer);
        fv.set_missing(f13_damerauLevenshteinEmployer);
        fv.set_missing(f14_jaroWinklerEmployer);
    }

    const std::string full_a = full_profile_text(a);
    const std::string full_b = full_profile_text(b);
    const std::string info_a = aggregate_info_text(a);
    const std::string info_b = aggregate_info_text(b);

    fv.set(f15_jaccardFullProfile, jaccard_tokens(full_a, full_b));
    fv.set(f18_jaccardInfoFields, jaccard_tokens(info_a, info_b));
    fv.set(f19_semiVsmFullProfile, cosine_tf(full_a, full_b));
    fv.set(f22_semiVsmInfoFields, cosine_tf(info_a, info_b));

    if (a.professional_experience && b.professional_experience) {
        fv.set(f16_jaccardExperience, jaccard_tokens(*a.professional_experience, *b.professional_experience));
        fv.set(f20_semiVsmExperience, cosine_tf(*a.professional_experience, *b.professional_experience));
    } else {
        fv.set_missing(f16_jaccardExperience);
        fv.set_missing(f20_semiVsmExperience);
    }
    if (a.education && b.education) {
        fv.set(f17_jaccardEducation, jaccard_tokens(*a.education, *b.education));
        fv.set(f21_semiVsmEducation, cosine_tf(*a.education, *b.education));
    } else {
        fv.set_missing(f17_jaccardEducation);
        fv.set_missing(f21_semiVsmEducation);
    }

    const TfIdfIndex& idf_of_b = b.network == Network::S1 ? idf_s1 : idf_s2;
    const TfIdfIndex& idf_of_a = a.network == Network::S1 ? idf_s1 : idf_s2;
    fv.set(f23_vsmS1toS2, idf_of_b.cosine(full_a, full_b));
    fv.set(f24_vsmS2toS1, idf_of_a.cosine(full_b, full_a));

    // Topological.
    fv.set(f25_mutualFriends, static_cast<double>(mutual_friends(a, b)));
    fv.set(f26_mutualFriendsOfFriends, static_cast<double>(mutual_friends_of_friends(a, b)));
    return fv;
}

FeatureExtractor::FeatureExtractor(const ProfileCorpus& s1, const ProfileCorpus& s2,
                                   const ReferenceData& ref)
    : idf_s1_(build_profile_idf(s1)), idf_s2_(build_profile_idf(s2)), ref_(&ref) {
    if (s1.network() == s2.network()) {
        throw ArgumentError("feature extraction needs one corpus per network");
    }
    if (s1.network() == Network::S2) std::swap(idf_s1_, idf_s2_);
}

FeatureExtractor::FeatureExtractor(TfIdfIndex idf_s1, TfIdfIndex idf_s2, const ReferenceData& ref)
    : idf_s1_(std::move(idf_s1)), idf_s2_(std::move(idf_s2)), ref_(&ref) {}

FeatureVector FeatureExtractor::extract(const ProfileRecord& a, const ProfileRecord& b) const {
    return extract_features(a, b, *ref_, idf_s1_, idf_s2_);
}

} // namespace xlink
