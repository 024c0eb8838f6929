#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "xlink/error.hpp"
#include "xlink/features.hpp"
#include "xlink/string_metrics.hpp"
#include "xlink/synth.hpp"

using namespace xlink;

namespace {

ProfileRecord full_profile(const std::string& id, Network n, const std::string& name) {
    auto p = fixture::profile(id, n, name);
    p.gender = Gender::female;
    p.hometown = "berlin";
    p.current_city = "paris";
    p.current_employer = "acme";
    p.professional_experience = "senior engineer at acme";
    p.education = "msc physics mit";
    p.info_fields["about"] = "chess and hiking";
    p.friend_names = {"ann lee", "bo chen", "cy dart"};
    p.friend_of_friend_names = {"dee eve", "fay gil"};
    return p;
}

ReferenceData reference() {
    ReferenceData ref;
    ref.add_location("berlin", {52.52, 13.405});
    ref.add_location("paris", {48.8566, 2.3522});
    ref.add_location("null island", {0.0, 0.0});
    ref.add_location("one east", {0.0, 1.0});
    ref.add_name_frequency("john smith", 17204);
    ref.add_name_frequency("gail west", 10);
    ref.add_name_frequency("vest abigail", 20);
    return ref;
}

TfIdfIndex index_of(const std::vector<ProfileRecord>& records) {
    std::vector<std::string> docs;
    for (const auto& r : records) docs.push_back(full_profile_text(r));
    return TfIdfIndex(docs);
}

} // namespace

TEST_SUITE("feature-extraction") {

TEST_CASE("feature order and names") {
    REQUIRE(feature_names().size() == kFeatureCount);
    CHECK(feature_names()[0] == "f00_soundexName");
    CHECK(feature_names()[5] == "f05_jaroWinklerName");
    CHECK(feature_names()[26] == "f26_mutualFriendsOfFriends");
    CHECK(feature_index("f25_mutualFriends") == 25u);
    CHECK(feature_index("mutualFriends") == 25u);
    CHECK_FALSE(feature_index("nope").has_value());
}

TEST_CASE("feature subsets") {
    CHECK(FeatureSubset().size() == 27);
    CHECK(FeatureSubset::parse("names").indices() == FeatureSubset::range(0, 9).indices());
    CHECK(FeatureSubset::parse("non-names").indices() == FeatureSubset::range(10, 26).indices());
    CHECK(FeatureSubset::parse("0-2,f25_mutualFriends").indices() == std::vector<std::size_t>{0, 1, 2, 25});
    CHECK(FeatureSubset::all_but(3).size() == 26);
    CHECK_FALSE(FeatureSubset::all_but(3).contains(3));
    CHECK(FeatureSubset::only(7).indices() == std::vector<std::size_t>{7});
    CHECK_THROWS_AS(FeatureSubset(std::vector<std::size_t>{}), ArgumentError);
    CHECK_THROWS_AS(FeatureSubset({27}), ArgumentError);
    CHECK_THROWS_AS(FeatureSubset::parse("bogus"), ArgumentError);
}

TEST_CASE("location distance") {
    const auto ref = reference();
    CHECK(location_distance_km(std::string("berlin"), std::string("berlin"), ref) == 0.0);
    CHECK(*location_distance_km(std::string("null island"), std::string("one east"), ref) ==
          doctest::Approx(111.195).epsilon(0.01 / 111.195));
    CHECK(*location_distance_km(std::string("null island"), std::string("one east"), ref) ==
          doctest::Approx(6371.0 * M_PI / 180.0).epsilon(1e-12));
    CHECK_FALSE(location_distance_km(std::nullopt, std::string("berlin"), ref).has_value());
    CHECK_FALSE(location_distance_km(std::string("atlantis"), std::string("berlin"), ref).has_value());
    // Berlin to Paris is about 878 km.
    CHECK(*location_distance_km(std::string("berlin"), std::string("paris"), ref) == doctest::Approx(878).epsilon(0.01));
}

TEST_CASE("name frequency") {
    const auto ref = reference();
    CHECK(name_frequency_sim("john smith", "john smith", ref) == 17204.0);
    CHECK(name_frequency_sim("nobody", "none", ref) == 0.0);
    CHECK(name_frequency_sim("gail west", "vest abigail", ref) == 15.0);
}

TEST_CASE("mutual friends") {
    auto a = fixture::profile("a", Network::S1, "a");
    auto b = fixture::profile("b", Network::S2, "b");
    CHECK(multiset_overlap({"a", "b", "c"}, {"b", "c", "d"}) == 2);
    CHECK(multiset_overlap({}, {"a"}) == 0);
    CHECK(multiset_overlap({"x", "x"}, {"x"}) == 1);
    a.friend_names = {"a", "b", "c"};
    b.friend_names = {"b", "c", "d"};
    CHECK(mutual_friends(a, b) == 2);
    a.friend_of_friend_names = {"x", "y"};
    b.friend_of_friend_names = {"y", "z", "x"};
    CHECK(mutual_friends_of_friends(a, b) == 2);
    b.friend_of_friend_names.clear();
    CHECK(mutual_friends_of_friends(a, b) == 0);
}

TEST_CASE("identical profiles") {
    const auto a = full_profile("a", Network::S1, "john smith");
    auto b = a;
    b.id = "b";
    b.network = Network::S2;
    const auto idx = index_of({a});
    const auto idx2 = index_of({b});
    const auto fv = extract_features(a, b, reference(), idx, idx2);
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        INFO(feature_names()[i]);
        CHECK(fv.present(i));
        if (i == f03_compressionName) continue; // C(xx) > C(x), so NCD of a string with itself is not 0
        if (i == f09_namesFrequency) CHECK(fv.values[i] == 17204.0);
        else if (i == f10_hometownDistanceKm || i == f11_currentCityDistanceKm) CHECK(fv.values[i] == 0.0);
        else if (i == f25_mutualFriends) CHECK(fv.values[i] == 3.0);
        else if (i == f26_mutualFriendsOfFriends) CHECK(fv.values[i] == 2.0);
        else CHECK(fv.values[i] == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(fv.values[f03_compressionName] > 0.5);
}

TEST_CASE("profiles with every optional field absent") {
    const auto a = fixture::profile("a", Network::S1, "gail west");
    const auto b = fixture::profile("b", Network::S2, "vest abigail");
    const auto idx = index_of({a});
    const auto fv = extract_features(a, b, ReferenceData{}, idx, idx);
    for (std::size_t i = 0; i <= f09_namesFrequency; ++i) CHECK(fv.present(i));
    for (std::size_t i : {f10_hometownDistanceKm, f11_currentCityDistanceKm, f12_threeGramEmployer,
                          f13_damerauLevenshteinEmployer, f14_jaroWinklerEmployer, f16_jaccardExperience,
                          f17_jaccardEducation, f20_semiVsmExperience, f21_semiVsmEducation}) {
        INFO(feature_names()[i]);
        CHECK_FALSE(fv.present(i));
    }
    // Empty aggregate texts follow the metric conventions.
    CHECK(fv.values[f15_jaccardFullProfile] == 1.0);
    CHECK(fv.values[f18_jaccardInfoFields] == 1.0);
    CHECK(fv.values[f19_semiVsmFullProfile] == 0.0);
    CHECK(fv.values[f22_semiVsmInfoFields] == 0.0);
    CHECK(fv.values[f23_vsmS1toS2] == 0.0);
    CHECK(fv.values[f24_vsmS2toS1] == 0.0);
    CHECK(fv.values[f25_mutualFriends] == 0.0);
    CHECK(fv.values[f26_mutualFriendsOfFriends] == 0.0);
}

TEST_CASE("hand-built pair equals per-metric calls") {
    auto a = fixture::profile("a", Network::S1, "gail west");
    auto b = fixture::profile("b", Network::S2, "vest abigail");
    a.current_employer = "acme";
    b.current_employer = "acme inc";
    a.friend_names = {"ann lee", "bo chen", "zed"};
    b.friend_names = {"bo chen", "ann lee", "yul"};
    a.hometown = "berlin";
    b.hometown = "paris";
    const auto ref = reference();
    const auto s1 = index_of({a, fixture::profile("c", Network::S1, "x")});
    const auto s2 = index_of({b});
    const auto fv = extract_features(a, b, ref, s1, s2);

    CHECK(fv.values[f00_soundexName] == soundex_sim("gail west", "vest abigail"));
    CHECK(fv.values[f01_differenceName] == difference_sim("gail west", "vest abigail"));
    CHECK(fv.values[f02_lcsName] == doctest::Approx(7.0 / 10.5));
    CHECK(fv.values[f03_compressionName] == ncd_sim("gail west", "vest abigail"));
    CHECK(fv.values[f04_damerauLevenshteinName] == damerau_levenshtein_sim("gail west", "vest abigail"));
    CHECK(fv.values[f05_jaroWinklerName] == jaro_winkler_sim("gail west", "vest abigail"));
    CHECK(fv.values[f06_twoGramName] == ngram_sim("gail west", "vest abigail", 2));
    CHECK(fv.values[f07_threeGramName] == ngram_sim("gail west", "vest abigail", 3));
    CHECK(fv.values[f08_vmnName] == vmn_sim("gail west", "vest abigail"));
    CHECK(fv.values[f09_namesFrequency] == 15.0);
    CHECK(fv.values[f10_hometownDistanceKm] == doctest::Approx(878).epsilon(0.01));
    CHECK_FALSE(fv.present(f11_currentCityDistanceKm));
    CHECK(fv.values[f12_threeGramEmployer] == ngram_sim("acme", "acme inc", 3));
    CHECK(fv.values[f13_damerauLevenshteinEmployer] == doctest::Approx(0.5));
    CHECK(fv.values[f14_jaroWinklerEmployer] == jaro_winkler_sim("acme", "acme inc"));
    CHECK(fv.values[f15_jaccardFullProfile] == jaccard_tokens("berlin acme", "paris acme inc"));
    CHECK(fv.values[f19_semiVsmFullProfile] == cosine_tf("berlin acme", "paris acme inc"));
    CHECK(fv.values[f23_vsmS1toS2] == s2.cosine("berlin acme", "paris acme inc"));
    CHECK(fv.values[f24_vsmS2toS1] == s1.cosine("paris acme inc", "berlin acme"));
    CHECK(fv.values[f25_mutualFriends] == 2.0);
    CHECK(fv.values[f26_mutualFriendsOfFriends] == 0.0);
}

TEST_CASE("argument order swaps only the directional features") {
    SynthConfig cfg;
    cfg.n_profiles_per_network = 80;
    cfg.n_matched = 30;
    const auto c = generate_corpora(cfg);
    const FeatureExtractor ex(c.s1, c.s2, c.reference);
    for (std::size_t i = 0; i < 60; ++i) {
        const auto& a = c.s1.records()[i];
        const auto& b = c.s2.records()[(i * 7) % c.s2.size()];
        const auto ab = ex.extract(a, b);
        const auto ba = ex.extract(b, a);
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            const std::size_t g = f == f23_vsmS1toS2 ? f24_vsmS2toS1 : f == f24_vsmS2toS1 ? f23_vsmS1toS2 : f;
            CHECK(ab.missing[f] == ba.missing[g]);
            CHECK(ab.values[f] == ba.values[g]);
        }
    }
}

TEST_CASE("same-network pairs are rejected") {
    const auto a = fixture::profile("a", Network::S1, "x");
    const auto idx = index_of({a});
    CHECK_THROWS_AS(extract_features(a, a, ReferenceData{}, idx, idx), ArgumentError);
}

TEST_CASE("bounded features stay in range on synthetic pairs") {
    SynthConfig cfg;
    cfg.n_profiles_per_network = 120;
    cfg.n_matched = 60;
    cfg.typo_rate = 0.3;
    const auto c = generate_corpora(cfg);
    const FeatureExtractor ex(c.s1, c.s2, c.reference);
    for (const auto& a : c.s1.records()) {
        for (std::size_t j = 0; j < 10; ++j) {
            const auto& b = c.s2.records()[(j * 13 + a.id.size()) % c.s2.size()];
            const auto fv = ex.extract(a, b);
            for (std::size_t f = 0; f < kFeatureCount; ++f) {
                if (!fv.present(f)) continue;
                CHECK(std::isfinite(fv.values[f]));
                CHECK(fv.values[f] >= 0.0);
                if (!is_unbounded_feature(f)) CHECK(fv.values[f] <= 1.0);
            }
        }
    }
}

TEST_CASE("zero-noise matched pairs score 1 on every present similarity") {
    SynthConfig cfg;
    cfg.n_profiles_per_network = 100;
    cfg.n_matched = 100;
    cfg.typo_rate = cfg.token_swap_rate = cfg.pseudonym_rate = cfg.field_drop_rate = 0.0;
    cfg.friend_overlap = 1.0;
    const auto c = generate_corpora(cfg);
    const FeatureExtractor ex(c.s1, c.s2, c.reference);
    for (const auto& p : c.positives) {
        const auto& a = c.s1.at(p.id1);
        const auto& b = c.s2.at(p.id2);
        const auto fv = ex.extract(a, b);
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            INFO(feature_names()[f]);
            REQUIRE(fv.present(f));
            if (f == f03_compressionName || f == f09_namesFrequency) continue;
            if (f == f10_hometownDistanceKm || f == f11_currentCityDistanceKm) CHECK(fv.values[f] == 0.0);
            else if (f == f25_mutualFriends) CHECK(fv.values[f] == static_cast<double>(a.friend_names.size()));
            else if (f == f26_mutualFriendsOfFriends) {
                CHECK(fv.values[f] == static_cast<double>(a.friend_of_friend_names.size()));
            } else CHECK(fv.values[f] == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("name similarity falls as the typo rate rises") {
    double previous = 2.0;
    for (double rate : {0.0, 0.1, 0.3}) {
        SynthConfig cfg;
        cfg.n_profiles_per_network = 150;
        cfg.n_matched = 150;
        cfg.typo_rate = rate;
        cfg.token_swap_rate = 0.0;
        const auto c = generate_corpora(cfg);
        const FeatureExtractor ex(c.s1, c.s2, c.reference);
        double sum = 0.0;
        for (const auto& p : c.positives) {
            sum += ex.extract(c.s1.at(p.id1), c.s2.at(p.id2)).values[f05_jaroWinklerName];
        }
        const double mean = sum / static_cast<double>(c.positives.size());
        CHECK(mean < previous);
        previous = mean;
    }
}

}
