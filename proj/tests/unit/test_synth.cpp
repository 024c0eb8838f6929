#include <doctest.h>

#include <fstream>
#include <set>

#include "fixtures.hpp"
#include "xlink/dataset.hpp"
#include "xlink/error.hpp"
#include "xlink/synth.hpp"
#include "xlink/text.hpp"

using namespace xlink;

namespace {

std::string bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

SynthConfig small() {
    SynthConfig cfg;
    cfg.n_profiles_per_network = 150;
    cfg.n_matched = 60;
    return cfg;
}

} // namespace

TEST_SUITE("synth") {

TEST_CASE("same config gives byte-identical files") {
    const auto a = fixture::temp_dir("synth_a");
    const auto b = fixture::temp_dir("synth_b");
    write_corpora(generate_corpora(small()), small(), a);
    write_corpora(generate_corpora(small()), small(), b);
    for (const char* f : {kS1File, kS2File, kPositivesFile, "name_frequency.tsv", "gazetteer.csv", "config.json"}) {
        INFO(f);
        CHECK(bytes(a / f) == bytes(b / f));
        CHECK_FALSE(bytes(a / f).empty());
    }
    auto other = small();
    other.seed = 2;
    const auto c = fixture::temp_dir("synth_c");
    write_corpora(generate_corpora(other), other, c);
    CHECK(bytes(a / kS2File) != bytes(c / kS2File));
}

TEST_CASE("written corpora load back and positives validate") {
    const auto dir = fixture::temp_dir("synth_load");
    const auto corpora = generate_corpora(small());
    write_corpora(corpora, small(), dir);
    const auto s1 = load_corpus(dir / kS1File, Network::S1);
    const auto s2 = load_corpus(dir / kS2File, Network::S2);
    const auto pos = load_positive_pairs(dir / kPositivesFile);
    CHECK(s1.size() == 150);
    CHECK(s2.size() == 150);
    CHECK(pos.size() == 60);
    CHECK(pos == corpora.positives);
    CHECK_NOTHROW(validate_pairs(pos, s1, s2));
    std::set<std::string> s1_ids, s2_ids;
    for (const auto& p : pos) {
        s1_ids.insert(p.id1);
        s2_ids.insert(p.id2);
    }
    CHECK(s1_ids.size() == 60);
    CHECK(s2_ids.size() == 60);
    const auto ref = load_reference(dir);
    for (const auto& p : s1.records()) CHECK(ref.name_frequency.count(p.full_name) == 1);
}

TEST_CASE("pseudonyms share no name token with the original") {
    auto cfg = small();
    cfg.pseudonym_rate = 1.0;
    const auto c = generate_corpora(cfg);
    for (const auto& p : c.positives) {
        const auto a = tokenize(c.s1.at(p.id1).full_name);
        const auto b = tokenize(c.s2.at(p.id2).full_name);
        for (const auto& t : a) CHECK(std::find(b.begin(), b.end(), t) == b.end());
    }
}

TEST_CASE("zero noise clones the identity fields") {
    auto cfg = small();
    cfg.typo_rate = 0.0;
    cfg.token_swap_rate = 0.0;
    cfg.field_drop_rate = 0.0;
    cfg.friend_overlap = 1.0;
    const auto c = generate_corpora(cfg);
    for (const auto& p : c.positives) {
        const auto& a = c.s1.at(p.id1);
        const auto& b = c.s2.at(p.id2);
        CHECK(a.full_name == b.full_name);
        CHECK(a.current_employer == b.current_employer);
        CHECK(a.hometown == b.hometown);
    }
}

TEST_CASE("config validation and JSON") {
    auto cfg = small();
    cfg.typo_rate = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
    cfg = small();
    cfg.n_matched = 151;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
    cfg = small();
    cfg.seed = 77;
    cfg.friend_overlap = 0.25;
    const auto back = SynthConfig::from_json(nlohmann::json::parse(cfg.to_json().dump()));
    CHECK(back.to_json() == cfg.to_json());
    CHECK_THROWS_AS(SynthConfig::from_json(nlohmann::json::parse(R"({"typo":0.1})")), ArgumentError);
    CHECK(SynthConfig::from_json(nlohmann::json::parse(R"({"seed":9})")).n_matched == 200);
}

TEST_CASE("a network too large for the name vocabulary is refused") {
    SynthConfig cfg;
    cfg.n_profiles_per_network = 200000;
    cfg.n_matched = 10;
    CHECK_THROWS_AS(generate_corpora(cfg), GenerationError);
}

}
