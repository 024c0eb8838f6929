#include "xlink/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>

#include "xlink/error.hpp"
#include "xlink/rng.hpp"
#include "xlink/text.hpp"

namespace xlink {

// ---------------------------------------------------------------- config

void SynthConfig::validate() const {
    const auto rate = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ArgumentError(std::string(name) + " must lie in [0, 1]");
        }
    };
    rate(typo_rate, "typo_rate");
    rate(token_swap_rate, "token_swap_rate");
    rate(pseudonym_rate, "pseudonym_rate");
    rate(friend_overlap, "friend_overlap");
    rate(field_drop_rate, "field_drop_rate");
    if (n_profiles_per_network == 0) throw ArgumentError("n_profiles_per_network must be positive");
    if (n_matched > n_profiles_per_network) {
        throw ArgumentError("n_matched exceeds n_profiles_per_network");
    }
    if (min_friends > max_friends) throw ArgumentError("min_friends exceeds max_friends");
}

nlohmann::ordered_json SynthConfig::to_json() const {
    return {{"n_profiles_per_network", n_profiles_per_network},
            {"n_matched", n_matched},
            {"typo_rate", typo_rate},
            {"token_swap_rate", token_swap_rate},
            {"pseudonym_rate", pseudonym_rate},
            {"friend_overlap", friend_overlap},
            {"field_drop_rate", field_drop_rate},
            {"min_friends", min_friends},
            {"max_friends", max_friends},
            {"seed", seed}};
}

SynthConfig SynthConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ArgumentError("synth config must be a JSON object");
    SynthConfig c;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "n_profiles_per_network") c.n_profiles_per_network = value.get<std::size_t>();
            else if (key == "n_matched") c.n_matched = value.get<std::size_t>();
            else if (key == "typo_rate") c.typo_rate = value.get<double>();
            else if (key == "token_swap_rate") c.token_swap_rate = value.get<double>();
            else if (key == "pseudonym_rate") c.pseudonym_rate = value.get<double>();
            else if (key == "friend_overlap") c.friend_overlap = value.get<double>();
            else if (key == "field_drop_rate") c.field_drop_rate = value.get<double>();
            else if (key == "min_friends") c.min_friends = value.get<std::size_t>();
            else if (key == "max_friends") c.max_friends = value.get<std::size_t>();
            else if (key == "seed") c.seed = value.get<std::uint64_t>();
            else throw ArgumentError("unknown synth config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ArgumentError(std::string("bad synth config value: ") + e.what());
    }
    c.validate();
    return c;
}

SynthConfig SynthConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return from_json(nlohmann::json::parse(ss.str()));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string(), 0, e.what());
    }
}

// ---------------------------------------------------------------- generator

namespace {

constexpr std::size_t kFirstNames = 300;
constexpr std::size_t kLastNames = 1000;
constexpr std::size_t kCities = 150;
constexpr std::size_t kEmployers = 200;
constexpr std::size_t kSchools = 80;
constexpr std::size_t kMaxDrawAttempts = 1000;

constexpr std::array kOnsets{"b", "c", "d", "f", "g", "h", "j", "k", "l", "m", "n", "p", "r",
                             "s", "t", "v", "w", "z", "br", "ch", "cl", "dr", "gr", "kr", "pl",
                             "sh", "st", "tr"};
constexpr std::array kVowels{"a", "e", "i", "o", "u", "ai", "ea", "ou"};
constexpr std::array kCodas{"", "", "", "n", "r", "l", "s", "th", "m", "x"};

constexpr std::array kTitles{"software engineer", "data analyst",     "product manager",
                             "sales director",    "account executive", "research scientist",
                             "project manager",   "designer",          "consultant",
                             "marketing lead",    "teacher",           "nurse",
                             "accountant",        "architect",         "lawyer"};
constexpr std::array kSeniority{"junior", "senior", "lead", "principal", "associate"};
constexpr std::array kEmployerSuffix{"systems", "labs", "group", "partners", "solutions",
                                     "industries", "media", "bank", "health", "logistics"};
constexpr std::array kSubjects{"computer science", "economics", "physics",    "biology",
                               "history",          "law",       "mathematics", "design",
                               "medicine",         "chemistry", "philosophy",  "marketing"};
constexpr std::array kDegrees{"bsc", "msc", "ba", "ma", "phd", "mba"};
constexpr std::array kHobbies{"hiking", "chess", "cycling", "photography", "cooking", "running",
                              "painting", "jazz", "football", "travel", "reading", "climbing",
                              "gardening", "sailing", "yoga", "gaming", "movies", "poetry"};
constexpr std::array kLanguages{"english", "german", "french", "spanish", "hebrew", "russian",
                                "arabic", "italian", "polish", "turkish"};
constexpr std::array kStatus{"single", "married", "engaged", "in a relationship"};

template <class A>
std::string pick(Rng& rng, const A& options) {
    return options[rng.below(options.size())];
}

std::string make_word(Rng& rng, std::size_t min_syllables, std::size_t max_syllables) {
    const std::size_t n = min_syllables + rng.below(max_syllables - min_syllables + 1);
    std::string w;
    for (std::size_t i = 0; i < n; ++i) {
        w += pick(rng, kOnsets);
        w += pick(rng, kVowels);
        if (i + 1 == n || rng.bernoulli(0.3)) w += pick(rng, kCodas);
    }
    return w;
}

// `n` distinct syllable words, none in `taken`; the new words join `taken`.
std::vector<std::string> make_vocabulary(Rng& rng, std::size_t n, std::size_t min_syl,
                                         std::size_t max_syl, std::set<std::string>& taken) {
    std::vector<std::string> out;
    std::size_t attempts = 0;
    while (out.size() < n) {
        if (++attempts > n * 100) throw GenerationError("syllable vocabulary exhausted");
        std::string w = make_word(rng, min_syl, max_syl);
        if (taken.insert(w).second) out.push_back(std::move(w));
    }
    return out;
}

// Zipf(1) ranks drawn by inverse CDF.
class Zipf {
public:
    explicit Zipf(std::size_t n) : cdf_(n) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            total += 1.0 / static_cast<double>(i + 1);
            cdf_[i] = total;
        }
        for (double& c : cdf_) c /= total;
    }
    std::size_t draw(Rng& rng) const {
        const double u = rng.uniform();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
    }
    double probability(std::size_t rank) const {
        return rank == 0 ? cdf_[0] : cdf_[rank] - cdf_[rank - 1];
    }

private:
    std::vector<double> cdf_;
};

struct Vocabulary {
    std::vector<std::string> first, last, cities, employers, schools;
    std::vector<GeoPoint> city_points;
    Zipf first_zipf{kFirstNames}, last_zipf{kLastNames}, city_zipf{kCities};
};

Vocabulary build_vocabulary(Rng& rng) {
    Vocabulary v;
    std::set<std::string> taken;
    v.first = make_vocabulary(rng, kFirstNames, 2, 3, taken);
    v.last = make_vocabulary(rng, kLastNames, 2, 3, taken);
    const auto city_words = make_vocabulary(rng, kCities, 2, 4, taken);
    for (const auto& w : city_words) {
        v.cities.push_back(rng.bernoulli(0.2) ? w + (rng.bernoulli(0.5) ? " city" : " springs") : w);
        const double lat = -55.0 + 125.0 * rng.uniform();
        const double lon = -180.0 + 360.0 * rng.uniform();
        v.city_points.push_back({lat, lon});
    }
    const auto employer_words = make_vocabulary(rng, kEmployers, 2, 3, taken);
    for (const auto& w : employer_words) v.employers.push_back(w + ' ' + pick(rng, kEmployerSuffix));
    const auto school_words = make_vocabulary(rng, kSchools, 2, 3, taken);
    for (std::size_t i = 0; i < school_words.size(); ++i) {
        v.schools.push_back(i % 2 == 0 ? "university of " + school_words[i]
                                       : school_words[i] + " institute of technology");
    }
    return v;
}

struct Name {
    std::size_t first = 0;
    std::size_t last = 0;
    bool operator<(const Name& o) const { return first != o.first ? first < o.first : last < o.last; }
};

std::string render(const Vocabulary& v, const Name& n) { return v.first[n.first] + ' ' + v.last[n.last]; }

Name draw_name(Rng& rng, const Vocabulary& v) {
    return {v.first_zipf.draw(rng), v.last_zipf.draw(rng)};
}

// A name outside `used`, optionally sharing no token with `avoid`.
Name draw_fresh_name(Rng& rng, const Vocabulary& v, std::set<Name>& used, const Name* avoid) {
    for (std::size_t attempt = 0; attempt < kMaxDrawAttempts; ++attempt) {
        const Name n = draw_name(rng, v);
        if (used.count(n)) continue;
        if (avoid) {
            const std::set<std::string> a{v.first[avoid->first], v.last[avoid->last]};
            if (a.count(v.first[n.first]) || a.count(v.last[n.last])) continue;
        }
        used.insert(n);
        return n;
    }
    throw GenerationError("name vocabulary exhausted: cannot draw another distinct profile name");
}

struct Person {
    Name name;
    ProfileRecord record;
    std::vector<std::size_t> friends;           // indices into the friend population
    std::vector<std::size_t> friends_of_friends;
};

std::vector<std::string> names_of(const std::vector<std::size_t>& idx,
                                  const std::vector<std::string>& population) {
    std::vector<std::string> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(population[i]);
    return out;
}

Person make_person(Rng& rng, const Vocabulary& v, std::set<Name>& used,
                   std::size_t population_size, const SynthConfig& cfg) {
    Person p;
    p.name = draw_fresh_name(rng, v, used, nullptr);
    ProfileRecord& r = p.record;
    r.full_name = render(v, p.name);
    const double g = rng.uniform();
    r.gender = g < 0.49 ? Gender::male : g < 0.98 ? Gender::female : Gender::other;
    r.hometown = v.cities[v.city_zipf.draw(rng)];
    r.current_city = rng.bernoulli(0.5) ? *r.hometown : v.cities[v.city_zipf.draw(rng)];
    const std::string employer = v.employers[rng.below(v.employers.size())];
    r.current_employer = employer;
    r.professional_experience = pick(rng, kSeniority) + ' ' + pick(rng, kTitles) + " at " + employer;
    if (rng.bernoulli(0.6)) {
        r.professional_experience = *r.professional_experience + ' ' + pick(rng, kTitles) +
                                    " at " + v.employers[rng.below(v.employers.size())];
    }
    r.education = pick(rng, kDegrees) + ' ' + pick(rng, kSubjects) + ' ' +
                  v.schools[rng.below(v.schools.size())];

    std::set<std::string> hobbies;
    const std::size_t n_hobbies = 2 + rng.below(4);
    for (std::size_t i : rng.sample_indices(kHobbies.size(), n_hobbies)) hobbies.insert(kHobbies[i]);
    std::string about;
    for (const auto& h : hobbies) about += (about.empty() ? "" : " ") + h;
    r.info_fields["about"] = about;
    std::string langs;
    for (std::size_t i : rng.sample_indices(kLanguages.size(), 1 + rng.below(3))) {
        langs += (langs.empty() ? "" : " ") + std::string(kLanguages[i]);
    }
    r.info_fields["languages"] = langs;
    r.info_fields["relationship"] = pick(rng, kStatus);

    const std::size_t n_friends =
        cfg.min_friends + rng.below(cfg.max_friends - cfg.min_friends + 1);
    p.friends = rng.sample_indices(population_size, n_friends);
    p.friends_of_friends = rng.sample_indices(population_size, 3 * n_friends);
    return p;
}

// Per-character corruption: substitution, deletion, insertion or transposition.
std::string add_typos(Rng& rng, const std::string& s, double rate) {
    if (rate <= 0.0) return s;
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == ' ' || !rng.bernoulli(rate)) {
            out += c;
            continue;
        }
        const char letter = static_cast<char>('a' + rng.below(26));
        switch (rng.below(4)) {
        case 0: out += letter; break;
        case 1: break;
        case 2: out += c; out += letter; break;
        default:
            if (i + 1 < s.size() && s[i + 1] != ' ') {
                out += s[i + 1];
                out += c;
                ++i;
            } else {
                out += letter;
            }
        }
    }
    const std::string norm = normalize_text(out);
    return norm.empty() ? s : norm;
}

std::string swap_tokens(Rng& rng, const std::string& s, double rate) {
    auto tokens = tokenize(s);
    if (tokens.size() < 2 || !rng.bernoulli(rate)) return s;
    const std::size_t i = rng.below(tokens.size() - 1);
    std::swap(tokens[i], tokens[i + 1]);
    std::string out;
    for (const auto& t : tokens) out += (out.empty() ? "" : " ") + t;
    return out;
}

std::string corrupt_text(Rng& rng, const std::string& s, const SynthConfig& cfg) {
    return add_typos(rng, swap_tokens(rng, s, cfg.token_swap_rate), cfg.typo_rate);
}

void drop_fields(Rng& rng, ProfileRecord& r, double rate) {
    for (auto* field : {&r.hometown, &r.current_city, &r.current_employer,
                        &r.professional_experience, &r.education}) {
        if (field->has_value() && rng.bernoulli(rate)) field->reset();
    }
    if (r.gender && rng.bernoulli(rate)) r.gender.reset();
    for (auto it = r.info_fields.begin(); it != r.info_fields.end();) {
        it = rng.bernoulli(rate) ? r.info_fields.erase(it) : std::next(it);
    }
}

// Keeps round(overlap * |friends|) of them and replaces the rest with other
// population members.
std::vector<std::size_t> perturb_friends(Rng& rng, const std::vector<std::size_t>& friends,
                                         double overlap, std::size_t population_size) {
    const auto keep = static_cast<std::size_t>(std::llround(overlap * static_cast<double>(friends.size())));
    std::vector<std::size_t> out;
    std::unordered_set<std::size_t> taken(friends.begin(), friends.end());
    for (std::size_t i : rng.sample_indices(friends.size(), keep)) out.push_back(friends[i]);
    while (out.size() < friends.size()) {
        const std::size_t f = rng.below(population_size);
        if (taken.insert(f).second) out.push_back(f);
    }
    return out;
}

std::string make_id(const char* prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%05zu", prefix, i);
    return buf;
}

} // namespace

SynthCorpora generate_corpora(const SynthConfig& cfg) {
    cfg.validate();
    Rng vocab_rng(derive_seed(cfg.seed, 100));
    const Vocabulary v = build_vocabulary(vocab_rng);

    const std::size_t n = cfg.n_profiles_per_network;
    const std::size_t distinct_needed = 2 * n; // S1, unmatched S2 and pseudonyms
    if (distinct_needed * 4 > kFirstNames * kLastNames) {
        throw GenerationError("name vocabulary too small for " + std::to_string(n) +
                              " profiles per network");
    }

    // Friend names come from a population that is not itself profiled.
    Rng pop_rng(derive_seed(cfg.seed, 101));
    const std::size_t population_size = std::max<std::size_t>(2000, 4 * n);
    std::vector<Name> population_names;
    std::vector<std::string> population;
    for (std::size_t i = 0; i < population_size; ++i) {
        population_names.push_back(draw_name(pop_rng, v));
        population.push_back(render(v, population_names.back()));
    }

    std::set<Name> used;
    Rng person_rng(derive_seed(cfg.seed, 102));
    std::vector<Person> s1_people;
    for (std::size_t i = 0; i < n; ++i) {
        s1_people.push_back(make_person(person_rng, v, used, population_size, cfg));
    }

    // S2 slots: the first n_matched are clones of S1 profiles 0..n_matched-1.
    Rng clone_rng(derive_seed(cfg.seed, 103));
    std::vector<Person> s2_people;
    std::vector<Name> canonical_names;
    for (std::size_t i = 0; i < cfg.n_matched; ++i) {
        Person c = s1_people[i];
        ProfileRecord& r = c.record;
        if (clone_rng.bernoulli(cfg.pseudonym_rate)) {
            c.name = draw_fresh_name(clone_rng, v, used, &s1_people[i].name);
            r.full_name = render(v, c.name);
            canonical_names.push_back(c.name);
        } else {
            r.full_name = corrupt_text(clone_rng, r.full_name, cfg);
        }
        for (auto* field : {&r.current_employer, &r.professional_experience, &r.education}) {
            if (*field) *field = corrupt_text(clone_rng, **field, cfg);
        }
        for (auto& [key, value] : r.info_fields) value = corrupt_text(clone_rng, value, cfg);
        drop_fields(clone_rng, r, cfg.field_drop_rate);
        c.friends = perturb_friends(clone_rng, c.friends, cfg.friend_overlap, population_size);
        c.friends_of_friends =
            perturb_friends(clone_rng, c.friends_of_friends, cfg.friend_overlap, population_size);
        s2_people.push_back(std::move(c));
    }
    for (std::size_t i = cfg.n_matched; i < n; ++i) {
        Person p = make_person(person_rng, v, used, population_size, cfg);
        drop_fields(clone_rng, p.record, cfg.field_drop_rate);
        s2_people.push_back(std::move(p));
    }

    // S2 ids are shuffled so position carries no signal.
    Rng id_rng(derive_seed(cfg.seed, 104));
    std::vector<std::size_t> s2_slot(n);
    for (std::size_t i = 0; i < n; ++i) s2_slot[i] = i;
    id_rng.shuffle(s2_slot);

    SynthCorpora out;
    for (std::size_t i = 0; i < n; ++i) {
        ProfileRecord r = s1_people[i].record;
        r.id = make_id("a", i);
        r.network = Network::S1;
        r.friend_names = names_of(s1_people[i].friends, population);
        r.friend_of_friend_names = names_of(s1_people[i].friends_of_friends, population);
        out.s1.add(normalized(std::move(r)));
    }
    std::vector<ProfileRecord> s2_records(n);
    for (std::size_t i = 0; i < n; ++i) {
        ProfileRecord r = s2_people[i].record;
        r.id = make_id("b", s2_slot[i]);
        r.network = Network::S2;
        r.friend_names = names_of(s2_people[i].friends, population);
        r.friend_of_friend_names = names_of(s2_people[i].friends_of_friends, population);
        s2_records[s2_slot[i]] = normalized(std::move(r));
    }
    for (auto& r : s2_records) out.s2.add(std::move(r));
    for (std::size_t i = 0; i < cfg.n_matched; ++i) {
        out.positives.push_back({make_id("a", i), make_id("b", s2_slot[i]), Label::match});
    }
    std::sort(out.positives.begin(), out.positives.end());

    // Expected counts under the Zipf name model of a 1e8-user network.
    std::map<std::string, std::int64_t> freq;
    const auto add_name = [&](const Name& nm) {
        const double p = v.first_zipf.probability(nm.first) * v.last_zipf.probability(nm.last);
        freq[render(v, nm)] = std::max<std::int64_t>(1, std::llround(1e8 * p));
    };
    for (const auto& p : s1_people) add_name(p.name);
    for (std::size_t i = cfg.n_matched; i < n; ++i) add_name(s2_people[i].name);
    for (const auto& nm : canonical_names) add_name(nm);
    for (const auto& nm : population_names) add_name(nm);
    for (const auto& [name, count] : freq) out.reference.add_name_frequency(name, count);
    for (std::size_t i = 0; i < v.cities.size(); ++i) {
        out.reference.add_location(v.cities[i], v.city_points[i]);
    }
    return out;
}

void write_corpora(const SynthCorpora& corpora, const SynthConfig& cfg,
                   const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    save_corpus(corpora.s1, dir / kS1File);
    save_corpus(corpora.s2, dir / kS2File);
    save_positive_pairs(corpora.positives, dir / kPositivesFile);
    save_reference(corpora.reference, dir);
    std::ofstream out(dir / "config.json", std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + (dir / "config.json").string() + "'");
    out << cfg.to_json().dump(2) << '\n';
}

} // namespace xlink
