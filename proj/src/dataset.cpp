#include "xlink/dataset.hpp"

#include <fstream>
#include <sstream>

#include "xlink/error.hpp"
#include "xlink/rng.hpp"

namespace xlink {

std::vector<LabeledPair> parse_positive_pairs(std::string_view csv, const std::string& source) {
    std::vector<LabeledPair> pairs;
    std::istringstream in{std::string(csv)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(source, line_no, "expected id1,id2");
        std::string id1 = line.substr(0, comma);
        std::string id2 = line.substr(comma + 1);
        if (const auto extra = id2.find(','); extra != std::string::npos) id2.resize(extra);
        if (line_no == 1 && id1 == "id1" && id2 == "id2") continue;
        if (id1.empty() || id2.empty()) throw ParseError(source, line_no, "empty id");
        pairs.push_back({std::move(id1), std::move(id2), Label::match});
    }
    return pairs;
}

std::vector<LabeledPair> load_positive_pairs(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_positive_pairs(ss.str(), path.string());
}

void save_positive_pairs(const std::vector<LabeledPair>& pairs, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << "id1,id2\n";
    for (const auto& p : pairs) out << p.id1 << ',' << p.id2 << '\n';
}

void validate_pairs(const std::vector<LabeledPair>& pairs, const ProfileCorpus& s1,
                    const ProfileCorpus& s2) {
    std::set<PairKey> seen;
    for (const auto& p : pairs) {
        if (!s1.find(p.id1)) throw ArgumentError("pair references unknown S1 id '" + p.id1 + "'");
        if (!s2.find(p.id2)) throw ArgumentError("pair references unknown S2 id '" + p.id2 + "'");
        if (!seen.insert(key_of(p)).second) {
            throw ArgumentError("pair (" + p.id1 + ", " + p.id2 + ") appears more than once");
        }
    }
}

GroupAssignment partition_groups(const ProfileCorpus& s1, const ProfileCorpus& s2,
                                 const std::vector<LabeledPair>& positives, std::size_t k,
                                 std::uint64_t seed) {
    if (k == 0) throw ArgumentError("group count must be >= 1");
    if (k > s1.size() + s2.size()) {
        throw ArgumentError("group count " + std::to_string(k) + " exceeds the " +
                            std::to_string(s1.size() + s2.size()) + " profiles available");
    }
    validate_pairs(positives, s1, s2);

    GroupAssignment g;
    g.k = k;
    g.seed = seed;
    g.s1_members.resize(k);
    g.s2_members.resize(k);
    g.positives.resize(k);

    Rng rng(derive_seed(seed, 0));
    for (const auto& p : s1.records()) {
        const std::size_t group = rng.below(k);
        g.s1_group.emplace(p.id, group);
        g.s1_members[group].push_back(p.id);
    }
    for (const auto& p : s2.records()) {
        const std::size_t group = rng.below(k);
        g.s2_group.emplace(p.id, group);
        g.s2_members[group].push_back(p.id);
    }
    for (const auto& pair : positives) {
        const std::size_t ga = g.s1_group.at(pair.id1);
        const std::size_t gb = g.s2_group.at(pair.id2);
        if (ga == gb) {
            g.positives[ga].push_back({pair.id1, pair.id2, Label::match});
        } else {
            g.discarded.push_back({pair.id1, pair.id2, Label::match});
        }
    }
    return g;
}

std::vector<LabeledPair> generate_negatives(const std::vector<std::string>& group_s1,
                                            const std::vector<std::string>& group_s2,
                                            const std::vector<LabeledPair>& positives_in_group,
                                            std::size_t n_per_side, std::uint64_t seed,
                                            const std::set<PairKey>& known_positives,
                                            std::vector<std::string>* warnings) {
    if (n_per_side < 1) throw ArgumentError("negatives per side must be >= 1");
    Rng rng(seed);
    std::set<PairKey> emitted;
    std::vector<LabeledPair> out;

    auto usable = [&](const PairKey& key) {
        return !known_positives.count(key) && !emitted.count(key);
    };
    auto draw = [&](const std::vector<PairKey>& candidates, const LabeledPair& source,
                    const char* side) {
        const auto picks = rng.sample_indices(candidates.size(), n_per_side);
        for (std::size_t i : picks) {
            emitted.insert(candidates[i]);
            out.push_back({candidates[i].first, candidates[i].second, Label::non_match});
        }
        if (picks.size() < n_per_side && warnings) {
            warnings->push_back("positive (" + source.id1 + ", " + source.id2 + "): only " +
                                std::to_string(picks.size()) + " of " + std::to_string(n_per_side) +
                                " " + side + " negatives available");
        }
    };

    for (const auto& pos : positives_in_group) {
        std::vector<PairKey> with_s2;
        for (const auto& other : group_s2) {
            PairKey key{pos.id1, other};
            if (other != pos.id2 && usable(key)) with_s2.push_back(std::move(key));
        }
        draw(with_s2, pos, "S2-side");

        std::vector<PairKey> with_s1;
        for (const auto& other : group_s1) {
            PairKey key{other, pos.id2};
            if (other != pos.id1 && usable(key)) with_s1.push_back(std::move(key));
        }
        draw(with_s1, pos, "S1-side");
    }
    return out;
}

std::size_t FoldSet::positive_count() const {
    std::size_t n = 0;
    for (const auto& f : folds) {
        for (const auto& p : f.test) n += p.label == Label::match;
    }
    return n;
}

std::size_t FoldSet::negative_count() const {
    std::size_t n = 0;
    for (const auto& f : folds) {
        for (const auto& p : f.test) n += p.label == Label::non_match;
    }
    return n;
}

double FoldSet::effective_ratio() const {
    const std::size_t pos = positive_count();
    return pos == 0 ? 0.0 : static_cast<double>(negative_count()) / static_cast<double>(pos);
}

FoldSet build_folds(const GroupAssignment& assignment,
                    const std::vector<std::vector<LabeledPair>>& negatives_by_group,
                    std::size_t negatives_per_side) {
    const std::size_t k = assignment.k;
    if (k < 2) throw ArgumentError("fold construction needs at least 2 groups");
    if (negatives_by_group.size() != k) {
        throw ArgumentError("negatives must be supplied for each of the " + std::to_string(k) +
                            " groups");
    }
    std::vector<std::vector<LabeledPair>> group_pairs(k);
    for (std::size_t g = 0; g < k; ++g) {
        group_pairs[g] = assignment.positives[g];
        group_pairs[g].insert(group_pairs[g].end(), negatives_by_group[g].begin(),
                              negatives_by_group[g].end());
    }

    FoldSet fs;
    fs.seed = assignment.seed;
    fs.negatives_per_positive_per_side = negatives_per_side;
    fs.discarded = assignment.discarded;
    fs.folds.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        fs.folds[i].test = group_pairs[i];
        for (std::size_t g = 0; g < k; ++g) {
            if (g == i) continue;
            fs.folds[i].train.insert(fs.folds[i].train.end(), group_pairs[g].begin(),
                                     group_pairs[g].end());
        }
        if (assignment.positives[i].empty()) {
            fs.warnings.push_back("fold " + std::to_string(i) + " has no test positives");
        }
    }
    return fs;
}

FoldSet build_fold_set(const ProfileCorpus& s1, const ProfileCorpus& s2,
                       const std::vector<LabeledPair>& positives, const FoldOptions& options) {
    if (s1.network() != Network::S1 || s2.network() != Network::S2) {
        throw ArgumentError("fold construction expects an S1 and an S2 corpus");
    }
    const GroupAssignment assignment =
        partition_groups(s1, s2, positives, options.k, options.seed);

    std::set<PairKey> known;
    for (const auto& p : positives) known.insert(key_of(p));

    std::vector<std::string> warnings;
    std::vector<std::vector<LabeledPair>> negatives(assignment.k);
    for (std::size_t g = 0; g < assignment.k; ++g) {
        negatives[g] = generate_negatives(assignment.s1_members[g], assignment.s2_members[g],
                                          assignment.positives[g], options.negatives_per_side,
                                          derive_seed(options.seed, 1 + g), known, &warnings);
    }
    FoldSet fs = build_folds(assignment, negatives, options.negatives_per_side);
    warnings.insert(warnings.end(), fs.warnings.begin(), fs.warnings.end());
    fs.warnings = std::move(warnings);
    return fs;
}

} // namespace xlink
