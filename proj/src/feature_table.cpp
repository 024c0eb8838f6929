#include "xlink/feature_table.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "xlink/error.hpp"
#include "xlink/parallel.hpp"

namespace xlink {

namespace {

void append_double(std::string& out, double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

void check_id(const std::string& id) {
    if (id.find_first_of(",\n\r\"") != std::string::npos) {
        throw ArgumentError("id '" + id + "' cannot be written to CSV");
    }
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_all(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
}

} // namespace

std::string feature_csv_header() {
    std::string h = "id1,id2,label";
    for (auto name : feature_names()) {
        h += ',';
        h += name;
    }
    return h;
}

std::string to_feature_csv(const FeatureTable& table) {
    std::string out = feature_csv_header();
    out += '\n';
    for (const auto& row : table) {
        check_id(row.id1);
        check_id(row.id2);
        out += row.id1;
        out += ',';
        out += row.id2;
        out += ',';
        if (row.label) out += *row.label == Label::match ? '1' : '0';
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            out += ',';
            if (row.features.present(i)) append_double(out, row.features.values[i]);
        }
        out += '\n';
    }
    return out;
}

FeatureTable parse_feature_csv(std::string_view csv, const std::string& source) {
    FeatureTable table;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < csv.size()) {
        std::size_t end = csv.find('\n', pos);
        if (end == std::string_view::npos) end = csv.size();
        std::string_view line = csv.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != feature_csv_header()) {
                throw ParseError(source, line_no, "unexpected feature-matrix header");
            }
            header_seen = true;
            continue;
        }
        const auto cells = split_commas(line);
        if (cells.size() != 3 + kFeatureCount) {
            throw ParseError(source, line_no,
                             "expected " + std::to_string(3 + kFeatureCount) + " cells, got " +
                                 std::to_string(cells.size()));
        }
        FeatureRow row;
        row.id1 = std::string(cells[0]);
        row.id2 = std::string(cells[1]);
        if (cells[2] == "1") row.label = Label::match;
        else if (cells[2] == "0") row.label = Label::non_match;
        else if (!cells[2].empty()) throw ParseError(source, line_no, "label must be 0, 1 or empty");
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            const std::string_view cell = cells[3 + i];
            if (cell.empty()) {
                row.features.set_missing(i);
                continue;
            }
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
                throw ParseError(source, line_no,
                                 "bad value '" + std::string(cell) + "' for " +
                                     std::string(feature_names()[i]));
            }
            row.features.set(i, v);
        }
        table.push_back(std::move(row));
    }
    if (!header_seen) throw ParseError(source, 0, "empty feature matrix (no header)");
    return table;
}

void save_feature_csv(const FeatureTable& table, const std::filesystem::path& path) {
    write_all(path, to_feature_csv(table));
}

FeatureTable load_feature_csv(const std::filesystem::path& path) {
    return parse_feature_csv(read_all(path), path.string());
}

FeatureTable extract_pairs(const FeatureExtractor& extractor, const ProfileCorpus& s1,
                           const ProfileCorpus& s2, const std::vector<LabeledPair>& pairs,
                           unsigned threads) {
    FeatureTable table(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t i) {
        const auto& pair = pairs[i];
        table[i].id1 = pair.id1;
        table[i].id2 = pair.id2;
        table[i].label = pair.label;
        table[i].features = extractor.extract(s1.at(pair.id1), s2.at(pair.id2));
    });
    return table;
}

std::vector<FoldData> materialize_folds(const FoldSet& folds, const FeatureExtractor& extractor,
                                        const ProfileCorpus& s1, const ProfileCorpus& s2,
                                        unsigned threads) {
    // Every pair is in exactly one test set, so the test sets cover all pairs.
    std::vector<LabeledPair> all;
    for (const auto& f : folds.folds) all.insert(all.end(), f.test.begin(), f.test.end());
    const FeatureTable rows = extract_pairs(extractor, s1, s2, all, threads);
    std::map<PairKey, std::size_t> index;
    for (std::size_t i = 0; i < all.size(); ++i) index.emplace(key_of(all[i]), i);

    auto lookup = [&](const std::vector<LabeledPair>& pairs) {
        FeatureTable t;
        t.reserve(pairs.size());
        for (const auto& p : pairs) {
            const auto it = index.find(key_of(p));
            if (it == index.end()) {
                t.push_back(extract_pairs(extractor, s1, s2, {p}).front());
            } else {
                t.push_back(rows[it->second]);
            }
        }
        return t;
    };
    std::vector<FoldData> out(folds.folds.size());
    for (std::size_t i = 0; i < folds.folds.size(); ++i) {
        out[i].train = lookup(folds.folds[i].train);
        out[i].test = lookup(folds.folds[i].test);
    }
    return out;
}

namespace {

std::string fold_file(std::size_t i, const char* part) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fold_%02zu_%s.csv", i, part);
    return buf;
}

} // namespace

void save_fold_manifest(const FoldSet& folds, const std::vector<FoldData>& data,
                        const std::filesystem::path& dir) {
    if (folds.folds.size() != data.size()) throw ArgumentError("fold data does not match fold set");
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json manifest;
    manifest["format"] = "xlink-folds";
    manifest["version"] = 1;
    manifest["seed"] = folds.seed;
    manifest["k"] = folds.folds.size();
    manifest["negatives_per_positive_per_side"] = folds.negatives_per_positive_per_side;
    manifest["positives"] = folds.positive_count();
    manifest["negatives"] = folds.negative_count();
    manifest["effective_negative_ratio"] = folds.effective_ratio();
    auto discarded = nlohmann::ordered_json::array();
    for (const auto& p : folds.discarded) discarded.push_back({p.id1, p.id2});
    manifest["discarded_positives"] = discarded;
    manifest["warnings"] = folds.warnings;
    auto list = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::string train = fold_file(i, "train");
        const std::string test = fold_file(i, "test");
        save_feature_csv(data[i].train, dir / train);
        save_feature_csv(data[i].test, dir / test);
        std::size_t test_pos = 0;
        for (const auto& r : data[i].test) test_pos += r.label == Label::match;
        list.push_back({{"index", i},
                        {"train", train},
                        {"test", test},
                        {"n_train", data[i].train.size()},
                        {"n_test", data[i].test.size()},
                        {"n_test_positives", test_pos}});
    }
    manifest["folds"] = list;
    write_all(dir / "manifest.json", manifest.dump(2) + "\n");
}

FoldManifest load_fold_manifest(const std::filesystem::path& manifest_path) {
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(read_all(manifest_path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(manifest_path.string(), 0, e.what());
    }
    const auto dir = manifest_path.parent_path();
    FoldManifest out;
    try {
        out.seed = manifest.at("seed").get<std::uint64_t>();
        out.negatives_per_positive_per_side =
            manifest.at("negatives_per_positive_per_side").get<std::size_t>();
        for (const auto& f : manifest.at("folds")) {
            FoldData d;
            d.train = load_feature_csv(dir / f.at("train").get<std::string>());
            d.test = load_feature_csv(dir / f.at("test").get<std::string>());
            out.folds.push_back(std::move(d));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(manifest_path.string(), 0, e.what());
    }
    return out;
}

} // namespace xlink
