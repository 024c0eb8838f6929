#include "xlink/profile.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "xlink/error.hpp"
#include "xlink/text.hpp"

namespace xlink {

using nlohmann::json;

std::string_view to_string(Network n) { return n == Network::S1 ? "S1" : "S2"; }

Network parse_network(std::string_view s) {
    if (s == "S1" || s == "s1" || s == "1") return Network::S1;
    if (s == "S2" || s == "s2" || s == "2") return Network::S2;
    throw ArgumentError("unknown network '" + std::string(s) + "' (expected S1 or S2)");
}

std::string_view to_string(Gender g) {
    switch (g) {
    case Gender::male: return "male";
    case Gender::female: return "female";
    case Gender::other: return "other";
    }
    return "other";
}

std::optional<Gender> parse_gender(std::string_view s) {
    if (s == "male") return Gender::male;
    if (s == "female") return Gender::female;
    if (s == "other") return Gender::other;
    return std::nullopt;
}

std::string aggregate_info_text(const ProfileRecord& p) {
    std::vector<std::string_view> parts;
    if (p.gender) parts.push_back(to_string(*p.gender));
    if (p.hometown) parts.push_back(*p.hometown);
    if (p.current_city) parts.push_back(*p.current_city);
    if (p.current_employer) parts.push_back(*p.current_employer);
    for (const auto& [key, value] : p.info_fields) parts.push_back(value);
    return join_nonempty(parts);
}

std::string full_profile_text(const ProfileRecord& p) {
    const std::string info = aggregate_info_text(p);
    std::vector<std::string_view> parts{info};
    if (p.professional_experience) parts.push_back(*p.professional_experience);
    if (p.education) parts.push_back(*p.education);
    return join_nonempty(parts);
}

namespace {

void normalize_optional(std::optional<std::string>& field) {
    if (!field) return;
    *field = normalize_text(*field);
    if (field->empty()) field.reset();
}

std::vector<std::string> normalize_names(const std::vector<std::string>& names, bool dedup) {
    std::vector<std::string> out;
    out.reserve(names.size());
    std::unordered_set<std::string> seen;
    for (const auto& raw : names) {
        std::string n = normalize_text(raw);
        if (n.empty()) continue;
        if (dedup && !seen.insert(n).second) continue;
        out.push_back(std::move(n));
    }
    return out;
}

} // namespace

ProfileRecord normalized(ProfileRecord p) {
    if (p.id.empty()) throw MissingFieldError("profile has an empty id");
    p.full_name = normalize_text(p.full_name);
    if (p.full_name.empty()) {
        throw MissingFieldError("profile '" + p.id + "' has an empty full_name");
    }
    normalize_optional(p.hometown);
    normalize_optional(p.current_city);
    normalize_optional(p.current_employer);
    normalize_optional(p.professional_experience);
    normalize_optional(p.education);
    std::map<std::string, std::string> info;
    for (auto& [key, value] : p.info_fields) {
        std::string v = normalize_text(value);
        if (!v.empty()) info[key] = std::move(v);
    }
    p.info_fields = std::move(info);
    p.friend_names = normalize_names(p.friend_names, false);
    p.friend_of_friend_names = normalize_names(p.friend_of_friend_names, true);
    return p;
}

void ProfileCorpus::add(ProfileRecord record) {
    if (record.network != network_) {
        throw ArgumentError("profile '" + record.id + "' belongs to " +
                            std::string(to_string(record.network)) + ", corpus is " +
                            std::string(to_string(network_)));
    }
    if (by_id_.count(record.id)) {
        throw DuplicateIdError(record.id, "duplicate profile id '" + record.id + "'");
    }
    by_id_.emplace(record.id, records_.size());
    records_.push_back(std::move(record));
}

const ProfileRecord* ProfileCorpus::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &records_[it->second];
}

const ProfileRecord& ProfileCorpus::at(std::string_view id) const {
    if (const auto* p = find(id)) return *p;
    throw ArgumentError("unknown " + std::string(to_string(network_)) + " profile id '" +
                        std::string(id) + "'");
}

namespace {

std::optional<std::string> optional_string(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw Error(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

std::vector<std::string> string_array(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return {};
    if (!it->is_array()) throw Error(std::string("field '") + key + "' must be an array");
    std::vector<std::string> out;
    for (const auto& v : *it) {
        if (!v.is_string()) throw Error(std::string("field '") + key + "' must hold strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

ProfileRecord record_from_json(const json& obj, Network network, const std::string& source,
                               std::size_t line) {
    if (!obj.is_object()) throw ParseError(source, line, "expected a JSON object");
    ProfileRecord p;
    p.network = network;
    try {
        auto id = optional_string(obj, "id");
        if (!id || id->empty()) {
            throw MissingFieldError(source + ":" + std::to_string(line) +
                                    ": missing required field 'id'");
        }
        p.id = *id;
        auto name = optional_string(obj, "full_name");
        if (!name) {
            throw MissingFieldError(source + ":" + std::to_string(line) +
                                    ": missing required field 'full_name' (id '" + p.id + "')");
        }
        p.full_name = *name;
        if (auto g = optional_string(obj, "gender")) {
            const std::string gn = normalize_text(*g);
            if (!gn.empty()) {
                p.gender = parse_gender(gn);
                if (!p.gender) throw Error("unknown gender '" + *g + "'");
            }
        }
        p.hometown = optional_string(obj, "hometown");
        p.current_city = optional_string(obj, "current_city");
        p.current_employer = optional_string(obj, "current_employer");
        p.professional_experience = optional_string(obj, "professional_experience");
        p.education = optional_string(obj, "education");
        if (auto it = obj.find("info_fields"); it != obj.end() && !it->is_null()) {
            if (!it->is_object()) throw Error("field 'info_fields' must be an object");
            for (const auto& [key, value] : it->items()) {
                if (value.is_null()) continue;
                if (!value.is_string()) throw Error("info field '" + key + "' must be a string");
                p.info_fields[key] = value.get<std::string>();
            }
        }
        p.friend_names = string_array(obj, "friend_names");
        p.friend_of_friend_names = string_array(obj, "friend_of_friend_names");
        return normalized(std::move(p));
    } catch (const MissingFieldError& e) {
        if (std::string_view(e.what()).find(source) == 0) throw;
        throw MissingFieldError(source + ":" + std::to_string(line) + ": " + e.what());
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(source, line, e.what());
    }
}

} // namespace

ProfileCorpus parse_corpus(std::string_view jsonl, Network network, const std::string& source) {
    ProfileCorpus corpus(network);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= jsonl.size()) {
        std::size_t end = jsonl.find('\n', pos);
        if (end == std::string_view::npos) end = jsonl.size();
        std::string_view line = jsonl.substr(pos, end - pos);
        ++line_no;
        pos = end + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            if (end == jsonl.size()) break;
            continue;
        }
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(source, line_no, e.what());
        }
        ProfileRecord record = record_from_json(obj, network, source, line_no);
        if (corpus.find(record.id)) {
            throw DuplicateIdError(record.id, source + ":" + std::to_string(line_no) +
                                                  ": duplicate profile id '" + record.id + "'");
        }
        corpus.add(std::move(record));
        if (end == jsonl.size()) break;
    }
    return corpus;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

} // namespace

ProfileCorpus load_corpus(const std::filesystem::path& path, Network network) {
    return parse_corpus(read_file(path), network, path.string());
}

std::string profile_to_json_line(const ProfileRecord& p) {
    // ordered_json keeps the documented key order in the output file.
    nlohmann::ordered_json obj;
    obj["id"] = p.id;
    obj["full_name"] = p.full_name;
    if (p.gender) obj["gender"] = std::string(to_string(*p.gender));
    if (p.hometown) obj["hometown"] = *p.hometown;
    if (p.current_city) obj["current_city"] = *p.current_city;
    if (p.current_employer) obj["current_employer"] = *p.current_employer;
    if (p.professional_experience) obj["professional_experience"] = *p.professional_experience;
    if (p.education) obj["education"] = *p.education;
    obj["info_fields"] = nlohmann::ordered_json::object();
    for (const auto& [key, value] : p.info_fields) obj["info_fields"][key] = value;
    obj["friend_names"] = p.friend_names;
    obj["friend_of_friend_names"] = p.friend_of_friend_names;
    return obj.dump();
}

void save_corpus(const ProfileCorpus& corpus, const std::filesystem::path& path) {
    std::string out;
    for (const auto& p : corpus.records()) {
        out += profile_to_json_line(p);
        out += '\n';
    }
    write_file(path, out);
}

void ReferenceData::add_name_frequency(std::string_view name, std::int64_t count) {
    if (count < 0) throw ArgumentError("negative name frequency for '" + std::string(name) + "'");
    name_frequency[normalize_text(name)] += count;
}

void ReferenceData::add_location(std::string_view name, GeoPoint point) {
    if (!(point.latitude_deg >= -90.0 && point.latitude_deg <= 90.0)) {
        throw ArgumentError("latitude out of range for '" + std::string(name) + "'");
    }
    if (!(point.longitude_deg >= -180.0 && point.longitude_deg <= 180.0)) {
        throw ArgumentError("longitude out of range for '" + std::string(name) + "'");
    }
    gazetteer[normalize_text(name)] = point;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
bool parse_number(std::string_view s, T& out) {
    s = trim(s);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

template <class Fn>
void for_each_line(const std::string& text, Fn&& fn) {
    std::size_t line_no = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        fn(line_no, std::string_view(line));
    }
}

} // namespace

void load_name_frequency(ReferenceData& ref, const std::filesystem::path& path) {
    const std::string source = path.string();
    for_each_line(read_file(path), [&](std::size_t line_no, std::string_view line) {
        const auto tab = line.rfind('\t');
        if (tab == std::string_view::npos) throw ParseError(source, line_no, "expected name<TAB>count");
        std::int64_t count = 0;
        if (!parse_number(line.substr(tab + 1), count)) {
            if (line_no == 1) return; // header
            throw ParseError(source, line_no, "count is not an integer");
        }
        if (count < 0) throw ParseError(source, line_no, "count must be >= 0");
        ref.add_name_frequency(line.substr(0, tab), count);
    });
}

void load_gazetteer(ReferenceData& ref, const std::filesystem::path& path) {
    const std::string source = path.string();
    for_each_line(read_file(path), [&](std::size_t line_no, std::string_view line) {
        const auto c2 = line.rfind(',');
        const auto c1 = c2 == std::string_view::npos || c2 == 0 ? std::string_view::npos
                                                                : line.rfind(',', c2 - 1);
        if (c1 == std::string_view::npos) throw ParseError(source, line_no, "expected name,lat,lon");
        GeoPoint point;
        const bool ok = parse_number(line.substr(c1 + 1, c2 - c1 - 1), point.latitude_deg) &&
                        parse_number(line.substr(c2 + 1), point.longitude_deg);
        if (!ok) {
            if (line_no == 1) return; // header
            throw ParseError(source, line_no, "latitude/longitude are not numbers");
        }
        try {
            ref.add_location(trim(line.substr(0, c1)), point);
        } catch (const ArgumentError& e) {
            throw ParseError(source, line_no, e.what());
        }
    });
}

ReferenceData load_reference(const std::filesystem::path& dir) {
    ReferenceData ref;
    if (!std::filesystem::is_directory(dir)) {
        throw ArgumentError("reference directory '" + dir.string() + "' does not exist");
    }
    if (auto f = dir / kNameFrequencyFile; std::filesystem::exists(f)) load_name_frequency(ref, f);
    if (auto f = dir / kGazetteerFile; std::filesystem::exists(f)) load_gazetteer(ref, f);
    return ref;
}

void save_reference(const ReferenceData& ref, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::pair<std::string, std::int64_t>> names(ref.name_frequency.begin(),
                                                           ref.name_frequency.end());
    std::sort(names.begin(), names.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    std::string tsv;
    for (const auto& [name, count] : names) tsv += name + '\t' + std::to_string(count) + '\n';
    write_file(dir / kNameFrequencyFile, tsv);

    std::vector<std::pair<std::string, GeoPoint>> places(ref.gazetteer.begin(), ref.gazetteer.end());
    std::sort(places.begin(), places.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::string csv = "name,lat,lon\n";
    char buf[64];
    for (const auto& [name, point] : places) {
        csv += name;
        for (double v : {point.latitude_deg, point.longitude_deg}) {
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
            csv += ',';
            csv.append(buf, ptr);
        }
        csv += '\n';
    }
    write_file(dir / kGazetteerFile, csv);
}

} // namespace xlink
