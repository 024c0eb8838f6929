#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace xlink {

enum class Network { S1, S2 };

enum class Gender { male, female, other };

std::string_view to_string(Network n);
Network parse_network(std::string_view s);
std::string_view to_string(Gender g);
std::optional<Gender> parse_gender(std::string_view normalized);

// One public profile. All text is stored normalized (see normalize_text).
// Absent optional fields stay std::nullopt, never "".
struct ProfileRecord {
    std::string id;
    Network network = Network::S1;
    std::string full_name;
    std::optional<Gender> gender;
    std::optional<std::string> hometown;
    std::optional<std::string> current_city;
    std::optional<std::string> current_employer;
    std::optional<std::string> professional_experience;
    std::optional<std::string> education;
    std::map<std::string, std::string> info_fields;
    std::vector<std::string> friend_names;
    std::vector<std::string> friend_of_friend_names;

    bool operator==(const ProfileRecord&) const = default;
};

// Gender, hometown, current city, employer, then info_fields in key order.
// Excludes the name, experience and education.
std::string aggregate_info_text(const ProfileRecord& p);

// aggregate_info_text + experience + education. Never includes the name.
std::string full_profile_text(const ProfileRecord& p);

// Applies normalize_text to every field and enforces the record invariants.
// Empty optional fields collapse to absent; the friend-of-friend list is
// deduplicated preserving first occurrence.
ProfileRecord normalized(ProfileRecord p);

class ProfileCorpus {
public:
    explicit ProfileCorpus(Network network) : network_(network) {}

    // Throws DuplicateIdError on a repeated id and ArgumentError on a network mismatch.
    void add(ProfileRecord record);

    Network network() const noexcept { return network_; }
    const std::vector<ProfileRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }

    const ProfileRecord* find(std::string_view id) const;
    const ProfileRecord& at(std::string_view id) const;

    bool operator==(const ProfileCorpus& other) const {
        return network_ == other.network_ && records_ == other.records_;
    }

private:
    Network network_;
    std::vector<ProfileRecord> records_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

// One profile per line. Parse errors carry the line number.
ProfileCorpus load_corpus(const std::filesystem::path& path, Network network);
ProfileCorpus parse_corpus(std::string_view jsonl, Network network,
                           const std::string& source = "<memory>");
std::string profile_to_json_line(const ProfileRecord& p);
void save_corpus(const ProfileCorpus& corpus, const std::filesystem::path& path);

struct GeoPoint {
    double latitude_deg = 0.0;
    double longitude_deg = 0.0;
};

// Shared lookup tables: full-name frequencies and a local gazetteer.
// Keys are normalized.
struct ReferenceData {
    std::unordered_map<std::string, std::int64_t> name_frequency;
    std::unordered_map<std::string, GeoPoint> gazetteer;

    void add_name_frequency(std::string_view name, std::int64_t count);
    void add_location(std::string_view name, GeoPoint point);
};

// TSV `name<TAB>count`.
void load_name_frequency(ReferenceData& ref, const std::filesystem::path& path);
// CSV `name,lat,lon`, optional header.
void load_gazetteer(ReferenceData& ref, const std::filesystem::path& path);
// Reads name_frequency.tsv and gazetteer.csv from `dir`; each is optional.
ReferenceData load_reference(const std::filesystem::path& dir);
void save_reference(const ReferenceData& ref, const std::filesystem::path& dir);

inline constexpr std::string_view kNameFrequencyFile = "name_frequency.tsv";
inline constexpr std::string_view kGazetteerFile = "gazetteer.csv";

} // namespace xlink
