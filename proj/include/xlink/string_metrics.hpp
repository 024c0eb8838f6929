#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace xlink {

// American Soundex code: one uppercase letter followed by three digits.
class SoundexCode {
public:
    // Throws ArgumentError unless `code` has the letter + 3 digits (0-6) shape.
    explicit SoundexCode(std::string_view code);

    const std::string& str() const noexcept { return code_; }
    char operator[](std::size_t i) const { return code_[i]; }

    bool operator==(const SoundexCode&) const = default;

private:
    std::string code_;
};

// Encodes the ASCII letters of `s`; other characters are skipped.
// Throws EncodingError when `s` has no ASCII letter.
SoundexCode soundex_encode(std::string_view s);

// Similarity functions. Unless noted, strings are compared code point by code
// point and the result lies in [0, 1].

// 1 when the Soundex codes agree, else 0.
double soundex_sim(std::string_view a, std::string_view b);

// Position-wise agreement of the two Soundex codes, divided by 4.
double difference_sim(std::string_view a, std::string_view b);

// Repeatedly removes the longest common substring (length >= min_length) and
// divides the total removed length by the mean input length.
double lcs_sim(std::string_view a, std::string_view b, std::size_t min_length = 2);

// Total length removed by the repeated longest-common-substring procedure.
std::size_t lcs_common_length(std::string_view a, std::string_view b, std::size_t min_length = 2);

// 1 - NCD under zlib DEFLATE at kCompressionLevel, clamped to [0, 1].
double ncd_sim(std::string_view a, std::string_view b);
inline constexpr int kCompressionLevel = 9;
// Compressed size in bytes (zlib stream) at kCompressionLevel.
std::size_t compressed_size(std::string_view s);

// Unrestricted Damerau-Levenshtein distance (insert, delete, substitute,
// adjacent transposition; transposed characters may be edited again).
std::size_t damerau_levenshtein_distance(std::string_view a, std::string_view b);
// Optimal string alignment: like the above, but no substring is edited twice.
std::size_t osa_distance(std::string_view a, std::string_view b);
std::size_t levenshtein_distance(std::string_view a, std::string_view b);
// 1 - distance / max length; both empty gives 1.
double damerau_levenshtein_sim(std::string_view a, std::string_view b);

double jaro_sim(std::string_view a, std::string_view b);
// Jaro plus a 0.1 per-character bonus for up to four shared leading characters.
double jaro_winkler_sim(std::string_view a, std::string_view b);

enum class NgramDenominator {
    longer,  // grams of the longer string (default)
    jaccard, // union of both gram sets
    overlap, // grams of the shorter string
    average, // mean gram count
};

// Distinct, unpadded n-gram sets. Throws ArgumentError for n < 1.
double ngram_sim(std::string_view a, std::string_view b, std::size_t n,
                 NgramDenominator mode = NgramDenominator::longer);

// Multi-word name comparison: tokens are aligned one-to-one greedily by
// Jaro-Winkler score; the aligned scores are summed and divided by the larger
// token count. Handles swapped and partially missing name parts.
double vmn_sim(std::string_view a, std::string_view b);

// Token-set Jaccard; both empty gives 1.
double jaccard_tokens(std::string_view a, std::string_view b);

// Cosine of raw term-frequency vectors; a zero vector gives 0.
double cosine_tf(std::string_view a, std::string_view b);

// Immutable IDF table over one corpus of documents:
// idf(t) = ln(N / (1 + df(t))) + 1.
class TfIdfIndex {
public:
    // Throws ArgumentError for an empty corpus.
    explicit TfIdfIndex(const std::vector<std::string>& documents);

    double idf(const std::string& term) const;
    std::size_t document_count() const noexcept { return n_documents_; }

    // Cosine between TF-IDF vectors of `query` and `doc`, weighted by this corpus.
    double cosine(std::string_view query, std::string_view doc) const;

private:
    std::size_t n_documents_;
    std::unordered_map<std::string, std::size_t> document_frequency_;
};

double cosine_tfidf(std::string_view query, std::string_view doc,
                    const std::vector<std::string>& corpus_texts);

} // namespace xlink
