#include "xlink/string_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include <zlib.h>

#include "xlink/error.hpp"
#include "xlink/text.hpp"

namespace xlink {

// ---------------------------------------------------------------- Soundex

SoundexCode::SoundexCode(std::string_view code) : code_(code) {
    const bool ok = code.size() == 4 && code[0] >= 'A' && code[0] <= 'Z' &&
                    std::all_of(code.begin() + 1, code.end(),
                                [](char c) { return c >= '0' && c <= '6'; });
    if (!ok) throw ArgumentError("malformed Soundex code '" + std::string(code) + "'");
}

namespace {

// 0 for vowels (and Y), -1 for H/W which are transparent.
int soundex_digit(char upper) {
    switch (upper) {
    case 'B': case 'F': case 'P': case 'V': return 1;
    case 'C': case 'G': case 'J': case 'K': case 'Q': case 'S': case 'X': case 'Z': return 2;
    case 'D': case 'T': return 3;
    case 'L': return 4;
    case 'M': case 'N': return 5;
    case 'R': return 6;
    case 'H': case 'W': return -1;
    default: return 0;
    }
}

} // namespace

SoundexCode soundex_encode(std::string_view s) {
    std::string code;
    int last = 0;
    for (char ch : s) {
        const char c = (ch >= 'a' && ch <= 'z') ? static_cast<char>(ch - 'a' + 'A') : ch;
        if (c < 'A' || c > 'Z') continue;
        const int d = soundex_digit(c);
        if (code.empty()) {
            code.push_back(c);
            last = d < 0 ? 0 : d;
            continue;
        }
        if (d < 0) continue; // H and W do not separate equal codes
        if (d == 0) {
            last = 0;
            continue;
        }
        if (d != last) {
            if (code.size() < 4) code.push_back(static_cast<char>('0' + d));
            last = d;
        }
    }
    if (code.empty()) {
        throw EncodingError("cannot Soundex-encode '" + std::string(s) + "': no ASCII letter");
    }
    code.resize(4, '0');
    return SoundexCode(code);
}

double soundex_sim(std::string_view a, std::string_view b) {
    return soundex_encode(a) == soundex_encode(b) ? 1.0 : 0.0;
}

double difference_sim(std::string_view a, std::string_view b) {
    const SoundexCode ca = soundex_encode(a);
    const SoundexCode cb = soundex_encode(b);
    int same = 0;
    for (std::size_t i = 0; i < 4; ++i) same += ca[i] == cb[i];
    return same / 4.0;
}

// ---------------------------------------------------------------- LCS

namespace {

// Markers that replace removed characters; they match nothing, not even each other.
constexpr char32_t kRemovedA = 0x110000;
constexpr char32_t kRemovedB = 0x110001;

struct CommonRun {
    std::size_t length = 0;
    std::size_t start_a = 0;
    std::size_t start_b = 0;
};

// Longest common substring, ties broken by earliest start in a, then in b.
CommonRun longest_common_run(const std::u32string& a, const std::u32string& b) {
    CommonRun best;
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1] && a[i - 1] != kRemovedA && a[i - 1] != kRemovedB) {
                cur[j] = prev[j - 1] + 1;
                const std::size_t len = cur[j];
                const std::size_t sa = i - len;
                const std::size_t sb = j - len;
                if (len > best.length ||
                    (len == best.length && std::tie(sa, sb) < std::tie(best.start_a, best.start_b))) {
                    best = {len, sa, sb};
                }
            } else {
                cur[j] = 0;
            }
        }
        std::swap(prev, cur);
    }
    return best;
}

// Orders the arguments canonically so symmetric metrics stay exactly symmetric
// under deterministic tie-breaking.
std::pair<std::u32string, std::u32string> canonical_pair(std::string_view a, std::string_view b) {
    std::u32string ua = to_code_points(a);
    std::u32string ub = to_code_points(b);
    if (ub < ua) std::swap(ua, ub);
    return {std::move(ua), std::move(ub)};
}

} // namespace

std::size_t lcs_common_length(std::string_view a, std::string_view b, std::size_t min_length) {
    if (min_length == 0) throw ArgumentError("LCS minimum length must be >= 1");
    auto [ua, ub] = canonical_pair(a, b);
    std::size_t total = 0;
    for (;;) {
        const CommonRun run = longest_common_run(ua, ub);
        if (run.length < min_length) break;
        total += run.length;
        std::fill_n(ua.begin() + static_cast<std::ptrdiff_t>(run.start_a), run.length, kRemovedA);
        std::fill_n(ub.begin() + static_cast<std::ptrdiff_t>(run.start_b), run.length, kRemovedB);
    }
    return total;
}

double lcs_sim(std::string_view a, std::string_view b, std::size_t min_length) {
    const std::size_t la = to_code_points(a).size();
    const std::size_t lb = to_code_points(b).size();
    if (la == 0 || lb == 0) return 0.0;
    const double mean = (static_cast<double>(la) + static_cast<double>(lb)) / 2.0;
    return static_cast<double>(lcs_common_length(a, b, min_length)) / mean;
}

// ---------------------------------------------------------------- compression

std::size_t compressed_size(std::string_view s) {
    uLongf size = compressBound(static_cast<uLong>(s.size()));
    std::vector<Bytef> buffer(size);
    const int rc = compress2(buffer.data(), &size, reinterpret_cast<const Bytef*>(s.data()),
                             static_cast<uLong>(s.size()), kCompressionLevel);
    if (rc != Z_OK) throw Error("zlib compression failed");
    return static_cast<std::size_t>(size);
}

double ncd_sim(std::string_view a, std::string_view b) {
    if (a.empty() && b.empty()) return 1.0;
    // Concatenate in canonical order so the score does not depend on argument order.
    const std::string_view first = std::min(a, b);
    const std::string_view second = std::max(a, b);
    std::string joined;
    joined.reserve(a.size() + b.size());
    joined.append(first).append(second);
    const double ca = static_cast<double>(compressed_size(a));
    const double cb = static_cast<double>(compressed_size(b));
    const double cab = static_cast<double>(compressed_size(joined));
    const double ncd = (cab - std::min(ca, cb)) / std::max(ca, cb);
    return std::clamp(1.0 - ncd, 0.0, 1.0);
}

// ---------------------------------------------------------------- edit distances

std::size_t levenshtein_distance(std::string_view a_utf8, std::string_view b_utf8) {
    const std::u32string a = to_code_points(a_utf8);
    const std::u32string b = to_code_points(b_utf8);
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::size_t osa_distance(std::string_view a_utf8, std::string_view b_utf8) {
    const std::u32string a = to_code_points(a_utf8);
    const std::u32string b = to_code_points(b_utf8);
    const std::size_t la = a.size(), lb = b.size();
    std::vector<std::vector<std::size_t>> d(la + 1, std::vector<std::size_t>(lb + 1));
    for (std::size_t i = 0; i <= la; ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= lb; ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= la; ++i) {
        for (std::size_t j = 1; j <= lb; ++j) {
            const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost});
            if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
                d[i][j] = std::min(d[i][j], d[i - 2][j - 2] + 1);
            }
        }
    }
    return d[la][lb];
}

std::size_t damerau_levenshtein_distance(std::string_view a_utf8, std::string_view b_utf8) {
    // Lowrance-Wagner with unit costs.
    const std::u32string a = to_code_points(a_utf8);
    const std::u32string b = to_code_points(b_utf8);
    const std::size_t la = a.size(), lb = b.size();
    const std::size_t inf = la + lb;
    std::vector<std::vector<std::size_t>> h(la + 2, std::vector<std::size_t>(lb + 2, 0));
    h[0][0] = inf;
    for (std::size_t i = 0; i <= la; ++i) {
        h[i + 1][0] = inf;
        h[i + 1][1] = i;
    }
    for (std::size_t j = 0; j <= lb; ++j) {
        h[0][j + 1] = inf;
        h[1][j + 1] = j;
    }
    std::map<char32_t, std::size_t> last_row;
    for (std::size_t i = 1; i <= la; ++i) {
        std::size_t last_match_col = 0;
        for (std::size_t j = 1; j <= lb; ++j) {
            const auto it = last_row.find(b[j - 1]);
            const std::size_t i1 = it == last_row.end() ? 0 : it->second;
            const std::size_t j1 = last_match_col;
            std::size_t cost = 1;
            if (a[i - 1] == b[j - 1]) {
                cost = 0;
                last_match_col = j;
            }
            h[i + 1][j + 1] = std::min({h[i][j] + cost, h[i + 1][j] + 1, h[i][j + 1] + 1,
                                        h[i1][j1] + (i - i1 - 1) + 1 + (j - j1 - 1)});
        }
        last_row[a[i - 1]] = i;
    }
    return h[la + 1][lb + 1];
}

double damerau_levenshtein_sim(std::string_view a, std::string_view b) {
    const std::size_t longest = std::max(to_code_points(a).size(), to_code_points(b).size());
    if (longest == 0) return 1.0;
    return 1.0 - static_cast<double>(damerau_levenshtein_distance(a, b)) /
                     static_cast<double>(longest);
}

// ---------------------------------------------------------------- Jaro-Winkler

namespace {

double jaro_code_points(const std::u32string& a, const std::u32string& b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    const std::size_t longest = std::max(a.size(), b.size());
    const std::size_t window = longest / 2 > 0 ? longest / 2 - 1 : 0;
    std::vector<bool> matched_a(a.size(), false), matched_b(b.size(), false);
    std::size_t m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::size_t lo = i > window ? i - window : 0;
        const std::size_t hi = std::min(b.size(), i + window + 1);
        for (std::size_t j = lo; j < hi; ++j) {
            if (!matched_b[j] && a[i] == b[j]) {
                matched_a[i] = matched_b[j] = true;
                ++m;
                break;
            }
        }
    }
    if (m == 0) return 0.0;
    std::size_t half_transpositions = 0;
    for (std::size_t i = 0, j = 0; i < a.size(); ++i) {
        if (!matched_a[i]) continue;
        while (!matched_b[j]) ++j;
        if (a[i] != b[j]) ++half_transpositions;
        ++j;
    }
    const double md = static_cast<double>(m);
    const double t = static_cast<double>(half_transpositions) / 2.0;
    return (md / static_cast<double>(a.size()) + md / static_cast<double>(b.size()) + (md - t) / md) /
           3.0;
}

double jaro_winkler_code_points(const std::u32string& a, const std::u32string& b) {
    const double jaro = jaro_code_points(a, b);
    std::size_t prefix = 0;
    while (prefix < 4 && prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
    return jaro + static_cast<double>(prefix) * 0.1 * (1.0 - jaro);
}

} // namespace

double jaro_sim(std::string_view a, std::string_view b) {
    auto [ua, ub] = canonical_pair(a, b);
    return jaro_code_points(ua, ub);
}

double jaro_winkler_sim(std::string_view a, std::string_view b) {
    auto [ua, ub] = canonical_pair(a, b);
    return jaro_winkler_code_points(ua, ub);
}

// ---------------------------------------------------------------- n-grams

namespace {

std::set<std::u32string> gram_set(const std::u32string& s, std::size_t n) {
    std::set<std::u32string> grams;
    if (s.size() < n) return grams;
    for (std::size_t i = 0; i + n <= s.size(); ++i) grams.insert(s.substr(i, n));
    return grams;
}

} // namespace

double ngram_sim(std::string_view a, std::string_view b, std::size_t n, NgramDenominator mode) {
    if (n < 1) throw ArgumentError("n-gram size must be >= 1");
    const std::u32string ua = to_code_points(a);
    const std::u32string ub = to_code_points(b);
    const auto ga = gram_set(ua, n);
    const auto gb = gram_set(ub, n);
    if (ga.empty() && gb.empty()) return ua == ub ? 1.0 : 0.0;
    std::size_t common = 0;
    for (const auto& g : ga) common += gb.count(g);
    double denom = 0.0;
    switch (mode) {
    case NgramDenominator::longer:
        denom = static_cast<double>(std::max(ga.size(), gb.size()));
        break;
    case NgramDenominator::jaccard:
        denom = static_cast<double>(ga.size() + gb.size() - common);
        break;
    case NgramDenominator::overlap:
        denom = static_cast<double>(std::min(ga.size(), gb.size()));
        break;
    case NgramDenominator::average:
        denom = (static_cast<double>(ga.size()) + static_cast<double>(gb.size())) / 2.0;
        break;
    }
    return denom > 0.0 ? static_cast<double>(common) / denom : 0.0;
}

// ---------------------------------------------------------------- VMN

double vmn_sim(std::string_view a, std::string_view b) {
    std::vector<std::string> ta = tokenize(a);
    std::vector<std::string> tb = tokenize(b);
    if (tb < ta) std::swap(ta, tb);
    if (ta.empty() && tb.empty()) return 1.0;
    if (ta.empty() || tb.empty()) return 0.0;

    std::vector<std::u32string> ca, cb;
    for (const auto& t : ta) ca.push_back(to_code_points(t));
    for (const auto& t : tb) cb.push_back(to_code_points(t));

    struct Candidate {
        double score;
        std::size_t i, j;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(ca.size() * cb.size());
    for (std::size_t i = 0; i < ca.size(); ++i) {
        for (std::size_t j = 0; j < cb.size(); ++j) {
            candidates.push_back({jaro_winkler_code_points(ca[i], cb[j]), i, j});
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& x, const Candidate& y) { return x.score > y.score; });

    std::vector<bool> used_a(ca.size(), false), used_b(cb.size(), false);
    double total = 0.0;
    for (const auto& c : candidates) {
        if (used_a[c.i] || used_b[c.j]) continue;
        used_a[c.i] = used_b[c.j] = true;
        total += c.score;
    }
    return total / static_cast<double>(std::max(ca.size(), cb.size()));
}

// ---------------------------------------------------------------- token metrics

double jaccard_tokens(std::string_view a, std::string_view b) {
    const auto va = tokenize(a);
    const auto vb = tokenize(b);
    const std::set<std::string> sa(va.begin(), va.end());
    const std::set<std::string> sb(vb.begin(), vb.end());
    if (sa.empty() && sb.empty()) return 1.0;
    std::size_t common = 0;
    for (const auto& t : sa) common += sb.count(t);
    return static_cast<double>(common) / static_cast<double>(sa.size() + sb.size() - common);
}

namespace {

std::map<std::string, double> term_frequencies(std::string_view text) {
    std::map<std::string, double> tf;
    for (auto& t : tokenize(text)) tf[std::move(t)] += 1.0;
    return tf;
}

double cosine(const std::map<std::string, double>& x, const std::map<std::string, double>& y) {
    double dot = 0.0, nx = 0.0, ny = 0.0;
    for (const auto& [term, w] : x) {
        nx += w * w;
        if (auto it = y.find(term); it != y.end()) dot += w * it->second;
    }
    for (const auto& [term, w] : y) ny += w * w;
    if (nx == 0.0 || ny == 0.0) return 0.0;
    return std::clamp(dot / std::sqrt(nx * ny), 0.0, 1.0);
}

} // namespace

double cosine_tf(std::string_view a, std::string_view b) {
    const auto ta = term_frequencies(a);
    const auto tb = term_frequencies(b);
    // Evaluate from the canonical side so the floating-point sums match when swapped.
    return ta <= tb ? cosine(ta, tb) : cosine(tb, ta);
}

TfIdfIndex::TfIdfIndex(const std::vector<std::string>& documents) : n_documents_(documents.size()) {
    if (documents.empty()) throw ArgumentError("TF-IDF corpus is empty");
    for (const auto& doc : documents) {
        const auto tokens = tokenize(doc);
        const std::set<std::string> distinct(tokens.begin(), tokens.end());
        for (const auto& t : distinct) ++document_frequency_[t];
    }
}

double TfIdfIndex::idf(const std::string& term) const {
    const auto it = document_frequency_.find(term);
    const double df = it == document_frequency_.end() ? 0.0 : static_cast<double>(it->second);
    return std::log(static_cast<double>(n_documents_) / (1.0 + df)) + 1.0;
}

double TfIdfIndex::cosine(std::string_view query, std::string_view doc) const {
    auto q = term_frequencies(query);
    auto d = term_frequencies(doc);
    for (auto& [term, w] : q) w *= idf(term);
    for (auto& [term, w] : d) w *= idf(term);
    return xlink::cosine(q, d);
}

double cosine_tfidf(std::string_view query, std::string_view doc,
                    const std::vector<std::string>& corpus_texts) {
    return TfIdfIndex(corpus_texts).cosine(query, doc);
}

} // namespace xlink
