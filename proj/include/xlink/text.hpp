#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace xlink {

// Canonical form used by every metric: NFC, lowercase, punctuation and
// whitespace runs folded into a single space, trimmed. Idempotent.
std::string normalize_text(std::string_view raw);

// Whitespace-separated tokens, empty tokens dropped.
std::vector<std::string> tokenize(std::string_view text);

// UTF-8 to code points; malformed sequences become U+FFFD.
std::u32string to_code_points(std::string_view utf8);

// Space-joins the non-empty parts.
std::string join_nonempty(const std::vector<std::string_view>& parts);

} // namespace xlink
