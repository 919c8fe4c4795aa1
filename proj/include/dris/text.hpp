#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dris {

/// Lowercases ASCII and splits on every non-alphanumeric codepoint. Non-ASCII
/// codepoints count as word characters except Unicode spaces and punctuation
/// blocks. No stemming, no stopwords; duplicates are kept.
std::vector<std::string> tokenize(std::string_view text);

/// First `limit` UTF-8 codepoints of `text` (invalid bytes count as one codepoint each).
std::string_view prefix_codepoints(std::string_view text, std::size_t limit);

}  // namespace dris
