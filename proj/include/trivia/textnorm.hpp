#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace trivia {

using StopwordSet = std::unordered_set<std::string>;

// One word per line, lowercase, `#` starts a comment.
StopwordSet load_stopwords(const std::filesystem::path& path);

// The bundled English list (identical to data/stopwords_en.txt).
const StopwordSet& default_stopwords();

struct NormalizedToken {
    std::string surface; // case-folded, pre-stemming
    std::string stem;
};

// Pipeline: tokenize -> case-fold -> stopword-filter -> stem.
// Tokens are maximal runs of alphanumeric code points; purely numeric tokens
// are kept; the stemmer applies only to all-ASCII-letter tokens.
std::vector<NormalizedToken> normalize_tokens(std::string_view text,
                                              const StopwordSet& stopwords);

// Stems only (the TokenStream).
std::vector<std::string> normalize(std::string_view text, const StopwordSet& stopwords);

// Full Unicode lowercase (simple 1:1 mappings), UTF-8 in and out.
std::string fold_case(std::string_view text);

} // namespace trivia
