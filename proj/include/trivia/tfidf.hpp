#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "trivia/corpus.hpp"
#include "trivia/textnorm.hpp"

namespace trivia {

// Document-frequency statistics over the IDF reference corpus.
// Immutable after build.
struct DfIndex {
    std::unordered_map<std::string, std::uint64_t> df;
    std::uint64_t n_docs = 0;
    std::uint64_t min_df = 1;
};

// Counts distinct documents per normalized term, then prunes terms with
// df < min_df. min_df of 0 is treated as 1. Throws on an empty corpus.
DfIndex build_df_index(const Corpus& corpus, std::uint64_t min_df,
                       const StopwordSet& stopwords);

struct RankedTerm {
    std::string term;
    double score;
};

// Top-K terms, descending score, ties broken by ascending term.
// Zero-score and out-of-index terms are excluded, so |terms| may be < k.
struct RankedTerms {
    std::vector<RankedTerm> terms;
    std::size_t k = 0;
};

// score(t) = tf(t) * ln(n_docs / df[t]) with raw term counts.
RankedTerms top_tfidf(const Article& article, const DfIndex& index, std::size_t k,
                      const StopwordSet& stopwords);
RankedTerms top_tfidf_tokens(const std::vector<std::string>& stems, const DfIndex& index,
                             std::size_t k);

// Binary persistence: header "TMDF1", n_docs u64 LE, min_df u64 LE,
// entry count u64 LE, then entries (u16 LE term byte-length, term bytes,
// u64 LE df). Entries are written in sorted term order so rebuilds are
// byte-identical.
void write_df_index(const DfIndex& index, const std::filesystem::path& path);
DfIndex read_df_index(const std::filesystem::path& path);

// Most frequent case-folded surface form per stem (ties broken by ascending
// surface), collected from the IDF corpus. Bridges stemmed terms back to
// embedding vocabulary words.
struct SurfaceMap {
    std::unordered_map<std::string, std::string> stem_to_surface;

    const std::string* find(const std::string& stem) const {
        auto it = stem_to_surface.find(stem);
        return it == stem_to_surface.end() ? nullptr : &it->second;
    }
};

SurfaceMap build_surface_map(const Corpus& corpus, const StopwordSet& stopwords);

} // namespace trivia
