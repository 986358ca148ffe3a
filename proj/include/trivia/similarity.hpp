#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>

#include "trivia/corpus.hpp"
#include "trivia/digest.hpp"
#include "trivia/embeddings.hpp"
#include "trivia/tfidf.hpp"

namespace trivia {

// Weighted bidirectional best-match over top-K terms: position i carries
// weight k-i+1 and the normalizer is k(k+1).
struct SimilarityConfig {
    std::size_t k = 10;

    double weight(std::size_t i) const { return static_cast<double>(k - i); } // i is 0-based
    double z() const { return static_cast<double>(k) * static_cast<double>(k + 1); }
};

// Resolves a ranked term to its embedding vector: the term itself first,
// then the most frequent surface form that stems to it.
class TermVectorLookup {
public:
    explicit TermVectorLookup(const EmbeddingStore& store, const SurfaceMap* surfaces = nullptr)
        : store_(store), surfaces_(surfaces) {}

    std::span<const float> find(const std::string& term) const;
    const EmbeddingStore& store() const { return store_; }

private:
    const EmbeddingStore& store_;
    const SurfaceMap* surfaces_;
};

// sigma(a1,a2): for each position the best word match in the other list,
// both directions sharing the positional weight; missing positions and
// fully-OOV terms contribute 0; result clamped to [-1,1]. Two empty lists
// give 0.
double article_similarity(const RankedTerms& t1, const RankedTerms& t2,
                          const TermVectorLookup& lookup, const SimilarityConfig& cfg);

// Thread-safe memo for pair similarities, keyed by the unordered id pair.
// Entries are bound to a generation tag; persistence is an explicit
// checkpoint, not per-entry.
class SimilarityCache {
public:
    explicit SimilarityCache(Digest generation_tag) : tag_(generation_tag) {}

    std::optional<double> lookup(const std::string& a, const std::string& b) const;
    double lookup_or_compute(const std::string& a, const std::string& b,
                             const std::function<double()>& compute);

    std::uint64_t hits() const { return hits_.load(); }
    std::size_t size() const;
    const Digest& generation_tag() const { return tag_; }

    // File format: "TMSC1", 32-byte generation tag, entry count u64 LE,
    // entries (u16 LE + bytes id1, u16 LE + bytes id2 with id1 < id2,
    // f64 LE sigma).
    void save(const std::filesystem::path& path) const;

    // Merges entries when the file's tag matches; a mismatched tag loads
    // nothing (values from another generation are never served). Returns the
    // number of entries adopted; a missing file counts as an empty cache.
    std::size_t load(const std::filesystem::path& path);

private:
    static std::pair<std::string, std::string> key(const std::string& a, const std::string& b);

    struct PairHash {
        std::size_t operator()(const std::pair<std::string, std::string>& p) const;
    };

    Digest tag_;
    mutable std::mutex mu_;
    std::unordered_map<std::pair<std::string, std::string>, double, PairHash> entries_;
    std::atomic<std::uint64_t> hits_{0};
};

// Article-level similarity over a corpus: precomputes each article's ranked
// terms, then serves sigma(a1,a2) through the cache when one is attached.
// sigma(a,a) is 1 by definition and never cached.
class SimilarityScorer {
public:
    SimilarityScorer(const Corpus& corpus, const DfIndex& index, const TermVectorLookup& lookup,
                     SimilarityConfig cfg, const StopwordSet& stopwords,
                     SimilarityCache* cache = nullptr);

    double score(const std::string& id1, const std::string& id2) const;
    const RankedTerms& ranked_terms(const std::string& id) const;

    std::uint64_t computed_count() const { return computed_.load(); }
    std::uint64_t empty_pair_warnings() const { return empty_pairs_.load(); }

private:
    double compute(const RankedTerms& t1, const RankedTerms& t2) const;

    const Corpus& corpus_;
    const TermVectorLookup& lookup_;
    SimilarityConfig cfg_;
    SimilarityCache* cache_;
    std::unordered_map<std::string, RankedTerms> terms_;
    mutable std::atomic<std::uint64_t> computed_{0};
    mutable std::atomic<std::uint64_t> empty_pairs_{0};
};

// Tag binding cached values to the exact inputs that produced them.
Digest make_generation_tag(const Digest& corpus_digest, const Digest& idf_digest,
                           const Digest& embeddings_digest, const Digest& stopwords_digest,
                           std::uint64_t k, std::uint64_t min_df,
                           std::string_view weighting_id);

} // namespace trivia
