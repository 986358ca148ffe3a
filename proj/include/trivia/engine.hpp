#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trivia/corpus.hpp"
#include "trivia/similarity.hpp"

namespace trivia {

struct CategoryScore {
    std::string category;
    double surprise = 0.0;     // +inf sentinel when sigma(a,C) <= 0
    double cohesiveness = 0.0; // mean pairwise similarity of the (sampled) members
    double trivia = 0.0;       // cohesiveness / sigma(a,C)
    bool sampled = false;
    std::size_t sample_size = 0;

    bool degenerate() const { return std::isinf(surprise); }
};

struct EngineConfig {
    std::size_t sample_cap = 50;
    std::uint64_t rng_seed = 0;
    std::size_t min_category_size = 2;
    std::optional<double> trivia_threshold;
    std::size_t workers = 1;
};

struct TriviaReport {
    std::vector<CategoryScore> scores;
    std::vector<std::string> warnings;
};

// Everything explain_category needs to score text snippets against the
// category title.
struct TextScoringContext {
    const DfIndex& index;
    const StopwordSet& stopwords;
    const TermVectorLookup& lookup;
    SimilarityConfig sim;
};

struct ExplainResult {
    std::size_t paragraph_index = 0;
    double score = 0.0;
};

// Deterministic sample: the full member list when |C| <= cap, otherwise the
// target plus cap-1 draws without replacement, seeded by (seed, category
// name). Result is sorted ascending.
std::vector<std::string> sample_members(const Category& category, std::size_t cap,
                                        std::uint64_t seed, const std::string& target);
std::vector<std::string> sample_members(const Category& category, std::size_t cap,
                                        std::uint64_t seed);

using SimilarityFn = std::function<double(const std::string&, const std::string&)>;

// Surprise, cohesiveness and trivia scoring over a corpus. All shared state
// is immutable; categories are scored independently, so parallel schedules
// cannot change results.
class TriviaEngine {
public:
    TriviaEngine(const Corpus& corpus, SimilarityFn similarity, EngineConfig cfg);

    // (surprise, sigma(a,C)); surprise is +inf when sigma(a,C) <= 0.
    std::pair<double, double> surprise(const std::string& article_id,
                                       const std::string& category) const;

    double cohesiveness(const std::string& category) const;

    CategoryScore score_category(const std::string& article_id,
                                 const std::string& category) const;

    // Every scorable category of the article, sorted by trivia descending,
    // ties by ascending name; degenerate (infinite-surprise) entries last.
    TriviaReport top_trivia(const std::string& article_id) const;

    // Members ranked by surprise w.r.t. the category, descending.
    std::vector<std::pair<std::string, double>> rank_members_by_surprise(
        const std::string& category) const;

    // The paragraph whose top terms best match the category title under the
    // article-similarity formula; ties go to the lowest index.
    ExplainResult explain_category(const std::string& article_id, const std::string& category,
                                   const TextScoringContext& ctx) const;

    const EngineConfig& config() const { return cfg_; }

private:
    std::vector<std::string> scoring_sample(const Category& category,
                                            const std::string& target) const;
    CategoryScore score_sample(const std::string& article_id, const Category& category,
                               const std::vector<std::string>& sample) const;

    const Corpus& corpus_;
    SimilarityFn similarity_;
    EngineConfig cfg_;
};

} // namespace trivia
