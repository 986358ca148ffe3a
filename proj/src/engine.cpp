#include "trivia/engine.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

#include "trivia/error.hpp"
#include "trivia/tfidf.hpp"

namespace trivia {
namespace {

std::uint64_t fnv1a64(std::uint64_t seed, std::string_view name) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    auto mix = [&](unsigned char byte) {
        h ^= byte;
        h *= 0x100000001B3ULL;
    };
    for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(seed >> (8 * i)));
    for (char c : name) mix(static_cast<unsigned char>(c));
    return h;
}

// Unbiased draw in [0, n) by rejection; avoids modulo bias so the sample is
// reproducible from the raw engine stream alone.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        std::uint64_t r = rng();
        if (r >= threshold) return r % n;
    }
}

std::vector<std::string> draw_without_replacement(std::vector<std::string> pool,
                                                  std::size_t draws, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < draws; ++i) {
        std::size_t j = i + static_cast<std::size_t>(bounded(rng, pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(draws);
    std::sort(pool.begin(), pool.end());
    return pool;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

std::vector<std::string> sample_members(const Category& category, std::size_t cap,
                                        std::uint64_t seed, const std::string& target) {
    if (category.members.size() <= cap) return category.members;

    std::vector<std::string> pool;
    pool.reserve(category.members.size() - 1);
    for (const auto& m : category.members) {
        if (m != target) pool.push_back(m);
    }
    auto sample = draw_without_replacement(std::move(pool), cap - 1,
                                           fnv1a64(seed, category.name));
    sample.push_back(target);
    std::sort(sample.begin(), sample.end());
    return sample;
}

std::vector<std::string> sample_members(const Category& category, std::size_t cap,
                                        std::uint64_t seed) {
    if (category.members.size() <= cap) return category.members;
    return draw_without_replacement(category.members, cap, fnv1a64(seed, category.name));
}

TriviaEngine::TriviaEngine(const Corpus& corpus, SimilarityFn similarity, EngineConfig cfg)
    : corpus_(corpus), similarity_(std::move(similarity)), cfg_(cfg) {
    if (cfg_.sample_cap < 2) {
        throw Error(ErrorKind::config, "sample cap must be at least 2");
    }
    if (cfg_.min_category_size < 2) {
        throw Error(ErrorKind::config, "minimum category size must be at least 2");
    }
    if (cfg_.workers < 1) {
        throw Error(ErrorKind::config, "worker count must be at least 1");
    }
}

std::vector<std::string> TriviaEngine::scoring_sample(const Category& category,
                                                      const std::string& target) const {
    return sample_members(category, cfg_.sample_cap, cfg_.rng_seed, target);
}

std::pair<double, double> TriviaEngine::surprise(const std::string& article_id,
                                                 const std::string& category) const {
    const Category& cat = corpus_.category_at(category);
    if (!cat.contains(article_id)) {
        throw Error(ErrorKind::lookup,
                    "article '" + article_id + "' is not a member of category '" + category + "'");
    }
    if (cat.members.size() < 2) {
        throw Error(ErrorKind::config,
                    "category '" + category + "' has a single member; nothing to compare against");
    }

    auto sample = scoring_sample(cat, article_id);
    double sum = 0.0;
    std::size_t others = 0;
    for (const auto& m : sample) {
        if (m == article_id) continue;
        sum += similarity_(article_id, m);
        ++others;
    }
    double sigma = sum / static_cast<double>(others);
    return {sigma > 0.0 ? 1.0 / sigma : kInf, sigma};
}

double TriviaEngine::cohesiveness(const std::string& category) const {
    const Category& cat = corpus_.category_at(category);
    if (cat.members.size() < 2) {
        throw Error(ErrorKind::config,
                    "category '" + category + "' has a single member; nothing to compare against");
    }
    auto sample = sample_members(cat, cfg_.sample_cap, cfg_.rng_seed);
    double sum = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        for (std::size_t j = i + 1; j < sample.size(); ++j) {
            sum += similarity_(sample[i], sample[j]);
        }
    }
    std::size_t pairs = sample.size() * (sample.size() - 1) / 2;
    return sum / static_cast<double>(pairs);
}

CategoryScore TriviaEngine::score_sample(const std::string& article_id, const Category& category,
                                         const std::vector<std::string>& sample) const {
    double target_sum = 0.0;
    std::size_t others = 0;
    double pair_sum = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        for (std::size_t j = i + 1; j < sample.size(); ++j) {
            double s = similarity_(sample[i], sample[j]);
            pair_sum += s;
            if (sample[i] == article_id || sample[j] == article_id) {
                target_sum += s;
                ++others;
            }
        }
    }

    CategoryScore score;
    score.category = category.name;
    score.sampled = sample.size() < category.members.size();
    score.sample_size = sample.size();
    std::size_t pairs = sample.size() * (sample.size() - 1) / 2;
    score.cohesiveness = pair_sum / static_cast<double>(pairs);
    double sigma = target_sum / static_cast<double>(others);
    if (sigma > 0.0) {
        score.surprise = 1.0 / sigma;
        score.trivia = score.cohesiveness / sigma;
    } else {
        score.surprise = kInf;
        score.trivia = kInf;
    }
    return score;
}

CategoryScore TriviaEngine::score_category(const std::string& article_id,
                                           const std::string& category) const {
    const Category& cat = corpus_.category_at(category);
    if (!cat.contains(article_id)) {
        throw Error(ErrorKind::lookup,
                    "article '" + article_id + "' is not a member of category '" + category + "'");
    }
    if (cat.members.size() < 2) {
        throw Error(ErrorKind::config,
                    "category '" + category + "' has a single member; nothing to compare against");
    }
    return score_sample(article_id, cat, scoring_sample(cat, article_id));
}

TriviaReport TriviaEngine::top_trivia(const std::string& article_id) const {
    const Article& article = corpus_.at(article_id);

    TriviaReport report;
    std::vector<std::string> scorable;
    std::vector<std::string> names(article.categories);
    std::sort(names.begin(), names.end());
    for (const auto& name : names) {
        const Category& cat = corpus_.category_at(name);
        if (cat.members.size() < cfg_.min_category_size) {
            report.warnings.push_back("category '" + name + "' skipped: " +
                                      std::to_string(cat.members.size()) + " member(s), minimum " +
                                      std::to_string(cfg_.min_category_size));
            continue;
        }
        scorable.push_back(name);
    }
    if (scorable.empty()) {
        report.warnings.push_back("article '" + article_id + "' has no scorable category");
        return report;
    }

    // Slot-indexed results keep the outcome independent of which worker
    // scores which category.
    std::vector<CategoryScore> scores(scorable.size());
    if (cfg_.workers <= 1 || scorable.size() <= 1) {
        for (std::size_t i = 0; i < scorable.size(); ++i) {
            scores[i] = score_category(article_id, scorable[i]);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mu;
        auto work = [&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= scorable.size()) return;
                try {
                    scores[i] = score_category(article_id, scorable[i]);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        std::size_t n_threads = std::min(cfg_.workers, scorable.size());
        std::vector<std::thread> threads;
        threads.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(work);
        for (auto& t : threads) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    std::sort(scores.begin(), scores.end(), [](const CategoryScore& a, const CategoryScore& b) {
        if (a.degenerate() != b.degenerate()) return !a.degenerate();
        if (!a.degenerate() && a.trivia != b.trivia) return a.trivia > b.trivia;
        return a.category < b.category;
    });
    if (cfg_.trivia_threshold) {
        std::erase_if(scores, [&](const CategoryScore& s) {
            return !s.degenerate() && s.trivia < *cfg_.trivia_threshold;
        });
    }
    report.scores = std::move(scores);
    return report;
}

std::vector<std::pair<std::string, double>> TriviaEngine::rank_members_by_surprise(
    const std::string& category) const {
    const Category& cat = corpus_.category_at(category);
    if (cat.members.size() < 2) {
        throw Error(ErrorKind::config,
                    "category '" + category + "' has a single member; nothing to compare against");
    }
    std::vector<std::pair<std::string, double>> ranked;
    ranked.reserve(cat.members.size());
    for (const auto& m : cat.members) {
        ranked.emplace_back(m, surprise(m, category).first);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return ranked;
}

ExplainResult TriviaEngine::explain_category(const std::string& article_id,
                                             const std::string& category,
                                             const TextScoringContext& ctx) const {
    const Article& article = corpus_.at(article_id);
    if (article.paragraphs.empty()) {
        throw Error(ErrorKind::input, "article '" + article_id + "' has no paragraphs");
    }

    RankedTerms title_terms =
        top_tfidf_tokens(normalize(category, ctx.stopwords), ctx.index, ctx.sim.k);

    bool any_vocab = false;
    ExplainResult best;
    bool have_best = false;
    for (std::size_t p = 0; p < article.paragraphs.size(); ++p) {
        RankedTerms para_terms =
            top_tfidf_tokens(normalize(article.paragraphs[p], ctx.stopwords), ctx.index, ctx.sim.k);
        bool in_vocab = std::any_of(para_terms.terms.begin(), para_terms.terms.end(),
                                    [&](const RankedTerm& t) { return !ctx.lookup.find(t.term).empty(); });
        any_vocab = any_vocab || in_vocab;
        double score = article_similarity(title_terms, para_terms, ctx.lookup, ctx.sim);
        if (!have_best || score > best.score) {
            best = ExplainResult{p, score};
            have_best = true;
        }
    }
    if (!any_vocab) {
        throw Error(ErrorKind::input, "no explainable paragraph: no paragraph of '" + article_id +
                                          "' has an in-vocabulary term");
    }
    return best;
}

} // namespace trivia
