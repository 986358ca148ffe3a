// trivia-miner: rank an article's categories by how trivia-worthy they are.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "trivia/corpus.hpp"
#include "trivia/digest.hpp"
#include "trivia/embeddings.hpp"
#include "trivia/engine.hpp"
#include "trivia/error.hpp"
#include "trivia/similarity.hpp"
#include "trivia/textnorm.hpp"
#include "trivia/tfidf.hpp"

namespace {

using trivia::Error;
using trivia::ErrorKind;
using ordered_json = nlohmann::ordered_json;

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::input: return 2;
        case ErrorKind::lookup: return 3;
        case ErrorKind::config: return 4;
    }
    return 2;
}

struct RunConfig {
    std::string corpus_path;
    std::string idf_corpus_path; // empty: reuse corpus_path
    std::string embeddings_path;
    std::string embeddings_format = "text";
    std::string index_path;     // prebuilt DfIndex; empty: build from the IDF corpus
    std::string stopwords_path; // empty: bundled list
    std::string cache_path;
    std::string output = "jsonl";
    std::uint64_t k = 10;
    std::uint64_t min_df = 10;
    std::uint64_t sample_cap = 50;
    std::uint64_t seed = 0;
    std::uint64_t workers = 1;
    std::optional<double> threshold;
};

void add_common_flags(CLI::App* cmd, RunConfig& cfg, bool needs_embeddings) {
    cmd->add_option("--corpus", cfg.corpus_path, "corpus JSONL file")->required();
    cmd->add_option("--idf-corpus", cfg.idf_corpus_path,
                    "corpus used for document-frequency statistics (default: --corpus)");
    cmd->add_option("--index", cfg.index_path, "prebuilt document-frequency index file");
    cmd->add_option("--stopwords", cfg.stopwords_path, "stopword list (default: bundled English)");
    cmd->add_option("--k", cfg.k, "top terms per article (default 10)");
    cmd->add_option("--min-df", cfg.min_df, "minimum document frequency (default 10)");
    auto* emb = cmd->add_option("--embeddings", cfg.embeddings_path, "word2vec embeddings file");
    if (needs_embeddings) emb->required();
    cmd->add_option("--embeddings-format", cfg.embeddings_format, "embeddings encoding")
        ->check(CLI::IsMember({"text", "binary"}));
    cmd->add_option("--sample-cap", cfg.sample_cap, "max members scored per category (default 50)");
    cmd->add_option("--seed", cfg.seed, "base RNG seed for sampling (default 0)");
    cmd->add_option("--workers", cfg.workers, "worker threads (default 1)");
    cmd->add_option("--cache", cfg.cache_path,
                    "similarity cache file (TRIVIA_MINER_CACHE overrides)");
    cmd->add_option("--threshold", cfg.threshold, "report only trivia scores at or above this");
    cmd->add_option("--output", cfg.output, "report format")
        ->check(CLI::IsMember({"jsonl", "table"}));
}

void validate(const RunConfig& cfg) {
    if (cfg.k < 1) throw Error(ErrorKind::config, "--k must be at least 1");
    if (cfg.sample_cap < 2) throw Error(ErrorKind::config, "--sample-cap must be at least 2");
    if (cfg.workers < 1) throw Error(ErrorKind::config, "--workers must be at least 1");

    // Fail on unreadable inputs before any computation starts.
    for (const std::string* p : {&cfg.corpus_path, &cfg.idf_corpus_path, &cfg.embeddings_path,
                                 &cfg.index_path, &cfg.stopwords_path}) {
        if (p->empty()) continue;
        std::error_code ec;
        if (!std::filesystem::is_regular_file(*p, ec)) {
            throw Error(ErrorKind::input, "cannot read '" + *p + "'");
        }
    }
}

std::string effective_cache_path(const RunConfig& cfg) {
    if (const char* env = std::getenv("TRIVIA_MINER_CACHE"); env && *env) return env;
    return cfg.cache_path;
}

trivia::Digest stopword_digest(const trivia::StopwordSet& set) {
    std::vector<std::string> words(set.begin(), set.end());
    std::sort(words.begin(), words.end());
    std::string blob;
    for (const auto& w : words) {
        blob += w;
        blob += '\n';
    }
    return trivia::sha256_str(blob);
}

// Everything a scoring command needs, loaded once.
struct Pipeline {
    trivia::Corpus corpus;
    trivia::Corpus idf_corpus; // used only when distinct from corpus
    trivia::StopwordSet stopwords_storage;
    const trivia::StopwordSet* stopwords = nullptr;
    trivia::DfIndex index;
    trivia::EmbeddingStore store;
    trivia::SurfaceMap surfaces;
    std::optional<trivia::TermVectorLookup> lookup;
    std::optional<trivia::SimilarityCache> cache;
    std::optional<trivia::SimilarityScorer> scorer;
    std::string cache_path;

    trivia::EngineConfig engine_config;
    std::optional<trivia::TriviaEngine> engine;

    void checkpoint_cache() {
        if (cache && !cache_path.empty()) cache->save(cache_path);
    }
};

// Heap-allocated: the scorer and engine hold references into the pipeline,
// so its address must not change.
std::unique_ptr<Pipeline> load_pipeline(const RunConfig& cfg) {
    validate(cfg);
    auto p = std::make_unique<Pipeline>();

    p->corpus = trivia::load_corpus(cfg.corpus_path);
    for (const auto& w : p->corpus.warnings()) std::cerr << "warning: " << w << "\n";

    bool separate_idf = !cfg.idf_corpus_path.empty() && cfg.idf_corpus_path != cfg.corpus_path;
    if (separate_idf) p->idf_corpus = trivia::load_corpus(cfg.idf_corpus_path);
    const trivia::Corpus& idf_source = separate_idf ? p->idf_corpus : p->corpus;

    if (cfg.stopwords_path.empty()) {
        p->stopwords = &trivia::default_stopwords();
    } else {
        p->stopwords_storage = trivia::load_stopwords(cfg.stopwords_path);
        p->stopwords = &p->stopwords_storage;
    }

    if (!cfg.index_path.empty()) {
        p->index = trivia::read_df_index(cfg.index_path);
    } else {
        p->index = trivia::build_df_index(idf_source, cfg.min_df, *p->stopwords);
    }

    p->store = cfg.embeddings_format == "binary"
                  ? trivia::EmbeddingStore::load_binary(cfg.embeddings_path)
                  : trivia::EmbeddingStore::load_text(cfg.embeddings_path);

    p->surfaces = trivia::build_surface_map(idf_source, *p->stopwords);
    p->lookup.emplace(p->store, &p->surfaces);

    p->cache_path = effective_cache_path(cfg);
    if (!p->cache_path.empty()) {
        auto tag = trivia::make_generation_tag(
            trivia::sha256_file(cfg.corpus_path),
            !cfg.index_path.empty()
                ? trivia::sha256_file(cfg.index_path)
                : trivia::sha256_file(separate_idf ? cfg.idf_corpus_path : cfg.corpus_path),
            trivia::sha256_file(cfg.embeddings_path), stopword_digest(*p->stopwords), cfg.k,
            p->index.min_df, "linear:k-i+1");
        p->cache.emplace(tag);
        p->cache->load(p->cache_path);
    }

    trivia::SimilarityConfig sim_cfg;
    sim_cfg.k = static_cast<std::size_t>(cfg.k);
    p->scorer.emplace(p->corpus, p->index, *p->lookup, sim_cfg, *p->stopwords,
                     p->cache ? &*p->cache : nullptr);

    p->engine_config.sample_cap = static_cast<std::size_t>(cfg.sample_cap);
    p->engine_config.rng_seed = cfg.seed;
    p->engine_config.trivia_threshold = cfg.threshold;
    p->engine_config.workers = static_cast<std::size_t>(cfg.workers);
    p->engine.emplace(p->corpus,
                     [scorer = &*p->scorer](const std::string& a, const std::string& b) {
                         return scorer->score(a, b);
                     },
                     p->engine_config);
    return p;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t next = std::min({row[j] + 1, row[j - 1] + 1,
                                         diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = row[j];
            row[j] = next;
        }
    }
    return row[b.size()];
}

std::string suggestions(const std::string& query,
                        const std::vector<std::pair<std::string, std::string>>& candidates) {
    std::string q = trivia::fold_case(query);
    std::vector<std::pair<std::size_t, std::string>> scored;
    for (const auto& [key, label] : candidates) {
        std::size_t d = edit_distance(q, trivia::fold_case(key));
        scored.emplace_back(d, label);
    }
    std::sort(scored.begin(), scored.end());
    // an article is a candidate under both its id and its title; list it once
    std::string out;
    std::set<std::string> seen;
    for (const auto& [d, label] : scored) {
        if (seen.size() == 3) break;
        if (!seen.insert(label).second) continue;
        out += seen.size() > 1 ? ", " : "";
        out += label;
    }
    return out;
}

const trivia::Article& resolve_article(const trivia::Corpus& corpus, const std::string& id) {
    if (const trivia::Article* a = corpus.find(id)) return *a;
    std::vector<std::pair<std::string, std::string>> candidates;
    for (const auto& a : corpus.articles()) {
        candidates.emplace_back(a.id, a.id + " (\"" + a.title + "\")");
        candidates.emplace_back(a.title, a.id + " (\"" + a.title + "\")");
    }
    std::string hint = suggestions(id, candidates);
    throw Error(ErrorKind::lookup, "unknown article id '" + id + "'" +
                                       (hint.empty() ? "" : "; closest matches: " + hint));
}

const trivia::Category& resolve_category(const trivia::Corpus& corpus, const std::string& name) {
    if (const trivia::Category* c = corpus.find_category(name)) return *c;
    std::vector<std::pair<std::string, std::string>> candidates;
    for (const auto& [cname, cat] : corpus.categories()) {
        candidates.emplace_back(cname, "'" + cname + "'");
    }
    std::string hint = suggestions(name, candidates);
    throw Error(ErrorKind::lookup, "unknown category '" + name + "'" +
                                       (hint.empty() ? "" : "; closest matches: " + hint));
}

ordered_json json_number(double v) {
    if (std::isinf(v)) return "inf";
    return v;
}

std::string fixed6(double v) {
    if (std::isinf(v)) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

void print_scores(const trivia::TriviaReport& report, const std::string& format) {
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    if (format == "jsonl") {
        for (const auto& s : report.scores) {
            ordered_json line;
            line["category"] = s.category;
            line["surprise"] = json_number(s.surprise);
            line["cohesiveness"] = json_number(s.cohesiveness);
            line["trivia"] = json_number(s.trivia);
            line["sampled"] = s.sampled;
            line["sample_size"] = s.sample_size;
            std::cout << line.dump() << "\n";
        }
        return;
    }
    std::size_t name_width = 8;
    for (const auto& s : report.scores) name_width = std::max(name_width, s.category.size());
    std::printf("%-*s  %12s  %12s  %12s  %7s  %6s\n", static_cast<int>(name_width), "category",
                "trivia", "surprise", "cohesive", "sampled", "n");
    for (const auto& s : report.scores) {
        std::printf("%-*s  %12s  %12s  %12s  %7s  %6zu\n", static_cast<int>(name_width),
                    s.category.c_str(), fixed6(s.trivia).c_str(), fixed6(s.surprise).c_str(),
                    fixed6(s.cohesiveness).c_str(), s.sampled ? "yes" : "no", s.sample_size);
    }
}

int cmd_build_index(const RunConfig& cfg, const std::string& out_path) {
    const std::string& source =
        !cfg.idf_corpus_path.empty() ? cfg.idf_corpus_path : cfg.corpus_path;
    std::error_code ec;
    if (!std::filesystem::is_regular_file(source, ec)) {
        throw Error(ErrorKind::input, "cannot read '" + source + "'");
    }
    trivia::Corpus corpus = trivia::load_corpus(source);
    for (const auto& w : corpus.warnings()) std::cerr << "warning: " << w << "\n";

    const trivia::StopwordSet* stopwords = &trivia::default_stopwords();
    trivia::StopwordSet storage;
    if (!cfg.stopwords_path.empty()) {
        storage = trivia::load_stopwords(cfg.stopwords_path);
        stopwords = &storage;
    }
    trivia::DfIndex index = trivia::build_df_index(corpus, cfg.min_df, *stopwords);
    trivia::write_df_index(index, out_path);
    if (index.df.empty()) {
        std::cerr << "warning: no term reached min-df " << index.min_df << "\n";
    }
    std::cout << "indexed " << index.df.size() << " terms over " << index.n_docs
              << " documents\n";
    return 0;
}

int cmd_top_trivia(const RunConfig& cfg, const std::string& article_id) {
    auto p = load_pipeline(cfg);
    resolve_article(p->corpus, article_id);
    trivia::TriviaReport report = p->engine->top_trivia(article_id);
    p->checkpoint_cache();
    print_scores(report, cfg.output);
    return 0;
}

int cmd_similarity(const RunConfig& cfg, const std::string& id1, const std::string& id2) {
    auto p = load_pipeline(cfg);
    resolve_article(p->corpus, id1);
    resolve_article(p->corpus, id2);
    double sigma = p->scorer->score(id1, id2);
    p->checkpoint_cache();
    std::cout << fixed6(sigma) << "\n";
    return 0;
}

int cmd_outliers(const RunConfig& cfg, const std::string& category) {
    auto p = load_pipeline(cfg);
    resolve_category(p->corpus, category);
    auto ranked = p->engine->rank_members_by_surprise(category);
    p->checkpoint_cache();
    if (cfg.output == "jsonl") {
        for (const auto& [id, surprise] : ranked) {
            ordered_json line;
            line["article"] = id;
            line["surprise"] = json_number(surprise);
            std::cout << line.dump() << "\n";
        }
        return 0;
    }
    std::size_t width = 7;
    for (const auto& [id, surprise] : ranked) width = std::max(width, id.size());
    std::printf("%-*s  %12s\n", static_cast<int>(width), "article", "surprise");
    for (const auto& [id, surprise] : ranked) {
        std::printf("%-*s  %12s\n", static_cast<int>(width), id.c_str(),
                    fixed6(surprise).c_str());
    }
    return 0;
}

int cmd_explain(const RunConfig& cfg, const std::string& article_id, const std::string& category) {
    auto p = load_pipeline(cfg);
    const trivia::Article& article = resolve_article(p->corpus, article_id);

    trivia::SimilarityConfig sim_cfg;
    sim_cfg.k = static_cast<std::size_t>(cfg.k);
    trivia::TextScoringContext ctx{p->index, *p->stopwords, *p->lookup, sim_cfg};
    trivia::ExplainResult result = p->engine->explain_category(article_id, category, ctx);

    const std::string& paragraph = article.paragraphs[result.paragraph_index];
    if (cfg.output == "jsonl") {
        ordered_json line;
        line["article"] = article_id;
        line["category"] = category;
        line["paragraph_index"] = result.paragraph_index;
        line["score"] = json_number(result.score);
        line["paragraph"] = paragraph;
        std::cout << line.dump() << "\n";
    } else {
        std::printf("paragraph %zu (score %s):\n%s\n", result.paragraph_index,
                    fixed6(result.score).c_str(), paragraph.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rank an article's categories by trivia-worthiness"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string out_path, article_id, other_id, category;

    CLI::App* build = app.add_subcommand("build-index", "build and persist a document-frequency index");
    build->add_option("--corpus", cfg.corpus_path, "corpus JSONL file");
    build->add_option("--idf-corpus", cfg.idf_corpus_path, "alias for --corpus on this command");
    build->add_option("--stopwords", cfg.stopwords_path, "stopword list (default: bundled English)");
    build->add_option("--min-df", cfg.min_df, "minimum document frequency (default 10)");
    build->add_option("--out", out_path, "output index file")->required();

    CLI::App* top = app.add_subcommand("top-trivia", "rank an article's categories");
    add_common_flags(top, cfg, true);
    top->add_option("article", article_id, "article id")->required();

    CLI::App* sim = app.add_subcommand("similarity", "article-to-article similarity");
    add_common_flags(sim, cfg, true);
    sim->add_option("article1", article_id, "first article id")->required();
    sim->add_option("article2", other_id, "second article id")->required();

    CLI::App* outliers = app.add_subcommand("outliers", "rank category members by surprise");
    add_common_flags(outliers, cfg, true);
    outliers->add_option("category", category, "category name")->required();

    CLI::App* explain = app.add_subcommand("explain", "best-matching paragraph for a category");
    add_common_flags(explain, cfg, true);
    explain->add_option("article", article_id, "article id")->required();
    explain->add_option("category", category, "category name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 4;
    }

    try {
        if (build->parsed()) {
            if (cfg.corpus_path.empty() && cfg.idf_corpus_path.empty()) {
                throw Error(ErrorKind::config, "build-index requires --corpus");
            }
            return cmd_build_index(cfg, out_path);
        }
        if (top->parsed()) return cmd_top_trivia(cfg, article_id);
        if (sim->parsed()) return cmd_similarity(cfg, article_id, other_id);
        if (outliers->parsed()) return cmd_outliers(cfg, category);
        if (explain->parsed()) return cmd_explain(cfg, article_id, category);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
