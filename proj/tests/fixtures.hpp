#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "json.hpp"

#include "trivia/corpus.hpp"
#include "trivia/embeddings.hpp"
#include "trivia/tfidf.hpp"

namespace fixtures {

class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        std::random_device rd;
        for (int attempt = 0; attempt < 64; ++attempt) {
            auto candidate = base / ("trivia_test_" + std::to_string(rd()));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot create temp dir");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

struct Doc {
    std::string id;
    std::string title;
    std::string text;
    std::vector<std::string> categories;
};

inline std::string corpus_jsonl(const std::vector<Doc>& docs) {
    std::string out;
    for (const auto& d : docs) {
        nlohmann::ordered_json j;
        j["id"] = d.id;
        j["title"] = d.title;
        j["text"] = d.text;
        j["categories"] = d.categories;
        out += j.dump();
        out += '\n';
    }
    return out;
}

inline void write_corpus(const std::filesystem::path& path, const std::vector<Doc>& docs) {
    write_file(path, corpus_jsonl(docs));
}

inline trivia::Corpus build_corpus(const std::vector<Doc>& docs) {
    trivia::Corpus corpus;
    for (const auto& d : docs) {
        trivia::Article a;
        a.id = d.id;
        a.title = d.title;
        a.text = d.text;
        a.paragraphs = trivia::split_paragraphs(d.text);
        a.categories = d.categories;
        corpus.add_article(std::move(a));
    }
    corpus.finalize();
    return corpus;
}

inline std::vector<float> axis_vec(std::size_t dim, std::size_t axis, double value = 1.0) {
    std::vector<float> v(dim, 0.0f);
    v[axis] = static_cast<float>(value);
    return v;
}

inline std::vector<float> random_gaussian(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<float> v(dim);
    for (auto& c : v) c = static_cast<float>(normal(rng));
    return v;
}

inline trivia::RankedTerms make_terms(const std::vector<std::string>& terms, std::size_t k) {
    trivia::RankedTerms out;
    out.k = k;
    double score = static_cast<double>(terms.size());
    for (const auto& t : terms) out.terms.push_back({t, score--});
    return out;
}

// 30 articles: a 10-member tight family the target joins as an outsider
// (internal 0.8, attachment 0.4, expected trivia 40/55/0.4 = 1.8181..),
// plus two decoy categories where the target is exactly typical.
struct PlantedFixture {
    static constexpr const char* kTarget = "tgt";
    static constexpr const char* kPlanted = "tight";
    static constexpr std::size_t kDim = 33;

    std::vector<Doc> docs;
    trivia::EmbeddingStore store;

    PlantedFixture() {
        store = trivia::EmbeddingStore(kDim);

        auto add = [&](const std::string& id, const std::vector<float>& vec,
                       std::vector<std::string> cats) {
            std::string text;
            for (int t = 0; t < 10; ++t) {
                std::string term = id + "w" + std::to_string(t);
                store.insert(term, vec);
                if (t) text += ' ';
                text += term;
            }
            docs.push_back(Doc{id, "Article " + id, text, std::move(cats)});
        };

        // coordinates: 0 tight-shared; 1-10 tight-personal; 11 decoyA-shared;
        // 12-20 decoyA-personal; 21 decoyB-shared; 22-31 decoyB-personal;
        // 32 target-personal
        for (std::size_t i = 0; i < 10; ++i) {
            std::vector<float> v(kDim, 0.0f);
            v[0] = static_cast<float>(std::sqrt(0.8));
            v[1 + i] = static_cast<float>(std::sqrt(0.2));
            add("ta" + std::to_string(i), v, {kPlanted});
        }
        for (std::size_t i = 0; i < 9; ++i) {
            std::vector<float> v(kDim, 0.0f);
            v[11] = static_cast<float>(std::sqrt(0.3));
            v[12 + i] = static_cast<float>(std::sqrt(0.7));
            add("da" + std::to_string(i), v, {"decoyA"});
        }
        for (std::size_t i = 0; i < 10; ++i) {
            std::vector<float> v(kDim, 0.0f);
            v[21] = 0.5f;
            v[22 + i] = static_cast<float>(std::sqrt(0.75));
            add("db" + std::to_string(i), v, {"decoyB"});
        }
        {
            std::vector<float> v(kDim, 0.0f);
            v[0] = static_cast<float>(std::sqrt(0.2));  // 0.4 to each tight member
            v[11] = static_cast<float>(std::sqrt(0.3)); // 0.3 to each decoyA member
            v[21] = 0.5f;                               // 0.25 to each decoyB member
            v[32] = 0.5f;
            add(kTarget, v, {kPlanted, "decoyA", "decoyB"});
        }
    }

    void write(const std::filesystem::path& corpus_path,
               const std::filesystem::path& embeddings_path) const {
        write_corpus(corpus_path, docs);
        store.write_text(embeddings_path);
    }
};

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    out += '\'';
    return out;
}

inline CliResult run_cli(const std::vector<std::string>& args, const TempDir& dir,
                         const std::string& extra_env = "") {
    static int counter = 0;
    auto err_path = dir.file("cli_stderr_" + std::to_string(counter++) + ".txt");

    std::string cmd = extra_env.empty() ? "" : extra_env + " ";
    cmd += shell_quote(TRIVIA_MINER_BIN);
    for (const auto& a : args) cmd += " " + shell_quote(a);
    cmd += " 2>" + shell_quote(err_path.string());

    CliResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0) result.out.append(buf, got);
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.err = read_file(err_path);
    return result;
}

} // namespace fixtures
