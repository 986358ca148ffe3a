#include "trivia/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "trivia/error.hpp"

namespace trivia {
namespace {

void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
}

void write_u16(std::ostream& out, std::uint16_t v) {
    unsigned char buf[2] = {static_cast<unsigned char>(v),
                            static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<const char*>(buf), 2);
}

std::uint64_t read_u64(std::istream& in, const char* what) {
    unsigned char buf[8];
    if (!in.read(reinterpret_cast<char*>(buf), 8)) {
        throw Error(ErrorKind::input, std::string("index file truncated reading ") + what);
    }
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
    return v;
}

std::uint16_t read_u16(std::istream& in, const char* what) {
    unsigned char buf[2];
    if (!in.read(reinterpret_cast<char*>(buf), 2)) {
        throw Error(ErrorKind::input, std::string("index file truncated reading ") + what);
    }
    return static_cast<std::uint16_t>(buf[0] | (buf[1] << 8));
}

constexpr char kMagic[5] = {'T', 'M', 'D', 'F', '1'};

} // namespace

DfIndex build_df_index(const Corpus& corpus, std::uint64_t min_df,
                       const StopwordSet& stopwords) {
    if (corpus.articles().empty()) {
        throw Error(ErrorKind::input, "cannot build document-frequency index over an empty corpus");
    }
    if (min_df == 0) min_df = 1;

    DfIndex index;
    index.n_docs = corpus.articles().size();
    index.min_df = min_df;
    for (const Article& a : corpus.articles()) {
        std::vector<std::string> stems = normalize(a.text, stopwords);
        std::sort(stems.begin(), stems.end());
        stems.erase(std::unique(stems.begin(), stems.end()), stems.end());
        for (auto& s : stems) ++index.df[s];
    }
    if (min_df > 1) {
        for (auto it = index.df.begin(); it != index.df.end();) {
            if (it->second < min_df) {
                it = index.df.erase(it);
            } else {
                ++it;
            }
        }
    }
    return index;
}

RankedTerms top_tfidf_tokens(const std::vector<std::string>& stems, const DfIndex& index,
                             std::size_t k) {
    std::unordered_map<std::string, std::uint64_t> tf;
    for (const auto& s : stems) ++tf[s];

    std::vector<RankedTerm> scored;
    scored.reserve(tf.size());
    const double n = static_cast<double>(index.n_docs);
    for (auto& [term, count] : tf) {
        auto it = index.df.find(term);
        if (it == index.df.end()) continue;
        double score = static_cast<double>(count) * std::log(n / static_cast<double>(it->second));
        if (score > 0.0) scored.push_back(RankedTerm{term, score});
    }
    std::sort(scored.begin(), scored.end(), [](const RankedTerm& a, const RankedTerm& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.term < b.term;
    });
    if (scored.size() > k) scored.resize(k);

    RankedTerms out;
    out.terms = std::move(scored);
    out.k = k;
    return out;
}

RankedTerms top_tfidf(const Article& article, const DfIndex& index, std::size_t k,
                      const StopwordSet& stopwords) {
    return top_tfidf_tokens(normalize(article.text, stopwords), index, k);
}

void write_df_index(const DfIndex& index, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::input, "cannot open index file '" + path.string() + "' for writing");

    out.write(kMagic, sizeof(kMagic));
    write_u64(out, index.n_docs);
    write_u64(out, index.min_df);
    write_u64(out, index.df.size());

    std::map<std::string, std::uint64_t> sorted(index.df.begin(), index.df.end());
    for (const auto& [term, df] : sorted) {
        if (term.size() > 0xFFFF) {
            throw Error(ErrorKind::input, "term too long for index encoding: " + term.substr(0, 32) + "...");
        }
        write_u16(out, static_cast<std::uint16_t>(term.size()));
        out.write(term.data(), static_cast<std::streamsize>(term.size()));
        write_u64(out, df);
    }
    out.flush();
    if (!out) throw Error(ErrorKind::input, "failed writing index file '" + path.string() + "'");
}

DfIndex read_df_index(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::input, "cannot open index file '" + path.string() + "'");

    char magic[5];
    if (!in.read(magic, 5) || std::memcmp(magic, kMagic, 5) != 0) {
        throw Error(ErrorKind::input, "'" + path.string() + "' is not a TMDF1 index file");
    }
    DfIndex index;
    index.n_docs = read_u64(in, "document count");
    index.min_df = read_u64(in, "min_df");
    std::uint64_t count = read_u64(in, "entry count");
    if (index.n_docs == 0) {
        throw Error(ErrorKind::input, "index file '" + path.string() + "' declares zero documents");
    }
    index.df.reserve(count);
    std::string term;
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint16_t len = read_u16(in, "term length");
        term.resize(len);
        if (len > 0 && !in.read(term.data(), len)) {
            throw Error(ErrorKind::input, "index file truncated reading term bytes");
        }
        std::uint64_t df = read_u64(in, "term document count");
        if (df == 0 || df > index.n_docs) {
            throw Error(ErrorKind::input,
                        "index entry '" + term + "' has document count " + std::to_string(df) +
                            " outside [1, " + std::to_string(index.n_docs) + "]");
        }
        if (!index.df.emplace(term, df).second) {
            throw Error(ErrorKind::input, "index file contains duplicate term '" + term + "'");
        }
    }
    in.peek();
    if (!in.eof()) {
        throw Error(ErrorKind::input, "index file '" + path.string() + "' has trailing bytes");
    }
    return index;
}

SurfaceMap build_surface_map(const Corpus& corpus, const StopwordSet& stopwords) {
    // stem → surface → occurrence count
    std::unordered_map<std::string, std::unordered_map<std::string, std::uint64_t>> counts;
    for (const Article& a : corpus.articles()) {
        for (auto& tok : normalize_tokens(a.text, stopwords)) {
            ++counts[tok.stem][tok.surface];
        }
    }
    SurfaceMap map;
    map.stem_to_surface.reserve(counts.size());
    for (auto& [stem, surfaces] : counts) {
        const std::string* best = nullptr;
        std::uint64_t best_count = 0;
        for (auto& [surface, count] : surfaces) {
            if (count > best_count || (count == best_count && (!best || surface < *best))) {
                best = &surface;
                best_count = count;
            }
        }
        if (best && *best != stem) map.stem_to_surface.emplace(stem, *best);
    }
    return map;
}

} // namespace trivia
