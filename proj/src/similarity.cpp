#include "trivia/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "trivia/error.hpp"

namespace trivia {
namespace {

constexpr char kMagic[5] = {'T', 'M', 'S', 'C', '1'};

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

void write_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    write_u64(out, bits);
}

std::uint64_t read_u64(std::istream& in, const char* what) {
    unsigned char buf[8];
    if (!in.read(reinterpret_cast<char*>(buf), 8)) {
        throw Error(ErrorKind::input, std::string("cache file truncated reading ") + what);
    }
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
    return v;
}

std::uint16_t read_u16(std::istream& in, const char* what) {
    unsigned char buf[2];
    if (!in.read(reinterpret_cast<char*>(buf), 2)) {
        throw Error(ErrorKind::input, std::string("cache file truncated reading ") + what);
    }
    return static_cast<std::uint16_t>(buf[0] | (buf[1] << 8));
}

std::string read_id(std::istream& in, const char* what) {
    std::uint16_t len = read_u16(in, what);
    std::string id(len, '\0');
    if (len > 0 && !in.read(id.data(), len)) {
        throw Error(ErrorKind::input, std::string("cache file truncated reading ") + what);
    }
    return id;
}

// Dot product of two unit vectors; components multiply commutatively, so
// sim(i,j) and sim(j,i) are bit-identical.
double unit_dot(std::span<const float> a, std::span<const float> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return std::clamp(acc, -1.0, 1.0);
}

} // namespace

std::span<const float> TermVectorLookup::find(const std::string& term) const {
    auto direct = store_.find(term);
    if (!direct.empty() || !surfaces_) return direct;
    const std::string* surface = surfaces_->find(term);
    if (!surface) return {};
    return store_.find(*surface);
}

double article_similarity(const RankedTerms& t1, const RankedTerms& t2,
                          const TermVectorLookup& lookup, const SimilarityConfig& cfg) {
    const auto& l1 = t1.terms;
    const auto& l2 = t2.terms;
    if (l1.empty() && l2.empty()) return 0.0;

    const std::size_t n1 = std::min(l1.size(), cfg.k);
    const std::size_t n2 = std::min(l2.size(), cfg.k);

    std::vector<std::span<const float>> v1(n1), v2(n2);
    for (std::size_t i = 0; i < n1; ++i) v1[i] = lookup.find(l1[i].term);
    for (std::size_t j = 0; j < n2; ++j) v2[j] = lookup.find(l2[j].term);

    // Best match for each position in the other list. A position with no
    // in-vocabulary candidate pair contributes 0. Identical in-vocabulary
    // terms match at exactly 1.
    std::vector<double> fwd(n1, 0.0), bwd(n2, 0.0);
    for (std::size_t i = 0; i < n1; ++i) {
        if (v1[i].empty()) continue;
        bool any = false;
        double best = 0.0;
        for (std::size_t j = 0; j < n2; ++j) {
            if (v2[j].empty()) continue;
            double s = l1[i].term == l2[j].term ? 1.0 : unit_dot(v1[i], v2[j]);
            if (!any || s > best) best = s;
            any = true;
        }
        if (any) fwd[i] = best;
    }
    for (std::size_t j = 0; j < n2; ++j) {
        if (v2[j].empty()) continue;
        bool any = false;
        double best = 0.0;
        for (std::size_t i = 0; i < n1; ++i) {
            if (v1[i].empty()) continue;
            double s = l2[j].term == l1[i].term ? 1.0 : unit_dot(v2[j], v1[i]);
            if (!any || s > best) best = s;
            any = true;
        }
        if (any) bwd[j] = best;
    }

    double acc = 0.0;
    for (std::size_t i = 0; i < cfg.k; ++i) {
        double f = i < n1 ? fwd[i] : 0.0;
        double b = i < n2 ? bwd[i] : 0.0;
        acc += cfg.weight(i) * (f + b);
    }
    return std::clamp(acc / cfg.z(), -1.0, 1.0);
}

std::pair<std::string, std::string> SimilarityCache::key(const std::string& a,
                                                         const std::string& b) {
    return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
}

std::size_t SimilarityCache::PairHash::operator()(
    const std::pair<std::string, std::string>& p) const {
    std::size_t h1 = std::hash<std::string>{}(p.first);
    std::size_t h2 = std::hash<std::string>{}(p.second);
    return h1 ^ (h2 * 0x9E3779B97F4A7C15ULL + (h1 << 6) + (h1 >> 2));
}

std::optional<double> SimilarityCache::lookup(const std::string& a, const std::string& b) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = entries_.find(key(a, b));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

double SimilarityCache::lookup_or_compute(const std::string& a, const std::string& b,
                                          const std::function<double()>& compute) {
    auto k = key(a, b);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = entries_.find(k);
        if (it != entries_.end()) {
            hits_.fetch_add(1, std::memory_order_relaxed);
            return it->second;
        }
    }
    // Computed outside the lock; concurrent duplicates produce bit-identical
    // values, so last-write-wins is safe.
    double v = compute();
    std::lock_guard<std::mutex> lock(mu_);
    entries_[std::move(k)] = v;
    return v;
}

std::size_t SimilarityCache::size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return entries_.size();
}

void SimilarityCache::save(const std::filesystem::path& path) const {
    std::map<std::pair<std::string, std::string>, double> snapshot;
    {
        std::lock_guard<std::mutex> lock(mu_);
        snapshot.insert(entries_.begin(), entries_.end());
    }

    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::input, "cannot open cache file '" + tmp.string() + "' for writing");
        out.write(kMagic, sizeof(kMagic));
        out.write(reinterpret_cast<const char*>(tag_.data()),
                  static_cast<std::streamsize>(tag_.size()));
        write_u64(out, snapshot.size());
        for (const auto& [ids, sigma] : snapshot) {
            if (ids.first.size() > 0xFFFF || ids.second.size() > 0xFFFF) {
                throw Error(ErrorKind::input, "article id too long for cache encoding");
            }
            write_u16(out, static_cast<std::uint16_t>(ids.first.size()));
            out.write(ids.first.data(), static_cast<std::streamsize>(ids.first.size()));
            write_u16(out, static_cast<std::uint16_t>(ids.second.size()));
            out.write(ids.second.data(), static_cast<std::streamsize>(ids.second.size()));
            write_f64(out, sigma);
        }
        out.flush();
        if (!out) throw Error(ErrorKind::input, "failed writing cache file '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw Error(ErrorKind::input,
                    "cannot replace cache file '" + path.string() + "': " + ec.message());
    }
}

std::size_t SimilarityCache::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        if (!std::filesystem::exists(path)) return 0;
        throw Error(ErrorKind::input, "cannot open cache file '" + path.string() + "'");
    }

    char magic[5];
    if (!in.read(magic, 5) || std::memcmp(magic, kMagic, 5) != 0) {
        throw Error(ErrorKind::input, "'" + path.string() + "' is not a TMSC1 cache file");
    }
    Digest file_tag{};
    if (!in.read(reinterpret_cast<char*>(file_tag.data()),
                 static_cast<std::streamsize>(file_tag.size()))) {
        throw Error(ErrorKind::input, "cache file truncated reading generation tag");
    }
    std::uint64_t count = read_u64(in, "entry count");
    if (file_tag != tag_) return 0; // another generation's values are never served

    std::size_t adopted = 0;
    std::lock_guard<std::mutex> lock(mu_);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::string id1 = read_id(in, "first article id");
        std::string id2 = read_id(in, "second article id");
        std::uint64_t bits = read_u64(in, "similarity value");
        double sigma;
        std::memcpy(&sigma, &bits, 8);
        if (!(id1 < id2)) {
            throw Error(ErrorKind::input, "cache entry ids out of order: '" + id1 + "' / '" + id2 + "'");
        }
        if (!std::isfinite(sigma) || sigma < -1.0 || sigma > 1.0) {
            throw Error(ErrorKind::input,
                        "cache entry ('" + id1 + "', '" + id2 + "') has out-of-range similarity");
        }
        if (entries_.emplace(std::make_pair(std::move(id1), std::move(id2)), sigma).second) {
            ++adopted;
        }
    }
    in.peek();
    if (!in.eof()) {
        throw Error(ErrorKind::input, "cache file '" + path.string() + "' has trailing bytes");
    }
    return adopted;
}

SimilarityScorer::SimilarityScorer(const Corpus& corpus, const DfIndex& index,
                                   const TermVectorLookup& lookup, SimilarityConfig cfg,
                                   const StopwordSet& stopwords, SimilarityCache* cache)
    : corpus_(corpus), lookup_(lookup), cfg_(cfg), cache_(cache) {
    terms_.reserve(corpus.articles().size());
    for (const Article& a : corpus.articles()) {
        terms_.emplace(a.id, top_tfidf(a, index, cfg_.k, stopwords));
    }
}

const RankedTerms& SimilarityScorer::ranked_terms(const std::string& id) const {
    auto it = terms_.find(id);
    if (it == terms_.end()) {
        throw Error(ErrorKind::lookup, "unknown article id '" + id + "'");
    }
    return it->second;
}

double SimilarityScorer::compute(const RankedTerms& t1, const RankedTerms& t2) const {
    if (t1.terms.empty() && t2.terms.empty()) {
        empty_pairs_.fetch_add(1, std::memory_order_relaxed);
    }
    computed_.fetch_add(1, std::memory_order_relaxed);
    return article_similarity(t1, t2, lookup_, cfg_);
}

double SimilarityScorer::score(const std::string& id1, const std::string& id2) const {
    const RankedTerms& t1 = ranked_terms(id1);
    if (id1 == id2) return 1.0; // definitional; the diagonal is never cached
    const RankedTerms& t2 = ranked_terms(id2);
    if (cache_) {
        return cache_->lookup_or_compute(id1, id2, [&] { return compute(t1, t2); });
    }
    return compute(t1, t2);
}

Digest make_generation_tag(const Digest& corpus_digest, const Digest& idf_digest,
                           const Digest& embeddings_digest, const Digest& stopwords_digest,
                           std::uint64_t k, std::uint64_t min_df,
                           std::string_view weighting_id) {
    std::string blob;
    blob.reserve(4 * 32 + 16 + weighting_id.size() + 8);
    auto append_digest = [&](const Digest& d) {
        blob.append(reinterpret_cast<const char*>(d.data()), d.size());
    };
    append_digest(corpus_digest);
    append_digest(idf_digest);
    append_digest(embeddings_digest);
    append_digest(stopwords_digest);
    for (int i = 0; i < 8; ++i) blob.push_back(static_cast<char>(k >> (8 * i)));
    for (int i = 0; i < 8; ++i) blob.push_back(static_cast<char>(min_df >> (8 * i)));
    blob.append(weighting_id);
    return sha256_str(blob);
}

} // namespace trivia
