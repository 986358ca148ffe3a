#include "trivia/embeddings.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "trivia/error.hpp"

// Raw f32 reads/writes below assume the on-disk little-endian layout.
static_assert(std::endian::native == std::endian::little);

namespace trivia {
namespace {

double parse_component(std::string_view tok, const std::string& path, std::size_t line_no) {
    double v;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) {
        throw Error(ErrorKind::input, "'" + path + "' line " + std::to_string(line_no) +
                                          ": bad vector component '" + std::string(tok) + "'");
    }
    return v;
}

// Shortest decimal form that round-trips the f32 value.
void append_float(std::string& out, float v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, static_cast<std::size_t>(p - buf));
    (void)ec;
}

} // namespace

void EmbeddingStore::insert(const std::string& term, const std::vector<float>& components) {
    if (term.empty()) {
        throw Error(ErrorKind::input, "embedding term is empty");
    }
    if (term.find_first_of(" \t\r\n") != std::string::npos) {
        // whitespace in a term cannot survive either serialization format
        throw Error(ErrorKind::input, "embedding term '" + term + "' contains whitespace");
    }
    if (components.empty()) {
        throw Error(ErrorKind::input, "vector for '" + term + "' is empty");
    }
    if (dim_ == 0) dim_ = components.size();
    if (components.size() != dim_) {
        throw Error(ErrorKind::input, "vector for '" + term + "' has " +
                                          std::to_string(components.size()) + " components, expected " +
                                          std::to_string(dim_));
    }
    if (index_.count(term)) {
        throw Error(ErrorKind::input, "duplicate embedding term '" + term + "'");
    }
    double norm_sq = 0.0;
    for (float c : components) {
        if (!std::isfinite(c)) {
            throw Error(ErrorKind::input, "vector for '" + term + "' has a non-finite component");
        }
        norm_sq += static_cast<double>(c) * static_cast<double>(c);
    }
    double norm = std::sqrt(norm_sq);
    if (norm == 0.0) {
        throw Error(ErrorKind::input, "vector for '" + term + "' has zero norm");
    }

    index_.emplace(term, data_.size() / std::max<std::size_t>(dim_, 1));
    // Keep stored bits when already unit-length so round-trips are exact.
    if (std::abs(norm - 1.0) <= 1e-6) {
        data_.insert(data_.end(), components.begin(), components.end());
    } else {
        for (float c : components) {
            data_.push_back(static_cast<float>(static_cast<double>(c) / norm));
        }
    }
}

std::span<const float> EmbeddingStore::find(const std::string& term) const {
    auto it = index_.find(term);
    if (it == index_.end()) return {};
    return {data_.data() + it->second * dim_, dim_};
}

std::vector<std::string> EmbeddingStore::sorted_terms() const {
    std::vector<std::string> terms;
    terms.reserve(index_.size());
    for (const auto& [term, row] : index_) terms.push_back(term);
    std::sort(terms.begin(), terms.end());
    return terms;
}

EmbeddingStore EmbeddingStore::load_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::input, "cannot open embeddings file '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorKind::input, "'" + path.string() + "': missing header line");
    }
    std::uint64_t vocab = 0, dim = 0;
    {
        std::istringstream hs(line);
        std::string extra;
        if (!(hs >> vocab >> dim) || (hs >> extra)) {
            throw Error(ErrorKind::input,
                        "'" + path.string() + "': header must be '<vocab_size> <dim>', got '" + line + "'");
        }
    }
    if (vocab > 0 && dim == 0) {
        throw Error(ErrorKind::input, "'" + path.string() + "': zero dimensionality");
    }

    EmbeddingStore store(dim);
    std::size_t line_no = 1;
    std::vector<float> components;
    std::uint64_t loaded = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        std::size_t pos = line.find(' ');
        if (pos == std::string::npos || pos == 0) {
            throw Error(ErrorKind::input, "'" + path.string() + "' line " + std::to_string(line_no) +
                                              ": expected '<term> <components...>'");
        }
        std::string term = line.substr(0, pos);
        components.clear();
        std::size_t start = pos + 1;
        while (start <= line.size()) {
            std::size_t end = line.find(' ', start);
            std::string_view tok(line.data() + start,
                                 (end == std::string::npos ? line.size() : end) - start);
            if (!tok.empty()) {
                components.push_back(
                    static_cast<float>(parse_component(tok, path.string(), line_no)));
            }
            if (end == std::string::npos) break;
            start = end + 1;
        }
        if (components.size() != dim) {
            throw Error(ErrorKind::input, "'" + path.string() + "' line " + std::to_string(line_no) +
                                              ": " + std::to_string(components.size()) +
                                              " components, header declares " + std::to_string(dim));
        }
        if (loaded == vocab) {
            throw Error(ErrorKind::input, "'" + path.string() + "': more entries than the declared vocab size " +
                                              std::to_string(vocab));
        }
        try {
            store.insert(term, components);
        } catch (const Error& e) {
            throw Error(e.kind(), "'" + path.string() + "' line " + std::to_string(line_no) + ": " + e.what());
        }
        ++loaded;
    }
    if (loaded != vocab) {
        throw Error(ErrorKind::input, "'" + path.string() + "': header declares " + std::to_string(vocab) +
                                          " entries but file has " + std::to_string(loaded));
    }
    return store;
}

EmbeddingStore EmbeddingStore::load_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::input, "cannot open embeddings file '" + path.string() + "'");

    auto offset = [&]() -> std::string { return std::to_string(static_cast<long long>(in.tellg())); };

    std::string header;
    if (!std::getline(in, header)) {
        throw Error(ErrorKind::input, "'" + path.string() + "': missing header line");
    }
    std::uint64_t vocab = 0, dim = 0;
    {
        std::istringstream hs(header);
        std::string extra;
        if (!(hs >> vocab >> dim) || (hs >> extra)) {
            throw Error(ErrorKind::input,
                        "'" + path.string() + "': header must be '<vocab_size> <dim>', got '" + header + "'");
        }
    }
    if (vocab > 0 && dim == 0) {
        throw Error(ErrorKind::input, "'" + path.string() + "': zero dimensionality");
    }

    EmbeddingStore store(dim);
    std::vector<float> components(dim);
    for (std::uint64_t i = 0; i < vocab; ++i) {
        std::string term;
        int c;
        while ((c = in.get()) != EOF && c != ' ') {
            if (c == '\n' && term.empty()) continue; // optional newline after the previous vector
            term.push_back(static_cast<char>(c));
        }
        if (c == EOF) {
            throw Error(ErrorKind::input, "'" + path.string() + "': truncated at byte " + offset() +
                                              " reading term " + std::to_string(i + 1) + " of " +
                                              std::to_string(vocab));
        }
        if (term.empty()) {
            throw Error(ErrorKind::input, "'" + path.string() + "': empty term at byte " + offset());
        }
        if (!in.read(reinterpret_cast<char*>(components.data()),
                     static_cast<std::streamsize>(dim * sizeof(float)))) {
            throw Error(ErrorKind::input, "'" + path.string() + "': truncated at byte " + offset() +
                                              " reading vector for '" + term + "'");
        }
        try {
            store.insert(term, components);
        } catch (const Error& e) {
            throw Error(e.kind(), "'" + path.string() + "': " + e.what());
        }
    }
    // Only optional newlines may remain.
    int c;
    while ((c = in.get()) != EOF) {
        if (c != '\n') {
            throw Error(ErrorKind::input, "'" + path.string() + "': trailing bytes after last vector");
        }
    }
    return store;
}

void EmbeddingStore::write_text(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::input, "cannot open '" + path.string() + "' for writing");

    std::string buf;
    buf += std::to_string(size());
    buf += ' ';
    buf += std::to_string(dim_);
    buf += '\n';
    for (const auto& term : sorted_terms()) {
        buf += term;
        auto vec = find(term);
        for (float v : vec) {
            buf += ' ';
            append_float(buf, v);
        }
        buf += '\n';
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error(ErrorKind::input, "failed writing '" + path.string() + "'");
}

void EmbeddingStore::write_binary(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::input, "cannot open '" + path.string() + "' for writing");

    out << size() << ' ' << dim_ << '\n';
    for (const auto& term : sorted_terms()) {
        out.write(term.data(), static_cast<std::streamsize>(term.size()));
        out.put(' ');
        auto vec = find(term);
        static_assert(sizeof(float) == 4);
        out.write(reinterpret_cast<const char*>(vec.data()),
                  static_cast<std::streamsize>(vec.size() * sizeof(float)));
        out.put('\n');
    }
    out.flush();
    if (!out) throw Error(ErrorKind::input, "failed writing '" + path.string() + "'");
}

std::optional<double> word_similarity(const EmbeddingStore& store, const std::string& w1,
                                      const std::string& w2) {
    auto v1 = store.find(w1);
    if (v1.empty()) return std::nullopt;
    if (w1 == w2) return 1.0;
    auto v2 = store.find(w2);
    if (v2.empty()) return std::nullopt;

    double dot = 0.0;
    for (std::size_t i = 0; i < v1.size(); ++i) {
        dot += static_cast<double>(v1[i]) * static_cast<double>(v2[i]);
    }
    return std::clamp(dot, -1.0, 1.0);
}

} // namespace trivia
