#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace trivia {

// Term -> unit vector store over word2vec files. Vectors are normalized at
// load (components kept bit-identical when the norm is already within 1e-6
// of 1, so write->read round-trips exactly). Immutable once loaded.
class EmbeddingStore {
public:
    EmbeddingStore() = default;
    explicit EmbeddingStore(std::size_t dim) : dim_(dim) {}

    // Text format: header "<vocab_size> <dim>", then one
    // "<term> <c1> ... <c_dim>" line per entry.
    static EmbeddingStore load_text(const std::filesystem::path& path);

    // Binary format: ASCII header "<vocab_size> <dim>\n", then per entry the
    // term bytes, a single space, dim IEEE-754 f32 LE values, and an
    // optional trailing newline.
    static EmbeddingStore load_binary(const std::filesystem::path& path);

    void write_text(const std::filesystem::path& path) const;
    void write_binary(const std::filesystem::path& path) const;

    // Normalizes and stores; throws on zero norm, non-finite components, or
    // dimension mismatch.
    void insert(const std::string& term, const std::vector<float>& components);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return index_.size(); }
    bool contains(const std::string& term) const { return index_.count(term) != 0; }

    // Empty span when the term is out of vocabulary.
    std::span<const float> find(const std::string& term) const;

    // Terms in sorted order (the serialization order).
    std::vector<std::string> sorted_terms() const;

private:
    std::size_t dim_ = 0;
    std::unordered_map<std::string, std::size_t> index_; // term -> row
    std::vector<float> data_;                            // rows of dim_ floats
};

// Cosine of two unit vectors, clamped to [-1,1]; exactly 1 for an
// in-vocabulary term against itself. std::nullopt when either term is OOV.
std::optional<double> word_similarity(const EmbeddingStore& store, const std::string& w1,
                                      const std::string& w2);

} // namespace trivia
