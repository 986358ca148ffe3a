#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace trivia {

struct Article {
    std::string id;
    std::string title;
    std::string text;
    std::vector<std::string> paragraphs; // blank-line split of text, in order
    std::vector<std::string> categories; // no duplicates
};

struct Category {
    std::string name;
    std::vector<std::string> members; // article ids, sorted ascending

    bool singleton() const { return members.size() == 1; }
    bool contains(const std::string& article_id) const;
};

// Immutable after load; safe for concurrent reads.
class Corpus {
public:
    std::size_t n_docs() const { return articles_.size(); }

    // Articles in input (line) order.
    const std::vector<Article>& articles() const { return articles_; }
    const Article* find(const std::string& id) const;
    const Article& at(const std::string& id) const; // throws ErrorKind::lookup

    // Categories keyed by name, iterated in sorted order.
    const std::map<std::string, Category>& categories() const { return categories_; }
    const Category* find_category(const std::string& name) const;
    const Category& category_at(const std::string& name) const; // throws

    const std::vector<std::string>& warnings() const { return warnings_; }

    void add_article(Article article); // throws on duplicate id
    void finalize();                   // builds the category index

private:
    std::vector<Article> articles_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::map<std::string, Category> categories_;
    std::vector<std::string> warnings_;
};

// Reads a JSONL snapshot: one object per line with string fields `id`,
// `title`, `text` and a string-array `categories`. Unknown fields ignored.
Corpus load_corpus(const std::filesystem::path& path);

// Splits on blank-line boundaries (two or more consecutive newlines), trims
// surrounding whitespace, drops empty segments.
std::vector<std::string> split_paragraphs(std::string_view text);

} // namespace trivia
