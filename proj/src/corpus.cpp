#include "trivia/corpus.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"

#include "trivia/error.hpp"

namespace trivia {

bool Category::contains(const std::string& article_id) const {
    return std::binary_search(members.begin(), members.end(), article_id);
}

const Article* Corpus::find(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &articles_[it->second];
}

const Article& Corpus::at(const std::string& id) const {
    const Article* a = find(id);
    if (!a) throw Error(ErrorKind::lookup, "unknown article id '" + id + "'");
    return *a;
}

const Category* Corpus::find_category(const std::string& name) const {
    auto it = categories_.find(name);
    return it == categories_.end() ? nullptr : &it->second;
}

const Category& Corpus::category_at(const std::string& name) const {
    const Category* c = find_category(name);
    if (!c) throw Error(ErrorKind::lookup, "unknown category '" + name + "'");
    return *c;
}

void Corpus::add_article(Article article) {
    if (by_id_.count(article.id)) {
        throw Error(ErrorKind::input, "duplicate article id '" + article.id + "'");
    }
    // Keep the categories list duplicate-free, preserving first occurrence.
    std::vector<std::string> cats;
    for (auto& c : article.categories) {
        if (std::find(cats.begin(), cats.end(), c) == cats.end()) {
            cats.push_back(std::move(c));
        } else {
            warnings_.push_back("article '" + article.id + "': duplicate category '" + c +
                                "' ignored");
        }
    }
    article.categories = std::move(cats);
    by_id_.emplace(article.id, articles_.size());
    articles_.push_back(std::move(article));
}

void Corpus::finalize() {
    categories_.clear();
    for (const Article& a : articles_) {
        for (const std::string& c : a.categories) {
            Category& cat = categories_.try_emplace(c, Category{c, {}}).first->second;
            cat.members.push_back(a.id);
        }
    }
    for (auto it = categories_.begin(); it != categories_.end();) {
        Category& cat = it->second;
        std::sort(cat.members.begin(), cat.members.end());
        if (cat.members.empty()) {
            warnings_.push_back("category '" + it->first + "' has no resolvable members, dropped");
            it = categories_.erase(it);
            continue;
        }
        if (cat.singleton()) {
            warnings_.push_back("category '" + it->first + "' has a single member");
        }
        ++it;
    }
}

namespace {

std::string json_type_error(std::size_t line, const char* field, const char* want) {
    return "line " + std::to_string(line) + ": field '" + std::string(field) + "' must be a " +
           want;
}

} // namespace

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::input, "cannot open corpus file '" + path.string() + "'");

    Corpus corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::input,
                        "line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
        }
        if (!obj.is_object()) {
            throw Error(ErrorKind::input,
                        "line " + std::to_string(line_no) + ": expected a JSON object");
        }
        Article a;
        for (const char* field : {"id", "title", "text"}) {
            if (!obj.contains(field) || !obj[field].is_string()) {
                throw Error(ErrorKind::input, json_type_error(line_no, field, "string"));
            }
        }
        a.id = obj["id"].get<std::string>();
        a.title = obj["title"].get<std::string>();
        a.text = obj["text"].get<std::string>();
        if (!obj.contains("categories") || !obj["categories"].is_array()) {
            throw Error(ErrorKind::input, json_type_error(line_no, "categories", "string array"));
        }
        for (const auto& c : obj["categories"]) {
            if (!c.is_string()) {
                throw Error(ErrorKind::input,
                            json_type_error(line_no, "categories", "string array"));
            }
            a.categories.push_back(c.get<std::string>());
        }
        a.paragraphs = split_paragraphs(a.text);
        corpus.add_article(std::move(a));
    }
    corpus.finalize();
    return corpus;
}

std::vector<std::string> split_paragraphs(std::string_view text) {
    std::vector<std::string> out;
    auto flush = [&](std::string_view seg) {
        std::size_t b = seg.find_first_not_of(" \t\r\n");
        if (b == std::string_view::npos) return;
        std::size_t e = seg.find_last_not_of(" \t\r\n");
        out.emplace_back(seg.substr(b, e - b + 1));
    };
    std::size_t start = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        // A boundary is a run of two or more newlines ("\r\n" counts as one).
        std::size_t j = i;
        std::size_t newlines = 0;
        while (j < text.size()) {
            if (text[j] == '\n') {
                ++j;
            } else if (text[j] == '\r' && j + 1 < text.size() && text[j + 1] == '\n') {
                j += 2;
            } else {
                break;
            }
            ++newlines;
        }
        if (newlines >= 2) {
            flush(text.substr(start, i - start));
            start = i = j;
        } else if (newlines == 1) {
            i = j;
        } else {
            ++i;
        }
    }
    flush(text.substr(start));
    return out;
}

} // namespace trivia
