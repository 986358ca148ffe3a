#include "trivia/textnorm.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iterator>

#include "trivia/error.hpp"
#include "trivia/porter.hpp"

namespace trivia {
namespace {

struct CodepointRange {
    std::uint32_t lo;
    std::uint32_t hi;
};

struct LowerDelta {
    std::uint32_t cp;
    std::uint32_t lower;
};

#include "unicode_tables.inc"

bool is_alnum_cp(std::uint32_t cp) {
    if (cp < 0x80) {
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    }
    auto it = std::upper_bound(std::begin(kAlnumRanges), std::end(kAlnumRanges), cp,
                               [](std::uint32_t v, const CodepointRange& r) { return v < r.lo; });
    if (it == std::begin(kAlnumRanges)) return false;
    --it;
    return cp >= it->lo && cp <= it->hi;
}

std::uint32_t to_lower_cp(std::uint32_t cp) {
    if (cp < 0x80) {
        return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
    }
    auto it = std::lower_bound(std::begin(kLowerDelta), std::end(kLowerDelta), cp,
                               [](const LowerDelta& d, std::uint32_t v) { return d.cp < v; });
    if (it != std::end(kLowerDelta) && it->cp == cp) return it->lower;
    return cp;
}

// Decodes one UTF-8 code point; malformed sequences yield one replacement
// per byte so the scan always advances.
std::uint32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto* p = reinterpret_cast<const unsigned char*>(s.data());
    unsigned char c = p[i];
    if (c < 0x80) {
        ++i;
        return c;
    }
    int extra;
    std::uint32_t cp;
    if ((c & 0xE0) == 0xC0) {
        extra = 1;
        cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
        extra = 2;
        cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
        extra = 3;
        cp = c & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    if (i + static_cast<std::size_t>(extra) >= s.size()) {
        ++i;
        return 0xFFFD;
    }
    for (int n = 1; n <= extra; ++n) {
        unsigned char cc = p[i + static_cast<std::size_t>(n)];
        if ((cc & 0xC0) != 0x80) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (cc & 0x3F);
    }
    i += static_cast<std::size_t>(extra) + 1;
    return cp;
}

void encode_utf8(std::uint32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool all_ascii_letters(std::string_view s) {
    for (char c : s) {
        if (c < 'a' || c > 'z') return false;
    }
    return !s.empty();
}

} // namespace

std::string fold_case(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        encode_utf8(to_lower_cp(decode_utf8(text, i)), out);
    }
    return out;
}

std::vector<NormalizedToken> normalize_tokens(std::string_view text,
                                              const StopwordSet& stopwords) {
    std::vector<NormalizedToken> out;
    std::string folded;
    std::size_t i = 0;
    bool in_token = false;
    auto flush = [&] {
        if (!in_token) return;
        in_token = false;
        if (stopwords.count(folded)) {
            folded.clear();
            return;
        }
        std::string stem =
            all_ascii_letters(folded) ? porter_stem(folded) : folded;
        // Keep the no-stopword guarantee even when stemming lands on a
        // listed word (e.g. willing -> will).
        if (stopwords.count(stem)) {
            folded.clear();
            return;
        }
        out.push_back(NormalizedToken{std::move(folded), std::move(stem)});
        folded = {};
    };
    while (i < text.size()) {
        std::uint32_t cp = decode_utf8(text, i);
        if (is_alnum_cp(cp)) {
            in_token = true;
            encode_utf8(to_lower_cp(cp), folded);
        } else {
            flush();
        }
    }
    flush();
    return out;
}

std::vector<std::string> normalize(std::string_view text, const StopwordSet& stopwords) {
    std::vector<std::string> stems;
    for (auto& tok : normalize_tokens(text, stopwords)) {
        stems.push_back(std::move(tok.stem));
    }
    return stems;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::input, "cannot open stopword file '" + path.string() + "'");

    StopwordSet set;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        std::size_t e = line.find_last_not_of(" \t\r");
        set.insert(line.substr(b, e - b + 1));
    }
    return set;
}

namespace {

constexpr const char* kBundledStopwords =
#include "stopwords_data.inc"
    ;

} // namespace

const StopwordSet& default_stopwords() {
    static const StopwordSet set = [] {
        StopwordSet s;
        std::string_view data(kBundledStopwords);
        std::size_t pos = 0;
        while (pos <= data.size()) {
            std::size_t nl = data.find('\n', pos);
            std::string_view line =
                data.substr(pos, nl == std::string_view::npos ? data.size() - pos : nl - pos);
            pos = nl == std::string_view::npos ? data.size() + 1 : nl + 1;
            auto hash = line.find('#');
            if (hash != std::string_view::npos) line = line.substr(0, hash);
            std::size_t b = line.find_first_not_of(" \t\r");
            if (b == std::string_view::npos) continue;
            std::size_t e = line.find_last_not_of(" \t\r");
            s.insert(std::string(line.substr(b, e - b + 1)));
        }
        return s;
    }();
    return set;
}

} // namespace trivia
