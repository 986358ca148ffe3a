#include "doctest.h"

#include <cmath>

#include "trivia/error.hpp"
#include "trivia/tfidf.hpp"

#include "fixtures.hpp"

using namespace trivia;
using fixtures::Doc;

namespace {

const StopwordSet kNoStopwords;

Corpus three_docs() {
    return fixtures::build_corpus({
        {"d1", "D1", "aa bb", {}},
        {"d2", "D2", "aa cc", {}},
        {"d3", "D3", "aa", {}},
    });
}

} // namespace

TEST_CASE("build_df_index counts distinct documents per term") {
    DfIndex idx = build_df_index(three_docs(), 1, kNoStopwords);
    CHECK(idx.n_docs == 3);
    CHECK(idx.min_df == 1);
    REQUIRE(idx.df.size() == 3);
    CHECK(idx.df.at("aa") == 3);
    CHECK(idx.df.at("bb") == 1);
    CHECK(idx.df.at("cc") == 1);
}

TEST_CASE("repeated terms in one document count once") {
    Corpus c = fixtures::build_corpus({{"d", "D", "xx xx xx yy", {}}});
    DfIndex idx = build_df_index(c, 1, kNoStopwords);
    CHECK(idx.df.at("xx") == 1);
}

TEST_CASE("min_df prunes and zero is treated as one") {
    DfIndex pruned = build_df_index(three_docs(), 2, kNoStopwords);
    CHECK(pruned.df.size() == 1);
    CHECK(pruned.df.at("aa") == 3);

    DfIndex zero = build_df_index(three_docs(), 0, kNoStopwords);
    DfIndex one = build_df_index(three_docs(), 1, kNoStopwords);
    CHECK(zero.min_df == 1);
    CHECK(zero.df == one.df);
}

TEST_CASE("build_df_index rejects an empty corpus") {
    Corpus empty;
    empty.finalize();
    CHECK_THROWS_AS(build_df_index(empty, 1, kNoStopwords), Error);
}

TEST_CASE("top_tfidf scores tf times ln(n/df) and drops zero scores") {
    DfIndex idx = build_df_index(three_docs(), 1, kNoStopwords);
    Article doc{"q", "Q", "aa aa bb", {}, {}};
    RankedTerms ranked = top_tfidf(doc, idx, 2, kNoStopwords);
    // aa appears in all docs: idf 0, excluded
    REQUIRE(ranked.terms.size() == 1);
    CHECK(ranked.terms[0].term == "bb");
    CHECK(ranked.terms[0].score == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("top_tfidf of an empty article") {
    DfIndex idx = build_df_index(three_docs(), 1, kNoStopwords);
    Article doc{"q", "Q", "", {}, {}};
    CHECK(top_tfidf(doc, idx, 5, kNoStopwords).terms.empty());
}

TEST_CASE("pruned and unseen terms score nothing") {
    DfIndex idx = build_df_index(three_docs(), 2, kNoStopwords);
    Article doc{"q", "Q", "bb cc zz", {}, {}};
    CHECK(top_tfidf(doc, idx, 5, kNoStopwords).terms.empty());
}

TEST_CASE("ranking orders by score then ascending term") {
    Corpus c = fixtures::build_corpus({
        {"d1", "D1", "tt uu vv", {}},
        {"d2", "D2", "tt", {}},
        {"d3", "D3", "ss", {}},
    });
    DfIndex idx = build_df_index(c, 1, kNoStopwords);
    // uu and vv tie (same tf, same df); ascending term breaks the tie
    Article doc{"q", "Q", "vv uu", {}, {}};
    RankedTerms ranked = top_tfidf(doc, idx, 10, kNoStopwords);
    REQUIRE(ranked.terms.size() == 2);
    CHECK(ranked.terms[0].term == "uu");
    CHECK(ranked.terms[1].term == "vv");

    for (std::size_t i = 1; i < ranked.terms.size(); ++i) {
        CHECK(ranked.terms[i - 1].score >= ranked.terms[i].score);
    }
    for (const auto& t : ranked.terms) CHECK(t.score > 0.0);
}

TEST_CASE("k truncates the list") {
    Corpus c = fixtures::build_corpus({
        {"d1", "D1", "aa bb cc dd ee", {}},
        {"d2", "D2", "zz", {}},
    });
    DfIndex idx = build_df_index(c, 1, kNoStopwords);
    Article doc{"q", "Q", "aa bb cc dd ee", {}, {}};
    RankedTerms ranked = top_tfidf(doc, idx, 3, kNoStopwords);
    CHECK(ranked.terms.size() == 3);
    CHECK(ranked.k == 3);
}

TEST_CASE("duplicating text scales scores but not order") {
    Corpus c = fixtures::build_corpus({
        {"d1", "D1", "aa aa bb cc", {}},
        {"d2", "D2", "cc dd", {}},
        {"d3", "D3", "dd", {}},
    });
    DfIndex idx = build_df_index(c, 1, kNoStopwords);
    std::string text = "aa aa bb cc";
    Article once{"q", "Q", text, {}, {}};
    Article twice{"q2", "Q2", text + " " + text, {}, {}};
    RankedTerms r1 = top_tfidf(once, idx, 10, kNoStopwords);
    RankedTerms r2 = top_tfidf(twice, idx, 10, kNoStopwords);
    REQUIRE(r1.terms.size() == r2.terms.size());
    for (std::size_t i = 0; i < r1.terms.size(); ++i) {
        CHECK(r1.terms[i].term == r2.terms[i].term);
        CHECK(r2.terms[i].score == doctest::Approx(2.0 * r1.terms[i].score).epsilon(1e-12));
    }
}

TEST_CASE("index round-trips through the binary format byte-identically") {
    fixtures::TempDir dir;
    DfIndex idx = build_df_index(three_docs(), 1, kNoStopwords);

    auto p1 = dir.file("a.idx");
    auto p2 = dir.file("b.idx");
    write_df_index(idx, p1);
    DfIndex back = read_df_index(p1);
    CHECK(back.n_docs == idx.n_docs);
    CHECK(back.min_df == idx.min_df);
    CHECK(back.df == idx.df);

    write_df_index(back, p2);
    CHECK(fixtures::read_file(p1) == fixtures::read_file(p2));
}

TEST_CASE("index reader rejects corrupted files") {
    fixtures::TempDir dir;
    DfIndex idx = build_df_index(three_docs(), 1, kNoStopwords);
    auto path = dir.file("x.idx");
    write_df_index(idx, path);
    std::string bytes = fixtures::read_file(path);

    SUBCASE("bad magic") {
        std::string bad = bytes;
        bad[0] = 'X';
        fixtures::write_file(path, bad);
        try {
            read_df_index(path);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::input);
            CHECK(std::string(e.what()).find("TMDF1") != std::string::npos);
        }
    }
    SUBCASE("truncated mid-entry") {
        fixtures::write_file(path, bytes.substr(0, bytes.size() - 3));
        try {
            read_df_index(path);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::input);
            CHECK(std::string(e.what()).find("truncated") != std::string::npos);
        }
    }
    SUBCASE("trailing bytes") {
        fixtures::write_file(path, bytes + "junk");
        CHECK_THROWS_AS(read_df_index(path), Error);
    }
    SUBCASE("df outside valid range") {
        // last 8 bytes are the final entry's df; forge a huge value
        std::string bad = bytes;
        for (int i = 0; i < 8; ++i) bad[bad.size() - 8 + i] = '\xFF';
        fixtures::write_file(path, bad);
        CHECK_THROWS_AS(read_df_index(path), Error);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_df_index(dir.file("absent.idx")), Error);
    }
}

TEST_CASE("surface map picks the most frequent surface per stem") {
    Corpus c = fixtures::build_corpus({
        {"d1", "D1", "adventures adventures adventure", {}},
        {"d2", "D2", "adventures", {}},
    });
    SurfaceMap map = build_surface_map(c, kNoStopwords);
    const std::string* s = map.find("adventur");
    REQUIRE(s != nullptr);
    CHECK(*s == "adventures");
    CHECK(map.find("absent") == nullptr);
}

TEST_CASE("surface map breaks frequency ties lexicographically") {
    Corpus c = fixtures::build_corpus({
        {"d1", "D1", "running runs", {}},
        {"d2", "D2", "runs running", {}},
    });
    SurfaceMap map = build_surface_map(c, kNoStopwords);
    const std::string* s = map.find("run");
    REQUIRE(s != nullptr);
    CHECK(*s == "running"); // running == runs on count; lexicographically first
}
