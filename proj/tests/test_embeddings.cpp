#include "doctest.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "trivia/embeddings.hpp"
#include "trivia/error.hpp"
#include "trivia/similarity.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace trivia;

namespace {

void check_unit_norm(std::span<const float> v) {
    double n = 0.0;
    for (float c : v) n += double(c) * double(c);
    CHECK(std::sqrt(n) == doctest::Approx(1.0).epsilon(1e-6));
}

} // namespace

TEST_CASE("text loader parses and normalizes") {
    fixtures::TempDir dir;
    auto path = dir.file("v.txt");
    fixtures::write_file(path, "2 3\naa 1 0 0\nbb 0 2 0\n");
    EmbeddingStore store = EmbeddingStore::load_text(path);
    CHECK(store.size() == 2);
    CHECK(store.dim() == 3);

    auto a = store.find("aa");
    REQUIRE(a.size() == 3);
    CHECK(a[0] == 1.0f);

    // bb had norm 2; stored unit-length
    auto b = store.find("bb");
    REQUIRE(b.size() == 3);
    CHECK(b[1] == doctest::Approx(1.0).epsilon(1e-7));
    check_unit_norm(b);

    CHECK(store.find("absent").empty());
    CHECK_FALSE(store.contains("absent"));
}

TEST_CASE("empty vocabulary with declared dimension") {
    fixtures::TempDir dir;
    auto path = dir.file("v.txt");
    fixtures::write_file(path, "0 5\n");
    EmbeddingStore store = EmbeddingStore::load_text(path);
    CHECK(store.size() == 0);
    CHECK(store.dim() == 5);
}

TEST_CASE("text loader reports malformed input with line numbers") {
    fixtures::TempDir dir;
    auto path = dir.file("v.txt");

    SUBCASE("wrong component count") {
        fixtures::write_file(path, "1 3\naa 1 0\n");
        try {
            EmbeddingStore::load_text(path);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::input);
            CHECK(std::string(e.what()).find("2") != std::string::npos);
        }
    }
    SUBCASE("bad header") {
        fixtures::write_file(path, "two 3\n");
        CHECK_THROWS_AS(EmbeddingStore::load_text(path), Error);
    }
    SUBCASE("fewer entries than declared") {
        fixtures::write_file(path, "2 3\naa 1 0 0\n");
        CHECK_THROWS_AS(EmbeddingStore::load_text(path), Error);
    }
    SUBCASE("more entries than declared") {
        fixtures::write_file(path, "1 3\naa 1 0 0\nbb 0 1 0\n");
        CHECK_THROWS_AS(EmbeddingStore::load_text(path), Error);
    }
    SUBCASE("zero vector names the term") {
        fixtures::write_file(path, "1 3\nbad 0 0 0\n");
        try {
            EmbeddingStore::load_text(path);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("bad") != std::string::npos);
        }
    }
    SUBCASE("non-numeric component") {
        fixtures::write_file(path, "1 3\naa 1 zero 0\n");
        CHECK_THROWS_AS(EmbeddingStore::load_text(path), Error);
    }
    SUBCASE("duplicate term") {
        fixtures::write_file(path, "2 3\naa 1 0 0\naa 0 1 0\n");
        CHECK_THROWS_AS(EmbeddingStore::load_text(path), Error);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(EmbeddingStore::load_text(dir.file("absent.txt")), Error);
    }
}

TEST_CASE("text round-trip preserves unit vectors bit-exactly") {
    fixtures::TempDir dir;
    EmbeddingStore store(4);
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20; ++i) {
        store.insert("t" + std::to_string(i), fixtures::random_gaussian(rng, 4));
    }
    auto p1 = dir.file("a.txt");
    auto p2 = dir.file("b.txt");
    store.write_text(p1);
    EmbeddingStore back = EmbeddingStore::load_text(p1);
    REQUIRE(back.size() == store.size());
    for (const auto& term : store.sorted_terms()) {
        auto v1 = store.find(term);
        auto v2 = back.find(term);
        REQUIRE(v1.size() == v2.size());
        CHECK(std::memcmp(v1.data(), v2.data(), v1.size() * sizeof(float)) == 0);
    }
    back.write_text(p2);
    CHECK(fixtures::read_file(p1) == fixtures::read_file(p2));
}

TEST_CASE("terms with whitespace are rejected at insert") {
    EmbeddingStore store(3);
    CHECK_THROWS_AS(store.insert("two words", {1.0f, 0.0f, 0.0f}), Error);
    CHECK_THROWS_AS(store.insert("line\nbreak", {1.0f, 0.0f, 0.0f}), Error);
}

TEST_CASE("binary format round-trips and matches the text loader") {
    fixtures::TempDir dir;
    EmbeddingStore store(5);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 8; ++i) {
        store.insert("w" + std::to_string(i), fixtures::random_gaussian(rng, 5));
    }
    auto bin = dir.file("v.bin");
    auto txt = dir.file("v.txt");
    store.write_binary(bin);
    store.write_text(txt);

    EmbeddingStore from_bin = EmbeddingStore::load_binary(bin);
    EmbeddingStore from_txt = EmbeddingStore::load_text(txt);
    REQUIRE(from_bin.size() == store.size());
    REQUIRE(from_txt.size() == store.size());
    for (const auto& term : store.sorted_terms()) {
        auto v0 = store.find(term);
        auto vb = from_bin.find(term);
        auto vt = from_txt.find(term);
        REQUIRE(vb.size() == v0.size());
        CHECK(std::memcmp(v0.data(), vb.data(), v0.size() * sizeof(float)) == 0);
        REQUIRE(vt.size() == v0.size());
        CHECK(std::memcmp(v0.data(), vt.data(), v0.size() * sizeof(float)) == 0);
    }

    auto bin2 = dir.file("v2.bin");
    from_bin.write_binary(bin2);
    CHECK(fixtures::read_file(bin) == fixtures::read_file(bin2));
}

TEST_CASE("binary loader reports truncation with a byte offset") {
    fixtures::TempDir dir;
    EmbeddingStore store(3);
    store.insert("aa", {1.0f, 0.0f, 0.0f});
    store.insert("bb", {0.0f, 1.0f, 0.0f});
    auto path = dir.file("v.bin");
    store.write_binary(path);
    std::string bytes = fixtures::read_file(path);

    SUBCASE("truncated vector") {
        fixtures::write_file(path, bytes.substr(0, bytes.size() - 5));
        try {
            EmbeddingStore::load_binary(path);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::input);
            CHECK(std::string(e.what()).find("byte") != std::string::npos);
        }
    }
    SUBCASE("trailing bytes") {
        fixtures::write_file(path, bytes + "xx");
        CHECK_THROWS_AS(EmbeddingStore::load_binary(path), Error);
    }
    SUBCASE("bad header") {
        fixtures::write_file(path, "nope\n");
        CHECK_THROWS_AS(EmbeddingStore::load_binary(path), Error);
    }
}

TEST_CASE("insert validates terms and vectors") {
    EmbeddingStore store(3);
    CHECK_THROWS_AS(store.insert("", {1.0f, 0.0f, 0.0f}), Error);
    CHECK_THROWS_AS(store.insert("aa", {1.0f, 0.0f}), Error);
    CHECK_THROWS_AS(store.insert("aa", {0.0f, 0.0f, 0.0f}), Error);
    float inf = std::numeric_limits<float>::infinity();
    CHECK_THROWS_AS(store.insert("aa", {inf, 0.0f, 0.0f}), Error);
    store.insert("aa", {1.0f, 0.0f, 0.0f});
    CHECK_THROWS_AS(store.insert("aa", {0.0f, 1.0f, 0.0f}), Error);
}

TEST_CASE("near-unit vectors keep their bits") {
    EmbeddingStore store(2);
    // norm differs from 1 by ~2e-8, inside the 1e-6 window
    std::vector<float> v{0.6f, 0.8f};
    store.insert("aa", v);
    auto got = store.find("aa");
    CHECK(got[0] == v[0]);
    CHECK(got[1] == v[1]);
}

TEST_CASE("word_similarity basics") {
    EmbeddingStore store(3);
    store.insert("xx", {1.0f, 0.0f, 0.0f});
    store.insert("yy", {0.0f, 1.0f, 0.0f});
    store.insert("zz", {0.6f, 0.8f, 0.0f});

    CHECK(word_similarity(store, "xx", "xx") == 1.0);
    CHECK(word_similarity(store, "xx", "yy") == 0.0);
    CHECK(*word_similarity(store, "xx", "zz") == doctest::Approx(0.6).epsilon(1e-7));
    CHECK_FALSE(word_similarity(store, "xx", "oov").has_value());
    CHECK_FALSE(word_similarity(store, "oov", "xx").has_value());
    CHECK_FALSE(word_similarity(store, "oov", "oov").has_value());
}

TEST_CASE("word_similarity is symmetric and clamped") {
    EmbeddingStore store(6);
    std::mt19937_64 rng(23);
    for (int i = 0; i < 12; ++i) {
        store.insert("g" + std::to_string(i), fixtures::random_gaussian(rng, 6));
    }
    TermVectorLookup lookup(store);
    auto terms = store.sorted_terms();
    for (const auto& a : terms) {
        for (const auto& b : terms) {
            double ab = *word_similarity(store, a, b);
            double ba = *word_similarity(store, b, a);
            CHECK(ab == ba);
            CHECK(ab <= 1.0);
            CHECK(ab >= -1.0);
            bool defined = false;
            double expected = oracles::word_sim(lookup, a, b, defined);
            CHECK(defined);
            CHECK(ab == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}
