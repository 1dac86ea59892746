#include <catch2/catch_amalgamated.hpp>

#include "debfab/label.hpp"
#include "support/bfs_oracle.hpp"

using namespace debfab;

namespace {

Label L(const std::string& text, uint32_t d = 2) {
    return Label::parse(text, d, static_cast<uint32_t>(text.size()));
}

std::vector<std::vector<uint32_t>> shift_digraph(uint32_t d, uint32_t m, GraphDirection dir) {
    uint64_t n = 1;
    for (uint32_t i = 0; i < m; ++i) n *= d;
    return oracle::digraph_from_neighbor_fn(
        static_cast<uint32_t>(n), d, [&](uint32_t u, uint32_t x) {
            Label lu = Label::from_value(u, d, m);
            Label v = dir == GraphDirection::Forward ? forward_neighbor(lu, x)
                                                     : reverse_neighbor(lu, x);
            return static_cast<uint32_t>(v.value());
        });
}

}  // namespace

TEST_CASE("label parse and textual round trip") {
    Label l = L("110");
    CHECK(l.length() == 3);
    CHECK(l.radix() == 2);
    CHECK(l.value() == 6);
    CHECK(l.to_string() == "110");
    CHECK(Label::parse("3102", 4, 4).value() == 3 * 64 + 1 * 16 + 0 + 2);
    CHECK(Label::from_value(6, 2, 3) == l);

    CHECK_THROWS_AS(Label::parse("12", 2, 2), label_error);   // digit >= d
    CHECK_THROWS_AS(Label::parse("110", 2, 4), label_error);  // wrong length
    CHECK_THROWS_AS(Label::parse("1x0", 2, 3), label_error);  // bad character
    CHECK_THROWS_AS(Label::from_value(8, 2, 3), label_error); // value >= d^m
}

TEST_CASE("forward neighbor shifts left and appends") {
    CHECK(forward_neighbor(L("110"), 1) == L("101"));
    CHECK(forward_neighbor(L("111"), 0) == L("110"));
    CHECK(forward_neighbor(L("000"), 0) == L("000"));  // self-loop
    CHECK_THROWS_AS(forward_neighbor(L("110"), 2), label_error);
}

TEST_CASE("reverse neighbor shifts right and prepends") {
    CHECK(reverse_neighbor(L("110"), 1) == L("111"));
    CHECK(reverse_neighbor(L("000"), 0) == L("000"));
    CHECK(reverse_neighbor(L("101"), 0) == L("010"));
    CHECK_THROWS_AS(reverse_neighbor(L("101"), 2), label_error);
}

TEST_CASE("longest overlap of suffix against prefix") {
    CHECK(longest_overlap(L("001"), L("111")) == 1);
    CHECK(longest_overlap(L("101"), L("101")) == 3);
    CHECK(longest_overlap(L("000"), L("111")) == 0);
    CHECK(longest_overlap(L("0110"), L("1001")) == 2);
    CHECK(longest_overlap(L("0100"), L("1001")) == 3);
    CHECK_THROWS_AS(longest_overlap(L("01"), L("111")), label_error);
    CHECK_THROWS_AS(longest_overlap(L("011"), Label::parse("011", 3, 3)), label_error);
}

TEST_CASE("shift distances on B(2,3)") {
    CHECK(debruijn_distance(L("001"), L("111"), GraphDirection::Forward) == 2);
    CHECK(debruijn_distance(L("010"), L("010"), GraphDirection::Forward) == 0);
    CHECK(debruijn_distance(L("010"), L("010"), GraphDirection::Reverse) == 0);
    CHECK(debruijn_distance(L("000"), L("111"), GraphDirection::Forward) == 3);
    CHECK(debruijn_distance(L("110"), L("111"), GraphDirection::Reverse) == 1);
    CHECK(debruijn_distance(L("110"), L("111"), GraphDirection::Forward) == 3);
}

TEST_CASE("reverse edge undoes forward edge") {
    for (uint32_t d : {2u, 3u}) {
        uint32_t m = d == 2 ? 5 : 3;
        uint64_t n = 1;
        for (uint32_t i = 0; i < m; ++i) n *= d;
        for (uint64_t u = 0; u < n; ++u) {
            Label lu = Label::from_value(u, d, m);
            for (Digit x = 0; x < d; ++x) {
                Label v = forward_neighbor(lu, x);
                CHECK(reverse_neighbor(v, lu.first_digit()) == lu);
            }
        }
    }
}

TEST_CASE("every vertex has exactly d distinct forward neighbors") {
    const uint32_t d = 2, m = 5;
    for (uint64_t u = 0; u < 32; ++u) {
        Label lu = Label::from_value(u, d, m);
        std::set<uint64_t> images;
        for (Digit x = 0; x < d; ++x) images.insert(forward_neighbor(lu, x).value());
        CHECK(images.size() == d);
    }
}

TEST_CASE("distance equals BFS distance over the shift digraphs") {
    for (uint32_t m : {3u, 5u}) {
        const uint32_t d = 2;
        const uint32_t n = 1u << m;
        for (GraphDirection dir : {GraphDirection::Forward, GraphDirection::Reverse}) {
            auto adj = shift_digraph(d, m, dir);
            for (uint32_t s = 0; s < n; ++s) {
                auto dist = oracle::bfs_distances(adj, s);
                Label ls = Label::from_value(s, d, m);
                for (uint32_t t = 0; t < n; ++t) {
                    Label lt = Label::from_value(t, d, m);
                    uint32_t got = debruijn_distance(ls, lt, dir);
                    CAPTURE(m, static_cast<int>(dir), ls.to_string(), lt.to_string());
                    CHECK(got == dist[t]);
                    CHECK(got <= m);
                    CHECK((got == 0) == (s == t));
                }
            }
        }
    }
}
