#include <sstream>

#include "bsynth/error.hpp"
#include "bsynth/rationalizer.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bsynth;

namespace {

Distribution q13() { return {{1, Rational(1, 2)}, {3, Rational(1, 2)}}; }

std::vector<MarginalTable> generator_tables() {
    return {marginals_regular(1, 4),
            marginals_regular(2, 4),
            marginals_regular(3, 4),
            marginals_ugw(q13(), 3, 4),
            marginals_ugw({{1, Rational(1, 3)}, {2, Rational(2, 3)}}, 2, 4),
            marginals_ugw({{0, Rational(1, 4)}, {1, Rational(1, 4)}, {2, Rational(1, 4)}, {3, Rational(1, 4)}}, 3, 4),
            marginals_atom(named_tree("path3"), 4, 2),
            marginals_atom(named_tree("binary7"), 4),
            marginals_atom(named_tree("k2"), 4),
            mixture({{marginals_regular(2, 4), Rational(1, 2)}, {marginals_atom(named_tree("k2"), 4, 2), Rational(1, 2)}})};
}

// One ball, one orientation of multiplicity l, one loop.
HGraph single_loop(std::uint32_t l) {
    HGraph h;
    h.degree_bound = 3;
    h.radius = 1;
    h.balls.push_back({"M", BallCode(), l, 1});
    h.vertices.push_back({"A", 0, l, "L", "L"});
    h.edges.push_back({0, 0, 0});
    h.out = {{0}};
    h.in = {{0}};
    h.orientations = {{0}};
    return h;
}

WeightSystem weights(Rational vertex, Rational edge) {
    WeightSystem ws;
    ws.vertex = {vertex};
    ws.edge = {edge};
    ws.isolated = {0};
    return ws;
}


}  // namespace

TEST_CASE("bounded-denominator approximation") {
    CHECK(limit_denominator(Rational(333333, 1000000), 100) == Rational(1, 3));
    CHECK(limit_denominator(Rational(3141592653, 1000000000), 1000) == Rational(355, 113));
    CHECK(limit_denominator(Rational(-3, 7), 10) == Rational(-3, 7));
    CHECK(limit_denominator(Rational(1, 1000), 10) == 0);
}

TEST_CASE("small H graphs") {
    auto line = build_H(marginals_regular(2, 4), 1);
    REQUIRE(line.graph.vertices.size() == 1);
    REQUIRE(line.graph.edges.size() == 1);
    CHECK(line.graph.loop_count() == 1);
    CHECK(line.exact.vertex[0] == 2);
    CHECK(line.exact.edge[0] == 2);

    auto k2 = build_H(marginals_atom(named_tree("k2"), 2), 0);
    REQUIRE(k2.graph.vertices.size() == 1);
    CHECK(k2.graph.loop_count() == 1);
    CHECK(k2.exact.vertex[0] == 1);

    auto cubic = build_H(marginals_regular(3, 3), 1);
    REQUIRE(cubic.graph.vertices.size() == 1);
    CHECK(cubic.graph.vertices[0].multiplicity == 3);
    CHECK(cubic.graph.loop_count() == 1);
    CHECK(cubic.exact.vertex[0] == 3);
    CHECK(cubic.exact.edge[0] == 3);

    auto p3 = build_H(marginals_atom(named_tree("path3"), 3), 1);
    CHECK(p3.graph.vertices.size() == 2);
    CHECK(p3.graph.edges.size() == 2);
    CHECK(p3.graph.loop_count() == 0);
}

TEST_CASE("build_H preconditions") {
    MarginalTable endpoint(2, 2);
    endpoint.level(0)[BallCode::tree(2, 0, tree::leaf())] = 1;
    endpoint.level(1)[BallCode::tree(2, 1, tree::join({tree::leaf()}))] = 1;
    endpoint.level(2)[BallCode::tree(2, 2, tree::join({tree::join({tree::leaf()})}))] = 1;
    try {
        build_H(endpoint, 0);
        FAIL("expected ValidationRequired");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ValidationRequired);
    }
    try {
        build_H(marginals_regular(3, 2), 1);
        FAIL("expected InsufficientDepth");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InsufficientDepth);
    }
}

TEST_CASE("generator tables give exact weight systems") {
    for (const auto& t : generator_tables()) {
        for (unsigned r = 0; r <= 2; ++r) {
            auto built = build_H(t, r);
            const auto& h = built.graph;
            CHECK(check_weights(h, built.exact, true).empty());
            for (std::size_t a = 0; a < h.vertices.size(); ++a) CHECK(!h.out[a].empty());
            for (const auto& e : h.edges) {
                CHECK(h.edges[e.reverse].from == e.to);
                CHECK(h.edges[e.reverse].to == e.from);
            }
            auto ws = rationalize(h, built.exact);
            CHECK(ws.delta == 0);
            CHECK(ws.vertex == built.exact.vertex);
            CHECK(ws.edge == built.exact.edge);
            CHECK(check_weights(h, ws).empty());
            Integer n = choose_N(h, ws);
            CHECK(n % 2 == 0);
        }
    }
}

TEST_CASE("choose_N examples") {
    CHECK(choose_N(single_loop(3), weights(Rational(1, 3), Rational(1, 6))) == 18);
    CHECK(choose_N(single_loop(1), weights(5, 7)) == 2);
    CHECK(choose_N(single_loop(3), weights(2, 2)) == 6);
}

TEST_CASE("choose_N is the least even admissible N") {
    int checked = 0;
    for (const auto& t : {marginals_atom(named_tree("path5"), 3),
                          marginals_ugw({{1, Rational(1, 3)}, {2, Rational(2, 3)}}, 2, 3),
                          mixture({{marginals_atom(named_tree("binary7"), 3, 3), Rational(1, 3)},
                                   {marginals_regular(3, 3), Rational(2, 3)}})}) {
        auto built = build_H(t, 1);
        Integer n = choose_N(built.graph, built.exact);
        REQUIRE(n <= 10000);
        CHECK(oracle::scan_N(built.graph, built.exact, 10000) == n);
        ++checked;
    }
    CHECK(checked == 3);
}

TEST_CASE("already rational weights pass through") {
    auto h = single_loop(1);
    auto ws = rationalize(h, weights(Rational(1, 3), Rational(1, 3)), {10});
    CHECK(ws.delta == 0);
    CHECK(ws.edge[0] == Rational(1, 3));
}

TEST_CASE("float-derived tables are snapped back") {
    std::istringstream in(
        "format_version 1\nd 1\ndepth 2\n"
        "level 0 1\n1.0.1.0 1 1\n"
        "level 1 2\n1.1.1.0 666667 1000000\n1.1.1.1.0 333333 1000000\n"
        "level 2 2\n1.2.1.0 666667 1000000\n1.2.1.1.0 333333 1000000\n");
    auto table = load_table(in);
    auto built = build_H(table, 0);
    REQUIRE(built.graph.edges.size() == 1);
    CHECK(built.exact.edge[0] == Rational(333333, 1000000));
    RationalizeOptions options;
    options.max_denominator = 100;
    auto ws = rationalize(built.graph, built.exact, options);
    CHECK(ws.edge[0] == Rational(1, 3));
    CHECK(ws.vertex[0] == Rational(1, 3));
    CHECK(ws.delta <= Rational(1, 1000000));
    CHECK(ws.delta > 0);
    CHECK(check_weights(built.graph, ws).empty());
    for (std::size_t m = 0; m < built.graph.balls.size(); ++m) {
        if (built.graph.balls[m].degree == 0) CHECK(ws.isolated[m] == Rational(2, 3));
    }
    CHECK(choose_N(built.graph, ws) == 6);
}

TEST_CASE("grid rounding keeps the support and the equations") {
    auto built = build_H(marginals_ugw(q13(), 3, 4), 2);
    Integer exact_n = choose_N(built.graph, built.exact);
    RationalizeOptions options;
    options.max_denominator = 1 << 10;
    options.rounding = Rounding::Grid;
    options.max_delta = Rational(1, 1000);
    auto ws = rationalize(built.graph, built.exact, options);
    CHECK(check_weights(built.graph, ws).empty());
    CHECK(ws.delta <= options.max_delta);
    CHECK(ws.delta > 0);
    for (std::size_t e = 0; e < ws.edge.size(); ++e) CHECK((ws.edge[e] > 0) == (built.exact.edge[e] > 0));
    for (std::size_t a = 0; a < ws.vertex.size(); ++a) CHECK(ws.vertex[a] > 0);
    CHECK(choose_N(built.graph, ws) < exact_n);
    CHECK(choose_N(built.graph, ws) <= 6 * ws.denominator);

    options.denominator_cap = 4;
    options.max_denominator = 2;
    try {
        rationalize(built.graph, built.exact, options);
        FAIL("expected InfeasibleRounding");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InfeasibleRounding);
    }
}
