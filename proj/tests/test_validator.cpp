#include "bsynth/error.hpp"
#include "bsynth/validator.hpp"
#include "doctest.h"

using namespace bsynth;

namespace {

Distribution q13() { return {{1, Rational(1, 2)}, {3, Rational(1, 2)}}; }

// Mass 1 on the three-vertex path rooted at an end.
MarginalTable endpoint_path() {
    MarginalTable t(2, 2);
    t.level(0)[BallCode::tree(2, 0, tree::leaf())] = 1;
    t.level(1)[BallCode::tree(2, 1, tree::join({tree::leaf()}))] = 1;
    t.level(2)[BallCode::tree(2, 2, tree::join({tree::join({tree::leaf()})}))] = 1;
    return t;
}

MarginalTable plain_gw() {
    // Every vertex has degree 1 or 3 with probability 1/2; non-root vertices
    // therefore have 0 or 2 children, without size-biasing.
    return marginals_gw(q13(), {{0, Rational(1, 2)}, {2, Rational(1, 2)}}, 3, 3);
}

std::vector<MarginalTable> generator_tables() {
    return {marginals_regular(1, 3),
            marginals_regular(2, 3),
            marginals_regular(3, 3),
            marginals_ugw(q13(), 3, 3),
            marginals_ugw({{1, Rational(1, 3)}, {2, Rational(2, 3)}}, 2, 4),
            marginals_ugw({{0, Rational(1, 4)}, {1, Rational(1, 4)}, {2, Rational(1, 4)}, {3, Rational(1, 4)}}, 3, 3),
            marginals_atom(named_tree("path3"), 3, 2),
            marginals_atom(named_tree("binary7"), 3),
            marginals_atom(named_tree("k2"), 3),
            mixture({{marginals_regular(2, 3), Rational(1, 2)}, {marginals_atom(named_tree("k2"), 3, 2), Rational(1, 2)}}),
            mixture({{marginals_ugw(q13(), 3, 3), Rational(1, 3)},
                     {marginals_atom(named_tree("binary7"), 3, 3), Rational(2, 3)}})};
}

}  // namespace

TEST_CASE("induce_vec") {
    auto reg = induce_vec(marginals_regular(3, 2), 1);
    REQUIRE(reg.size() == 1);
    CHECK(reg.begin()->first.multiplicity() == 3);
    CHECK(reg.begin()->second == 3);

    auto p3 = induce_vec(marginals_atom(named_tree("path3"), 2), 1);
    REQUIRE(p3.size() == 2);
    for (const auto& [vec, m] : p3) CHECK(m == Rational(2, 3));

    for (const auto& t : generator_tables()) {
        Rational expected = 0;
        for (const auto& [ball, p] : t.level(1)) expected += p * root_degree(ball);
        for (unsigned r = 1; r <= t.depth(); ++r) {
            Rational total = 0;
            for (const auto& [vec, m] : induce_vec(t, r)) total += m;
            CHECK(total == expected);
        }
    }
    Rational mean = 0;
    for (const auto& [k, p] : q13()) mean += p * k;
    Rational total = 0;
    for (const auto& [vec, m] : induce_vec(marginals_ugw(q13(), 3, 3), 2)) total += m;
    CHECK(total == mean);
}

TEST_CASE("edge marginals") {
    auto line = edge_marginals(marginals_regular(2, 2), 0);
    REQUIRE(line.size() == 1);
    CHECK(line.begin()->second == 2);

    auto cubic = edge_marginals(marginals_regular(3, 2), 1);
    REQUIRE(cubic.size() == 1);
    CHECK(cubic.begin()->second == 3);
    CHECK(involute(cubic.begin()->first) == cubic.begin()->first);

    try {
        edge_marginals(marginals_regular(3, 2), 2);
        FAIL("expected InsufficientDepth");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InsufficientDepth);
    }

    for (const auto& t : generator_tables()) {
        for (unsigned r = 1; r + 1 <= t.depth(); ++r) {
            auto phi = edge_marginals(t, r);
            VecMarginal by_s, by_t;
            Rational total = 0, mirrored = 0;
            for (const auto& [e, m] : phi) {
                by_s[s_view(e)] += m;
                by_t[t_view(e)] += m;
                total += m;
                auto it = phi.find(involute(e));
                mirrored += it == phi.end() ? Rational(0) : it->second;
            }
            auto vec = induce_vec(t, r);
            CHECK(by_s == vec);
            CHECK(by_t == vec);
            CHECK(total == mirrored);
        }
    }
}

TEST_CASE("generator tables pass") {
    for (const auto& t : generator_tables()) {
        auto report = check(t, t.depth() - 1);
        CHECK(report.pass());
        CHECK(report.certified_radius == t.depth() - 1);
        if (!report.pass()) MESSAGE(format_report(report));
    }
}

TEST_CASE("endpoint-rooted path is rejected") {
    auto t = endpoint_path();
    t.verify();
    auto report = check(t, 1);
    CHECK(!report.pass());
    CHECK(report.certified_radius == 0u);
    // Hand evaluation: the edge from the end towards the middle carries the
    // whole orientation mass, its reverse carries none.
    bool seen = false;
    for (const auto& v : report.violations) {
        CHECK(v.radius == 1);
        if (v.equation == "e3" && v.lhs == 1 && v.rhs == 0) {
            seen = true;
            auto phi = EdgeBall{2, 1, tree::leaf(), tree::join({tree::leaf()})};
            CHECK(v.witness == phi.token());
        }
    }
    CHECK(seen);

    auto phi = edge_marginals(t, 1);
    VecMarginal by_t;
    for (const auto& [e, m] : phi) by_t[t_view(e)] += m;
    CHECK(by_t != induce_vec(t, 1));
}

TEST_CASE("non-size-biased Galton-Watson table is rejected at radius one") {
    auto t = plain_gw();
    t.verify();
    auto report = check(t, 2);
    CHECK(!report.pass());
    CHECK(report.certified_radius == 0u);
    // Mass of the edge-ball with a root of degree a+1 and a head with b
    // children: q_{a+1} (a+1) p_b.
    auto mass = [](unsigned a, unsigned b) -> Rational { return Rational(1, 2) * (a + 1) * Rational(1, 2) * (b == 0 || b == 2); };
    auto side = [](unsigned k) { return tree::join(std::vector<Code>(k, tree::leaf())); };
    auto phi = edge_marginals(t, 1);
    for (unsigned a : {0u, 2u}) {
        for (unsigned b : {0u, 2u}) CHECK(phi[EdgeBall{3, 1, side(a), side(b)}] == mass(a, b));
    }
    bool seen = false;
    for (const auto& v : report.violations) {
        if (v.equation == "e3" && v.radius == 1 && v.witness == EdgeBall{3, 1, side(0), side(2)}.token()) {
            seen = true;
            CHECK(v.lhs == Rational(1, 4));
            CHECK(v.rhs == Rational(3, 4));
        }
    }
    CHECK(seen);
}

TEST_CASE("tolerance and depth") {
    auto t = endpoint_path();
    CHECK(check(t, 1, 1).pass());
    CHECK_THROWS_AS(check(t, 2), Error);
    auto ugw = marginals_ugw(q13(), 3, 3);
    auto broken = ugw;
    broken.level(1).begin()->second += Rational(1, 100);
    auto report = check(broken, 2);
    CHECK(!report.pass());
    CHECK(!report.certified_radius.has_value());
    CHECK(check(broken, 2, Rational(1, 50)).pass());
}
