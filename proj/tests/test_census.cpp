#include <algorithm>
#include <numeric>
#include <random>

#include "bsynth/census.hpp"
#include "bsynth/error.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bsynth;

namespace {

Graph cycle(int n) {
    Graph g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
    return g;
}

Graph complete(int n) {
    Graph g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
    return g;
}

Graph petersen() {
    Graph g(10);
    for (int i = 0; i < 5; ++i) {
        g.add_edge(i, (i + 1) % 5);
        g.add_edge(i, i + 5);
        g.add_edge(i + 5, (i + 2) % 5 + 5);
    }
    return g;
}

Graph from_adjacency(std::vector<std::vector<int>> adj) {
    Graph g;
    g.adjacency = std::move(adj);
    return g;
}

Graph permuted(const Graph& g, std::uint64_t seed) {
    std::vector<int> perm(g.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    Graph h(g.size());
    for (auto [u, v] : g.edges()) h.add_edge(perm[u], perm[v]);
    return h;
}

}  // namespace

TEST_CASE("vertex-transitive graphs have one ball class") {
    auto c6 = ball_census(cycle(6), 2, 1);
    CHECK(c6.counts.size() == 1);
    CHECK(c6.frequency(c6.counts.begin()->first) == 1);
    CHECK(c6.tree_ball_fraction() == 1);

    auto k4 = ball_census(complete(4), 3, 1);
    REQUIRE(k4.counts.size() == 1);
    CHECK(vertex_count(k4.counts.begin()->first) == 4);
    CHECK(!k4.counts.begin()->first.is_tree());
    CHECK(k4.tree_ball_fraction() == 0);

    auto c4 = ball_census(cycle(4), 2, 2);
    CHECK(c4.counts.size() == 1);
    CHECK(c4.tree_ball_fraction() == 0);
}

TEST_CASE("tv distance") {
    auto c6 = cycle(6);
    auto reg = marginals_regular(2, 3);
    CHECK(tv_distance(ball_census(c6, 2, 1), reg).tv == 0);
    CHECK(tv_distance(ball_census(c6, 2, 2), reg).tv == 0);
    auto wrap = tv_distance(ball_census(c6, 2, 3), reg);
    CHECK(wrap.tv == 1);
    CHECK(wrap.max_deviation == 1);

    auto p3 = named_tree("path3");
    auto atom = marginals_atom(p3, 2, 2);
    CHECK(tv_distance(ball_census(p3, 2, 2), atom).tv == 0);
    CHECK(tv_distance(ball_census(p3, 2, 1), reg).tv == Rational(2, 3));

    CHECK_THROWS_AS(tv_distance(ball_census(c6, 3, 1), reg), Error);
    CHECK_THROWS_AS(tv_distance(ball_census(c6, 2, 4), reg), Error);
}

TEST_CASE("girth") {
    CHECK(!girth(named_tree("binary15")).has_value());
    CHECK(girth(cycle(6)) == 6u);
    CHECK(girth(complete(4)) == 3u);
    CHECK(girth(petersen()) == 5u);
    CHECK(girth(cycle(4)) == 4u);
}

TEST_CASE("petersen girth agrees with a cycle search oracle") {
    // Shortest cycle through a vertex by BFS over all vertices, plain form.
    auto g = petersen();
    unsigned best = ~0u;
    for (int s = 0; s < 10; ++s) {
        for (int t : g.adjacency[s]) {
            // Remove edge s-t and find the shortest s-t path.
            std::vector<int> dist(10, -1);
            std::vector<int> queue{s};
            dist[s] = 0;
            for (std::size_t i = 0; i < queue.size(); ++i) {
                int u = queue[i];
                for (int v : g.adjacency[u]) {
                    if ((u == s && v == t) || (u == t && v == s) || dist[v] >= 0) continue;
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
            if (dist[t] > 0) best = std::min(best, static_cast<unsigned>(dist[t] + 1));
        }
    }
    CHECK(best == 5);
}

TEST_CASE("random 3-regular graph is locally tree-like") {
    auto adj = oracle::random_regular(10000, 3, 7);
    auto g = from_adjacency(adj);
    auto report = ball_census(g, 3, 2, {12, 4});
    CHECK(report.vertices == 10000);
    CHECK(report.tree_ball_fraction() > Rational(9, 10));
    CHECK(report.tree_ball_fraction() <= 1);
    std::uint64_t acyclic = 0;
    for (int v = 0; v < 10000; ++v) {
        auto ball = oracle::induced_ball(adj, v, 2);
        if (ball.edge_count() + 1 == ball.size()) ++acyclic;
    }
    CHECK(report.tree_balls == acyclic);
    CHECK(tv_distance(report, marginals_regular(3, 2)).tv == 1 - report.tree_ball_fraction());
}

TEST_CASE("census invariants") {
    auto g = from_adjacency(oracle::random_regular(600, 3, 11));
    for (int k = 0; k < 30; ++k) {
        auto [u, v] = g.edges()[static_cast<std::size_t>(k) * 7];
        auto& a = g.adjacency[u];
        a.erase(std::find(a.begin(), a.end(), v));
        auto& b = g.adjacency[v];
        b.erase(std::find(b.begin(), b.end(), u));
    }
    const CensusOptions wide{40, 1};
    for (unsigned r = 0; r <= 3; ++r) {
        auto report = ball_census(g, 3, r, wide);
        std::uint64_t total = 0;
        for (const auto& [ball, c] : report.counts) total += c;
        CHECK(total == g.size());
        CHECK(ball_census(permuted(g, r + 100), 3, r, wide) == report);
        if (r < 3) CHECK(truncate(ball_census(g, 3, r + 1, wide), r) == report);
    }
}

TEST_CASE("worker count does not change the census") {
    auto g = from_adjacency(oracle::random_regular(5000, 3, 3));
    auto serial = ball_census(g, 3, 2, {12, 1});
    for (unsigned w : {4u, 16u}) CHECK(ball_census(g, 3, 2, {12, w}) == serial);
}

TEST_CASE("census limits") {
    CHECK_THROWS_AS(ball_census(complete(4), 2, 1), Error);
    try {
        ball_census(complete(4), 3, 1, {3, 1});
        FAIL("expected BallTooLarge");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BallTooLarge);
    }
    // Trees are not capped.
    CHECK(ball_census(named_tree("binary15"), 3, 3, {3, 1}).vertices == 15);
}
