#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <set>

#include "bsynth/ball.hpp"
#include "bsynth/directed.hpp"
#include "bsynth/error.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace bsynth;

namespace {

RootedGraph path(int n, int root) {
    RootedGraph g(static_cast<std::size_t>(n), root);
    for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
    return g;
}

RootedGraph star(int leaves) {
    RootedGraph g(static_cast<std::size_t>(leaves + 1), 0);
    for (int i = 1; i <= leaves; ++i) g.add_edge(0, i);
    return g;
}

RootedGraph relabel(const RootedGraph& g, const std::vector<int>& perm) {
    RootedGraph h(g.size(), perm[g.root]);
    for (std::size_t u = 0; u < g.size(); ++u) {
        for (int v : g.adjacency[u]) {
            if (static_cast<int>(u) < v) h.add_edge(perm[u], perm[v]);
        }
    }
    return h;
}

int eccentricity(const RootedGraph& g) {
    std::vector<int> dist(g.size(), -1);
    std::deque<int> q{g.root};
    dist[g.root] = 0;
    int best = 0;
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        best = std::max(best, dist[u]);
        for (int v : g.adjacency[u])
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
    }
    return best;
}

}  // namespace

TEST_CASE("single vertex gets the minimal code") {
    auto code = canonicalize(RootedGraph(1, 0), 3, 0);
    CHECK(code.token() == "3.0.1.0");
    CHECK(code.is_tree());
    CHECK(vertex_count(code) == 1);
    CHECK(root_degree(code) == 0);
}

TEST_CASE("path rooted at either end gets one code") {
    CHECK(canonicalize(path(2, 0), 1, 1) == canonicalize(path(2, 1), 1, 1));
    CHECK(canonicalize(path(4, 0), 2, 3) == canonicalize(path(4, 3), 2, 3));
    CHECK(canonicalize(path(4, 0), 2, 3) != canonicalize(path(4, 1), 2, 3));
}

TEST_CASE("canonicalize rejects degree and radius violations") {
    CHECK_THROWS_AS(canonicalize(star(4), 3, 1), Error);
    try {
        canonicalize(star(4), 3, 1);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegreeExceeded);
    }
    try {
        canonicalize(path(4, 0), 2, 2);
        FAIL("expected RadiusExceeded");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::RadiusExceeded);
    }
}

TEST_CASE("tree codes match brute-force isomorphism on all rooted trees up to 8 vertices") {
    for (int n = 1; n <= 8; ++n) {
        auto family = oracle::recursive_trees(n);
        CHECK(oracle::code_mismatches(family, static_cast<unsigned>(n), static_cast<unsigned>(n)) == 0);
        std::set<BallCode> distinct;
        for (const auto& g : family) distinct.insert(canonicalize(g, n, n));
        CHECK(distinct.size() == oracle::rooted_tree_count(n));
    }
}

TEST_CASE("general codes match brute-force isomorphism on rooted graphs up to 6 vertices") {
    for (int n = 1; n <= 6; ++n) {
        auto family = oracle::connected_rooted_graphs(n);
        CHECK(oracle::code_mismatches(family, static_cast<unsigned>(n), static_cast<unsigned>(n)) == 0);
    }
}

TEST_CASE("codes are invariant under random relabelling") {
    std::mt19937_64 rng(7);
    for (const auto& g : oracle::connected_rooted_graphs(5)) {
        std::vector<int> perm(g.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        CHECK(canonicalize(g, 4, 4) == canonicalize(relabel(g, perm), 4, 4));
    }
}

TEST_CASE("token round-trip and decoding") {
    for (const auto& g : oracle::connected_rooted_graphs(5)) {
        auto code = canonicalize(g, 4, 4);
        auto back = BallCode::from_token(code.token());
        CHECK(back == code);
        CHECK(oracle::rooted_isomorphic(to_rooted_graph(code), g));
    }
    CHECK_THROWS_AS(BallCode::from_token("3.1.1.2.1.0.0"), Error);  // children out of order
    CHECK_THROWS_AS(BallCode::from_token("3.1.1.4.0.0.0.0"), Error);  // degree 4 > 3
    CHECK_THROWS_AS(BallCode::from_token("3.1.x"), Error);
    CHECK_THROWS_AS(BallCode::from_token("3.1.1.1.1.0"), Error);  // depth 2 > radius 1
}

TEST_CASE("enumerate_tree_balls counts") {
    CHECK(enumerate_tree_balls(3, 1).size() == 4);
    CHECK(enumerate_tree_balls(1, 5).size() == 2);
    CHECK(enumerate_tree_balls(2, 2).size() == 6);
    CHECK_THROWS_AS(enumerate_tree_balls(3, 4, 1000), Error);
}

TEST_CASE("enumerate_tree_balls matches exhaustive generation with isomorphism dedup") {
    for (unsigned d = 1; d <= 3; ++d) {
        for (unsigned r = 0; r <= 2; ++r) {
            // Largest possible ball: 1 + d + d(d-1) + ...
            int max_n = 1, layer = 1;
            for (unsigned i = 0; i < r; ++i) {
                layer *= (i == 0 ? static_cast<int>(d) : static_cast<int>(d) - 1);
                max_n += layer;
            }
            std::vector<RootedGraph> reps;
            for (int n = 1; n <= max_n; ++n) {
                for (const auto& g : oracle::recursive_trees(n)) {
                    bool ok = eccentricity(g) <= static_cast<int>(r);
                    for (const auto& nb : g.adjacency) ok = ok && nb.size() <= d;
                    if (!ok) continue;
                    bool fresh = true;
                    for (const auto& h : reps) {
                        if (oracle::rooted_isomorphic(g, h)) {
                            fresh = false;
                            break;
                        }
                    }
                    if (fresh) reps.push_back(g);
                }
            }
            auto balls = enumerate_tree_balls(d, r);
            CHECK(balls.size() == reps.size());
            CHECK(std::is_sorted(balls.begin(), balls.end()));
            std::set<BallCode> from_reps;
            for (const auto& g : reps) from_reps.insert(canonicalize(g, d, r));
            CHECK(std::set<BallCode>(balls.begin(), balls.end()) == from_reps);
        }
    }
}

TEST_CASE("enumeration counts are monotone and truncation is onto") {
    for (unsigned d = 1; d <= 3; ++d) {
        for (unsigned r = 0; r <= 2; ++r) {
            auto here = enumerate_tree_balls(d, r);
            auto deeper = enumerate_tree_balls(d, r + 1);
            CHECK(deeper.size() >= here.size());
            if (d < 3) CHECK(enumerate_tree_balls(d + 1, r).size() >= here.size());
            std::set<BallCode> image;
            for (const auto& b : deeper) image.insert(truncate(b, r));
            CHECK(image == std::set<BallCode>(here.begin(), here.end()));
        }
    }
}

TEST_CASE("truncate examples") {
    for (const auto& b : enumerate_tree_balls(3, 2)) CHECK(truncate(b, 2) == b);
    auto line = canonicalize(path(5, 2), 2, 2);
    auto cut = truncate(line, 1);
    CHECK(cut == canonicalize(path(3, 1), 2, 1));
    CHECK(root_degree(cut) == 2);
    auto depth1 = enumerate_tree_balls(3, 1);
    std::set<BallCode> allowed(depth1.begin(), depth1.end());
    for (const auto& b : enumerate_tree_balls(3, 2)) CHECK(allowed.count(truncate(b, 1)) == 1);
    CHECK_THROWS_AS(truncate(line, 3), Error);
}

TEST_CASE("truncate on cyclic balls goes through the induced sub-ball") {
    RootedGraph c4(4, 0);
    for (int i = 0; i < 4; ++i) c4.add_edge(i, (i + 1) % 4);
    auto whole = canonicalize(c4, 2, 2);
    CHECK_FALSE(whole.is_tree());
    CHECK(truncate(whole, 1) == canonicalize(path(3, 1), 2, 1));
}

TEST_CASE("orientation examples") {
    auto s3 = canonicalize(star(3), 3, 1);
    auto o = orientations(s3);
    REQUIRE(o.size() == 1);
    CHECK(o[0].multiplicity() == 3);

    // Root with two children, one of which has a child.
    RootedGraph g(4, 0);
    g.add_edge(0, 1);
    g.add_edge(0, 2);
    g.add_edge(2, 3);
    auto lop = orientations(canonicalize(g, 3, 2));
    REQUIRE(lop.size() == 2);
    CHECK(lop[0].multiplicity() == 1);
    CHECK(lop[1].multiplicity() == 1);

    CHECK(orientations(canonicalize(RootedGraph(1, 0), 3, 2)).empty());
}

TEST_CASE("orientations match brute-force automorphism orbits") {
    for (unsigned d = 1; d <= 3; ++d) {
        for (unsigned r = 0; r <= 2; ++r) {
            for (const auto& ball : enumerate_tree_balls(d, r)) {
                auto g = to_rooted_graph(ball);
                auto autos = oracle::rooted_automorphisms(g);
                // Orbits of root edges (identified by the neighbour).
                std::set<std::set<int>> orbits;
                for (int nb : g.adjacency[g.root]) {
                    std::set<int> orbit;
                    for (const auto& a : autos) orbit.insert(a[nb]);
                    orbits.insert(orbit);
                }
                auto o = orientations(ball);
                CHECK(o.size() == orbits.size());
                unsigned total = 0;
                for (const auto& vec : o) {
                    total += vec.multiplicity();
                    auto og = to_oriented_graph(vec);
                    bool found = false;
                    for (const auto& orbit : orbits) {
                        if (orbit.count(og.head)) {
                            found = true;
                            CHECK(orbit.size() == vec.multiplicity());
                        }
                    }
                    CHECK(found);
                }
                CHECK(total == root_degree(ball));
            }
        }
    }
}

TEST_CASE("edge_ball_within examples") {
    // K2 seen from one end at radius 1.
    auto k2 = canonicalize(path(2, 0), 1, 1);
    auto phi = edge_ball_within(orientations(k2).at(0));
    CHECK(phi.radius == 0);
    CHECK(phi.root_side == tree::leaf());
    CHECK(phi.head_side == tree::leaf());
    CHECK(involute(phi) == phi);

    // 3-regular depth-2 ball: both sides are depth-1 nodes with two children.
    auto reg = enumerate_tree_balls(3, 2).back();
    auto ors = orientations(reg);
    REQUIRE(ors.size() == 1);
    auto e = edge_ball_within(ors[0]);
    CHECK(e.root_side == e.head_side);
    CHECK(s_view(e) == t_view(e));
    CHECK(s_view(e).ball() == enumerate_tree_balls(3, 1).back());
}

TEST_CASE("edge_ball_within agrees with the explicit union-of-balls construction") {
    for (unsigned d = 1; d <= 3; ++d) {
        for (unsigned r = 0; r <= 1; ++r) {
            for (const auto& ball : enumerate_tree_balls(d, r + 1)) {
                for (const auto& a : orientations(ball)) {
                    auto og = to_oriented_graph(a);
                    const auto& adj = og.graph.adjacency;
                    auto dx = oracle::induced_ball(adj, og.graph.root, r);
                    (void)dx;
                    // Vertex set {y : d(x,y) <= r or d(x',y) <= r}.
                    auto dist_from = [&](int s) {
                        std::vector<int> dist(adj.size(), -1);
                        std::deque<int> q{s};
                        dist[s] = 0;
                        while (!q.empty()) {
                            int u = q.front();
                            q.pop_front();
                            for (int v : adj[u])
                                if (dist[v] < 0) {
                                    dist[v] = dist[u] + 1;
                                    q.push_back(v);
                                }
                        }
                        return dist;
                    };
                    auto d0 = dist_from(og.graph.root), d1 = dist_from(og.head);
                    std::vector<int> local(adj.size(), -1);
                    int next = 0;
                    for (std::size_t y = 0; y < adj.size(); ++y)
                        if (d0[y] <= static_cast<int>(r) || d1[y] <= static_cast<int>(r)) local[y] = next++;
                    RootedGraph explicit_ball(static_cast<std::size_t>(next), local[og.graph.root]);
                    for (std::size_t y = 0; y < adj.size(); ++y)
                        for (int z : adj[y])
                            if (local[y] >= 0 && local[z] >= 0 && static_cast<int>(y) < z)
                                explicit_ball.add_edge(local[y], local[z]);
                    auto rep = to_oriented_graph(edge_ball_within(a));
                    CHECK(oracle::oriented_isomorphic(explicit_ball, local[og.head], rep.graph, rep.head));
                }
            }
        }
    }
}

TEST_CASE("involution algebra on every edge-ball at d <= 3, r <= 2") {
    std::size_t checked = 0;
    for (unsigned d = 1; d <= 3; ++d) {
        for (unsigned r = 0; r <= 2; ++r) {
            for (const auto& ball : enumerate_tree_balls(d, r + 1)) {
                for (const auto& a : orientations(ball)) {
                    auto phi = edge_ball_within(a);
                    CHECK(involute(involute(phi)) == phi);
                    if (r >= 1) {
                        CHECK(t_view(involute(phi)) == s_view(phi));
                        CHECK(s_view(involute(phi)) == t_view(phi));
                        CHECK(s_view(phi) == truncate(a, r));
                    }
                    ++checked;
                }
            }
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("3-path views") {
    // Endpoint -> centre of a 3-path, radius 1.
    auto a = orientations(canonicalize(path(3, 0), 2, 2)).at(0);
    auto phi = edge_ball_within(a);
    CHECK(root_degree(s_view(phi).ball()) == 1);
    CHECK(root_degree(t_view(phi).ball()) == 2);
    CHECK(s_view(involute(phi)) == t_view(phi));
}
