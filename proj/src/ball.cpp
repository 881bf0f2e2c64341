#include "bsynth/ball.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <functional>
#include <map>
#include <sstream>

#include "bsynth/error.hpp"

namespace bsynth {

std::size_t RootedGraph::edge_count() const {
    std::size_t twice = 0;
    for (const auto& nbrs : adjacency) twice += nbrs.size();
    return twice / 2;
}

void RootedGraph::add_edge(int u, int v) {
    adjacency[u].push_back(v);
    adjacency[v].push_back(u);
}

BallCode BallCode::tree(unsigned d, unsigned r, Code body) {
    Code code{d, r, 1};
    code.insert(code.end(), body.begin(), body.end());
    return BallCode(std::move(code));
}

BallCode BallCode::general(unsigned d, unsigned r, Code body) {
    Code code{d, r, 0};
    code.insert(code.end(), body.begin(), body.end());
    return BallCode(std::move(code));
}

std::string BallCode::token() const {
    std::string out;
    for (std::size_t i = 0; i < code_.size(); ++i) {
        if (i) out += '.';
        out += std::to_string(code_[i]);
    }
    return out;
}

namespace {

std::vector<int> bfs_distances(const RootedGraph& g, int source) {
    std::vector<int> dist(g.size(), -1);
    std::deque<int> queue{source};
    dist[source] = 0;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int v : g.adjacency[u]) {
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    return dist;
}

void check_simple(const RootedGraph& g) {
    for (std::size_t u = 0; u < g.size(); ++u) {
        auto nbrs = g.adjacency[u];
        std::sort(nbrs.begin(), nbrs.end());
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
            if (nbrs[i] < 0 || static_cast<std::size_t>(nbrs[i]) >= g.size()) {
                throw Error(ErrorKind::InvalidArgument, "neighbour id out of range");
            }
            if (nbrs[i] == static_cast<int>(u)) throw Error(ErrorKind::InvalidArgument, "self-loop");
            if (i && nbrs[i] == nbrs[i - 1]) throw Error(ErrorKind::InvalidArgument, "parallel edge");
        }
    }
}

Code tree_body(const RootedGraph& g, const std::vector<int>& dist) {
    std::vector<int> order(g.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return dist[a] > dist[b]; });
    std::vector<Code> code(g.size());
    for (int v : order) {
        std::vector<Code> kids;
        for (int u : g.adjacency[v]) {
            if (dist[u] == dist[v] + 1) kids.push_back(std::move(code[u]));
        }
        code[v] = tree::join(std::move(kids));
    }
    return std::move(code[g.root]);
}

// Colour refinement: split colour classes by the multiset of neighbour
// colours until stable. New colours are ranks of sorted signatures, so the
// result is isomorphism invariant and keeps the previous class order.
std::vector<int> refine(const std::vector<std::vector<int>>& adj, std::vector<int> colors) {
    const std::size_t n = colors.size();
    std::size_t classes = 0;
    {
        auto sorted = colors;
        std::sort(sorted.begin(), sorted.end());
        classes = std::unique(sorted.begin(), sorted.end()) - sorted.begin();
    }
    while (true) {
        std::vector<std::vector<int>> sig(n);
        for (std::size_t v = 0; v < n; ++v) {
            sig[v].push_back(colors[v]);
            std::vector<int> nb;
            for (int u : adj[v]) nb.push_back(colors[u]);
            std::sort(nb.begin(), nb.end());
            sig[v].insert(sig[v].end(), nb.begin(), nb.end());
        }
        auto keys = sig;
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        std::vector<int> next(n);
        for (std::size_t v = 0; v < n; ++v) {
            next[v] = static_cast<int>(std::lower_bound(keys.begin(), keys.end(), sig[v]) - keys.begin());
        }
        colors = std::move(next);
        if (keys.size() == classes) break;
        classes = keys.size();
    }
    return colors;
}

struct CoreSearch {
    const std::vector<std::vector<int>>& adj;
    const std::vector<Code>& hang;
    Code best;

    Code encode(const std::vector<int>& position) const {
        const std::size_t n = adj.size();
        std::vector<int> at(n);
        for (std::size_t v = 0; v < n; ++v) at[position[v]] = static_cast<int>(v);
        Code out{static_cast<std::uint32_t>(n)};
        for (std::size_t i = 0; i < n; ++i) {
            const auto& h = hang[at[i]];
            out.insert(out.end(), h.begin(), h.end());
        }
        std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
        for (std::size_t v = 0; v < n; ++v) {
            for (int u : adj[v]) {
                auto a = static_cast<std::uint32_t>(position[v]);
                auto b = static_cast<std::uint32_t>(position[u]);
                if (a < b) edges.emplace_back(a, b);
            }
        }
        std::sort(edges.begin(), edges.end());
        out.push_back(static_cast<std::uint32_t>(edges.size()));
        for (auto [a, b] : edges) {
            out.push_back(a);
            out.push_back(b);
        }
        return out;
    }

    void run(std::vector<int> colors) {
        colors = refine(adj, std::move(colors));
        const std::size_t n = colors.size();
        std::vector<int> count(n, 0);
        for (int c : colors) ++count[c];
        int target = -1;
        for (std::size_t c = 0; c < n; ++c) {
            if (count[c] > 1) {
                target = static_cast<int>(c);
                break;
            }
        }
        if (target < 0) {
            Code enc = encode(colors);
            if (best.empty() || enc < best) best = std::move(enc);
            return;
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (colors[v] != target) continue;
            std::vector<int> split(n);
            for (std::size_t u = 0; u < n; ++u) {
                split[u] = 2 * colors[u] + ((colors[u] == target && u != v) ? 1 : 0);
            }
            run(std::move(split));
        }
    }
};

Code general_body(const RootedGraph& g, const std::vector<int>& dist) {
    const std::size_t n = g.size();
    // Peel hanging trees so only the part carrying cycles (plus the root)
    // needs the exponential search.
    std::vector<int> degree(n);
    for (std::size_t v = 0; v < n; ++v) degree[v] = static_cast<int>(g.adjacency[v].size());
    std::vector<bool> removed(n, false);
    std::vector<std::vector<Code>> hanging(n);
    std::deque<int> queue;
    for (std::size_t v = 0; v < n; ++v) {
        if (static_cast<int>(v) != g.root && degree[v] == 1) queue.push_back(static_cast<int>(v));
    }
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        removed[v] = true;
        Code code = tree::join(std::move(hanging[v]));
        for (int u : g.adjacency[v]) {
            if (removed[u]) continue;
            hanging[u].push_back(std::move(code));
            if (--degree[u] == 1 && u != g.root) queue.push_back(u);
            break;
        }
    }
    std::vector<int> core_id(n, -1);
    std::vector<int> core;
    for (std::size_t v = 0; v < n; ++v) {
        if (!removed[v]) {
            core_id[v] = static_cast<int>(core.size());
            core.push_back(static_cast<int>(v));
        }
    }
    std::vector<std::vector<int>> adj(core.size());
    std::vector<Code> hang(core.size());
    for (std::size_t i = 0; i < core.size(); ++i) {
        int v = core[i];
        for (int u : g.adjacency[v]) {
            if (core_id[u] >= 0) adj[i].push_back(core_id[u]);
        }
        hang[i] = tree::join(std::move(hanging[v]));
    }
    std::vector<Code> ranks = hang;
    std::sort(ranks.begin(), ranks.end());
    ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
    std::vector<std::array<int, 4>> key(core.size());
    for (std::size_t i = 0; i < core.size(); ++i) {
        int v = core[i];
        key[i] = {v == g.root ? 0 : 1, dist[v],
                  static_cast<int>(std::lower_bound(ranks.begin(), ranks.end(), hang[i]) - ranks.begin()),
                  static_cast<int>(adj[i].size())};
    }
    auto sorted = key;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<int> colors(core.size());
    for (std::size_t i = 0; i < core.size(); ++i) {
        colors[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), key[i]) - sorted.begin());
    }
    CoreSearch search{adj, hang, {}};
    search.run(std::move(colors));
    return std::move(search.best);
}

}  // namespace

BallCode canonicalize(const RootedGraph& g, unsigned d, unsigned r) {
    if (g.size() == 0 || g.root < 0 || static_cast<std::size_t>(g.root) >= g.size()) {
        throw Error(ErrorKind::InvalidArgument, "rooted graph needs a valid root");
    }
    check_simple(g);
    for (const auto& nbrs : g.adjacency) {
        if (nbrs.size() > d) {
            throw Error(ErrorKind::DegreeExceeded,
                        "vertex of degree " + std::to_string(nbrs.size()) + " exceeds d = " + std::to_string(d));
        }
    }
    auto dist = bfs_distances(g, g.root);
    for (int x : dist) {
        if (x < 0 || x > static_cast<int>(r)) {
            throw Error(ErrorKind::RadiusExceeded, "vertex outside radius " + std::to_string(r));
        }
    }
    if (g.edge_count() + 1 == g.size()) return BallCode::tree(d, r, tree_body(g, dist));
    return BallCode::general(d, r, general_body(g, dist));
}

namespace {

int attach_planted(RootedGraph& g, CodeView code, std::size_t& pos) {
    int v = static_cast<int>(g.adjacency.size());
    g.adjacency.emplace_back();
    std::uint32_t k = code[pos++];
    for (std::uint32_t i = 0; i < k; ++i) {
        int c = attach_planted(g, code, pos);
        g.add_edge(v, c);
    }
    return v;
}

RootedGraph decode_general(CodeView body) {
    std::size_t pos = 0;
    auto need = [&](std::size_t count) {
        if (pos + count > body.size()) throw Error(ErrorKind::ParseError, "truncated ball code");
    };
    need(1);
    std::uint32_t nc = body[pos++];
    if (nc == 0 || nc > body.size()) throw Error(ErrorKind::ParseError, "bad core size");
    RootedGraph g(nc, 0);
    std::vector<std::size_t> hang_at(nc);
    for (std::uint32_t i = 0; i < nc; ++i) {
        hang_at[i] = pos;
        pos = tree::skip(body, pos);
    }
    need(1);
    std::uint32_t m = body[pos++];
    need(2 * static_cast<std::size_t>(m));
    for (std::uint32_t e = 0; e < m; ++e) {
        std::uint32_t a = body[pos++], b = body[pos++];
        if (a >= nc || b >= nc || a >= b) throw Error(ErrorKind::ParseError, "bad core edge");
        g.add_edge(static_cast<int>(a), static_cast<int>(b));
    }
    if (pos != body.size()) throw Error(ErrorKind::ParseError, "trailing data in ball code");
    for (std::uint32_t i = 0; i < nc; ++i) {
        std::size_t p = hang_at[i];
        std::uint32_t k = body[p++];
        for (std::uint32_t j = 0; j < k; ++j) {
            int c = attach_planted(g, body, p);
            g.add_edge(static_cast<int>(i), c);
        }
    }
    return g;
}

}  // namespace

RootedGraph to_rooted_graph(const BallCode& ball) {
    if (ball.is_tree()) {
        RootedGraph g;
        std::size_t pos = 0;
        attach_planted(g, ball.body(), pos);
        g.root = 0;
        return g;
    }
    return decode_general(ball.body());
}

BallCode BallCode::from_token(std::string_view token) {
    Code code;
    std::size_t start = 0;
    while (start <= token.size()) {
        std::size_t end = token.find('.', start);
        if (end == std::string_view::npos) end = token.size();
        auto part = token.substr(start, end - start);
        if (part.empty() || part.size() > 9) {
            throw Error(ErrorKind::ParseError, "bad ball token '" + std::string(token) + "'");
        }
        std::uint32_t value = 0;
        for (char c : part) {
            if (c < '0' || c > '9') throw Error(ErrorKind::ParseError, "bad ball token '" + std::string(token) + "'");
            value = value * 10 + static_cast<std::uint32_t>(c - '0');
        }
        code.push_back(value);
        start = end + 1;
    }
    if (code.size() < 4 || code[2] > 1 || code[0] == 0) {
        throw Error(ErrorKind::ParseError, "bad ball token '" + std::string(token) + "'");
    }
    BallCode ball(code);
    // Round-trip through a representative so only canonical codes survive.
    RootedGraph g;
    try {
        if (ball.is_tree() && !tree::is_canonical(ball.body())) {
            throw Error(ErrorKind::ParseError, "non-canonical tree code");
        }
        g = to_rooted_graph(ball);
        if (canonicalize(g, ball.degree_bound(), ball.radius()) != ball) {
            throw Error(ErrorKind::ParseError, "non-canonical ball code");
        }
    } catch (const Error& e) {
        throw Error(ErrorKind::ParseError, "ball token '" + std::string(token) + "': " + e.what());
    }
    return ball;
}

std::size_t vertex_count(const BallCode& ball) {
    if (ball.is_tree()) return tree::size(ball.body());
    return to_rooted_graph(ball).size();
}

unsigned root_degree(const BallCode& ball) {
    if (ball.is_tree()) return ball.body()[0];
    auto g = to_rooted_graph(ball);
    return static_cast<unsigned>(g.adjacency[g.root].size());
}

BallCode truncate(const BallCode& ball, unsigned radius) {
    if (radius > ball.radius()) {
        throw Error(ErrorKind::BadRadius, "cannot truncate radius " + std::to_string(ball.radius()) + " ball to " +
                                              std::to_string(radius));
    }
    if (ball.is_tree()) return BallCode::tree(ball.degree_bound(), radius, tree::truncate(ball.body(), radius));
    auto g = to_rooted_graph(ball);
    auto dist = bfs_distances(g, g.root);
    std::vector<int> keep(g.size(), -1);
    int next = 0;
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (dist[v] <= static_cast<int>(radius)) keep[v] = next++;
    }
    RootedGraph sub(static_cast<std::size_t>(next), keep[g.root]);
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (keep[v] < 0) continue;
        for (int u : g.adjacency[v]) {
            if (keep[u] >= 0) sub.adjacency[keep[v]].push_back(keep[u]);
        }
    }
    return canonicalize(sub, ball.degree_bound(), radius);
}

BallCode with_radius(const BallCode& ball, unsigned radius) {
    if (ball.radius() == radius) return ball;
    if (ball.is_tree()) {
        if (tree::depth(ball.body()) > radius) {
            throw Error(ErrorKind::BadRadius, "ball deeper than radius " + std::to_string(radius));
        }
        Code body(ball.body().begin(), ball.body().end());
        return BallCode::tree(ball.degree_bound(), radius, std::move(body));
    }
    return canonicalize(to_rooted_graph(ball), ball.degree_bound(), radius);
}

namespace {

// Number of multisets of size <= k over m items, saturating at `cap + 1`.
std::size_t multiset_count(std::size_t m, unsigned k, std::size_t cap) {
    std::size_t total = 0;
    for (unsigned size = 0; size <= k; ++size) {
        // C(m + size - 1, size) computed incrementally with saturation.
        long double c = 1;
        for (unsigned i = 1; i <= size; ++i) c = c * static_cast<long double>(m + i - 1) / i;
        if (m == 0 && size > 0) c = 0;
        if (c > static_cast<long double>(cap)) return cap + 1;
        total += static_cast<std::size_t>(c + 0.5L);
        if (total > cap) return cap + 1;
    }
    return total;
}

void for_each_multiset(const std::vector<Code>& items, unsigned k,
                       const std::function<void(const std::vector<std::size_t>&)>& visit) {
    std::vector<std::size_t> idx;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
        visit(idx);
        if (idx.size() == k) return;
        for (std::size_t i = from; i < items.size(); ++i) {
            idx.push_back(i);
            rec(i);
            idx.pop_back();
        }
    };
    rec(0);
}

std::vector<Code> planted_trees(unsigned depth, unsigned max_children, std::size_t cap) {
    if (depth == 0) return {tree::leaf()};
    auto below = planted_trees(depth - 1, max_children, cap);
    if (multiset_count(below.size(), max_children, cap) > cap) {
        throw Error(ErrorKind::ExplosionGuard, "tree enumeration exceeds cap " + std::to_string(cap));
    }
    std::vector<Code> out;
    for_each_multiset(below, max_children, [&](const std::vector<std::size_t>& idx) {
        Code c{static_cast<std::uint32_t>(idx.size())};
        for (auto i : idx) c.insert(c.end(), below[i].begin(), below[i].end());
        out.push_back(std::move(c));
    });
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<BallCode> enumerate_tree_balls(unsigned d, unsigned r, std::size_t cap) {
    if (d == 0) throw Error(ErrorKind::InvalidArgument, "degree bound must be positive");
    std::vector<Code> roots;
    if (r == 0) {
        roots.push_back(tree::leaf());
    } else {
        auto branches = planted_trees(r - 1, d - 1, cap);
        if (multiset_count(branches.size(), d, cap) > cap) {
            throw Error(ErrorKind::ExplosionGuard, "tree enumeration exceeds cap " + std::to_string(cap));
        }
        for_each_multiset(branches, d, [&](const std::vector<std::size_t>& idx) {
            Code c{static_cast<std::uint32_t>(idx.size())};
            for (auto i : idx) c.insert(c.end(), branches[i].begin(), branches[i].end());
            roots.push_back(std::move(c));
        });
    }
    std::vector<BallCode> out;
    out.reserve(roots.size());
    for (auto& c : roots) out.push_back(BallCode::tree(d, r, std::move(c)));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace bsynth
