#include "bsynth/directed.hpp"

#include <algorithm>

#include "bsynth/error.hpp"

namespace bsynth {

namespace {

std::string join_tokens(std::initializer_list<CodeView> parts) {
    std::string out;
    for (auto part : parts) {
        for (auto x : part) {
            if (!out.empty()) out += '.';
            out += std::to_string(x);
        }
    }
    return out;
}

}  // namespace

VecBall::VecBall(BallCode ball, std::uint32_t edge) : ball_(std::move(ball)) {
    if (!ball_.is_tree()) throw Error(ErrorKind::InvalidArgument, "orientations are defined on tree balls");
    auto kids = tree::children(ball_.body());
    if (edge >= kids.size()) throw Error(ErrorKind::InvalidArgument, "root edge index out of range");
    std::uint32_t first = edge;
    while (first > 0 && kids[first - 1] == kids[edge]) --first;
    edge_ = first;
    multiplicity_ = static_cast<std::uint32_t>(std::count(kids.begin(), kids.end(), kids[edge]));
}

VecBall VecBall::from_parts(unsigned d, unsigned r, const Code& tail, const Code& head) {
    auto kids = tree::children(tail);
    kids.push_back(head);
    Code body = tree::join(std::move(kids));
    auto sorted = tree::children(body);
    auto pos = std::lower_bound(sorted.begin(), sorted.end(), head) - sorted.begin();
    return VecBall(BallCode::tree(d, r, std::move(body)), static_cast<std::uint32_t>(pos));
}

Code VecBall::tail() const {
    auto kids = tree::children(ball_.body());
    kids.erase(kids.begin() + edge_);
    return tree::join(std::move(kids));
}

Code VecBall::head() const { return tree::children(ball_.body())[edge_]; }

std::string VecBall::token() const { return ball_.token() + "@" + std::to_string(edge_); }

std::string EdgeBall::token() const {
    Code prefix{degree_bound, radius};
    return join_tokens({prefix, root_side, head_side});
}

std::vector<VecBall> orientations(const BallCode& ball) {
    if (!ball.is_tree()) throw Error(ErrorKind::InvalidArgument, "orientations are defined on tree balls");
    auto kids = tree::children(ball.body());
    std::vector<VecBall> out;
    for (std::uint32_t i = 0; i < kids.size(); ++i) {
        if (i > 0 && kids[i] == kids[i - 1]) continue;
        out.emplace_back(ball, i);
    }
    return out;
}

EdgeBall edge_ball_within(const VecBall& outer) {
    if (outer.radius() == 0) throw Error(ErrorKind::BadRadius, "a radius-0 ball has no edge-ball");
    const unsigned r = outer.radius() - 1;
    return EdgeBall{outer.degree_bound(), r, tree::truncate(outer.tail(), r), tree::truncate(outer.head(), r)};
}

VecBall s_view(const EdgeBall& phi) {
    // A radius-0 ball has no room for its distinguished edge.
    if (phi.radius == 0) throw Error(ErrorKind::BadRadius, "views of a radius-0 edge-ball are undefined");
    return VecBall::from_parts(phi.degree_bound, phi.radius, phi.root_side,
                               tree::truncate(phi.head_side, phi.radius - 1));
}

VecBall t_view(const EdgeBall& phi) { return s_view(involute(phi)); }

EdgeBall involute(const EdgeBall& phi) { return EdgeBall{phi.degree_bound, phi.radius, phi.head_side, phi.root_side}; }

OrientedGraph to_oriented_graph(const VecBall& vec) {
    OrientedGraph out{to_rooted_graph(vec.ball()), -1};
    // Preorder numbering: the root's children appear in canonical order.
    auto kids = tree::children(vec.ball().body());
    int next = 1;
    for (std::uint32_t i = 0; i < vec.edge(); ++i) next += static_cast<int>(kids[i].size());
    out.head = next;
    return out;
}

namespace {

int attach(RootedGraph& g, CodeView code, std::size_t& pos) {
    int v = static_cast<int>(g.adjacency.size());
    g.adjacency.emplace_back();
    std::uint32_t k = code[pos++];
    for (std::uint32_t i = 0; i < k; ++i) {
        int c = attach(g, code, pos);
        g.add_edge(v, c);
    }
    return v;
}

}  // namespace

OrientedGraph to_oriented_graph(const EdgeBall& phi) {
    OrientedGraph out;
    std::size_t pos = 0;
    attach(out.graph, phi.root_side, pos);
    pos = 0;
    out.head = attach(out.graph, phi.head_side, pos);
    out.graph.add_edge(0, out.head);
    out.graph.root = 0;
    return out;
}

VecBall truncate(const VecBall& vec, unsigned radius) {
    if (radius == 0 || radius > vec.radius()) {
        throw Error(ErrorKind::BadRadius, "cannot truncate an oriented ball to radius " + std::to_string(radius));
    }
    return VecBall::from_parts(vec.degree_bound(), radius, tree::truncate(vec.tail(), radius),
                               tree::truncate(vec.head(), radius - 1));
}

}  // namespace bsynth
