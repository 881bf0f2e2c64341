#pragma once

#include <compare>
#include <string>
#include <vector>

#include "bsynth/ball.hpp"

namespace bsynth {

/// A tree ball with one distinguished root edge.
///
/// The edge is named by its index among the root's children in canonical
/// order; the canonical representative of an orbit is its first child, and
/// `multiplicity` counts the root edges in that orbit (root children with the
/// same subtree code).
class VecBall {
public:
    VecBall() = default;

    /// Orientation of `ball` along root child `edge`, snapped to the first
    /// child of its orbit. Requires a tree ball with at least one root edge.
    VecBall(BallCode ball, std::uint32_t edge);

    /// Assembles the ball from the planted tree at the root without the
    /// distinguished edge (`tail`) and the subtree across it (`head`).
    static VecBall from_parts(unsigned d, unsigned r, const Code& tail, const Code& head);

    const BallCode& ball() const { return ball_; }
    std::uint32_t edge() const { return edge_; }
    std::uint32_t multiplicity() const { return multiplicity_; }
    unsigned radius() const { return ball_.radius(); }
    unsigned degree_bound() const { return ball_.degree_bound(); }

    /// Root with its other children; depth <= radius.
    Code tail() const;
    /// Subtree behind the distinguished edge; depth <= radius - 1.
    Code head() const;

    std::string token() const;

    auto operator<=>(const VecBall& other) const {
        if (auto c = ball_ <=> other.ball_; c != 0) return c;
        return edge_ <=> other.edge_;
    }
    bool operator==(const VecBall& other) const { return ball_ == other.ball_ && edge_ == other.edge_; }

private:
    BallCode ball_;
    std::uint32_t edge_ = 0;
    std::uint32_t multiplicity_ = 0;
};

/// Oriented edge-ball of radius r around (x, x') inside a tree: the planted
/// tree at x away from x' and the planted tree at x' away from x, both cut at
/// depth r.
struct EdgeBall {
    unsigned degree_bound = 0;
    unsigned radius = 0;
    Code root_side;
    Code head_side;

    std::string token() const;

    auto operator<=>(const EdgeBall&) const = default;
};

/// One VecBall per root-edge orbit, in canonical order. Empty for an
/// isolated root.
std::vector<VecBall> orientations(const BallCode& ball);

EdgeBall edge_ball_within(const VecBall& outer);

VecBall s_view(const EdgeBall& phi);
VecBall t_view(const EdgeBall& phi);
EdgeBall involute(const EdgeBall& phi);

/// Representative graph with the head of the distinguished edge reported.
struct OrientedGraph {
    RootedGraph graph;
    int head = -1;
};
OrientedGraph to_oriented_graph(const VecBall& vec);
OrientedGraph to_oriented_graph(const EdgeBall& phi);

/// Radius-r sub-ball keeping the distinguished edge (r >= 1).
VecBall truncate(const VecBall& vec, unsigned radius);

}  // namespace bsynth
