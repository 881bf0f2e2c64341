#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bsynth/ball.hpp"
#include "bsynth/measures.hpp"
#include "bsynth/rational.hpp"

namespace bsynth {

/// A ball class M of radius r+1 (possibly labeled).
struct HBall {
    std::string key;
    BallCode shape;
    unsigned degree = 0;
    /// mu(M), or mu_n(M) for labeled balls.
    Rational mass;
};

/// A directed ball class A of radius r+1.
struct HVertex {
    std::string key;
    std::size_t ball = 0;
    std::uint32_t multiplicity = 1;
    /// Radius-r edge-ball L_A inside A, and its involute.
    std::string link;
    std::string link_inverse;
};

/// Directed edge (A, L_A, B); `reverse` is (B, L_B, A). Loops are their own
/// reverse.
struct HEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    std::size_t reverse = 0;
};

struct HGraph {
    unsigned degree_bound = 0;
    /// Radius of the vertex balls, r + 1.
    unsigned radius = 0;
    bool labeled = false;
    std::vector<HBall> balls;
    std::vector<HVertex> vertices;
    /// Sorted by (from, to).
    std::vector<HEdge> edges;
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::vector<std::size_t>> in;
    /// Vertices of each ball, R(M).
    std::vector<std::vector<std::size_t>> orientations;

    std::size_t loop_count() const;
};

struct WeightSystem {
    std::vector<Rational> vertex;
    std::vector<Rational> edge;
    /// Per ball; only degree-0 balls carry mass here.
    std::vector<Rational> isolated;
    Rational delta = 0;
    /// Denominator bound that produced the weights; 0 when unchanged.
    Integer denominator = 0;
};

/// Raw material for an H-graph: directed classes with their weights, ball
/// classes, and positive edge weights keyed by (from key, to key).
struct HRecords {
    unsigned degree_bound = 0;
    unsigned radius = 0;
    bool labeled = false;
    std::vector<HBall> balls;
    std::vector<HVertex> vertices;
    std::vector<Rational> vertex_weight;
    std::map<std::pair<std::string, std::string>, Rational> edge_weight;
};

struct HBuild {
    HGraph graph;
    WeightSystem exact;
};

/// Links every pair A, B with L_A = involute(L_B); unlisted pairs get
/// weight zero.
HBuild assemble_h(HRecords records);

/// Quotient-mode H for synthesis at radius r: vertices are orientations of
/// the radius-(r+1) support balls, edges come from radius-(r+1) edge-balls.
/// Needs depth >= r + 2 and a table that validates to radius r + 1.
HBuild build_H(const MarginalTable& table, unsigned r, const Rational& tolerance = 0);

/// Names of the violated equations: d1, d2, d3, d4, orientation,
/// nonnegative. d4 is skipped unless `with_d4`.
std::vector<std::string> check_weights(const HGraph& h, const WeightSystem& ws, bool with_d4 = false);

enum class Rounding {
    /// Each free parameter to its best approximation with bounded
    /// denominator.
    Nearest,
    /// Every free parameter to a multiple of 1/D.
    Grid,
};

struct RationalizeOptions {
    /// 0 keeps exact weights whatever their denominators.
    Integer max_denominator = 0;
    /// Largest D tried before giving up.
    Integer denominator_cap = Integer(1) << 40;
    /// Negative means no bound.
    Rational max_delta = -1;
    Rounding rounding = Rounding::Nearest;
};

/// Weights satisfying (d1)-(d3) and orientation consistency, nonnegative and
/// zero exactly where the input is zero, with small denominators.
WeightSystem rationalize(const HGraph& h, const WeightSystem& exact, const RationalizeOptions& options = {});

/// Smallest even N with N w(A) / l_A and N w(A, L_A, B) integral, and N times
/// every isolated mass integral.
Integer choose_N(const HGraph& h, const WeightSystem& ws);

}  // namespace bsynth
