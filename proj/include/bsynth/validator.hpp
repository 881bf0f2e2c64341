#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bsynth/directed.hpp"
#include "bsynth/measures.hpp"

namespace bsynth {

using VecMarginal = std::map<VecBall, Rational>;
using EdgeMarginal = std::map<EdgeBall, Rational>;

/// vec-mu(A) = l_A * mu(alpha) for every orientation of every radius-r ball.
VecMarginal induce_vec(const MarginalTable& table, unsigned r);

/// Mass of each radius-r edge-ball, summed over the radius-(r+1)
/// orientations containing it. Needs depth >= r + 1.
EdgeMarginal edge_marginals(const MarginalTable& table, unsigned r);

struct Violation {
    std::string equation;  // consistency, e1, e2, e3, sum-to-one, support
    unsigned radius = 0;
    std::string witness;
    Rational lhs;
    Rational rhs;
};

struct ValidationReport {
    std::vector<Violation> violations;
    unsigned r_max = 0;
    /// Largest radius up to which every check passed.
    std::optional<unsigned> certified_radius;

    bool pass() const { return violations.empty(); }
};

/// Runs every check for radii 0..r_max. Needs depth >= r_max + 1.
ValidationReport check(const MarginalTable& table, unsigned r_max, const Rational& tolerance = 0);

std::string format_report(const ValidationReport& report);

}  // namespace bsynth
