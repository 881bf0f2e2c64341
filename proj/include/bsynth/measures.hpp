#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bsynth/ball.hpp"
#include "bsynth/graph.hpp"
#include "bsynth/rational.hpp"

namespace bsynth {

using Distribution = std::map<unsigned, Rational>;
using BallMasses = std::map<BallCode, Rational>;

/// Depth-indexed ball marginals of a measure on rooted trees: level r maps
/// radius-r ball codes to exact probabilities.
class MarginalTable {
public:
    MarginalTable() = default;
    MarginalTable(unsigned degree_bound, unsigned depth);

    unsigned degree_bound() const { return degree_bound_; }
    unsigned depth() const { return depth_; }

    const BallMasses& level(unsigned r) const;
    BallMasses& level(unsigned r);

    /// Zero for balls outside the stored support.
    Rational mass(const BallCode& ball) const;

    /// Throws InvariantViolation naming the depth and ball on the first
    /// failure: codes match (d, r), support is trees, each level sums to one,
    /// consecutive levels are consistent under truncation.
    void verify() const;

    bool operator==(const MarginalTable&) const = default;

private:
    unsigned degree_bound_ = 0;
    unsigned depth_ = 0;
    std::vector<BallMasses> levels_;
};

MarginalTable marginals_regular(unsigned d, unsigned depth);

/// Galton-Watson tree: root degree ~ root_law, every other vertex has
/// offspring ~ offspring_law. Exact ball probabilities.
MarginalTable marginals_gw(const Distribution& root_law, const Distribution& offspring_law, unsigned d,
                           unsigned depth);

/// Size-biased offspring law p_k = (k+1) q_{k+1} / sum_j j q_j.
Distribution size_biased(const Distribution& degree_law);

/// Unimodular Galton-Watson tree with root degree ~ degree_law.
MarginalTable marginals_ugw(const Distribution& degree_law, unsigned d, unsigned depth);

/// Uniformly rooted finite tree. d = 0 means "use the tree's max degree".
MarginalTable marginals_atom(const Graph& tree, unsigned depth, unsigned d = 0);

MarginalTable mixture(const std::vector<std::pair<MarginalTable, Rational>>& parts);

void save_table(std::ostream& out, const MarginalTable& table);
MarginalTable load_table(std::istream& in);
void save_table_file(const std::string& path, const MarginalTable& table);
MarginalTable load_table_file(const std::string& path);

/// FNV-1a of the saved form, as 16 hex digits.
std::string table_digest(const MarginalTable& table);

/// Parses "1:1/2,3:1/2".
Distribution parse_distribution(const std::string& text);

}  // namespace bsynth
