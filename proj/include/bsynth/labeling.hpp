#pragma once

#include <string>
#include <vector>

#include "bsynth/directed.hpp"
#include "bsynth/measures.hpp"
#include "bsynth/rationalizer.hpp"

namespace bsynth {

/// Share of labelings of alpha by {1..n} with pairwise distinct labels.
Rational separated_fraction(const BallCode& alpha, unsigned n);

struct LabelBudget {
    unsigned n = 0;
    /// Mass of non-separated labelings at the given radius.
    Rational slack;
};

/// Smallest n whose non-separated mass at `radius` is below `bound`.
LabelBudget choose_n(const MarginalTable& table, unsigned radius, const Rational& bound);

/// Number of labelings equivalent to `labels` under automorphisms of `a`
/// fixing the root and the distinguished edge. Labels are indexed by the
/// vertices of to_oriented_graph(a).
Integer class_size(const VecBall& a, const std::vector<unsigned>& labels);

/// |C(kappa)| / n^|V| * vec_mass.
Rational labeled_mass(const VecBall& a, const Rational& vec_mass, const std::vector<unsigned>& labels, unsigned n);

inline constexpr std::uint64_t kDefaultLabelingCap = 50'000'000;

struct IdentityReport {
    unsigned radius = 0;
    unsigned n = 0;
    std::size_t vec_classes = 0;
    std::size_t edge_classes = 0;
    std::size_t ball_classes = 0;
    bool class_masses = true;
    bool ball_masses = true;
    bool separated = true;
    bool s_marginal = true;
    bool t_marginal = true;
    bool involution = true;
    /// The mu_n formula weighted by l_A agrees on every label-separated ball.
    bool weighted_formula_on_separated = true;
    /// Balls where the l_A-weighted formula differs (all non-separated).
    std::size_t weighted_formula_mismatches = 0;
    std::vector<std::string> failures;

    bool pass() const {
        return class_masses && ball_masses && separated && s_marginal && t_marginal && involution &&
               weighted_formula_on_separated;
    }
};

/// Enumerates every labeling of every radius-r directed ball and radius-r
/// edge-ball and checks the labeled-measure identities exactly. Needs
/// depth >= r + 1 and r >= 1.
IdentityReport check_identities(const MarginalTable& table, unsigned r, unsigned n,
                                std::uint64_t cap = kDefaultLabelingCap);

std::string format_identities(const IdentityReport& report);

/// H over labeled radius-(r+1) directed balls, with exact weights.
HBuild build_faithful_H(const MarginalTable& table, unsigned r, unsigned n, std::uint64_t cap = kDefaultLabelingCap);

}  // namespace bsynth
