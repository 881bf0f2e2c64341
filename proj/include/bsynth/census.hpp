#pragma once

#include <map>
#include <optional>

#include "bsynth/ball.hpp"
#include "bsynth/graph.hpp"
#include "bsynth/measures.hpp"
#include "bsynth/rational.hpp"

namespace bsynth {

inline constexpr std::size_t kDefaultBallSizeCap = 12;

struct CensusOptions {
    /// Largest non-tree ball accepted; tree balls are canonicalised in
    /// linear time and are not capped.
    std::size_t ball_size_cap = kDefaultBallSizeCap;
    /// 0 means hardware concurrency.
    unsigned workers = 1;
};

struct CensusReport {
    unsigned degree_bound = 0;
    unsigned radius = 0;
    std::map<BallCode, std::uint64_t> counts;
    std::uint64_t vertices = 0;
    std::uint64_t tree_balls = 0;

    Rational frequency(const BallCode& ball) const;
    Rational tree_ball_fraction() const;
    bool operator==(const CensusReport&) const = default;
};

/// Exact r-ball statistics of `graph`, balls coded with degree bound d.
CensusReport ball_census(const Graph& graph, unsigned d, unsigned r, const CensusOptions& options = {});

struct Distance {
    Rational tv;
    Rational max_deviation;
    BallCode worst;
};

/// Half the l1 distance between the census frequencies and the table level.
Distance tv_distance(const CensusReport& report, const MarginalTable& table);

/// Projects a census onto a smaller radius.
CensusReport truncate(const CensusReport& report, unsigned radius);

}  // namespace bsynth
