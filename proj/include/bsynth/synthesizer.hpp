#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bsynth/census.hpp"
#include "bsynth/graph.hpp"
#include "bsynth/labeling.hpp"
#include "bsynth/rationalizer.hpp"

namespace bsynth {

/// Cells Q(A) and sub-cells Q(A, L_A, B) as contiguous element ranges.
struct CellStructure {
    Integer N;
    std::vector<std::uint64_t> cell_begin;  // per H-vertex
    std::vector<std::uint64_t> cell_size;
    std::vector<std::uint64_t> sub_begin;   // per H-edge
    std::vector<std::uint64_t> sub_size;
    std::vector<std::uint64_t> isolated;    // per ball, degree-0 copies
    std::uint64_t elements = 0;
};

struct MatchedStructure {
    CellStructure cells;
    /// partner[x] = Z(x); an involution without fixed points.
    std::vector<std::uint64_t> partner;
};

struct SyntheticGraph {
    Graph graph;
    /// Ball index in the H-graph each vertex was built for.
    std::vector<std::size_t> intended;
    std::uint64_t collapsed_edges = 0;
    std::uint64_t dropped_loops = 0;
    /// Vertices whose degree ended below the root degree of their ball.
    std::uint64_t deficient_vertices = 0;
};

/// Unbiased integer in [0, bound) from a 64-bit generator.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

CellStructure step1_cells(const HGraph& h, const WeightSystem& ws, const Integer& N);
MatchedStructure step2_match(CellStructure cells, const HGraph& h, std::uint64_t seed);
SyntheticGraph step3_quotient(const MatchedStructure& matched, const HGraph& h, const WeightSystem& ws);

enum class Mode { Quotient, Faithful };

struct SynthesisOptions {
    Mode mode = Mode::Quotient;
    std::uint64_t seed = 0x5eed;
    /// Upper bound on N and hence on the vertex count.
    Integer max_N = 2'000'000;
    /// Faithful mode label count; 0 picks it from the epsilon budget.
    unsigned n = 0;
    /// Denominator bound for rounding; 0 starts from the delta budget.
    Integer max_denominator = 0;
    /// Scale N up towards a vertex target and re-check the census.
    bool scale = true;
    bool verify = true;
    unsigned workers = 1;
    std::size_t ball_size_cap = 64;
    std::uint64_t labeling_cap = kDefaultLabelingCap;
};

struct SynthesisReport {
    Mode mode = Mode::Quotient;
    unsigned degree_bound = 0;
    unsigned radius = 0;
    Rational epsilon;
    std::uint64_t seed = 0;
    std::string table_digest;
    LabelBudget labels;
    std::size_t h_vertices = 0;
    std::size_t h_edges = 0;
    std::size_t h_loops = 0;
    std::size_t ball_classes = 0;
    Rational delta;
    Rational delta_budget;
    Integer denominator;
    Integer exact_N;
    Integer minimal_N;
    Integer N;
    std::uint64_t elements = 0;
    std::uint64_t vertices = 0;
    std::uint64_t edges = 0;
    std::uint64_t collapsed_edges = 0;
    std::uint64_t dropped_loops = 0;
    std::uint64_t deficient_vertices = 0;
    unsigned attempts = 0;
    std::optional<Rational> tv;
    std::optional<Rational> max_deviation;
    std::optional<Rational> tree_ball_fraction;
    std::optional<unsigned> certified_radius;
};

struct SynthesisResult {
    SyntheticGraph graph;
    SynthesisReport report;
};

/// Full pipeline for radius r and tolerance epsilon. Needs depth >= r + 2.
SynthesisResult synthesize(const MarginalTable& table, unsigned r, const Rational& epsilon,
                           const SynthesisOptions& options = {});

/// Provenance lines written at the top of an edge-list file.
std::vector<std::pair<std::string, std::string>> provenance(const SynthesisReport& report);

std::string format_report(const SynthesisReport& report);

/// Default census ball cap for (d, r): at least 12 and at least the size of
/// the d-regular tree ball of radius r.
std::size_t default_ball_cap(unsigned d, unsigned r);

}  // namespace bsynth
