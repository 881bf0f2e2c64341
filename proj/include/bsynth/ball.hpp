#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bsynth/tree_code.hpp"

namespace bsynth {

/// Mutable, non-canonical rooted graph. Vertex ids are 0..size()-1.
struct RootedGraph {
    std::vector<std::vector<int>> adjacency;
    int root = 0;

    RootedGraph() = default;
    explicit RootedGraph(std::size_t vertices, int root_vertex = 0)
        : adjacency(vertices), root(root_vertex) {}

    std::size_t size() const { return adjacency.size(); }
    std::size_t edge_count() const;
    void add_edge(int u, int v);
};

/// Canonical code of a rooted ball of radius <= r and degree <= d.
///
/// Layout: [d, r, is_tree, body...]. Tree bodies use the planted-tree code of
/// the root. General bodies list the 2-core-with-root-paths part in a
/// canonical labelling, each core vertex followed by the code of the trees
/// hanging from it. Equal codes mean rooted-isomorphic balls with the same
/// nominal (d, r).
class BallCode {
public:
    BallCode() = default;

    static BallCode tree(unsigned d, unsigned r, Code body);
    static BallCode general(unsigned d, unsigned r, Code body);
    /// Parses "d.r.flag.body..." and checks it is well formed.
    static BallCode from_token(std::string_view token);

    unsigned degree_bound() const { return code_[0]; }
    unsigned radius() const { return code_[1]; }
    bool is_tree() const { return code_[2] == 1; }
    CodeView body() const { return CodeView(code_).subspan(3); }
    const Code& code() const { return code_; }
    bool empty() const { return code_.empty(); }

    std::string token() const;

    auto operator<=>(const BallCode&) const = default;

private:
    explicit BallCode(Code code) : code_(std::move(code)) {}
    Code code_;
};

BallCode canonicalize(const RootedGraph& graph, unsigned d, unsigned r);

/// A representative rooted graph. For trees vertices are numbered in preorder
/// with children visited in canonical order, the root being vertex 0.
RootedGraph to_rooted_graph(const BallCode& ball);

std::size_t vertex_count(const BallCode& ball);
unsigned root_degree(const BallCode& ball);

BallCode truncate(const BallCode& ball, unsigned radius);

/// Same shape re-labelled with a different nominal radius (must still cover
/// every vertex).
BallCode with_radius(const BallCode& ball, unsigned radius);

inline constexpr std::size_t kDefaultEnumerationCap = 2'000'000;

/// All rooted trees of depth <= r and maximum degree <= d, ascending.
std::vector<BallCode> enumerate_tree_balls(unsigned d, unsigned r,
                                           std::size_t cap = kDefaultEnumerationCap);

}  // namespace bsynth
