#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bsynth {

/// Finite simple undirected graph on vertices 0..size()-1.
struct Graph {
    std::vector<std::vector<int>> adjacency;

    Graph() = default;
    explicit Graph(std::size_t vertices) : adjacency(vertices) {}

    std::size_t size() const { return adjacency.size(); }
    std::size_t edge_count() const;
    unsigned max_degree() const;
    void add_edge(int u, int v);
    /// Sorted (u, v) pairs with u < v.
    std::vector<std::pair<int, int>> edges() const;
    bool is_simple() const;
    bool is_forest() const;
};

/// Parsed edge-list file: "# key value" provenance lines, then "u v" lines.
struct EdgeListFile {
    Graph graph;
    std::vector<std::pair<std::string, std::string>> provenance;

    std::optional<std::string> get(const std::string& key) const;
};

/// Writes provenance comments, a "# vertices V" line, then sorted edges.
void write_edge_list(std::ostream& out, const Graph& graph,
                     const std::vector<std::pair<std::string, std::string>>& provenance = {});
EdgeListFile read_edge_list(std::istream& in);
EdgeListFile read_edge_list_file(const std::string& path);

/// Shortest cycle length; nullopt for forests.
std::optional<unsigned> girth(const Graph& graph);

/// Named small trees used by the CLI and tests: "k1", "k2", "pathN",
/// "starN" (N leaves) and "binaryN" (complete binary tree on N vertices).
Graph named_tree(const std::string& name);

}  // namespace bsynth
