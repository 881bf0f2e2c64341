#include "bsynth/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "bsynth/error.hpp"

namespace bsynth {

std::size_t Graph::edge_count() const {
    std::size_t twice = 0;
    for (const auto& nb : adjacency) twice += nb.size();
    return twice / 2;
}

unsigned Graph::max_degree() const {
    std::size_t best = 0;
    for (const auto& nb : adjacency) best = std::max(best, nb.size());
    return static_cast<unsigned>(best);
}

void Graph::add_edge(int u, int v) {
    adjacency[u].push_back(v);
    adjacency[v].push_back(u);
}

std::vector<std::pair<int, int>> Graph::edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(edge_count());
    for (std::size_t u = 0; u < size(); ++u) {
        for (int v : adjacency[u]) {
            if (static_cast<int>(u) < v) out.emplace_back(static_cast<int>(u), v);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool Graph::is_simple() const {
    for (std::size_t u = 0; u < size(); ++u) {
        auto nb = adjacency[u];
        std::sort(nb.begin(), nb.end());
        if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) return false;
        if (std::binary_search(nb.begin(), nb.end(), static_cast<int>(u))) return false;
    }
    return true;
}

bool Graph::is_forest() const { return !girth(*this).has_value(); }

std::optional<std::string> EdgeListFile::get(const std::string& key) const {
    for (const auto& [k, v] : provenance) {
        if (k == key) return v;
    }
    return std::nullopt;
}

void write_edge_list(std::ostream& out, const Graph& graph,
                     const std::vector<std::pair<std::string, std::string>>& provenance) {
    for (const auto& [k, v] : provenance) out << "# " << k << ' ' << v << '\n';
    out << "# vertices " << graph.size() << '\n';
    for (auto [u, v] : graph.edges()) out << u << ' ' << v << '\n';
}

EdgeListFile read_edge_list(std::istream& in) {
    EdgeListFile file;
    std::vector<std::pair<long, long>> edges;
    long declared = -1;
    long max_id = -1;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string key, value;
            ls >> key;
            std::getline(ls >> std::ws, value);
            if (key.empty()) continue;
            if (key == "vertices") {
                try {
                    declared = std::stol(value);
                } catch (const std::exception&) {
                    throw Error(ErrorKind::ParseError, "bad vertex count on line " + std::to_string(lineno));
                }
            } else {
                file.provenance.emplace_back(key, value);
            }
            continue;
        }
        std::istringstream ls(line);
        long u = -1, v = -1;
        std::string rest;
        if (!(ls >> u >> v) || (ls >> rest) || u < 0 || v < 0 || u == v) {
            throw Error(ErrorKind::ParseError, "bad edge on line " + std::to_string(lineno));
        }
        edges.emplace_back(u, v);
        max_id = std::max({max_id, u, v});
    }
    long n = declared >= 0 ? declared : max_id + 1;
    if (max_id >= n) throw Error(ErrorKind::ParseError, "edge endpoint beyond declared vertex count");
    file.graph = Graph(static_cast<std::size_t>(n));
    for (auto [u, v] : edges) file.graph.add_edge(static_cast<int>(u), static_cast<int>(v));
    if (!file.graph.is_simple()) throw Error(ErrorKind::ParseError, "edge list has repeated edges");
    return file;
}

EdgeListFile read_edge_list_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
    return read_edge_list(in);
}

std::optional<unsigned> girth(const Graph& graph) {
    const std::size_t n = graph.size();
    unsigned best = std::numeric_limits<unsigned>::max();
    std::vector<int> dist(n, -1), parent(n, -1), touched;
    for (std::size_t s = 0; s < n; ++s) {
        for (int t : touched) dist[t] = -1;
        touched.clear();
        std::deque<int> q{static_cast<int>(s)};
        dist[s] = 0;
        parent[s] = -1;
        touched.push_back(static_cast<int>(s));
        while (!q.empty()) {
            int u = q.front();
            q.pop_front();
            // Anything found from here on is at least 2 dist[u] long.
            if (2 * static_cast<unsigned>(dist[u]) >= best) break;
            for (int v : graph.adjacency[u]) {
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    parent[v] = u;
                    touched.push_back(v);
                    q.push_back(v);
                } else if (v != parent[u]) {
                    best = std::min(best, static_cast<unsigned>(dist[u] + dist[v] + 1));
                }
            }
        }
    }
    if (best == std::numeric_limits<unsigned>::max()) return std::nullopt;
    return best;
}

Graph named_tree(const std::string& name) {
    auto number = [&](std::size_t prefix) -> int {
        try {
            int n = std::stoi(name.substr(prefix));
            if (n < 1) throw std::invalid_argument("size");
            return n;
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidArgument, "bad tree name '" + name + "'");
        }
    };
    if (name == "k1") return Graph(1);
    if (name == "k2") return named_tree("path2");
    if (name.rfind("path", 0) == 0) {
        int n = number(4);
        Graph g(static_cast<std::size_t>(n));
        for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
        return g;
    }
    if (name.rfind("star", 0) == 0) {
        int leaves = number(4);
        Graph g(static_cast<std::size_t>(leaves + 1));
        for (int i = 1; i <= leaves; ++i) g.add_edge(0, i);
        return g;
    }
    if (name.rfind("binary", 0) == 0) {
        int n = number(6);
        Graph g(static_cast<std::size_t>(n));
        for (int i = 1; i < n; ++i) g.add_edge(i, (i - 1) / 2);
        return g;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown tree name '" + name + "'");
}

}  // namespace bsynth
