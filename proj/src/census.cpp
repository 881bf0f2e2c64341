#include "bsynth/census.hpp"

#include <algorithm>
#include <deque>
#include <thread>

#include "bsynth/error.hpp"

namespace bsynth {

Rational CensusReport::frequency(const BallCode& ball) const {
    auto it = counts.find(ball);
    if (it == counts.end() || vertices == 0) return 0;
    Rational q(Integer(std::to_string(it->second)), Integer(std::to_string(vertices)));
    q.canonicalize();
    return q;
}

Rational CensusReport::tree_ball_fraction() const {
    if (vertices == 0) return 0;
    Rational q(Integer(std::to_string(tree_balls)), Integer(std::to_string(vertices)));
    q.canonicalize();
    return q;
}

namespace {

struct BallExtractor {
    const Graph& graph;
    std::vector<int> local;  // graph vertex -> ball index, -1 outside
    std::vector<int> members;

    explicit BallExtractor(const Graph& g) : graph(g), local(g.size(), -1) {}

    RootedGraph extract(int root, unsigned r) {
        members.clear();
        std::vector<unsigned> dist;
        members.push_back(root);
        dist.push_back(0);
        local[root] = 0;
        for (std::size_t head = 0; head < members.size(); ++head) {
            if (dist[head] == r) continue;
            for (int u : graph.adjacency[members[head]]) {
                if (local[u] < 0) {
                    local[u] = static_cast<int>(members.size());
                    members.push_back(u);
                    dist.push_back(dist[head] + 1);
                }
            }
        }
        RootedGraph ball(members.size(), 0);
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (int u : graph.adjacency[members[i]]) {
                int j = local[u];
                if (j > static_cast<int>(i)) ball.add_edge(static_cast<int>(i), j);
            }
        }
        for (int v : members) local[v] = -1;
        return ball;
    }
};

CensusReport census_range(const Graph& graph, unsigned d, unsigned r, std::size_t cap, std::size_t begin,
                          std::size_t end) {
    CensusReport report;
    report.degree_bound = d;
    report.radius = r;
    BallExtractor extractor(graph);
    for (std::size_t v = begin; v < end; ++v) {
        RootedGraph ball = extractor.extract(static_cast<int>(v), r);
        const bool is_tree = ball.edge_count() + 1 == ball.size();
        if (!is_tree && ball.size() > cap) {
            throw Error(ErrorKind::BallTooLarge, "ball around vertex " + std::to_string(v) + " has " +
                                                     std::to_string(ball.size()) + " vertices and a cycle");
        }
        ++report.counts[canonicalize(ball, d, r)];
        ++report.vertices;
        if (is_tree) ++report.tree_balls;
    }
    return report;
}

}  // namespace

CensusReport ball_census(const Graph& graph, unsigned d, unsigned r, const CensusOptions& options) {
    if (graph.max_degree() > d) {
        throw Error(ErrorKind::DegreeExceeded, "graph has degree " + std::to_string(graph.max_degree()) +
                                                   " above bound " + std::to_string(d));
    }
    unsigned workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n = graph.size();
    workers = static_cast<unsigned>(std::clamp<std::size_t>(n / 256, 1, workers));
    std::vector<CensusReport> parts(workers);
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](unsigned w) {
        try {
            parts[w] = census_range(graph, d, r, options.ball_size_cap, n * w / workers, n * (w + 1) / workers);
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> threads;
        for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w);
        for (auto& t : threads) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    CensusReport total;
    total.degree_bound = d;
    total.radius = r;
    for (const auto& part : parts) {
        for (const auto& [ball, c] : part.counts) total.counts[ball] += c;
        total.vertices += part.vertices;
        total.tree_balls += part.tree_balls;
    }
    return total;
}

Distance tv_distance(const CensusReport& report, const MarginalTable& table) {
    if (report.degree_bound != table.degree_bound() || report.radius > table.depth()) {
        throw Error(ErrorKind::ParameterMismatch, "census (d=" + std::to_string(report.degree_bound) + ", r=" +
                                                      std::to_string(report.radius) + ") vs table (d=" +
                                                      std::to_string(table.degree_bound()) + ", depth=" +
                                                      std::to_string(table.depth()) + ")");
    }
    Distance out;
    auto consider = [&](const BallCode& ball, const Rational& diff) {
        Rational a = abs(diff);
        out.tv += a;
        if (a > out.max_deviation) {
            out.max_deviation = a;
            out.worst = ball;
        }
    };
    const auto& level = table.level(report.radius);
    for (const auto& [ball, c] : report.counts) consider(ball, report.frequency(ball) - table.mass(ball));
    for (const auto& [ball, p] : level) {
        if (!report.counts.count(ball)) consider(ball, -p);
    }
    out.tv /= 2;
    return out;
}

CensusReport truncate(const CensusReport& report, unsigned radius) {
    if (radius > report.radius) throw Error(ErrorKind::BadRadius, "cannot enlarge a census");
    CensusReport out;
    out.degree_bound = report.degree_bound;
    out.radius = radius;
    out.vertices = report.vertices;
    for (const auto& [ball, c] : report.counts) {
        BallCode small = truncate(ball, radius);
        out.counts[small] += c;
        if (small.is_tree()) out.tree_balls += c;
    }
    return out;
}

}  // namespace bsynth
