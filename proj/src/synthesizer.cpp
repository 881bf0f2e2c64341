#include "bsynth/synthesizer.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "bsynth/error.hpp"

namespace bsynth {

namespace {

std::uint64_t to_u64(const Rational& q, const char* what) {
    if (q.get_den() != 1 || q < 0 || !q.get_num().fits_ulong_p()) {
        throw Error(ErrorKind::InvariantViolation, std::string(what) + " is not a small nonnegative integer: " +
                                                       to_string(q));
    }
    return q.get_num().get_ui();
}

void shuffle(std::vector<std::uint64_t>& items, std::mt19937_64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = uniform_below(rng, i);
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound == 0) throw Error(ErrorKind::InvalidArgument, "empty range");
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
        std::uint64_t x = rng();
        if (x >= threshold) return x % bound;
    }
}

CellStructure step1_cells(const HGraph& h, const WeightSystem& ws, const Integer& N) {
    CellStructure cells;
    cells.N = N;
    cells.cell_begin.resize(h.vertices.size());
    cells.cell_size.resize(h.vertices.size());
    cells.sub_begin.resize(h.edges.size());
    cells.sub_size.resize(h.edges.size());
    std::uint64_t next = 0;
    for (std::size_t a = 0; a < h.vertices.size(); ++a) {
        cells.cell_begin[a] = next;
        cells.cell_size[a] = to_u64(N * ws.vertex[a], "cell size");
        std::uint64_t inner = next;
        for (auto e : h.out[a]) {
            cells.sub_begin[e] = inner;
            cells.sub_size[e] = to_u64(N * ws.edge[e], "sub-cell size");
            inner += cells.sub_size[e];
        }
        if (inner - next != cells.cell_size[a]) {
            throw Error(ErrorKind::InvariantViolation, "sub-cells do not partition Q(" + h.vertices[a].key + ")");
        }
        next = inner;
    }
    cells.elements = next;
    cells.isolated.resize(h.balls.size());
    for (std::size_t m = 0; m < h.balls.size(); ++m) cells.isolated[m] = to_u64(N * ws.isolated[m], "isolated count");
    return cells;
}

MatchedStructure step2_match(CellStructure cells, const HGraph& h, std::uint64_t seed) {
    MatchedStructure out;
    constexpr auto unset = std::numeric_limits<std::uint64_t>::max();
    out.partner.assign(cells.elements, unset);
    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> order;
    for (std::size_t e = 0; e < h.edges.size(); ++e) {
        const std::size_t rev = h.edges[e].reverse;
        if (rev < e) continue;
        const auto size = cells.sub_size[e];
        if (rev == e) {
            if (size % 2) {
                throw Error(ErrorKind::OddLoopCell, "loop sub-cell of " + h.vertices[h.edges[e].from].key +
                                                        " has odd size " + std::to_string(size));
            }
            order.resize(size);
            for (std::uint64_t i = 0; i < size; ++i) order[i] = cells.sub_begin[e] + i;
            shuffle(order, rng);
            for (std::uint64_t i = 0; i < size; i += 2) {
                out.partner[order[i]] = order[i + 1];
                out.partner[order[i + 1]] = order[i];
            }
            continue;
        }
        if (cells.sub_size[rev] != size) {
            throw Error(ErrorKind::InvariantViolation, "paired sub-cells differ in size");
        }
        order.resize(size);
        for (std::uint64_t i = 0; i < size; ++i) order[i] = cells.sub_begin[rev] + i;
        shuffle(order, rng);
        for (std::uint64_t i = 0; i < size; ++i) {
            out.partner[cells.sub_begin[e] + i] = order[i];
            out.partner[order[i]] = cells.sub_begin[e] + i;
        }
    }
    for (auto p : out.partner) {
        if (p == unset) throw Error(ErrorKind::InvariantViolation, "unmatched element after step 2");
    }
    out.cells = std::move(cells);
    return out;
}

SyntheticGraph step3_quotient(const MatchedStructure& matched, const HGraph& h, const WeightSystem& ws) {
    const auto& cells = matched.cells;
    SyntheticGraph out;
    std::vector<std::uint64_t> vertex_of(cells.elements);
    std::uint64_t next = 0;
    for (std::size_t m = 0; m < h.balls.size(); ++m) {
        const auto& rm = h.orientations[m];
        if (rm.empty()) {
            for (std::uint64_t i = 0; i < cells.isolated[m]; ++i) out.intended.push_back(m);
            next += cells.isolated[m];
            continue;
        }
        const Rational s = cells.N * ws.vertex[rm.front()] / h.vertices[rm.front()].multiplicity;
        const std::uint64_t count = to_u64(s, "super-cell count");
        for (auto a : rm) {
            const auto l = h.vertices[a].multiplicity;
            if (cells.cell_size[a] != count * l) {
                throw Error(ErrorKind::PartitionInfeasible, "Q(" + h.vertices[a].key + ") cannot be split into " +
                                                                std::to_string(count) + " groups of " +
                                                                std::to_string(l));
            }
            for (std::uint64_t i = 0; i < cells.cell_size[a]; ++i) vertex_of[cells.cell_begin[a] + i] = next + i / l;
        }
        for (std::uint64_t i = 0; i < count; ++i) out.intended.push_back(m);
        next += count;
    }
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(cells.elements / 2);
    for (std::uint64_t x = 0; x < cells.elements; ++x) {
        const auto y = matched.partner[x];
        if (y < x) continue;
        auto u = static_cast<int>(vertex_of[x]);
        auto v = static_cast<int>(vertex_of[y]);
        if (u == v) {
            ++out.dropped_loops;
            continue;
        }
        pairs.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(pairs.begin(), pairs.end());
    out.graph = Graph(next);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (i && pairs[i] == pairs[i - 1]) {
            ++out.collapsed_edges;
            continue;
        }
        out.graph.add_edge(pairs[i].first, pairs[i].second);
    }
    for (std::uint64_t v = 0; v < next; ++v) {
        if (out.graph.adjacency[v].size() < h.balls[out.intended[v]].degree) ++out.deficient_vertices;
    }
    return out;
}

std::size_t default_ball_cap(unsigned d, unsigned r) {
    std::size_t size = 1, layer = d;
    for (unsigned i = 0; i < r; ++i) {
        size += layer;
        layer *= d > 0 ? d - 1 : 0;
    }
    return std::max<std::size_t>(12, size);
}

SynthesisResult synthesize(const MarginalTable& table, unsigned r, const Rational& epsilon,
                           const SynthesisOptions& options) {
    if (epsilon <= 0 || epsilon >= 1) throw Error(ErrorKind::InvalidArgument, "epsilon must lie in (0, 1)");
    if (options.max_N < 2) throw Error(ErrorKind::InvalidArgument, "max-N must be at least 2");
    SynthesisResult result;
    SynthesisReport& rep = result.report;
    rep.mode = options.mode;
    rep.degree_bound = table.degree_bound();
    rep.radius = r;
    rep.epsilon = epsilon;
    rep.seed = options.seed;
    rep.table_digest = table_digest(table);
    if (table.depth() < r + 2) {
        throw Error(ErrorKind::InsufficientDepth, "synthesis at radius " + std::to_string(r) + " needs depth " +
                                                      std::to_string(r + 2));
    }
    rep.labels = choose_n(table, r + 1, epsilon / 10);
    if (options.mode == Mode::Faithful) {
        if (options.n) rep.labels = {options.n, 0};
        for (const auto& [ball, p] : table.level(r + 1)) {
            rep.labels.slack += p * (1 - separated_fraction(ball, rep.labels.n));
        }
    }

    HBuild built = options.mode == Mode::Quotient ? build_H(table, r)
                                                  : build_faithful_H(table, r, rep.labels.n, options.labeling_cap);
    const HGraph& h = built.graph;
    rep.h_vertices = h.vertices.size();
    rep.h_edges = h.edges.size();
    rep.h_loops = h.loop_count();
    std::size_t support = 0;
    std::size_t largest_ball = 1;
    for (const auto& [ball, p] : table.level(r + 1)) support += p > 0;
    for (const auto& [ball, p] : table.level(r)) {
        if (p > 0) largest_ball = std::max(largest_ball, vertex_count(ball));
    }
    rep.ball_classes = support;
    rep.delta_budget = epsilon / (10 * table.degree_bound() * static_cast<unsigned long>(support));

    WeightSystem ws = rationalize(h, built.exact);
    rep.exact_N = choose_N(h, ws);
    if (rep.exact_N > options.max_N) {
        if (options.mode == Mode::Faithful) {
            throw Error(ErrorKind::MaxNExceeded, "required N = " + rep.exact_N.get_str());
        }
        RationalizeOptions ro;
        ro.rounding = Rounding::Grid;
        ro.max_delta = rep.delta_budget;
        ro.denominator_cap = options.max_N;
        ro.max_denominator = options.max_denominator;
        if (ro.max_denominator == 0) {
            ro.max_denominator = 1;
            while (Rational(1, 2 * ro.max_denominator) > rep.delta_budget) ro.max_denominator *= 2;
        }
        try {
            ws = rationalize(h, built.exact, ro);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::InfeasibleRounding) throw;
            throw Error(ErrorKind::MaxNExceeded, "no rounding fits max-N " + options.max_N.get_str() + "; required N = " + rep.exact_N.get_str() + " without rounding");
        }
    }
    rep.delta = ws.delta;
    rep.denominator = ws.denominator;
    rep.minimal_N = choose_N(h, ws);
    if (rep.minimal_N > options.max_N) {
        throw Error(ErrorKind::MaxNExceeded, "required N = " + rep.minimal_N.get_str());
    }

    Integer step = 1;
    for (std::size_t e = 0; e < h.edges.size(); ++e) {
        if (h.edges[e].reverse == e && to_u64(rep.minimal_N * ws.edge[e], "loop cell") % 2) step = 2;
    }
    Rational per_N = 0;
    for (std::size_t m = 0; m < h.balls.size(); ++m) {
        const auto& rm = h.orientations[m];
        per_N += rm.empty() ? ws.isolated[m] : Rational(ws.vertex[rm.front()] / h.vertices[rm.front()].multiplicity);
    }
    Integer k = step;
    if (options.scale && per_N > 0) {
        const unsigned d = table.degree_bound();
        Rational target = Rational(2 * (2 * r + 2) * static_cast<unsigned long>(largest_ball)) / epsilon;
        for (unsigned i = 0; i < 2 * r + 1; ++i) target *= d > 0 ? d - 1 : 0;
        Rational units = target / (per_N * rep.minimal_N * step);
        Integer whole = units.get_num() / units.get_den();
        if (whole * units.get_den() < units.get_num()) whole += 1;
        k = step * std::max<Integer>(whole, 1);
        Integer limit = options.max_N / (rep.minimal_N * step) * step;
        if (limit < step) throw Error(ErrorKind::MaxNExceeded, "required N = " + Integer(rep.minimal_N * step).get_str());
        k = std::min(k, limit);
    }
    if (rep.minimal_N * k > options.max_N) {
        throw Error(ErrorKind::MaxNExceeded, "required N = " + Integer(rep.minimal_N * k).get_str());
    }

    CensusOptions census_options{options.ball_size_cap, options.workers};
    while (true) {
        ++rep.attempts;
        rep.N = rep.minimal_N * k;
        auto cells = step1_cells(h, ws, rep.N);
        rep.elements = cells.elements;
        auto matched = step2_match(std::move(cells), h, options.seed);
        result.graph = step3_quotient(matched, h, ws);
        const auto& g = result.graph;
        rep.vertices = g.graph.size();
        rep.edges = g.graph.edge_count();
        rep.collapsed_edges = g.collapsed_edges;
        rep.dropped_loops = g.dropped_loops;
        rep.deficient_vertices = g.deficient_vertices;
        if (!options.verify) break;
        auto census = ball_census(g.graph, table.degree_bound(), r, census_options);
        auto dist = tv_distance(census, table);
        rep.tv = dist.tv;
        rep.max_deviation = dist.max_deviation;
        rep.tree_ball_fraction = census.tree_ball_fraction();
        rep.certified_radius.reset();
        for (unsigned rho = 0; rho <= r; ++rho) {
            if (tv_distance(truncate(census, rho), table).tv > epsilon) break;
            rep.certified_radius = rho;
        }
        if (dist.tv <= epsilon || !options.scale || rep.minimal_N * k * 2 > options.max_N) break;
        k *= 2;
    }
    return result;
}

std::vector<std::pair<std::string, std::string>> provenance(const SynthesisReport& report) {
    std::vector<std::pair<std::string, std::string>> lines{
        {"generator", "bsynth"},
        {"d", std::to_string(report.degree_bound)},
        {"r", std::to_string(report.radius)},
        {"epsilon", to_string(report.epsilon)},
        {"mode", report.mode == Mode::Quotient ? "quotient" : "faithful"}};
    if (report.mode == Mode::Faithful) lines.emplace_back("n", std::to_string(report.labels.n));
    lines.emplace_back("delta", to_string(report.delta));
    lines.emplace_back("N", report.N.get_str());
    lines.emplace_back("seed", std::to_string(report.seed));
    lines.emplace_back("table_digest", report.table_digest);
    return lines;
}

std::string format_report(const SynthesisReport& rep) {
    std::ostringstream out;
    auto opt = [](const std::optional<Rational>& q) { return q ? to_string(*q) : std::string("unchecked"); };
    out << "mode " << (rep.mode == Mode::Quotient ? "quotient" : "faithful") << '\n';
    out << "d " << rep.degree_bound << '\n';
    out << "r " << rep.radius << '\n';
    out << "epsilon " << to_string(rep.epsilon) << '\n';
    out << "seed " << rep.seed << '\n';
    out << "table_digest " << rep.table_digest << '\n';
    out << "labels_n " << rep.labels.n << '\n';
    out << "label_slack " << to_string(rep.labels.slack) << " (" << to_double(rep.labels.slack) << ")\n";
    out << "h_vertices " << rep.h_vertices << '\n';
    out << "h_edges " << rep.h_edges << '\n';
    out << "h_loops " << rep.h_loops << '\n';
    out << "ball_classes " << rep.ball_classes << '\n';
    out << "delta " << to_string(rep.delta) << " (" << to_double(rep.delta) << ")\n";
    out << "delta_budget " << to_string(rep.delta_budget) << '\n';
    out << "denominator " << rep.denominator.get_str() << '\n';
    out << "exact_N " << rep.exact_N.get_str() << '\n';
    out << "minimal_N " << rep.minimal_N.get_str() << '\n';
    out << "N " << rep.N.get_str() << '\n';
    out << "elements " << rep.elements << '\n';
    out << "vertices " << rep.vertices << '\n';
    out << "edges " << rep.edges << '\n';
    out << "collapsed_edges " << rep.collapsed_edges << '\n';
    out << "dropped_loops " << rep.dropped_loops << '\n';
    out << "deficient_vertices " << rep.deficient_vertices << '\n';
    out << "attempts " << rep.attempts << '\n';
    out << "tv " << opt(rep.tv);
    if (rep.tv) out << " (" << to_double(*rep.tv) << ")";
    out << '\n';
    out << "max_deviation " << opt(rep.max_deviation) << '\n';
    out << "tree_ball_fraction " << opt(rep.tree_ball_fraction) << '\n';
    out << "certified_radius "
        << (rep.certified_radius ? std::to_string(*rep.certified_radius) : std::string("none")) << '\n';
    return out.str();
}

}  // namespace bsynth
