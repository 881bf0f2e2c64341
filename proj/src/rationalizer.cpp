#include "bsynth/rationalizer.hpp"

#include <algorithm>
#include <numeric>

#include "bsynth/directed.hpp"
#include "bsynth/error.hpp"
#include "bsynth/validator.hpp"

namespace bsynth {

std::size_t HGraph::loop_count() const {
    std::size_t loops = 0;
    for (const auto& e : edges) loops += e.from == e.to;
    return loops;
}

HBuild assemble_h(HRecords records) {
    HBuild out;
    HGraph& h = out.graph;
    WeightSystem& ws = out.exact;
    h.degree_bound = records.degree_bound;
    h.radius = records.radius;
    h.labeled = records.labeled;
    h.balls = std::move(records.balls);
    h.vertices = std::move(records.vertices);
    ws.vertex = std::move(records.vertex_weight);
    const std::size_t n = h.vertices.size();
    if (ws.vertex.size() != n) throw Error(ErrorKind::InvalidArgument, "one weight per H-vertex expected");

    std::map<std::string, std::size_t> index;
    std::map<std::string, std::vector<std::size_t>> by_link;
    h.orientations.assign(h.balls.size(), {});
    for (std::size_t v = 0; v < n; ++v) {
        if (!index.emplace(h.vertices[v].key, v).second) {
            throw Error(ErrorKind::InvariantViolation, "duplicate H-vertex " + h.vertices[v].key);
        }
        by_link[h.vertices[v].link].push_back(v);
        h.orientations.at(h.vertices[v].ball).push_back(v);
    }

    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_index;
    for (std::size_t a = 0; a < n; ++a) {
        auto it = by_link.find(h.vertices[a].link_inverse);
        if (it == by_link.end()) continue;
        for (std::size_t b : it->second) {
            edge_index[{a, b}] = h.edges.size();
            h.edges.push_back({a, b, 0});
        }
    }
    h.out.assign(n, {});
    h.in.assign(n, {});
    ws.edge.assign(h.edges.size(), 0);
    for (std::size_t e = 0; e < h.edges.size(); ++e) {
        auto& edge = h.edges[e];
        auto rev = edge_index.find({edge.to, edge.from});
        if (rev == edge_index.end()) throw Error(ErrorKind::InvariantViolation, "H edge without a reverse");
        edge.reverse = rev->second;
        h.out[edge.from].push_back(e);
        h.in[edge.to].push_back(e);
    }
    for (const auto& [keys, w] : records.edge_weight) {
        auto a = index.find(keys.first);
        auto b = index.find(keys.second);
        if (a == index.end() || b == index.end()) {
            if (w == 0) continue;
            throw Error(ErrorKind::InvariantViolation, "edge weight on an unknown H-vertex " + keys.first + " -> " +
                                                           keys.second);
        }
        auto e = edge_index.find({a->second, b->second});
        if (e == edge_index.end()) {
            throw Error(ErrorKind::InvariantViolation, "edge weight between incompatible H-vertices " +
                                                           keys.first + " -> " + keys.second);
        }
        ws.edge[e->second] = w;
    }
    ws.isolated.assign(h.balls.size(), 0);
    for (std::size_t m = 0; m < h.balls.size(); ++m) {
        if (h.balls[m].degree == 0) ws.isolated[m] = h.balls[m].mass;
    }
    return out;
}

HBuild build_H(const MarginalTable& table, unsigned r, const Rational& tolerance) {
    auto report = check(table, r + 1, tolerance);
    if (!report.pass()) {
        const auto& v = report.violations.front();
        throw Error(ErrorKind::ValidationRequired, "table fails " + v.equation + " at radius " +
                                                       std::to_string(v.radius) + " (" + v.witness + ")");
    }
    HRecords rec;
    rec.degree_bound = table.degree_bound();
    rec.radius = r + 1;
    for (const auto& [ball, mu] : table.level(r + 1)) {
        if (mu == 0) continue;
        const std::size_t m = rec.balls.size();
        rec.balls.push_back({ball.token(), ball, root_degree(ball), mu});
        for (const auto& a : orientations(ball)) {
            EdgeBall link = edge_ball_within(a);
            rec.vertices.push_back({a.token(), m, a.multiplicity(), link.token(), involute(link).token()});
            rec.vertex_weight.push_back(mu * a.multiplicity());
        }
    }
    for (const auto& [phi, mass] : edge_marginals(table, r + 1)) {
        if (mass != 0) rec.edge_weight[{s_view(phi).token(), t_view(phi).token()}] = mass;
    }
    auto built = assemble_h(std::move(rec));
    auto failures = check_weights(built.graph, built.exact, true);
    if (!failures.empty() && tolerance == 0) {
        throw Error(ErrorKind::InvariantViolation, "exact H weights violate " + failures.front());
    }
    return built;
}

std::vector<std::string> check_weights(const HGraph& h, const WeightSystem& ws, bool with_d4) {
    std::vector<std::string> failures;
    auto fail = [&](std::string what) { failures.push_back(std::move(what)); };
    for (std::size_t e = 0; e < h.edges.size(); ++e) {
        if (ws.edge[e] < 0) fail("nonnegative: edge " + h.vertices[h.edges[e].from].key);
        if (ws.edge[e] != ws.edge[h.edges[e].reverse]) {
            fail("d1: " + h.vertices[h.edges[e].from].key + " -> " + h.vertices[h.edges[e].to].key);
        }
    }
    for (std::size_t a = 0; a < h.vertices.size(); ++a) {
        if (ws.vertex[a] < 0) fail("nonnegative: " + h.vertices[a].key);
        Rational out = 0, in = 0;
        for (auto e : h.out[a]) out += ws.edge[e];
        for (auto e : h.in[a]) in += ws.edge[e];
        if (out != ws.vertex[a]) fail("d2: " + h.vertices[a].key);
        if (in != ws.vertex[a]) fail("d3: " + h.vertices[a].key);
    }
    for (std::size_t m = 0; m < h.balls.size(); ++m) {
        const auto& rm = h.orientations[m];
        Rational total = 0;
        for (auto a : rm) {
            total += ws.vertex[a];
            Rational first = ws.vertex[rm.front()] / h.vertices[rm.front()].multiplicity;
            if (ws.vertex[a] / h.vertices[a].multiplicity != first) fail("orientation: " + h.balls[m].key);
        }
        if (ws.isolated[m] < 0) fail("nonnegative: " + h.balls[m].key);
        if (!with_d4) continue;
        if (h.balls[m].degree == 0) {
            if (ws.isolated[m] != h.balls[m].mass) fail("d4: " + h.balls[m].key);
        } else if (total != h.balls[m].mass * h.balls[m].degree) {
            fail("d4: " + h.balls[m].key);
        }
    }
    return failures;
}

namespace {

using SparseRow = std::map<std::size_t, Rational>;

Integer weights_lcm(const HGraph& h, const WeightSystem& ws) {
    Integer out = 1;
    for (std::size_t a = 0; a < h.vertices.size(); ++a) {
        Rational s = ws.vertex[a] / h.vertices[a].multiplicity;
        out = lcm(out, s.get_den());
    }
    for (const auto& w : ws.edge) out = lcm(out, w.get_den());
    for (const auto& w : ws.isolated) out = lcm(out, w.get_den());
    return out;
}

struct LinearSystem {
    // Variables: one per unordered edge pair, then one per ball with
    // orientations.
    std::vector<std::size_t> pair_of_edge;
    std::vector<std::size_t> var_of_ball;
    std::vector<Rational> target;
    std::vector<std::size_t> column_of_var;  // position in pivot order
    std::vector<std::size_t> var_of_column;
    std::vector<SparseRow> rows;             // reduced, keyed by column
    std::vector<long> pivot_row;             // per column, -1 when free
};

LinearSystem setup(const HGraph& h, const WeightSystem& exact) {
    const std::size_t none = static_cast<std::size_t>(-1);
    LinearSystem sys;
    sys.pair_of_edge.assign(h.edges.size(), none);
    for (std::size_t e = 0; e < h.edges.size(); ++e) {
        std::size_t rev = h.edges[e].reverse;
        if (sys.pair_of_edge[rev] != none) {
            sys.pair_of_edge[e] = sys.pair_of_edge[rev];
            sys.target[sys.pair_of_edge[e]] = (exact.edge[e] + exact.edge[rev]) / 2;
            continue;
        }
        sys.pair_of_edge[e] = sys.target.size();
        sys.target.push_back(exact.edge[e]);
    }
    sys.var_of_ball.assign(h.balls.size(), none);
    for (std::size_t m = 0; m < h.balls.size(); ++m) {
        const auto& rm = h.orientations[m];
        if (rm.empty()) continue;
        Rational s = 0;
        for (auto a : rm) s += exact.vertex[a] / h.vertices[a].multiplicity;
        sys.var_of_ball[m] = sys.target.size();
        sys.target.push_back(s / static_cast<unsigned long>(rm.size()));
    }
    const std::size_t vars = sys.target.size();
    sys.var_of_column.resize(vars);
    std::iota(sys.var_of_column.begin(), sys.var_of_column.end(), 0);
    std::stable_sort(sys.var_of_column.begin(), sys.var_of_column.end(),
                     [&](std::size_t a, std::size_t b) { return sys.target[a] > sys.target[b]; });
    sys.column_of_var.resize(vars);
    for (std::size_t c = 0; c < vars; ++c) sys.column_of_var[sys.var_of_column[c]] = c;

    for (std::size_t a = 0; a < h.vertices.size(); ++a) {
        SparseRow row;
        for (auto e : h.out[a]) {
            std::size_t var = sys.pair_of_edge[e];
            if (sys.target[var] != 0) row[sys.column_of_var[var]] += 1;
        }
        std::size_t s = sys.var_of_ball[h.vertices[a].ball];
        if (sys.target[s] != 0) row[sys.column_of_var[s]] -= h.vertices[a].multiplicity;
        std::erase_if(row, [](const auto& kv) { return kv.second == 0; });
        if (!row.empty()) sys.rows.push_back(std::move(row));
    }

    // Gauss-Jordan with columns in order of decreasing target, so the large
    // coordinates absorb the rounding of the small ones.
    sys.pivot_row.assign(vars, -1);
    std::vector<bool> used(sys.rows.size(), false);
    for (std::size_t c = 0; c < vars; ++c) {
        long pr = -1;
        for (std::size_t r = 0; r < sys.rows.size(); ++r) {
            if (!used[r] && sys.rows[r].count(c)) {
                pr = static_cast<long>(r);
                break;
            }
        }
        if (pr < 0) continue;
        used[pr] = true;
        sys.pivot_row[c] = pr;
        SparseRow& pivot = sys.rows[pr];
        Rational inv = 1 / pivot[c];
        for (auto& [col, v] : pivot) v *= inv;
        for (std::size_t r = 0; r < sys.rows.size(); ++r) {
            if (static_cast<long>(r) == pr) continue;
            auto it = sys.rows[r].find(c);
            if (it == sys.rows[r].end()) continue;
            Rational factor = it->second;
            for (const auto& [col, v] : pivot) {
                Rational& slot = sys.rows[r][col];
                slot -= factor * v;
            }
            std::erase_if(sys.rows[r], [](const auto& kv) { return kv.second == 0; });
        }
    }
    return sys;
}

Rational round_value(const Rational& q, const Integer& d, Rounding mode) {
    return mode == Rounding::Grid ? round_to_grid(q, d) : limit_denominator(q, d);
}

}  // namespace

WeightSystem rationalize(const HGraph& h, const WeightSystem& exact, const RationalizeOptions& options) {
    if (check_weights(h, exact).empty()) {
        if (options.max_denominator == 0 || weights_lcm(h, exact) <= options.max_denominator) {
            WeightSystem out = exact;
            out.delta = 0;
            out.denominator = 0;
            return out;
        }
    }
    Integer d = options.max_denominator;
    if (d == 0) d = std::min<Integer>(weights_lcm(h, exact), Integer(1'000'000));
    if (d < 1) d = 1;

    LinearSystem sys = setup(h, exact);
    const std::size_t vars = sys.target.size();
    Integer best_failure = 0;
    for (; d <= options.denominator_cap; d *= 2) {
        std::vector<Rational> x(vars, 0);
        for (std::size_t c = 0; c < vars; ++c) {
            std::size_t var = sys.var_of_column[c];
            if (sys.pivot_row[c] < 0 && sys.target[var] != 0) x[var] = round_value(sys.target[var], d, options.rounding);
        }
        for (std::size_t c = 0; c < vars; ++c) {
            if (sys.pivot_row[c] < 0) continue;
            Rational value = 0;
            for (const auto& [col, coef] : sys.rows[sys.pivot_row[c]]) {
                if (col != c) value -= coef * x[sys.var_of_column[col]];
            }
            x[sys.var_of_column[c]] = value;
        }
        bool positive = true;
        for (std::size_t v = 0; v < vars; ++v) {
            if ((sys.target[v] != 0 && x[v] <= 0) || (sys.target[v] == 0 && x[v] != 0)) positive = false;
        }
        WeightSystem out;
        out.vertex.resize(h.vertices.size());
        out.edge.resize(h.edges.size());
        out.isolated.resize(h.balls.size());
        for (std::size_t a = 0; a < h.vertices.size(); ++a) {
            out.vertex[a] = x[sys.var_of_ball[h.vertices[a].ball]] * h.vertices[a].multiplicity;
        }
        for (std::size_t e = 0; e < h.edges.size(); ++e) out.edge[e] = x[sys.pair_of_edge[e]];
        for (std::size_t m = 0; m < h.balls.size(); ++m) {
            out.isolated[m] = round_value(exact.isolated[m], d, options.rounding);
            if (exact.isolated[m] > 0 && out.isolated[m] <= 0) positive = false;
        }
        Rational delta = 0;
        for (std::size_t a = 0; a < h.vertices.size(); ++a) delta = std::max(delta, Rational(abs(out.vertex[a] - exact.vertex[a])));
        for (std::size_t e = 0; e < h.edges.size(); ++e) delta = std::max(delta, Rational(abs(out.edge[e] - exact.edge[e])));
        for (std::size_t m = 0; m < h.balls.size(); ++m) {
            delta = std::max(delta, Rational(abs(out.isolated[m] - exact.isolated[m])));
        }
        out.delta = delta;
        out.denominator = d;
        if (!positive || (options.max_delta >= 0 && delta > options.max_delta)) {
            best_failure = d;
            continue;
        }
        auto failures = check_weights(h, out);
        if (!failures.empty()) throw Error(ErrorKind::InvariantViolation, "rounded weights violate " + failures.front());
        return out;
    }
    throw Error(ErrorKind::InfeasibleRounding, "no admissible rounding with denominator bound up to " +
                                                   best_failure.get_str());
}

Integer choose_N(const HGraph& h, const WeightSystem& ws) {
    return lcm(Integer(2), weights_lcm(h, ws));
}

}  // namespace bsynth
