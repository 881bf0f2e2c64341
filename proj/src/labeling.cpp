#include "bsynth/labeling.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "bsynth/error.hpp"
#include "bsynth/validator.hpp"

namespace bsynth {

Rational separated_fraction(const BallCode& alpha, unsigned n) {
    const auto v = vertex_count(alpha);
    Rational out(falling_factorial(n, v), power(n, v));
    out.canonicalize();
    return out;
}

LabelBudget choose_n(const MarginalTable& table, unsigned radius, const Rational& bound) {
    if (bound <= 0 || bound >= 1) throw Error(ErrorKind::InvalidArgument, "label budget must lie in (0, 1)");
    for (unsigned n = 1;; ++n) {
        Rational slack = 0;
        for (const auto& [ball, p] : table.level(radius)) slack += p * (1 - separated_fraction(ball, n));
        if (slack < bound) return {n, slack};
    }
}

namespace {

// Labeled planted trees are written [label, k, child_1, ..., child_k] with
// children in ascending order.
struct Planted {
    Code code;
    Integer aut;
};

Planted planted(const RootedGraph& g, const std::vector<unsigned>& labels, int v, int parent, int depth) {
    std::vector<Planted> kids;
    if (depth != 0) {
        for (int u : g.adjacency[v]) {
            if (u != parent) kids.push_back(planted(g, labels, u, v, depth - 1));
        }
    }
    std::sort(kids.begin(), kids.end(), [](const Planted& a, const Planted& b) { return a.code < b.code; });
    Planted out{{labels[v], static_cast<std::uint32_t>(kids.size())}, 1};
    std::size_t run = 0;
    for (std::size_t i = 0; i < kids.size(); ++i) {
        out.code.insert(out.code.end(), kids[i].code.begin(), kids[i].code.end());
        out.aut *= kids[i].aut;
        run = (i > 0 && kids[i].code == kids[i - 1].code) ? run + 1 : 1;
        out.aut *= static_cast<unsigned long>(run);
    }
    return out;
}

std::size_t lskip(CodeView code, std::size_t pos) {
    std::uint32_t k = code[pos + 1];
    pos += 2;
    for (std::uint32_t i = 0; i < k; ++i) pos = lskip(code, pos);
    return pos;
}

Code ltruncate(CodeView code, std::size_t pos, unsigned depth) {
    if (depth == 0) return {code[pos], 0};
    std::uint32_t k = code[pos + 1];
    std::vector<Code> kids;
    std::size_t at = pos + 2;
    for (std::uint32_t i = 0; i < k; ++i) {
        kids.push_back(ltruncate(code, at, depth - 1));
        at = lskip(code, at);
    }
    std::sort(kids.begin(), kids.end());
    Code out{code[pos], k};
    for (const auto& c : kids) out.insert(out.end(), c.begin(), c.end());
    return out;
}

Code ltruncate(const Code& code, unsigned depth) { return ltruncate(code, 0, depth); }

std::string join(const Code& code) {
    std::string out;
    for (std::size_t i = 0; i < code.size(); ++i) {
        if (i) out += '.';
        out += std::to_string(code[i]);
    }
    return out;
}

std::string pair_key(const Code& a, const Code& b) { return join(a) + "|" + join(b); }

struct Labelings {
    std::uint64_t cap;
    std::uint64_t used = 0;

    // Calls fn for every assignment of {1..n} to the vertices in `slots`.
    void each(std::vector<unsigned>& labels, const std::vector<int>& slots, unsigned n,
              const std::function<void()>& fn) {
        Integer count = power(n, slots.size());
        if (count > Integer(std::to_string(cap - used))) {
            throw Error(ErrorKind::ExplosionGuard, "labeling enumeration exceeds the cap of " + std::to_string(cap));
        }
        used += count.get_ui();
        for (int s : slots) labels[s] = 1;
        while (true) {
            fn();
            std::size_t i = 0;
            while (i < slots.size() && labels[slots[i]] == n) labels[slots[i++]] = 1;
            if (i == slots.size()) break;
            ++labels[slots[i]];
        }
    }
};

struct VecClass {
    Rational formula;
    Rational raw;
    std::string ball_key;
    BallCode shape;
    std::uint32_t multiplicity = 0;
    unsigned degree = 0;
    bool separated = false;
    Code tail;
    Code head;
};

bool distinct(const std::vector<unsigned>& labels) {
    std::set<unsigned> seen(labels.begin(), labels.end());
    return seen.size() == labels.size();
}

// Every labeled class of every directed ball of radius r with positive mass.
std::map<std::string, VecClass> vec_classes(const MarginalTable& table, unsigned r, unsigned n, Labelings& enumerate,
                                            std::vector<std::string>* failures) {
    std::map<std::string, VecClass> out;
    for (const auto& [vec, mass] : induce_vec(table, r)) {
        if (mass == 0) continue;
        auto og = to_oriented_graph(vec);
        const auto& g = og.graph;
        const std::vector<unsigned> blank(g.size(), 0);
        Integer aut = planted(g, blank, 0, og.head, -1).aut * planted(g, blank, og.head, 0, -1).aut;
        const Integer scale = power(n, g.size());
        Rational share(1, scale);
        share *= mass;
        Rational total = 0;
        std::vector<int> slots(g.size());
        for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = static_cast<int>(i);
        std::vector<unsigned> labels(g.size(), 1);
        enumerate.each(labels, slots, n, [&] {
            auto tail = planted(g, labels, 0, og.head, -1);
            auto head = planted(g, labels, og.head, 0, -1);
            auto [it, fresh] = out.try_emplace(pair_key(tail.code, head.code));
            VecClass& c = it->second;
            c.raw += share;
            if (!fresh) return;
            Rational size(aut, tail.aut * head.aut);
            size.canonicalize();
            c.formula = size * share;
            total += c.formula;
            c.shape = vec.ball();
            c.degree = static_cast<unsigned>(g.adjacency[0].size());
            c.separated = distinct(labels);
            c.tail = tail.code;
            c.head = head.code;
            c.ball_key = join(planted(g, labels, 0, -1, -1).code);
            for (int u : g.adjacency[0]) {
                auto t = planted(g, labels, 0, u, -1);
                auto h = planted(g, labels, u, 0, -1);
                if (t.code == tail.code && h.code == head.code) ++c.multiplicity;
            }
        });
        if (failures && total != mass) {
            failures->push_back("class_masses: " + vec.token() + " classes sum to " + to_string(total) + " not " +
                                to_string(mass));
        }
    }
    return out;
}

// Labeled radius-r edge-balls with their masses, from radius-(r+1)
// orientations.
std::map<std::pair<Code, Code>, Rational> edge_classes(const MarginalTable& table, unsigned r, unsigned n,
                                                       Labelings& enumerate) {
    std::map<std::pair<Code, Code>, Rational> out;
    for (const auto& [beta, mass] : induce_vec(table, r + 1)) {
        if (mass == 0) continue;
        auto og = to_oriented_graph(beta);
        const auto& g = og.graph;
        std::vector<int> slots;
        std::function<void(int, int, unsigned)> collect = [&](int v, int parent, unsigned depth) {
            slots.push_back(v);
            if (depth == 0) return;
            for (int u : g.adjacency[v]) {
                if (u != parent) collect(u, v, depth - 1);
            }
        };
        collect(0, og.head, r);
        collect(og.head, 0, r);
        Rational share(1, power(n, slots.size()));
        share *= mass;
        std::vector<unsigned> labels(g.size(), 0);
        enumerate.each(labels, slots, n, [&] {
            auto root_side = planted(g, labels, 0, og.head, static_cast<int>(r)).code;
            auto head_side = planted(g, labels, og.head, 0, static_cast<int>(r)).code;
            out[{std::move(root_side), std::move(head_side)}] += share;
        });
    }
    return out;
}

std::string s_key(const std::pair<Code, Code>& phi, unsigned r) {
    return pair_key(phi.first, ltruncate(phi.second, r - 1));
}

std::string t_key(const std::pair<Code, Code>& phi, unsigned r) {
    return pair_key(phi.second, ltruncate(phi.first, r - 1));
}

struct BallAggregate {
    Rational plain;
    Rational weighted;
    unsigned degree = 0;
    BallCode shape;
    bool separated = false;
};

std::map<std::string, BallAggregate> aggregate_balls(const std::map<std::string, VecClass>& vec) {
    std::map<std::string, BallAggregate> out;
    for (const auto& [key, c] : vec) {
        auto& b = out[c.ball_key];
        b.plain += c.formula;
        b.weighted += c.formula * c.multiplicity;
        b.degree = c.degree;
        b.shape = c.shape;
        b.separated = c.separated;
    }
    return out;
}

}  // namespace

Integer class_size(const VecBall& a, const std::vector<unsigned>& labels) {
    auto og = to_oriented_graph(a);
    if (labels.size() != og.graph.size()) throw Error(ErrorKind::InvalidArgument, "one label per vertex expected");
    const std::vector<unsigned> blank(labels.size(), 0);
    Integer aut = planted(og.graph, blank, 0, og.head, -1).aut * planted(og.graph, blank, og.head, 0, -1).aut;
    Integer kept = planted(og.graph, labels, 0, og.head, -1).aut * planted(og.graph, labels, og.head, 0, -1).aut;
    return aut / kept;
}

Rational labeled_mass(const VecBall& a, const Rational& vec_mass, const std::vector<unsigned>& labels, unsigned n) {
    Rational out(class_size(a, labels), power(n, labels.size()));
    out.canonicalize();
    return out * vec_mass;
}

IdentityReport check_identities(const MarginalTable& table, unsigned r, unsigned n, std::uint64_t cap) {
    if (r == 0) throw Error(ErrorKind::BadRadius, "labeled identities need radius >= 1");
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "n must be positive");
    if (table.depth() < r + 1) throw Error(ErrorKind::InsufficientDepth, "identities need depth r + 1");
    IdentityReport report;
    report.radius = r;
    report.n = n;
    Labelings enumerate{cap};
    auto fail = [&](bool& flag, std::string what) {
        flag = false;
        report.failures.push_back(std::move(what));
    };

    std::vector<std::string> class_failures;
    auto vec = vec_classes(table, r, n, enumerate, &class_failures);
    for (auto& f : class_failures) fail(report.class_masses, std::move(f));
    for (const auto& [key, c] : vec) {
        if (c.formula != c.raw) fail(report.class_masses, "class size: " + key);
    }
    report.vec_classes = vec.size();

    auto edges = edge_classes(table, r, n, enumerate);
    report.edge_classes = edges.size();
    std::map<std::string, Rational> by_s, by_t;
    for (const auto& [phi, mass] : edges) {
        by_s[s_key(phi, r)] += mass;
        by_t[t_key(phi, r)] += mass;
        auto it = edges.find({phi.second, phi.first});
        Rational back = it == edges.end() ? Rational(0) : it->second;
        if (back != mass) fail(report.involution, "involution: " + pair_key(phi.first, phi.second));
    }
    auto lookup = [](const std::map<std::string, Rational>& m, const std::string& key) {
        auto it = m.find(key);
        return it == m.end() ? Rational(0) : it->second;
    };
    for (const auto& [key, c] : vec) {
        if (lookup(by_s, key) != c.formula) fail(report.s_marginal, "s-sum: " + key);
        if (lookup(by_t, key) != c.formula) fail(report.t_marginal, "t-sum: " + key);
    }
    for (const auto& [key, m] : by_s) {
        if (!vec.count(key) && m != 0) fail(report.s_marginal, "s-sum on an unknown class: " + key);
    }
    for (const auto& [key, m] : by_t) {
        if (!vec.count(key) && m != 0) fail(report.t_marginal, "t-sum on an unknown class: " + key);
    }

    BallMasses total, separated;
    auto balls = aggregate_balls(vec);
    report.ball_classes = balls.size();
    for (const auto& [key, b] : balls) {
        Rational mu_n = b.plain / b.degree;
        total[b.shape] += mu_n;
        if (b.separated) separated[b.shape] += mu_n;
        if (b.weighted != b.plain) {
            ++report.weighted_formula_mismatches;
            if (b.separated) fail(report.weighted_formula_on_separated, "weighted formula: " + key);
        }
    }
    for (const auto& [ball, mu] : table.level(r)) {
        if (mu == 0 || root_degree(ball) != 0) continue;
        // A single vertex: n labelings, each its own class of size one.
        report.ball_classes += n;
        total[ball] += mu;
        separated[ball] += mu;
    }
    for (const auto& [ball, mu] : table.level(r)) {
        if (total[ball] != mu) fail(report.ball_masses, "ball_masses: " + ball.token());
        if (separated[ball] != separated_fraction(ball, n) * mu) fail(report.separated, "separated: " + ball.token());
    }
    for (const auto& [ball, mu] : total) {
        if (table.mass(ball) != mu) fail(report.ball_masses, "ball_masses, extra ball: " + ball.token());
    }
    return report;
}

std::string format_identities(const IdentityReport& report) {
    std::ostringstream out;
    auto flag = [](bool b) { return b ? "ok" : "FAIL"; };
    out << "radius " << report.radius << " n " << report.n << '\n';
    out << "classes vec=" << report.vec_classes << " edge=" << report.edge_classes
        << " ball=" << report.ball_classes << '\n';
    out << "class_masses " << flag(report.class_masses) << '\n';
    out << "ball_masses " << flag(report.ball_masses) << '\n';
    out << "separated " << flag(report.separated) << '\n';
    out << "s_marginal " << flag(report.s_marginal) << '\n';
    out << "t_marginal " << flag(report.t_marginal) << '\n';
    out << "involution " << flag(report.involution) << '\n';
    out << "weighted_formula_on_separated " << flag(report.weighted_formula_on_separated)
        << " (non-separated mismatches " << report.weighted_formula_mismatches << ")\n";
    for (const auto& f : report.failures) out << "failure " << f << '\n';
    return out.str();
}

HBuild build_faithful_H(const MarginalTable& table, unsigned r, unsigned n, std::uint64_t cap) {
    auto report = check(table, r + 1);
    if (!report.pass()) {
        const auto& v = report.violations.front();
        throw Error(ErrorKind::ValidationRequired, "table fails " + v.equation + " at radius " +
                                                       std::to_string(v.radius) + " (" + v.witness + ")");
    }
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "n must be positive");
    Labelings enumerate{cap};
    const unsigned outer = r + 1;
    auto vec = vec_classes(table, outer, n, enumerate, nullptr);
    auto balls = aggregate_balls(vec);

    HRecords rec;
    rec.degree_bound = table.degree_bound();
    rec.radius = outer;
    rec.labeled = true;
    std::map<std::string, std::size_t> ball_index;
    for (const auto& [key, b] : balls) {
        ball_index[key] = rec.balls.size();
        rec.balls.push_back({key, b.shape, b.degree, b.plain / b.degree});
    }
    for (const auto& [ball, mu] : table.level(outer)) {
        if (mu == 0 || root_degree(ball) != 0) continue;
        for (unsigned label = 1; label <= n; ++label) {
            rec.balls.push_back({join(Code{label, 0}), ball, 0, mu / n});
        }
    }
    for (const auto& [key, c] : vec) {
        Code link_root = ltruncate(c.tail, r);
        Code link_head = ltruncate(c.head, r);
        rec.vertices.push_back({key, ball_index.at(c.ball_key), c.multiplicity, pair_key(link_root, link_head),
                                pair_key(link_head, link_root)});
        rec.vertex_weight.push_back(c.formula);
    }
    for (const auto& [phi, mass] : edge_classes(table, outer, n, enumerate)) {
        if (mass != 0) rec.edge_weight[{s_key(phi, outer), t_key(phi, outer)}] += mass;
    }
    auto built = assemble_h(std::move(rec));
    auto failures = check_weights(built.graph, built.exact, true);
    if (!failures.empty()) throw Error(ErrorKind::InvariantViolation, "labeled H weights violate " + failures.front());
    return built;
}

}  // namespace bsynth
