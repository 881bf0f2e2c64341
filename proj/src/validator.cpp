#include "bsynth/validator.hpp"

#include <sstream>

#include "bsynth/error.hpp"

namespace bsynth {

VecMarginal induce_vec(const MarginalTable& table, unsigned r) {
    VecMarginal out;
    for (const auto& [ball, p] : table.level(r)) {
        if (!ball.is_tree() || p == 0) continue;
        for (const auto& vec : orientations(ball)) out[vec] += p * vec.multiplicity();
    }
    return out;
}

EdgeMarginal edge_marginals(const MarginalTable& table, unsigned r) {
    if (table.depth() < r + 1) {
        throw Error(ErrorKind::InsufficientDepth, "edge marginals at radius " + std::to_string(r) +
                                                      " need depth " + std::to_string(r + 1));
    }
    EdgeMarginal out;
    for (const auto& [outer, mass] : induce_vec(table, r + 1)) out[edge_ball_within(outer)] += mass;
    return out;
}

namespace {

struct Checker {
    const MarginalTable& table;
    const Rational& tolerance;
    ValidationReport report;

    void flag(const char* eq, unsigned r, std::string witness, const Rational& lhs, const Rational& rhs) {
        report.violations.push_back({eq, r, std::move(witness), lhs, rhs});
    }

    bool differ(const Rational& a, const Rational& b) const { return abs(a - b) > tolerance; }

    void level(unsigned r) {
        Rational total = 0;
        for (const auto& [ball, p] : table.level(r)) {
            total += p;
            if (!ball.is_tree() && p != 0) flag("support", r, ball.token(), p, 0);
            if (ball.radius() != r || ball.degree_bound() != table.degree_bound()) {
                flag("support", r, ball.token(), p, 0);
            }
            if (p < 0) flag("support", r, ball.token(), p, 0);
        }
        if (differ(total, 1)) flag("sum-to-one", r, "level", total, 1);
    }

    void consistency(unsigned r) {
        BallMasses projected;
        for (const auto& [ball, p] : table.level(r + 1)) {
            if (ball.radius() == r + 1) projected[truncate(ball, r)] += p;
        }
        for (const auto& [ball, p] : table.level(r)) projected.try_emplace(ball, 0);
        for (const auto& [ball, q] : projected) {
            Rational p = table.mass(ball);
            if (differ(p, q)) flag("consistency", r, ball.token(), p, q);
        }
    }

    void edges(unsigned r) {
        auto phi = edge_marginals(table, r);
        for (const auto& [e, mass] : phi) {
            auto it = phi.find(involute(e));
            Rational back = it == phi.end() ? Rational(0) : it->second;
            if (differ(mass, back)) flag("e3", r, e.token(), mass, back);
        }
        if (r == 0) return;
        auto vec = induce_vec(table, r);
        VecMarginal by_s, by_t;
        for (const auto& [e, mass] : phi) {
            by_s[s_view(e)] += mass;
            by_t[t_view(e)] += mass;
        }
        for (const auto& [a, m] : vec) {
            by_s.try_emplace(a, 0);
            by_t.try_emplace(a, 0);
        }
        auto lookup = [&](const VecBall& a) {
            auto it = vec.find(a);
            return it == vec.end() ? Rational(0) : it->second;
        };
        for (const auto& [a, sum] : by_s) {
            if (differ(lookup(a), sum)) flag("e1", r, a.token(), lookup(a), sum);
        }
        for (const auto& [a, sum] : by_t) {
            if (differ(lookup(a), sum)) flag("e2", r, a.token(), lookup(a), sum);
        }
    }
};

}  // namespace

ValidationReport check(const MarginalTable& table, unsigned r_max, const Rational& tolerance) {
    if (table.depth() < r_max + 1) {
        throw Error(ErrorKind::InsufficientDepth, "validating up to radius " + std::to_string(r_max) +
                                                      " needs depth " + std::to_string(r_max + 1));
    }
    Checker c{table, tolerance, {}};
    c.report.r_max = r_max;
    c.level(0);
    for (unsigned r = 0; r <= r_max; ++r) {
        c.level(r + 1);
        c.consistency(r);
        c.edges(r);
        bool clean = true;
        for (const auto& v : c.report.violations) clean = clean && v.radius > r;
        if (clean) c.report.certified_radius = r;
    }
    return std::move(c.report);
}

std::string format_report(const ValidationReport& report) {
    std::ostringstream out;
    out << "status " << (report.pass() ? "pass" : "fail") << '\n';
    out << "r_max " << report.r_max << '\n';
    out << "certified_radius "
        << (report.certified_radius ? std::to_string(*report.certified_radius) : std::string("none")) << '\n';
    out << "violations " << report.violations.size() << '\n';
    for (const auto& v : report.violations) {
        out << "violation " << v.equation << " r=" << v.radius << " witness=" << v.witness << " lhs=" << to_string(v.lhs)
            << " rhs=" << to_string(v.rhs) << '\n';
    }
    return out.str();
}

}  // namespace bsynth
