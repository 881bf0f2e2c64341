#include "bsynth/measures.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <fstream>
#include <functional>
#include <sstream>

#include "bsynth/error.hpp"

namespace bsynth {

MarginalTable::MarginalTable(unsigned degree_bound, unsigned depth)
    : degree_bound_(degree_bound), depth_(depth), levels_(depth + 1) {}

const BallMasses& MarginalTable::level(unsigned r) const {
    if (r > depth_) throw Error(ErrorKind::InsufficientDepth, "table has no level " + std::to_string(r));
    return levels_[r];
}

BallMasses& MarginalTable::level(unsigned r) {
    if (r > depth_) throw Error(ErrorKind::InsufficientDepth, "table has no level " + std::to_string(r));
    return levels_[r];
}

Rational MarginalTable::mass(const BallCode& ball) const {
    if (ball.radius() > depth_) return 0;
    auto it = levels_[ball.radius()].find(ball);
    return it == levels_[ball.radius()].end() ? Rational(0) : it->second;
}

void MarginalTable::verify() const {
    auto fail = [](unsigned r, const std::string& token, const std::string& what) {
        throw Error(ErrorKind::InvariantViolation,
                    what + " at depth " + std::to_string(r) + (token.empty() ? "" : " (ball " + token + ")"));
    };
    if (degree_bound_ == 0) fail(0, "", "degree bound must be positive");
    for (unsigned r = 0; r <= depth_; ++r) {
        Rational total = 0;
        for (const auto& [ball, p] : levels_[r]) {
            if (ball.degree_bound() != degree_bound_ || ball.radius() != r) {
                fail(r, ball.token(), "ball code parameters do not match the table");
            }
            if (!ball.is_tree()) fail(r, ball.token(), "support: ball is not a tree");
            if (p < 0) fail(r, ball.token(), "negative probability");
            total += p;
        }
        if (total != 1) fail(r, "", "sum-to-one: level sums to " + to_string(total));
    }
    for (unsigned r = 0; r < depth_; ++r) {
        BallMasses projected;
        for (const auto& [ball, p] : levels_[r + 1]) projected[truncate(ball, r)] += p;
        for (const auto& [ball, p] : levels_[r]) {
            auto it = projected.find(ball);
            Rational q = it == projected.end() ? Rational(0) : it->second;
            if (q != p) {
                fail(r, ball.token(), "consistency: mass " + to_string(p) + " but deeper level projects " + to_string(q));
            }
        }
        for (const auto& [ball, q] : projected) {
            if (q != 0 && !levels_[r].count(ball)) {
                fail(r, ball.token(), "consistency: deeper level projects onto a ball missing here");
            }
        }
    }
}

namespace {

Code regular_planted(unsigned children, unsigned depth) {
    if (depth == 0) return tree::leaf();
    return tree::join(std::vector<Code>(children, regular_planted(children, depth - 1)));
}

using Weighted = std::vector<std::pair<Code, Rational>>;

// Every multiset of exactly k items with multinomial probability
// k! / prod m_j! * prod p_j^{m_j}.
void multisets(const Weighted& items, unsigned k, const Rational& scale, Weighted& out) {
    std::vector<std::size_t> idx;
    const Integer kfact = factorial(k);
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
        if (idx.size() == k) {
            Rational p = scale * kfact;
            Code code{k};
            std::size_t run = 0;
            for (std::size_t i = 0; i < idx.size(); ++i) {
                p *= items[idx[i]].second;
                const auto& c = items[idx[i]].first;
                code.insert(code.end(), c.begin(), c.end());
                run = (i > 0 && idx[i] == idx[i - 1]) ? run + 1 : 1;
                p /= run;
            }
            if (p != 0) out.emplace_back(std::move(code), p);
            return;
        }
        for (std::size_t i = from; i < items.size(); ++i) {
            idx.push_back(i);
            rec(i);
            idx.pop_back();
        }
    };
    rec(0);
}

void check_distribution(const Distribution& law, unsigned max_value, const char* what) {
    Rational total = 0;
    for (const auto& [k, p] : law) {
        if (p < 0) throw Error(ErrorKind::InvalidArgument, std::string(what) + ": negative probability");
        if (p > 0 && k > max_value) {
            throw Error(ErrorKind::DegreeExceeded, std::string(what) + ": value " + std::to_string(k) +
                                                       " exceeds " + std::to_string(max_value));
        }
        total += p;
    }
    if (total != 1) throw Error(ErrorKind::InvalidArgument, std::string(what) + " sums to " + to_string(total));
}

}  // namespace

MarginalTable marginals_regular(unsigned d, unsigned depth) {
    if (d == 0) throw Error(ErrorKind::InvalidArgument, "degree bound must be positive");
    MarginalTable table(d, depth);
    for (unsigned r = 0; r <= depth; ++r) {
        Code body = r == 0 ? tree::leaf() : tree::join(std::vector<Code>(d, regular_planted(d - 1, r - 1)));
        table.level(r)[BallCode::tree(d, r, std::move(body))] = 1;
    }
    return table;
}

MarginalTable marginals_gw(const Distribution& root_law, const Distribution& offspring_law, unsigned d,
                           unsigned depth) {
    if (d == 0) throw Error(ErrorKind::InvalidArgument, "degree bound must be positive");
    check_distribution(root_law, d, "root degree law");
    check_distribution(offspring_law, d - 1, "offspring law");
    MarginalTable table(d, depth);
    // planted[h]: law of the subtree below a non-root vertex, cut at depth h.
    std::vector<Weighted> planted{{{tree::leaf(), Rational(1)}}};
    for (unsigned h = 1; h < depth; ++h) {
        Weighted next;
        for (const auto& [k, p] : offspring_law) {
            if (p > 0) multisets(planted[h - 1], k, p, next);
        }
        std::sort(next.begin(), next.end());
        planted.push_back(std::move(next));
    }
    table.level(0)[BallCode::tree(d, 0, tree::leaf())] = 1;
    for (unsigned r = 1; r <= depth; ++r) {
        Weighted balls;
        for (const auto& [k, p] : root_law) {
            if (p > 0) multisets(planted[r - 1], k, p, balls);
        }
        for (auto& [code, p] : balls) table.level(r)[BallCode::tree(d, r, std::move(code))] += p;
    }
    return table;
}

Distribution size_biased(const Distribution& degree_law) {
    Rational mean = 0;
    for (const auto& [k, p] : degree_law) mean += p * k;
    if (mean == 0) throw Error(ErrorKind::ZeroMeanDegree, "degree law has zero mean");
    Distribution out;
    for (const auto& [k, p] : degree_law) {
        if (k >= 1 && p > 0) out[k - 1] = Rational(p * k / mean);
    }
    return out;
}

MarginalTable marginals_ugw(const Distribution& degree_law, unsigned d, unsigned depth) {
    check_distribution(degree_law, d, "degree law");
    return marginals_gw(degree_law, size_biased(degree_law), d, depth);
}

namespace {

Code planted_in(const Graph& g, int v, int parent, unsigned depth) {
    if (depth == 0) return tree::leaf();
    std::vector<Code> kids;
    for (int u : g.adjacency[v]) {
        if (u != parent) kids.push_back(planted_in(g, u, v, depth - 1));
    }
    return tree::join(std::move(kids));
}

}  // namespace

MarginalTable marginals_atom(const Graph& tree, unsigned depth, unsigned d) {
    const std::size_t n = tree.size();
    if (n == 0) throw Error(ErrorKind::NotATree, "empty graph");
    if (!tree.is_simple() || tree.edge_count() + 1 != n || !tree.is_forest()) {
        throw Error(ErrorKind::NotATree, "atom generator needs a finite tree");
    }
    if (d == 0) d = std::max(1u, tree.max_degree());
    if (tree.max_degree() > d) {
        throw Error(ErrorKind::DegreeExceeded, "tree has a vertex of degree " + std::to_string(tree.max_degree()));
    }
    MarginalTable table(d, depth);
    const Rational each(1, static_cast<unsigned long>(n));
    for (unsigned r = 0; r <= depth; ++r) {
        for (std::size_t v = 0; v < n; ++v) {
            table.level(r)[BallCode::tree(d, r, planted_in(tree, static_cast<int>(v), -1, r))] += each;
        }
    }
    return table;
}

MarginalTable mixture(const std::vector<std::pair<MarginalTable, Rational>>& parts) {
    if (parts.empty()) throw Error(ErrorKind::InvalidArgument, "empty mixture");
    const unsigned d = parts.front().first.degree_bound();
    const unsigned depth = parts.front().first.depth();
    Rational total = 0;
    for (const auto& [t, w] : parts) {
        if (t.degree_bound() != d || t.depth() != depth) {
            throw Error(ErrorKind::ParameterMismatch, "mixture components need equal degree bound and depth");
        }
        if (w <= 0) throw Error(ErrorKind::InvalidArgument, "mixture weights must be positive");
        total += w;
    }
    if (total != 1) throw Error(ErrorKind::InvalidArgument, "mixture weights sum to " + to_string(total));
    MarginalTable out(d, depth);
    for (unsigned r = 0; r <= depth; ++r) {
        for (const auto& [t, w] : parts) {
            for (const auto& [ball, p] : t.level(r)) out.level(r)[ball] += w * p;
        }
    }
    return out;
}

void save_table(std::ostream& out, const MarginalTable& table) {
    out << "format_version 1\n";
    out << "d " << table.degree_bound() << '\n';
    out << "depth " << table.depth() << '\n';
    for (unsigned r = 0; r <= table.depth(); ++r) {
        const auto& level = table.level(r);
        out << "level " << r << ' ' << level.size() << '\n';
        for (const auto& [ball, p] : level) {
            out << ball.token() << ' ' << p.get_num().get_str() << ' ' << p.get_den().get_str() << '\n';
        }
    }
}

MarginalTable load_table(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() -> std::istringstream {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line[0] != '#') return std::istringstream(line);
        }
        throw Error(ErrorKind::ParseError, "unexpected end of table file after line " + std::to_string(lineno));
    };
    auto expect_key = [&](const char* key) -> long {
        auto ls = next_line();
        std::string k, rest;
        long value = -1;
        if (!(ls >> k >> value) || k != key || (ls >> rest) || value < 0) {
            throw Error(ErrorKind::ParseError, std::string("expected '") + key + "' on line " + std::to_string(lineno));
        }
        return value;
    };
    if (expect_key("format_version") != 1) throw Error(ErrorKind::ParseError, "unsupported format_version");
    long d = expect_key("d");
    long depth = expect_key("depth");
    if (d < 1 || depth > 64) throw Error(ErrorKind::ParseError, "bad table header");
    MarginalTable table(static_cast<unsigned>(d), static_cast<unsigned>(depth));
    for (long r = 0; r <= depth; ++r) {
        auto ls = next_line();
        std::string k, rest;
        long level = -1, count = -1;
        if (!(ls >> k >> level >> count) || k != "level" || level != r || count < 0 || (ls >> rest)) {
            throw Error(ErrorKind::ParseError, "expected 'level " + std::to_string(r) + " <count>' on line " +
                                                   std::to_string(lineno));
        }
        for (long i = 0; i < count; ++i) {
            auto es = next_line();
            std::string token, num, den;
            if (!(es >> token >> num >> den) || (es >> rest)) {
                throw Error(ErrorKind::ParseError, "bad entry on line " + std::to_string(lineno));
            }
            auto ball = BallCode::from_token(token);
            auto p = parse_rational(num + "/" + den);
            if (!table.level(static_cast<unsigned>(r)).emplace(ball, p).second) {
                throw Error(ErrorKind::ParseError, "duplicate ball on line " + std::to_string(lineno));
            }
        }
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line[0] != '#') {
            throw Error(ErrorKind::ParseError, "trailing content on line " + std::to_string(lineno));
        }
    }
    table.verify();
    return table;
}

void save_table_file(const std::string& path, const MarginalTable& table) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
    save_table(out, table);
}

MarginalTable load_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
    return load_table(in);
}

std::string table_digest(const MarginalTable& table) {
    std::ostringstream os;
    save_table(os, table);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : os.str()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Distribution parse_distribution(const std::string& text) {
    Distribution out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos) throw Error(ErrorKind::ParseError, "expected k:p in '" + item + "'");
        unsigned k = 0;
        try {
            k = static_cast<unsigned>(std::stoul(item.substr(0, colon)));
        } catch (const std::exception&) {
            throw Error(ErrorKind::ParseError, "bad value in '" + item + "'");
        }
        out[k] += parse_rational(item.substr(colon + 1));
    }
    if (out.empty()) throw Error(ErrorKind::ParseError, "empty distribution");
    return out;
}

}  // namespace bsynth
