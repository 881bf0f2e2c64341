#include "bsynth/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "bsynth/error.hpp"
#include "bsynth/synthesizer.hpp"
#include "bsynth/validator.hpp"

namespace bsynth {

namespace {

constexpr std::uint64_t kDefaultSeed = 0x5eed;

struct Config {
    // marginals
    std::string kind = "regular";
    unsigned d = 0;
    unsigned depth = 3;
    std::string degree_law;
    std::string root_law;
    std::string offspring_law;
    std::string tree;
    std::vector<std::string> parts;
    // shared
    std::string table_path;
    std::string out_path;
    std::vector<std::string> graph_paths;
    int r = -1;
    int r_max = -1;
    std::string epsilon;
    std::string seed = std::to_string(kDefaultSeed);
    std::string mode = "quotient";
    unsigned n = 0;
    std::string max_N = "2000000";
    std::string max_denominator = "0";
    std::size_t ball_cap = 0;
    int workers = -1;
    bool json = false;
    bool no_verify = false;
    unsigned K = 3;
    std::string prefix = "G";
};

enum Exit { kOk = 0, kFail = 1, kUsage = 2, kMaxN = 3 };

unsigned resolve_workers(int flag) {
    if (flag >= 0) return static_cast<unsigned>(flag);
    if (const char* env = std::getenv("BSYNTH_WORKERS")) {
        try {
            return static_cast<unsigned>(std::stoul(env));
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidArgument, std::string("BSYNTH_WORKERS is not a number: ") + env);
        }
    }
    return 0;
}

std::uint64_t resolve_seed(const std::string& text) {
    if (text == "random") {
        std::random_device rd;
        return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    try {
        std::size_t used = 0;
        auto v = std::stoull(text, &used, 0);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidArgument, "seed must be a 64-bit integer or 'random': " + text);
    }
}

Integer parse_integer(const std::string& text, const char* what) {
    Rational q = parse_rational(text);
    if (q.get_den() != 1 || q < 0) throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be a nonnegative integer");
    return q.get_num();
}

Rational parse_epsilon(const std::string& text) {
    Rational eps = parse_rational(text);
    if (eps <= 0 || eps >= 1) throw Error(ErrorKind::InvalidArgument, "epsilon must lie in (0, 1)");
    return eps;
}

void write_table(const MarginalTable& table, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
        save_table(out, table);
    } else {
        save_table_file(path, table);
    }
}

int cmd_marginals(const Config& c, std::ostream& out) {
    MarginalTable table;
    if (c.kind == "regular") {
        table = marginals_regular(c.d, c.depth);
    } else if (c.kind == "ugw") {
        auto law = parse_distribution(c.degree_law);
        unsigned d = c.d ? c.d : law.rbegin()->first;
        table = marginals_ugw(law, d, c.depth);
    } else if (c.kind == "gw") {
        auto root = parse_distribution(c.root_law);
        auto offspring = parse_distribution(c.offspring_law);
        unsigned d = c.d ? c.d : std::max(root.rbegin()->first, offspring.rbegin()->first + 1);
        table = marginals_gw(root, offspring, d, c.depth);
    } else if (c.kind == "atom") {
        Graph g;
        if (std::ifstream probe(c.tree); probe) {
            g = read_edge_list_file(c.tree).graph;
        } else {
            g = named_tree(c.tree);
        }
        table = marginals_atom(g, c.depth, c.d);
    } else if (c.kind == "mixture") {
        std::vector<std::pair<MarginalTable, Rational>> parts;
        for (const auto& p : c.parts) {
            auto colon = p.rfind(':');
            if (colon == std::string::npos) throw Error(ErrorKind::InvalidArgument, "mixture part must be path:weight");
            parts.emplace_back(load_table_file(p.substr(0, colon)), parse_rational(p.substr(colon + 1)));
        }
        table = mixture(parts);
    } else {
        throw Error(ErrorKind::InvalidArgument, "unknown measure kind " + c.kind);
    }
    table.verify();
    write_table(table, c.out_path, out);
    return kOk;
}

int cmd_validate(const Config& c, std::ostream& out) {
    auto table = load_table_file(c.table_path);
    if (table.depth() == 0) throw Error(ErrorKind::InsufficientDepth, "validation needs a table of depth at least 1");
    unsigned r_max = c.r_max >= 0 ? static_cast<unsigned>(c.r_max) : table.depth() - 1;
    auto report = check(table, r_max);
    out << format_report(report);
    return report.pass() ? kOk : kFail;
}

SynthesisOptions synthesis_options(const Config& c, unsigned d, unsigned r) {
    SynthesisOptions opt;
    if (c.mode == "faithful") {
        opt.mode = Mode::Faithful;
    } else if (c.mode != "quotient") {
        throw Error(ErrorKind::InvalidArgument, "mode must be quotient or faithful");
    }
    opt.seed = resolve_seed(c.seed);
    opt.n = c.n;
    opt.max_N = parse_integer(c.max_N, "max-N");
    opt.max_denominator = parse_integer(c.max_denominator, "max-denominator");
    opt.verify = !c.no_verify;
    opt.workers = resolve_workers(c.workers);
    opt.ball_size_cap = c.ball_cap ? c.ball_cap : default_ball_cap(d, r);
    return opt;
}

bool write_graph(const SynthesisResult& res, const std::string& path, std::ostream& out) {
    auto prov = provenance(res.report);
    if (path.empty() || path == "-") {
        write_edge_list(out, res.graph.graph, prov);
        return true;
    }
    std::ofstream file(path);
    if (!file) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
    write_edge_list(file, res.graph.graph, prov);
    return false;
}

bool within(const SynthesisReport& rep) { return !rep.tv || *rep.tv <= rep.epsilon; }

int cmd_synthesize(const Config& c, std::ostream& out, std::ostream& err) {
    auto table = load_table_file(c.table_path);
    if (c.r < 0) throw Error(ErrorKind::InvalidArgument, "-r is required");
    const auto r = static_cast<unsigned>(c.r);
    auto eps = parse_epsilon(c.epsilon.empty() ? "0.05" : c.epsilon);
    auto res = synthesize(table, r, eps, synthesis_options(c, table.degree_bound(), r));
    bool to_stdout = write_graph(res, c.out_path, out);
    (to_stdout ? err : out) << format_report(res.report);
    return within(res.report) ? kOk : kFail;
}

void print_census(const CensusReport& census, const std::optional<Distance>& dist, bool json, std::ostream& out) {
    if (json) {
        nlohmann::json j;
        j["d"] = census.degree_bound;
        j["r"] = census.radius;
        j["vertices"] = census.vertices;
        j["tree_balls"] = census.tree_balls;
        j["tree_ball_fraction"] = to_string(census.tree_ball_fraction());
        auto& balls = j["balls"] = nlohmann::json::array();
        for (const auto& [ball, count] : census.counts) {
            balls.push_back({{"ball", ball.token()}, {"count", count}, {"frequency", to_string(census.frequency(ball))}});
        }
        if (dist) {
            j["tv"] = to_string(dist->tv);
            j["tv_float"] = to_double(dist->tv);
            j["max_deviation"] = to_string(dist->max_deviation);
            j["worst"] = dist->worst.empty() ? "" : dist->worst.token();
        }
        out << j.dump(2) << '\n';
        return;
    }
    out << "d " << census.degree_bound << '\n';
    out << "r " << census.radius << '\n';
    out << "vertices " << census.vertices << '\n';
    out << "tree_ball_fraction " << to_string(census.tree_ball_fraction()) << '\n';
    out << "classes " << census.counts.size() << '\n';
    for (const auto& [ball, count] : census.counts) {
        out << "ball " << ball.token() << ' ' << count << ' ' << to_string(census.frequency(ball)) << '\n';
    }
    if (dist) {
        out << "tv " << to_string(dist->tv) << " (" << to_double(dist->tv) << ")\n";
        out << "max_deviation " << to_string(dist->max_deviation) << '\n';
        if (!dist->worst.empty()) out << "worst " << dist->worst.token() << '\n';
    }
}

struct CensusRun {
    CensusReport census;
    std::optional<Distance> dist;
    EdgeListFile file;
};

CensusRun run_census(const Config& c, const std::string& path, unsigned r) {
    CensusRun run;
    run.file = read_edge_list_file(path);
    std::optional<MarginalTable> table;
    if (!c.table_path.empty()) table = load_table_file(c.table_path);
    unsigned d = c.d;
    if (!d && table) d = table->degree_bound();
    if (!d) {
        if (auto v = run.file.get("d")) d = static_cast<unsigned>(std::stoul(*v));
    }
    if (!d) d = run.file.graph.max_degree();
    CensusOptions opt{c.ball_cap ? c.ball_cap : default_ball_cap(d, r), resolve_workers(c.workers)};
    run.census = ball_census(run.file.graph, d, r, opt);
    if (table) run.dist = tv_distance(run.census, *table);
    return run;
}

unsigned radius_from(const Config& c, const EdgeListFile* file) {
    if (c.r >= 0) return static_cast<unsigned>(c.r);
    if (file) {
        if (auto v = file->get("r")) return static_cast<unsigned>(std::stoul(*v));
    }
    throw Error(ErrorKind::InvalidArgument, "-r is required");
}

int cmd_census(const Config& c, std::ostream& out) {
    for (const auto& path : c.graph_paths) {
        auto probe = read_edge_list_file(path);
        auto run = run_census(c, path, radius_from(c, &probe));
        if (c.graph_paths.size() > 1 && !c.json) out << "graph " << path << '\n';
        print_census(run.census, run.dist, c.json, out);
    }
    return kOk;
}

int cmd_verify(const Config& c, std::ostream& out) {
    if (c.table_path.empty()) throw Error(ErrorKind::InvalidArgument, "--table is required");
    const auto& path = c.graph_paths.at(0);
    auto probe = read_edge_list_file(path);
    auto run = run_census(c, path, radius_from(c, &probe));
    std::string eps_text = c.epsilon;
    if (eps_text.empty()) eps_text = probe.get("epsilon").value_or("0.05");
    auto eps = parse_epsilon(eps_text);
    bool ok = run.dist->tv <= eps;
    out << "status " << (ok ? "pass" : "fail") << '\n';
    out << "r " << run.census.radius << '\n';
    out << "epsilon " << to_string(eps) << '\n';
    out << "vertices " << run.census.vertices << '\n';
    out << "tv " << to_string(run.dist->tv) << " (" << to_double(run.dist->tv) << ")\n";
    out << "tree_ball_fraction " << to_string(run.census.tree_ball_fraction()) << '\n';
    return ok ? kOk : kFail;
}

int cmd_sequence(const Config& c, std::ostream& out) {
    auto table = load_table_file(c.table_path);
    bool ok = true;
    std::optional<unsigned> previous;
    for (unsigned k = 1; k <= c.K; ++k) {
        Rational eps(1, Integer(1) << k);
        auto res = synthesize(table, k, eps, synthesis_options(c, table.degree_bound(), k));
        std::string path = c.prefix + "_" + std::to_string(k) + ".edges";
        write_graph(res, path, out);
        const auto& rep = res.report;
        out << "graph " << path << " r " << k << " epsilon " << to_string(eps) << " vertices " << rep.vertices;
        if (rep.tv) out << " tv " << to_double(*rep.tv);
        if (rep.tree_ball_fraction) out << " tree_ball_fraction " << to_double(*rep.tree_ball_fraction);
        out << " certified_radius " << (rep.certified_radius ? std::to_string(*rep.certified_radius) : "none") << '\n';
        ok = ok && within(rep);
        if (rep.certified_radius && previous && *rep.certified_radius < *previous) ok = false;
        if (rep.certified_radius) previous = rep.certified_radius;
    }
    return ok ? kOk : kFail;
}

MarginalTable endpoint_path() {
    MarginalTable t(2, 2);
    t.level(0)[BallCode::tree(2, 0, tree::leaf())] = 1;
    t.level(1)[BallCode::tree(2, 1, tree::join({tree::leaf()}))] = 1;
    t.level(2)[BallCode::tree(2, 2, tree::join({tree::join({tree::leaf()})}))] = 1;
    return t;
}

int cmd_selftest(const Config& c, std::ostream& out) {
    int failures = 0;
    auto report = [&](const std::string& name, bool ok, const std::string& detail = "") {
        out << (ok ? "ok   " : "FAIL ") << name;
        if (!detail.empty()) out << "  " << detail;
        out << '\n';
        failures += !ok;
    };
    auto guarded = [&](const std::string& name, const std::function<bool(std::string&)>& body) {
        std::string detail;
        try {
            report(name, body(detail), detail);
        } catch (const std::exception& e) {
            report(name, false, e.what());
        }
    };
    Distribution q13{{1, Rational(1, 2)}, {3, Rational(1, 2)}};

    guarded("identities atom(path3) d=2 r=1 n=4", [&](std::string& detail) {
        auto rep = check_identities(marginals_atom(named_tree("path3"), 3, 2), 1, 4);
        detail = std::to_string(rep.vec_classes) + " labeled classes";
        return rep.pass();
    });
    guarded("identities ugw(1:1/2,3:1/2) d=3 r=1 n=5", [&](std::string& detail) {
        auto rep = check_identities(marginals_ugw(q13, 3, 3), 1, 5);
        detail = std::to_string(rep.vec_classes) + " labeled classes";
        return rep.pass();
    });
    guarded("validator accepts regular and ugw", [&](std::string&) {
        bool ok = true;
        for (unsigned d = 1; d <= 3; ++d) ok = ok && check(marginals_regular(d, 3), 2).pass();
        return ok && check(marginals_ugw(q13, 3, 3), 2).pass();
    });
    guarded("validator rejects endpoint path and plain GW", [&](std::string& detail) {
        auto a = check(endpoint_path(), 1);
        auto b = check(marginals_gw(q13, {{0, Rational(1, 2)}, {2, Rational(1, 2)}}, 3, 3), 2);
        auto e3 = [](const ValidationReport& r) {
            for (const auto& v : r.violations) {
                if (v.equation == "e3") return true;
            }
            return false;
        };
        detail = std::to_string(a.violations.size() + b.violations.size()) + " violations";
        return !a.pass() && !b.pass() && e3(a) && e3(b);
    });
    guarded("exact weight systems", [&](std::string& detail) {
        std::vector<MarginalTable> tables{marginals_regular(2, 3), marginals_regular(3, 3), marginals_ugw(q13, 3, 3),
                                          marginals_atom(named_tree("path3"), 3, 2)};
        for (const auto& t : tables) {
            auto built = build_H(t, 1);
            auto ws = rationalize(built.graph, built.exact);
            auto problems = check_weights(built.graph, ws, true);
            if (ws.delta != 0 || !problems.empty()) {
                detail = problems.empty() ? "nonzero delta" : problems.front();
                return false;
            }
            if (choose_N(built.graph, ws) % 2 != 0) return false;
        }
        return true;
    });
    guarded("census is invariant under worker count", [&](std::string&) {
        Graph g(1200);
        for (int v = 0; v < 1200; ++v) g.add_edge(v, (v + 1) % 1200);
        for (int v = 0; v < 600; v += 3) g.add_edge(v, v + 600);
        return ball_census(g, 3, 2, {40, 1}) == ball_census(g, 3, 2, {40, 4});
    });
    guarded("synthesis regular d=2 r=1", [&](std::string& detail) {
        SynthesisOptions opt;
        opt.workers = resolve_workers(c.workers);
        auto res = synthesize(marginals_regular(2, 3), 1, Rational(1, 20), opt);
        detail = "tv " + to_string(*res.report.tv);
        for (const auto& nb : res.graph.graph.adjacency) {
            if (nb.size() != 2) return false;
        }
        return *res.report.tv <= Rational(1, 20);
    });
    guarded("synthesis atom(K2) r=0", [&](std::string&) {
        auto res = synthesize(marginals_atom(named_tree("k2"), 2), 0, Rational(1, 20));
        return *res.report.tv == 0;
    });
    out << (failures ? "selftest failed: " + std::to_string(failures) + " check(s)" : std::string("selftest passed"))
        << '\n';
    return failures ? kFail : kOk;
}

int exit_code(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::ParseError:
        case ErrorKind::InvalidArgument:
            return kUsage;
        case ErrorKind::MaxNExceeded:
            return kMaxN;
        default:
            return kFail;
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Config c;
    CLI::App app{"Build finite graphs whose r-ball statistics match a unimodular measure on rooted trees", "bsynth"};
    app.require_subcommand(1);

    auto add_workers = [&](CLI::App* sub) {
        sub->add_option("--workers", c.workers, "Census threads (0 = all cores; default from BSYNTH_WORKERS, else 0)");
    };
    auto add_ball_cap = [&](CLI::App* sub) {
        sub->add_option("--ball-cap", c.ball_cap, "Largest cyclic ball accepted by the census (default: d-regular tree ball size, at least 12)");
    };

    auto* marg = app.add_subcommand("marginals", "Write the depth-indexed ball marginals of a standard measure");
    marg->add_option("kind", c.kind, "regular | ugw | gw | atom | mixture")
        ->required()
        ->check(CLI::IsMember({"regular", "ugw", "gw", "atom", "mixture"}));
    marg->add_option("--d", c.d, "Degree bound (regular: the degree; others: default max degree)");
    marg->add_option("--depth", c.depth, "Largest ball radius stored")->capture_default_str();
    marg->add_option("--deg", c.degree_law, "ugw degree law, e.g. 1:1/2,3:1/2");
    marg->add_option("--root", c.root_law, "gw root degree law");
    marg->add_option("--offspring", c.offspring_law, "gw offspring law");
    marg->add_option("--tree", c.tree, "atom: named tree (k1, k2, path3, star3, binary7, ...) or edge-list file");
    marg->add_option("--part", c.parts, "mixture: table-path:weight, repeatable");
    marg->add_option("-o,--out", c.out_path, "Output path (default stdout)");

    auto* val = app.add_subcommand("validate", "Check the involution equations on a table");
    val->add_option("table", c.table_path, "Table file")->required();
    val->add_option("--r-max", c.r_max, "Largest radius checked (default depth - 1)");

    auto* syn = app.add_subcommand("synthesize", "Build a graph realizing a table at radius r");
    syn->add_option("--table", c.table_path, "Table file (depth at least r + 2)")->required();
    syn->add_option("-r", c.r, "Radius")->required();
    syn->add_option("--epsilon", c.epsilon, "Total-variation tolerance in (0,1) (default 0.05)");
    syn->add_option("--seed", c.seed, "64-bit seed or 'random'")->capture_default_str();
    syn->add_option("--mode", c.mode, "quotient | faithful")->capture_default_str();
    syn->add_option("--n", c.n, "Faithful mode label count (default from epsilon)");
    syn->add_option("--max-N", c.max_N, "Upper bound on N")->capture_default_str();
    syn->add_option("--max-denominator", c.max_denominator, "Rounding denominator bound (0 = automatic)")->capture_default_str();
    syn->add_flag("--no-verify", c.no_verify, "Skip the census check and N doubling");
    syn->add_option("-o,--out", c.out_path, "Graph file (default stdout; report then goes to stderr)");
    add_workers(syn);
    add_ball_cap(syn);

    auto* cen = app.add_subcommand("census", "Count r-balls of edge-list graphs");
    cen->add_option("graphs", c.graph_paths, "Edge-list files")->required();
    cen->add_option("-r", c.r, "Radius (default from the file provenance)");
    cen->add_option("--table", c.table_path, "Also report the distance to this table");
    cen->add_option("--d", c.d, "Degree bound (default table, provenance, then max degree)");
    cen->add_flag("--json", c.json, "Machine-readable output");
    add_workers(cen);
    add_ball_cap(cen);

    auto* ver = app.add_subcommand("verify", "Exit 0 iff the graph's r-ball census is within epsilon of the table");
    ver->add_option("graph", c.graph_paths, "Edge-list file")->required()->expected(1);
    ver->add_option("--table", c.table_path, "Table file")->required();
    ver->add_option("-r", c.r, "Radius (default from provenance)");
    ver->add_option("--epsilon", c.epsilon, "Tolerance (default from provenance, else 0.05)");
    ver->add_option("--d", c.d, "Degree bound (default from the table)");
    add_workers(ver);
    add_ball_cap(ver);

    auto* seq = app.add_subcommand("sequence", "Write G_k with r = k and epsilon = 2^-k for k = 1..K");
    seq->add_option("--table", c.table_path, "Table file (depth at least K + 2)")->required();
    seq->add_option("-K", c.K, "Number of graphs")->capture_default_str();
    seq->add_option("--prefix", c.prefix, "Output prefix; files are PREFIX_k.edges")->capture_default_str();
    seq->add_option("--seed", c.seed, "64-bit seed or 'random'")->capture_default_str();
    seq->add_option("--max-N", c.max_N, "Upper bound on N")->capture_default_str();
    add_workers(seq);

    auto* self = app.add_subcommand("selftest", "Run the built-in identity and invariant checks");
    add_workers(self);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        if (e.get_exit_code() == 0) return kOk;
        err << "run with --help for usage\n";
        return kUsage;
    }

    try {
        if (*marg) return cmd_marginals(c, out);
        if (*val) return cmd_validate(c, out);
        if (*syn) return cmd_synthesize(c, out, err);
        if (*cen) return cmd_census(c, out);
        if (*ver) return cmd_verify(c, out);
        if (*seq) return cmd_sequence(c, out);
        if (*self) return cmd_selftest(c, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFail;
    }
    return kUsage;
}

}  // namespace bsynth
