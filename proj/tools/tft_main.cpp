#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "tft/correlators.hpp"
#include "tft/diffapprox.hpp"
#include "tft/error.hpp"
#include "tft/io.hpp"
#include "tft/semicont.hpp"
#include "tft/tensorlab.hpp"
#include "tft/thompson.hpp"
#include "tft/trivalent.hpp"

using namespace tft;

namespace {

struct GlobalOpts {
    double tol = 1e-9;
    std::string preset = "qutrit";
    std::string out;
};

void emit(const GlobalOpts& g, const Json& j) {
    const std::string text = dump_stable(j);
    if (g.out.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        std::ofstream f(g.out);
        if (!f) throw ResourceError("cannot write file: " + g.out);
        f << text;
    }
}

// Elements come in three spellings: "gen:A", "num,den[,rot]" with trees in
// the text grammar, or "@file" pointing at an element document.
GroupElement parse_element(const std::string& spec) {
    if (spec.rfind("gen:", 0) == 0) {
        if (spec.size() != 5) throw ParseError("generator spec must be gen:A, gen:B or gen:C");
        return generator(spec[4]);
    }
    if (!spec.empty() && spec[0] == '@') return element_from_json(load_json_file(spec.substr(1)));
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= spec.size(); ++i)
        if (i == spec.size() || spec[i] == ',') {
            parts.push_back(spec.substr(start, i - start));
            start = i + 1;
        }
    if (parts.size() != 2 && parts.size() != 3)
        throw ParseError("element spec must be gen:X, num,den[,rot] or @file");
    const int rot = parts.size() == 3 ? std::stoi(parts[2]) : 0;
    return reduce(BinaryTree::parse(parts[0]), BinaryTree::parse(parts[1]), rot);
}

Complex parse_complex(const std::string& spec) {
    const std::size_t comma = spec.find(',');
    if (comma == std::string::npos) return Complex{std::stod(spec), 0.0};
    return Complex{std::stod(spec.substr(0, comma)), std::stod(spec.substr(comma + 1))};
}

// Sample points: a binary expansion like "0.01101", or a fraction "13/32".
DyadicPoint parse_point(const std::string& spec) {
    if (spec.find('/') != std::string::npos) {
        const Rational r = parse_rational(spec);
        if (!r.is_dyadic()) throw DyadicError("point " + spec + " is not dyadic");
        return DyadicPoint::from_dyadic(r.to_dyadic());
    }
    return DyadicPoint::parse(spec);
}

AscendingSystem preset_system(const std::string& preset) {
    if (preset == "qutrit") return qutrit_system();
    if (preset == "fibonacci") return fib_ascending(TrivalentParams::fibonacci()).system;
    throw ParameterError("unknown preset: " + preset);
}

Isometry3 preset_tensor(const std::string& preset) {
    if (preset == "qutrit") return qutrit_tensor();
    throw ParameterError("preset '" + preset + "' has no site tensor");
}

Json forest_json(const Forest& w) {
    return Json{{"forest", w.str()}, {"dom", w.dom()}, {"cod", w.cod()}};
}

Json matrix_json(const CMat& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

struct MapSpec {
    std::function<double(double)> f;
    std::function<double(double)> fprime; // empty when unknown (table maps)
    ApproxMode mode = ApproxMode::interval;
};

// Built-in test maps plus piecewise-linear tables from CSV ("x,y" per line).
MapSpec parse_map(const std::string& spec, const std::string& mode_flag) {
    MapSpec m;
    if (spec == "quadratic") {
        m.f = [](double x) { return 0.5 * (x + x * x); };
        m.fprime = [](double x) { return 0.5 + x; };
        m.mode = ApproxMode::interval;
    } else if (spec.rfind("rotation:", 0) == 0) {
        const double r = parse_rational(spec.substr(9)).to_double();
        m.f = [r](double x) { return x + r; };
        m.fprime = [](double) { return 1.0; };
        m.mode = ApproxMode::circle;
    } else if (!spec.empty() && spec[0] == '@') {
        std::ifstream in(spec.substr(1));
        if (!in) throw ParseError("cannot read file: " + spec.substr(1));
        auto xs = std::make_shared<std::vector<double>>();
        auto ys = std::make_shared<std::vector<double>>();
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            const std::size_t comma = line.find(',');
            if (comma == std::string::npos)
                throw ParseError("table line must be 'x,y': " + line);
            xs->push_back(std::stod(line.substr(0, comma)));
            ys->push_back(std::stod(line.substr(comma + 1)));
        }
        if (xs->size() < 2) throw ParseError("table map needs at least two rows");
        for (std::size_t i = 1; i < xs->size(); ++i)
            if ((*xs)[i] <= (*xs)[i - 1])
                throw ParseError("table x column must be strictly increasing");
        m.f = [xs, ys](double x) {
            std::size_t i = 1;
            while (i + 1 < xs->size() && x > (*xs)[i]) ++i;
            const double t = (x - (*xs)[i - 1]) / ((*xs)[i] - (*xs)[i - 1]);
            return (*ys)[i - 1] + t * ((*ys)[i] - (*ys)[i - 1]);
        };
        m.mode = ApproxMode::interval;
    } else {
        throw ParseError("unknown map spec: " + spec +
                         " (expected quadratic, rotation:R or @table.csv)");
    }
    if (mode_flag == "interval") m.mode = ApproxMode::interval;
    if (mode_flag == "circle") m.mode = ApproxMode::circle;
    return m;
}

double sup_distance(const MapSpec& m, const GroupElement& g) {
    const PLMap pl = element_to_pl(g);
    double worst = 0.0;
    const int n = 4096;
    for (int i = 0; i <= n; ++i) {
        const double x = static_cast<double>(i) / n;
        double diff = m.f(x) - pl.eval(x);
        if (m.mode == ApproxMode::circle) diff -= std::round(diff);
        worst = std::max(worst, std::abs(diff));
    }
    return worst;
}

int field_index(const AscendingSystem& sys, const std::string& name) {
    return sys.index(name);
}

long leaf_of(const Dyadic& x, int m) {
    if (x < Dyadic::integer(0) || !(x < Dyadic::integer(1)))
        throw IntervalError("sample point must lie in [0, 1)");
    if (x.k <= m) return x.m << (m - x.k);
    return x.m >> (x.k - m);
}

TrivalentParams parse_params(const std::string& d, const std::string& b, const std::string& t,
                             int dim) {
    TrivalentParams p;
    p.d = parse_complex(d);
    p.b = parse_complex(b);
    p.t = parse_complex(t);
    p.dim_c4 = dim;
    return p;
}

Json ascending_json(const AscendingSystem& sys) {
    Json fields = Json::array();
    for (std::size_t i = 0; i < sys.fields(); ++i)
        fields.push_back(Json{{"name", sys.names[i]},
                              {"lambda", complex_json(sys.lambda[i])},
                              {"h", sys.h[i]},
                              {"vac", complex_json(sys.vac[i])}});
    return Json{{"fields", std::move(fields)}};
}

} // namespace

int main(int argc, char** argv) {
    GlobalOpts g;
    std::function<Json()> action;

    CLI::App app{"exact tree algebra, coarse-graining spectra and diagram reduction"};
    app.require_subcommand(1);
    app.add_option("--tol", g.tol, "numeric tolerance for checks")->capture_default_str();
    app.add_option("--preset", g.preset, "field system preset")
        ->check(CLI::IsMember({"qutrit", "fibonacci"}))
        ->capture_default_str();
    app.add_option("--out", g.out, "write the JSON result to a file instead of stdout");

    // ---- forest ----------------------------------------------------------
    auto* forest = app.add_subcommand("forest", "forest composition and refinement");
    forest->require_subcommand(1);
    forest->fallthrough();
    {
        static std::string a, b;
        auto* c = forest->add_subcommand("compose", "graft the trees of B onto the leaves of A");
        c->fallthrough();
        c->add_option("A", a, "left forest")->required();
        c->add_option("B", b, "right forest")->required();
        c->callback([&] {
            action = [&] { return forest_json(compose(Forest::parse(a), Forest::parse(b))); };
        });
    }
    {
        static std::string a, b;
        auto* c = forest->add_subcommand("tensor", "juxtapose two forests");
        c->fallthrough();
        c->add_option("A", a, "left forest")->required();
        c->add_option("B", b, "right forest")->required();
        c->callback([&] {
            action = [&] { return forest_json(tensor(Forest::parse(a), Forest::parse(b))); };
        });
    }
    {
        static std::string s, t;
        auto* c = forest->add_subcommand("join", "smallest common refinement of two trees");
        c->fallthrough();
        c->add_option("S", s, "first tree")->required();
        c->add_option("T", t, "second tree")->required();
        c->callback([&] {
            action = [&] {
                const Join j = join(BinaryTree::parse(s), BinaryTree::parse(t));
                return Json{{"tree", j.tree.str()},
                            {"tau", j.tau.str()},
                            {"sigma", j.sigma.str()}};
            };
        });
    }

    // ---- thompson --------------------------------------------------------
    auto* thompson = app.add_subcommand("thompson", "group elements and their interval maps");
    thompson->require_subcommand(1);
    thompson->fallthrough();
    {
        static std::string a, b;
        auto* c = thompson->add_subcommand("mul", "product: first A, then B");
        c->fallthrough();
        c->add_option("A", a, "left element")->required();
        c->add_option("B", b, "right element")->required();
        c->callback([&] {
            action = [&] { return element_json(multiply(parse_element(a), parse_element(b))); };
        });
    }
    {
        static std::string a;
        auto* c = thompson->add_subcommand("inv", "inverse element");
        c->fallthrough();
        c->add_option("A", a, "element")->required();
        c->callback([&] { action = [&] { return element_json(inverse(parse_element(a))); }; });
    }
    {
        static std::string num, den;
        static int rot = 0;
        auto* c = thompson->add_subcommand("reduce", "cancel opposing carets in a tree pair");
        c->fallthrough();
        c->add_option("num", num, "numerator tree")->required();
        c->add_option("den", den, "denominator tree")->required();
        c->add_option("rot", rot, "leaf rotation");
        c->callback([&] {
            action = [&] {
                return element_json(reduce(BinaryTree::parse(num), BinaryTree::parse(den), rot));
            };
        });
    }
    {
        static std::string a;
        auto* c = thompson->add_subcommand("topl", "piecewise-linear map of an element");
        c->fallthrough();
        c->add_option("A", a, "element")->required();
        c->callback([&] { action = [&] { return pl_json(element_to_pl(parse_element(a))); }; });
    }
    {
        static std::string path;
        auto* c = thompson->add_subcommand("frompl", "element of a piecewise-linear map file");
        c->fallthrough();
        c->add_option("file", path, "PL map document")->required();
        c->callback([&] {
            action = [&] { return element_json(pl_to_element(pl_from_json(load_json_file(path)))); };
        });
    }
    {
        static std::string name;
        auto* c = thompson->add_subcommand("gen", "a standard generator");
        c->fallthrough();
        c->add_option("name", name, "A, B or C")->required();
        c->callback([&] {
            action = [&] {
                if (name.size() != 1) throw ParseError("generator name must be A, B or C");
                return element_json(generator(name[0]));
            };
        });
    }

    // ---- approx ----------------------------------------------------------
    auto* approx = app.add_subcommand("approx", "group-element approximation of smooth maps");
    approx->require_subcommand(1);
    approx->fallthrough();
    static std::string map_spec, mode_flag;
    {
        static double eps = 0.01, slope = 0.0;
        auto* c = approx->add_subcommand("run", "approximate a map to sup-distance eps");
        c->fallthrough();
        c->add_option("--map", map_spec, "quadratic, rotation:R or @table.csv")->required();
        c->add_option("--eps", eps, "target sup distance")->capture_default_str();
        c->add_option("--slope", slope, "derivative bound (0 = estimate)");
        c->add_option("--mode", mode_flag, "interval or circle")
            ->check(CLI::IsMember({"interval", "circle"}));
        c->callback([&] {
            action = [&] {
                const MapSpec m = parse_map(map_spec, mode_flag);
                const GroupElement e = approximate(m.f, slope, eps, m.mode);
                Json j = element_json(e);
                j["leaves"] = e.leaves();
                j["eps"] = eps;
                j["sup_error"] = sup_distance(m, e);
                return j;
            };
        });
    }
    {
        static std::string elem;
        auto* c = approx->add_subcommand("dist", "sup distance between map and element slopes");
        c->fallthrough();
        c->add_option("--map", map_spec, "quadratic or rotation:R")->required();
        c->add_option("element", elem, "element to compare")->required();
        c->callback([&] {
            action = [&] {
                const MapSpec m = parse_map(map_spec, mode_flag);
                if (!m.fprime)
                    throw ParameterError("derivative distance needs a built-in map");
                return Json{
                    {"derivative_distance", derivative_distance(m.fprime, parse_element(elem))}};
            };
        });
    }

    // ---- tensor ----------------------------------------------------------
    auto* tensor_cmd = app.add_subcommand("tensor", "site tensor checks and spectral data");
    tensor_cmd->require_subcommand(1);
    tensor_cmd->fallthrough();
    {
        auto* c = tensor_cmd->add_subcommand("verify", "structural checks on the preset tensor");
        c->fallthrough();
        c->callback([&] {
            action = [&] {
                const TensorReport r = verify_tensor(preset_tensor(g.preset), g.tol);
                return Json{{"isometry", r.isometry},
                            {"swap_invariant", r.swap_invariant},
                            {"planar_perfect", r.planar_perfect},
                            {"rotation_invariant", r.rotation_invariant},
                            {"all", r.all()}};
            };
        });
    }
    {
        auto* c = tensor_cmd->add_subcommand("eigen", "ascending-channel eigenvalues and weights");
        c->fallthrough();
        c->callback([&] { action = [&] { return ascending_json(preset_system(g.preset)); }; });
    }
    {
        auto* c = tensor_cmd->add_subcommand("fusion", "nonzero fusion coefficients");
        c->fallthrough();
        c->callback([&] {
            action = [&] {
                const AscendingSystem sys = preset_system(g.preset);
                if (sys.fusion.empty()) throw ShapeError("system is missing fusion data");
                Json rows = Json::array();
                const std::size_t n = sys.fields();
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t b = 0; b < n; ++b)
                        for (std::size_t c2 = 0; c2 < n; ++c2)
                            if (std::abs(sys.fusion[a][b][c2]) > g.tol)
                                rows.push_back(Json{{"a", sys.names[a]},
                                                    {"b", sys.names[b]},
                                                    {"g", sys.names[c2]},
                                                    {"coeff", complex_json(sys.fusion[a][b][c2])}});
                return Json{{"rows", std::move(rows)}};
            };
        });
    }
    {
        static std::string file;
        auto* c = tensor_cmd->add_subcommand("blob", "closed-loop eigenvector check");
        c->fallthrough();
        c->add_option("--file", file, "state document with an 'amps' vector");
        c->callback([&] {
            action = [&] {
                const Isometry3 V = preset_tensor(g.preset);
                if (!file.empty()) {
                    const Json doc = load_json_file(file);
                    CVec w;
                    for (const Json& a : doc.at("amps")) w.push_back(complex_from_json(a));
                    return Json{{"blob", verify_blob(V, w, g.tol)}};
                }
                Json all = Json::array();
                for (const CVec& w : qutrit_blobs()) all.push_back(verify_blob(V, w, g.tol));
                return Json{{"blobs", std::move(all)}};
            };
        });
    }

    // ---- state -----------------------------------------------------------
    auto* state = app.add_subcommand("state", "vectors of the limit Hilbert space");
    state->require_subcommand(1);
    state->fallthrough();
    {
        auto* c = state->add_subcommand("vacuum", "the invariant vacuum state");
        c->fallthrough();
        c->callback([&] { action = [&] { return state_json(vacuum(preset_tensor(g.preset))); }; });
    }
    {
        static std::string elem, file;
        auto* c = state->add_subcommand("act", "apply a group element to a state");
        c->fallthrough();
        c->add_option("element", elem, "element to apply")->required();
        c->add_option("--state", file, "state document (default: vacuum)");
        c->callback([&] {
            action = [&] {
                const Isometry3 V = preset_tensor(g.preset);
                const LimitState s =
                    file.empty() ? vacuum(V) : state_from_json(load_json_file(file));
                return state_json(act(parse_element(elem), s, V));
            };
        });
    }
    {
        static std::string fs, fr;
        auto* c = state->add_subcommand("inner", "inner product of two states");
        c->fallthrough();
        c->add_option("S", fs, "first state document")->required();
        c->add_option("R", fr, "second state document")->required();
        c->callback([&] {
            action = [&] {
                const Isometry3 V = preset_tensor(g.preset);
                const Complex v = inner(state_from_json(load_json_file(fs)),
                                        state_from_json(load_json_file(fr)), V);
                return Json{{"value", complex_json(v)}};
            };
        });
    }

    // ---- corr ------------------------------------------------------------
    auto* corr = app.add_subcommand("corr", "correlation functions and operator products");
    corr->require_subcommand(1);
    corr->fallthrough();
    {
        static std::string x, y;
        static int level = -1;
        auto* c = corr->add_subcommand("metric", "coarse-graining distance of two points");
        c->fallthrough();
        c->add_option("X", x, "first point")->required();
        c->add_option("Y", y, "second point")->required();
        c->add_option("--level", level, "digit level (default: finer of the two)");
        c->callback([&] {
            action = [&] {
                const DyadicPoint px = parse_point(x), py = parse_point(y);
                const int l = level > 0 ? level : std::max(px.level(), py.level());
                const TreeMetric m = xor_and_tree_metric(px, py, l);
                return Json{{"xor", dyadic_json(m.diff)},
                            {"distance", m.dt_recursive},
                            {"distance_closed", m.dt_closed}};
            };
        });
    }
    {
        static std::vector<std::string> pts;
        auto* c = corr->add_subcommand("support", "coarsest separating dyadic partition");
        c->fallthrough();
        c->add_option("points", pts, "sample points")->required()->expected(-1);
        c->callback([&] {
            action = [&] {
                std::vector<Rational> rs;
                for (const std::string& s : pts) rs.push_back(parse_rational(s));
                const DyadicPartition part = minimal_supporting_partition(rs);
                Json points = Json::array();
                for (const Dyadic& p : part.points) points.push_back(dyadic_json(p));
                return Json{{"points", std::move(points)}, {"intervals", part.intervals()}};
            };
        });
    }
    {
        static std::vector<std::string> at, fields;
        static std::string elem, refine;
        auto* c = corr->add_subcommand("npoint", "n-point function of discretized fields");
        c->fallthrough();
        c->add_option("--at", at, "sample point (repeat per insertion)")->required();
        c->add_option("--field", fields, "field label or index (repeat per insertion)")
            ->required();
        c->add_option("--element", elem, "transport the vacuum by this element first");
        c->add_option("--refine", refine, "extra context tree joined into the evaluation");
        c->callback([&] {
            action = [&] {
                const AscendingSystem sys = preset_system(g.preset);
                if (at.size() != fields.size())
                    throw ShapeError("--at and --field must be given equally often");
                std::vector<Rational> ps;
                std::vector<int> als;
                for (std::size_t i = 0; i < at.size(); ++i) {
                    ps.push_back(parse_rational(at[i]));
                    als.push_back(field_index(sys, fields[i]));
                }
                std::optional<GroupElement> e;
                if (!elem.empty()) e = parse_element(elem);
                std::optional<BinaryTree> r;
                if (!refine.empty()) r = BinaryTree::parse(refine);
                return Json{{"value", complex_json(npoint(ps, als, sys, e, r))}};
            };
        });
    }
    {
        static std::string x, y, fa, fb;
        static int m = 0;
        auto* c = corr->add_subcommand("twopoint", "two-point function, all routes");
        c->fallthrough();
        c->add_option("X", x, "first point (dyadic)")->required();
        c->add_option("Y", y, "second point (dyadic)")->required();
        c->add_option("A", fa, "first field")->required();
        c->add_option("B", fb, "second field")->required();
        c->add_option("--m", m, "also contract the level-m tree directly");
        c->callback([&] {
            action = [&] {
                const AscendingSystem sys = preset_system(g.preset);
                const Dyadic dx = parse_point(x).value(), dy = parse_point(y).value();
                const int a = field_index(sys, fa), b = field_index(sys, fb);
                Json j{{"closed_form",
                        complex_json(two_point_closed_form(dx, dy, a, b, sys))},
                       {"npoint", complex_json(npoint({Rational(dx), Rational(dy)}, {a, b},
                                                      sys))}};
                if (m > 0) {
                    if (!sys.has_matrix())
                        throw ParameterError("oracle needs a matrix-realised preset");
                    const Isometry3 W = Isometry3::from_entries(sys.d, sys.V);
                    Complex scale{1.0, 0.0};
                    for (int i = 0; i < m; ++i) scale /= sys.lambda[static_cast<std::size_t>(a)];
                    for (int i = 0; i < m; ++i) scale /= sys.lambda[static_cast<std::size_t>(b)];
                    const Complex brute = brute_force_npoint(
                        W, m,
                        {{static_cast<int>(leaf_of(dx, m)), sys.mu[static_cast<std::size_t>(a)]},
                         {static_cast<int>(leaf_of(dy, m)), sys.mu[static_cast<std::size_t>(b)]}});
                    j["oracle"] = complex_json(scale * brute);
                }
                return j;
            };
        });
    }
    {
        auto* c = corr->add_subcommand("ope", "operator-product data of the preset");
        c->fallthrough();
        c->callback([&] {
            action = [&] {
                const AscendingSystem sys = preset_system(g.preset);
                const OpeTable t = ope_table(sys, g.tol);
                Json rows = Json::array();
                for (const OpeRow& r : t.rows)
                    rows.push_back(Json{{"alpha", sys.names[static_cast<std::size_t>(r.alpha)]},
                                        {"beta", sys.names[static_cast<std::size_t>(r.beta)]},
                                        {"gamma", sys.names[static_cast<std::size_t>(r.gamma)]},
                                        {"coeff", complex_json(r.coeff)},
                                        {"exponent", r.exponent}});
                Json mats = Json::array();
                for (std::size_t a = 0; a < t.fusion_matrices.size(); ++a) {
                    Json mat = Json::array();
                    for (Eigen::Index i = 0; i < t.fusion_matrices[a].rows(); ++i) {
                        Json row = Json::array();
                        for (Eigen::Index k = 0; k < t.fusion_matrices[a].cols(); ++k)
                            row.push_back(t.fusion_matrices[a](i, k));
                        mat.push_back(std::move(row));
                    }
                    mats.push_back(Json{{"field", sys.names[a]}, {"matrix", std::move(mat)}});
                }
                return Json{{"rows", std::move(rows)}, {"fusion_matrices", std::move(mats)}};
            };
        });
    }
    {
        static std::vector<std::string> at, fields;
        static int m = 3;
        auto* c = corr->add_subcommand("oracle", "direct contraction of the level-m tree");
        c->fallthrough();
        c->add_option("--m", m, "tree level")->capture_default_str();
        c->add_option("--at", at, "sample point (repeat per insertion)")->required();
        c->add_option("--field", fields, "field label or index (repeat per insertion)")
            ->required();
        c->callback([&] {
            action = [&] {
                const AscendingSystem sys = preset_system(g.preset);
                if (!sys.has_matrix())
                    throw ParameterError("oracle needs a matrix-realised preset");
                if (at.size() != fields.size())
                    throw ShapeError("--at and --field must be given equally often");
                const Isometry3 W = Isometry3::from_entries(sys.d, sys.V);
                std::vector<std::pair<int, CMat>> ops;
                Complex scale{1.0, 0.0};
                for (std::size_t i = 0; i < at.size(); ++i) {
                    const Rational r = parse_rational(at[i]);
                    if (!r.is_dyadic()) throw DyadicError("oracle points must be dyadic");
                    const int a = field_index(sys, fields[i]);
                    ops.emplace_back(static_cast<int>(leaf_of(r.to_dyadic(), m)),
                                     sys.mu[static_cast<std::size_t>(a)]);
                    for (int k = 0; k < m; ++k) scale /= sys.lambda[static_cast<std::size_t>(a)];
                }
                return Json{{"value", complex_json(scale * brute_force_npoint(W, m, ops))}};
            };
        });
    }
    {
        static std::vector<std::string> at, fields;
        static std::string elem;
        auto* c = corr->add_subcommand("covariance", "transformation-law residual");
        c->fallthrough();
        c->add_option("element", elem, "transforming element")->required();
        c->add_option("--at", at, "sample point (repeat per insertion)")->required();
        c->add_option("--field", fields, "field label or index (repeat per insertion)")
            ->required();
        c->callback([&] {
            action = [&] {
                const AscendingSystem sys = preset_system(g.preset);
                if (at.size() != fields.size())
                    throw ShapeError("--at and --field must be given equally often");
                std::vector<Rational> ps;
                std::vector<int> als;
                for (std::size_t i = 0; i < at.size(); ++i) {
                    ps.push_back(parse_rational(at[i]));
                    als.push_back(field_index(sys, fields[i]));
                }
                return Json{
                    {"residual", covariance_residual(parse_element(elem), ps, als, sys)}};
            };
        });
    }

    // ---- trivalent -------------------------------------------------------
    auto* tri = app.add_subcommand("trivalent", "skein reduction of trivalent diagrams");
    tri->require_subcommand(1);
    tri->fallthrough();
    static std::string pd = "3", pb = "2", pt = "0.1";
    static int pdim = 4;
    tri->add_option("--d", pd, "loop value (re or re,im)")->capture_default_str();
    tri->add_option("--b", pb, "bigon value")->capture_default_str();
    tri->add_option("--t", pt, "triangle value")->capture_default_str();
    tri->add_option("--dim", pdim, "dimension of the four-point space")->capture_default_str();
    {
        static std::string file;
        static int seed = 0;
        auto* c = tri->add_subcommand("reduce", "reduce a diagram document to normal form");
        c->fallthrough();
        c->add_option("file", file, "diagram or diagram-sum document")->required();
        c->add_option("--seed", seed, "randomize the elimination order");
        c->callback([&] {
            action = [&] {
                const TrivalentParams p = parse_params(pd, pb, pt, pdim);
                const Json doc = load_json_file(file);
                DiagramSum in = doc.contains("terms") ? diagram_sum_from_json(doc)
                                                      : DiagramSum(diagram_from_json(doc));
                std::optional<unsigned> s;
                if (seed > 0) s = static_cast<unsigned>(seed);
                const DiagramSum out = reduce(in, p, s);
                Json j = diagram_sum_json(out);
                if (is_scalar(out)) j["scalar"] = complex_json(scalar_value(out));
                return j;
            };
        });
    }
    {
        static std::string basis = "four";
        auto* c = tri->add_subcommand("gram", "pairing matrix of the four-point diagrams");
        c->fallthrough();
        c->add_option("--basis", basis, "pair, four or five")
            ->check(CLI::IsMember({"pair", "four", "five"}))
            ->capture_default_str();
        c->callback([&] {
            action = [&] {
                const TrivalentParams p = parse_params(pd, pb, pt, pdim);
                std::vector<Diagram> diagrams{beta4(1), beta4(2)};
                if (basis != "pair") {
                    diagrams.push_back(beta4(3));
                    diagrams.push_back(beta4(4));
                }
                if (basis == "five") diagrams.push_back(square4());
                return Json{{"matrix", matrix_json(gram_matrix(diagrams, p))}};
            };
        });
    }
    {
        auto* c = tri->add_subcommand("square", "square-face rewrite coefficients");
        c->fallthrough();
        c->callback([&] {
            action = [&] {
                const TrivalentParams p = parse_params(pd, pb, pt, pdim);
                const SquareWindow sw = square_window(p);
                Json coeffs = Json::array();
                for (const Complex& c2 : sw.coefficients) coeffs.push_back(complex_json(c2));
                return Json{{"dimension", p.dim_c4},
                            {"coefficients", std::move(coeffs)},
                            {"window", complex_json(sw.window)}};
            };
        });
    }
    {
        auto* c = tri->add_subcommand("fib", "golden coarse-graining data");
        c->fallthrough();
        c->callback([&] {
            action = [&] {
                const FibonacciData data = fib_ascending(TrivalentParams::fibonacci());
                Json j = ascending_json(data.system);
                j["ascend"] = matrix_json(data.ascend);
                j["gram"] = matrix_json(data.gram);
                j["mu_tau"] = Json::array(
                    {complex_json(data.mu_tau(0)), complex_json(data.mu_tau(1))});
                Json rows = Json::array();
                for (std::size_t a = 0; a < 2; ++a)
                    for (std::size_t b = 0; b < 2; ++b)
                        for (std::size_t c2 = 0; c2 < 2; ++c2)
                            if (std::abs(data.system.fusion[a][b][c2]) > g.tol)
                                rows.push_back(
                                    Json{{"a", data.system.names[a]},
                                         {"b", data.system.names[b]},
                                         {"g", data.system.names[c2]},
                                         {"coeff", complex_json(data.system.fusion[a][b][c2])}});
                j["fusion"] = std::move(rows);
                return j;
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (action) emit(g, action());
    } catch (const Error& e) {
        const Json err{{"error", Json{{"kind", e.kind()}, {"message", e.what()}}}};
        std::fputs(dump_stable(err).c_str(), stderr);
        return 1;
    } catch (const std::exception& e) {
        const Json err{{"error", Json{{"kind", "InternalError"}, {"message", e.what()}}}};
        std::fputs(dump_stable(err).c_str(), stderr);
        return 1;
    }
    return 0;
}
