#include "tft/io.hpp"

#include <fstream>
#include <utility>
#include <vector>

#include "tft/error.hpp"

namespace tft {

namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key))
        throw ParseError(std::string("missing field '") + key + "'");
    return j.at(key);
}

std::int64_t int_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_number_integer()) throw ParseError(std::string("field '") + key + "' must be an integer");
    return v.get<std::int64_t>();
}

std::string string_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_string()) throw ParseError(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

} // namespace

Json complex_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
    if (j.is_number()) return Complex{j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError("complex number must be [re, im]");
    return Complex{j[0].get<double>(), j[1].get<double>()};
}

Json dyadic_json(const Dyadic& x) { return Json{{"m", x.m}, {"k", x.k}}; }

Dyadic dyadic_from_json(const Json& j) {
    return Dyadic(int_field(j, "m"), static_cast<int>(int_field(j, "k")));
}

Json element_json(const GroupElement& a) {
    return Json{{"num", a.num.str()}, {"den", a.den.str()}, {"rot", a.rot}};
}

GroupElement element_from_json(const Json& j) {
    const BinaryTree num = BinaryTree::parse(string_field(j, "num"));
    const BinaryTree den = BinaryTree::parse(string_field(j, "den"));
    int rot = 0;
    if (j.contains("rot")) rot = static_cast<int>(int_field(j, "rot"));
    return reduce(num, den, rot);
}

Json pl_json(const PLMap& f) {
    Json pts = Json::array();
    for (const auto& [x, y] : f.points) pts.push_back(Json::array({dyadic_json(x), dyadic_json(y)}));
    return Json{{"circle", f.circle}, {"points", std::move(pts)}};
}

PLMap pl_from_json(const Json& j) {
    PLMap f;
    const Json& c = field(j, "circle");
    if (!c.is_boolean()) throw ParseError("field 'circle' must be a boolean");
    f.circle = c.get<bool>();
    const Json& pts = field(j, "points");
    if (!pts.is_array()) throw ParseError("field 'points' must be an array");
    for (const Json& p : pts) {
        if (!p.is_array() || p.size() != 2) throw ParseError("each breakpoint must be [x, y]");
        f.points.emplace_back(dyadic_from_json(p[0]), dyadic_from_json(p[1]));
    }
    f.validate();
    return f;
}

Json state_json(const LimitState& s) {
    Json amps = Json::array();
    for (const Complex& a : s.amps) amps.push_back(complex_json(a));
    return Json{{"tree", s.tree.str()}, {"rot", s.rot}, {"amps", std::move(amps)}};
}

LimitState state_from_json(const Json& j) {
    LimitState s;
    s.tree = BinaryTree::parse(string_field(j, "tree"));
    if (j.contains("rot")) s.rot = static_cast<int>(int_field(j, "rot"));
    const Json& amps = field(j, "amps");
    if (!amps.is_array()) throw ParseError("field 'amps' must be an array");
    for (const Json& a : amps) s.amps.push_back(complex_from_json(a));
    return s;
}

Json diagram_json(const Diagram& d) {
    Json edges = Json::array();
    for (int h = 0; h < d.ends(); ++h) {
        const int g = d.theta(h);
        if (h >= g) continue;
        auto code = [&d](int e) {
            return d.is_mark_end(e)
                       ? Diagram::mark(e)
                       : Diagram::port(d.end_vertex(e), d.end_slot(e));
        };
        edges.push_back(Json::array({code(h), code(g)}));
    }
    return Json{{"boundary", d.boundary()},
                {"vertices", d.vertex_count()},
                {"circles", d.circles()},
                {"edges", std::move(edges)}};
}

Diagram diagram_from_json(const Json& j) {
    const int boundary = static_cast<int>(int_field(j, "boundary"));
    const int vertices = static_cast<int>(int_field(j, "vertices"));
    long circles = 0;
    if (j.contains("circles")) circles = int_field(j, "circles");
    const Json& edges = field(j, "edges");
    if (!edges.is_array()) throw ParseError("field 'edges' must be an array");
    std::vector<std::pair<int, int>> list;
    for (const Json& e : edges) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
            !e[1].is_number_integer())
            throw ParseError("each edge must be a pair of strand-end codes");
        list.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return Diagram::make(boundary, vertices, list, circles);
}

Json diagram_sum_json(const DiagramSum& s) {
    Json terms = Json::array();
    for (const auto& [c, d] : s.terms)
        terms.push_back(Json{{"coeff", complex_json(c)}, {"diagram", diagram_json(d)}});
    return Json{{"terms", std::move(terms)}};
}

DiagramSum diagram_sum_from_json(const Json& j) {
    DiagramSum s;
    const Json& terms = field(j, "terms");
    if (!terms.is_array()) throw ParseError("field 'terms' must be an array");
    for (const Json& t : terms)
        s.add(complex_from_json(field(t, "coeff")), diagram_from_json(field(t, "diagram")));
    return s;
}

std::string dump_stable(const Json& j) { return j.dump(2) + "\n"; }

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read file: " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON in ") + path + ": " + e.what());
    }
}

} // namespace tft
