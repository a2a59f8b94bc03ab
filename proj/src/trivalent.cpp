#include "tft/trivalent.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tft/error.hpp"

namespace tft {

namespace {

constexpr double kPi = 3.14159265358979323846;

Complex ipow(Complex base, long e) {
    Complex out{1.0, 0.0};
    for (long i = 0; i < e; ++i) out *= base;
    return out;
}

bool near_zero(Complex z, double tol, double scale) {
    return std::abs(z) <= tol * (1.0 + scale);
}

} // namespace

// ---------------------------------------------------------------------------
// parameters

void TrivalentParams::validate(double tol) const {
    if (std::abs(d) <= tol) throw ParameterError("loop value d must be nonzero");
    if (std::abs(b) <= tol) throw ParameterError("bigon constant b must be nonzero");
    if (dim_c4 < 2 || dim_c4 > 4)
        throw ParameterError("four-point space dimension must be 2, 3 or 4, got " +
                             std::to_string(dim_c4));
    if (dim_c4 == 3) {
        const Complex r = b * d + t - d * t - 2.0 * b;
        const double scale = std::abs(b * d) + std::abs(t) + std::abs(d * t) + 2.0 * std::abs(b);
        if (!near_zero(r, tol, scale))
            throw ParameterError("parameters violate the three-dimensional constraint");
    }
    if (dim_c4 == 2) {
        const Complex r1 = b * d + t + d * t;
        const double s1 = std::abs(b * d) + std::abs(t) + std::abs(d * t);
        const Complex b3 = b * b * b;
        const Complex t2 = t * t;
        const Complex r2 = 2.0 * b3 * b * b * d + 2.0 * b3 * b * d * t - 4.0 * b3 * d * t2 +
                           2.0 * b * d * t2 * t2 + 2.0 * b * d * d * t2 * t2;
        const double s2 = 2.0 * std::abs(b3 * b * b * d) + 2.0 * std::abs(b3 * b * d * t) +
                          4.0 * std::abs(b3 * d * t2) + 2.0 * std::abs(b * d * t2 * t2) +
                          2.0 * std::abs(b * d * d * t2 * t2);
        if (!near_zero(r1, tol, s1) || !near_zero(r2, tol, s2))
            throw ParameterError("parameters violate the two-dimensional constraint");
    }
}

TrivalentParams TrivalentParams::fibonacci() {
    TrivalentParams p;
    const double s5 = std::sqrt(5.0);
    p.d = Complex{(1.0 + s5) / 2.0, 0.0};
    p.b = Complex{1.0, 0.0};
    p.t = Complex{(1.0 - s5) / 2.0, 0.0};
    p.dim_c4 = 2;
    return p;
}

// ---------------------------------------------------------------------------
// diagrams

Diagram Diagram::make(int boundary, int vertices,
                      const std::vector<std::pair<int, int>>& edges, long circles) {
    if (boundary < 0 || vertices < 0 || circles < 0)
        throw ShapeError("diagram sizes must be nonnegative");
    Diagram d;
    d.boundary_ = boundary;
    d.vertices_ = vertices;
    d.circles_ = circles;
    d.theta_.assign(static_cast<std::size_t>(boundary) + 3u * vertices, -1);
    auto resolve = [&](int code) -> int {
        if (code < 0) {
            const int i = -1 - code;
            if (i >= boundary) throw ShapeError("boundary mark " + std::to_string(i) + " out of range");
            return i;
        }
        if (code >= 3 * vertices) throw ShapeError("vertex port " + std::to_string(code) + " out of range");
        return boundary + code;
    };
    for (const auto& [pa, pb] : edges) {
        const int a = resolve(pa);
        const int b = resolve(pb);
        if (a == b) throw ShapeError("edge may not pair a strand end with itself");
        if (d.theta_[a] != -1 || d.theta_[b] != -1)
            throw ShapeError("strand end used by more than one edge");
        d.theta_[a] = b;
        d.theta_[b] = a;
    }
    for (std::size_t h = 0; h < d.theta_.size(); ++h)
        if (d.theta_[h] == -1)
            throw ShapeError("strand end " + std::to_string(h) + " left unpaired");
    return d;
}

Diagram Diagram::circle(long count) {
    if (count < 0) throw ShapeError("circle count must be nonnegative");
    Diagram d;
    d.circles_ = count;
    return d;
}

std::size_t Diagram::edge_count() const { return theta_.size() / 2; }

bool Diagram::empty() const { return boundary_ == 0 && vertices_ == 0 && circles_ == 0; }

int Diagram::ends() const { return static_cast<int>(theta_.size()); }

int Diagram::theta(int h) const {
    if (h < 0 || h >= ends()) throw ShapeError("strand end out of range");
    return theta_[h];
}

Diagram Diagram::with_circles(long count) const {
    if (count < 0) throw ShapeError("circle count must be nonnegative");
    Diagram d = *this;
    d.circles_ = count;
    return d;
}

Diagram Diagram::mirrored() const {
    Diagram m = *this;
    auto flip = [&](int h) -> int {
        if (h < boundary_) return h;
        const int v = (h - boundary_) / 3;
        const int s = (h - boundary_) % 3;
        return boundary_ + 3 * v + (s == 0 ? 0 : 3 - s);
    };
    for (int h = 0; h < ends(); ++h) m.theta_[flip(h)] = flip(theta_[h]);
    return m;
}

namespace {

// Shared traversal for canonical keys: vertices get labels in discovery
// order and slots are counted from the slot the walk entered through, so
// the encoding is independent of the stored numbering.
struct KeyWalk {
    const Diagram& d;
    std::vector<int> label;
    std::vector<int> entry;
    std::vector<int> order;

    explicit KeyWalk(const Diagram& diagram)
        : d(diagram), label(diagram.vertex_count(), -1), entry(diagram.vertex_count(), 0) {}

    std::string token(int h) {
        if (d.is_mark_end(h)) return "m" + std::to_string(h);
        const int v = d.end_vertex(h);
        const int s = d.end_slot(h);
        if (label[v] < 0) {
            label[v] = static_cast<int>(order.size());
            entry[v] = s;
            order.push_back(v);
            return "v" + std::to_string(label[v]) + ".0";
        }
        const int rel = (s - entry[v] + 3) % 3;
        return "v" + std::to_string(label[v]) + "." + std::to_string(rel);
    }

    void expand(std::string& out, std::size_t from) {
        for (std::size_t oi = from; oi < order.size(); ++oi) {
            const int u = order[oi];
            for (int r = 0; r < 3; ++r) {
                const int s = (entry[u] + r) % 3;
                out += token(d.theta(d.end_of_port(u, s)));
                out += (r < 2) ? ',' : ';';
            }
        }
    }
};

} // namespace

std::string Diagram::canonical_key() const {
    KeyWalk walk(*this);
    std::string key = "B" + std::to_string(boundary_) + ";";
    for (int i = 0; i < boundary_; ++i) {
        key += walk.token(theta_[i]);
        key += ';';
    }
    walk.expand(key, 0);

    // Closed components are not reachable from the rim; encode each from its
    // lexicographically best seed and append in sorted order.
    std::vector<char> seen(vertices_, 0);
    for (int v : walk.order) seen[v] = 1;
    std::vector<std::string> closed;
    std::vector<char> grouped(vertices_, 0);
    for (int v0 = 0; v0 < vertices_; ++v0) {
        if (seen[v0] || grouped[v0]) continue;
        // collect the component of v0
        std::vector<int> comp{v0};
        grouped[v0] = 1;
        for (std::size_t i = 0; i < comp.size(); ++i)
            for (int s = 0; s < 3; ++s) {
                const int w = end_vertex(theta_[end_of_port(comp[i], s)]);
                if (w >= 0 && !grouped[w]) {
                    grouped[w] = 1;
                    comp.push_back(w);
                }
            }
        std::string best;
        for (int v : comp)
            for (int s = 0; s < 3; ++s) {
                KeyWalk local(*this);
                local.label[v] = 0;
                local.entry[v] = s;
                local.order.push_back(v);
                std::string enc;
                local.expand(enc, 0);
                if (best.empty() || enc < best) best = std::move(enc);
            }
        closed.push_back(std::move(best));
    }
    std::sort(closed.begin(), closed.end());
    for (const auto& enc : closed) key += "C{" + enc + "}";
    key += "O" + std::to_string(circles_);
    return key;
}

bool Diagram::operator==(const Diagram& other) const {
    if (boundary_ != other.boundary_ || vertices_ != other.vertices_ ||
        circles_ != other.circles_)
        return false;
    return canonical_key() == other.canonical_key();
}

DiagramSum& DiagramSum::add(Complex c, const Diagram& d) {
    if (c == Complex{0.0, 0.0}) return *this;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (terms[i].second == d) {
            terms[i].first += c;
            if (terms[i].first == Complex{0.0, 0.0})
                terms.erase(terms.begin() + static_cast<long>(i));
            return *this;
        }
    }
    terms.emplace_back(c, d);
    return *this;
}

// ---------------------------------------------------------------------------
// ready-made diagrams

Diagram beta4(int i) {
    const auto P = Diagram::port;
    const auto M = Diagram::mark;
    switch (i) {
        case 1: return Diagram::make(4, 0, {{M(0), M(3)}, {M(1), M(2)}});
        case 2: return Diagram::make(4, 0, {{M(0), M(1)}, {M(2), M(3)}});
        case 3:
            return Diagram::make(4, 2, {{P(0, 0), M(1)},
                                        {P(0, 1), P(1, 2)},
                                        {P(0, 2), M(0)},
                                        {P(1, 0), M(2)},
                                        {P(1, 1), M(3)}});
        case 4:
            return Diagram::make(4, 2, {{P(0, 0), P(1, 1)},
                                        {P(0, 1), M(3)},
                                        {P(0, 2), M(0)},
                                        {P(1, 0), M(2)},
                                        {P(1, 2), M(1)}});
        default: throw ShapeError("four-point basis index must be 1..4");
    }
}

Diagram polygon(int k) {
    if (k < 1) throw ShapeError("polygon needs at least one vertex");
    const auto P = Diagram::port;
    std::vector<std::pair<int, int>> edges;
    for (int j = 0; j < k; ++j) {
        edges.push_back({P(j, 0), P((j + 1) % k, 1)});
        edges.push_back({P(j, 2), Diagram::mark(j)});
    }
    return Diagram::make(k, k, edges);
}

Diagram square4() { return polygon(4); }

Diagram theta_graph() {
    const auto P = Diagram::port;
    return Diagram::make(0, 2, {{P(0, 0), P(1, 2)}, {P(0, 1), P(1, 1)}, {P(0, 2), P(1, 0)}});
}

// ---------------------------------------------------------------------------
// faces

namespace {

// Walking theta(sigma(h)) traces the face to the right of each strand end;
// orbits that touch the rim are boundary regions, the rest are internal
// faces.  Orbits are rotated to start at their smallest end.
int face_step(const Diagram& d, int h) {
    const int v = d.end_vertex(h);
    const int s = d.end_slot(h);
    return d.theta(d.end_of_port(v, (s + 1) % 3));
}

std::vector<std::vector<int>> internal_faces(const Diagram& d) {
    std::vector<std::vector<int>> faces;
    std::vector<char> visited(d.ends(), 0);
    for (int h0 = 0; h0 < d.ends(); ++h0) {
        if (visited[h0]) continue;
        std::vector<int> orbit;
        bool internal = true;
        int h = h0;
        do {
            visited[h] = 1;
            orbit.push_back(h);
            if (d.is_mark_end(h)) {
                internal = false;
                h = d.theta(h);
            } else {
                h = face_step(d, h);
            }
        } while (h != h0);
        if (!internal) continue;
        const auto at = std::min_element(orbit.begin(), orbit.end());
        std::rotate(orbit.begin(), at, orbit.end());
        faces.push_back(std::move(orbit));
    }
    return faces;
}

int outward_port(const Diagram& d, int h) {
    const int v = d.end_vertex(h);
    const int s = d.end_slot(h);
    return d.end_of_port(v, (s + 2) % 3);
}

// ---------------------------------------------------------------------------
// surgery: rebuild a diagram after removing vertices

struct SEnd {
    bool fresh = false;
    int a = 0; // old strand end, or fresh vertex
    int b = 0; // fresh slot
    static SEnd old_port(int end) { return {false, end, 0}; }
    static SEnd fresh_port(int v, int s) { return {true, v, s}; }
};

// Removes the vertices in `dead`, adds `fresh_count` new ones, and rewires
// strands through the joins: each join splices the strand that entered one
// port to the strand (or fresh port) at the other.  Chains of joins across
// several removed ports are followed through; chains that close on
// themselves become circles.
Diagram surgery(const Diagram& d, const std::vector<int>& dead,
                int fresh_count, const std::vector<std::pair<SEnd, SEnd>>& joins,
                long extra_circles) {
    const int nb = d.boundary();
    std::vector<char> is_dead(d.vertex_count(), 0);
    for (int v : dead) is_dead[v] = 1;
    std::vector<int> remap(d.vertex_count(), -1);
    int live = 0;
    for (int v = 0; v < d.vertex_count(); ++v)
        if (!is_dead[v]) remap[v] = live++;
    const int nv = live + fresh_count;

    auto live_end = [&](int h) -> bool {
        return d.is_mark_end(h) || !is_dead[d.end_vertex(h)];
    };
    auto new_end = [&](int h) -> int {
        if (d.is_mark_end(h)) return h;
        return nb + 3 * remap[d.end_vertex(h)] + d.end_slot(h);
    };
    auto fresh_end = [&](const SEnd& e) -> int { return nb + 3 * (live + e.a) + e.b; };

    std::unordered_map<int, SEnd> link;
    for (const auto& [x, y] : joins) {
        for (const auto* e : {&x, &y})
            if (!e->fresh && (d.is_mark_end(e->a) || !is_dead[d.end_vertex(e->a)]))
                throw ShapeError("surgery join names a surviving strand end");
        if (!x.fresh) {
            if (!link.emplace(x.a, y).second) throw ShapeError("surgery join reuses a port");
        }
        if (!y.fresh) {
            if (!link.emplace(y.a, x).second) throw ShapeError("surgery join reuses a port");
        }
    }

    std::vector<int> ntheta(static_cast<std::size_t>(nb) + 3u * nv, -1);
    auto emit = [&](int a, int b) {
        if (a == b) throw ShapeError("surgery would close a strand on itself");
        if (ntheta[a] != -1 || ntheta[b] != -1)
            throw ShapeError("surgery wired a strand end twice");
        ntheta[a] = b;
        ntheta[b] = a;
    };

    std::vector<char> seen(d.ends(), 0);
    // Follow a strand that has just entered the removed region at dead port
    // p via a join; returns where it comes out.
    auto chase = [&](int p) -> int {
        for (;;) {
            seen[p] = 1;
            const int q = d.theta(p);
            if (live_end(q)) return new_end(q);
            seen[q] = 1;
            const auto it = link.find(q);
            if (it == link.end()) throw ShapeError("surgery strand runs into an unjoined port");
            if (it->second.fresh) return fresh_end(it->second);
            p = it->second.a;
        }
    };

    for (int h = 0; h < d.ends(); ++h) {
        if (!live_end(h)) continue;
        const int q = d.theta(h);
        if (live_end(q)) {
            if (h < q) emit(new_end(h), new_end(q));
            continue;
        }
        if (ntheta[new_end(h)] != -1) continue;
        seen[q] = 1;
        const auto it = link.find(q);
        if (it == link.end()) throw ShapeError("surgery strand runs into an unjoined port");
        emit(new_end(h), it->second.fresh ? fresh_end(it->second) : chase(it->second.a));
    }
    for (const auto& [x, y] : joins) {
        if (x.fresh && y.fresh) {
            if (ntheta[fresh_end(x)] == -1) emit(fresh_end(x), fresh_end(y));
        } else if (x.fresh || y.fresh) {
            const SEnd& f = x.fresh ? x : y;
            const SEnd& o = x.fresh ? y : x;
            if (ntheta[fresh_end(f)] == -1 && !seen[o.a]) emit(fresh_end(f), chase(o.a));
        }
    }
    // joins between removed ports that no surviving strand reached close up
    // into circles
    long circles = 0;
    for (const auto& [x, y] : joins) {
        if (x.fresh || y.fresh || seen[x.a]) continue;
        int p = x.a;
        for (;;) {
            seen[p] = 1;
            const int q = d.theta(p);
            seen[q] = 1;
            const auto it = link.find(q);
            if (it == link.end()) throw ShapeError("surgery strand runs into an unjoined port");
            if (it->second.fresh) throw ShapeError("surgery circle touched a fresh port");
            p = it->second.a;
            if (p == x.a) break;
        }
        ++circles;
    }
    for (std::size_t h = 0; h < ntheta.size(); ++h)
        if (ntheta[h] == -1) throw ShapeError("surgery left a dangling strand");

    std::vector<std::pair<int, int>> edges;
    for (std::size_t h = 0; h < ntheta.size(); ++h)
        if (static_cast<int>(h) < ntheta[h]) {
            auto code = [&](int e) -> int {
                return e < nb ? Diagram::mark(e) : e - nb;
            };
            edges.push_back({code(static_cast<int>(h)), code(ntheta[h])});
        }
    return Diagram::make(nb, nv, edges, d.circles() + extra_circles + circles);
}

// ---------------------------------------------------------------------------
// moves

std::vector<std::pair<Complex, Diagram>> apply_move(const Diagram& d,
                                                    const std::vector<int>& orbit,
                                                    const TrivalentParams& p,
                                                    std::optional<SquareWindow>& window,
                                                    int anchor_shift) {
    std::vector<int> owners;
    for (int h : orbit) owners.push_back(d.end_vertex(h));
    {
        std::vector<int> u = owners;
        std::sort(u.begin(), u.end());
        if (std::adjacent_find(u.begin(), u.end()) != u.end())
            throw ShapeError("face revisits a vertex; diagram is outside the reducible class");
    }
    switch (orbit.size()) {
        case 1:
            return {};
        case 2: {
            const auto join = std::make_pair(SEnd::old_port(outward_port(d, orbit[0])),
                                             SEnd::old_port(outward_port(d, orbit[1])));
            return {{p.b, surgery(d, owners, 0, {join}, 0)}};
        }
        case 3: {
            std::vector<std::pair<SEnd, SEnd>> joins = {
                {SEnd::fresh_port(0, 0), SEnd::old_port(outward_port(d, orbit[0]))},
                {SEnd::fresh_port(0, 1), SEnd::old_port(outward_port(d, orbit[2]))},
                {SEnd::fresh_port(0, 2), SEnd::old_port(outward_port(d, orbit[1]))}};
            return {{p.t, surgery(d, owners, 1, joins, 0)}};
        }
        case 4: {
            if (!window) window = square_window(p);
            std::array<int, 4> s{};
            for (int i = 0; i < 4; ++i) s[i] = outward_port(d, orbit[i]);
            int a = static_cast<int>(std::min_element(s.begin(), s.end()) - s.begin());
            a = (a + anchor_shift) % 4;
            // The face orbit runs clockwise, a patch boundary counterclockwise.
            const std::array<int, 4> legs{s[a], s[(a + 3) % 4], s[(a + 2) % 4], s[(a + 1) % 4]};
            std::vector<std::pair<Complex, Diagram>> out;
            for (int k = 0; k < p.dim_c4; ++k) {
                const Diagram patch = beta4(k + 1);
                std::vector<std::pair<SEnd, SEnd>> joins;
                auto as_send = [&](int h) -> SEnd {
                    if (patch.is_mark_end(h)) return SEnd::old_port(legs[h]);
                    return SEnd::fresh_port(patch.end_vertex(h), patch.end_slot(h));
                };
                for (int h = 0; h < patch.ends(); ++h)
                    if (h < patch.theta(h)) joins.push_back({as_send(h), as_send(patch.theta(h))});
                out.push_back({window->coefficients[static_cast<std::size_t>(k)],
                               surgery(d, owners, patch.vertex_count(), joins, patch.circles())});
            }
            return out;
        }
        default:
            throw ShapeError("no move for a face with " + std::to_string(orbit.size()) + " sides");
    }
}

} // namespace

// ---------------------------------------------------------------------------
// reduction

DiagramSum reduce(const DiagramSum& s, const TrivalentParams& p, std::optional<unsigned> seed) {
    if (p.d == Complex{0.0, 0.0}) throw ParameterError("loop value d must be nonzero");
    if (p.b == Complex{0.0, 0.0}) throw ParameterError("bigon constant b must be nonzero");
    if (p.dim_c4 < 2 || p.dim_c4 > 4)
        throw ParameterError("four-point space dimension must be 2, 3 or 4, got " +
                             std::to_string(p.dim_c4));
    std::optional<std::mt19937> rng;
    if (seed) rng.emplace(*seed);
    std::optional<SquareWindow> window;

    std::vector<std::pair<Complex, Diagram>> work;
    auto push = [&](Complex c, const Diagram& d) {
        if (d.circles() > 0) {
            work.emplace_back(c * ipow(p.d, d.circles()), d.with_circles(0));
        } else {
            work.emplace_back(c, d);
        }
    };
    for (const auto& [c, d] : s.terms) push(c, d);

    DiagramSum out;
    while (!work.empty()) {
        auto [c, d] = std::move(work.back());
        work.pop_back();
        if (c == Complex{0.0, 0.0}) continue;
        const auto faces = internal_faces(d);
        if (faces.empty()) {
            out.add(c, d);
            continue;
        }
        // A face is a move candidate only if it is small and visits each of
        // its vertices once; a face wrapping around a handle of the diagram
        // (the outside of a lollipop, say) is skipped, and the move that
        // unblocks it always lives on some other face.
        auto removable = [&d](const std::vector<int>& orbit) {
            if (orbit.size() > 4) return false;
            std::vector<int> u;
            for (int h : orbit) u.push_back(d.end_vertex(h));
            std::sort(u.begin(), u.end());
            return std::adjacent_find(u.begin(), u.end()) == u.end();
        };
        std::vector<std::size_t> small;
        for (std::size_t i = 0; i < faces.size(); ++i)
            if (removable(faces[i])) small.push_back(i);
        if (small.empty())
            throw IrreducibleError("no removable face of four or fewer sides remains");
        std::size_t pick = small[0];
        int shift = 0;
        if (rng) {
            pick = small[(*rng)() % small.size()];
            shift = static_cast<int>((*rng)() % 4u);
        } else {
            for (std::size_t i : small) {
                const auto& f = faces[i];
                const auto& g = faces[pick];
                if (f.size() < g.size() || (f.size() == g.size() && f[0] < g[0])) pick = i;
            }
        }
        for (auto& [mult, succ] : apply_move(d, faces[pick], p, window, shift))
            push(c * mult, succ);
    }
    return out;
}

DiagramSum reduce(const Diagram& d, const TrivalentParams& p, std::optional<unsigned> seed) {
    return reduce(DiagramSum(d), p, seed);
}

bool is_scalar(const DiagramSum& s) {
    for (const auto& [c, d] : s.terms) {
        (void)c;
        if (!d.empty()) return false;
    }
    return true;
}

Complex scalar_value(const DiagramSum& s) {
    Complex total{0.0, 0.0};
    for (const auto& [c, d] : s.terms) {
        if (!d.empty()) throw ShapeError("sum still contains non-scalar diagrams");
        total += c;
    }
    return total;
}

// ---------------------------------------------------------------------------
// pairings

namespace {

// Reflect the first diagram onto the second and sew the rims together,
// mark i to mark i; the result is closed.
Diagram glue_closed(const Diagram& a, const Diagram& b) {
    const int n = a.boundary();
    const int va = a.vertex_count();
    std::vector<std::pair<int, int>> edges;
    auto code = [&](int side, int h) -> int {
        const Diagram& d = side == 0 ? a : b;
        const int off = side == 0 ? 0 : va;
        return Diagram::port(off + d.end_vertex(h), d.end_slot(h));
    };
    for (int side = 0; side < 2; ++side) {
        const Diagram& d = side == 0 ? a : b;
        for (int h = n; h < d.ends(); ++h) {
            const int q = d.theta(h);
            if (q >= n && h < q) edges.push_back({code(side, h), code(side, q)});
        }
    }
    long circles = a.circles() + b.circles();
    std::vector<char> visited(n, 0);
    // walks into one side at junction j and returns the port where the
    // strand surfaces, or nothing if it loops back
    auto walk = [&](int side, int j) -> std::optional<std::pair<int, int>> {
        for (;;) {
            const Diagram& d = side == 0 ? a : b;
            const int q = d.theta(j);
            if (q >= n) return std::make_pair(side, q);
            if (visited[q]) return std::nullopt;
            visited[q] = 1;
            side = 1 - side;
            j = q;
        }
    };
    for (int j = 0; j < n; ++j) {
        if (visited[j]) continue;
        visited[j] = 1;
        const auto t1 = walk(0, j);
        if (!t1) {
            ++circles;
            continue;
        }
        const auto t2 = walk(1, j);
        if (!t2) throw ShapeError("rim strand lost while sewing diagrams");
        edges.push_back({code(t1->first, t1->second), code(t2->first, t2->second)});
    }
    return Diagram::make(0, va + b.vertex_count(), edges, circles);
}

} // namespace

Complex inner_product(const Diagram& a, const Diagram& b, const TrivalentParams& p) {
    if (a.boundary() != b.boundary())
        throw ShapeError("pairing needs matching numbers of boundary points");
    return scalar_value(reduce(glue_closed(a.mirrored(), b), p));
}

Complex inner_product(const DiagramSum& a, const DiagramSum& b, const TrivalentParams& p) {
    Complex total{0.0, 0.0};
    for (const auto& [ca, da] : a.terms)
        for (const auto& [cb, db] : b.terms) total += ca * cb * inner_product(da, db, p);
    return total;
}

Eigen::MatrixXcd gram_matrix(const std::vector<Diagram>& basis, const TrivalentParams& p) {
    const int n = static_cast<int>(basis.size());
    Eigen::MatrixXcd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            g(i, j) = inner_product(basis[static_cast<std::size_t>(i)],
                                    basis[static_cast<std::size_t>(j)], p);
            g(j, i) = g(i, j);
        }
    return g;
}

GramBasis gram_orthonormalize(const std::vector<Diagram>& basis, const TrivalentParams& p,
                              double tol) {
    const int n = static_cast<int>(basis.size());
    GramBasis gb;
    gb.gram = gram_matrix(basis, p);
    std::vector<Eigen::VectorXcd> rows;
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
        v(j) = Complex{1.0, 0.0};
        for (const auto& u : rows) {
            const Complex overlap = (u.transpose() * gb.gram.col(j)).value();
            v -= overlap * u;
        }
        const Complex pivot = (v.transpose() * gb.gram * v).value();
        if (std::abs(pivot) < tol) continue;
        if (pivot.real() <= 0.0 || std::abs(pivot.imag()) > tol * (1.0 + std::abs(pivot)))
            throw GramError("pairing is not positive on the given diagrams");
        v /= std::sqrt(pivot);
        rows.push_back(std::move(v));
    }
    gb.rank = static_cast<int>(rows.size());
    gb.theta = Eigen::MatrixXcd::Zero(gb.rank, n);
    for (int r = 0; r < gb.rank; ++r) gb.theta.row(r) = rows[static_cast<std::size_t>(r)].transpose();
    return gb;
}

Eigen::VectorXcd recover_components(const GramBasis& gb, const Eigen::VectorXcd& beta_dot_x) {
    if (beta_dot_x.size() != gb.theta.cols())
        throw ShapeError("scalar-product vector does not match the basis size");
    return gb.theta.transpose() * (gb.theta * beta_dot_x);
}

Eigen::VectorXcd recover_components(const std::vector<Diagram>& basis, const GramBasis& gb,
                                    const DiagramSum& x, const TrivalentParams& p) {
    Eigen::VectorXcd v(static_cast<long>(basis.size()));
    for (std::size_t l = 0; l < basis.size(); ++l)
        v(static_cast<long>(l)) = inner_product(DiagramSum(basis[l]), x, p);
    return recover_components(gb, v);
}

// ---------------------------------------------------------------------------
// the square relation

SquareWindow square_window(const TrivalentParams& p) {
    p.validate();
    const Complex d = p.d, b = p.b, t = p.t;
    SquareWindow sw;
    switch (p.dim_c4) {
        case 2: {
            const Complex den = d + 1.0;
            if (std::abs(den) < 1e-9 * (1.0 + std::abs(d)))
                throw ParameterError("square relation degenerates at d = -1");
            const Complex c = b * b / den;
            sw.coefficients = {c, c};
            sw.window = 2.0 * b * b * b * b * d / den;
            break;
        }
        case 3: {
            const Complex den = d * d - d - 1.0;
            if (std::abs(den) < 1e-9 * (1.0 + std::abs(d * d)))
                throw ParameterError("square relation degenerates on the golden locus");
            const Complex b2 = b * b, t2 = t * t;
            sw.coefficients = {(b2 * d - b2 - d * t2) / den,
                               (b2 * d - 2.0 * b2 + t2) / den,
                               (d - 1.0) * (d * t2 + t2 - b2) / (b * den)};
            sw.window = d *
                        (2.0 * b2 * b2 * d - 3.0 * b2 * b2 + 2.0 * b2 * t2 -
                         2.0 * b2 * d * t2 - t2 * t2 + d * d * t2 * t2) /
                        den;
            break;
        }
        case 4: {
            const Complex den = b * d + t + d * t;
            if (std::abs(den) < 1e-9 * (1.0 + std::abs(b * d)))
                throw ParameterError("square relation degenerates at bd + t + dt = 0");
            const Complex b2 = b * b, t2 = t * t;
            const Complex ca = b * (b2 + b * t - t2) / den;
            const Complex cb = (t2 * (d + 1.0) - b2) / den;
            sw.coefficients = {ca, ca, cb, cb};
            sw.window = 2.0 * b * d * (b2 * b2 + b2 * b * t - 2.0 * b2 * t2 + t2 * t2 + d * t2 * t2) / den;
            break;
        }
        default:
            throw ParameterError("four-point space dimension must be 2, 3 or 4");
    }
    return sw;
}

// ---------------------------------------------------------------------------
// the golden-ratio ascending system

namespace {

enum class FibClosure { wrap, cupcap };
enum class FibPat { straight, cupcap };

// Closed network for one matrix element of the coarse-graining map: two
// splitters at the bottom, two mergers at the top, a resolved crossing layer
// on the middle strands below and above the field insertions, and a trace
// closure.  Built over nets: a cap fuses two nets, a cup starts a shared one.
Diagram fib_closed(FibClosure closure, FibPat left, FibPat right, FibPat vx, FibPat wx) {
    const auto P = Diagram::port;
    // splitters: slot 0 right output, 1 left output, 2 input
    // mergers: slot 0 output, 1 left input, 2 right input
    const int vl_in = P(0, 2), vl_o1 = P(0, 1), vl_o2 = P(0, 0);
    const int vr_o3 = P(1, 1), vr_o4 = P(1, 0), vr_in = P(1, 2);
    const int wl_out = P(2, 0), wl_i1 = P(2, 1), wl_i2 = P(2, 2);
    const int wr_i3 = P(3, 1), wr_i4 = P(3, 2), wr_out = P(3, 0);

    std::vector<int> parent;
    std::vector<std::vector<int>> ports;
    auto fresh = [&]() -> int {
        parent.push_back(static_cast<int>(parent.size()));
        ports.emplace_back();
        return static_cast<int>(parent.size()) - 1;
    };
    auto root = [&](int x) -> int {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](int x, int y) { parent[root(x)] = root(y); };
    auto attach = [&](int net, int port) { ports[static_cast<std::size_t>(root(net))].push_back(port); };

    std::array<int, 5> cur{}; // strand positions 1..4
    for (int i = 1; i <= 4; ++i) cur[static_cast<std::size_t>(i)] = fresh();
    attach(cur[1], vl_o1);
    attach(cur[2], vl_o2);
    attach(cur[3], vr_o3);
    attach(cur[4], vr_o4);

    auto cupcap = [&](int i, int j) {
        unite(cur[static_cast<std::size_t>(i)], cur[static_cast<std::size_t>(j)]);
        const int f = fresh();
        cur[static_cast<std::size_t>(i)] = f;
        cur[static_cast<std::size_t>(j)] = f;
    };
    if (vx == FibPat::cupcap) cupcap(2, 3);
    if (left == FibPat::cupcap) cupcap(1, 2);
    if (right == FibPat::cupcap) cupcap(3, 4);
    if (wx == FibPat::cupcap) cupcap(2, 3);

    attach(cur[1], wl_i1);
    attach(cur[2], wl_i2);
    attach(cur[3], wr_i3);
    attach(cur[4], wr_i4);

    if (closure == FibClosure::wrap) {
        const int na = fresh(), nb = fresh();
        attach(na, vl_in);
        attach(na, wl_out);
        attach(nb, vr_in);
        attach(nb, wr_out);
    } else {
        const int na = fresh(), nb = fresh();
        attach(na, vl_in);
        attach(na, vr_in);
        attach(nb, wl_out);
        attach(nb, wr_out);
    }

    // merge port lists up to the roots
    std::vector<std::pair<int, int>> edges;
    long circles = 0;
    std::vector<std::vector<int>> merged(parent.size());
    for (std::size_t net = 0; net < parent.size(); ++net) {
        const int r = root(static_cast<int>(net));
        for (int q : ports[net])
            if (r != static_cast<int>(net)) merged[static_cast<std::size_t>(r)].push_back(q);
    }
    for (std::size_t net = 0; net < parent.size(); ++net) {
        if (root(static_cast<int>(net)) != static_cast<int>(net)) continue;
        auto all = ports[net];
        all.insert(all.end(), merged[net].begin(), merged[net].end());
        if (all.empty()) {
            ++circles;
        } else if (all.size() == 2) {
            edges.push_back({all[0], all[1]});
        } else {
            throw ShapeError("network strand with " + std::to_string(all.size()) + " loose ends");
        }
    }
    return Diagram::make(0, 4, edges, circles);
}

} // namespace

FibonacciData fib_ascending(const TrivalentParams& p) {
    p.validate();
    if (p.dim_c4 != 2)
        throw ParameterError("the ascending construction needs a two-dimensional four-point space");

    // The crossing resolves into the identity plus q times the cup-cap; the
    // phase is the root of unity that cancels the opposite crossing,
    // q + conj(q) + d = 0.
    const double arg = p.d.real() > 0.0 ? 4.0 * kPi / 5.0 : 2.0 * kPi / 5.0;
    const Complex q{std::cos(arg), std::sin(arg)};
    const Complex b2 = p.b * p.b;

    auto element = [&](FibClosure closure, FibPat left, FibPat right) -> Complex {
        Complex total{0.0, 0.0};
        for (int vt = 0; vt < 2; ++vt)
            for (int wt = 0; wt < 2; ++wt) {
                const Complex weight = (vt ? q : Complex{1.0, 0.0}) *
                                       (wt ? std::conj(q) : Complex{1.0, 0.0});
                const Diagram net = fib_closed(closure, left, right,
                                               vt ? FibPat::cupcap : FibPat::straight,
                                               wt ? FibPat::cupcap : FibPat::straight);
                total += weight * scalar_value(reduce(net, p));
            }
        return total / b2;
    };
    auto pat = [](int i) { return i == 0 ? FibPat::straight : FibPat::cupcap; };

    FibonacciData out;
    const std::vector<Diagram> pair_basis{beta4(1), beta4(2)};
    out.gram = gram_matrix(pair_basis, p);
    // Only the positive root of the loop value gives a positive pairing; on
    // the other root the algebra still closes, so just skip the triangular
    // data instead of failing.
    try {
        out.theta = gram_orthonormalize(pair_basis, p).theta;
    } catch (const GramError&) {
        out.theta.resize(0, 2);
    }

    CMat m(2, 2);
    for (int l = 0; l < 2; ++l)
        for (int i = 0; i < 2; ++i)
            m(l, i) = element(l == 0 ? FibClosure::wrap : FibClosure::cupcap, pat(i),
                              FibPat::straight);
    out.ascend = out.gram.partialPivLu().solve(m);

    Eigen::ComplexEigenSolver<CMat> es(out.ascend);
    if (es.info() != Eigen::Success)
        throw SingularEigenvalueError("coarse-graining map could not be diagonalized");
    int i1 = std::abs(es.eigenvalues()(0) - Complex{1.0, 0.0}) <
                     std::abs(es.eigenvalues()(1) - Complex{1.0, 0.0})
                 ? 0
                 : 1;
    const Complex lam_tau = es.eigenvalues()(1 - i1);
    Eigen::Vector2cd mu_one = es.eigenvectors().col(i1);
    if (std::abs(mu_one(0)) < 1e-12)
        throw SingularEigenvalueError("unit eigenvector has no identity component");
    mu_one /= mu_one(0);
    out.mu_tau = es.eigenvectors().col(1 - i1);
    if (std::abs(out.mu_tau(1)) < 1e-12)
        throw SingularEigenvalueError("scaling eigenvector has no cup-cap component");
    out.mu_tau /= out.mu_tau(1);

    const Complex d2 = p.d * p.d;
    CMat fields(2, 2);
    fields.col(0) = mu_one;
    fields.col(1) = out.mu_tau;
    const CMat duals = d2 * (fields.transpose() * out.gram).inverse();

    // pair each insertion against each closure once, then contract fields
    Complex mf[2][2][2];
    for (int l = 0; l < 2; ++l)
        for (int pa = 0; pa < 2; ++pa)
            for (int pb = 0; pb < 2; ++pb)
                mf[l][pa][pb] =
                    element(l == 0 ? FibClosure::wrap : FibClosure::cupcap, pat(pa), pat(pb));

    FusionTensor fusion(2, std::vector<std::vector<Complex>>(2, std::vector<Complex>(2)));
    for (int fa = 0; fa < 2; ++fa)
        for (int fb = 0; fb < 2; ++fb) {
            Eigen::Vector2cd v;
            for (int l = 0; l < 2; ++l) {
                v(l) = Complex{0.0, 0.0};
                for (int pa = 0; pa < 2; ++pa)
                    for (int pb = 0; pb < 2; ++pb)
                        v(l) += fields(pa, fa) * fields(pb, fb) * mf[l][pa][pb];
            }
            const Eigen::Vector2cd comp = out.gram.partialPivLu().solve(v);
            for (int g = 0; g < 2; ++g)
                fusion[static_cast<std::size_t>(fa)][static_cast<std::size_t>(fb)]
                      [static_cast<std::size_t>(g)] =
                          (duals.col(g).transpose() * out.gram * comp).value() / d2;
        }

    AscendingSystem& sys = out.system;
    sys.names = {"1", "tau"};
    sys.lambda = {es.eigenvalues()(i1), lam_tau};
    for (const Complex& lam : sys.lambda)
        sys.h.push_back(-std::log2(std::abs(lam)));
    sys.vac = {(mu_one(0) * d2 + mu_one(1) * p.d) / d2,
               (out.mu_tau(0) * d2 + out.mu_tau(1) * p.d) / d2};
    sys.fusion = std::move(fusion);
    return out;
}

} // namespace tft
