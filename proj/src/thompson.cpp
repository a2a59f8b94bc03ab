#include "tft/thompson.hpp"

#include <algorithm>
#include <memory>
#include <set>
#include <sstream>
#include <vector>

#include "tft/error.hpp"

namespace tft {

namespace {

// Mutable scratch tree used only inside reduce().  Leaves of each tree are
// kept in a doubly linked list; denominator and numerator leaves are paired
// through `partner`.  Removing an opposing caret pair is then O(1) plus a
// couple of local re-checks.
struct MNode {
    MNode* l = nullptr;
    MNode* r = nullptr;
    MNode* parent = nullptr;
    MNode* prev = nullptr;
    MNode* next = nullptr;
    MNode* partner = nullptr;
    long seq = -1; // original denominator position, for deterministic order
    bool dead = false;
    bool leafp() const { return l == nullptr; }
};

struct Arena {
    std::vector<std::unique_ptr<MNode>> pool;
    MNode* make() {
        pool.push_back(std::make_unique<MNode>());
        return pool.back().get();
    }
};

MNode* build_mut(Arena& a, const BinaryTree::NodePtr& n, MNode* parent,
                 std::vector<MNode*>& leaves) {
    MNode* m = a.make();
    m->parent = parent;
    if (n->left) {
        m->l = build_mut(a, n->left, m, leaves);
        m->r = build_mut(a, n->right, m, leaves);
    } else {
        leaves.push_back(m);
    }
    return m;
}

BinaryTree rebuild(const MNode* m) {
    if (m->leafp()) return BinaryTree::leaf();
    return BinaryTree::caret(rebuild(m->l), rebuild(m->r));
}

// x and its successor are denominator siblings whose partners are adjacent
// (no wrap-around) numerator siblings.
bool removable(const MNode* x) {
    const MNode* y = x->next;
    if (!y || !x->parent || x->parent != y->parent) return false;
    const MNode* p = x->partner;
    const MNode* q = y->partner;
    return p->next == q && p->parent && p->parent == q->parent;
}

} // namespace

std::string GroupElement::str() const {
    return num.str() + "/" + den.str() + "@" + std::to_string(rot);
}

GroupElement reduce(const BinaryTree& num, const BinaryTree& den, int rot) {
    std::size_t n = num.leaves();
    if (n != den.leaves())
        throw ElementError("leaf count mismatch: numerator has " + std::to_string(n) +
                           " leaves, denominator has " + std::to_string(den.leaves()));
    long nn = static_cast<long>(n);
    int r = static_cast<int>(((rot % nn) + nn) % nn);

    Arena arena;
    std::vector<MNode*> dl, nl;
    dl.reserve(n);
    nl.reserve(n);
    MNode* den_root = build_mut(arena, den.root(), nullptr, dl);
    MNode* num_root = build_mut(arena, num.root(), nullptr, nl);
    for (std::size_t i = 0; i < n; ++i) {
        if (i) {
            dl[i]->prev = dl[i - 1];
            dl[i - 1]->next = dl[i];
            nl[i]->prev = nl[i - 1];
            nl[i - 1]->next = nl[i];
        }
        dl[i]->seq = static_cast<long>(i);
        MNode* pn = nl[(i + static_cast<std::size_t>(r)) % n];
        dl[i]->partner = pn;
        pn->partner = dl[i];
    }
    MNode* den_head = dl[0];
    MNode* num_head = nl[0];

    std::set<std::pair<long, MNode*>> work;
    for (MNode* x : dl)
        if (removable(x)) work.insert({x->seq, x});

    while (!work.empty()) {
        MNode* x = work.begin()->second;
        work.erase(work.begin());
        if (x->dead || !removable(x)) continue;
        MNode* y = x->next;
        MNode* p = x->partner;
        MNode* q = y->partner;
        MNode* dm = x->parent; // caret collapsing to the merged denominator leaf
        MNode* nm = p->parent;
        x->dead = y->dead = p->dead = q->dead = true;

        dm->l = dm->r = nullptr;
        dm->prev = x->prev;
        dm->next = y->next;
        if (dm->prev) dm->prev->next = dm; else den_head = dm;
        if (dm->next) dm->next->prev = dm;

        nm->l = nm->r = nullptr;
        nm->prev = p->prev;
        nm->next = q->next;
        if (nm->prev) nm->prev->next = nm; else num_head = nm;
        if (nm->next) nm->next->prev = nm;

        dm->partner = nm;
        nm->partner = dm;
        dm->seq = x->seq;

        // only the pairs touching the merged leaf can newly become removable
        if (removable(dm)) work.insert({dm->seq, dm});
        if (dm->prev && removable(dm->prev)) work.insert({dm->prev->seq, dm->prev});
    }

    GroupElement g;
    g.num = rebuild(num_root);
    g.den = rebuild(den_root);
    int idx = 0;
    for (MNode* t = num_head; t; t = t->next, ++idx) {
        if (t == den_head->partner) {
            g.rot = idx;
            break;
        }
    }
    return g;
}

GroupElement identity_element() { return GroupElement{}; }

GroupElement extended_num(const GroupElement& a, const Forest& f) {
    if (f.dom() != a.leaves())
        throw ElementError("refining forest has " + std::to_string(f.dom()) +
                           " roots, element has " + std::to_string(a.leaves()) + " leaves");
    GroupElement g;
    g.num = compose(a.num, f);
    g.den = compose(a.den, rotate_forest(f, a.rot));
    std::size_t s = 0;
    for (int t = 0; t < a.rot; ++t) s += f.trees[static_cast<std::size_t>(t)].leaves();
    g.rot = static_cast<int>(s % f.cod());
    return g;
}

GroupElement extended_den(const GroupElement& a, const Forest& h) {
    if (h.dom() != a.leaves())
        throw ElementError("refining forest has " + std::to_string(h.dom()) +
                           " roots, element has " + std::to_string(a.leaves()) + " leaves");
    GroupElement g;
    g.den = compose(a.den, h);
    g.num = compose(a.num, rotate_forest(h, -a.rot));
    std::size_t n = a.leaves();
    std::size_t s = 0;
    for (std::size_t t = n - static_cast<std::size_t>(a.rot); t < n; ++t)
        s += h.trees[t].leaves();
    g.rot = static_cast<int>(s % h.cod());
    return g;
}

GroupElement multiply(const GroupElement& a, const GroupElement& b) {
    Join j = join(a.num, b.den);
    GroupElement ae = extended_num(a, j.tau);  // a with numerator tree j.tree
    GroupElement be = extended_den(b, j.sigma); // b with denominator tree j.tree
    int n = static_cast<int>(ae.leaves());
    return reduce(be.num, ae.den, (ae.rot + be.rot) % n);
}

GroupElement inverse(const GroupElement& a) {
    int n = static_cast<int>(a.leaves());
    return reduce(a.den, a.num, a.rot == 0 ? 0 : n - a.rot);
}

GroupElement generator(Gen g) {
    switch (g) {
    case Gen::A:
        return reduce(BinaryTree::parse("((**)*)"), BinaryTree::parse("(*(**))"), 0);
    case Gen::B:
        return reduce(BinaryTree::parse("(*((**)*))"), BinaryTree::parse("(*(*(**)))"), 0);
    case Gen::C:
        return reduce(BinaryTree::parse("(*(**))"), BinaryTree::parse("(*(**))"), 2);
    }
    throw ParameterError("unknown generator");
}

GroupElement generator(char name) {
    switch (name) {
    case 'A': case 'a': return generator(Gen::A);
    case 'B': case 'b': return generator(Gen::B);
    case 'C': case 'c': return generator(Gen::C);
    default: break;
    }
    throw ParameterError(std::string("unknown generator '") + name + "'");
}

// ---------------------------------------------------------------------------
// piecewise-linear side

void PLMap::validate() const {
    if (points.size() < 2) throw NotInGroupError("need at least two breakpoints");
    if (points.front().first != Dyadic(0, 0) || points.back().first != Dyadic(1, 0))
        throw NotInGroupError("domain must be exactly [0,1]");
    if (circle) {
        if (points.front().second < Dyadic(0, 0) || !(points.front().second < Dyadic(1, 0)))
            throw NotInGroupError("circle lift must start in [0,1)");
        if (points.back().second != points.front().second + Dyadic(1, 0))
            throw NotInGroupError("circle lift must end exactly one turn up");
    } else {
        if (points.front().second != Dyadic(0, 0) || points.back().second != Dyadic(1, 0))
            throw NotInGroupError("interval map must fix 0 and 1");
    }
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        Dyadic dx = points[i + 1].first - points[i].first;
        Dyadic dy = points[i + 1].second - points[i].second;
        if (!(Dyadic(0, 0) < dx)) throw NotInGroupError("breakpoints must be strictly increasing");
        if (!(Dyadic(0, 0) < dy)) throw NotInGroupError("map must be strictly increasing");
        // dy/dx is a power of two exactly when the odd parts agree
        if (dy.m != dx.m)
            throw NotInGroupError("slope on [" + points[i].first.str() + "," +
                                  points[i + 1].first.str() + "] is not a power of two");
    }
}

Rational PLMap::operator()(const Rational& x) const {
    if (x < Rational(0, 1) || Rational(1, 1) < x)
        throw IntervalError("argument " + x.str() + " outside [0,1]");
    std::size_t lo = 0, hi = points.size() - 1;
    while (lo + 1 < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (!(x < Rational(points[mid].first)))
            lo = mid;
        else
            hi = mid;
    }
    Rational x0(points[lo].first), x1(points[lo + 1].first);
    Rational y0(points[lo].second), y1(points[lo + 1].second);
    Rational y = y0 + (y1 - y0) / (x1 - x0) * (x - x0);
    if (circle && !(y < Rational(1, 1))) y = y - Rational(1, 1);
    return y;
}

double PLMap::eval(double x) const {
    if (x < 0.0) x = 0.0;
    if (x > 1.0) x = 1.0;
    std::size_t lo = 0, hi = points.size() - 1;
    while (lo + 1 < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (points[mid].first.to_double() <= x)
            lo = mid;
        else
            hi = mid;
    }
    double x0 = points[lo].first.to_double(), x1 = points[lo + 1].first.to_double();
    double y0 = points[lo].second.to_double(), y1 = points[lo + 1].second.to_double();
    double y = y0 + (y1 - y0) / (x1 - x0) * (x - x0);
    if (circle && y >= 1.0) y -= 1.0;
    return y;
}

Dyadic PLMap::lift(const Dyadic& x) const {
    if (x < Dyadic(0, 0) || Dyadic(1, 0) < x)
        throw IntervalError("argument " + x.str() + " outside [0,1]");
    std::size_t lo = 0, hi = points.size() - 1;
    while (lo + 1 < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (!(x < points[mid].first))
            lo = mid;
        else
            hi = mid;
    }
    Rational x0(points[lo].first), x1(points[lo + 1].first);
    Rational y0(points[lo].second), y1(points[lo + 1].second);
    Rational y = y0 + (y1 - y0) / (x1 - x0) * (Rational(x) - x0);
    return y.to_dyadic();
}

std::string PLMap::str() const {
    std::ostringstream os;
    if (circle) os << "circle ";
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i) os << " ";
        os << "(" << points[i].first.str() << "," << points[i].second.str() << ")";
    }
    return os.str();
}

PLMap element_to_pl(const GroupElement& a) {
    DyadicPartition P = tree_partition(a.den);
    DyadicPartition Q = tree_partition(a.num);
    std::size_t n = P.intervals();
    PLMap f;
    f.circle = (a.rot != 0);
    Dyadic y = Q.points[static_cast<std::size_t>(a.rot)];
    f.points.emplace_back(Dyadic(0, 0), y);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = (i + static_cast<std::size_t>(a.rot)) % n;
        y = y + (Q.points[j + 1] - Q.points[j]);
        f.points.emplace_back(P.points[i + 1], y);
    }
    return f;
}

namespace {

struct Piece {
    Dyadic x;     // left endpoint of the source interval
    Dyadic ylift; // lift value of the image's left endpoint
};

// Recursively bisect [ax,bx] until each piece is linear and maps onto a
// standard dyadic interval (checked on the lift, i.e. modulo full turns).
// [lo,hi) indexes the map breakpoints strictly inside (ax,bx).
void cut_good(const PLMap& f, const Dyadic& ax, const Dyadic& bx, const Dyadic& ya,
              const Dyadic& yb, std::size_t lo, std::size_t hi, int depth,
              std::vector<Piece>& out) {
    if (lo == hi) {
        Dyadic len = yb - ya;
        // standard dyadic image: length 1/2^k and left endpoint aligned to it
        if (len.m == 1 && ya.k <= len.k) {
            out.push_back({ax, ya});
            return;
        }
    }
    if (depth > 60)
        throw NotInGroupError("map does not rearrange standard dyadic intervals");
    Dyadic mid = ax + (bx - ax).times_pow2(-1);
    Dyadic ym = f.lift(mid);
    std::size_t s_ge = lo, s_gt = lo;
    while (s_ge < hi && f.points[s_ge].first < mid) ++s_ge;
    s_gt = s_ge;
    while (s_gt < hi && !(mid < f.points[s_gt].first)) ++s_gt;
    cut_good(f, ax, mid, ya, ym, lo, s_ge, depth + 1, out);
    cut_good(f, mid, bx, ym, yb, s_gt, hi, depth + 1, out);
}

Dyadic wrap_unit(Dyadic u) {
    while (!(u < Dyadic(1, 0))) u = u - Dyadic(1, 0);
    return u;
}

} // namespace

GroupElement pl_to_element(const PLMap& f) {
    f.validate();
    std::vector<Piece> pieces;
    cut_good(f, Dyadic(0, 0), Dyadic(1, 0), f.points.front().second, f.points.back().second,
             1, f.points.size() - 1, 0, pieces);

    std::vector<Dyadic> den_pts;
    den_pts.reserve(pieces.size() + 1);
    for (const Piece& p : pieces) den_pts.push_back(p.x);
    den_pts.push_back(Dyadic(1, 0));
    BinaryTree den = partition_tree(DyadicPartition(den_pts));

    std::vector<Dyadic> starts;
    starts.reserve(pieces.size());
    for (const Piece& p : pieces) starts.push_back(wrap_unit(p.ylift));
    std::vector<Dyadic> sorted = starts;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Dyadic> num_pts = sorted;
    num_pts.push_back(Dyadic(1, 0));
    BinaryTree num = partition_tree(DyadicPartition(num_pts));

    std::size_t rot = static_cast<std::size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), starts[0]) - sorted.begin());
    return reduce(num, den, static_cast<int>(rot));
}

DyadicPartition good_refinement(const GroupElement& a, const DyadicPartition& P) {
    PLMap f = element_to_pl(a);
    std::vector<Piece> pieces;
    for (std::size_t i = 0; i + 1 < P.points.size(); ++i) {
        const Dyadic& ax = P.points[i];
        const Dyadic& bx = P.points[i + 1];
        std::size_t lo = 0;
        while (lo < f.points.size() && !(ax < f.points[lo].first)) ++lo;
        std::size_t hi = lo;
        while (hi < f.points.size() && f.points[hi].first < bx) ++hi;
        cut_good(f, ax, bx, f.lift(ax), f.lift(bx), lo, hi, 0, pieces);
    }
    std::vector<Dyadic> pts;
    pts.reserve(pieces.size() + 1);
    for (const Piece& p : pieces) pts.push_back(p.x);
    pts.push_back(Dyadic(1, 0));
    return DyadicPartition(pts);
}

} // namespace tft
