#include "tft/semicont.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <utility>

#include "tft/error.hpp"

namespace tft {

namespace {

void check_cap(std::size_t leaves) {
    const std::size_t cap = max_context_leaves();
    if (leaves > cap)
        throw ResourceError("cutoff tree needs " + std::to_string(leaves) +
                            " leaves but the cap is " + std::to_string(cap) +
                            " (override with TFT_MAX_LEAVES)");
}

// Length must be exactly d^legs.
bool matches_power(std::size_t len, int d, int legs) {
    if (d < 1 || legs < 1) return false;
    std::size_t p = 1;
    for (int i = 0; i < legs; ++i) {
        if (p > len / static_cast<std::size_t>(d) + 1) return false;
        p *= static_cast<std::size_t>(d);
        if (p > len) return false;
    }
    return p == len;
}

int infer_dim(std::size_t len, int legs) {
    if (legs < 1 || len == 0)
        throw ShapeError("state amplitudes cannot be empty");
    const int guess = static_cast<int>(std::llround(std::pow(static_cast<double>(len), 1.0 / legs)));
    for (int d = std::max(1, guess - 1); d <= guess + 1; ++d)
        if (matches_power(len, d, legs)) return d;
    throw ShapeError("amplitude length " + std::to_string(len) +
                     " is not d^" + std::to_string(legs) + " for any d");
}

LimitState canonical_with_d(const LimitState& s, int d) {
    const int legs = static_cast<int>(s.tree.leaves());
    if (s.amps.size() != pow_size(d, legs))
        throw ShapeError("state with " + std::to_string(legs) + " leaves needs " +
                         std::to_string(pow_size(d, legs)) + " amplitudes, got " +
                         std::to_string(s.amps.size()));
    const int r = ((s.rot % legs) + legs) % legs;
    if (r == 0) return LimitState{s.tree, 0, s.amps};
    return LimitState{s.tree, 0, cyclic_relabel(s.amps, legs, d, r)};
}

// Expands one tree rooted at leg `pos`; returns the grown vector, the new
// total leg count and the number of legs the tree contributed.
struct Expansion {
    CVec vec;
    int legs;
    int width;
};

Expansion expand_tree(CVec vec, int legs, int pos, const BinaryTree& t, int d,
                      const CVec& vflat) {
    if (t.is_leaf()) return {std::move(vec), legs, 1};
    CVec grown = apply_caret(vec, legs, pos, d, vflat);
    Expansion l = expand_tree(std::move(grown), legs + 1, pos, t.left(), d, vflat);
    Expansion r = expand_tree(std::move(l.vec), l.legs, pos + l.width, t.right(), d, vflat);
    return {std::move(r.vec), r.legs, l.width + r.width};
}

// Both states rewritten at the join of their cutoff trees.
std::pair<CVec, CVec> at_common_context(const LimitState& s0, const LimitState& r0,
                                        const Isometry3& V) {
    const LimitState s = canonical_with_d(s0, V.d);
    const LimitState r = canonical_with_d(r0, V.d);
    const Join j = join(s.tree, r.tree);
    check_cap(j.tree.leaves());
    return {phi_apply(s.amps, j.tau, V), phi_apply(r.amps, j.sigma, V)};
}

} // namespace

std::size_t max_context_leaves() {
    if (const char* env = std::getenv("TFT_MAX_LEAVES")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return 12;
}

LimitState canonical(const LimitState& s) {
    return canonical_with_d(s, infer_dim(s.amps.size(), static_cast<int>(s.tree.leaves())));
}

CVec phi_apply(const CVec& in, const Forest& w, const Isometry3& V) {
    const int n = static_cast<int>(w.dom());
    if (n == 0) throw ForestError("empty forest has no tensor-network image");
    if (in.size() != pow_size(V.d, n))
        throw ShapeError("vector with " + std::to_string(in.size()) +
                         " entries does not have " + std::to_string(n) + " legs of dimension " +
                         std::to_string(V.d));
    check_cap(w.cod());
    const CVec vflat = V.flat();
    CVec vec = in;
    int legs = n;
    int pos = 0;
    for (const BinaryTree& t : w.trees) {
        Expansion e = expand_tree(std::move(vec), legs, pos, t, V.d, vflat);
        vec = std::move(e.vec);
        legs = e.legs;
        pos += e.width;
    }
    return vec;
}

CMat phi(const Forest& w, const Isometry3& V) {
    if (w.dom() == 0) throw ForestError("empty forest has no tensor-network image");
    const std::size_t cols = pow_size(V.d, static_cast<int>(w.dom()));
    const std::size_t rows = pow_size(V.d, static_cast<int>(w.cod()));
    if (rows > (std::size_t{1} << 23) / cols)
        throw ResourceError("dense image would need " + std::to_string(rows) + "x" +
                            std::to_string(cols) + " entries; use phi_apply instead");
    CMat m(rows, cols);
    CVec basis(cols, Complex{0.0, 0.0});
    for (std::size_t c = 0; c < cols; ++c) {
        basis[c] = 1.0;
        const CVec col = phi_apply(basis, w, V);
        for (std::size_t r = 0; r < rows; ++r) m(r, c) = col[r];
        basis[c] = 0.0;
    }
    return m;
}

LimitState vacuum(const Isometry3& V) {
    if (!verify_tensor(V).all())
        throw VacuumError("seed tensor fails the isometry/symmetry checks the vacuum needs");
    const int d = V.d;
    CVec amps(pow_size(d, 3));
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (int l = 0; l < d; ++l)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                amps[(static_cast<std::size_t>(l) * d + j) * d + k] = V.at(j, k, l) * scale;
    return LimitState{BinaryTree::parse("(*(**))"), 0, std::move(amps)};
}

LimitState embed(const LimitState& s0, const BinaryTree& target, const Isometry3& V) {
    const LimitState s = canonical_with_d(s0, V.d);
    Forest p;
    if (!refines(s.tree, target, &p))
        throw RefinementError("target tree does not refine the state's cutoff tree");
    check_cap(target.leaves());
    return LimitState{target, 0, phi_apply(s.amps, p, V)};
}

LimitState act(const GroupElement& g, const LimitState& s0, const Isometry3& V) {
    const LimitState s = canonical_with_d(s0, V.d);
    const Join j = join(g.den, s.tree);
    check_cap(j.tree.leaves());
    const GroupElement ge = extended_den(g, j.tau);
    CVec psi = phi_apply(s.amps, j.sigma, V);
    const int legs = static_cast<int>(j.tree.leaves());
    const int shift = ((ge.rot % legs) + legs) % legs;
    if (shift != 0) psi = cyclic_relabel(psi, legs, V.d, shift);
    return LimitState{ge.num, 0, std::move(psi)};
}

Complex inner(const LimitState& s, const LimitState& r, const Isometry3& V) {
    const auto [a, b] = at_common_context(s, r, V);
    return inner(a, b);
}

bool states_equal(const LimitState& s, const LimitState& r, const Isometry3& V,
                  double tol) {
    const auto [a, b] = at_common_context(s, r, V);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
}

} // namespace tft
