#pragma once

#include <cstddef>

#include "tft/forest.hpp"
#include "tft/kernels.hpp"
#include "tft/tensorlab.hpp"
#include "tft/thompson.hpp"

namespace tft {

// A vector of the direct-limit Hilbert space, written down at a concrete
// cutoff tree.  Two states are the same vector iff they agree after being
// embedded into a common refinement of their cutoff trees; all comparisons
// below work that way.
//
// `rot` is the annular bookkeeping: amplitude leg i of `amps` sits at leaf
// (i + rot) mod n of the tree.  Operations accept any rot on input and
// always return states in rotation-0 form.
struct LimitState {
    BinaryTree tree;
    int rot = 0;
    CVec amps;

    std::size_t leaves() const { return tree.leaves(); }
};

// Largest cutoff tree any operation is allowed to materialize.  Defaults to
// 12 leaves; the TFT_MAX_LEAVES environment variable overrides it.
std::size_t max_context_leaves();

// Folds a nonzero rot into the amplitudes.  The local dimension is inferred
// from the vector length (throws ShapeError when the length is not a perfect
// power matching the leaf count).
LimitState canonical(const LimitState& s);

// Applies the tensor-network image of the forest w (one copy of V per caret)
// to a vector with w.dom() legs of dimension V.d.  Output has w.cod() legs.
CVec phi_apply(const CVec& in, const Forest& w, const Isometry3& V);

// Dense matrix of the same map: d^cod rows by d^dom columns.  Empty forests
// have no image (ForestError); matrices above the entry budget are refused
// with ResourceError.
CMat phi(const Forest& w, const Isometry3& V);

// The vacuum at the three-leaf context (*(**)): amplitudes <jk|V|l>/sqrt(d)
// on legs (l, j, k).  V must pass all structural checks, else VacuumError.
LimitState vacuum(const Isometry3& V);

// Rewrites s at a finer cutoff tree; `target` must refine s.tree, else
// RefinementError.  The state is unchanged as a vector of the limit space.
LimitState embed(const LimitState& s, const BinaryTree& target, const Isometry3& V);

// The fraction action of T: refine g's denominator and the state's cutoff
// tree to a common tree, push the amplitudes up along the state-side
// complement, and relabel the legs by the extended element's rotation.
// Unitary, and a representation of the group under multiply's "first h,
// then g" convention: act(g, act(h, s)) = act(multiply(h, g), s).
LimitState act(const GroupElement& g, const LimitState& s, const Isometry3& V);

// Inner product in the limit space (conjugate-linear in s): both states are
// embedded into the join of their cutoff trees first.
Complex inner(const LimitState& s, const LimitState& r, const Isometry3& V);

// Equality as limit vectors: amplitudes at the joined context agree entrywise
// within tol.
bool states_equal(const LimitState& s, const LimitState& r, const Isometry3& V,
                  double tol = 1e-9);

} // namespace tft
