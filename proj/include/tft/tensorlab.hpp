#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tft/kernels.hpp"

namespace tft {

using CMat = Eigen::MatrixXcd;

// Three-leg tensor V : C^d -> C^d (x) C^d, stored as a d^2-by-d matrix with
// row index (j*d + k) and column index l.
struct Isometry3 {
    int d = 0;
    CMat m;

    Isometry3() = default;
    Isometry3(int dim, CMat entries);

    Complex at(int j, int k, int l) const { return m(j * d + k, l); }

    // Row-major d^3 copy (index (j*d + k)*d + l) for the state kernels.
    CVec flat() const;

    // Entries in flat row-major order; throws ShapeError on a length mismatch.
    static Isometry3 from_entries(int d, const CVec& entries);
};

// The seed tensor of the spin-chain preset: <jk|V|l> = 1/sqrt(2) when j, k, l
// are pairwise distinct and 0 otherwise.
Isometry3 qutrit_tensor();

struct TensorReport {
    bool isometry = false;
    bool swap_invariant = false;
    bool planar_perfect = false;
    bool rotation_invariant = false;

    bool all() const { return isometry && swap_invariant && planar_perfect && rotation_invariant; }
};

// Structural checks on V.  `planar_perfect` bends the input leg up to get a
// 3-leg tensor T and tests every one-leg-down flattening of every cyclic
// rotation of T for proportionality to an isometry (plus the trivial
// zero-legs-down case, where the condition is just T != 0).
TensorReport verify_tensor(const Isometry3& V, double tol = 1e-9);

// The ascending channel A -> V^dag (A x 1) V and the two-slot fusion variant.
CMat ascend(const Isometry3& V, const CMat& A);
CMat ascend2(const Isometry3& V, const CMat& A, const CMat& B);

using FusionTensor = std::vector<std::vector<std::vector<Complex>>>;

// Spectral data of the ascending channel together with everything the
// correlator routines consume.  Matrix systems fill d/V/mu/nu; systems built
// from diagram calculus leave those empty and provide only the scalar data.
struct AscendingSystem {
    std::vector<std::string> names;  // one label per field
    std::vector<Complex> lambda;     // eigenvalues, lambda[0] = 1
    std::vector<double> h;           // scaling dimensions -Re log2 lambda
    std::vector<Complex> vac;        // vacuum one-point expectation per field
    FusionTensor fusion;             // fusion[a][b][g], may be empty until filled

    int d = 0;                       // site dimension, 0 when not matrix-realised
    CVec V;                          // flat d^3 tensor when matrix-realised
    std::vector<CMat> mu;            // field operators
    std::vector<CMat> nu;            // duals: tr(nu[a]^dag mu[b])/d = delta_ab

    std::size_t fields() const { return lambda.size(); }
    bool has_matrix() const { return d > 0 && !V.empty(); }

    // Resolves a field label or decimal index; throws ParameterError.
    int index(const std::string& name) const;
};

// Diagonalizes the ascending channel of V.  With an explicit operator basis
// the eigen-relations are verified (DegeneracyError when an E(mu) is not
// proportional to mu within tol) and the given order is kept; without one the
// basis is computed, sorted by scaling dimension, and gauge-fixed by making
// the first nonzero entry of each mu real positive with unit Hilbert-Schmidt
// norm.  mu[0] is the identity either way.
AscendingSystem ascending_eigensystem(const Isometry3& V);
AscendingSystem ascending_eigensystem(const Isometry3& V, const std::vector<CMat>& basis,
                                      double tol = 1e-9);

// f[a][b][g] such that ascend2(V, mu[a], mu[b]) = sum_g f[a][b][g] mu[g].
FusionTensor fusion_coefficients(const AscendingSystem& sys, const Isometry3& V);

// Contracts both output legs of V with b and compares against b itself.
bool verify_blob(const Isometry3& V, const CVec& b, double tol = 1e-9);

// The four vectors solving the blob condition for the qutrit tensor.
std::vector<CVec> qutrit_blobs();

// The spin-chain preset bundled for the correlator layer: explicit operator
// basis, eigenvalues, duals, and fusion tensor.
std::vector<CMat> qutrit_basis();
AscendingSystem qutrit_system();

} // namespace tft
