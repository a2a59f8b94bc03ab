#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tft/dyadic.hpp"
#include "tft/forest.hpp"
#include "tft/semicont.hpp"
#include "tft/tensorlab.hpp"
#include "tft/thompson.hpp"

namespace tft {

// A point of [0, 1) as a finite binary expansion.  Trailing zeros never
// matter for equality; levels only pad or drop zeros.
struct DyadicPoint {
    std::vector<int> digits; // digits after the binary point, most significant first

    static DyadicPoint parse(const std::string& text); // "0.01101" (leading "0." optional)
    static DyadicPoint from_dyadic(const Dyadic& x);   // requires 0 <= x < 1

    Dyadic value() const;
    int level() const { return static_cast<int>(digits.size()); }

    DyadicPoint at_level(int l) const; // pad with zeros; DyadicError if a 1 would be cut
    DyadicPoint coarsen(int steps) const; // drop the last `steps` digits

    bool operator==(const DyadicPoint& o) const;
};

// Bitwise difference y (-) x together with the coarse-graining distance,
// computed both by the digit recursion and by the closed form
// level + 1 + floor(log2(y (-) x)).  The two always agree.
struct TreeMetric {
    Dyadic diff;
    int dt_recursive = 0;
    int dt_closed = 0;
};
TreeMetric xor_and_tree_metric(const DyadicPoint& x, const DyadicPoint& y, int level);

// Largest power of two not exceeding y (-) x: the distance that controls the
// two-point function.  For a standard dyadic pair it equals y - x.
Dyadic coarse_distance(const Dyadic& x, const Dyadic& y);

// Coarsest standard dyadic partition holding at most one of the points per
// interval.  Points must be strictly increasing within [0, 1); violations
// (including duplicates) raise SupportError.
DyadicPartition minimal_supporting_partition(const std::vector<Rational>& points);

// One field insertion: a sample point and the eigenfield index.
struct FieldInsertion {
    Rational position;
    int alpha = 0;
};

// Dense matrix of the discretized field of type alpha at z on the context of
// the partition P: lambda_alpha^{log2 |I|} mu^alpha on the leg of the
// interval I containing z.
CMat discrete_field(const DyadicPartition& P, const Rational& z, int alpha,
                    const AscendingSystem& sys);

// Dense matrix of the field smeared against a matrix-valued profile f:
// sum over alpha and intervals I of fbar_alpha(I) lambda_alpha^{log2 |I|}
// mu_I^alpha where fbar_alpha(I) = (1/d) int_I tr(nu_alpha^dag f(x)) dx,
// integrated by composite Simpson with 64 subintervals per interval.
CMat smeared_field(const DyadicPartition& P, const std::function<CMat(double)>& f,
                   const AscendingSystem& sys);

// n-point function of discretized eigenfields.  The expectation is taken in
// the tree vacuum with the top edge traced out (an average over basis
// vectors fed into the top), optionally transported by a group element
// first.  Points may come in any order but must be distinct.  The optional
// refinement joins an extra tree into the evaluation context; by the
// ascending-eigenvector property the value does not depend on it.
Complex npoint(const std::vector<Rational>& points, const std::vector<int>& alphas,
               const AscendingSystem& sys,
               const std::optional<GroupElement>& state = std::nullopt,
               const std::optional<BinaryTree>& refinement = std::nullopt);

// Closed form of the two-point function for dyadic x < y: with D the
// coarse-graining distance, sum over gamma of
//   f^{ab}_g <mu^g> lambda_g^{-1} D^{log2 la + log2 lb - log2 lg},
// arranged so only integer powers of the eigenvalues arise.
Complex two_point_closed_form(const Dyadic& x, const Dyadic& y, int alpha, int beta,
                              const AscendingSystem& sys);

struct OpeRow {
    int alpha = 0;
    int beta = 0;
    int gamma = 0;
    Complex coeff;
    double exponent = 0.0; // h_gamma - h_alpha - h_beta
};

struct OpeTable {
    std::vector<OpeRow> rows;                     // entries with |coeff| > tol
    std::vector<Eigen::MatrixXi> fusion_matrices; // [N^alpha]_{beta gamma} indicators
};

OpeTable ope_table(const AscendingSystem& sys, double tol = 1e-9);

// Exact contraction of the level-m regular binary tree (2^m leaves) with
// operators inserted at leaves: the oracle every formula above is checked
// against.  leaf_ops entries are (leaf index, d-by-d matrix); they are
// applied to the ket in list order.
Complex brute_force_npoint(const Isometry3& V, int m,
                           const std::vector<std::pair<int, CMat>>& leaf_ops);

// |C(x) - prod_j lambda_{alpha_j}^{-s_j} C_{|f>}(f(x_j))| where s_j is the
// log2 slope of f at x_j (right derivative at breakpoints) and C_{|f>} is the
// correlator in the transformed vacuum.
double covariance_residual(const GroupElement& f, const std::vector<Rational>& points,
                           const std::vector<int>& alphas, const AscendingSystem& sys);

} // namespace tft
