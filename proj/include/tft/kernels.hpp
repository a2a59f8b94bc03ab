#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace tft {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;

// Dense state vectors over n legs of local dimension d are stored row-major
// with leg 0 as the most significant digit: index = sum_i x_i d^(n-1-i).

// d^n with an overflow guard; throws ShapeError when the result would not
// fit in a size_t or exceeds 2^40 entries.
std::size_t pow_size(int d, int n);

// Global switch between the OpenMP kernels and the serial reference ones.
// The *_serial functions below are always available for cross-checking.
enum class ExecPolicy { serial, parallel };
ExecPolicy exec_policy();
void set_exec_policy(ExecPolicy p);

// Splits one leg into two: leg `pos` of `legs` total is replaced by a pair
// of legs fed through the d^2-by-d matrix V (row (j*d + k), column l).
// Input length d^legs, output length d^(legs+1).
CVec apply_caret(const CVec& in, int legs, int pos, int d, const CVec& V);
CVec apply_caret_serial(const CVec& in, int legs, int pos, int d, const CVec& V);

// One-site operator: M is d-by-d row-major, applied on leg `pos`.
CVec apply_site(const CVec& in, int legs, int pos, int d, const CVec& M);
CVec apply_site_serial(const CVec& in, int legs, int pos, int d, const CVec& M);

// Cyclic relabeling of legs: the amplitude carried by input leg i moves to
// output leg (i + shift) mod legs.
CVec cyclic_relabel(const CVec& in, int legs, int d, int shift);
CVec cyclic_relabel_serial(const CVec& in, int legs, int d, int shift);

// Hermitian inner product, conjugate-linear in the first argument.
Complex inner(const CVec& a, const CVec& b);
Complex inner_serial(const CVec& a, const CVec& b);

double norm(const CVec& a);

} // namespace tft
