#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "tft/dyadic.hpp"
#include "tft/thompson.hpp"

namespace tft {

// Strictly interior dyadic point of (p, q): the first point of the coarsest
// power-of-two mesh that is finer than the gap.
Dyadic dyadic_between(const Rational& p, const Rational& q);

// Piecewise-linear bijection [p.first, q.first] -> [p.second, q.second] with
// dyadic breakpoints and power-of-two slopes.  Both sides start as uniform
// meshes; the side with fewer intervals is refined by left-to-right halving
// sweeps until the counts agree.  kx / ky optionally prescribe (possibly
// unreduced) mesh exponents for the side lengths; -1 means normalized.
std::vector<std::pair<Dyadic, Dyadic>> dyadic_interpolation(
    const std::pair<Dyadic, Dyadic>& p, const std::pair<Dyadic, Dyadic>& q, int kx = -1,
    int ky = -1);

enum class ApproxMode { interval, circle };

// Approximates an orientation-preserving C^1 bijection by a group element to
// sup-distance below eps.  `f` evaluates the map on [0,1]; in circle mode it
// must be the lift (f(1) = f(0) + 1).  S is an upper bound on the derivative;
// pass S <= 0 to have it estimated from a fine difference grid.
GroupElement approximate(const std::function<double(double)>& f, double S, double eps,
                         ApproxMode mode);

// Sup of |fprime(x) - g'(x)| over a grid avoiding the breakpoints of g.
double derivative_distance(const std::function<double(double)>& fprime, const GroupElement& g,
                           int samples_per_segment = 64);

} // namespace tft
