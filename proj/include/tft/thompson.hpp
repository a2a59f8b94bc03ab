#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tft/dyadic.hpp"
#include "tft/forest.hpp"

namespace tft {

// Element of Thompson's group T (or F when rot == 0), stored as a reduced
// fraction of binary trees with a leaf relabeling: interval i of the
// denominator partition is sent linearly onto interval (i + rot) mod n of the
// numerator partition.
struct GroupElement {
    BinaryTree num;
    BinaryTree den;
    int rot = 0;

    std::size_t leaves() const { return num.leaves(); }
    bool is_identity() const { return num.is_leaf() && den.is_leaf(); }
    bool in_f() const { return rot == 0; }

    bool operator==(const GroupElement& o) const {
        return rot == o.rot && num == o.num && den == o.den;
    }
    bool operator!=(const GroupElement& o) const { return !(*this == o); }

    std::string str() const; // "num/den@rot"
};

// Canonical representative: removes every opposing caret pair (leftmost
// first; the normal form is unique regardless of order).  Throws
// ElementError on a leaf-count mismatch.
GroupElement reduce(const BinaryTree& num, const BinaryTree& den, int rot);

GroupElement identity_element();

// Group product "a then b": as maps, first apply a, then b.
GroupElement multiply(const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupElement& a);

enum class Gen { A, B, C };
GroupElement generator(Gen g);
GroupElement generator(char name); // 'A', 'B' or 'C'

// Refinements that leave the element unchanged as a map.  The returned pair
// is *not* reduced; these exist so tests and the limit-state machinery can
// work with a prescribed denominator or numerator tree.
//   extended_num: grafts f onto the numerator (and the rotated copy of f
//                 onto the denominator);
//   extended_den: grafts h onto the denominator.
GroupElement extended_num(const GroupElement& a, const Forest& f);
GroupElement extended_den(const GroupElement& a, const Forest& h);

// Piecewise-linear map of [0,1] with dyadic breakpoints and power-of-two
// slopes.  Circle maps (circle == true) store the y column as a lift:
// y_0 in [0,1), strictly increasing, y_n = y_0 + 1; evaluation reduces
// mod 1.  Interval maps fix 0 and 1.
struct PLMap {
    bool circle = false;
    std::vector<std::pair<Dyadic, Dyadic>> points;

    // Checks the breakpoint/slope conditions; throws NotInGroupError.
    void validate() const;

    // Exact evaluation at x in [0,1]; circle maps return the value mod 1.
    Rational operator()(const Rational& x) const;
    double eval(double x) const;

    // Lift value at x (no mod-1 reduction); exact, dyadic in = dyadic out.
    Dyadic lift(const Dyadic& x) const;

    std::string str() const;
};

PLMap element_to_pl(const GroupElement& a);

// Inverse of element_to_pl: recovers the reduced tree pair by recursive
// bisection.  Throws NotInGroupError if the map is not a valid element.
GroupElement pl_to_element(const PLMap& f);

// Coarsest refinement P' of P such that a is linear on every interval of P'
// and maps each one onto a standard dyadic interval.
DyadicPartition good_refinement(const GroupElement& a, const DyadicPartition& P);

} // namespace tft
