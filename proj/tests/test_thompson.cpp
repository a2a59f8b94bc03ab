#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <random>
#include <string>
#include <vector>

#include "tft/error.hpp"
#include "tft/thompson.hpp"

#include "util.hpp"

using namespace tft;
using tftest::all_trees;
using tftest::random_forest;

namespace {

GroupElement word(const std::string& letters) {
    GroupElement g = identity_element();
    for (char c : letters) {
        bool inv = std::isupper(c) == 0; // lower case means inverse here
        char name = static_cast<char>(std::toupper(c));
        GroupElement h = generator(name);
        g = multiply(g, inv ? inverse(h) : h);
    }
    return g;
}

GroupElement random_word(std::mt19937& rng, int len) {
    static const char* alphabet = "ABCabc";
    std::uniform_int_distribution<int> pick(0, 5);
    std::string w;
    for (int i = 0; i < len; ++i) w += alphabet[pick(rng)];
    return word(w);
}

// exact equality of the underlying circle/interval maps on a dyadic grid
bool same_map(const PLMap& f, const PLMap& g, int grid_log2 = 8) {
    std::int64_t n = std::int64_t(1) << grid_log2;
    for (std::int64_t i = 0; i <= n; ++i) {
        Rational x(i, n);
        Rational a = f(x), b = g(x);
        if (a == b) continue;
        // interval maps evaluate 1 at 1 where a circle map gives 0
        Rational one(1, 1);
        if ((a == one && b == Rational(0, 1)) || (b == one && a == Rational(0, 1))) continue;
        return false;
    }
    return true;
}

} // namespace

TEST_CASE("generator tree pairs and rotations") {
    GroupElement A = generator('A'), B = generator('B'), C = generator('C');
    CHECK(A.num.str() == "((**)*)");
    CHECK(A.den.str() == "(*(**))");
    CHECK(A.rot == 0);
    CHECK(A.in_f());
    CHECK(B.num.str() == "(*((**)*))");
    CHECK(B.den.str() == "(*(*(**)))");
    CHECK(B.rot == 0);
    CHECK(C.num.str() == "(*(**))");
    CHECK(C.den.str() == "(*(**))");
    CHECK(C.rot == 2);
    CHECK(!C.in_f());
    CHECK_THROWS_AS(generator('D'), ParameterError);
}

TEST_CASE("generator piecewise-linear data") {
    PLMap fA = element_to_pl(generator('A'));
    REQUIRE(fA.points.size() == 4);
    CHECK(!fA.circle);
    CHECK(fA.points[1] == std::make_pair(Dyadic(1, 1), Dyadic(1, 2)));
    CHECK(fA.points[2] == std::make_pair(Dyadic(3, 2), Dyadic(1, 1)));
    CHECK(fA(Rational(1, 2)) == Rational(1, 4));

    PLMap fB = element_to_pl(generator('B'));
    CHECK(fB(Rational(1, 4)) == Rational(1, 4));
    CHECK(fB(Rational(1, 2)) == Rational(1, 2));
    CHECK(fB(Rational(3, 4)) == Rational(5, 8));
    CHECK(fB(Rational(7, 8)) == Rational(3, 4));

    PLMap fC = element_to_pl(generator('C'));
    CHECK(fC.circle);
    CHECK(fC(Rational(0, 1)) == Rational(3, 4));
    CHECK(fC(Rational(1, 2)) == Rational(0, 1));
    CHECK(fC(Rational(3, 4)) == Rational(1, 2));
    CHECK(fC(Rational(1, 4)) == Rational(7, 8));
}

TEST_CASE("reduce collapses equal trees") {
    for (std::size_t n = 1; n <= 6; ++n)
        for (const auto& t : all_trees(n)) {
            GroupElement g = reduce(t, t, 0);
            CHECK(g.is_identity());
        }
}

TEST_CASE("reduce removes an added caret from the first generator") {
    GroupElement A = generator('A');
    // graft one extra caret onto every possible leaf in turn
    for (std::size_t at = 0; at < 3; ++at) {
        std::vector<BinaryTree> ts(3, BinaryTree::leaf());
        ts[at] = BinaryTree::parse("(**)");
        GroupElement ext = extended_num(A, Forest(ts));
        CHECK(ext.num.leaves() == 4);
        GroupElement back = reduce(ext.num, ext.den, ext.rot);
        CHECK(back == A);
    }
}

TEST_CASE("reduce is idempotent on random tree pairs") {
    std::mt19937 rng(2024);
    for (int iter = 0; iter < 1000; ++iter) {
        std::size_t n = 2 + iter % 7;
        BinaryTree num = tftest::random_tree(rng, n);
        BinaryTree den = tftest::random_tree(rng, n);
        std::uniform_int_distribution<int> rr(0, static_cast<int>(n) - 1);
        GroupElement g = reduce(num, den, rr(rng));
        GroupElement h = reduce(g.num, g.den, g.rot);
        CHECK(g == h);
    }
}

TEST_CASE("reduce rejects mismatched trees") {
    CHECK_THROWS_AS(reduce(BinaryTree::parse("(**)"), BinaryTree::leaf(), 0), ElementError);
}

TEST_CASE("torus relations of the circle generators") {
    GroupElement C = generator('C');
    CHECK(multiply(C, multiply(C, C)).is_identity());
    GroupElement CA = multiply(C, generator('A'));
    CHECK(multiply(CA, CA).is_identity());
    CHECK(!multiply(C, C).is_identity());
}

TEST_CASE("interval group commutator relations") {
    // with products read left to right, conjugating by the inverse of the
    // first generator shifts the second one's support to the right half
    GroupElement A = generator('A'), B = generator('B');
    auto conj_by = [](const GroupElement& g, const GroupElement& h) {
        return multiply(multiply(inverse(h), g), h);
    };
    auto commutator = [](const GroupElement& u, const GroupElement& v) {
        return multiply(multiply(u, v), multiply(inverse(u), inverse(v)));
    };
    GroupElement u = multiply(inverse(A), B);
    GroupElement x2 = conj_by(B, inverse(A));
    GroupElement x3 = conj_by(x2, inverse(A));
    CHECK(commutator(u, x2).is_identity());
    CHECK(commutator(u, x3).is_identity());
    CHECK(!commutator(A, B).is_identity());
    // x2 really lives on the upper quarter
    PLMap f = element_to_pl(x2);
    CHECK(f(Rational(3, 10)) == Rational(3, 10));
    CHECK(f(Rational(7, 10)) == Rational(7, 10));
    CHECK(!(f(Rational(4, 5)) == Rational(4, 5)));
}

TEST_CASE("group axioms on random words") {
    std::mt19937 rng(31337);
    for (int iter = 0; iter < 60; ++iter) {
        GroupElement a = random_word(rng, 1 + iter % 5);
        GroupElement b = random_word(rng, 1 + (iter + 2) % 5);
        GroupElement c = random_word(rng, 1 + (iter + 4) % 5);
        CHECK(multiply(multiply(a, b), c) == multiply(a, multiply(b, c)));
        CHECK(multiply(a, identity_element()) == a);
        CHECK(multiply(identity_element(), a) == a);
        CHECK(multiply(a, inverse(a)).is_identity());
        CHECK(inverse(inverse(a)) == a);
    }
}

TEST_CASE("products agree with composed piecewise-linear maps") {
    std::mt19937 rng(555);
    for (int iter = 0; iter < 40; ++iter) {
        GroupElement a = random_word(rng, 1 + iter % 6);
        GroupElement b = random_word(rng, 1 + (iter + 3) % 6);
        PLMap fa = element_to_pl(a), fb = element_to_pl(b), fc = element_to_pl(multiply(a, b));
        std::int64_t n = 1 << 12;
        for (std::int64_t i = 0; i <= n; ++i) {
            Rational x(i, n);
            Rational via_c = fc(x);
            Rational via_ab = fb(fa(x));
            if (!(via_c == via_ab)) {
                // identify 1 with 0 on the circle
                Rational one(1, 1);
                bool wrap = (via_c == one && via_ab == Rational(0, 1)) ||
                            (via_ab == one && via_c == Rational(0, 1));
                CHECK(wrap);
            }
        }
    }
}

TEST_CASE("inverse inverts the map pointwise") {
    std::mt19937 rng(808);
    for (int iter = 0; iter < 25; ++iter) {
        GroupElement a = random_word(rng, 1 + iter % 6);
        PLMap f = element_to_pl(a), g = element_to_pl(inverse(a));
        for (int i = 0; i <= 1000; ++i) {
            Rational x(i, 1000);
            Rational y = g(f(x));
            if (!(y == x)) {
                bool wrap = (x == Rational(1, 1) && y == Rational(0, 1));
                CHECK(wrap);
            }
        }
    }
}

TEST_CASE("identity element maps to the identity map") {
    PLMap f = element_to_pl(identity_element());
    REQUIRE(f.points.size() == 2);
    CHECK(f.points[0] == std::make_pair(Dyadic(0, 0), Dyadic(0, 0)));
    CHECK(f.points[1] == std::make_pair(Dyadic(1, 0), Dyadic(1, 0)));
    CHECK(!f.circle);
}

TEST_CASE("round trip through piecewise-linear form") {
    std::mt19937 rng(90210);
    for (int iter = 0; iter < 60; ++iter) {
        GroupElement a = random_word(rng, 1 + iter % 8);
        GroupElement back = pl_to_element(element_to_pl(a));
        CHECK(back == a);
    }
    CHECK(pl_to_element(element_to_pl(identity_element())).is_identity());
}

TEST_CASE("piecewise-linear validation") {
    PLMap slope3;
    slope3.points = {{Dyadic(0, 0), Dyadic(0, 0)},
                     {Dyadic(1, 2), Dyadic(3, 2)},
                     {Dyadic(1, 0), Dyadic(1, 0)}};
    CHECK_THROWS_AS(slope3.validate(), NotInGroupError);
    CHECK_THROWS_AS(pl_to_element(slope3), NotInGroupError);

    PLMap not_monotone;
    not_monotone.points = {{Dyadic(0, 0), Dyadic(0, 0)},
                           {Dyadic(1, 1), Dyadic(3, 2)},
                           {Dyadic(1, 0), Dyadic(1, 0)}};
    CHECK_THROWS_AS(not_monotone.validate(), NotInGroupError);

    PLMap bad_ends;
    bad_ends.points = {{Dyadic(0, 0), Dyadic(0, 0)}, {Dyadic(1, 0), Dyadic(1, 1)}};
    CHECK_THROWS_AS(bad_ends.validate(), NotInGroupError);

    // a valid circle lift passes
    PLMap c = element_to_pl(generator('C'));
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("refinements leave the element unchanged") {
    std::mt19937 rng(181818);
    for (int iter = 0; iter < 80; ++iter) {
        GroupElement g = random_word(rng, 1 + iter % 5);
        Forest f = random_forest(rng, g.leaves(), 3);
        GroupElement up = extended_num(g, f);
        CHECK(up.leaves() == f.cod());
        CHECK(reduce(up.num, up.den, up.rot) == g);
        CHECK(same_map(element_to_pl(up), element_to_pl(g)));

        Forest h = random_forest(rng, g.leaves(), 3);
        GroupElement dn = extended_den(g, h);
        CHECK(reduce(dn.num, dn.den, dn.rot) == g);
        CHECK(same_map(element_to_pl(dn), element_to_pl(g)));
    }
}

TEST_CASE("good refinement") {
    DyadicPartition base({Dyadic(0, 0), Dyadic(1, 1), Dyadic(1, 0)});
    SUBCASE("identity keeps the partition") {
        DyadicPartition r = good_refinement(identity_element(), base);
        CHECK(r.points == base.points);
    }
    SUBCASE("first generator needs one extra cut") {
        DyadicPartition r = good_refinement(generator('A'), base);
        REQUIRE(r.points.size() == 4);
        CHECK(r.points[1] == Dyadic(1, 1));
        CHECK(r.points[2] == Dyadic(3, 2));
    }
    SUBCASE("each refined interval maps onto a standard interval") {
        std::mt19937 rng(6502);
        for (int iter = 0; iter < 30; ++iter) {
            GroupElement g = random_word(rng, 1 + iter % 6);
            DyadicPartition r = good_refinement(g, base);
            PLMap f = element_to_pl(g);
            for (std::size_t i = 0; i + 1 < r.points.size(); ++i) {
                Dyadic ya = f.lift(r.points[i]);
                Dyadic yb = f.lift(r.points[i + 1]);
                Dyadic len = yb - ya;
                CHECK(len.m == 1);
                CHECK(ya.k <= len.k);
            }
            // refinement really contains the base points
            for (const Dyadic& p : base.points)
                CHECK(std::find(r.points.begin(), r.points.end(), p) != r.points.end());
        }
    }
}
