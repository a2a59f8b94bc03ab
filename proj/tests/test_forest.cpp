#include <doctest.h>

#include <random>

#include "tft/error.hpp"
#include "tft/forest.hpp"

#include "util.hpp"

using namespace tft;
using tftest::all_trees;
using tftest::random_forest;
using tftest::random_tree;

TEST_CASE("tree parse and print round trip") {
    for (const char* s : {"*", "(**)", "((**)*)", "(*(**))", "(*((**)*))", "((*(**))*)"}) {
        BinaryTree t = BinaryTree::parse(s);
        CHECK(t.str() == s);
        CHECK(BinaryTree::parse(t.str()) == t);
    }
    CHECK(BinaryTree::parse("(**)").leaves() == 2);
    CHECK(BinaryTree::parse("(*((**)*))").leaves() == 4);
    CHECK_THROWS_AS(BinaryTree::parse("(*"), ParseError);
    CHECK_THROWS_AS(BinaryTree::parse("(***)"), ParseError);
    CHECK_THROWS_AS(BinaryTree::parse(""), ParseError);
    CHECK_THROWS_AS(BinaryTree::parse("** "), ParseError);
}

TEST_CASE("forest parse and domains") {
    Forest f = Forest::parse("(**) * ((**)*)");
    CHECK(f.dom() == 3);
    CHECK(f.cod() == 6);
    CHECK(f.str() == "(**) * ((**)*)");
    CHECK(Forest::identity(4).dom() == 4);
    CHECK(Forest::identity(4).cod() == 4);
    CHECK(Forest::identity(0).dom() == 0);
}

TEST_CASE("compose basics") {
    Forest caret = Forest::parse("(**)");
    Forest id2 = Forest::identity(2);
    SUBCASE("identity laws") {
        Forest f = Forest::parse("(**) *");
        CHECK(compose(id2, f) == f);
        CHECK(compose(f, Forest::identity(f.cod())) == f);
    }
    SUBCASE("grafting example") {
        Forest w2 = Forest::parse("(**) *");
        Forest r = compose(caret, w2);
        CHECK(r.str() == "((**)*)");
    }
    SUBCASE("leaf counting") {
        Forest w2 = Forest::parse("(**) (**)");
        CHECK(compose(caret, w2).cod() == 4);
    }
    SUBCASE("arity mismatch") {
        CHECK_THROWS_AS(compose(caret, Forest::parse("* * *")), CompositionError);
    }
}

TEST_CASE("tensor basics") {
    Forest caret = Forest::parse("(**)");
    CHECK(tensor(Forest(), caret) == caret);
    CHECK(tensor(caret, Forest()) == caret);
    Forest t = tensor(caret, caret);
    CHECK(t.dom() == 2);
    CHECK(t.cod() == 4);
    CHECK(tensor(Forest::identity(1), caret).str() == "* (**)");
    // associativity
    Forest a = Forest::parse("*"), b = Forest::parse("(**)"), c = Forest::parse("((**)*)");
    CHECK(tensor(tensor(a, b), c) == tensor(a, tensor(b, c)));
}

TEST_CASE("composition associativity, exhaustive small instances") {
    // every forest of dom <= 2 with <= 4 leaves, then all composable pairs on top
    std::vector<Forest> layer1;
    for (std::size_t n = 1; n <= 3; ++n)
        for (const auto& t : all_trees(n)) layer1.push_back(Forest::single(t));
    for (std::size_t n1 = 1; n1 <= 2; ++n1)
        for (std::size_t n2 = 1; n2 <= 2; ++n2)
            for (const auto& t1 : all_trees(n1))
                for (const auto& t2 : all_trees(n2))
                    layer1.push_back(Forest({t1, t2}));

    auto forests_with_dom = [&](std::size_t d, std::size_t max_cod) {
        std::vector<Forest> out;
        std::vector<std::vector<BinaryTree>> pool;
        for (std::size_t n = 1; n + d - 1 <= max_cod && n <= 3; ++n)
            for (const auto& t : all_trees(n)) pool.push_back({t});
        // build d-tuples over trees with <= 3 leaves, bounded total
        std::vector<std::size_t> idx(d, 0);
        std::vector<BinaryTree> flat;
        for (const auto& v : pool) flat.push_back(v[0]);
        std::size_t m = flat.size();
        std::vector<std::size_t> counter(d, 0);
        while (true) {
            std::vector<BinaryTree> ts;
            std::size_t cod = 0;
            for (std::size_t i = 0; i < d; ++i) {
                ts.push_back(flat[counter[i]]);
                cod += flat[counter[i]].leaves();
            }
            if (cod <= max_cod) out.push_back(Forest(ts));
            std::size_t i = 0;
            for (; i < d; ++i) {
                if (++counter[i] < m) break;
                counter[i] = 0;
            }
            if (i == d) break;
        }
        return out;
    };

    int checked = 0;
    for (const auto& w1 : layer1) {
        if (w1.cod() > 4) continue;
        for (const auto& w2 : forests_with_dom(w1.cod(), 6)) {
            Forest w12 = compose(w1, w2);
            for (const auto& w3 : forests_with_dom(w2.cod(), 8)) {
                CHECK(compose(w12, w3) == compose(w1, compose(w2, w3)));
                ++checked;
                if (checked > 20000) return; // plenty of coverage already
            }
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("right cancellation on random pairs") {
    std::mt19937 rng(12345);
    for (int iter = 0; iter < 200; ++iter) {
        Forest v = random_forest(rng, 3, 3);
        Forest w = random_forest(rng, 3, 3);
        if (v.cod() != w.cod()) continue;
        Forest b = random_forest(rng, v.cod(), 3);
        if (v == w)
            CHECK(compose(v, b) == compose(w, b));
        else
            CHECK(!(compose(v, b) == compose(w, b)));
    }
}

TEST_CASE("join examples") {
    SUBCASE("idempotent") {
        BinaryTree t = BinaryTree::parse("((**)(**))");
        Join j = join(t, t);
        CHECK(j.tree == t);
        CHECK(j.tau == Forest::identity(t.leaves()));
        CHECK(j.sigma == Forest::identity(t.leaves()));
    }
    SUBCASE("leaf is minimal") {
        BinaryTree t = BinaryTree::parse("(*(**))");
        Join j = join(BinaryTree::leaf(), t);
        CHECK(j.tree == t);
        CHECK(j.tau == Forest::single(t));
        CHECK(j.sigma == Forest::identity(3));
    }
    SUBCASE("interlocking pair") {
        Join j = join(BinaryTree::parse("((**)*)"), BinaryTree::parse("(*(**))"));
        CHECK(j.tree == BinaryTree::parse("((**)(**))"));
        CHECK(j.tau == Forest::parse("* * (**)"));
        CHECK(j.sigma == Forest::parse("(**) * *"));
    }
}

TEST_CASE("join produces the minimal common supertree") {
    std::mt19937 rng(777);
    for (int iter = 0; iter < 100; ++iter) {
        BinaryTree s = random_tree(rng, 1 + iter % 5);
        BinaryTree t = random_tree(rng, 1 + (iter / 5) % 5);
        Join j = join(s, t);
        // both complements graft back to the join
        CHECK(compose(s, j.tau) == j.tree);
        CHECK(compose(t, j.sigma) == j.tree);
        // minimality: every common supertree with at most as many leaves is the join
        for (const auto& cand : all_trees(j.tree.leaves())) {
            if (refines(s, cand, nullptr) && refines(t, cand, nullptr))
                CHECK(cand == j.tree);
        }
        // and the join refines both
        CHECK(refines(s, j.tree, nullptr));
        CHECK(refines(t, j.tree, nullptr));
    }
}

TEST_CASE("refines reports the complement") {
    BinaryTree coarse = BinaryTree::parse("(**)");
    BinaryTree fine = BinaryTree::parse("((**)(*(**)))");
    Forest comp;
    REQUIRE(refines(coarse, fine, &comp));
    CHECK(compose(coarse, comp) == fine);
    CHECK(!refines(fine, coarse, nullptr));
}

TEST_CASE("tree partition correspondence") {
    SUBCASE("single caret") {
        DyadicPartition p = tree_partition(BinaryTree::parse("(**)"));
        REQUIRE(p.points.size() == 3);
        CHECK(p.points[1] == Dyadic(1, 1));
    }
    SUBCASE("four leaf example") {
        DyadicPartition p = tree_partition(BinaryTree::parse("((*(**))*)"));
        REQUIRE(p.points.size() == 5);
        CHECK(p.points[1] == Dyadic(1, 2));
        CHECK(p.points[2] == Dyadic(3, 3));
        CHECK(p.points[3] == Dyadic(1, 1));
    }
    SUBCASE("round trip, exhaustive over small trees") {
        for (std::size_t n = 1; n <= 8; ++n)
            for (const auto& t : all_trees(n))
                CHECK(partition_tree(tree_partition(t)) == t);
    }
    SUBCASE("non-standard partition rejected") {
        CHECK_THROWS_AS(
            partition_tree(DyadicPartition({Dyadic(0, 0), Dyadic(1, 2), Dyadic(1, 0)})),
            PartitionError); // {0, 1/4, 1}: [1/4,1] is not standard
    }
}

TEST_CASE("forest rotation") {
    Forest w = Forest::parse("(**) * ((**)*)");
    CHECK(rotate_forest(w, 0) == w);
    CHECK(rotate_forest(w, 1).str() == "* ((**)*) (**)");
    CHECK(rotate_forest(w, 3) == w);
    CHECK(rotate_forest(rotate_forest(w, 2), 1) == w);
    CHECK(rotate_forest(w, -1) == rotate_forest(w, 2));
}

TEST_CASE("leaf tracking under rotation") {
    Forest w = Forest::parse("(**) * ((**)*)");
    // shift by 1: trees become [*, ((**)*), (**)]
    CHECK(leaf_index_after_rotation(w, 0, 1) == 4); // first leaf of (**) now last tree
    CHECK(leaf_index_after_rotation(w, 2, 1) == 0); // the lone leaf moves to front
    CHECK(leaf_index_after_rotation(w, 3, 1) == 1);
    CHECK(leaf_index_after_rotation(w, 0, 0) == 0);
    CHECK_THROWS_AS(leaf_index_after_rotation(w, 9, 1), ForestError);
}

namespace {

AnnularForest ann(const std::string& trees, int rot) {
    AnnularForest a;
    a.forest = Forest::parse(trees);
    a.rotation = rot;
    return a;
}

AnnularForest random_annular(std::mt19937& rng, std::size_t dom, std::size_t extra) {
    AnnularForest a;
    a.forest = random_forest(rng, dom, extra);
    std::uniform_int_distribution<int> r(0, static_cast<int>(a.forest.cod()) - 1);
    a.rotation = r(rng);
    return a;
}

} // namespace

TEST_CASE("annular composition identities") {
    AnnularForest a = ann("(**) (*(**))", 3); // 2 -> 5
    AnnularForest idl = ann("* *", 0);
    AnnularForest idr = ann("* * * * *", 0);
    AnnularForest l = compose(idl, a);
    CHECK(l.forest == a.forest);
    CHECK(l.rotation == a.rotation);
    AnnularForest r = compose(a, idr);
    CHECK(r.forest == a.forest);
    CHECK(r.rotation == a.rotation);
    CHECK_THROWS_AS(compose(a, idl), CompositionError);
}

TEST_CASE("annular composition carries leaf labels through") {
    // The circle label of every leaf of a composite must equal the label the
    // second factor assigns to that same leaf on its own.
    std::mt19937 rng(4242);
    for (int iter = 0; iter < 300; ++iter) {
        AnnularForest a = random_annular(rng, 1 + iter % 3, 3);
        AnnularForest b = random_annular(rng, a.cod(), 3);
        AnnularForest c = compose(a, b);
        REQUIRE(c.dom() == a.dom());
        REQUIRE(c.cod() == b.cod());

        std::size_t n = a.cod(), p = b.cod();
        // prefix leaf counts of b's trees
        std::vector<std::size_t> pre(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i) pre[i + 1] = pre[i] + b.forest.trees[i].leaves();
        std::size_t flat = 0; // flat leaf index in the composite
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t bt = (j + static_cast<std::size_t>(a.rotation)) % n;
            for (std::size_t o = 0; o < b.forest.trees[bt].leaves(); ++o, ++flat) {
                std::size_t via_c = (flat + static_cast<std::size_t>(c.rotation)) % p;
                std::size_t via_b = (pre[bt] + o + static_cast<std::size_t>(b.rotation)) % p;
                CHECK(via_c == via_b);
            }
        }
        CHECK(flat == c.cod());
    }
}

TEST_CASE("annular composition is associative") {
    std::mt19937 rng(999);
    for (int iter = 0; iter < 200; ++iter) {
        AnnularForest a = random_annular(rng, 1 + iter % 2, 2);
        AnnularForest b = random_annular(rng, a.cod(), 2);
        AnnularForest c = random_annular(rng, b.cod(), 2);
        AnnularForest lhs = compose(compose(a, b), c);
        AnnularForest rhs = compose(a, compose(b, c));
        CHECK(lhs.forest == rhs.forest);
        CHECK(lhs.rotation == rhs.rotation);
    }
}
