#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tft/dyadic.hpp"

namespace tft {

// Immutable rooted binary tree.  A leaf is a node with no children; every
// internal node has exactly two.  Shared subtrees are fine (structure is
// never mutated in place).
class BinaryTree {
public:
    struct Node {
        std::shared_ptr<const Node> left, right; // both null for a leaf
    };
    using NodePtr = std::shared_ptr<const Node>;

    BinaryTree(); // single leaf
    static BinaryTree leaf();
    static BinaryTree caret(const BinaryTree& l, const BinaryTree& r);

    const NodePtr& root() const { return root_; }
    bool is_leaf() const { return !root_->left; }
    BinaryTree left() const;
    BinaryTree right() const;

    std::size_t leaves() const;
    int depth() const;

    bool operator==(const BinaryTree& o) const;

    // Text grammar:  T ::= "*" | "(" T T ")"
    std::string str() const;
    static BinaryTree parse(const std::string& text);

    // Leaf depths left to right.
    std::vector<int> leaf_depths() const;

private:
    explicit BinaryTree(NodePtr r) : root_(std::move(r)) {}
    NodePtr root_;
};

// A forest is an ordered list of trees: a morphism with dom = number of
// roots and cod = total number of leaves.  Composition grafts the trees of
// the second argument onto the leaves of the first.
struct Forest {
    std::vector<BinaryTree> trees;

    Forest() = default;
    explicit Forest(std::vector<BinaryTree> ts) : trees(std::move(ts)) {}
    static Forest identity(std::size_t n);
    static Forest single(const BinaryTree& t) { return Forest({t}); }

    std::size_t dom() const { return trees.size(); }
    std::size_t cod() const;

    bool operator==(const Forest& o) const = default;

    std::string str() const; // whitespace-separated trees
    static Forest parse(const std::string& text);
};

// compose(w1, w2): graft the i-th tree of w2 onto the i-th leaf of w1.
// Requires cod(w1) == dom(w2); the result has dom(w1) roots and cod(w2) leaves.
Forest compose(const Forest& w1, const Forest& w2);
BinaryTree compose(const BinaryTree& t, const Forest& w);

// Monoidal product: juxtaposition.
Forest tensor(const Forest& a, const Forest& b);

// Smallest common refinement s ∨ t together with the complementary forests:
// compose(s, tau) == join == compose(t, sigma).
struct Join {
    BinaryTree tree;
    Forest tau;   // grafted onto the leaves of s
    Forest sigma; // grafted onto the leaves of t
};
Join join(const BinaryTree& s, const BinaryTree& t);

// True if `fine` refines `coarse`; when it does, *complement (if non-null)
// receives the forest p with compose(coarse, p) == fine.
bool refines(const BinaryTree& coarse, const BinaryTree& fine, Forest* complement);

// Standard dyadic partition of [0,1] read off a tree (carets bisect), and its
// inverse.  partition_tree throws PartitionError if the partition is not
// standard dyadic.
DyadicPartition tree_partition(const BinaryTree& t);
BinaryTree partition_tree(const DyadicPartition& p);

// Annular forest: a forest together with a cyclic relabeling of its leaves.
// Flat leaf j of the forest sits at circle position (j + rotation) mod cod.
struct AnnularForest {
    Forest forest;
    int rotation = 0; // taken mod cod

    std::size_t dom() const { return forest.dom(); }
    std::size_t cod() const { return forest.cod(); }
};

// Cyclic shift of the tree list: [k]w = (w_k, w_{k+1}, ..., w_{k-1}).
Forest rotate_forest(const Forest& w, int k);

// New flat index of the l-th leaf of w after the trees are shifted by k.
int leaf_index_after_rotation(const Forest& w, int l, int k);

AnnularForest compose(const AnnularForest& a, const AnnularForest& b);

} // namespace tft
