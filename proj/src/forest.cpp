#include "tft/forest.hpp"

#include <functional>
#include <sstream>

namespace tft {

namespace {
const BinaryTree::NodePtr& leaf_node() {
    static const BinaryTree::NodePtr n = std::make_shared<BinaryTree::Node>();
    return n;
}
} // namespace

BinaryTree::BinaryTree() : root_(leaf_node()) {}

BinaryTree BinaryTree::leaf() { return BinaryTree(); }

BinaryTree BinaryTree::caret(const BinaryTree& l, const BinaryTree& r) {
    auto n = std::make_shared<Node>();
    n->left = l.root_;
    n->right = r.root_;
    return BinaryTree(n);
}

BinaryTree BinaryTree::left() const {
    if (is_leaf()) throw ForestError("leaf has no children");
    return BinaryTree(root_->left);
}

BinaryTree BinaryTree::right() const {
    if (is_leaf()) throw ForestError("leaf has no children");
    return BinaryTree(root_->right);
}

std::size_t BinaryTree::leaves() const {
    std::function<std::size_t(const NodePtr&)> go = [&](const NodePtr& n) -> std::size_t {
        return n->left ? go(n->left) + go(n->right) : 1;
    };
    return go(root_);
}

int BinaryTree::depth() const {
    std::function<int(const NodePtr&)> go = [&](const NodePtr& n) -> int {
        return n->left ? 1 + std::max(go(n->left), go(n->right)) : 0;
    };
    return go(root_);
}

bool BinaryTree::operator==(const BinaryTree& o) const {
    std::function<bool(const NodePtr&, const NodePtr&)> eq = [&](const NodePtr& a,
                                                                 const NodePtr& b) -> bool {
        if (a == b) return true;
        if (!a->left != !b->left) return false;
        if (!a->left) return true;
        return eq(a->left, b->left) && eq(a->right, b->right);
    };
    return eq(root_, o.root_);
}

std::string BinaryTree::str() const {
    std::string out;
    std::function<void(const NodePtr&)> go = [&](const NodePtr& n) {
        if (!n->left) {
            out += '*';
            return;
        }
        out += '(';
        go(n->left);
        go(n->right);
        out += ')';
    };
    go(root_);
    return out;
}

namespace {

BinaryTree parse_tree_at(const std::string& s, std::size_t& i) {
    if (i >= s.size()) throw ParseError("unexpected end of tree text");
    char c = s[i];
    if (c == '*') {
        ++i;
        return BinaryTree::leaf();
    }
    if (c == '(') {
        ++i;
        BinaryTree l = parse_tree_at(s, i);
        BinaryTree r = parse_tree_at(s, i);
        if (i >= s.size() || s[i] != ')')
            throw ParseError("expected ')' in tree text at position " + std::to_string(i));
        ++i;
        return BinaryTree::caret(l, r);
    }
    throw ParseError(std::string("unexpected character '") + c + "' in tree text");
}

} // namespace

BinaryTree BinaryTree::parse(const std::string& text) {
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    BinaryTree t = parse_tree_at(text, i);
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i != text.size()) throw ParseError("trailing characters in tree text: " + text.substr(i));
    return t;
}

std::vector<int> BinaryTree::leaf_depths() const {
    std::vector<int> out;
    std::function<void(const NodePtr&, int)> go = [&](const NodePtr& n, int d) {
        if (!n->left) {
            out.push_back(d);
            return;
        }
        go(n->left, d + 1);
        go(n->right, d + 1);
    };
    go(root_, 0);
    return out;
}

Forest Forest::identity(std::size_t n) {
    return Forest(std::vector<BinaryTree>(n, BinaryTree::leaf()));
}

std::size_t Forest::cod() const {
    std::size_t n = 0;
    for (const auto& t : trees) n += t.leaves();
    return n;
}

std::string Forest::str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < trees.size(); ++i) {
        if (i) os << ' ';
        os << trees[i].str();
    }
    return os.str();
}

Forest Forest::parse(const std::string& text) {
    std::vector<BinaryTree> ts;
    std::size_t i = 0;
    while (true) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= text.size()) break;
        ts.push_back(parse_tree_at(text, i));
    }
    if (ts.empty()) throw ParseError("empty forest text");
    return Forest(std::move(ts));
}

namespace {

// Graft trees from `it` onto the leaves of `t`, consuming one per leaf.
BinaryTree graft(const BinaryTree& t, std::vector<BinaryTree>::const_iterator& it) {
    if (t.is_leaf()) return *it++;
    BinaryTree l = graft(t.left(), it);
    BinaryTree r = graft(t.right(), it);
    return BinaryTree::caret(l, r);
}

} // namespace

Forest compose(const Forest& w1, const Forest& w2) {
    if (w1.cod() != w2.dom())
        throw CompositionError("cod(w1) = " + std::to_string(w1.cod()) + " but dom(w2) = " +
                               std::to_string(w2.dom()));
    auto it = w2.trees.cbegin();
    std::vector<BinaryTree> out;
    out.reserve(w1.trees.size());
    for (const auto& t : w1.trees) out.push_back(graft(t, it));
    return Forest(std::move(out));
}

BinaryTree compose(const BinaryTree& t, const Forest& w) {
    return compose(Forest::single(t), w).trees.at(0);
}

Forest tensor(const Forest& a, const Forest& b) {
    std::vector<BinaryTree> ts = a.trees;
    ts.insert(ts.end(), b.trees.begin(), b.trees.end());
    return Forest(std::move(ts));
}

namespace {

// Smallest common supertree; fills the complements leaf by leaf.
BinaryTree join_rec(const BinaryTree& s, const BinaryTree& t, std::vector<BinaryTree>& tau,
                    std::vector<BinaryTree>& sigma) {
    if (s.is_leaf()) {
        tau.push_back(t);
        for (std::size_t i = 0; i < t.leaves(); ++i) sigma.push_back(BinaryTree::leaf());
        return t;
    }
    if (t.is_leaf()) {
        sigma.push_back(s);
        for (std::size_t i = 0; i < s.leaves(); ++i) tau.push_back(BinaryTree::leaf());
        return s;
    }
    BinaryTree l = join_rec(s.left(), t.left(), tau, sigma);
    BinaryTree r = join_rec(s.right(), t.right(), tau, sigma);
    return BinaryTree::caret(l, r);
}

} // namespace

Join join(const BinaryTree& s, const BinaryTree& t) {
    Join j;
    std::vector<BinaryTree> tau, sigma;
    j.tree = join_rec(s, t, tau, sigma);
    j.tau = Forest(std::move(tau));
    j.sigma = Forest(std::move(sigma));
    return j;
}

namespace {

bool refines_rec(const BinaryTree& coarse, const BinaryTree& fine, std::vector<BinaryTree>* comp) {
    if (coarse.is_leaf()) {
        if (comp) comp->push_back(fine);
        return true;
    }
    if (fine.is_leaf()) return false;
    return refines_rec(coarse.left(), fine.left(), comp) &&
           refines_rec(coarse.right(), fine.right(), comp);
}

} // namespace

bool refines(const BinaryTree& coarse, const BinaryTree& fine, Forest* complement) {
    std::vector<BinaryTree> comp;
    if (!refines_rec(coarse, fine, &comp)) return false;
    if (complement) *complement = Forest(std::move(comp));
    return true;
}

DyadicPartition tree_partition(const BinaryTree& t) {
    std::vector<Dyadic> pts;
    std::function<void(const BinaryTree::NodePtr&, Dyadic, Dyadic)> go =
        [&](const BinaryTree::NodePtr& n, Dyadic a, Dyadic b) {
            if (!n->left) {
                pts.push_back(a);
                return;
            }
            Dyadic mid = (a + b).times_pow2(-1);
            go(n->left, a, mid);
            go(n->right, mid, b);
        };
    go(t.root(), Dyadic(0, 0), Dyadic(1, 0));
    pts.push_back(Dyadic(1, 0));
    return DyadicPartition(std::move(pts));
}

namespace {

BinaryTree partition_tree_rec(const std::vector<Dyadic>& pts, std::size_t lo, std::size_t hi,
                              const Dyadic& a, const Dyadic& b) {
    if (hi - lo == 1) {
        if (pts[lo] != a || pts[hi] != b)
            throw PartitionError("partition interval mismatch near " + a.str());
        return BinaryTree::leaf();
    }
    Dyadic mid = (a + b).times_pow2(-1);
    // the midpoint must be one of the breakpoints, else no tree exists
    std::size_t m = lo;
    while (m <= hi && pts[m] != mid) ++m;
    if (m > hi)
        throw PartitionError("partition has no breakpoint at " + mid.str() +
                             ", not standard dyadic");
    return BinaryTree::caret(partition_tree_rec(pts, lo, m, a, mid),
                             partition_tree_rec(pts, m, hi, mid, b));
}

} // namespace

BinaryTree partition_tree(const DyadicPartition& p) {
    return partition_tree_rec(p.points, 0, p.points.size() - 1, Dyadic(0, 0), Dyadic(1, 0));
}

Forest rotate_forest(const Forest& w, int k) {
    std::size_t m = w.dom();
    if (m == 0) throw ForestError("cannot rotate empty forest");
    int kk = static_cast<int>(((k % static_cast<int>(m)) + static_cast<int>(m)) % static_cast<int>(m));
    std::vector<BinaryTree> ts;
    ts.reserve(m);
    for (std::size_t i = 0; i < m; ++i) ts.push_back(w.trees[(i + kk) % m]);
    return Forest(std::move(ts));
}

int leaf_index_after_rotation(const Forest& w, int l, int k) {
    std::size_t m = w.dom();
    std::size_t n = w.cod();
    if (l < 0 || static_cast<std::size_t>(l) >= n) throw ForestError("leaf index out of range");
    // locate the tree holding leaf l and the offset within it
    std::size_t tree = 0, acc = 0;
    while (acc + w.trees[tree].leaves() <= static_cast<std::size_t>(l)) {
        acc += w.trees[tree].leaves();
        ++tree;
    }
    std::size_t offset = static_cast<std::size_t>(l) - acc;
    int kk = static_cast<int>(((k % static_cast<int>(m)) + static_cast<int>(m)) % static_cast<int>(m));
    // position of that tree after the shift, then count leaves before it
    std::size_t new_pos = (tree + m - kk) % m;
    Forest shifted = rotate_forest(w, kk);
    std::size_t before = 0;
    for (std::size_t i = 0; i < new_pos; ++i) before += shifted.trees[i].leaves();
    return static_cast<int>(before + offset);
}

AnnularForest compose(const AnnularForest& a, const AnnularForest& b) {
    // Diagrammatic order: a is applied first.  Leaf j of a carries the circle
    // label (j + a.rotation) mod n, so it receives tree (j + a.rotation) of b;
    // the grafted forest is compose(a.forest, rotate(b.forest, a.rotation)).
    // The composite rotation is fixed by requiring the final circle labels to
    // agree with the ones b assigns on its own, which gives
    //   rot' = (#leaves in the first a.rotation trees of b + b.rotation) mod cod(b).
    // The naive "track one leaf under the tree shift" reading fails the
    // category identity laws; this version satisfies them and matches
    // piecewise-linear composition in the group layer.
    if (a.cod() != b.dom())
        throw CompositionError("annular compose: cod(a) = " + std::to_string(a.cod()) +
                               " but dom(b) = " + std::to_string(b.dom()));
    AnnularForest out;
    out.forest = compose(a.forest, rotate_forest(b.forest, a.rotation));
    std::size_t shift = 0;
    for (int t = 0; t < a.rotation; ++t)
        shift += b.forest.trees[static_cast<std::size_t>(t)].leaves();
    out.rotation = static_cast<int>((shift + static_cast<std::size_t>(b.rotation)) % b.cod());
    return out;
}

} // namespace tft
