#pragma once

// Shared helpers for the test suite: exhaustive tree enumeration and seeded
// random generators for trees and forests.

#include <random>
#include <vector>

#include "tft/forest.hpp"

namespace tftest {

// All binary trees with exactly n leaves (Catalan many).
inline std::vector<tft::BinaryTree> all_trees(std::size_t n) {
    if (n == 1) return {tft::BinaryTree::leaf()};
    std::vector<tft::BinaryTree> out;
    for (std::size_t i = 1; i < n; ++i) {
        for (const auto& l : all_trees(i))
            for (const auto& r : all_trees(n - i))
                out.push_back(tft::BinaryTree::caret(l, r));
    }
    return out;
}

inline tft::BinaryTree random_tree(std::mt19937& rng, std::size_t n) {
    if (n == 1) return tft::BinaryTree::leaf();
    std::uniform_int_distribution<std::size_t> d(1, n - 1);
    std::size_t i = d(rng);
    return tft::BinaryTree::caret(random_tree(rng, i), random_tree(rng, n - i));
}

// Random forest with `dom` roots and at most `dom + extra` leaves.
inline tft::Forest random_forest(std::mt19937& rng, std::size_t dom, std::size_t extra) {
    std::vector<std::size_t> sizes(dom, 1);
    std::uniform_int_distribution<std::size_t> pick(0, dom - 1);
    std::uniform_int_distribution<std::size_t> amount(0, extra);
    std::size_t budget = amount(rng);
    for (std::size_t i = 0; i < budget; ++i) sizes[pick(rng)] += 1;
    std::vector<tft::BinaryTree> ts;
    ts.reserve(dom);
    for (std::size_t s : sizes) ts.push_back(random_tree(rng, s));
    return tft::Forest(std::move(ts));
}

} // namespace tftest
