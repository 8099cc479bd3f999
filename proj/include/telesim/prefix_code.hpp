// prefix_code.hpp
// Optimal binary prefix coding over fixed-length source blocks, used to
// demonstrate the noiseless coding rate bracket H <= rate < H + 1/block_len.

#pragma once

#include <cmath>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "telesim/infotheory.hpp"
#include "telesim/rng.hpp"

namespace telesim::infotheory {

// Largest block distribution we will enumerate: alphabet^block_len codewords.
inline constexpr std::size_t kMaxBlockCodewords = std::size_t{1} << 20;

// Huffman code lengths with deterministic tie-breaking (insertion order).
inline std::vector<int> prefix_code_lengths(const std::vector<double>& weights) {
    detail::require(!weights.empty(), "prefix code needs at least one symbol");
    const std::size_t n = weights.size();
    if (n == 1) return {0};

    struct Node {
        double w;
        std::size_t tie;
        int left = -1, right = -1;  // -1 marks a leaf
    };
    std::vector<Node> nodes;
    nodes.reserve(2 * n);
    using Entry = std::tuple<double, std::size_t, int>;  // weight, tie, node id
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (std::size_t i = 0; i < n; ++i) {
        detail::require(weights[i] >= 0.0, "prefix code weights must be nonnegative");
        nodes.push_back({weights[i], i});
        heap.emplace(weights[i], i, static_cast<int>(i));
    }
    std::size_t tie = n;
    while (heap.size() > 1) {
        auto [w1, t1, a] = heap.top();
        heap.pop();
        auto [w2, t2, b] = heap.top();
        heap.pop();
        nodes.push_back({w1 + w2, tie, a, b});
        heap.emplace(w1 + w2, tie, static_cast<int>(nodes.size() - 1));
        ++tie;
    }

    std::vector<int> lengths(n, 0);
    // iterative depth-first walk from the root
    std::vector<std::pair<int, int>> stack{{std::get<2>(heap.top()), 0}};
    while (!stack.empty()) {
        auto [id, depth] = stack.back();
        stack.pop_back();
        const Node& nd = nodes[static_cast<std::size_t>(id)];
        if (nd.left < 0) {
            lengths[static_cast<std::size_t>(id)] = depth;
            continue;
        }
        stack.emplace_back(nd.left, depth + 1);
        stack.emplace_back(nd.right, depth + 1);
    }
    return lengths;
}

// Prefix code over all blocks of `block_len` i.i.d. letters from `p`.
// Block index runs over base-alphabet digits, first letter least significant.
struct BlockCode {
    std::size_t alphabet = 0;
    std::size_t block_len = 0;
    std::vector<double> block_probs;
    std::vector<int> lengths;

    double expected_bits_per_symbol() const {
        double e = 0.0;
        for (std::size_t b = 0; b < block_probs.size(); ++b)
            e += block_probs[b] * lengths[b];
        return e / static_cast<double>(block_len);
    }

    // standard deviation of the per-block code length
    double block_length_stddev() const {
        double e = 0.0, e2 = 0.0;
        for (std::size_t b = 0; b < block_probs.size(); ++b) {
            e += block_probs[b] * lengths[b];
            e2 += block_probs[b] * lengths[b] * lengths[b];
        }
        const double var = e2 - e * e;
        return var > 0.0 ? std::sqrt(var) : 0.0;
    }
};

inline BlockCode build_block_code(const ProbDist& p, std::size_t block_len) {
    detail::require(block_len >= 1, "block length must be at least 1");
    const std::size_t n = p.size();
    double size_check = 1.0;
    for (std::size_t i = 0; i < block_len; ++i) {
        size_check *= static_cast<double>(n);
        detail::require(size_check <= static_cast<double>(kMaxBlockCodewords),
                        "alphabet^block_len exceeds the codeword cap (2^20)");
    }
    const auto n_blocks = static_cast<std::size_t>(size_check);

    std::vector<double> probs(n_blocks, 1.0);
    for (std::size_t b = 0; b < n_blocks; ++b) {
        std::size_t rest = b;
        for (std::size_t pos = 0; pos < block_len; ++pos) {
            probs[b] *= p[rest % n];
            rest /= n;
        }
    }
    BlockCode code{n, block_len, std::move(probs), {}};
    code.lengths = prefix_code_lengths(code.block_probs);
    return code;
}

// Samples n_blocks blocks of i.i.d. letters, encodes each with the optimal
// prefix code, and returns the observed mean bits per source symbol.
inline double empirical_coding_rate(const ProbDist& p, std::size_t block_len,
                                    std::size_t n_blocks, RandomStream& rng) {
    detail::require(n_blocks >= 1, "need at least one block");
    const BlockCode code = build_block_code(p, block_len);

    std::uint64_t total_bits = 0;
    for (std::size_t t = 0; t < n_blocks; ++t) {
        std::size_t index = 0;
        std::size_t digit = 1;
        for (std::size_t pos = 0; pos < block_len; ++pos) {
            index += digit * p.sample(rng);
            digit *= p.size();
        }
        total_bits += static_cast<std::uint64_t>(code.lengths[index]);
    }
    return static_cast<double>(total_bits) /
           (static_cast<double>(n_blocks) * static_cast<double>(block_len));
}

}  // namespace telesim::infotheory
