#pragma once

#include <cstdint>
#include <optional>

#include "d2k/sequence_model.hpp"

namespace d2k {

// Mismatches between the m-windows of a at ai and b at bj (0-based starts).
std::int64_t window_mismatches(const Sequence& a, std::size_t ai,
                               const Sequence& b, std::size_t bj, int m);

// 1 when the windows at 1-based starts (i, j) differ in at most k letters.
int match_indicator(const Sequence& a, const Sequence& b, std::int64_t i,
                    std::int64_t j, const MatchParams& p);

// Approximate word-match count: number of window pairs within distance k.
// d2k_naive is the letter-by-letter reference; d2k_fast slides along
// diagonals over packed words and may run parallel. Identical results.
std::int64_t d2k_naive(const Sequence& a, const Sequence& b, const MatchParams& p);
std::int64_t d2k_fast(const Sequence& a, const Sequence& b, const MatchParams& p);

enum class PairTag { independent, crabgrass, accordion };

struct PairIndex {
    std::int64_t i;
    std::int64_t j;
};

struct PairClass {
    PairTag tag;
    // overlap offset t: the one-side overlap (crabgrass) or the smaller of
    // the two offsets (accordion); empty for independent pairs
    std::optional<int> overlap_t;
};

// Dependency geometry of two index pairs by their window offsets.
PairClass classify_pair(PairIndex u, PairIndex v, int m);

// Ordered pairs of index pairs that are crabgrass with overlap exactly t.
std::int64_t count_crabgrass_pairs(std::int64_t n, int m, int t);

}  // namespace d2k
