#include "d2k/match_counting.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <vector>

namespace d2k {

namespace {

constexpr std::uint64_t kOddBits = 0x5555555555555555ULL;

void check_inputs(const Sequence& a, const Sequence& b, const MatchParams& p) {
    if (a.size() != static_cast<std::size_t>(p.n) ||
        b.size() != static_cast<std::size_t>(p.n))
        throw std::invalid_argument("both sequences must have length n");
}

}  // namespace

std::int64_t window_mismatches(const Sequence& a, std::size_t ai,
                               const Sequence& b, std::size_t bj, int m) {
    if (ai + m > a.size() || bj + m > b.size())
        throw std::invalid_argument("window runs past the end of a sequence");
    std::int64_t mism = 0;
    for (int q = 0; q < m; q += 32) {
        const unsigned len = static_cast<unsigned>(std::min(32, m - q));
        const std::uint64_t x = a.packed(ai + q, len) ^ b.packed(bj + q, len);
        mism += std::popcount((x | (x >> 1)) & kOddBits);
    }
    return mism;
}

int match_indicator(const Sequence& a, const Sequence& b, std::int64_t i,
                    std::int64_t j, const MatchParams& p) {
    check_inputs(a, b, p);
    if (i < 1 || i > p.n_bar() || j < 1 || j > p.n_bar())
        throw std::invalid_argument("window starts must lie in 1..n_bar");
    return window_mismatches(a, i - 1, b, j - 1, p.m) <= p.k ? 1 : 0;
}

std::int64_t d2k_naive(const Sequence& a, const Sequence& b, const MatchParams& p) {
    check_inputs(a, b, p);
    const std::int64_t nbar = p.n_bar();
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < nbar; ++i) {
        for (std::int64_t j = 0; j < nbar; ++j) {
            int mism = 0;
            for (int u = 0; u < p.m; ++u) {
                mism += a.code(i + u) != b.code(j + u) ? 1 : 0;
                if (mism > p.k) break;
            }
            hits += mism <= p.k ? 1 : 0;
        }
    }
    return hits;
}

std::int64_t d2k_fast(const Sequence& a, const Sequence& b, const MatchParams& p) {
    check_inputs(a, b, p);
    const std::int64_t nbar = p.n_bar();
    if (p.k >= p.m) return nbar * nbar;

    const std::int64_t ndiag = 2 * nbar - 1;
    const int m = p.m;
    const int k = p.k;
    std::int64_t hits = 0;

#pragma omp parallel reduction(+ : hits)
    {
        std::vector<std::uint8_t> mm;
#pragma omp for schedule(static)
        for (std::int64_t di = 0; di < ndiag; ++di) {
            const std::int64_t d = di - (nbar - 1);  // j - i
            const std::int64_t i0 = d < 0 ? -d : 0;
            const std::int64_t j0 = i0 + d;
            const std::int64_t wins = nbar - (d < 0 ? -d : d);
            const std::int64_t letters = wins + m - 1;

            if (static_cast<std::int64_t>(mm.size()) < letters) mm.resize(letters);
            for (std::int64_t q = 0; q < letters; q += 32) {
                const unsigned len =
                    static_cast<unsigned>(std::min<std::int64_t>(32, letters - q));
                const std::uint64_t x =
                    a.packed(i0 + q, len) ^ b.packed(j0 + q, len);
                const std::uint64_t y = (x | (x >> 1)) & kOddBits;
                for (unsigned u = 0; u < len; ++u)
                    mm[q + u] = static_cast<std::uint8_t>((y >> (2 * u)) & 1u);
            }

            int cnt = 0;
            for (int u = 0; u < m; ++u) cnt += mm[u];
            hits += cnt <= k ? 1 : 0;
            for (std::int64_t s = 1; s < wins; ++s) {
                cnt += mm[s + m - 1] - mm[s - 1];
                hits += cnt <= k ? 1 : 0;
            }
        }
    }
    return hits;
}

PairClass classify_pair(PairIndex u, PairIndex v, int m) {
    if (m < 1) throw std::invalid_argument("word length m must be >= 1");
    if (u.i < 1 || u.j < 1 || v.i < 1 || v.j < 1)
        throw std::invalid_argument("window starts must be >= 1");
    const std::int64_t di = u.i > v.i ? u.i - v.i : v.i - u.i;
    const std::int64_t dj = u.j > v.j ? u.j - v.j : v.j - u.j;
    const bool oi = di < m;
    const bool oj = dj < m;
    if (!oi && !oj) return {PairTag::independent, std::nullopt};
    if (oi && oj) return {PairTag::accordion, static_cast<int>(std::min(di, dj))};
    return {PairTag::crabgrass, static_cast<int>(oi ? di : dj)};
}

std::int64_t count_crabgrass_pairs(std::int64_t n, int m, int t) {
    if (m < 1) throw std::invalid_argument("word length m must be >= 1");
    if (n < m) throw std::invalid_argument("need n >= m");
    if (t < 0 || t >= m) throw std::invalid_argument("overlap t must satisfy 0 <= t < m");
    const std::int64_t nbar = n - m + 1;
    // ordered A-side offset pairs at |i - i'| == t, times ordered B-side
    // pairs at |j - j'| >= m, times 2 for the mirrored role of the two axes
    const std::int64_t near_t = t == 0 ? nbar : (nbar > t ? 2 * (nbar - t) : 0);
    const std::int64_t reach = nbar - m;
    const std::int64_t far = reach > 0 ? reach * (reach + 1) : 0;
    return 2 * near_t * far;
}

}  // namespace d2k
