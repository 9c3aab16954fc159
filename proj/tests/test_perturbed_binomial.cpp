#include <doctest.h>

#include <cmath>

#include "d2k/perturbed_binomial.hpp"
#include "d2k/rng.hpp"
#include "d2k/sequence_model.hpp"
#include "test_support/oracles.hpp"

using namespace d2k;

TEST_CASE("binomial coefficients") {
    CHECK(binom(5, 2) == 10.0);
    CHECK(binom(12, 5) == 792.0);
    CHECK(binom(0, 0) == 1.0);
    CHECK(binom(6, -1) == 0.0);
    CHECK(binom(6, 7) == 0.0);
    // C(60,30) = 118264581564861424, larger than 2^53: accept one rounding
    CHECK(std::abs(binom(60, 30) - 118264581564861424.0) / 118264581564861424.0 <=
          1e-15);
    for (int n : {3, 17, 45, 60})
        for (int a = 0; a <= n; a += 3)
            CHECK(std::abs(log_binom(n, a) - std::log(binom(n, a))) <= 1e-12);
    CHECK(std::abs(binom(80, 37) - std::exp(log_binom(80, 37))) /
              std::exp(log_binom(80, 37)) <=
          1e-12);
    CHECK_THROWS_AS(log_binom(4, 5), std::invalid_argument);
}

TEST_CASE("word probability") {
    // weight of a single GC-count class, hand value at m=2, eta=1/3, c=1
    CHECK(std::abs(word_probability(2, 1.0 / 3.0, 1) - 1.0 / 18.0) <= 1e-16);
    // probabilities of all words sum to 1: multiplicity C(m,c) 2^m
    for (double eta : {-0.9, 0.0, 1.0 / 3.0, 0.9}) {
        for (int m : {1, 2, 5, 12}) {
            double sum = 0;
            for (int c = 0; c <= m; ++c)
                sum += binom(m, c) * std::pow(2.0, m) * word_probability(m, eta, c);
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
    }
    CHECK_THROWS_AS(word_probability(2, 1.0, 1), std::domain_error);
    CHECK_THROWS_AS(word_probability(2, 0.5, 3), std::invalid_argument);
}

TEST_CASE("pmf matches exhaustive text enumeration") {
    // frozen hand-derived value first: m=2, eta=1/3, c=1, k=1
    CHECK(std::abs(perturbed_binomial_pmf(1, 2, 1.0 / 3.0, 1) - 7.0 / 18.0) <=
          1e-15);
    CHECK(std::abs(oracles::brute_perturbed_pmf(1, 2, 1.0 / 3.0, 1) - 7.0 / 18.0) <=
          1e-15);

    for (double eta : {-0.9, -1.0 / 3.0, 0.0, 1.0 / 3.0, 0.9})
        for (int m = 1; m <= 6; ++m)
            for (int c = 0; c <= m; ++c)
                for (int k = 0; k <= m; ++k)
                    CHECK(std::abs(perturbed_binomial_pmf(k, m, eta, c) -
                                   oracles::brute_perturbed_pmf(k, m, eta, c)) <=
                          1e-12);
}

TEST_CASE("pmf depends on the query only through its GC count") {
    // distance distribution against CCA.. and GAC.. style queries must agree
    const double eta = 0.4;
    const int m = 5;
    SplitMix64 rng(77);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<std::uint8_t> q = oracles::codes_of(rng.next(), m);
        const int c = oracles::gc_of(q);
        const auto dist = strand_symmetric(eta);
        for (int k = 0; k <= m; ++k) {
            double total = 0.0;
            const std::uint64_t lim = std::uint64_t{1} << (2 * m);
            for (std::uint64_t v = 0; v < lim; ++v) {
                const auto t = oracles::codes_of(v, m);
                if (oracles::mismatches(t, 0, q, 0, m) == k)
                    total += oracles::prob_of(dist, t);
            }
            CHECK(std::abs(total - perturbed_binomial_pmf(k, m, eta, c)) <= 1e-12);
        }
    }
}

TEST_CASE("pmf normalization and symmetry") {
    for (double eta : {-0.9, -1.0 / 3.0, 0.0, 1.0 / 3.0, 0.9}) {
        for (int m = 1; m <= 12; ++m) {
            for (int c = 0; c <= m; ++c) {
                double sum = 0;
                for (int k = 0; k <= m; ++k)
                    sum += perturbed_binomial_pmf(k, m, eta, c);
                CHECK(std::abs(sum - 1.0) <= 1e-10);
                for (int k = 0; k <= m; ++k)
                    CHECK(std::abs(perturbed_binomial_pmf(k, m, eta, c) -
                                   perturbed_binomial_pmf(k, m, -eta, m - c)) <=
                          1e-12);
            }
        }
    }
}

TEST_CASE("uniform alphabet collapses to the plain binomial") {
    CHECK(std::abs(binomial_pmf(0, 2, 0.25) - 1.0 / 16.0) <= 1e-17);
    CHECK(std::abs(binomial_pmf(1, 2, 0.25) - 3.0 / 8.0) <= 1e-16);
    for (int m = 1; m <= 12; ++m) {
        double sum = 0;
        for (int k = 0; k <= m; ++k) sum += binomial_pmf(k, m, 0.3);
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        for (int c = 0; c <= m; ++c)
            for (int k = 0; k <= m; ++k)
                CHECK(std::abs(perturbed_binomial_pmf(k, m, 0.0, c) -
                               binomial_pmf(k, m, 0.25)) <= 1e-14);
    }
    CHECK_THROWS_AS(binomial_pmf(1, 2, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(binomial_pmf(3, 2, 0.5), std::invalid_argument);
}

TEST_CASE("cdf properties") {
    for (double eta : {-0.5, 0.0, 1.0 / 3.0, 0.9}) {
        for (int m : {1, 4, 9, 12}) {
            for (int c = 0; c <= m; ++c) {
                double prev = 0.0;
                for (int k = 0; k <= m; ++k) {
                    const double g = perturbed_binomial_cdf(k, m, eta, c);
                    CHECK(g >= prev - 1e-15);
                    prev = g;
                }
                CHECK(std::abs(perturbed_binomial_cdf(m, m, eta, c) - 1.0) <= 1e-10);
                CHECK(std::abs(perturbed_binomial_cdf(0, m, eta, c) -
                               perturbed_binomial_pmf(0, m, eta, c)) <= 1e-15);
            }
        }
    }
}

TEST_CASE("g at k=0 equals the word probability") {
    for (double eta : {-0.9, 0.0, 0.45})
        for (int m : {1, 3, 8})
            for (int c = 0; c <= m; ++c)
                CHECK(std::abs(perturbed_binomial_pmf(0, m, eta, c) -
                               word_probability(m, eta, c)) <= 1e-15);
}

TEST_CASE("log-space evaluation is consistent with direct evaluation") {
    SplitMix64 rng(5);
    for (int rep = 0; rep < 400; ++rep) {
        const int m = 1 + static_cast<int>(rng.next() % 30);
        const int c = static_cast<int>(rng.next() % (m + 1));
        const int k = static_cast<int>(rng.next() % (m + 1));
        const double eta = 1.9 * rng.next_unit() - 0.95;
        const double direct = detail::perturbed_binomial_pmf_direct(k, m, eta, c);
        const double logged = detail::perturbed_binomial_pmf_log(k, m, eta, c);
        if (direct > 1e-300)
            CHECK(std::abs(logged - direct) / direct <= 1e-9);
    }
}

TEST_CASE("large word lengths stay normalized through the log path") {
    for (double eta : {-0.6, 0.3}) {
        for (int m : {40, 120, 200}) {
            for (int c : {0, m / 3, m}) {
                double sum = 0;
                for (int k = 0; k <= m; ++k)
                    sum += perturbed_binomial_pmf(k, m, eta, c);
                CHECK(std::abs(sum - 1.0) <= 1e-9);
            }
        }
    }
}

TEST_CASE("distance distribution table") {
    const auto t = DistanceDistribution::compute(6, 1.0 / 3.0, 2);
    REQUIRE(t.pmf.size() == 7);
    REQUIRE(t.cdf.size() == 7);
    double acc = 0;
    for (int k = 0; k <= 6; ++k) {
        CHECK(t.pmf[k] == perturbed_binomial_pmf(k, 6, 1.0 / 3.0, 2));
        acc += t.pmf[k];
        CHECK(std::abs(t.cdf[k] - acc) <= 1e-15);
    }
    CHECK_THROWS_AS(DistanceDistribution::compute(6, 1.0, 2), std::domain_error);
    CHECK_THROWS_AS(DistanceDistribution::compute(6, 0.5, 7), std::invalid_argument);
    CHECK_THROWS_AS(perturbed_binomial_pmf(7, 6, 0.5, 2), std::invalid_argument);
}
