#include "catch_amalgamated.hpp"

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "qcausal/combinat.hpp"
#include "qcausal/quantum.hpp"
#include "qcausal/rational.hpp"
#include "qcausal/rng.hpp"

using namespace qcausal;

TEST_CASE("rational arithmetic") {
    REQUIRE(Rational(2, 4) == Rational(1, 2));
    REQUIRE(Rational(1, -2) == Rational(-1, 2));
    REQUIRE((Rational(1, 6) + Rational(1, 3)).to_string() == "1/2");
    REQUIRE((Rational(3, 4) - Rational(1, 4)).to_string() == "1/2");
    REQUIRE((Rational(2, 3) * Rational(9, 4)) == Rational(3, 2));
    REQUIRE((Rational(1, 3) / Rational(2, 9)) == Rational(3, 2));
    REQUIRE(Rational(7).to_string() == "7");
    REQUIRE(Rational(-3, 9).abs() == Rational(1, 3));
    REQUIRE(Rational(1, 3) < Rational(2, 5));
    REQUIRE(Rational(1, 2).to_double() == 0.5);
    REQUIRE_THROWS_AS(Rational(1, 0), std::invalid_argument);

    SECTION("large cross products stay exact through 128-bit intermediates") {
        const Rational a(1, 3037000499LL);
        REQUIRE(a * Rational(3037000499LL) == Rational(1));
        const Rational big(4611686018427387904LL);
        REQUIRE_THROWS_AS(big * big, std::overflow_error);
    }
}

TEST_CASE("rng determinism and distributions") {
    Rng a(42), b(42), c(43);
    bool all_equal = true, any_diff = false;
    for (int k = 0; k < 64; ++k) {
        const std::uint64_t xa = a.next_u64(), xb = b.next_u64(), xc = c.next_u64();
        all_equal = all_equal && xa == xb;
        any_diff = any_diff || xa != xc;
    }
    REQUIRE(all_equal);
    REQUIRE(any_diff);

    SECTION("forked streams differ from the parent") {
        Rng base(7);
        Rng f0 = base.fork(0), f1 = base.fork(1);
        REQUIRE(f0.next_u64() != f1.next_u64());
    }

    SECTION("uniform stays in range, uniform_int respects the bound") {
        Rng rng(5);
        for (int k = 0; k < 1000; ++k) {
            const double u = rng.uniform();
            REQUIRE(u >= 0.0);
            REQUIRE(u < 1.0);
            const std::uint64_t v = rng.uniform_int(7);
            REQUIRE(v < 7);
        }
    }

    SECTION("gaussian moments, wide tolerance") {
        Rng rng(6);
        double s1 = 0.0, s2 = 0.0;
        const int kSamples = 20000;
        for (int k = 0; k < kSamples; ++k) {
            const double g = rng.gaussian();
            s1 += g;
            s2 += g * g;
        }
        REQUIRE(std::abs(s1 / kSamples) < 0.05);
        REQUIRE(std::abs(s2 / kSamples - 1.0) < 0.05);
    }
}

TEST_CASE("haar unitary first-entry moment") {
    // mean |U_00|^2 over Haar samples must hit 1/d; checked at d = 2 within
    // five standard errors of the sample
    Rng rng(99);
    const int kSamples = 100000;
    double s1 = 0.0, s2 = 0.0;
    for (int k = 0; k < kSamples; ++k) {
        const ComplexMatrix u = haar_unitary(2, rng);
        const double x = std::norm(u(0, 0));
        s1 += x;
        s2 += x * x;
    }
    const double mean = s1 / kSamples;
    const double var = s2 / kSamples - mean * mean;
    const double se = std::sqrt(var / kSamples);
    REQUIRE(std::abs(mean - 0.5) <= 5.0 * se);
}

TEST_CASE("multiplicity closed form") {
    SECTION("d=2 gives the Catalan numbers") {
        const BigInt want[] = {1, 2, 5, 14, 42, 132, 429, 1430};
        for (std::size_t k = 0; k < 8; ++k) REQUIRE(multiplicity(2 * (k + 1), 2) == want[k]);
    }
    SECTION("cross-checked against the tableau-growth oracle") {
        for (std::size_t n = 2; n <= 12; n += 2)
            REQUIRE(multiplicity(n, 2) == oracles::syt_rectangle_oracle(n, 2));
        for (std::size_t n : {std::size_t(3), std::size_t(6), std::size_t(9), std::size_t(12)})
            REQUIRE(multiplicity(n, 3) == oracles::syt_rectangle_oracle(n, 3));
        REQUIRE(multiplicity(4, 4) == oracles::syt_rectangle_oracle(4, 4));
    }
    SECTION("spot values at d=3 and d=4") {
        REQUIRE(multiplicity(3, 3) == 1);
        REQUIRE(multiplicity(6, 3) == 5);
        REQUIRE(multiplicity(9, 3) == 42);
        REQUIRE(multiplicity(4, 4) == 1);
    }
    SECTION("divisibility is required") {
        REQUIRE_THROWS_AS(multiplicity(3, 2), std::invalid_argument);
        REQUIRE_THROWS_AS(multiplicity(0, 2), std::invalid_argument);
    }
    SECTION("log form tracks the exact count") {
        for (std::size_t n = 2; n <= 40; n += 2) {
            const double exact = std::log2(multiplicity(n, 2).convert_to<double>());
            REQUIRE(multiplicity_log2(n, 2) == Catch::Approx(exact).margin(1e-9 * (1.0 + exact)));
        }
        REQUIRE(multiplicity_log2(2, 2) == Catch::Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("the formula as printed is not integer-valued") {
    // with every denominator factor read as (n/d + d - 1)! the product at
    // (n,d) = (2,2) comes out to 2!/(2! 2!) = 1/2, which cannot count
    // anything; the corrected form uses (n/d + d - i)! and gives 1
    const std::size_t n = 2, d = 2;
    BigInt num = factorial_big(n);
    BigInt den = 1;
    for (std::size_t i = 1; i <= d; ++i) {
        num *= factorial_big(d - i);
        den *= factorial_big(n / d + d - 1);
    }
    REQUIRE(num % den != 0);
    REQUIRE(num * 2 == den);
    REQUIRE(multiplicity(2, 2) == 1);
}

TEST_CASE("group partition counting and enumeration") {
    REQUIRE(group_partition_count(4, 2) == 3);
    REQUIRE(group_partition_count(6, 2) == 15);
    REQUIRE(group_partition_count(6, 3) == 10);
    REQUIRE(group_partition_count(8, 2) == 105);

    const auto parts = group_partitions(4, 2);
    REQUIRE(parts.size() == 3);
    // canonical order: anchor is always the smallest unused site
    REQUIRE(parts[0].groups == std::vector<std::vector<std::size_t>>{{0, 1}, {2, 3}});
    REQUIRE(parts[1].groups == std::vector<std::vector<std::size_t>>{{0, 2}, {1, 3}});
    REQUIRE(parts[2].groups == std::vector<std::vector<std::size_t>>{{0, 3}, {1, 2}});

    const auto parts63 = group_partitions(6, 3);
    REQUIRE(parts63.size() == 10);
    std::set<std::vector<std::vector<std::size_t>>> uniq;
    for (const auto &p : parts63) uniq.insert(p.groups);
    REQUIRE(uniq.size() == 10);
}

TEST_CASE("integer partitions into bounded parts") {
    const auto p42 = count_partitions(4, 2);
    REQUIRE(p42 == std::vector<std::vector<std::size_t>>{{4}, {3, 1}, {2, 2}});
    const auto p43 = count_partitions(4, 3);
    REQUIRE(p43.size() == 4);
    const auto p11 = count_partitions(1, 1);
    REQUIRE(p11 == std::vector<std::vector<std::size_t>>{{1}});
}

TEST_CASE("invariant subspace dimension matches the representation count") {
    REQUIRE(invariant_subspace_dim(1, 2) == 0);
    REQUIRE(invariant_subspace_dim(2, 2) == 1);
    REQUIRE(invariant_subspace_dim(3, 2) == 0);
    REQUIRE(invariant_subspace_dim(4, 2) == 2);
    REQUIRE(invariant_subspace_dim(5, 2) == 0);
    REQUIRE(invariant_subspace_dim(6, 2) == 5);
    REQUIRE(invariant_subspace_dim(2, 3) == 0);
    REQUIRE(invariant_subspace_dim(3, 3) == 1);
    REQUIRE(invariant_subspace_dim(6, 3) == 5);
    REQUIRE_THROWS_AS(invariant_subspace_dim(13, 2), std::invalid_argument);
}
