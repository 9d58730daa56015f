#include "catch_amalgamated.hpp"

#include <cmath>

#include "oracles.hpp"
#include "qcausal/discrimination.hpp"
#include "qcausal/formulas.hpp"

using namespace qcausal;

namespace {

ComplexMatrix random_density(std::size_t d, Rng &rng) {
    ComplexMatrix g(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) g(i, j) = cplx(rng.gaussian(), rng.gaussian());
    ComplexMatrix rho = g * g.dagger();
    rho *= cplx(1.0 / rho.trace().real(), 0.0);
    return rho;
}

MultiState pure_pair_state(double c, std::size_t which) {
    CVec v(2, cplx(0.0, 0.0));
    if (which == 0) {
        v[0] = 1.0;
    } else {
        v[0] = c;
        v[1] = std::sqrt(1.0 - c * c);
    }
    return pure_state(v, {2});
}

// k hypotheses about which block carries the signal: block i holds the pure
// plus state on n qubits, the other blocks are maximally mixed
MultiState block_signal_state(std::size_t k, std::size_t i, std::size_t n) {
    const std::size_t bdim = std::size_t(1) << n;
    CVec plus_n(bdim, cplx(1.0 / std::sqrt(double(bdim)), 0.0));
    const ComplexMatrix pp = outer(plus_n, plus_n);
    ComplexMatrix mixed = ComplexMatrix::identity(bdim);
    mixed *= cplx(1.0 / double(bdim), 0.0);
    ComplexMatrix rho(1, 1);
    rho(0, 0) = 1.0;
    for (std::size_t j = 0; j < k; ++j) rho = kron(rho, j == i ? pp : mixed);
    return make_state(rho, std::vector<std::size_t>(k, bdim));
}

}  // namespace

TEST_CASE("classical optimum over input words") {
    struct Row {
        std::size_t d, n;
    };
    for (const Row &r : {Row{2, 1}, Row{2, 2}, Row{2, 3}, Row{2, 4}, Row{3, 2}, Row{3, 3}}) {
        const DiscriminationResult res = classical_optimum(r.d, r.n);
        std::int64_t den = 2;
        for (std::size_t k = 1; k < r.n; ++k) den *= std::int64_t(r.d);
        REQUIRE(res.exact.has_value());
        REQUIRE(*res.exact == Rational(1, den));
        REQUIRE(res.error_probability == Catch::Approx(Rational(1, den).to_double()).margin(1e-15));
        REQUIRE(res.method == DiscriminationResult::Method::tv_enumeration);
        REQUIRE(res.best_inputs.size() == r.n);
    }

    SECTION("the repeated symbol is already optimal at two uses") {
        REQUIRE(classical_optimum(2, 2).best_inputs == std::vector<std::size_t>{0, 0});
        REQUIRE(classical_optimum(3, 2).best_inputs == std::vector<std::size_t>{0, 0});
    }

    SECTION("supported range") {
        REQUIRE_THROWS_AS(classical_optimum(4, 2), std::invalid_argument);
        REQUIRE_THROWS_AS(classical_optimum(2, 5), std::invalid_argument);
        REQUIRE_THROWS_AS(classical_optimum(2, 0), std::invalid_argument);
    }
}

TEST_CASE("binary helstrom test") {
    SECTION("orthogonal states are perfectly distinguishable") {
        const auto res = helstrom_error(pure_pair_state(0.0, 0), pure_pair_state(0.0, 1));
        REQUIRE(res.error_probability == Catch::Approx(0.0).margin(1e-12));
        REQUIRE(*res.trace_distance == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("identical states are a coin flip") {
        const MultiState s = pure_pair_state(0.3, 1);
        const auto res = helstrom_error(s, s);
        REQUIRE(res.error_probability == Catch::Approx(0.5).margin(1e-12));
    }
    SECTION("pure-state overlap closed form") {
        for (double c : {0.3, 0.7, 0.95}) {
            const auto res = helstrom_error(pure_pair_state(c, 0), pure_pair_state(c, 1));
            const double want = 0.5 * (1.0 - std::sqrt(1.0 - c * c));
            REQUIRE(res.error_probability == Catch::Approx(want).margin(1e-12));
        }
    }
    SECTION("biased priors") {
        const double c = 0.6, p = 0.3;
        const auto res = helstrom_error(pure_pair_state(c, 0), pure_pair_state(c, 1), p);
        const double want = 0.5 * (1.0 - std::sqrt(1.0 - 4.0 * p * (1.0 - p) * c * c));
        REQUIRE(res.error_probability == Catch::Approx(want).margin(1e-12));
    }
    SECTION("validation") {
        const MultiState a = pure_pair_state(0.0, 0);
        REQUIRE_THROWS_AS(helstrom_error(a, a, 0.0), std::invalid_argument);
        REQUIRE_THROWS_AS(helstrom_error(a, a, 1.0), std::invalid_argument);
        REQUIRE_THROWS_AS(helstrom_error(a, a, -0.2), std::invalid_argument);
        CVec v(3, cplx(0.0, 0.0));
        v[0] = 1.0;
        REQUIRE_THROWS_AS(helstrom_error(a, pure_state(v, {3})), std::invalid_argument);
    }
}

TEST_CASE("helstrom evaluation paths") {
    SECTION("forced ensemble path agrees with the dense path") {
        Rng rng(21);
        CVec a(4), b(4);
        for (std::size_t i = 0; i < 4; ++i) {
            a[i] = cplx(rng.gaussian(), rng.gaussian());
            b[i] = cplx(rng.gaussian(), rng.gaussian());
        }
        for (auto *v : {&a, &b}) {
            const double nrm = vec_norm(*v);
            for (auto &x : *v) x /= nrm;
        }
        const MultiState s1 = pure_state(a, {4});
        const MultiState s2 = pure_state(b, {4});
        const double dense = helstrom_error(s1, s2, 0.5, HelstromPath::dense).error_probability;
        const double lr = helstrom_error(s1, s2, 0.5, HelstromPath::low_rank).error_probability;
        REQUIRE(lr == Catch::Approx(dense).margin(1e-11));
    }

    SECTION("large ambient spaces are handled without dense matrices") {
        const std::size_t dim = 4096;
        const double c = 0.4;
        MultiState s1, s2;
        s1.dims = {dim};
        s2.dims = {dim};
        CVec v1(dim, cplx(0.0, 0.0)), v2(dim, cplx(0.0, 0.0));
        v1[0] = 1.0;
        v2[0] = c;
        v2[1] = std::sqrt(1.0 - c * c);
        s1.low_rank = WeightedVectors{{1.0}, {v1}};
        s2.low_rank = WeightedVectors{{1.0}, {v2}};
        const auto res = helstrom_error(s1, s2);
        const double want = 0.5 * (1.0 - std::sqrt(1.0 - c * c));
        REQUIRE(res.error_probability == Catch::Approx(want).margin(1e-11));
        REQUIRE(*res.trace_distance == Catch::Approx(std::sqrt(1.0 - c * c)).margin(1e-11));
    }

    SECTION("the ensemble path cannot be forced without ensembles") {
        ComplexMatrix rho = ComplexMatrix::identity(2);
        rho *= cplx(0.5, 0.0);
        const MultiState s = make_state(rho, {2});
        REQUIRE_THROWS_AS(helstrom_error(s, s, 0.5, HelstromPath::low_rank), std::invalid_argument);
    }
}

TEST_CASE("square-root measurement") {
    SECTION("bracketed by the optimum on random pairs") {
        Rng rng(33);
        for (int rep = 0; rep < 5; ++rep) {
            const MultiState s1 = make_state(random_density(6, rng), {6});
            const MultiState s2 = make_state(random_density(6, rng), {6});
            const double opt = helstrom_error(s1, s2).error_probability;
            const double srm = srm_error({s1, s2}, {0.5, 0.5}).error_probability;
            REQUIRE(srm >= opt - 1e-10);
            REQUIRE(srm <= 2.0 * opt + 1e-10);
        }
    }

    SECTION("three symmetric pure states match the closed form") {
        const double g = 0.4;
        ComplexMatrix gram(3, 3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) gram(i, j) = (i == j) ? 1.0 : g;
        const ComplexMatrix root = sqrt_psd(gram);
        std::vector<MultiState> states;
        for (std::size_t j = 0; j < 3; ++j) {
            CVec v(3);
            for (std::size_t i = 0; i < 3; ++i) v[i] = root(i, j);
            states.push_back(pure_state(v, {3}));
        }
        const double err = srm_error(states, {1.0 / 3, 1.0 / 3, 1.0 / 3}).error_probability;
        const double succ = std::pow((2.0 * std::sqrt(1.0 - g) + std::sqrt(1.0 + 2.0 * g)) / 3.0, 2);
        REQUIRE(err == Catch::Approx(1.0 - succ).margin(1e-10));
        REQUIRE(err == Catch::Approx(1.0 - oracles::srm_success_from_gram(gram)).margin(1e-10));
    }

    SECTION("validation") {
        const MultiState s = pure_pair_state(0.0, 0);
        REQUIRE_THROWS_AS(srm_error({s}, {1.0}), std::invalid_argument);
        REQUIRE_THROWS_AS(srm_error({s, s}, {0.7, 0.7}), std::invalid_argument);
        REQUIRE_THROWS_AS(srm_error({s, s}, {1.5, -0.5}), std::invalid_argument);
        REQUIRE_THROWS_AS(srm_error({s, s}, {1.0}), std::invalid_argument);
    }
}

TEST_CASE("many-hypothesis signal location") {
    SECTION("three blocks, square-root measurement near the closed form") {
        const std::size_t k = 3;
        const std::vector<double> priors(k, 1.0 / double(k));
        struct Want {
            std::size_t n;
            double err;
        };
        // exact values (3*2^n - 1) / (3*4^n) for the commuting block states
        for (const Want &w : {Want{1, 5.0 / 12}, Want{2, 11.0 / 48}, Want{3, 23.0 / 192}}) {
            std::vector<MultiState> states;
            for (std::size_t i = 0; i < k; ++i) states.push_back(block_signal_state(k, i, w.n));
            const double err = srm_error(states, priors).error_probability;
            REQUIRE(err == Catch::Approx(w.err).margin(1e-10));
            const double closed = p_multi_k(w.n, 2, k, MultiSetting::quantum);
            const double slack = 2.0 * std::pow(2.0, -2.0 * double(w.n)) * double(k);
            REQUIRE(std::abs(err - closed) <= slack);
        }
    }

    SECTION("two blocks reach the pairwise closed form exactly") {
        for (std::size_t n : {1u, 2u, 3u}) {
            const MultiState s1 = block_signal_state(2, 0, n);
            const MultiState s2 = block_signal_state(2, 1, n);
            const double err = helstrom_error(s1, s2).error_probability;
            REQUIRE(err == Catch::Approx(p_multi_k(n, 2, 2, MultiSetting::quantum)).margin(1e-12));
        }
    }
}

TEST_CASE("monte carlo classical simulation") {
    Rng rng(777);
    const auto res = monte_carlo_classical(2, 2, {0, 0}, 20000, rng);
    REQUIRE(res.samples == 20000);
    REQUIRE(res.std_err.has_value());
    REQUIRE(std::abs(res.error_probability - 0.25) <= 4.0 * *res.std_err);

    SECTION("seeded runs repeat bit for bit") {
        Rng r2(777);
        const auto again = monte_carlo_classical(2, 2, {0, 0}, 20000, r2);
        REQUIRE(again.error_probability == res.error_probability);
    }
    SECTION("a minimum trial count is enforced") {
        Rng r3(1);
        REQUIRE_THROWS_AS(monte_carlo_classical(2, 2, {0, 0}, 50, r3), std::invalid_argument);
    }
}
