#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "anisolevy/levy_models.hpp"
#include "anisolevy/rng.hpp"
#include "anisolevy/sampling.hpp"
#include "oracle_helpers.hpp"

using namespace anisolevy;
using Catch::Approx;

namespace {

std::vector<double> draw_marginal(const increment_sampler& s, double dt, std::size_t n,
                                  std::uint64_t seed, std::size_t axis = 0) {
    rng_stream rng(seed, 0);
    std::vector<double> xs(n);
    for (auto& x : xs) x = s.sample(dt, rng)[axis];
    return xs;
}

}  // namespace

TEST_CASE("symmetric stable marginals pass a KS test against quadrature CDFs") {
    const std::size_t n = 20000;
    const double dt = 0.5;
    for (double alpha : {0.7, 1.0, 1.5}) {
        increment_sampler s(levy_model::component({alpha}));
        const auto xs = draw_marginal(s, dt, n, 41);
        const double d = oracle::ks_statistic(
            xs, [&](double x) { return oracle::stable_cdf(alpha, dt, x); });
        INFO("alpha = " << alpha << " KS = " << d);
        CHECK(d < oracle::ks_critical(0.01, n));
    }

    SECTION("isotropic marginals in d = 2 agree with the one-dimensional law") {
        // subordination path: each coordinate of an isotropic alpha-stable
        // vector is itself alpha-stable with the same time scaling
        const double alpha = 1.4;
        increment_sampler s(levy_model::isotropic(alpha, 2));
        const auto xs = draw_marginal(s, dt, n, 42, 0);
        const double d = oracle::ks_statistic(
            xs, [&](double x) { return oracle::stable_cdf(alpha, dt, x); });
        CHECK(d < oracle::ks_critical(0.01, n));
    }

    SECTION("isotropic law is rotation invariant") {
        const double alpha = 0.9;
        increment_sampler s(levy_model::isotropic(alpha, 2));
        rng_stream rng(43, 0);
        std::vector<double> axis(n), diag(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto z = s.sample(dt, rng);
            axis[i] = z[0];
            diag[i] = (z[0] + z[1]) / std::sqrt(2.0);
        }
        CHECK(oracle::ks_two_sample(axis, diag) < oracle::ks_critical_two(0.01, n, n));
    }
}

TEST_CASE("one-sided stable sampler matches closed forms") {
    const std::size_t n = 20000;
    rng_stream rng(44, 0);
    std::vector<double> xs(n);
    for (auto& x : xs) x = stable_one_sided_std(rng, 0.5);

    SECTION("alpha = 1/2 law has an elementary CDF") {
        // Laplace exponent lambda^{1/2} <=> CDF erfc(1 / (2 sqrt(x)))
        const double d = oracle::ks_statistic(xs, oracle::levy_half_cdf);
        CHECK(d < oracle::ks_critical(0.01, n));
    }

    SECTION("Laplace transform at 1 is e^{-1}") {
        double acc = 0.0;
        for (double x : xs) acc += std::exp(-x);
        CHECK(acc / static_cast<double>(n) == Approx(std::exp(-1.0)).margin(0.01));
    }

    SECTION("general alpha Laplace transform") {
        const double alpha = 0.7, lambda = 2.0;
        rng_stream r2(45, 0);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += std::exp(-lambda * stable_one_sided_std(r2, alpha));
        CHECK(acc / static_cast<double>(n) ==
              Approx(std::exp(-std::pow(lambda, alpha))).margin(0.01));
    }
}

TEST_CASE("exact stable increments are self-similar in the step size") {
    const double alpha = 1.3;
    const std::size_t n = 20000;
    increment_sampler s(levy_model::component({alpha}));
    auto coarse = draw_marginal(s, 0.25, n, 46);
    auto fine = draw_marginal(s, 0.25 / 16.0, n, 47);
    for (auto& x : fine) x *= std::pow(16.0, 1.0 / alpha);
    CHECK(oracle::ks_two_sample(coarse, fine) < oracle::ks_critical_two(0.01, n, n));
}

TEST_CASE("compound Poisson increments stack over substeps") {
    // infinite divisibility: one step of dt must equal in law the sum of four
    // steps of dt/4, compensation and Gaussian surrogate included
    tempered_component c;
    c.c_plus = 1.0;
    c.alpha_plus = 0.5;
    c.atoms = {{-0.4, 0.8}};
    increment_plan plan;
    plan.cutoff = 1e-3;
    increment_sampler s(levy_model::one_sided({c}), plan);

    const std::size_t n = 20000;
    const double dt = 0.25;
    const auto whole = draw_marginal(s, dt, n, 48);
    rng_stream rng(49, 0);
    std::vector<double> stacked(n, 0.0);
    for (auto& x : stacked)
        for (int j = 0; j < 4; ++j) x += s.sample(dt / 4.0, rng)[0];
    CHECK(oracle::ks_two_sample(whole, stacked) < oracle::ks_critical_two(0.01, n, n));
}

TEST_CASE("truncation bookkeeping matches closed forms") {
    const double eps = 1e-3;

    SECTION("one-sided power law with an atom") {
        tempered_component c;
        c.c_plus = 1.0;
        c.alpha_plus = 0.5;
        c.atoms = {{0.5, 0.3}, {0.0005, 2.0}};  // second atom sits below the cutoff
        increment_plan plan;
        plan.cutoff = eps;
        increment_sampler s(levy_model::one_sided({c}), plan);

        CHECK_FALSE(s.exact());
        CHECK(s.cutoff_used() == eps);
        // int_eps^1 z * z^{-3/2} dz = 2 (1 - sqrt(eps)); kept atom adds w z
        CHECK(s.compensator_rate()[0] ==
              Approx(2.0 * (1.0 - std::sqrt(eps)) + 0.3 * 0.5).epsilon(1e-12));
        // int_eps^1 z^{-3/2} dz = 2 (eps^{-1/2} - 1); kept atom adds w
        CHECK(s.total_jump_rate() ==
              Approx(2.0 * (std::pow(eps, -0.5) - 1.0) + 0.3).epsilon(1e-12));
        // below the cutoff: int_0^eps z^{1/2} dz = (2/3) eps^{3/2} plus the small atom
        CHECK(s.surrogate_variance_rate()[0] ==
              Approx(2.0 / 3.0 * std::pow(eps, 1.5) + 2.0 * 0.0005 * 0.0005).epsilon(1e-12));
    }

    SECTION("exact kinds carry no truncation state") {
        increment_sampler s(levy_model::component({0.8, 1.2}));
        CHECK(s.exact());
        CHECK(s.cutoff_used() == 0.0);
        CHECK(s.total_jump_rate() == 0.0);
        CHECK(s.compensator_rate()[0] == 0.0);
        CHECK(s.compensator_rate()[1] == 0.0);
    }
}

TEST_CASE("gaussian surrogate responds to the plan mode") {
    tempered_component c;
    c.c_plus = 1.0;
    c.alpha_plus = 0.5;
    const auto model = levy_model::one_sided({c});

    increment_plan plan;
    plan.cutoff = 1e-2;  // variance rate (2/3) 1e-3 -- far above the automatic floor
    CHECK(increment_sampler(model, plan).gaussian_active(0));

    plan.gaussian = surrogate_mode::off;
    CHECK_FALSE(increment_sampler(model, plan).gaussian_active(0));

    plan.gaussian = surrogate_mode::automatic;
    plan.cutoff = 1e-6;  // variance rate (2/3) 1e-9 -- below the floor
    CHECK_FALSE(increment_sampler(model, plan).gaussian_active(0));

    plan.gaussian = surrogate_mode::on;
    CHECK(increment_sampler(model, plan).gaussian_active(0));
}

TEST_CASE("discrete measure sampler tracks the atom lattice") {
    const double alpha = 0.5;
    increment_plan plan;
    plan.discrete_truncation = 10000;
    plan.record_jumps = true;
    increment_sampler s(levy_model::discrete({alpha}), plan);

    double rate = 0.0, comp = 0.0;
    for (std::size_t m = 1; m <= 10000; ++m) {
        rate += std::pow(static_cast<double>(m), alpha - 1.0);
        comp += std::pow(static_cast<double>(m), alpha - 2.0);
    }
    CHECK(s.total_jump_rate() == Approx(rate).epsilon(1e-9));
    CHECK(s.compensator_rate()[0] == Approx(comp).epsilon(1e-9));

    SECTION("all recorded jumps sit on the lattice and atom frequencies match") {
        rng_stream rng(50, 0);
        std::vector<jump_record> jumps;
        const std::size_t n = 4000;
        const double dt = 0.02;  // about four jumps per draw at this rate
        for (std::size_t i = 0; i < n; ++i) s.sample(dt, rng, &jumps);
        REQUIRE(!jumps.empty());
        std::size_t unit = 0;
        for (const auto& j : jumps) {
            const double inv = 1.0 / j.z;
            CHECK(inv == Approx(std::round(inv)).margin(1e-9));
            if (j.z == 1.0) ++unit;
        }
        // P(atom = 1) = w_1 / rate; binomial four-sigma band
        const double p = 1.0 / rate;
        const double m = static_cast<double>(jumps.size());
        CHECK(static_cast<double>(unit) / m ==
              Approx(p).margin(4.0 * std::sqrt(p * (1.0 - p) / m)));
    }

    SECTION("compensation centres the increment") {
        rng_stream rng(51, 0);
        const std::size_t n = 50000;
        const double dt = 0.05;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += s.sample(dt, rng)[0];
        const double mean = acc / static_cast<double>(n);
        // per-unit-time variance sum n^{alpha-3} < zeta(2.5)
        const double sd = std::sqrt(1.342 * dt / static_cast<double>(n));
        CHECK(mean == Approx(0.0).margin(4.0 * sd));
    }
}

TEST_CASE("recorded jumps reproduce the compensated increment") {
    tempered_component c;
    c.c_plus = 1.0;
    c.alpha_plus = 0.6;
    c.c_minus = 0.5;
    c.alpha_minus = 0.3;
    increment_plan plan;
    plan.cutoff = 1e-3;
    plan.gaussian = surrogate_mode::off;
    plan.record_jumps = true;
    increment_sampler s(levy_model::one_sided({c}), plan);

    rng_stream rng(52, 0);
    const double dt = 0.5;
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<jump_record> jumps;
        const auto z = s.sample(dt, rng, &jumps);
        double rebuilt = -dt * s.compensator_rate()[0];
        for (const auto& j : jumps) {
            CHECK(j.axis == 0);
            CHECK(std::abs(j.z) > plan.cutoff);
            CHECK(std::abs(j.z) <= 1.0);
            rebuilt += j.z;
        }
        CHECK(z[0] == Approx(rebuilt).margin(1e-12));
    }
}

TEST_CASE("streams are deterministic in the seed and decorrelated across ids") {
    increment_sampler s(levy_model::component({1.2}));
    const auto a = draw_marginal(s, 0.1, 64, 53);
    const auto b = draw_marginal(s, 0.1, 64, 53);
    CHECK(a == b);

    rng_stream r1(53, 1), r2(53, 2);
    bool any_diff = false;
    for (int i = 0; i < 64; ++i)
        if (r1.next_u64() != r2.next_u64()) any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("sampler rejects invalid plans and analysis-only kinds") {
    const auto model = levy_model::component({1.0});
    increment_plan plan;
    plan.cutoff = 1.0;
    CHECK_THROWS_AS(increment_sampler(model, plan), error);

    increment_plan plan2;
    plan2.discrete_truncation = 4;
    CHECK_THROWS_AS(increment_sampler(levy_model::discrete({0.5}), plan2), error);

    CHECK_THROWS_AS(increment_sampler(levy_model::subordinate({1.0}, {1.0})), error);

    increment_sampler ok(model);
    rng_stream rng(54, 0);
    CHECK_THROWS_AS(ok.sample(0.0, rng), error);
}
