#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "anisolevy/hypotheses.hpp"
#include "anisolevy/rng.hpp"

using namespace anisolevy;
using Catch::Approx;

TEST_CASE("one-step rate exponents match hand-evaluated cases") {
    // gamma = 2, delta = 1, beta = 1, chi = 1/2:
    // min(1 + 1/2, (1 + min(1/2, 1/2)) / 2) = min(3/2, 3/4)
    CHECK(kappa_ge1(2.0, 1.0, 1.0, 0.5) == Approx(0.75).epsilon(1e-14));

    // gamma = 1.6, delta = 1.4, beta = 1, chi = 0.9:
    // min(1 + 1/1.6, (1 + min(0.9, 0.875)) / 1.6) = 1.875/1.6
    CHECK(kappa_ge1(1.6, 1.4, 1.0, 0.9) == Approx(1.171875).epsilon(1e-14));

    // gamma = 1/2, beta = 1, chi = 1/2:
    // min(1 + 1, 2 + 1/2, 1/(1 - 1/2)) = 2
    CHECK(kappa_lt1(0.5, 1.0, 0.5) == Approx(2.0).epsilon(1e-14));

    SECTION("rates are positive and bounded by their structural caps") {
        rng_stream rng(70, 0);
        for (int i = 0; i < 200; ++i) {
            const double gamma = 1.0 + rng.uniform01();
            const double delta = gamma * (0.05 + 0.95 * rng.uniform01());
            const double beta = rng.uniform01();
            const double chi = 0.05 + 0.95 * rng.uniform01();
            const double k = kappa_ge1(gamma, delta, beta, chi);
            CHECK(k > 0.0);
            CHECK(k <= 2.0);

            const double g2 = 0.05 + 0.9 * rng.uniform01();
            const double b2 = rng.uniform01() * 0.999;
            const double k2 = kappa_lt1(g2, b2, chi);
            CHECK(k2 > 0.0);
            CHECK(k2 <= 1.0 / (1.0 - std::min(b2, chi)) + 1e-12);
        }
    }

    SECTION("regime guards reject out-of-range exponents") {
        CHECK_THROWS_AS(kappa_ge1(0.9, 0.5, 1.0, 0.5), error);
        CHECK_THROWS_AS(kappa_ge1(2.0, 2.5, 1.0, 0.5), error);  // delta > gamma
        CHECK_THROWS_AS(kappa_lt1(1.0, 1.0, 0.5), error);
        CHECK_THROWS_AS(kappa_lt1(0.5, 1.0, 1.0), error);  // beta^chi = 1
        CHECK_THROWS_AS(check_general({0.5}, 2.1, 1.0, 1.0, 1.0), error);
        CHECK_THROWS_AS(check_general({0.5}, 1.0, 1.0, 1.0, 0.0), error);
        CHECK_THROWS_AS(check_general({2.0}, 1.0, 1.0, 1.0, 1.0), error);
    }
}

TEST_CASE("component-wise rates reduce to the single-regime formulas") {
    rng_stream rng(71, 0);
    for (int i = 0; i < 200; ++i) {
        const std::vector<double> gammas = {0.2 + 0.7 * rng.uniform01(),
                                            1.0 + 0.9 * rng.uniform01()};
        const double delta_min = 0.05 + 0.9 * rng.uniform01();
        const double beta = rng.uniform01() * 0.999;
        const double chi = 0.05 + 0.9 * rng.uniform01();
        const double rho = std::min(beta, chi);

        // gamma_1 >= 1: the shared-envelope formula with gamma_max
        const double gm = std::max(gammas[0], gammas[1]);
        CHECK(kappa_diagonal(1, gammas, std::min(delta_min, gm), beta, chi, rho) ==
              Approx(kappa_ge1(gm, std::min(delta_min, gm), beta, chi)).epsilon(1e-13));

        // gamma_0 < 1: own rate capped by the shared flow step exponent
        const double own = std::min(1.0 + std::min(beta, chi) / gammas[0],
                                    1.0 / gammas[0] + chi);
        CHECK(kappa_diagonal(0, gammas, std::min(delta_min, gm), beta, chi, rho) ==
              Approx(std::min(own, 1.0 / (1.0 - rho))).epsilon(1e-13));
    }
}

TEST_CASE("single-axis stable preset agrees with the closed-form region") {
    for (double alpha : {0.7, 0.9, 1.3}) {
        for (int i = 0; i < 100; ++i) {
            for (int j = 0; j < 100; ++j) {
                const double beta = static_cast<double>(i) / 99.0;
                const double chi = 0.01 + 0.99 * static_cast<double>(j) / 99.0;
                const bool want = alpha >= 1.0 || alpha + std::min(beta, chi) > 1.0 + 1e-12;
                const auto rep = check_preset_z1(alpha, beta, chi);
                if (rep.satisfied != want) {
                    INFO("alpha " << alpha << " beta " << beta << " chi " << chi);
                    REQUIRE(rep.satisfied == want);
                }
            }
        }
    }
    CHECK(check_preset_z1(1.0, 0.0, 0.01).satisfied);
}

TEST_CASE("independent-axes preset instantiates the general conditions") {
    // the preset pins the moment pair at (gamma, delta) = (alpha_max, alpha_min)
    rng_stream rng(72, 0);
    for (int i = 0; i < 400; ++i) {
        const double a1 = 0.2 + 1.7 * rng.uniform01();
        const double a2 = 0.2 + 1.7 * rng.uniform01();
        const double beta = rng.uniform01();
        const double chi = 0.05 + 0.95 * rng.uniform01();
        const std::vector<double> alphas = {a1, a2};
        const auto preset = check_preset_z2(alphas, beta, chi);
        const auto general = check_general(alphas, std::max(a1, a2), std::min(a1, a2),
                                           beta, chi);
        if (preset.satisfied != general.satisfied) {
            INFO("alphas " << a1 << "," << a2 << " beta " << beta << " chi " << chi);
            REQUIRE(preset.satisfied == general.satisfied);
        }
    }

    SECTION("worked instance used by the rate experiments") {
        const auto rep = check_preset_z2({1.5, 1.5}, 1.0, 0.9);
        CHECK(rep.satisfied);
        // alpha_min + beta^alpha_min = 1.5 + 1.5 -> lhs 3 on the first inequality
        CHECK(rep.inequalities[0].lhs == Approx(1.5 + 1.0 * std::min(1.0, 1.5)).epsilon(1e-14));
        CHECK(rep.inequalities[1].lhs == Approx(1.0 + std::min(0.9, 1.0)).epsilon(1e-14));
    }
}

TEST_CASE("diagonal preset imposes conditions only below index one") {
    SECTION("all components at or above one pass unconditionally") {
        const auto rep = check_preset_z2_diagonal({1.0, 1.7}, {0.0, 0.0}, {0.1, 0.1});
        CHECK(rep.satisfied);
    }

    SECTION("a component below one brings its own inequality and the shared floor") {
        // 0.6 + (0.6/1.5) * 0.5 = 0.8 < 1: fails
        CHECK_FALSE(check_preset_z2_diagonal({0.6, 1.5}, {1.0, 1.0}, {0.5, 1.0}).satisfied);
        // 0.9 + (0.9/1.5) * 0.9 = 1.44 > 1 and floor 0.9 + 0.9 > 1: passes
        CHECK(check_preset_z2_diagonal({0.9, 1.5}, {1.0, 1.0}, {0.9, 1.0}).satisfied);
        // floor violation: alpha_min + min beta^chi = 0.9 + 0.05 < 1
        CHECK_FALSE(
            check_preset_z2_diagonal({0.9, 1.5}, {1.0, 0.05}, {0.9, 1.0}).satisfied);
    }
}

TEST_CASE("elliptic corollaries search the admissible moment pairs") {
    const auto good = check_corollary_elliptic({1.2, 0.8}, 1.0);
    CHECK(good.satisfied);
    CHECK(good.rule == "corollary_elliptic");
    CHECK_FALSE(good.note.empty());
    double min_margin = 1e300;
    for (const auto& iq : good.inequalities) min_margin = std::min(min_margin, iq.margin);
    CHECK(min_margin > 0.0);

    // alpha = 0.3 everywhere: alpha (1 + bc/gamma) stays below 1 for every
    // admissible pair, so the best margin is still a failure
    CHECK_FALSE(check_corollary_elliptic({0.3, 0.3}, 0.3).satisfied);

    const auto diag = check_corollary_elliptic_diagonal({1.2, 0.8}, {1.0, 0.9});
    CHECK(diag.satisfied);
    CHECK(diag.rule == "corollary_elliptic_diagonal");
}

TEST_CASE("strictness margin rejects boundary equality") {
    // alpha (1 + min(beta,delta)/gamma) = 0.5 * 2 = 1 exactly: strict > fails
    CHECK_FALSE(check_general({0.5}, 1.0, 1.0, 1.0, 1.0).satisfied);
    CHECK(check_general({0.5 + 1e-6}, 1.0, 1.0, 1.0, 1.0).satisfied);

    SECTION("zero drift replaces beta by one") {
        const auto forced = check_general({0.9}, 1.0, 1.0, 0.1, 1.0, true);
        const auto manual = check_general({0.9}, 1.0, 1.0, 1.0, 1.0, false);
        REQUIRE(forced.inequalities.size() == manual.inequalities.size());
        for (std::size_t i = 0; i < forced.inequalities.size(); ++i)
            CHECK(forced.inequalities[i].lhs == Approx(manual.inequalities[i].lhs));
        CHECK_FALSE(forced.note.empty());
    }
}

TEST_CASE("regularity exponent derivation reproduces the worked plan") {
    // single axis: a = 1, alpha = 1.2, kappa = 1, chi = delta = 1/2,
    // gamma = 3/2, eta = 0.05, c = 1.07
    const auto plan =
        derive_lambda({1.0}, {1.2}, {1.0}, 0.5, 0.5, 1.5, 0.05, {1.07});
    REQUIRE(plan.feasible);
    CHECK(plan.b_cap == Approx(1.0).epsilon(1e-14));
    CHECK(plan.flow_terms[0] == Approx(1.07 * 0.5 / 1.5).epsilon(1e-12));
    CHECK(plan.window_terms[0] == Approx(1.0 - 0.05 - 1.07 / 1.2).epsilon(1e-12));
    CHECK(plan.coupling_terms[0] == Approx(0.05 * (1.07 - 1.0)).epsilon(1e-12));
    CHECK(plan.lambda == Approx(0.0035).epsilon(1e-9));

    SECTION("defaults pick a feasible midpoint when eta and c are omitted") {
        const auto def = derive_lambda({1.0}, {1.2}, {1.0}, 0.5, 0.5, 1.5);
        CHECK(def.feasible);
        CHECK(def.lambda > 0.0);
        // eta_max = min(a delta, a - B/alpha) = min(0.5, 1 - 1/1.2) = 1/6
        CHECK(def.eta == Approx(1.0 / 12.0).epsilon(1e-12));
        // c window: (B/a, alpha (1 - eta/a)) = (1, 1.2 (1 - 1/12))
        CHECK(def.c[0] == Approx(0.5 * (1.0 + 1.2 * (1.0 - 1.0 / 12.0))).epsilon(1e-12));
    }

    SECTION("kappa alpha <= 1 is infeasible outright") {
        CHECK_THROWS_AS(derive_lambda({1.0}, {1.2}, {0.8}, 0.5, 0.5, 1.5), error);
    }

    SECTION("a hostile eta turns the window term nonpositive") {
        const auto bad = derive_lambda({1.0}, {1.2}, {1.0}, 0.5, 0.5, 1.5, 0.5, {1.07});
        CHECK_FALSE(bad.feasible);
        CHECK_FALSE(bad.note.empty());
        CHECK(bad.lambda <= 0.0);
    }

    SECTION("anisotropy vector must sum to the dimension") {
        CHECK_THROWS_AS(derive_lambda({0.5}, {1.2}, {1.0}, 0.5, 0.5, 1.5), error);
        CHECK_THROWS_AS(derive_lambda({1.4, 0.8}, {1.2, 1.2}, {1.0}, 0.5, 0.5, 1.5), error);
    }

    SECTION("a single kappa broadcasts across axes") {
        const auto two =
            derive_lambda({1.2, 0.8}, {1.3, 1.9}, {1.2}, 0.5, 0.5, 1.5);
        CHECK(two.feasible);
        CHECK(two.coupling_terms.size() == 4);
        CHECK(two.flow_terms.size() == 2);
        // lambda is the minimum over every listed term
        double m = 1e300;
        for (double v : two.flow_terms) m = std::min(m, v);
        for (double v : two.window_terms) m = std::min(m, v);
        for (double v : two.coupling_terms) m = std::min(m, v);
        CHECK(two.lambda == Approx(m).epsilon(1e-14));
    }
}
