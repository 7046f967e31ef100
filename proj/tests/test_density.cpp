#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "anisolevy/grid.hpp"
#include "anisolevy/rng.hpp"
#include "anisolevy/sampling.hpp"
#include "anisolevy/stable_density.hpp"
#include "oracle_helpers.hpp"

using namespace anisolevy;
using Catch::Approx;

namespace {

double cauchy_pdf(double x, double t) { return t / (oracle::pi * (t * t + x * x)); }

double gauss_pdf(double x, double t) {
    return std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * oracle::pi * t);
}

}  // namespace

TEST_CASE("Fourier inversion reproduces the closed-form stable densities") {
    SECTION("Cauchy law at alpha = 1") {
        const double t = 0.7;
        const auto f = stable_density_1d(1.0, t);
        double worst = 0.0;
        for (std::size_t j = 0; j < f.values.size(); ++j) {
            const double x = f.grid.coord(0, j);
            worst = std::max(worst, std::abs(f.values[j] - cauchy_pdf(x, t)));
        }
        CHECK(worst < 1e-6);
        // peak value 1/(pi t)
        const std::size_t mid = f.values.size() / 2;
        CHECK(f.grid.coord(0, mid) == Approx(0.0).margin(1e-12));
        CHECK(f.values[mid] == Approx(1.0 / (oracle::pi * t)).epsilon(1e-7));
    }

    SECTION("Gaussian endpoint at alpha = 2") {
        const double t = 0.4;
        const auto f = stable_density_1d(2.0, t);
        double worst = 0.0;
        for (std::size_t j = 0; j < f.values.size(); ++j) {
            const double x = f.grid.coord(0, j);
            worst = std::max(worst, std::abs(f.values[j] - gauss_pdf(x, t)));
        }
        CHECK(worst < 1e-6);
        const std::size_t mid = f.values.size() / 2;
        CHECK(f.values[mid] == Approx(1.0 / std::sqrt(4.0 * oracle::pi * t)).epsilon(1e-7));
    }

    SECTION("heavy-tailed index against direct quadrature") {
        const double alpha = 0.7, t = 1.0;
        stable_density_options opt;
        opt.half_width = 30.0;
        opt.step = 0.01;
        opt.mass_error_threshold = 0.2;  // fat tails: mass outside the window is fine here
        const auto f = stable_density_1d(alpha, t, opt);
        for (double x : {0.0, 0.3, 1.7, 5.0, 20.0}) {
            const auto j = static_cast<std::size_t>(
                std::llround((x - f.grid.origin[0]) / f.grid.step[0]));
            CHECK(f.values[j] == Approx(oracle::stable_pdf(alpha, t, x)).margin(1e-6));
        }
    }
}

TEST_CASE("density metadata reports the grid bookkeeping") {
    stable_density_options opt;
    opt.half_width = 3.0;
    opt.step = 0.01;
    opt.mass_error_threshold = 0.2;
    const auto f = stable_density_1d(1.3, 0.5, opt);

    CHECK(f.grid.step[0] == Approx(0.01).epsilon(1e-14));
    CHECK(f.grid.origin[0] == Approx(-3.0).margin(1e-9));
    CHECK(f.grid.shape[0] == 601);
    // the narrow window leaves a few percent of mass outside by design
    CHECK(f.meta.at("mass_deficit") >= 0.0);
    CHECK(f.meta.at("mass_deficit") < 0.2);
    CHECK(f.meta.at("alias_bound") <= 1e-7 * 1.001);
    CHECK(f.meta.at("period") > 6.0);
    CHECK(f.meta.at("decimation") >= 1.0);
    for (double v : f.values) CHECK(v >= 0.0);

    SECTION("auto window pushes the deficit below the mass target") {
        const auto g = stable_density_1d(1.5, 1.0);
        CHECK(g.meta.at("mass_deficit") < 1e-6 + 1e-12);
    }

    SECTION("an impossible node budget is a truncation error") {
        stable_density_options tiny;
        tiny.max_nodes = std::size_t(1) << 14;
        CHECK_THROWS_AS(stable_density_1d(0.4, 1.0, tiny), error);
    }

    SECTION("rejected arguments") {
        CHECK_THROWS_AS(stable_density_1d(0.0, 1.0), error);
        CHECK_THROWS_AS(stable_density_1d(2.1, 1.0), error);
        CHECK_THROWS_AS(stable_density_1d(1.0, 0.0), error);
    }
}

TEST_CASE("box mollifier deposits exact on-grid mass") {
    grid_spec grid;
    grid.origin = {-2.0, -2.0};
    grid.step = {0.05, 0.05};
    grid.shape = {81, 81};
    const std::vector<double> a = {1.2, 0.8};
    const double r = 0.5;

    SECTION("interior point keeps unit mass and the flat kernel height") {
        mollify_accumulator acc(r, a, grid);
        acc.deposit(std::vector<double>{0.0, 0.0}, 1.0);
        CHECK(acc.deposited_weight() == 1.0);
        const auto f = acc.finish();
        CHECK(f.meta.at("leakage") == Approx(0.0).margin(1e-12));
        CHECK(f.mass() == Approx(1.0).epsilon(1e-12));
        // kernel scale (2r)^{-2} = 1 on fully covered cells; node (0,0) is one
        const std::size_t mid = 40 * 81 + 40;
        CHECK(f.values[mid] == Approx(1.0).epsilon(1e-12));
    }

    SECTION("a corner point leaks and trips the tolerance") {
        mollify_accumulator acc(r, a, grid);
        acc.deposit(std::vector<double>{2.0, 2.0}, 1.0);
        CHECK_THROWS_AS(acc.finish(0.02), error);

        mollify_accumulator acc2(r, a, grid);
        acc2.deposit(std::vector<double>{2.0, 2.0}, 1.0);
        const auto f = acc2.finish(0.9);
        const double leak = f.meta.at("leakage");
        CHECK(leak > 0.3);
        CHECK(leak < 0.8);
    }

    SECTION("the one-shot wrapper matches streaming deposits") {
        weighted_ensemble mu;
        mu.dim = 2;
        mu.points = {0.1, -0.2, -0.4, 0.3};
        mu.weights = {0.7, 1.3};
        const auto f1 = mollify(mu, r, a, grid);

        mollify_accumulator acc(r, a, grid);
        acc.deposit(&mu.points[0], 0.7);
        acc.deposit(&mu.points[2], 1.3);
        const auto f2 = acc.finish();
        REQUIRE(f1.values.size() == f2.values.size());
        double worst = 0.0;
        for (std::size_t j = 0; j < f1.values.size(); ++j)
            worst = std::max(worst, std::abs(f1.values[j] - f2.values[j]));
        CHECK(worst == 0.0);
    }
}

TEST_CASE("mollified stable sample approaches the exact density in L1") {
    const double t = 1.0;
    stable_density_options opt;
    opt.half_width = 15.0;
    opt.step = 0.05;
    opt.mass_error_threshold = 0.1;  // Cauchy mass beyond 15 is about 4 percent
    const auto exact = stable_density_1d(1.0, t, opt);

    mollify_accumulator acc(0.1, {1.0}, exact.grid);
    rng_stream rng(80, 0);
    const std::size_t n = 100000;
    const double w = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = stable_symmetric_std(rng, 1.0);  // Cauchy at t = 1
        acc.deposit(&x, w);
    }
    const auto emp = acc.finish(0.1);

    double l1 = 0.0;
    for (std::size_t j = 0; j < emp.values.size(); ++j)
        l1 += std::abs(emp.values[j] - exact.values[j]);
    l1 *= exact.grid.cell_volume();
    CHECK(l1 < 0.08);
}

TEST_CASE("L1 shift differences match the unimodal closed form") {
    // for a symmetric unimodal density, int |f(x+h) - f(x)| dx = 4 F(h/2) - 2;
    // for the Cauchy law that is (4/pi) atan(h / (2t))
    const double t = 0.5;
    stable_density_options opt;
    opt.half_width = 60.0;
    opt.step = 0.01;
    opt.mass_error_threshold = 0.02;  // Cauchy mass beyond 60 is about half a percent
    const auto f = stable_density_1d(1.0, t, opt);
    for (double h : {0.0625, 0.25, 1.0}) {
        const double want = 4.0 / oracle::pi * std::atan(h / (2.0 * t));
        CHECK(l1_shift_difference(f, 0, h) == Approx(want).margin(2e-3));
        // shifting left must give the same by symmetry
        CHECK(l1_shift_difference(f, 0, -h) ==
              Approx(l1_shift_difference(f, 0, h)).epsilon(1e-9));
    }
}

TEST_CASE("Besov seminorm of the unit indicator has the textbook value") {
    grid_spec grid;
    grid.origin = {-2.0};
    grid.step = {1.0 / 512.0};
    grid.shape = {5 * 512 + 1};
    const auto f = rasterize(
        [](const std::vector<double>& x) { return x[0] >= 0.0 && x[0] <= 1.0 ? 1.0 : 0.0; },
        grid);

    // ||f||_1 = 1; sup_h |h|^{-1/2} * 2|h| = 2 at |h| = 1; total 3
    const auto res = besov_norm(f, {1.0}, 0.5);
    CHECK(res.base == Approx(1.0).margin(0.01));
    CHECK(res.axis_terms[0] == Approx(2.0).margin(0.01));
    CHECK(res.total == Approx(3.0).margin(0.02));
    CHECK(std::abs(res.argmax_shift[0]) == Approx(1.0));

    SECTION("the smoothness ratio must stay inside the admissible band") {
        CHECK_THROWS_AS(besov_norm(f, {1.0}, 1.2), error);
        CHECK_THROWS_AS(besov_norm(f, {1.0}, 0.0), error);
    }

    SECTION("sup-norm scale reports the peak as its base") {
        const auto hz = holder_zygmund_norm(f, {1.0}, 0.5);
        CHECK(hz.base == Approx(1.0));
        CHECK(hz.total >= hz.base);
        CHECK(hz.axis_terms[0] > 0.0);
    }
}

TEST_CASE("product densities glue independent axes") {
    stable_density_options opt;
    opt.half_width = 20.0;
    opt.step = 0.05;
    opt.mass_error_threshold = 0.05;  // about 3 percent of Cauchy mass sits beyond 20
    const auto c1 = stable_density_1d(1.0, 1.0, opt);
    const auto prod = product_density({&c1, &c1});
    CHECK(prod.grid.rank() == 2);
    CHECK(prod.values.size() == c1.values.size() * c1.values.size());
    CHECK(prod.mass() == Approx(1.0).margin(0.07));

    // centre value is (1/pi)^2
    const std::size_t mid1 = c1.values.size() / 2;
    const std::size_t mid = mid1 * c1.values.size() + mid1;
    CHECK(prod.values[mid] == Approx(1.0 / (oracle::pi * oracle::pi)).margin(1e-6));
}

TEST_CASE("endpoint ensembles are weighted by the smallest singular value") {
    const auto mu = weighted_endpoint_measure(
        [](const std::vector<double>& x) {
            // diag(2, 3) at the origin, singular elsewhere
            const bool origin = x[0] == 0.0 && x[1] == 0.0;
            return std::vector<double>{origin ? 2.0 : 1.0, 0.0, 0.0, origin ? 3.0 : 0.0};
        },
        {0.0, 0.0, 1.0, 1.0}, 2);
    REQUIRE(mu.size() == 2);
    CHECK(mu.weights[0] == Approx(2.0).epsilon(1e-12));
    CHECK(mu.weights[1] == Approx(0.0).margin(1e-15));
}
