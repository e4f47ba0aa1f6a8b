#include <doctest.h>

#include <cmath>
#include <functional>

#include "drkf/errors.hpp"
#include "drkf/ratapprox.hpp"
#include "test_models.hpp"

using namespace drkf;

namespace {

VecXd grid_density(int N, const std::function<double(double)>& f) {
    VecXd v(N);
    for (int n = 0; n < N; ++n) v(n) = f(2.0 * M_PI * n / N);
    return v;
}

double max_ratio_error(const RationalPSD& r, const VecXd& M) {
    const int N = static_cast<int>(M.size());
    const VecXd P = r.P.eval_grid(N), Q = r.Q.eval_grid(N);
    double e = 0.0;
    for (int n = 0; n < N; ++n) e = std::max(e, std::abs(P(n) / Q(n) - M(n)));
    return e;
}

}  // namespace

TEST_CASE("constant density at order zero and eps = 0") {
    const VecXd M = VecXd::Constant(128, 3.7);
    const auto r = feasibility_lp(M, 0, 0.0);
    REQUIRE(r.has_value());
    CHECK(r->P.coeffs(0) == doctest::Approx(3.7).epsilon(1e-9));
    CHECK(r->Q.coeffs(0) == 1.0);
}

TEST_CASE("degree-1 density is reproduced exactly") {
    const VecXd M = grid_density(512, [](double w) { return 1.25 + std::cos(w); });
    const auto r = feasibility_lp(M, 1, 1e-9);
    REQUIRE(r.has_value());
    CHECK(r->P.coeffs(0) == doctest::Approx(1.25).epsilon(1e-6));
    CHECK(r->P.coeffs(1) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(std::abs(r->Q.coeffs(1)) < 1e-6);
}

TEST_CASE("interval analysis at order zero") {
    const VecXd M = grid_density(512, [](double w) { return 1.25 + std::cos(w); });
    CHECK_FALSE(feasibility_lp(M, 0, 0.4).has_value());
    const auto r = feasibility_lp(M, 0, 1.0);
    REQUIRE(r.has_value());
    CHECK(r->P.coeffs(0) == doctest::Approx(1.25).epsilon(1e-8));
}

TEST_CASE("best precision finds exact representations and is monotone in order") {
    const VecXd M = grid_density(512, [](double w) { return 2.0 + 1.2 * std::cos(w) + 0.4 * std::cos(2 * w); });
    const auto r2 = best_precision(M, 2, 1e-10);
    CHECK(r2.eps <= 1e-9);
    CHECK(max_ratio_error(r2, M) <= r2.eps + 1e-9);

    const auto r1 = best_precision(M, 1);
    const auto r3 = best_precision(M, 3);
    CHECK(r3.eps <= r2.eps + 1e-12);
    CHECK(r2.eps <= r1.eps + 1e-12);
}

TEST_CASE("the grid is the test set: error bound holds exactly") {
    GaussianRng rng(31);
    VecXd a(5);
    for (int k = 0; k < 5; ++k) a(k) = 0.3 * rng() / (k + 1);
    const VecXd M = grid_density(256, [&](double w) {
        double s = a(0);
        for (int k = 1; k < 5; ++k) s += a(k) * std::cos(k * w);
        return std::exp(s) + 0.5;
    });
    for (int m : {1, 2}) {
        const auto r = best_precision(M, m, 1e-9);
        CHECK(max_ratio_error(r, M) <= r.eps * (1 + 1e-6) + 1e-9);
    }
}

TEST_CASE("least order selection") {
    const VecXd Mc = VecXd::Constant(64, 2.0);
    CHECK(least_order(Mc, 1e-8, 4).P.m == 0);

    const VecXd M = grid_density(512, [](double w) { return 1.25 + std::cos(w); });
    CHECK(least_order(M, 1e-6, 4).P.m == 1);

    // monotone: a looser precision never needs a higher order
    const VecXd Mw = grid_density(512, [](double w) { return 2.0 + std::cos(w) + 0.3 * std::cos(3 * w); });
    int prev = 10;
    for (double eps : {1e-4, 1e-2, 0.3, 1.0}) {
        const int m = least_order(Mw, eps, 8).P.m;
        CHECK(m <= prev);
        prev = m;
    }

    CHECK_THROWS_AS(least_order(M, 1e-12, 0), OrderCapExceeded);
}

TEST_CASE("feasibility is monotone in eps and order (randomized)") {
    GaussianRng rng(37);
    for (int rep = 0; rep < 3; ++rep) {
        VecXd a(4);
        for (int k = 0; k < 4; ++k) a(k) = 0.4 * rng() / (k + 1);
        const VecXd M = grid_density(128, [&](double w) {
            double s = a(0);
            for (int k = 1; k < 4; ++k) s += a(k) * std::cos(k * w);
            return std::exp(s) + 0.2;
        });
        for (int m = 0; m < 3; ++m) {
            bool prev = false;
            for (double eps : {1e-3, 1e-2, 0.1, 1.0, 10.0}) {
                const bool feas = feasibility_lp(M, m, eps).has_value();
                CHECK((!prev || feas));  // once feasible, stays feasible
                prev = prev || feas;
                if (feas) CHECK(feasibility_lp(M, m + 1, eps).has_value());
            }
        }
    }
}

TEST_CASE("polynomial spectral factor worked examples") {
    LaurentPolynomial c{0, VecXd::Constant(1, 4.0)};
    const auto sc = poly_spectral_factor(c);
    CHECK(sc.coeffs.size() == 1);
    CHECK(sc.coeffs(0) == doctest::Approx(2.0));

    LaurentPolynomial p{1, VecXd(2)};
    p.coeffs << 1.25, 0.5;
    const auto sp = poly_spectral_factor(p);
    REQUIRE(sp.coeffs.size() == 2);
    CHECK(sp.coeffs(0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sp.coeffs(1) == doctest::Approx(0.5).epsilon(1e-9));

    // defining identity |S|^2 = P on a grid
    for (int n = 0; n < 128; ++n) {
        const double w = 2.0 * M_PI * n / 128;
        CHECK(std::abs(std::norm(sp.eval(std::polar(1.0, w))) - p.eval(w)) < 1e-8);
    }
}

TEST_CASE("roots pinned to the circle are rejected") {
    // P(z) = 2 - z - z^{-1} = |1 - z^{-1}|^2 has a double root at z = 1
    LaurentPolynomial p{1, VecXd(2)};
    p.coeffs << 2.0, -1.0;
    CHECK_THROWS_AS(poly_spectral_factor(p), RootNearCircle);
}

TEST_CASE("rational factor realization") {
    // order 0
    RationalPSD c;
    c.P = {0, VecXd::Constant(1, 9.0)};
    c.Q = {0, VecXd::Constant(1, 1.0)};
    const auto f0 = rational_factor(c);
    CHECK(f0.order() == 0);
    CHECK(f0.d_sqrt == doctest::Approx(3.0));
    CHECK(std::abs(f0.eval(std::polar(1.0, 0.3)) - 3.0) < 1e-12);

    // the worked degree-1 example
    RationalPSD r;
    r.P = {1, VecXd(2)};
    r.P.coeffs << 1.25, 0.5;
    r.Q = {1, VecXd(2)};
    r.Q.coeffs << 1.0, 0.0;
    const auto f = rational_factor(r);
    REQUIRE(f.order() == 1);
    CHECK(f.d_sqrt == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(f.A(0, 0) == doctest::Approx(0.0));
    CHECK(f.B(0) == doctest::Approx(1.0));
    CHECK(f.C(0) == doctest::Approx(0.5).epsilon(1e-9));

    // frequency match against S_P/S_Q and |U|^2 = P/Q
    for (int n = 0; n < 64; ++n) {
        const double w = 2.0 * M_PI * n / 64;
        const cplx u = f.eval(std::polar(1.0, w));
        CHECK(std::abs(std::norm(u) - r.P.eval(w) / r.Q.eval(w)) < 1e-9);
    }
}

TEST_CASE("factor of a nontrivial rational density: stability and fidelity") {
    GaussianRng rng(41);
    const VecXd M = grid_density(512, [&](double w) {
        return (2.0 + 1.1 * std::cos(w)) / (1.3 + 0.8 * std::cos(w));
    });
    const auto r = best_precision(M, 2, 1e-9);
    const auto f = rational_factor(r);
    CHECK(spectral_radius(f.A) < 1.0);
    CHECK(spectral_radius(f.A - f.B * f.C) < 1.0);
    const VecXcd u = f.eval_grid(512);
    const VecXd P = r.P.eval_grid(512), Q = r.Q.eval_grid(512);
    for (int n = 0; n < 512; ++n)
        CHECK(std::abs(std::norm(u(n)) - P(n) / Q(n)) < 1e-8 * std::max(1.0, P(n) / Q(n)));
}

TEST_CASE("refined-grid report on an exact representation") {
    const VecXd M = grid_density(256, [](double w) { return 1.25 + std::cos(w); });
    const auto r = best_precision(M, 1, 1e-10);
    const auto rep = refined_error_report(r, M);
    CHECK(rep.min_P > 0.0);
    CHECK(rep.min_Q > 0.0);
    CHECK(rep.max_error < 1e-6);
}

TEST_CASE("JSON round trip") {
    RationalPSD r;
    r.P = {2, VecXd(3)};
    r.P.coeffs << 2.0, 0.5, -0.1;
    r.Q = {2, VecXd(3)};
    r.Q.coeffs << 1.0, 0.2, 0.05;
    r.eps = 0.125;
    const auto r2 = rational_psd_from_json(rational_psd_json(r));
    CHECK((r2.P.coeffs - r.P.coeffs).norm() == 0.0);
    CHECK((r2.Q.coeffs - r.Q.coeffs).norm() == 0.0);
    CHECK(r2.eps == r.eps);
}

TEST_CASE("relative-metric synthesis mode stays multiplicatively bounded") {
    // a density with a large dynamic range: the absolute-optimal order-1 fit
    // may pass near zero, the relative-mode fit cannot
    const VecXd M = grid_density(512, [](double w) { return 1.0 + 30.0 / (1.3 + std::cos(w)); });
    const auto r = best_precision(M, 1, 1e-9, ErrorMetric::Relative);
    const VecXd P = r.P.eval_grid(512), Q = r.Q.eval_grid(512);
    for (int n = 0; n < 512; ++n) {
        CHECK(P(n) / Q(n) >= (1.0 - r.eps) * M(n) - 1e-7);
        CHECK(P(n) / Q(n) <= (1.0 + r.eps) * M(n) + 1e-7);
    }
    CHECK(r.eps < 1.0);
}
