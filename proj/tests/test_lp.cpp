#include <doctest.h>

#include "drkf/lp.hpp"

using namespace drkf;

TEST_CASE("one-variable feasible interval") {
    // x <= 1, -x <= 0  ->  x in [0, 1], best margin 0.5 at x = 0.5
    MatXd G(2, 1);
    G << 1, -1;
    VecXd h(2);
    h << 1, 0;
    const auto r = solve_margin_lp(G, h);
    CHECK(r.feasible);
    CHECK(r.margin == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r.x(0) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("empty interval is certified infeasible") {
    // x <= 1, -x <= -2  ->  needs x >= 2 and x <= 1
    MatXd G(2, 1);
    G << 1, -1;
    VecXd h(2);
    h << 1, -2;
    const auto r = solve_margin_lp(G, h);
    CHECK_FALSE(r.feasible);
    CHECK(r.margin == doctest::Approx(-0.5).epsilon(1e-9));
}

TEST_CASE("boundary equality is feasible with zero margin") {
    MatXd G(2, 1);
    G << 1, -1;
    VecXd h(2);
    h << 1, -1;
    const auto r = solve_margin_lp(G, h);
    CHECK(r.feasible);
    CHECK(std::abs(r.margin) < 1e-9);
    CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("margin caps at one for wide-open systems") {
    MatXd G(1, 1);
    G << 1;
    VecXd h(1);
    h << 100;
    const auto r = solve_margin_lp(G, h);
    CHECK(r.feasible);
    CHECK(r.margin == doctest::Approx(1.0));
}

TEST_CASE("random systems: returned point satisfies the constraints") {
    GaussianRng rng(11);
    for (int rep = 0; rep < 30; ++rep) {
        const int d = 2 + rep % 4;
        const int m = 10 + 7 * (rep % 5);
        MatXd G(m, d);
        VecXd h(m);
        const VecXd x0 = rng.vector(d);  // planted feasible point
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < d; ++j) G(i, j) = rng();
            h(i) = G.row(i).dot(x0) + 0.05 + std::abs(rng());
        }
        const auto r = solve_margin_lp(G, h);
        REQUIRE(r.feasible);
        CHECK(((G * r.x - h).array() <= 1e-8).all());
        CHECK(r.margin >= 0.0);
    }
}

TEST_CASE("random infeasible systems: contradictory pair") {
    GaussianRng rng(13);
    for (int rep = 0; rep < 10; ++rep) {
        const int d = 2 + rep % 3;
        MatXd G(6, d);
        VecXd h(6);
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < d; ++j) G(i, j) = rng();
            h(i) = std::abs(rng()) + 0.1;
        }
        // a^T x <= -1 and -a^T x <= -1 cannot both hold
        for (int j = 0; j < d; ++j) G(4, j) = rng();
        G.row(5) = -G.row(4);
        h(4) = -1.0;
        h(5) = -1.0;
        const auto r = solve_margin_lp(G, h);
        CHECK_FALSE(r.feasible);
    }
}
