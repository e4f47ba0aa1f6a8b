#include <doctest.h>

#include <cmath>
#include <functional>

#include "drkf/errors.hpp"
#include "drkf/freq.hpp"
#include "test_models.hpp"

using namespace drkf;

namespace {

SpectralDensity density_from(const FrequencyGrid& g, const std::function<double(double)>& f) {
    SpectralDensity d{g, VecXd(g.N)};
    for (int n = 0; n < g.N; ++n) d.samples(n) = f(g.omega(n));
    return d;
}

// |T_K|^2 per node assembled directly from a filter response (stable models only)
VecXd psd_from_response(const StateSpaceModel& m, const FrequencyGrid& g, const MatXcd& K) {
    VecXd psd(g.N);
    for (int n = 0; n < g.N; ++n) {
        const auto [H, L] = eval_transfer(m, g.node(n));
        const MatXcd row = K.row(n) * H - L;
        psd(n) = row.squaredNorm() + K.row(n).squaredNorm();
    }
    return psd;
}

}  // namespace

TEST_CASE("constant density factors to its square root") {
    const FrequencyGrid g = FrequencyGrid::uniform(128);
    const auto M = density_from(g, [](double) { return 4.0; });
    const auto U = spectral_factor_dft(M);
    for (int n = 0; n < g.N; ++n) CHECK(std::abs(U.samples(n) - 2.0) < 1e-12);
    CHECK(U.anticausal_tail < 1e-12);
}

TEST_CASE("1.25 + cos w factors to 1 + 0.5 z^{-1}") {
    const FrequencyGrid g = FrequencyGrid::uniform(1024);
    const auto M = density_from(g, [](double w) { return 1.25 + std::cos(w); });
    const auto U = spectral_factor_dft(M);
    for (int n = 0; n < g.N; ++n) {
        const cplx expect = 1.0 + 0.5 / g.node(n);
        CHECK(std::abs(U.samples(n) - expect) < 1e-8);
    }
}

TEST_CASE("random smooth positive density: round trip and causal tail") {
    GaussianRng rng(23);
    const FrequencyGrid g = FrequencyGrid::uniform(1024);
    for (int rep = 0; rep < 3; ++rep) {
        VecXd a(7);
        for (int k = 0; k < 7; ++k) a(k) = 0.4 * rng() / (k + 1.0);
        const auto M = density_from(g, [&](double w) {
            double s = a(0);
            for (int k = 1; k < 7; ++k) s += a(k) * std::cos(k * w);
            return std::exp(s);
        });
        const auto U = spectral_factor_dft(M);
        for (int n = 0; n < g.N; ++n)
            CHECK(std::abs(std::norm(U.samples(n)) - M.samples(n)) <= 1e-6 * M.samples(n));
        CHECK(U.anticausal_tail <= 1e-6);
    }
}

TEST_CASE("nonpositive samples are rejected") {
    const FrequencyGrid g = FrequencyGrid::uniform(64);
    auto M = density_from(g, [](double) { return 1.0; });
    M.samples(5) = 0.0;
    CHECK_THROWS_AS(spectral_factor_dft(M), NonPositiveSample);
}

TEST_CASE("Gamma parameter on constructed factors") {
    const auto m = testing::tracking_model();
    const RiccatiData r = solve_dare(m);
    const FrequencyGrid g = FrequencyGrid::uniform(256);

    // U = 1: only the k = 0 term of the geometric series survives
    SpectralFactor ones{g, VecXcd::Ones(g.N), 0.0};
    const RowVecXd g0 = compute_gamma_param(ones, r);
    CHECK((g0 - r.Cbar).cwiseAbs().maxCoeff() < 1e-12);

    // constant u0 scales linearly
    SpectralFactor u0{g, VecXcd::Constant(g.N, 3.0), 0.0};
    CHECK(((compute_gamma_param(u0, r) - 3.0 * r.Cbar).cwiseAbs().maxCoeff()) < 1e-11);

    // U = 1 + a z^{-1} picks up one extra term of the series
    const double a = 0.4;
    SpectralFactor ua{g, VecXcd(g.N), 0.0};
    for (int n = 0; n < g.N; ++n) ua.samples(n) = 1.0 + a / g.node(n);
    const RowVecXd expect = r.Cbar + a * r.Cbar * r.Abar;
    CHECK((compute_gamma_param(ua, r) - expect).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("gradient PSD properties") {
    const auto m = testing::tracking_model();
    const RiccatiData r = solve_dare(m);
    const FrequencyGrid g = FrequencyGrid::uniform(128);
    SpectralFactor ones{g, VecXcd::Ones(g.N), 0.0};

    // Gamma = 0 leaves only the noncausal floor
    const VecXd G0 = gradient_psd(ones, RowVecXd::Zero(2), r, m);
    for (int n = 0; n < g.N; ++n) {
        CHECK(G0(n) ==
              doctest::Approx(eval_noncausal_error_psd(m, r, g.node(n))(0, 0).real()).epsilon(1e-12));
        CHECK(G0(n) >= 0.0);
    }

    // B = 0: no disturbance path at all
    StateSpaceModel zb = testing::stable_scalar_model(0.5);
    zb.B.setZero();
    const RiccatiData rz = solve_dare(zb);
    SpectralFactor ones2{FrequencyGrid::uniform(64), VecXcd::Ones(64), 0.0};
    const RowVecXd gz = compute_gamma_param(ones2, rz);
    const VecXd Gz = gradient_psd(ones2, gz, rz, zb);
    CHECK(Gz.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("frequency gamma bisection") {
    // constant scalar gradient: closed form
    const VecXd Gc = VecXd::Constant(64, 2.0);
    for (double rho : {0.5, 1.0}) {
        const auto r = bisection_gamma_freq(Gc, rho);
        CHECK(r.gamma == doctest::Approx(2.0 * (1 + rho) / rho).epsilon(1e-9));
    }

    // zero gradient sentinel
    const auto r0 = bisection_gamma_freq(VecXd::Zero(16), 1.0);
    CHECK(std::isinf(r0.gamma));
    CHECK((r0.M_tilde - VecXd::Ones(16)).norm() == 0.0);

    // two-node toy: gamma solves (1/2)((1 - 1/g)^{-1} - 1)^2 = rho^2
    VecXd G2(2);
    G2 << 1.0, 0.0;
    const auto r2 = bisection_gamma_freq(G2, 1.0 / std::sqrt(2.0));
    CHECK(r2.gamma == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("small radius recovers the Kalman frequency response") {
    const auto m = testing::tracking_model();
    const RiccatiData r = solve_dare(m);
    const auto res = solve_infinite(m, 1e-4, 512);
    double worst = 0.0, scale = 0.0;
    for (int n = 0; n < 512; ++n) {
        const MatXcd KH2 = eval_h2(m, r, res.M_star.grid.node(n));
        worst = std::max(worst, (res.K_samples.row(n) - KH2.row(0)).cwiseAbs().maxCoeff());
        scale = std::max(scale, KH2.cwiseAbs().maxCoeff());
    }
    CHECK(worst / scale < 1e-3);
}

TEST_CASE("iterates stay above one and conjugate-symmetric") {
    const auto m = testing::tracking_model();
    const auto res = solve_infinite(m, 1.0, 256);
    const int N = 256;
    CHECK(res.M_star.samples.minCoeff() >= 1.0 - 1e-9);
    for (int n = 1; n < N / 2; ++n) {
        CHECK(res.M_star.samples(n) ==
              doctest::Approx(res.M_star.samples(N - n)).epsilon(1e-10));
        CHECK(std::abs(res.U_star.samples(n) - std::conj(res.U_star.samples(N - n))) < 1e-8);
        CHECK(std::abs(res.K_samples(n, 0) - std::conj(res.K_samples(N - n, 0))) < 1e-7);
    }
}

TEST_CASE("KKT residuals at convergence; perturbation is detected") {
    const auto m = testing::tracking_model();
    const RiccatiData r = solve_dare(m);
    auto res = solve_infinite(m, 1.0, 512, InfiniteConfig{1e-6, 5000, true});
    CHECK(res.fixed_point_residual <= 1e-4);
    CHECK(res.radius_residual <= 1e-4);

    auto perturbed = res;
    perturbed.M_star.samples *= 1.1;
    perturbed.U_star = spectral_factor_dft(perturbed.M_star);
    CHECK(fixed_point_residual(perturbed, m, r) > 1e-2);
}

TEST_CASE("optimal filter samples: constant factor reduces to H2") {
    const auto m = testing::tracking_model();
    const RiccatiData r = solve_dare(m);
    const FrequencyGrid g = FrequencyGrid::uniform(128);
    SpectralFactor uc{g, VecXcd::Constant(g.N, 1.7), 0.0};
    const RowVecXd Gam = compute_gamma_param(uc, r);
    const MatXcd K = optimal_filter_samples(uc, Gam, r, m);
    for (int n = 0; n < g.N; ++n) {
        const MatXcd KH2 = eval_h2(m, r, g.node(n));
        CHECK((K.row(n) - KH2.row(0)).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("optimal filter is causal") {
    const auto m = testing::tracking_model();
    const auto res = solve_infinite(m, 1.0, 1024);
    double head = 0.0, tail = 0.0;
    const VecXcd taps = dft(res.K_samples.col(0), /*inverse=*/true);
    for (int k = 0; k < 1024; ++k) {
        head = std::max(head, std::abs(taps(k)));
        if (k >= 512) tail = std::max(tail, std::abs(taps(k)));
    }
    CHECK(tail <= 1e-5 * head);
}

TEST_CASE("gradient consistency: factor-based PSD equals the response-based one") {
    // a stable model so [K H - L, K] is finite on the whole circle
    MatXd A(2, 2);
    A << 0.6, 0.2, 0.0, 0.5;
    MatXd B(2, 1);
    B << 0.3, 1.0;
    MatXd Cy(1, 2);
    Cy << 1.0, 0.0;
    MatXd Cs(1, 2);
    Cs << 0.5, 1.0;
    const auto m = StateSpaceModel::validated(A, B, Cy, Cs);
    const auto res = solve_infinite(m, 0.7, 512);
    const VecXd direct = psd_from_response(m, res.M_star.grid, res.K_samples);
    for (int n = 0; n < 512; ++n)
        CHECK(std::abs(direct(n) - res.error_psd(n)) < 1e-6 * std::max(1.0, res.error_psd(n)));
}

TEST_CASE("normalized-trace worst-case evaluation") {
    // rho = 0: the nominal H2 cost
    const VecXd psd = VecXd::LinSpaced(64, 0.5, 2.0);
    CHECK(worst_case_mse_freq(psd, 0.0).value == doctest::Approx(psd.mean()));

    // constant scalar closed form
    const VecXd pc = VecXd::Constant(32, 3.0);
    for (double rho : {0.5, 1.5})
        CHECK(worst_case_mse_freq(pc, rho).value ==
              doctest::Approx(3.0 * (1 + rho) * (1 + rho)).epsilon(1e-8));
}

TEST_CASE("DR filter beats the Kalman filter in worst case on the tracking model") {
    const auto m = testing::tracking_model();
    const RiccatiData r = solve_dare(m);
    const double rho = 1.0;
    const auto res = solve_infinite(m, rho, 512);

    const FrequencyGrid g = res.M_star.grid;
    SpectralFactor ones{g, VecXcd::Ones(g.N), 0.0};
    const RowVecXd Gam = compute_gamma_param(ones, r);
    const VecXd kalman_psd = gradient_psd(ones, Gam, r, m);

    const double kalman_value = worst_case_mse_freq(kalman_psd, rho).value;
    CHECK(res.value < kalman_value);
}

TEST_CASE("worst-case density matches the returned density") {
    const auto m = testing::tracking_model();
    const auto res = solve_infinite(m, 1.0, 512);
    const SpectralDensity wc = worst_case_psd(res);
    double dev = 0.0;
    for (int n = 0; n < 512; ++n)
        dev = std::max(dev, std::abs(wc.samples(n) - res.M_star.samples(n)));
    CHECK(dev / res.M_star.samples.maxCoeff() <= res.fixed_point_residual + 1e-12);

    // active transport budget: (1/N) sum (M - 2 sqrt(M) + 1) = rho^2
    double budget = 0.0;
    for (int n = 0; n < 512; ++n)
        budget += wc.samples(n) - 2.0 * std::sqrt(wc.samples(n)) + 1.0;
    budget /= 512.0;
    CHECK(budget == doctest::Approx(1.0).epsilon(1e-4));

    // rho -> 0: the density collapses to the nominal
    const auto res0 = solve_infinite(m, 1e-5, 256);
    const SpectralDensity wc0 = worst_case_psd(res0);
    CHECK((wc0.samples - VecXd::Ones(256)).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("matrix-valued targets are rejected") {
    MatXd A(2, 2);
    A << 0.5, 0.1, 0.0, 0.4;
    MatXd B(2, 1);
    B << 1.0, 0.5;
    MatXd Cy(1, 2);
    Cy << 1.0, 0.0;
    const auto m = StateSpaceModel::validated(A, B, Cy, MatXd::Identity(2, 2));
    CHECK_THROWS_AS(solve_infinite(m, 1.0, 128), ConfigError);
}

TEST_CASE("iteration cap raises") {
    const auto m = testing::tracking_model();
    CHECK_THROWS_AS(solve_infinite(m, 1.0, 128, InfiniteConfig{1e-14, 3, true}), IterationCap);
}
