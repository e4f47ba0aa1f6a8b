#pragma once

#include <string>
#include <vector>

#include "drkf/finite.hpp"
#include "drkf/grid.hpp"
#include "drkf/transfer.hpp"

namespace drkf {

// The frequency-domain machinery is the scalar (ds = 1) path: the DFT-based
// factorization is defined for scalar spectra, so densities are stored as
// positive real samples over the grid.

struct SpectralDensity {
    FrequencyGrid grid;
    VecXd samples;  // positive, conjugate-symmetric: samples(n) == samples(N-n)
};

struct SpectralFactor {
    FrequencyGrid grid;
    VecXcd samples;                // U(z_n), causal with causal inverse
    double anticausal_tail = 0.0;  // max |u_k|, k >= N/2, relative to max |u_k|
};

// Kolmogorov/cepstrum factorization: U = exp(DFT of the causally-truncated
// inverse DFT of log M). Requires positive samples and even N.
SpectralFactor spectral_factor_dft(const SpectralDensity& M);

// Gamma = (1/N) sum_n U(z_n) Cbar (I - z_n Abar)^{-1}; the finite-dimensional
// parameter of the strictly anticausal part {U S}_-.
RowVecXd compute_gamma_param(const SpectralFactor& U, const RiccatiData& ric);

// Error PSD of the Wiener-Hopf-optimal filter for the factor U:
//   G(z) = |U(z)|^{-2} ||Gamma (I - z Abar)^{-1} Bbar||^2 + T_{K0}(z) T_{K0}(z)^*.
// This is also the Frank-Wolfe gradient at the density U^* U.
VecXd gradient_psd(const SpectralFactor& U, const RowVecXd& Gamma, const RiccatiData& ric,
                   const StateSpaceModel& m);
double gradient_psd_at(cplx Uz, const RowVecXd& Gamma, const RiccatiData& ric,
                       const StateSpaceModel& m, cplx z);

struct FreqGammaSolve {
    double gamma = 0.0;  // +inf sentinel when G = 0
    VecXd M_tilde;
};

// Solve (1/N) sum_n ((1 - G_n/gamma)^{-1} - 1)^2 = rho^2 over gamma > max G.
FreqGammaSolve bisection_gamma_freq(const VecXd& G, double rho, double tol = 1e-10);

// Normalized-trace strong duality value of a filter with error PSD samples.
WorstCase worst_case_mse_freq(const VecXd& error_psd, double rho);

struct InfiniteConfig {
    double tol = 1e-6;  // max-node relative change of the density iterate
    int max_iter = 5000;
    bool throw_on_cap = true;
};

struct InfiniteSynthesisResult {
    SpectralDensity M_star;
    SpectralFactor U_star;
    RowVecXd Gamma;           // 1 x dx
    double gamma_star = 0.0;
    MatXcd K_samples;         // N x dy filter response per node
    VecXd error_psd;          // T_K T_K^* per node at the optimum
    double value = 0.0;       // per-step worst-case MSE
    double rho = 0.0;
    int iterations = 0;
    std::vector<double> gap_history;  // (1/N) tr(G_k (M~_k - M_k))
    double fixed_point_residual = 0.0;
    double radius_residual = 0.0;
};

InfiniteSynthesisResult solve_infinite(const StateSpaceModel& m, double rho, int N,
                                       const InfiniteConfig& cfg = {});

// K(z) = K_H2(z) + U(z)^{-1} [U(z) S(z) - Gamma (z^{-1} I - Abar)^{-1} Bbar] Delta(z)^{-1}.
MatXcd optimal_filter_samples(const SpectralFactor& U, const RowVecXd& Gamma,
                              const RiccatiData& ric, const StateSpaceModel& m);
RowVecXcd optimal_filter_at(cplx Uz, const RowVecXd& Gamma, const RiccatiData& ric,
                            const StateSpaceModel& m, cplx z);

// (I - gamma^{-1} T_K T_K^*)^{-2} per node; equals M_star up to the fixed-point residual.
SpectralDensity worst_case_psd(const InfiniteSynthesisResult& res);

// Max of the three normalized KKT residuals (density map, Gamma consistency, radius).
double fixed_point_residual(const InfiniteSynthesisResult& res, const StateSpaceModel& m,
                            const RiccatiData& ric);

// CSV of (omega, M, Re/Im U, Re/Im K_j per measurement channel).
void write_infinite_csv(const InfiniteSynthesisResult& res, const std::string& path);

// JSON summary {gamma_star, value, Gamma, residuals, N, iterations}.
std::string infinite_summary_json(const InfiniteSynthesisResult& res);

}  // namespace drkf
