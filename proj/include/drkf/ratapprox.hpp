#pragma once

#include <optional>
#include <string>

#include "drkf/grid.hpp"
#include "drkf/linalg.hpp"

namespace drkf {

// Symmetric Laurent polynomial sum_{k=-m}^{m} p_k z^{-k} with p_{-k} = p_k,
// identified by the m+1 coefficients p_0..p_m; real on the unit circle.
struct LaurentPolynomial {
    int m = 0;
    VecXd coeffs;  // p_0..p_m

    double eval(double omega) const;
    VecXd eval_grid(int N) const;  // values at omega_n = 2 pi n / N
};

// Positive rational approximation P/Q of a sampled density, with q_0 = 1 and
// H-infinity error bound eps on the construction grid.
struct RationalPSD {
    LaurentPolynomial P;
    LaurentPolynomial Q;
    double eps = 0.0;
};

enum class ErrorMetric {
    Absolute,  // |P/Q - M| <= eps       (the fixed-precision feasibility program)
    Relative   // |P/Q - M| <= eps * M   (used for factor synthesis; see README)
};

// Fixed-precision convex feasibility: at every grid node,
//   P - (M+eps) Q <= 0,  P - (M-eps) Q >= 0,  P >= delta,  Q >= delta,  q_0 = 1.
// Returns the margin-maximizing coefficients or nullopt when the LP certifies
// infeasibility. Requires M > 0 on the grid and N > 2m.
std::optional<RationalPSD> feasibility_lp(const VecXd& M, int m, double eps,
                                          double delta = 1e-8);

// Same constraint system with arbitrary per-node envelopes lo <= P/Q <= hi.
std::optional<RationalPSD> feasibility_envelope(const VecXd& M, int m, const VecXd& lo,
                                                const VecXd& hi, double delta = 1e-8);

// Fixed order, best precision: bisection on eps down to tol_eps.
RationalPSD best_precision(const VecXd& M, int m, double tol_eps = 1e-9,
                           ErrorMetric metric = ErrorMetric::Absolute);

// Fixed precision, least order: smallest m <= m_max that is feasible.
RationalPSD least_order(const VecXd& M, double eps, int m_max);

// Minimum-phase factor S(z) = sum_k s_k z^{-k} of a positive Laurent
// polynomial: |S(z)|^2 = P(z), all roots strictly inside the disk, s_0 > 0.
struct MinPhasePoly {
    VecXd coeffs;  // s_0..s_deg

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    cplx eval(cplx z) const;
};

MinPhasePoly poly_spectral_factor(const LaurentPolynomial& P);

// Rational spectral factor U_r(z) = S_P(z)/S_Q(z) realized as
// U(z) = d_sqrt (I + C (zI - A)^{-1} B) with A the companion matrix of the
// denominator; both A and A - B C are stable (numerator and denominator both
// minimum phase).
struct RationalFactor {
    MatXd A;      // n x n
    VecXd B;      // n
    RowVecXd C;   // n
    double d_sqrt = 1.0;

    int order() const { return static_cast<int>(A.rows()); }
    cplx eval(cplx z) const;
    VecXcd eval_grid(int N) const;
};

RationalFactor rational_factor(const RationalPSD& r);

// Inter-node diagnostics on a refine x finer grid: positivity margins of P, Q
// and the empirical error against the trigonometric interpolation of M.
struct RefinedReport {
    double min_P = 0.0;
    double min_Q = 0.0;
    double max_error = 0.0;  // max |P/Q - M_interp| over the refined grid
};

RefinedReport refined_error_report(const RationalPSD& r, const VecXd& M, int refine = 4);

// JSON {m, p:[...], q:[...], eps}.
std::string rational_psd_json(const RationalPSD& r);
RationalPSD rational_psd_from_json(const std::string& text);

}  // namespace drkf
