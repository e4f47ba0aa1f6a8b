#pragma once

#include <string>
#include <vector>

#include "drkf/toeplitz.hpp"

namespace drkf {

// Error transfer operator T_K = [K H - L, K] mapping stacked disturbances to
// stacked estimation errors.
struct ErrorOperator {
    MatXd T;  // (T ds) x (dx + (T-1) dw + T dy)
};

ErrorOperator make_error_operator(const MatXd& K, const BlockToeplitzPair& pair);

// Enforce exact zeros above the (rb x cb)-block diagonal.
void causal_mask(MatXd& X, Eigen::Index rb, Eigen::Index cb);

struct CausalProjection {
    MatXd K;           // block-lower-triangular minimizer of Tr(T_K T_K^T M)
    double phi = 0.0;  // attained value
};

// Finite-matrix Wiener-Hopf step: with M = U^T U and Delta Delta^T = I + H H^T
// (both lower-triangular factors), K = U^{-1} {U K_circ Delta}_+ Delta^{-1}.
CausalProjection causal_project(const MatXd& M, const BlockToeplitzPair& pair);

struct GammaSolve {
    double gamma = 0.0;  // +inf sentinel when G = 0
    MatXd M_tilde;       // (I - gamma^{-1} G)^{-2}
};

// Solve Tr[((I - gamma^{-1} G)^{-1} - I)^2] = rho^2 for gamma > lambda_max(G).
GammaSolve bisection_gamma_matrix(const MatXd& G, double rho, double tol = 1e-10);

struct FwConfig {
    double tol = 1e-6;    // relative Frobenius change of the iterate
    int max_iter = 5000;
    bool throw_on_cap = true;
};

struct WorstCase {
    double value = 0.0;
    double gamma = 0.0;
};

// Strong-duality evaluation of the worst-case MSE of a fixed estimator.
WorstCase worst_case_mse_finite(const ErrorOperator& op, double rho_T);

// Transport map D = (I - gamma^{-1} T^T T)^{-1} generating the worst-case
// disturbance xi* = D xi_nominal; worst-case Gaussian covariance is D D^T.
MatXd worst_case_transform(const ErrorOperator& op, double gamma_star);

struct FiniteSynthesisResult {
    MatXd K;                    // optimal causal estimator
    double gamma_star = 0.0;
    MatXd M_star;               // final dual iterate
    double value = 0.0;         // worst-case MSE (summed over the horizon)
    int iterations = 0;
    std::vector<double> gap_history;  // linearized Frank-Wolfe gaps
    double radius_residual = 0.0;     // |trace equation - rho^2| / rho^2
    double kkt_residual = 0.0;        // ||M - (I - g^{-1} G)^{-2}||_F / ||M||_F
    int T = 0;
    double rho_T = 0.0;
};

FiniteSynthesisResult fw_solve_finite(const StateSpaceModel& m, int T, double rho_T,
                                      const FwConfig& cfg = {});

struct SdpCertificate {
    double min_eigenvalue = 0.0;
    double objective = 0.0;
};

// Assembles the 3x3 block LMI certificate at (K, gamma) and evaluates the SDP
// objective gamma (rho^2 - Tr I) + Tr X with X = gamma^2 (gamma I - T_K T_K^T)^{-1}.
SdpCertificate sdp_certificate(const MatXd& K, double gamma, const BlockToeplitzPair& pair,
                               double rho_T);

// CSV export: "T,d_s,d_y" header line, dimensions line, then K_T row-major.
void write_finite_filter_csv(const FiniteSynthesisResult& res, const StateSpaceModel& m,
                             const std::string& path);

// JSON summary {gamma_star, value, iterations, radius_residual}.
std::string finite_summary_json(const FiniteSynthesisResult& res);

}  // namespace drkf
