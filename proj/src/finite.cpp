#include "drkf/finite.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "drkf/errors.hpp"

namespace drkf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double trace_product(const MatXd& T, const MatXd& M) {
    // Tr(T T^T M) = <M T, T>
    return (M * T).cwiseProduct(T).sum();
}

// Per-horizon quantities reused across projection calls.
struct Projector {
    const BlockToeplitzPair* pair;
    Eigen::Index ds, dy;
    MatXd Delta;    // lower Cholesky factor of I + H H^T
    MatXd K0Delta;  // K0 * Delta with K0 = L H^T (I + H H^T)^{-1}

    Projector(const BlockToeplitzPair& p, Eigen::Index ds_, Eigen::Index dy_)
        : pair(&p), ds(ds_), dy(dy_) {
        const Eigen::Index ny = p.H.rows();
        MatXd IHH = MatXd::Identity(ny, ny) + p.H * p.H.transpose();
        Eigen::LLT<MatXd> llt(IHH);
        if (llt.info() != Eigen::Success) throw NotPD("causal_project: I + H H^T not PD");
        Delta = llt.matrixL();
        const MatXd K0 = llt.solve(p.H * p.L.transpose()).transpose();
        K0Delta = K0 * Delta;
    }

    CausalProjection project(const MatXd& M) const {
        const MatXd U = lower_factor_utu(M);
        MatXd Y = U * K0Delta;
        causal_mask(Y, ds, dy);
        MatXd K = U.triangularView<Eigen::Lower>().solve(Y);
        K = Delta.transpose().triangularView<Eigen::Upper>().solve(K.transpose()).transpose();
        causal_mask(K, ds, dy);
        const ErrorOperator op = make_error_operator(K, *pair);
        return {std::move(K), trace_product(op.T, M)};
    }
};

// Trace of ((I - G/gamma)^{-1} - I)^2 from the eigenvalues of G.
double trace_equation(const VecXd& eig, double gamma) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < eig.size(); ++i) {
        const double a = 1.0 / (1.0 - eig(i) / gamma) - 1.0;
        s += a * a;
    }
    return s;
}

}  // namespace

ErrorOperator make_error_operator(const MatXd& K, const BlockToeplitzPair& pair) {
    if (K.rows() != pair.L.rows() || K.cols() != pair.H.rows())
        throw ModelError("make_error_operator: estimator dimensions do not match the horizon");
    ErrorOperator op;
    op.T.resize(K.rows(), pair.H.cols() + K.cols());
    op.T.leftCols(pair.H.cols()) = K * pair.H - pair.L;
    op.T.rightCols(K.cols()) = K;
    return op;
}

void causal_mask(MatXd& X, Eigen::Index rb, Eigen::Index cb) {
    const Eigen::Index tr = X.rows() / rb, tc = X.cols() / cb;
    for (Eigen::Index i = 0; i < tr; ++i)
        for (Eigen::Index j = i + 1; j < tc; ++j) X.block(i * rb, j * cb, rb, cb).setZero();
}

CausalProjection causal_project(const MatXd& M, const BlockToeplitzPair& pair) {
    const Eigen::Index ds = pair.L.rows() / pair.T;
    const Eigen::Index dy = pair.H.rows() / pair.T;
    return Projector(pair, ds, dy).project(M);
}

GammaSolve bisection_gamma_matrix(const MatXd& G, double rho, double tol) {
    if (rho <= 0.0) throw ConfigError("bisection_gamma_matrix: rho must be positive");
    const Eigen::Index n = G.rows();
    Eigen::SelfAdjointEigenSolver<MatXd> es(sym(G));
    const VecXd eig = es.eigenvalues().cwiseMax(0.0);
    const double lmax = eig.maxCoeff();
    if (lmax <= 0.0) return {kInf, MatXd::Identity(n, n)};

    const double rho2 = rho * rho;
    double lo = lmax * (1.0 + 1e-9);
    double hi = lmax + eig.sum() / rho;
    while (trace_equation(eig, hi) > rho2) hi *= 2.0;
    if (trace_equation(eig, lo) < rho2) {
        // root sits inside the guard band next to lmax
        hi = lo;
        lo = lmax * (1.0 + 1e-15);
    }
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f = trace_equation(eig, mid);
        if (f > rho2)
            lo = mid;
        else
            hi = mid;
        if (std::abs(f - rho2) <= tol * std::max(1.0, rho2) && hi - lo <= 1e-9 * hi) break;
        if (hi - lo <= 1e-15 * hi) break;
    }
    const double gamma = 0.5 * (lo + hi);
    VecXd d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double w = 1.0 / (1.0 - eig(i) / gamma);
        d(i) = w * w;
    }
    return {gamma, es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose()};
}

WorstCase worst_case_mse_finite(const ErrorOperator& op, double rho_T) {
    const MatXd G = op.T * op.T.transpose();
    if (rho_T < 0.0) throw ConfigError("worst_case_mse_finite: rho_T must be >= 0");
    if (rho_T == 0.0) return {G.trace(), kInf};
    Eigen::SelfAdjointEigenSolver<MatXd> es(sym(G));
    const VecXd eig = es.eigenvalues().cwiseMax(0.0);
    if (eig.maxCoeff() <= 0.0) return {0.0, kInf};
    const GammaSolve gs = bisection_gamma_matrix(G, rho_T);
    double tr = 0.0;
    for (Eigen::Index i = 0; i < eig.size(); ++i) tr += 1.0 / (1.0 - eig(i) / gs.gamma) - 1.0;
    return {gs.gamma * rho_T * rho_T + gs.gamma * tr, gs.gamma};
}

MatXd worst_case_transform(const ErrorOperator& op, double gamma_star) {
    const Eigen::Index n = op.T.cols();
    if (std::isinf(gamma_star)) return MatXd::Identity(n, n);
    const MatXd TtT = op.T.transpose() * op.T;
    Eigen::SelfAdjointEigenSolver<MatXd> es(sym(TtT));
    if (gamma_star <= es.eigenvalues().maxCoeff())
        throw GammaTooSmall("worst_case_transform: gamma <= lambda_max(T^T T)");
    VecXd d = (1.0 - es.eigenvalues().array() / gamma_star).inverse();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

FiniteSynthesisResult fw_solve_finite(const StateSpaceModel& m, int T, double rho_T,
                                      const FwConfig& cfg) {
    if (T < 1) throw ConfigError("fw_solve_finite: T must be >= 1");
    if (rho_T <= 0.0) throw ConfigError("fw_solve_finite: rho_T must be positive");
    const BlockToeplitzPair pair = build_block_toeplitz(m, T);
    const Projector proj(pair, m.ds(), m.dy());
    const Eigen::Index n = T * m.ds();

    MatXd M = MatXd::Identity(n, n);
    FiniteSynthesisResult res;
    res.T = T;
    res.rho_T = rho_T;
    bool converged = false;
    int k = 0;
    for (; k < cfg.max_iter; ++k) {
        const CausalProjection cp = proj.project(M);
        const ErrorOperator op = make_error_operator(cp.K, pair);
        const MatXd G = op.T * op.T.transpose();
        const GammaSolve gs = bisection_gamma_matrix(G, rho_T);
        res.gap_history.push_back((G * (gs.M_tilde - M)).trace());
        const double eta = 2.0 / (k + 2.0);
        const MatXd Mn = (1.0 - eta) * M + eta * gs.M_tilde;
        const double rel = (Mn - M).norm() / M.norm();
        M = Mn;
        if (rel <= cfg.tol) {
            converged = true;
            ++k;
            break;
        }
    }
    if (!converged && cfg.throw_on_cap)
        throw IterationCap("fw_solve_finite: no convergence within the iteration cap");

    const CausalProjection cp = proj.project(M);
    res.K = cp.K;
    res.M_star = M;
    res.iterations = k;
    const ErrorOperator op = make_error_operator(res.K, pair);
    const WorstCase wc = worst_case_mse_finite(op, rho_T);
    res.value = wc.value;
    res.gamma_star = wc.gamma;

    const MatXd G = op.T * op.T.transpose();
    Eigen::SelfAdjointEigenSolver<MatXd> es(sym(G));
    const VecXd eig = es.eigenvalues().cwiseMax(0.0);
    res.radius_residual =
        std::abs(trace_equation(eig, res.gamma_star) - rho_T * rho_T) / (rho_T * rho_T);
    VecXd d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double w = 1.0 / (1.0 - eig(i) / res.gamma_star);
        d(i) = w * w;
    }
    const MatXd Mkkt = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
    res.kkt_residual = (M - Mkkt).norm() / M.norm();
    return res;
}

SdpCertificate sdp_certificate(const MatXd& K, double gamma, const BlockToeplitzPair& pair,
                               double rho_T) {
    const Eigen::Index n1 = K.rows();   // T ds
    const Eigen::Index n3 = K.cols();   // T dy
    const ErrorOperator op = make_error_operator(K, pair);
    const MatXd TTt = op.T * op.T.transpose();

    const Eigen::Index ny = pair.H.rows();
    const MatXd IHH = MatXd::Identity(ny, ny) + pair.H * pair.H.transpose();
    const MatXd IHH_inv = IHH.ldlt().solve(MatXd::Identity(ny, ny));
    const MatXd K0 = IHH.ldlt().solve(pair.H * pair.L.transpose()).transpose();
    const Eigen::Index nw = pair.H.cols();
    const MatXd TK0 = pair.L * (MatXd::Identity(nw, nw) + pair.H.transpose() * pair.H)
                                   .ldlt()
                                   .solve(pair.L.transpose());

    MatXd X;
    {
        MatXd gI_TT = -TTt;
        gI_TT.diagonal().array() += gamma;
        X = gamma * gamma * gI_TT.ldlt().solve(MatXd::Identity(n1, n1));
    }

    const Eigen::Index N = 2 * n1 + n3;
    MatXd lmi = MatXd::Zero(N, N);
    lmi.block(0, 0, n1, n1) = X;
    lmi.block(0, n1, n1, n1) = gamma * MatXd::Identity(n1, n1);
    lmi.block(n1, 0, n1, n1) = gamma * MatXd::Identity(n1, n1);
    lmi.block(n1, n1, n1, n1) = gamma * MatXd::Identity(n1, n1) - TK0;
    lmi.block(n1, 2 * n1, n1, n3) = K - K0;
    lmi.block(2 * n1, n1, n3, n1) = (K - K0).transpose();
    lmi.block(2 * n1, 2 * n1, n3, n3) = IHH_inv;

    Eigen::SelfAdjointEigenSolver<MatXd> es(sym(lmi));
    SdpCertificate cert;
    cert.min_eigenvalue = es.eigenvalues().minCoeff();
    cert.objective = gamma * (rho_T * rho_T - static_cast<double>(n1)) + X.trace();
    return cert;
}

void write_finite_filter_csv(const FiniteSynthesisResult& res, const StateSpaceModel& m,
                             const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << "T,d_s,d_y\n" << res.T << "," << m.ds() << "," << m.dy() << "\n";
    char buf[40];
    for (Eigen::Index i = 0; i < res.K.rows(); ++i) {
        for (Eigen::Index j = 0; j < res.K.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.15g", res.K(i, j));
            out << buf << (j + 1 < res.K.cols() ? "," : "");
        }
        out << "\n";
    }
}

std::string finite_summary_json(const FiniteSynthesisResult& res) {
    nlohmann::json j;
    j["gamma_star"] = res.gamma_star;
    j["value"] = res.value;
    j["iterations"] = res.iterations;
    j["radius_residual"] = res.radius_residual;
    return j.dump(2);
}

}  // namespace drkf
