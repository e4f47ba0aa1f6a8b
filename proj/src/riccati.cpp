#include "drkf/riccati.hpp"

#include <cmath>
#include <limits>

#include "drkf/errors.hpp"

namespace drkf {

namespace {

MatXd dare_step(const StateSpaceModel& m, const MatXd& P) {
    const MatXd Re = MatXd::Identity(m.dy(), m.dy()) + m.Cy * P * m.Cy.transpose();
    const MatXd Fp = m.A * P * m.Cy.transpose() * Re.inverse();
    return sym(m.A * P * m.A.transpose() + m.B * m.B.transpose() - Fp * Re * Fp.transpose());
}

double rel_change(const MatXd& Pn, const MatXd& P) {
    return (Pn - P).norm() / std::max(1.0, Pn.norm());
}

// Structured doubling (SDA-I) for the filter DARE, i.e. the control form with
// A -> A^T and B -> Cy^T:  A0 = A^T, G0 = Cy^T Cy, H0 = B B^T, H_k -> P.
MatXd dare_doubling(const StateSpaceModel& m, double tol, int max_iter) {
    const Eigen::Index n = m.dx();
    MatXd Ak = m.A.transpose();
    MatXd Gk = m.Cy.transpose() * m.Cy;
    MatXd Hk = m.B * m.B.transpose();
    for (int k = 0; k < max_iter; ++k) {
        const MatXd W = MatXd::Identity(n, n) + Gk * Hk;
        Eigen::PartialPivLU<MatXd> lu(W);
        const MatXd WiA = lu.solve(Ak);
        const MatXd WiG = lu.solve(Gk);
        const MatXd An = Ak * WiA;
        const MatXd Gn = Gk + Ak * WiG * Ak.transpose();
        const MatXd Hn = Hk + Ak.transpose() * Hk * WiA;
        const double ch = rel_change(sym(Hn), sym(Hk));
        Ak = An;
        Gk = sym(Gn);
        Hk = sym(Hn);
        if (ch <= tol) return Hk;
    }
    throw NonConvergence("solve_dare: doubling iteration did not converge");
}

}  // namespace

double RiccatiData::residual(const StateSpaceModel& m) const {
    const MatXd lhs = m.A * P * m.A.transpose() + m.B * m.B.transpose() - Fp * Re * Fp.transpose();
    return (P - lhs).norm() / std::max(1.0, P.norm());
}

RiccatiData solve_dare(const StateSpaceModel& m, const DareOptions& opts) {
    MatXd P = m.B * m.B.transpose() + MatXd::Identity(m.dx(), m.dx());
    bool converged = false;
    double alpha = 1.0;  // damping, halved whenever the step grows
    double prev_ch = std::numeric_limits<double>::infinity();
    for (int k = 0; k < opts.max_iter; ++k) {
        const MatXd Pn = (1.0 - alpha) * P + alpha * dare_step(m, P);
        const double ch = rel_change(Pn, P);
        if (ch > prev_ch && alpha > 0.25) alpha *= 0.5;
        prev_ch = ch;
        P = Pn;
        if (ch <= opts.tol * alpha) {
            converged = true;
            break;
        }
    }
    if (!converged) P = dare_doubling(m, opts.tol, 200);

    RiccatiData r;
    r.P = sym(P);
    r.Re = sym(MatXd::Identity(m.dy(), m.dy()) + m.Cy * r.P * m.Cy.transpose());
    r.Re_sqrt = sym_sqrt(r.Re);
    r.Re_isqrt = sym_inv_sqrt(r.Re);
    r.Fp = m.A * r.P * m.Cy.transpose() * r.Re.inverse();
    r.Ap = m.A - r.Fp * m.Cy;
    r.Abar = r.Ap.transpose();
    r.Bbar = m.Cy.transpose() * r.Re_isqrt;
    r.Cbar = m.Cs * r.P * r.Ap.transpose();

    if (r.residual(m) > 1e-10)
        throw NonConvergence("solve_dare: residual above 1e-10 after iteration");
    if (spectral_radius(r.Ap) >= 1.0)
        throw NonConvergence("solve_dare: closed-loop matrix A - Fp Cy is not stable");
    return r;
}

}  // namespace drkf
