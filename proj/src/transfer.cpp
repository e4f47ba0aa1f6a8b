#include "drkf/transfer.hpp"

namespace drkf {

std::pair<MatXcd, MatXcd> eval_transfer(const StateSpaceModel& m, cplx z) {
    const MatXcd RB = resolvent_solve(m.A, z, m.B.cast<cplx>());
    return {m.Cy.cast<cplx>() * RB, m.Cs.cast<cplx>() * RB};
}

MatXcd eval_delta(const StateSpaceModel& m, const RiccatiData& r, cplx z) {
    const MatXcd RF = resolvent_solve(m.A, z, r.Fp.cast<cplx>());
    MatXcd D = m.Cy.cast<cplx>() * RF;
    D.diagonal().array() += 1.0;
    return D * r.Re_sqrt.cast<cplx>();
}

MatXcd eval_delta_inv(const StateSpaceModel& m, const RiccatiData& r, cplx z) {
    const MatXcd RF = resolvent_solve(r.Ap, z, r.Fp.cast<cplx>());
    MatXcd D = -m.Cy.cast<cplx>() * RF;
    D.diagonal().array() += 1.0;
    return r.Re_isqrt.cast<cplx>() * D;
}

MatXcd eval_h2(const StateSpaceModel& m, const RiccatiData& r, cplx z) {
    const MatXd gain = m.Cs * r.P * m.Cy.transpose() * r.Re.inverse();
    const MatXd Cf = m.Cs * (MatXd::Identity(m.dx(), m.dx()) -
                             r.P * m.Cy.transpose() * r.Re.inverse() * m.Cy);
    const MatXcd RF = resolvent_solve(r.Ap, z, r.Fp.cast<cplx>());
    return gain.cast<cplx>() + Cf.cast<cplx>() * RF;
}

MatXcd eval_s(const StateSpaceModel& m, const RiccatiData& r, cplx z) {
    (void)m;
    const MatXcd RB = resolvent_solve(r.Abar, 1.0 / z, r.Bbar.cast<cplx>());
    return r.Cbar.cast<cplx>() * RB;
}

std::pair<MatXcd, MatXcd> eval_h2_and_S(const StateSpaceModel& m, const RiccatiData& r, cplx z) {
    return {eval_h2(m, r, z), eval_s(m, r, z)};
}

MatXcd eval_h2_error_row(const StateSpaceModel& m, const RiccatiData& r, cplx z) {
    const MatXd gain = m.Cs * r.P * m.Cy.transpose() * r.Re.inverse();
    const MatXd Cf = m.Cs * (MatXd::Identity(m.dx(), m.dx()) -
                             r.P * m.Cy.transpose() * r.Re.inverse() * m.Cy);
    const MatXcd RB = resolvent_solve(r.Ap, z, m.B.cast<cplx>());
    const MatXcd RF = resolvent_solve(r.Ap, z, r.Fp.cast<cplx>());
    MatXcd row(m.ds(), m.dw() + m.dy());
    row.leftCols(m.dw()) = -Cf.cast<cplx>() * RB;
    row.rightCols(m.dy()) = Cf.cast<cplx>() * RF + gain.cast<cplx>();
    return row;
}

MatXcd eval_noncausal_error_psd(const StateSpaceModel& m, const RiccatiData& r, cplx z) {
    const MatXcd row = eval_h2_error_row(m, r, z);
    const MatXcd S = eval_s(m, r, z);
    return row * row.adjoint() - S * S.adjoint();
}

MatXcd eval_noncausal_error_psd_direct(const StateSpaceModel& m, cplx z) {
    const auto [H, L] = eval_transfer(m, z);
    MatXcd G = H.adjoint() * H;
    G.diagonal().array() += 1.0;
    return L * G.llt().solve(L.adjoint());
}

}  // namespace drkf
