#pragma once

#include <utility>

#include "drkf/riccati.hpp"

namespace drkf {

// Pointwise transfer-function evaluations on (or near) the unit circle.
// Resolvents are computed by LU solves per frequency, never explicit inverses.
//
// H, L, Delta and the non-causal estimator have poles at the eigenvalues of A,
// which may sit on the unit circle; the filter formulas below that matter for
// synthesis (Delta^{-1}, K_H2, S, error rows/PSDs) are driven by the stable
// closed-loop matrix Ap and stay finite there.

// H(z) = Cy (zI - A)^{-1} B  and  L(z) = Cs (zI - A)^{-1} B.
std::pair<MatXcd, MatXcd> eval_transfer(const StateSpaceModel& m, cplx z);

// Delta(z) = (I + Cy (zI - A)^{-1} Fp) Re^{1/2}; canonical factor of I + H H*.
MatXcd eval_delta(const StateSpaceModel& m, const RiccatiData& r, cplx z);

// Delta(z)^{-1} = Re^{-1/2} (I - Cy (zI - Ap)^{-1} Fp); stable poles only.
MatXcd eval_delta_inv(const StateSpaceModel& m, const RiccatiData& r, cplx z);

// Steady-state H2 (Kalman) filter transfer function,
// K_H2(z) = Cs P Cy^T Re^{-1} + Cs (I - P Cy^T Re^{-1} Cy)(zI - Ap)^{-1} Fp.
MatXcd eval_h2(const StateSpaceModel& m, const RiccatiData& r, cplx z);

// Strictly anticausal part S(z) = Cbar (z^{-1} I - Abar)^{-1} Bbar of K_circ Delta.
MatXcd eval_s(const StateSpaceModel& m, const RiccatiData& r, cplx z);

// Both pieces of the decomposition K_circ(z) Delta(z) = K_H2(z) Delta(z) + S(z).
std::pair<MatXcd, MatXcd> eval_h2_and_S(const StateSpaceModel& m, const RiccatiData& r, cplx z);

// Error transfer row [K_H2 H - L, K_H2] of the H2 filter, evaluated through the
// estimation-error dynamics (poles at eig(Ap) only):
//   e(z) = -Cf (zI - Ap)^{-1} (B w - Fp v) + Cs P Cy^T Re^{-1} v,  Cf = Cs (I - P Cy^T Re^{-1} Cy).
MatXcd eval_h2_error_row(const StateSpaceModel& m, const RiccatiData& r, cplx z);

// T_{K_circ}(z) T_{K_circ}(z)^* = L (I + H^* H)^{-1} L^*, computed in the regular
// form T_{K_H2} T_{K_H2}^* - S S^* so unit-circle eigenvalues of A cancel.
MatXcd eval_noncausal_error_psd(const StateSpaceModel& m, const RiccatiData& r, cplx z);

// Same quantity by the literal formula; requires z away from the spectrum of A.
MatXcd eval_noncausal_error_psd_direct(const StateSpaceModel& m, cplx z);

}  // namespace drkf
