#pragma once

#include "drkf/linalg.hpp"
#include "drkf/state_space.hpp"

namespace drkf {

// Steady-state filtering quantities derived from the DARE
//   P = A P A^T + B B^T - Fp Re Fp^T,  Re = I + Cy P Cy^T,  Fp = A P Cy^T Re^{-1},
// plus the realization (Abar, Bbar, Cbar) of the strictly anticausal part
// S(z) = Cbar (z^{-1} I - Abar)^{-1} Bbar.
struct RiccatiData {
    MatXd P;         // dx x dx, symmetric PSD
    MatXd Re;        // dy x dy, symmetric PD
    MatXd Re_sqrt;   // symmetric square root of Re
    MatXd Re_isqrt;  // its inverse
    MatXd Fp;        // dx x dy predictor gain
    MatXd Ap;        // A - Fp Cy, spectral radius < 1
    MatXd Abar;      // Ap^T
    MatXd Bbar;      // Cy^T Re^{-1/2}
    MatXd Cbar;      // Cs P Ap^T

    double residual(const StateSpaceModel& m) const;  // relative Frobenius DARE residual
};

struct DareOptions {
    double tol = 1e-12;   // relative fixed-point residual
    int max_iter = 20000;
};

// Damped fixed-point iteration with a structured-doubling fallback.
RiccatiData solve_dare(const StateSpaceModel& model, const DareOptions& opts = {});

}  // namespace drkf
