#pragma once

#include <string>
#include <vector>

#include "drkf/ratapprox.hpp"
#include "drkf/riccati.hpp"

namespace drkf {

// Coupling block of the realized filter: the unique solution of the Stein
// equation  A_u U A_p^T + B_u Cbar = U  (Cbar = Cs P Ap^T).
struct SteinSolution {
    MatXd U;  // m x dx
};

SteinSolution stein_solve(const MatXd& A_u, const VecXd& B_u, const RiccatiData& ric);

// Runnable filter  zeta_{t+1} = F zeta_t + G y_t,  s_hat_t = H zeta_t + L y_t.
struct StateSpaceFilter {
    MatXd F;  // (m + dx) x (m + dx)
    MatXd G;  // (m + dx) x dy
    MatXd H;  // ds x (m + dx)
    MatXd L;  // ds x dy

    VecXd state;  // zeta, zero-initialized

    void reset() { state.setZero(F.rows()); }
    VecXd step(const VecXd& y);
};

// Assembles the DR filter driven by a rational spectral factor; block layout
//   F = [A_u - B_u C_u,  U C_y^T Re^{-1} C_y; 0, A_p],  G = [U C_y^T Re^{-1}; -F_p],
// with the output row and feedthrough completing K = K_H2 + U_r^{-1}{U_r S}_+ Delta^{-1}.
StateSpaceFilter assemble_filter(const RationalFactor& u, const StateSpaceModel& m,
                                 const RiccatiData& ric);

// Stream a measurement sequence through the filter from zeta_0 = 0.
MatXd filter_run(StateSpaceFilter& f, const MatXd& y_rows);  // y_rows: T x dy -> T x ds

MatXcd filter_freq_response(const StateSpaceFilter& f, cplx z);

std::string filter_to_json(const StateSpaceFilter& f);
StateSpaceFilter filter_from_json(const std::string& text);

}  // namespace drkf
