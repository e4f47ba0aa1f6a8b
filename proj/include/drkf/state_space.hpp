#pragma once

#include <string>

#include "drkf/linalg.hpp"

namespace drkf {

// The plant x_{t+1} = A x_t + B w_t, y_t = Cy x_t + v_t, s_t = Cs x_t.
// Construction validates dimensions, finiteness, controllability of (A, B)
// and detectability of (A, Cy); everything downstream derives from it.
struct StateSpaceModel {
    MatXd A;   // dx x dx
    MatXd B;   // dx x dw
    MatXd Cy;  // dy x dx
    MatXd Cs;  // ds x dx

    Eigen::Index dx() const { return A.rows(); }
    Eigen::Index dw() const { return B.cols(); }
    Eigen::Index dy() const { return Cy.rows(); }
    Eigen::Index ds() const { return Cs.rows(); }

    // Dimension of the stacked disturbance [x0; w_0..w_{T-2}; v_0..v_{T-1}].
    Eigen::Index xi_dim(int T) const { return dx() + (T - 1) * dw() + T * dy(); }

    static StateSpaceModel validated(MatXd A, MatXd B, MatXd Cy, MatXd Cs);

    // {"A":[[...]],"B":[[...]],"C_y":[[...]],"C_s":[[...]]}, row-major nested arrays.
    static StateSpaceModel from_json_text(const std::string& text);
    static StateSpaceModel load(const std::string& path);

    std::string to_json_text() const;
};

// Rank tolerance used by the controllability/detectability tests: 1e-9 * sigma_max.
bool is_controllable(const MatXd& A, const MatXd& B);
bool is_detectable(const MatXd& A, const MatXd& Cy);

}  // namespace drkf
