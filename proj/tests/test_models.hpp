#pragma once

#include "drkf/state_space.hpp"

namespace drkf::testing {

// 1D random-walk plant used throughout the comparisons.
inline StateSpaceModel scalar_model() {
    MatXd one = MatXd::Constant(1, 1, 1.0);
    return StateSpaceModel::validated(one, one, one, one);
}

inline StateSpaceModel stable_scalar_model(double a = 0.5) {
    MatXd A = MatXd::Constant(1, 1, a);
    MatXd one = MatXd::Constant(1, 1, 1.0);
    return StateSpaceModel::validated(A, one, one, one);
}

// Position/velocity tracking plant, unit sampling time, position observed
// and estimated.
inline StateSpaceModel tracking_model() {
    MatXd A(2, 2);
    A << 1.0, 1.0, 0.0, 1.0;
    MatXd B(2, 1);
    B << 0.0, 1.0;
    MatXd Cy(1, 2);
    Cy << 1.0, 0.0;
    MatXd Cs(1, 2);
    Cs << 1.0, 0.0;
    return StateSpaceModel::validated(A, B, Cy, Cs);
}

}  // namespace drkf::testing
