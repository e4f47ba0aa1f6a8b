#pragma once

#include "drkf/state_space.hpp"

namespace drkf {

// Stacked causal measurement model over a horizon T:
//   y = H w + v,  s = L w,  w = [x0; w_0; ...; w_{T-2}].
// Block row i carries Cy A^i in the first block column and Cy A^{i-j} B in the
// column of w_{j-1} (same pattern with Cs for L); strict zeros above that.
struct BlockToeplitzPair {
    MatXd H;  // (T dy) x (dx + (T-1) dw)
    MatXd L;  // (T ds) x (dx + (T-1) dw)
    int T = 0;
};

BlockToeplitzPair build_block_toeplitz(const StateSpaceModel& m, int T,
                                       Eigen::Index dim_cap = 20000);

// Simulate the recursion x_{t+1} = A x_t + B w_t on a stacked disturbance
// [x0; w; v]; returns (y, s) stacked. Oracle counterpart of the matrix product.
std::pair<VecXd, VecXd> simulate_stacked(const StateSpaceModel& m, int T, const VecXd& xi);

}  // namespace drkf
