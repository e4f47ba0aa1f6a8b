#pragma once

#include "drkf/linalg.hpp"

namespace drkf {

struct MarginLpResult {
    bool feasible = false;
    VecXd x;              // a feasible point when feasible (margin-maximizing)
    double margin = 0.0;  // optimal uniform slack, capped at 1
    int iterations = 0;
};

// Decide feasibility of G x <= h over free x by maximizing the uniform margin:
//   max mu  s.t.  g_i^T x + mu <= h_i,  mu <= 1.
// Solved as the dual simplex tableau with d+1 rows and one column per
// constraint, pivoting by Bland's rule; feasible iff the optimal mu >= -tol.
MarginLpResult solve_margin_lp(const MatXd& G, const VecXd& h, double tol = 1e-9);

}  // namespace drkf
