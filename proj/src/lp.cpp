#include "drkf/lp.hpp"

#include <cmath>
#include <vector>

#include "drkf/errors.hpp"

namespace drkf {

// Dual of the margin program:  min sum_i h_i y_i + sigma
//   s.t.  sum_i y_i g_i = 0,  sum_i y_i + sigma = 1,  y >= 0, sigma >= 0.
// The feasible set is a simplex slice, so the LP is bounded and feasible; the
// optimal value equals the primal margin, and the simplex multipliers of the
// final basis recover (x, mu).
MarginLpResult solve_margin_lp(const MatXd& G, const VecXd& h, double tol) {
    const Eigen::Index m = G.rows();
    const Eigen::Index d = G.cols();
    const Eigen::Index rows = d + 1;
    const Eigen::Index ncols = m + 1;  // y columns then sigma

    // Row-equilibrate the constraints so the uniform margin is well scaled.
    VecXd rscale(m);
    MatXd Gs = G;
    VecXd hs = h;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double s = std::max(1.0, G.row(i).cwiseAbs().maxCoeff());
        rscale(i) = s;
        Gs.row(i) /= s;
        hs(i) /= s;
    }

    // Column j of the dual constraint matrix: (g_j; 1) for y_j, (0; 1) for sigma.
    auto column = [&](Eigen::Index j, VecXd& out) {
        if (j < m) {
            out.head(d) = Gs.row(j).transpose();
            out(d) = 1.0;
        } else {
            out.setZero();
            out(d) = 1.0;
        }
    };
    auto cost = [&](Eigen::Index j) { return j < m ? hs(j) : 1.0; };

    // Initial basis: sigma plus d "inert" slots. A slot for equality row r is an
    // identity column; it never enters and can only stay at value zero (it is
    // only used when the y columns do not span row r, in which case that row is
    // identically zero across all columns and never mixes).
    std::vector<Eigen::Index> basis(rows);
    // Choose up to d independent y columns by column-pivoted QR of the g-block.
    Eigen::ColPivHouseholderQR<MatXd> qr(Gs.transpose());  // d x m
    qr.setThreshold(1e-12);
    const Eigen::Index rank = qr.rank();
    std::vector<Eigen::Index> chosen;
    for (Eigen::Index k = 0; k < rank; ++k) chosen.push_back(qr.colsPermutation().indices()(k));

    // Basis layout: first the chosen y columns, then inert slots to fill, then sigma.
    // Equality rows not reachable through the y columns must be identically
    // zero (a variable no constraint touches); cover them with inert identity
    // columns that never enter and never mix.
    const Eigen::Index n_inert = d - rank;
    std::vector<Eigen::Index> inert_rows;
    if (n_inert > 0) {
        for (Eigen::Index r = 0; r < d && static_cast<Eigen::Index>(inert_rows.size()) < n_inert; ++r)
            if (m == 0 || Gs.col(r).cwiseAbs().maxCoeff() <= 1e-14) inert_rows.push_back(r);
        if (static_cast<Eigen::Index>(inert_rows.size()) < n_inert)
            throw NumericalFailure("solve_margin_lp: rank-deficient constraint block");
    }

    // Dense simplex tableau: rows x (ncols + n_inert extra identity columns).
    const Eigen::Index tcols = ncols + n_inert;
    MatXd T(rows, tcols);
    VecXd work(rows);
    for (Eigen::Index j = 0; j < ncols; ++j) {
        column(j, work);
        T.col(j) = work;
    }
    for (Eigen::Index k = 0; k < n_inert; ++k) {
        T.col(ncols + k).setZero();
        T(inert_rows[k], ncols + k) = 1.0;
    }
    VecXd c(tcols);
    for (Eigen::Index j = 0; j < ncols; ++j) c(j) = cost(j);
    c.tail(n_inert).setZero();

    for (Eigen::Index k = 0; k < rank; ++k) basis[k] = chosen[k];
    for (Eigen::Index k = 0; k < n_inert; ++k) basis[rank + k] = ncols + k;
    basis[d] = m;  // sigma

    // Reduce the tableau against the initial basis: solve B^{-1} [T | b].
    MatXd B(rows, rows);
    for (Eigen::Index k = 0; k < rows; ++k) B.col(k) = T.col(basis[k]);
    Eigen::PartialPivLU<MatXd> lu(B);
    MatXd Tred = lu.solve(T);
    VecXd b = VecXd::Zero(rows);
    b(d) = 1.0;
    VecXd xb = lu.solve(b);

    const double feas_eps = 1e-11;
    int iter = 0;
    const int max_iter = 50000;
    for (; iter < max_iter; ++iter) {
        // reduced costs r_j = c_j - c_B^T Tred_j ; Bland: smallest j with r_j < -tol
        VecXd cb(rows);
        for (Eigen::Index k = 0; k < rows; ++k) cb(k) = c(basis[k]);
        Eigen::Index enter = -1;
        for (Eigen::Index j = 0; j < ncols; ++j) {  // inert columns never enter
            const double rj = c(j) - cb.dot(Tred.col(j));
            if (rj < -1e-11) {
                enter = j;
                break;
            }
        }
        if (enter < 0) break;

        // ratio test with Bland tie-break on the leaving basis index
        Eigen::Index leave = -1;
        double best = 0.0;
        for (Eigen::Index r = 0; r < rows; ++r) {
            const double dir = Tred(r, enter);
            if (dir > feas_eps) {
                const double ratio = xb(r) / dir;
                if (leave < 0 || ratio < best - 1e-15 ||
                    (std::abs(ratio - best) <= 1e-15 && basis[r] < basis[leave])) {
                    leave = r;
                    best = ratio;
                }
            }
        }
        if (leave < 0) throw NumericalFailure("solve_margin_lp: unbounded pivot direction");

        // pivot
        const double piv = Tred(leave, enter);
        Tred.row(leave) /= piv;
        xb(leave) /= piv;
        for (Eigen::Index r = 0; r < rows; ++r) {
            if (r == leave) continue;
            const double f = Tred(r, enter);
            if (f != 0.0) {
                Tred.row(r) -= f * Tred.row(leave);
                xb(r) -= f * xb(leave);
            }
        }
        basis[leave] = enter;
    }
    if (iter >= max_iter) throw NumericalFailure("solve_margin_lp: iteration cap reached");

    // multipliers: pi^T B = c_B^T  ->  pi = B^{-T} c_B
    MatXd B2(rows, rows);
    for (Eigen::Index k = 0; k < rows; ++k) {
        if (basis[k] >= ncols) {
            work.setZero();
            work(inert_rows[basis[k] - ncols]) = 1.0;
        } else {
            column(basis[k], work);
        }
        B2.col(k) = work;
    }
    VecXd cb(rows);
    for (Eigen::Index k = 0; k < rows; ++k) cb(k) = c(basis[k]);
    const VecXd pi = B2.transpose().partialPivLu().solve(cb);

    MarginLpResult res;
    res.iterations = iter;
    res.x = pi.head(d);
    res.margin = pi(d);
    double obj = 0.0;
    for (Eigen::Index k = 0; k < rows; ++k) obj += cb(k) * xb(k);
    // the dual objective is the authoritative margin value
    res.margin = obj;
    res.feasible = obj >= -tol;
    return res;
}

}  // namespace drkf
