#include "drkf/toeplitz.hpp"

#include <vector>

#include "drkf/errors.hpp"

namespace drkf {

BlockToeplitzPair build_block_toeplitz(const StateSpaceModel& m, int T, Eigen::Index dim_cap) {
    if (T < 1) throw ModelError("build_block_toeplitz: T must be >= 1");
    const Eigen::Index maxd = std::max({m.dx(), m.dw(), m.dy(), m.ds()});
    if (static_cast<Eigen::Index>(T) * maxd > dim_cap)
        throw ModelError("build_block_toeplitz: T * max dimension exceeds the cap");

    const Eigen::Index dx = m.dx(), dw = m.dw(), dy = m.dy(), ds = m.ds();
    const Eigen::Index nw = dx + (T - 1) * dw;

    std::vector<MatXd> Apow(T);
    Apow[0] = MatXd::Identity(dx, dx);
    for (int i = 1; i < T; ++i) Apow[i] = Apow[i - 1] * m.A;

    BlockToeplitzPair pair;
    pair.T = T;
    pair.H = MatXd::Zero(T * dy, nw);
    pair.L = MatXd::Zero(T * ds, nw);
    for (int i = 0; i < T; ++i) {
        pair.H.block(i * dy, 0, dy, dx) = m.Cy * Apow[i];
        pair.L.block(i * ds, 0, ds, dx) = m.Cs * Apow[i];
        for (int j = 1; j <= i; ++j) {
            const MatXd blk = Apow[i - j] * m.B;
            pair.H.block(i * dy, dx + (j - 1) * dw, dy, dw) = m.Cy * blk;
            pair.L.block(i * ds, dx + (j - 1) * dw, ds, dw) = m.Cs * blk;
        }
    }
    return pair;
}

std::pair<VecXd, VecXd> simulate_stacked(const StateSpaceModel& m, int T, const VecXd& xi) {
    const Eigen::Index dx = m.dx(), dw = m.dw(), dy = m.dy(), ds = m.ds();
    if (xi.size() != m.xi_dim(T)) throw ModelError("simulate_stacked: disturbance size mismatch");
    const Eigen::Index nw = dx + (T - 1) * dw;
    VecXd y(T * dy), s(T * ds);
    VecXd x = xi.head(dx);
    for (int t = 0; t < T; ++t) {
        y.segment(t * dy, dy) = m.Cy * x + xi.segment(nw + t * dy, dy);
        s.segment(t * ds, ds) = m.Cs * x;
        if (t + 1 < T) x = m.A * x + m.B * xi.segment(dx + t * dw, dw);
    }
    return {y, s};
}

}  // namespace drkf
