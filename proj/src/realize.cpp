#include "drkf/realize.hpp"

#include <json.hpp>

#include "drkf/errors.hpp"

namespace drkf {

namespace {

MatXd json_matrix(const nlohmann::json& j) {
    const auto rows = j.get<std::vector<std::vector<double>>>();
    if (rows.empty()) return MatXd(0, 0);
    MatXd M(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < rows[i].size(); ++k) M(i, k) = rows[i][k];
    return M;
}

nlohmann::json matrix_json(const MatXd& M) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        nlohmann::json r = nlohmann::json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

SteinSolution stein_solve(const MatXd& A_u, const VecXd& B_u, const RiccatiData& ric) {
    const Eigen::Index m = A_u.rows();
    const Eigen::Index dx = ric.Ap.rows();
    if (m == 0) return {MatXd(0, dx)};
    // vec(A_u U Ap^T) = (Ap kron A_u) vec(U)
    const MatXd rhs = B_u * ric.Cbar;  // m x dx (Cbar = Cs P Ap^T)
    MatXd sys = MatXd::Identity(m * dx, m * dx);
    for (Eigen::Index i = 0; i < dx; ++i)
        for (Eigen::Index j = 0; j < dx; ++j)
            sys.block(i * m, j * m, m, m) -= ric.Ap(i, j) * A_u;
    Eigen::PartialPivLU<MatXd> lu(sys);
    const VecXd d = lu.matrixLU().diagonal().cwiseAbs();
    if (!(d.minCoeff() > 1e-12 * std::max(1.0, d.maxCoeff())))
        throw SingularSystem("stein_solve: I - Ap (x) A_u is singular");
    const VecXd vec_rhs = Eigen::Map<const VecXd>(rhs.data(), m * dx);
    const VecXd sol = lu.solve(vec_rhs);
    SteinSolution s;
    s.U = Eigen::Map<const MatXd>(sol.data(), m, dx);
    return s;
}

VecXd StateSpaceFilter::step(const VecXd& y) {
    if (state.size() != F.rows()) reset();
    const VecXd out = H * state + L * y;
    state = F * state + G * y;
    return out;
}

StateSpaceFilter assemble_filter(const RationalFactor& u, const StateSpaceModel& m,
                                 const RiccatiData& ric) {
    const Eigen::Index mu = u.order();
    const Eigen::Index dx = m.dx(), dy = m.dy(), ds = m.ds();
    const SteinSolution st = stein_solve(u.A, u.B, ric);

    const MatXd ReInv = ric.Re.inverse();
    const MatXd UCR = st.U * m.Cy.transpose() * ReInv;        // mu x dy
    const MatXd Aup = u.A - u.B * u.C;                        // stable by minimum phase
    const MatXd CsPCR = m.Cs * ric.P * m.Cy.transpose() * ReInv;

    StateSpaceFilter f;
    f.F = MatXd::Zero(mu + dx, mu + dx);
    f.F.topLeftCorner(mu, mu) = Aup;
    f.F.topRightCorner(mu, dx) = UCR * m.Cy;
    f.F.bottomRightCorner(dx, dx) = ric.Ap;

    f.G = MatXd::Zero(mu + dx, dy);
    f.G.topRows(mu) = UCR;
    f.G.bottomRows(dx) = -ric.Fp;

    f.H = MatXd::Zero(ds, mu + dx);
    f.H.leftCols(mu) = u.C * Aup;
    f.H.rightCols(dx) = -m.Cs + CsPCR * m.Cy + u.C * UCR * m.Cy;

    f.L = u.C * UCR + CsPCR;

    if (spectral_radius(f.F) >= 1.0)
        throw InstabilityDetected("assemble_filter: realized filter is unstable");
    f.reset();
    return f;
}

MatXd filter_run(StateSpaceFilter& f, const MatXd& y_rows) {
    f.reset();
    MatXd out(y_rows.rows(), f.H.rows());
    for (Eigen::Index t = 0; t < y_rows.rows(); ++t)
        out.row(t) = f.step(y_rows.row(t).transpose()).transpose();
    return out;
}

MatXcd filter_freq_response(const StateSpaceFilter& f, cplx z) {
    if (f.F.rows() == 0) return f.L.cast<cplx>();
    const MatXcd R = resolvent_solve(f.F, z, f.G.cast<cplx>());
    return f.H.cast<cplx>() * R + f.L.cast<cplx>();
}

std::string filter_to_json(const StateSpaceFilter& f) {
    nlohmann::json j;
    j["F"] = matrix_json(f.F);
    j["G"] = matrix_json(f.G);
    j["H"] = matrix_json(f.H);
    j["L"] = matrix_json(f.L);
    return j.dump(2);
}

StateSpaceFilter filter_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    StateSpaceFilter f;
    f.F = json_matrix(j.at("F"));
    f.G = json_matrix(j.at("G"));
    f.H = json_matrix(j.at("H"));
    f.L = json_matrix(j.at("L"));
    if (f.F.rows() != f.F.cols() || f.G.rows() != f.F.rows() || f.H.cols() != f.F.rows() ||
        f.L.rows() != f.H.rows() || f.L.cols() != f.G.cols())
        throw ConfigError("filter_from_json: inconsistent matrix dimensions");
    f.reset();
    return f;
}

}  // namespace drkf
