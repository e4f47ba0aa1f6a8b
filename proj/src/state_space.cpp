#include "drkf/state_space.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

#include "drkf/errors.hpp"

namespace drkf {

namespace {

Eigen::Index rank_with_tol(const MatXcd& M) {
    Eigen::JacobiSVD<MatXcd> svd(M);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double tol = 1e-9 * sv(0);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol) ++r;
    return r;
}

MatXd parse_matrix(const nlohmann::json& j, const std::string& name) {
    if (!j.contains(name)) throw ModelError("model JSON: missing field \"" + name + "\"");
    const auto& rows = j.at(name);
    if (!rows.is_array() || rows.empty()) throw ModelError("model JSON: \"" + name + "\" must be a nonempty nested array");
    const std::size_t nc = rows.front().size();
    MatXd M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(nc));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].is_array() || rows[i].size() != nc)
            throw ModelError("model JSON: ragged rows in \"" + name + "\"");
        for (std::size_t k = 0; k < nc; ++k) {
            if (!rows[i][k].is_number())
                throw ModelError("model JSON: non-numeric entry in \"" + name + "\"");
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k].get<double>();
        }
    }
    return M;
}

nlohmann::json matrix_to_json(const MatXd& M) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        nlohmann::json r = nlohmann::json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

bool is_controllable(const MatXd& A, const MatXd& B) {
    const Eigen::Index n = A.rows();
    MatXd K(n, n * B.cols());
    MatXd blk = B;
    for (Eigen::Index j = 0; j < n; ++j) {
        K.middleCols(j * B.cols(), B.cols()) = blk;
        blk = A * blk;
    }
    return rank_with_tol(K.cast<cplx>()) == n;
}

bool is_detectable(const MatXd& A, const MatXd& Cy) {
    // PBH rank test on every eigenvalue with |lambda| >= 1.
    const Eigen::Index n = A.rows();
    Eigen::EigenSolver<MatXd> es(A, /*computeEigenvectors=*/false);
    for (Eigen::Index i = 0; i < n; ++i) {
        const cplx lam = es.eigenvalues()(i);
        if (std::abs(lam) < 1.0 - 1e-12) continue;
        MatXcd pbh(n + Cy.rows(), n);
        MatXcd top = A.cast<cplx>();
        top.diagonal().array() -= lam;
        pbh.topRows(n) = top;
        pbh.bottomRows(Cy.rows()) = Cy.cast<cplx>();
        if (rank_with_tol(pbh) < n) return false;
    }
    return true;
}

StateSpaceModel StateSpaceModel::validated(MatXd A, MatXd B, MatXd Cy, MatXd Cs) {
    const Eigen::Index dx = A.rows();
    if (A.cols() != dx || dx == 0) throw ModelError("A must be square and nonempty");
    if (B.rows() != dx || B.cols() == 0) throw ModelError("B must be dx x dw with dw >= 1");
    if (Cy.cols() != dx || Cy.rows() == 0) throw ModelError("C_y must be dy x dx with dy >= 1");
    if (Cs.cols() != dx || Cs.rows() == 0) throw ModelError("C_s must be ds x dx with ds >= 1");
    auto all_finite = [](const MatXd& M) { return M.allFinite(); };
    if (!all_finite(A) || !all_finite(B) || !all_finite(Cy) || !all_finite(Cs))
        throw ModelError("model matrices must have finite entries");
    if (!is_controllable(A, B)) throw ModelError("(A, B) is not controllable");
    if (!is_detectable(A, Cy)) throw ModelError("(A, C_y) is not detectable");
    return StateSpaceModel{std::move(A), std::move(B), std::move(Cy), std::move(Cs)};
}

StateSpaceModel StateSpaceModel::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw ModelError(std::string("model JSON parse error: ") + e.what());
    }
    return validated(parse_matrix(j, "A"), parse_matrix(j, "B"),
                     parse_matrix(j, "C_y"), parse_matrix(j, "C_s"));
}

StateSpaceModel StateSpaceModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open model file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string StateSpaceModel::to_json_text() const {
    nlohmann::json j;
    j["A"] = matrix_to_json(A);
    j["B"] = matrix_to_json(B);
    j["C_y"] = matrix_to_json(Cy);
    j["C_s"] = matrix_to_json(Cs);
    return j.dump(2);
}

}  // namespace drkf
