#include "drkf/linalg.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

#include "drkf/errors.hpp"

namespace drkf {

double spectral_radius(const MatXd& A) {
    if (A.rows() == 0) return 0.0;
    Eigen::EigenSolver<MatXd> es(A, /*computeEigenvectors=*/false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

MatXd sym_sqrt(const MatXd& S) {
    Eigen::SelfAdjointEigenSolver<MatXd> es(sym(S));
    if (es.eigenvalues().minCoeff() < -1e-12 * std::abs(es.eigenvalues().maxCoeff()))
        throw NotPD("sym_sqrt: matrix has a negative eigenvalue");
    VecXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

MatXd sym_inv_sqrt(const MatXd& S) {
    Eigen::SelfAdjointEigenSolver<MatXd> es(sym(S));
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw NotPD("sym_inv_sqrt: matrix is not positive definite");
    VecXd d = es.eigenvalues().cwiseSqrt().cwiseInverse();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

MatXd lower_factor_utu(const MatXd& M) {
    const Eigen::Index n = M.rows();
    MatXd JMJ = M.reverse();  // J M J flips both dimensions
    Eigen::LLT<MatXd> llt(JMJ);
    if (llt.info() != Eigen::Success)
        throw NotPD("lower_factor_utu: Cholesky of the exchanged matrix failed");
    MatXd Lc = llt.matrixL();
    MatXd U = Lc.transpose().reverse();
    // keep exact structural zeros above the diagonal
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) U(i, j) = 0.0;
    return U;
}

namespace {

MatXcd lu_solve_checked(const MatXcd& M, const MatXcd& B, const char* what) {
    if (M.rows() == 0) return B;
    Eigen::PartialPivLU<MatXcd> lu(M);
    const VecXd d = lu.matrixLU().diagonal().cwiseAbs();
    if (!(d.minCoeff() > 1e-14 * std::max(1.0, d.maxCoeff())))
        throw SingularResolvent(what);
    return lu.solve(B);
}

}  // namespace

MatXcd resolvent_solve(const MatXd& A, cplx z, const MatXcd& B) {
    MatXcd zIA = -A.cast<cplx>();
    zIA.diagonal().array() += z;
    return lu_solve_checked(zIA, B, "resolvent_solve: (zI - A) is singular to working precision");
}

MatXcd resolvent_solve_izA(const MatXd& A, cplx z, const MatXcd& B) {
    MatXcd IzA = (-z) * A.cast<cplx>();
    IzA.diagonal().array() += 1.0;
    return lu_solve_checked(IzA, B, "resolvent_solve_izA: (I - zA) is singular to working precision");
}

VecXcd dft(const VecXcd& x, bool inverse) {
    static std::mutex plan_mutex;  // FFTW planning is not thread-safe
    const int n = static_cast<int>(x.size());
    VecXcd out(n);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        plan = fftw_plan_dft_1d(
            n,
            reinterpret_cast<fftw_complex*>(const_cast<cplx*>(x.data())),
            reinterpret_cast<fftw_complex*>(out.data()),
            inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_destroy_plan(plan);
    }
    if (inverse) out /= static_cast<double>(n);
    return out;
}

std::uint64_t scramble_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double GaussianRng::operator()() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // uniforms in (0,1]; 53-bit mantissa
    double u1, u2;
    do {
        u1 = (gen_() >> 11) * 0x1.0p-53;
    } while (u1 <= 0.0);
    u2 = (gen_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

VecXd GaussianRng::vector(Eigen::Index n) {
    VecXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = (*this)();
    return v;
}

}  // namespace drkf
