#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace drkf {

using MatXd = Eigen::MatrixXd;
using VecXd = Eigen::VectorXd;
using MatXcd = Eigen::MatrixXcd;
using VecXcd = Eigen::VectorXcd;
using RowVecXd = Eigen::RowVectorXd;
using RowVecXcd = Eigen::RowVectorXcd;
using cplx = std::complex<double>;

inline MatXd sym(const MatXd& X) { return 0.5 * (X + X.transpose()); }

// Largest eigenvalue magnitude.
double spectral_radius(const MatXd& A);

// Symmetric PSD square root and inverse square root via eigendecomposition.
MatXd sym_sqrt(const MatXd& S);
MatXd sym_inv_sqrt(const MatXd& S);

// Lower-triangular U with M = U^T U, via the exchange-permuted Cholesky
// U = J chol(J M J)^T J.  Throws NotPD if M is not positive definite.
MatXd lower_factor_utu(const MatXd& M);

// Solve (zI - A) X = B without forming the inverse; throws SingularResolvent.
MatXcd resolvent_solve(const MatXd& A, cplx z, const MatXcd& B);

// Solve (I - z A) X = B; throws SingularResolvent.
MatXcd resolvent_solve_izA(const MatXd& A, cplx z, const MatXcd& B);

// Complex DFT/IDFT of length n (any n >= 1); the inverse carries the 1/n factor.
VecXcd dft(const VecXcd& x, bool inverse);

// splitmix64 scrambling for per-trial seeds.
std::uint64_t scramble_seed(std::uint64_t x);

// Deterministic standard normals: Box-Muller over mt19937_64, so streams depend
// only on the seed, not on the standard library's distribution internals.
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : gen_(scramble_seed(seed)) {}

    double operator()();
    VecXd vector(Eigen::Index n);

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace drkf
