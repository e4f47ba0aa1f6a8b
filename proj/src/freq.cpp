#include "drkf/freq.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "drkf/errors.hpp"

namespace drkf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-node quantities that do not change across Frank-Wolfe iterations.
struct NodeCache {
    FrequencyGrid grid;
    std::vector<RowVecXcd> Cres;  // Cbar (I - z Abar)^{-1}
    std::vector<MatXcd> ResB;     // (I - z Abar)^{-1} Bbar
    VecXd tk0;                    // noncausal error PSD (scalar)

    NodeCache(const StateSpaceModel& m, const RiccatiData& ric, const FrequencyGrid& g)
        : grid(g) {
        const int N = g.N;
        Cres.reserve(N);
        ResB.reserve(N);
        tk0.resize(N);
        for (int n = 0; n < N; ++n) {
            const cplx z = g.node(n);
            const MatXcd R = resolvent_solve_izA(ric.Abar, z,
                                                 MatXcd::Identity(ric.Abar.rows(), ric.Abar.rows()));
            Cres.push_back(ric.Cbar.cast<cplx>() * R);
            ResB.push_back(R * ric.Bbar.cast<cplx>());
            tk0(n) = eval_noncausal_error_psd(m, ric, z)(0, 0).real();
        }
    }

    RowVecXd gamma_param(const VecXcd& U) const {
        RowVecXcd acc = RowVecXcd::Zero(Cres[0].cols());
        for (int n = 0; n < grid.N; ++n) acc += U(n) * Cres[n];
        acc /= static_cast<double>(grid.N);
        const double scale = std::max(1.0, acc.cwiseAbs().maxCoeff());
        if (acc.imag().cwiseAbs().maxCoeff() > 1e-9 * scale)
            throw NumericalFailure("compute_gamma_param: imaginary residue above 1e-9");
        return acc.real();
    }

    VecXd gradient(const VecXcd& U, const RowVecXd& Gamma) const {
        VecXd G(grid.N);
        const RowVecXcd Gc = Gamma.cast<cplx>();
        for (int n = 0; n < grid.N; ++n) {
            const RowVecXcd v = Gc * ResB[n];
            G(n) = v.squaredNorm() / std::norm(U(n)) + tk0(n);
        }
        return G;
    }
};

double trace_equation(const VecXd& G, double gamma) {
    double s = 0.0;
    for (Eigen::Index n = 0; n < G.size(); ++n) {
        const double a = 1.0 / (1.0 - G(n) / gamma) - 1.0;
        s += a * a;
    }
    return s / static_cast<double>(G.size());
}

}  // namespace

SpectralFactor spectral_factor_dft(const SpectralDensity& M) {
    const int N = M.grid.N;
    if (M.samples.size() != N) throw ConfigError("spectral_factor_dft: sample count != N");
    if (M.samples.minCoeff() <= 0.0)
        throw NonPositiveSample("spectral_factor_dft: density must be strictly positive");

    VecXcd logM(N);
    for (int n = 0; n < N; ++n) logM(n) = std::log(M.samples(n));
    const VecXcd lambda = dft(logM, /*inverse=*/true);

    VecXcd c = VecXcd::Zero(N);
    c(0) = 0.5 * lambda(0);
    for (int k = 1; k < N / 2; ++k) c(k) = lambda(k);
    c(N / 2) = 0.5 * lambda(N / 2);

    SpectralFactor U;
    U.grid = M.grid;
    U.samples = dft(c, /*inverse=*/false).array().exp();

    const VecXcd taps = dft(U.samples, /*inverse=*/true);
    double head = 0.0, tail = 0.0;
    for (int k = 0; k < N; ++k) {
        const double a = std::abs(taps(k));
        head = std::max(head, a);
        if (k >= N / 2) tail = std::max(tail, a);
    }
    U.anticausal_tail = head > 0.0 ? tail / head : 0.0;
    return U;
}

RowVecXd compute_gamma_param(const SpectralFactor& U, const RiccatiData& ric) {
    const int N = U.grid.N;
    RowVecXcd acc = RowVecXcd::Zero(ric.Abar.rows());
    const MatXcd I = MatXcd::Identity(ric.Abar.rows(), ric.Abar.rows());
    for (int n = 0; n < N; ++n) {
        const cplx z = U.grid.node(n);
        const MatXcd R = resolvent_solve_izA(ric.Abar, z, I);
        acc += U.samples(n) * (ric.Cbar.cast<cplx>() * R);
    }
    acc /= static_cast<double>(N);
    const double scale = std::max(1.0, acc.cwiseAbs().maxCoeff());
    if (acc.imag().cwiseAbs().maxCoeff() > 1e-9 * scale)
        throw NumericalFailure("compute_gamma_param: imaginary residue above 1e-9");
    return acc.real();
}

double gradient_psd_at(cplx Uz, const RowVecXd& Gamma, const RiccatiData& ric,
                       const StateSpaceModel& m, cplx z) {
    const MatXcd RB = resolvent_solve_izA(ric.Abar, z, ric.Bbar.cast<cplx>());
    const RowVecXcd v = Gamma.cast<cplx>() * RB;
    return v.squaredNorm() / std::norm(Uz) + eval_noncausal_error_psd(m, ric, z)(0, 0).real();
}

VecXd gradient_psd(const SpectralFactor& U, const RowVecXd& Gamma, const RiccatiData& ric,
                   const StateSpaceModel& m) {
    VecXd G(U.grid.N);
    for (int n = 0; n < U.grid.N; ++n)
        G(n) = gradient_psd_at(U.samples(n), Gamma, ric, m, U.grid.node(n));
    return G;
}

FreqGammaSolve bisection_gamma_freq(const VecXd& G, double rho, double tol) {
    if (rho <= 0.0) throw ConfigError("bisection_gamma_freq: rho must be positive");
    const Eigen::Index N = G.size();
    const double gmax = G.maxCoeff();
    if (gmax <= 0.0) return {kInf, VecXd::Ones(N)};

    const double rho2 = rho * rho;
    double lo = gmax * (1.0 + 1e-9);
    double hi = gmax + G.sum() / (static_cast<double>(N) * rho);
    while (trace_equation(G, hi) > rho2) hi *= 2.0;
    if (trace_equation(G, lo) < rho2) {
        hi = lo;
        lo = gmax * (1.0 + 1e-15);
    }
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (trace_equation(G, mid) > rho2)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= tol * hi) break;
    }
    const double gamma = 0.5 * (lo + hi);
    VecXd Mt(N);
    for (Eigen::Index n = 0; n < N; ++n) {
        const double w = 1.0 / (1.0 - G(n) / gamma);
        Mt(n) = w * w;
    }
    return {gamma, Mt};
}

WorstCase worst_case_mse_freq(const VecXd& error_psd, double rho) {
    if (rho < 0.0) throw ConfigError("worst_case_mse_freq: rho must be >= 0");
    const Eigen::Index N = error_psd.size();
    if (rho == 0.0) return {error_psd.mean(), kInf};
    if (error_psd.maxCoeff() <= 0.0) return {0.0, kInf};
    const FreqGammaSolve gs = bisection_gamma_freq(error_psd, rho);
    double tr = 0.0;
    for (Eigen::Index n = 0; n < N; ++n) tr += 1.0 / (1.0 - error_psd(n) / gs.gamma) - 1.0;
    tr /= static_cast<double>(N);
    return {gs.gamma * rho * rho + gs.gamma * tr, gs.gamma};
}

InfiniteSynthesisResult solve_infinite(const StateSpaceModel& m, double rho, int N,
                                       const InfiniteConfig& cfg) {
    if (m.ds() != 1)
        throw ConfigError(
            "solve_infinite: the DFT factorization path requires a scalar target (d_s = 1)");
    if (rho <= 0.0) throw ConfigError("solve_infinite: rho must be positive");
    if (N < 64 || N % 2 != 0) throw ConfigError("solve_infinite: N must be even and >= 64");

    const RiccatiData ric = solve_dare(m);
    const FrequencyGrid grid = FrequencyGrid::uniform(N);
    const NodeCache cache(m, ric, grid);

    InfiniteSynthesisResult res;
    res.rho = rho;

    VecXd M = VecXd::Ones(N);
    VecXcd U;
    RowVecXd Gamma;
    bool converged = false;
    int k = 0;
    for (; k < cfg.max_iter; ++k) {
        SpectralDensity dens{grid, M};
        SpectralFactor fac = spectral_factor_dft(dens);
        U = fac.samples;
        Gamma = cache.gamma_param(U);
        const VecXd G = cache.gradient(U, Gamma);
        const FreqGammaSolve gs = bisection_gamma_freq(G, rho);

        res.gap_history.push_back((G.array() * (gs.M_tilde - M).array()).mean());
        const double eta = 2.0 / (k + 2.0);
        const VecXd Mn = (1.0 - eta) * M + eta * gs.M_tilde;
        if (Mn.minCoeff() <= 0.0)
            throw NonPositiveSample("solve_infinite: density iterate lost positivity");
        const double rel = (Mn - M).cwiseAbs().maxCoeff() / M.cwiseAbs().maxCoeff();
        M = Mn;
        if (rel <= cfg.tol) {
            converged = true;
            ++k;
            break;
        }
    }
    if (!converged && cfg.throw_on_cap)
        throw IterationCap("solve_infinite: no convergence within the iteration cap");

    res.M_star = SpectralDensity{grid, M};
    res.U_star = spectral_factor_dft(res.M_star);
    res.Gamma = cache.gamma_param(res.U_star.samples);
    res.error_psd = cache.gradient(res.U_star.samples, res.Gamma);
    res.iterations = k;

    const WorstCase wc = worst_case_mse_freq(res.error_psd, rho);
    res.value = wc.value;
    res.gamma_star = wc.gamma;
    res.radius_residual =
        std::abs(trace_equation(res.error_psd, res.gamma_star) - rho * rho) / (rho * rho);
    res.K_samples = optimal_filter_samples(res.U_star, res.Gamma, ric, m);
    res.fixed_point_residual = fixed_point_residual(res, m, ric);
    return res;
}

RowVecXcd optimal_filter_at(cplx Uz, const RowVecXd& Gamma, const RiccatiData& ric,
                            const StateSpaceModel& m, cplx z) {
    const MatXcd KH2 = eval_h2(m, ric, z);
    const MatXcd S = eval_s(m, ric, z);
    const MatXcd anti =
        Gamma.cast<cplx>() * resolvent_solve(ric.Abar, 1.0 / z, ric.Bbar.cast<cplx>());
    const MatXcd Dinv = eval_delta_inv(m, ric, z);
    return KH2.row(0) + ((Uz * S.row(0) - anti.row(0)) / Uz) * Dinv;
}

MatXcd optimal_filter_samples(const SpectralFactor& U, const RowVecXd& Gamma,
                              const RiccatiData& ric, const StateSpaceModel& m) {
    const int N = U.grid.N;
    MatXcd K(N, m.dy());
    for (int n = 0; n < N; ++n)
        K.row(n) = optimal_filter_at(U.samples(n), Gamma, ric, m, U.grid.node(n));
    return K;
}

SpectralDensity worst_case_psd(const InfiniteSynthesisResult& res) {
    const Eigen::Index N = res.error_psd.size();
    VecXd M(N);
    for (Eigen::Index n = 0; n < N; ++n) {
        const double w = 1.0 / (1.0 - res.error_psd(n) / res.gamma_star);
        M(n) = w * w;
    }
    return SpectralDensity{res.M_star.grid, M};
}

double fixed_point_residual(const InfiniteSynthesisResult& res, const StateSpaceModel& m,
                            const RiccatiData& ric) {
    const VecXd G = gradient_psd(res.U_star, res.Gamma, ric, m);
    const double g = res.gamma_star;
    double res_m = 0.0;
    const double scale = res.M_star.samples.cwiseAbs().maxCoeff();
    for (Eigen::Index n = 0; n < G.size(); ++n) {
        const double kkt = (g * g) / ((g - G(n)) * (g - G(n)));
        res_m = std::max(res_m, std::abs(res.M_star.samples(n) - kkt));
    }
    res_m /= scale;

    const RowVecXd Gamma2 = compute_gamma_param(res.U_star, ric);
    const double res_gamma = (res.Gamma - Gamma2).cwiseAbs().maxCoeff() /
                             std::max(1.0, res.Gamma.cwiseAbs().maxCoeff());

    const double res_radius =
        std::abs(trace_equation(G, g) - res.rho * res.rho) / (res.rho * res.rho);
    return std::max({res_m, res_gamma, res_radius});
}

void write_infinite_csv(const InfiniteSynthesisResult& res, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    const int N = res.M_star.grid.N;
    out << "omega,M_star,U_re,U_im";
    for (Eigen::Index j = 0; j < res.K_samples.cols(); ++j)
        out << ",K" << j << "_re,K" << j << "_im";
    out << "\n";
    char buf[40];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof(buf), "%.15g", v);
        out << buf << sep;
    };
    for (int n = 0; n < N; ++n) {
        put(res.M_star.grid.omega(n), ',');
        put(res.M_star.samples(n), ',');
        put(res.U_star.samples(n).real(), ',');
        put(res.U_star.samples(n).imag(), res.K_samples.cols() > 0 ? ',' : '\n');
        for (Eigen::Index j = 0; j < res.K_samples.cols(); ++j) {
            put(res.K_samples(n, j).real(), ',');
            put(res.K_samples(n, j).imag(), j + 1 < res.K_samples.cols() ? ',' : '\n');
        }
    }
}

std::string infinite_summary_json(const InfiniteSynthesisResult& res) {
    nlohmann::json j;
    j["gamma_star"] = res.gamma_star;
    j["value"] = res.value;
    j["Gamma"] = std::vector<double>(res.Gamma.data(), res.Gamma.data() + res.Gamma.size());
    j["fixed_point_residual"] = res.fixed_point_residual;
    j["radius_residual"] = res.radius_residual;
    j["N"] = res.M_star.grid.N;
    j["iterations"] = res.iterations;
    return j.dump(2);
}

}  // namespace drkf
