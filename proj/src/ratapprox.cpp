#include "drkf/ratapprox.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <json.hpp>

#include "drkf/errors.hpp"
#include "drkf/lp.hpp"

namespace drkf {

namespace {

// Cosine feature row [1, 2cos w, ..., 2cos mw] (P) and [2cos w, ...] (Q).
RowVecXd cos_features(double omega, int m, bool with_constant) {
    RowVecXd f(with_constant ? m + 1 : m);
    Eigen::Index idx = 0;
    if (with_constant) f(idx++) = 1.0;
    for (int k = 1; k <= m; ++k) f(idx++) = 2.0 * std::cos(k * omega);
    return f;
}

RationalPSD make_result(const VecXd& x, int m, double eps) {
    RationalPSD r;
    r.P.m = m;
    r.P.coeffs = x.head(m + 1);
    r.Q.m = m;
    r.Q.coeffs = VecXd(m + 1);
    r.Q.coeffs(0) = 1.0;
    r.Q.coeffs.tail(m) = x.tail(m);
    r.eps = eps;
    return r;
}

}  // namespace

double LaurentPolynomial::eval(double omega) const {
    double v = coeffs(0);
    for (int k = 1; k <= m; ++k) v += 2.0 * coeffs(k) * std::cos(k * omega);
    return v;
}

VecXd LaurentPolynomial::eval_grid(int N) const {
    VecXd v(N);
    for (int n = 0; n < N; ++n) v(n) = eval(2.0 * M_PI * n / N);
    return v;
}

std::optional<RationalPSD> feasibility_envelope(const VecXd& M, int m, const VecXd& lo,
                                                const VecXd& hi, double delta) {
    const int N = static_cast<int>(M.size());
    if (m < 0) throw ConfigError("feasibility: order must be >= 0");
    if (N <= 2 * m) throw ConfigError("feasibility: need N > 2m grid nodes");
    if (M.minCoeff() <= 0.0) throw NonPositiveSample("feasibility: density must be positive");
    if (lo.size() != N || hi.size() != N) throw ConfigError("feasibility: envelope size mismatch");

    // conjugate symmetry makes nodes n and N-n identical constraints
    const int half = N / 2;
    const int nodes = half + 1;
    const int d = 2 * m + 1;
    MatXd G(4 * nodes, d);
    VecXd h(4 * nodes);
    for (int n = 0; n <= half; ++n) {
        const double w = 2.0 * M_PI * n / N;
        const RowVecXd cp = cos_features(w, m, true);
        const RowVecXd cq = cos_features(w, m, false);
        // P - hi Q <= 0
        G.row(4 * n).head(m + 1) = cp;
        G.row(4 * n).tail(m) = -hi(n) * cq;
        h(4 * n) = hi(n);
        // -P + lo Q <= 0
        G.row(4 * n + 1).head(m + 1) = -cp;
        G.row(4 * n + 1).tail(m) = lo(n) * cq;
        h(4 * n + 1) = -lo(n);
        // P >= delta
        G.row(4 * n + 2).head(m + 1) = -cp;
        G.row(4 * n + 2).tail(m).setZero();
        h(4 * n + 2) = -delta;
        // Q >= delta
        G.row(4 * n + 3).head(m + 1).setZero();
        G.row(4 * n + 3).tail(m) = -cq;
        h(4 * n + 3) = 1.0 - delta;
    }
    const MarginLpResult lp = solve_margin_lp(G, h);
    if (!lp.feasible) return std::nullopt;
    return make_result(lp.x, m, 0.0);
}

std::optional<RationalPSD> feasibility_lp(const VecXd& M, int m, double eps, double delta) {
    if (eps < 0.0) throw ConfigError("feasibility_lp: eps must be >= 0");
    auto r = feasibility_envelope(M, m, M.array() - eps, M.array() + eps, delta);
    if (r) r->eps = eps;
    return r;
}

RationalPSD best_precision(const VecXd& M, int m, double tol_eps, ErrorMetric metric) {
    const double mean = M.mean();
    double lo = 0.0;
    double hi = metric == ErrorMetric::Absolute
                    ? (M.array() - mean).abs().maxCoeff() + 1e-12
                    : 1.0 - 1e-9;
    auto probe = [&](double e) {
        return metric == ErrorMetric::Absolute
                   ? feasibility_lp(M, m, e)
                   : feasibility_envelope(M, m, (1.0 - e) * M, (1.0 + e) * M);
    };
    std::optional<RationalPSD> best = probe(hi);
    if (!best) throw NumericalFailure("best_precision: upper bracket infeasible");
    best->eps = hi;
    while (hi - lo > tol_eps * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        auto r = probe(mid);
        if (r) {
            hi = mid;
            r->eps = mid;
            best = std::move(r);
        } else {
            lo = mid;
        }
    }
    return *best;
}

RationalPSD least_order(const VecXd& M, double eps, int m_max) {
    if (eps <= 0.0) throw ConfigError("least_order: eps must be positive");
    for (int m = 0; m <= m_max; ++m) {
        auto r = feasibility_lp(M, m, eps);
        if (r) return *r;
    }
    throw OrderCapExceeded("least_order: no feasible order <= m_max");
}

cplx MinPhasePoly::eval(cplx z) const {
    cplx v = 0.0;
    const cplx zi = 1.0 / z;
    cplx p = 1.0;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
        v += coeffs(k) * p;
        p *= zi;
    }
    return v;
}

MinPhasePoly poly_spectral_factor(const LaurentPolynomial& P) {
    // trim vanishing leading coefficients
    int m = P.m;
    const double cmax = P.coeffs.cwiseAbs().maxCoeff();
    if (cmax <= 0.0) throw NonPositiveSample("poly_spectral_factor: zero polynomial");
    while (m > 0 && std::abs(P.coeffs(m)) <= 1e-14 * cmax) --m;

    if (m == 0) {
        if (P.coeffs(0) <= 0.0)
            throw NonPositiveSample("poly_spectral_factor: constant must be positive");
        MinPhasePoly s;
        s.coeffs = VecXd::Constant(1, std::sqrt(P.coeffs(0)));
        return s;
    }

    // roots of z^m P(z): coefficients c_j = p_{|j-m|} for z^j, j = 0..2m;
    // computed as companion-matrix eigenvalues
    const int deg = 2 * m;
    VecXd c(deg + 1);
    for (int j = 0; j <= deg; ++j) c(j) = P.coeffs(std::abs(j - m));
    MatXd comp = MatXd::Zero(deg, deg);
    comp.diagonal(-1).setOnes();
    for (int j = 0; j < deg; ++j) comp(j, deg - 1) = -c(j) / c(deg);

    Eigen::ComplexEigenSolver<MatXcd> es(comp.cast<cplx>());
    if (es.info() != Eigen::Success)
        throw NumericalFailure("poly_spectral_factor: eigenvalue iteration failed");
    std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + deg);

    for (const cplx& r : roots) {
        const double a = std::abs(r);
        if (a >= 1.0 - 1e-6 && a <= 1.0 + 1e-6)
            throw RootNearCircle("poly_spectral_factor: root within 1e-6 of the unit circle");
    }

    std::vector<cplx> inside, outside;
    for (const cplx& r : roots) (std::abs(r) < 1.0 ? inside : outside).push_back(r);
    if (static_cast<int>(inside.size()) != m)
        throw NumericalFailure("poly_spectral_factor: roots do not split m/m across the circle");

    // pairing check: every inside root r has a partner 1/conj(r) outside
    std::vector<bool> used(outside.size(), false);
    for (const cplx& r : inside) {
        const cplx partner = 1.0 / std::conj(r);
        bool found = false;
        for (std::size_t i = 0; i < outside.size(); ++i) {
            if (!used[i] && std::abs(outside[i] - partner) <= 1e-8 * std::abs(partner) + 1e-8) {
                used[i] = true;
                found = true;
                break;
            }
        }
        if (!found) throw NumericalFailure("poly_spectral_factor: root pairing failed");
    }

    // S0(z) = prod (1 - r_i z^{-1})
    VecXcd s = VecXcd::Zero(m + 1);
    s(0) = 1.0;
    for (int i = 0; i < m; ++i) {
        for (int k = i + 1; k >= 1; --k) s(k) -= inside[i] * s(k - 1);
    }
    if (s.imag().cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, s.real().cwiseAbs().maxCoeff()))
        throw NumericalFailure("poly_spectral_factor: factor coefficients not real");

    MinPhasePoly sp;
    sp.coeffs = s.real();

    // scale so |S|^2 = P on the circle; the ratio is constant, average it
    const int Nref = std::max(64, 8 * m);
    double acc = 0.0;
    for (int n = 0; n < Nref; ++n) {
        const double w = 2.0 * M_PI * n / Nref;
        const double pv = P.eval(w);
        const double sv = std::norm(sp.eval(std::polar(1.0, w)));
        if (pv <= 0.0) throw NonPositiveSample("poly_spectral_factor: P not positive on circle");
        acc += pv / sv;
    }
    sp.coeffs *= std::sqrt(acc / Nref);
    if (sp.coeffs(0) < 0.0) sp.coeffs = -sp.coeffs;
    return sp;
}

cplx RationalFactor::eval(cplx z) const {
    if (order() == 0) return d_sqrt;
    const MatXcd R = resolvent_solve(A, z, B.cast<cplx>());
    return d_sqrt * (1.0 + (C.cast<cplx>() * R)(0, 0));
}

VecXcd RationalFactor::eval_grid(int N) const {
    VecXcd v(N);
    for (int n = 0; n < N; ++n) v(n) = eval(std::polar(1.0, 2.0 * M_PI * n / N));
    return v;
}

RationalFactor rational_factor(const RationalPSD& r) {
    const MinPhasePoly sp = poly_spectral_factor(r.P);
    const MinPhasePoly sq = poly_spectral_factor(r.Q);
    const int n = std::max(sp.degree(), sq.degree());

    VecXd spc = VecXd::Zero(n + 1), sqc = VecXd::Zero(n + 1);
    spc.head(sp.coeffs.size()) = sp.coeffs;
    sqc.head(sq.coeffs.size()) = sq.coeffs;

    RationalFactor f;
    f.d_sqrt = spc(0) / sqc(0);
    f.A = MatXd::Zero(n, n);
    f.B = VecXd::Zero(n);
    f.C = RowVecXd::Zero(n);
    if (n > 0) {
        f.A.bottomLeftCorner(n - 1, n - 1).setIdentity();
        for (int k = 1; k <= n; ++k) {
            f.A(0, k - 1) = -sqc(k) / sqc(0);
            f.C(k - 1) = spc(k) / spc(0) - sqc(k) / sqc(0);
        }
        f.B(0) = 1.0;
        if (spectral_radius(f.A) >= 1.0 || spectral_radius(f.A - f.B * f.C) >= 1.0)
            throw NumericalFailure("rational_factor: realization is not minimum phase");
    }
    return f;
}

RefinedReport refined_error_report(const RationalPSD& r, const VecXd& M, int refine) {
    const int N = static_cast<int>(M.size());
    const int Nf = refine * N;
    const VecXd Pf = r.P.eval_grid(Nf);
    const VecXd Qf = r.Q.eval_grid(Nf);

    // trigonometric interpolation of M by zero-padding its DFT
    VecXcd Mc = M.cast<cplx>();
    VecXcd spec = dft(Mc, /*inverse=*/false);
    VecXcd padded = VecXcd::Zero(Nf);
    for (int k = 0; k <= N / 2; ++k) padded(k) = spec(k);
    for (int k = 1; k < N / 2; ++k) padded(Nf - k) = spec(N - k);
    padded(N / 2) *= 0.5;
    padded(Nf - N / 2) = padded(N / 2);
    const VecXcd Mf = dft(padded, /*inverse=*/true) * (static_cast<double>(Nf) / N);

    RefinedReport rep;
    rep.min_P = Pf.minCoeff();
    rep.min_Q = Qf.minCoeff();
    rep.max_error = 0.0;
    for (int n = 0; n < Nf; ++n)
        rep.max_error = std::max(rep.max_error, std::abs(Pf(n) / Qf(n) - Mf(n).real()));
    return rep;
}

std::string rational_psd_json(const RationalPSD& r) {
    nlohmann::json j;
    j["m"] = r.P.m;
    j["p"] = std::vector<double>(r.P.coeffs.data(), r.P.coeffs.data() + r.P.coeffs.size());
    j["q"] = std::vector<double>(r.Q.coeffs.data(), r.Q.coeffs.data() + r.Q.coeffs.size());
    j["eps"] = r.eps;
    return j.dump(2);
}

RationalPSD rational_psd_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    RationalPSD r;
    r.P.m = j.at("m").get<int>();
    r.Q.m = r.P.m;
    const auto p = j.at("p").get<std::vector<double>>();
    const auto q = j.at("q").get<std::vector<double>>();
    if (static_cast<int>(p.size()) != r.P.m + 1 || static_cast<int>(q.size()) != r.P.m + 1)
        throw ConfigError("rational_psd_from_json: coefficient count mismatch");
    r.P.coeffs = Eigen::Map<const VecXd>(p.data(), p.size());
    r.Q.coeffs = Eigen::Map<const VecXd>(q.data(), q.size());
    r.eps = j.at("eps").get<double>();
    return r;
}

}  // namespace drkf
