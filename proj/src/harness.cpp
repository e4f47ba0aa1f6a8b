#include "drkf/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <thread>

#include "drkf/errors.hpp"

namespace drkf {

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

void write_row(std::ofstream& out, const std::vector<double>& vals) {
    char buf[40];
    for (std::size_t i = 0; i < vals.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.15g", vals[i]);
        out << buf << (i + 1 < vals.size() ? "," : "");
    }
    out << "\n";
}

// FIR taps (first T) of a sampled frequency response, one row per lag.
MatXd fir_taps(const MatXcd& K_samples, int T) {
    const int N = static_cast<int>(K_samples.rows());
    const int taps = std::min(T, N);
    MatXd
        out(taps, K_samples.cols());
    for (Eigen::Index j = 0; j < K_samples.cols(); ++j) {
        const VecXcd col = dft(K_samples.col(j), /*inverse=*/true);
        for (int k = 0; k < taps; ++k) out(k, j) = col(k).real();
    }
    return out;
}

}  // namespace

std::string FilterSpec::name() const {
    switch (kind) {
        case Kalman: return "kalman";
        case DrkfFinite: return "drkf_finite";
        case DrkfInfinite: return "drkf_infinite";
        case Rational: return "ra" + std::to_string(order);
        case HinfProxy: return "hinf_proxy";
    }
    return "?";
}

FilterSpec FilterSpec::parse(const std::string& s) {
    FilterSpec f;
    if (s == "kalman") f.kind = Kalman;
    else if (s == "drkf_finite") f.kind = DrkfFinite;
    else if (s == "drkf_infinite") f.kind = DrkfInfinite;
    else if (s == "hinf_proxy" || s == "hinf") f.kind = HinfProxy;
    else if (s.rfind("ra", 0) == 0 && s.size() > 2) {
        f.kind = Rational;
        f.order = std::stoi(s.substr(2));
        if (f.order < 0) throw ConfigError("filter spec: RA order must be >= 0");
    } else {
        throw ConfigError("unknown filter spec: " + s +
                          " (expected kalman|drkf_finite|drkf_infinite|raM|hinf_proxy)");
    }
    return f;
}

void ExperimentConfig::validate() const {
    if (rho <= 0.0) throw ConfigError("config: rho must be positive");
    for (double r : rho_sweep)
        if (r <= 0.0) throw ConfigError("config: rho sweep entries must be positive");
    if (T < 1) throw ConfigError("config: T must be >= 1");
    if (N < 64 || N % 2 != 0) throw ConfigError("config: N must be even and >= 64");
    if (trials < 1) throw ConfigError("config: trials must be >= 1");
    if (!(ar_phi > -1.0 && ar_phi < 1.0)) throw ConfigError("config: AR parameter must be in (-1,1)");
    if (filters.empty()) throw ConfigError("config: at least one filter required");
}

// ---------------------------------------------------------------------------
// FilterBank

struct FilterBank::Entry {
    FilterSpec spec;
    // one of:
    MatXd K_matrix;                     // finite-horizon estimator
    StateSpaceFilter ss;                // realized state-space filter
    MatXd taps;                         // FIR taps of a stationary filter
    bool use_matrix = false, use_ss = false;

    // evaluation data (stationary filters): spectral factor samples + Gamma
    VecXd psd;           // |T_K|^2 per node
    double value = 0.0;  // worst-case per-step value at the config radius
};

FilterBank::~FilterBank() = default;
FilterBank::FilterBank(FilterBank&&) noexcept = default;

FilterBank::FilterBank(const ExperimentConfig& cfg) : cfg_(cfg), ric_(solve_dare(cfg.model)) {
    cfg_.validate();
    const StateSpaceModel& m = cfg_.model;
    const FrequencyGrid grid = FrequencyGrid::uniform(cfg_.N);

    // shared synthesized objects, built on demand
    std::unique_ptr<FiniteSynthesisResult> fin;
    std::unique_ptr<InfiniteSynthesisResult> inf;
    std::unique_ptr<InfiniteSynthesisResult> hinf;

    auto need_finite = [&]() -> FiniteSynthesisResult& {
        if (!fin) {
            fin = std::make_unique<FiniteSynthesisResult>(
                fw_solve_finite(m, cfg_.T, cfg_.rho * std::sqrt(cfg_.T)));
        }
        return *fin;
    };
    auto need_infinite = [&]() -> InfiniteSynthesisResult& {
        if (!inf) inf = std::make_unique<InfiniteSynthesisResult>(solve_infinite(m, cfg_.rho, cfg_.N));
        return *inf;
    };
    auto need_hinf = [&]() -> InfiniteSynthesisResult& {
        if (!hinf)
            hinf = std::make_unique<InfiniteSynthesisResult>(solve_infinite(m, cfg_.hinf_rho, cfg_.N));
        return *hinf;
    };

    for (const FilterSpec& spec : cfg_.filters) {
        Entry e;
        e.spec = spec;
        const double t0 = now_seconds();
        switch (spec.kind) {
            case FilterSpec::Kalman: {
                RationalFactor unit;  // order 0, U = 1: the correction vanishes
                unit.A = MatXd(0, 0);
                unit.B = VecXd(0);
                unit.C = RowVecXd(0);
                unit.d_sqrt = 1.0;
                e.ss = assemble_filter(unit, m, ric_);
                e.use_ss = true;
                SpectralFactor ones{grid, VecXcd::Ones(cfg_.N), 0.0};
                const RowVecXd Gam = compute_gamma_param(ones, ric_);
                e.psd = gradient_psd(ones, Gam, ric_, m);
                break;
            }
            case FilterSpec::DrkfFinite: {
                const FiniteSynthesisResult& r = need_finite();
                e.K_matrix = r.K;
                e.use_matrix = true;
                e.value = r.value / cfg_.T;
                break;
            }
            case FilterSpec::DrkfInfinite: {
                const InfiniteSynthesisResult& r = need_infinite();
                e.taps = fir_taps(r.K_samples, cfg_.T);
                e.psd = r.error_psd;
                break;
            }
            case FilterSpec::Rational: {
                const InfiniteSynthesisResult& r = need_infinite();
                const RationalPSD ra =
                    best_precision(r.M_star.samples, spec.order, 1e-9, ErrorMetric::Relative);
                const RationalFactor u = rational_factor(ra);
                e.ss = assemble_filter(u, m, ric_);
                e.use_ss = true;
                SpectralFactor uf{grid, u.eval_grid(cfg_.N), 0.0};
                const RowVecXd Gam = compute_gamma_param(uf, ric_);
                e.psd = gradient_psd(uf, Gam, ric_, m);
                break;
            }
            case FilterSpec::HinfProxy: {
                const InfiniteSynthesisResult& r = need_hinf();
                e.taps = fir_taps(r.K_samples, cfg_.T);
                e.psd = r.error_psd;
                break;
            }
        }
        if (e.psd.size() > 0) e.value = worst_case_mse_freq(e.psd, cfg_.rho).value;
        synth_seconds_.push_back(now_seconds() - t0);
        names_.push_back(spec.name());
        entries_.push_back(std::move(e));
    }
    if (fin) finite_ = std::move(fin);
    if (inf) infinite_ = std::move(inf);
}

MatXd FilterBank::apply(std::size_t i, const VecXd& y_stacked, int T) const {
    const Entry& e = entries_[i];
    const Eigen::Index dy = cfg_.model.dy(), ds = cfg_.model.ds();
    if (e.use_matrix) {
        const VecXd shat = e.K_matrix * y_stacked;
        return Eigen::Map<const MatXd>(shat.data(), ds, T).transpose();
    }
    MatXd y_rows = Eigen::Map<const MatXd>(y_stacked.data(), dy, T).transpose();
    if (e.use_ss) {
        StateSpaceFilter f = e.ss;  // own the runtime state
        return filter_run(f, y_rows);
    }
    // FIR convolution
    MatXd out = MatXd::Zero(T, ds);
    for (int t = 0; t < T; ++t) {
        for (int k = 0; k <= t && k < e.taps.rows(); ++k)
            out(t, 0) += e.taps.row(k).dot(y_rows.row(t - k));
    }
    return out;
}

double FilterBank::worst_case_value(std::size_t i) const { return entries_[i].value; }

VecXd FilterBank::error_psd(std::size_t i) const {
    if (entries_[i].psd.size() == 0)
        throw ConfigError("error_psd: finite-horizon filters have no stationary PSD");
    return entries_[i].psd;
}

const FiniteSynthesisResult& FilterBank::finite_result() const {
    if (!finite_) throw ConfigError("finite_result: no finite synthesis in this bank");
    return *finite_;
}

const InfiniteSynthesisResult& FilterBank::infinite_result() const {
    if (!infinite_) throw ConfigError("infinite_result: no infinite synthesis in this bank");
    return *infinite_;
}

// ---------------------------------------------------------------------------
// simulation

MatXd worst_case_noise_map(const StateSpaceModel& m, int T, double rho) {
    const FiniteSynthesisResult r = fw_solve_finite(m, T, rho * std::sqrt(T));
    const BlockToeplitzPair pair = build_block_toeplitz(m, T);
    const ErrorOperator op = make_error_operator(r.K, pair);
    return worst_case_transform(op, r.gamma_star);
}

namespace {

VecXd draw_noise(const ExperimentConfig& cfg, const MatXd* D, GaussianRng& rng) {
    const StateSpaceModel& m = cfg.model;
    const Eigen::Index nxi = m.xi_dim(cfg.T);
    if (cfg.zero_disturbance) return VecXd::Zero(nxi);
    switch (cfg.noise) {
        case NoiseKind::White:
            return rng.vector(nxi);
        case NoiseKind::WorstCase:
            return (*D) * rng.vector(nxi);
        case NoiseKind::ArCorrelated: {
            // Stationary AR(1) per coordinate, unit marginal variance; x0 white.
            VecXd xi(nxi);
            const Eigen::Index dx = m.dx(), dw = m.dw(), dy = m.dy();
            xi.head(dx) = rng.vector(dx);
            const double phi = cfg.ar_phi;
            const double innov = std::sqrt(1.0 - phi * phi);
            for (Eigen::Index c = 0; c < dw; ++c) {
                double prev = 0.0;
                for (int t = 0; t < cfg.T - 1; ++t) {
                    prev = (t == 0) ? rng() : phi * prev + innov * rng();
                    xi(dx + t * dw + c) = prev;
                }
            }
            const Eigen::Index voff = dx + (cfg.T - 1) * dw;
            for (Eigen::Index c = 0; c < dy; ++c) {
                double prev = 0.0;
                for (int t = 0; t < cfg.T; ++t) {
                    prev = (t == 0) ? rng() : phi * prev + innov * rng();
                    xi(voff + t * dy + c) = prev;
                }
            }
            return xi;
        }
    }
    return VecXd::Zero(nxi);
}

}  // namespace

SimResult simulate(const ExperimentConfig& cfg) {
    cfg.validate();
    const StateSpaceModel& m = cfg.model;
    const FilterBank bank(cfg);
    const std::size_t nf = bank.names().size();
    const int T = cfg.T;

    MatXd D;
    if (cfg.noise == NoiseKind::WorstCase) D = worst_case_noise_map(m, T, cfg.rho);

    const int nthreads = cfg.threads > 0
                             ? cfg.threads
                             : std::max(1u, std::thread::hardware_concurrency());
    const int chunk = (cfg.trials + nthreads - 1) / nthreads;

    struct Partial {
        MatXd sq;          // T x nf accumulated squared errors
        double energy = 0.0;
    };
    auto run_chunk = [&](int t0, int t1) {
        Partial p;
        p.sq = MatXd::Zero(T, static_cast<Eigen::Index>(nf));
        for (int trial = t0; trial < t1; ++trial) {
            GaussianRng rng(cfg.seed ^ static_cast<std::uint64_t>(trial));
            const VecXd xi = draw_noise(cfg, &D, rng);
            p.energy += xi.squaredNorm();
            const auto [y, s] = simulate_stacked(m, T, xi);
            const MatXd s_rows =
                Eigen::Map<const MatXd>(s.data(), m.ds(), T).transpose();
            for (std::size_t i = 0; i < nf; ++i) {
                const MatXd shat = bank.apply(i, y, T);
                p.sq.col(static_cast<Eigen::Index>(i)) +=
                    (shat - s_rows).rowwise().squaredNorm();
            }
        }
        return p;
    };

    std::vector<std::future<Partial>> futs;
    for (int t0 = 0; t0 < cfg.trials; t0 += chunk)
        futs.push_back(std::async(std::launch::async, run_chunk, t0,
                                  std::min(cfg.trials, t0 + chunk)));
    MatXd sq = MatXd::Zero(T, static_cast<Eigen::Index>(nf));
    double energy = 0.0;
    for (auto& f : futs) {
        Partial p = f.get();
        sq += p.sq;
        energy += p.energy;
    }

    SimResult res;
    res.filter_names = bank.names();
    res.mse_curves = sq / static_cast<double>(cfg.trials);
    res.horizon_mean = res.mse_curves.colwise().mean();
    res.final_step = res.mse_curves.row(T - 1);
    res.worst_case_value.resize(static_cast<Eigen::Index>(nf));
    for (std::size_t i = 0; i < nf; ++i)
        res.worst_case_value(static_cast<Eigen::Index>(i)) = bank.worst_case_value(i);
    res.synth_seconds = bank.synth_seconds();
    res.noise_energy_per_step = energy / (static_cast<double>(cfg.trials) * T);
    res.trials = cfg.trials;
    res.T = T;
    res.seed = cfg.seed;
    return res;
}

FreqResponseReport freq_response_report(const ExperimentConfig& cfg) {
    const FilterBank bank(cfg);
    FreqResponseReport rep;
    rep.filter_names = bank.names();
    rep.omega.resize(cfg.N);
    const FrequencyGrid grid = FrequencyGrid::uniform(cfg.N);
    for (int n = 0; n < cfg.N; ++n) rep.omega(n) = grid.omega(n);
    rep.psd.resize(cfg.N, static_cast<Eigen::Index>(bank.names().size()));
    for (std::size_t i = 0; i < bank.names().size(); ++i)
        rep.psd.col(static_cast<Eigen::Index>(i)) = bank.error_psd(i);
    return rep;
}

double evaluate_worst_case(const ExperimentConfig& cfg, const FilterSpec& f, double rho) {
    ExperimentConfig local = cfg;
    local.rho = rho;
    local.filters = {f};
    const FilterBank bank(local);
    return bank.worst_case_value(0);
}

std::vector<BenchRow> bench_scaling(const StateSpaceModel& m, const std::vector<int>& T_list,
                                    double rho, int N) {
    std::vector<BenchRow> rows;
    for (int T : T_list) {
        BenchRow row;
        row.T = T;
        double t0 = now_seconds();
        const FiniteSynthesisResult fr = fw_solve_finite(m, T, rho * std::sqrt(T));
        row.finite_seconds = now_seconds() - t0;
        row.finite_value = fr.value;
        t0 = now_seconds();
        const InfiniteSynthesisResult ir = solve_infinite(m, rho, N);
        row.infinite_seconds = now_seconds() - t0;
        row.infinite_value = ir.value;
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// writers

void write_sim_csv(const SimResult& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << "t";
    for (const auto& n : r.filter_names) out << ",mse_" << n;
    out << "\n";
    for (int t = 0; t < r.T; ++t) {
        std::vector<double> vals{static_cast<double>(t)};
        for (Eigen::Index j = 0; j < r.mse_curves.cols(); ++j) vals.push_back(r.mse_curves(t, j));
        write_row(out, vals);
    }
    out << "# aggregate worst_case_value";
    for (Eigen::Index j = 0; j < r.worst_case_value.size(); ++j) out << "," << r.worst_case_value(j);
    out << "\n# horizon_mean";
    for (Eigen::Index j = 0; j < r.horizon_mean.size(); ++j) out << "," << r.horizon_mean(j);
    out << "\n# final_step";
    for (Eigen::Index j = 0; j < r.final_step.size(); ++j) out << "," << r.final_step(j);
    out << "\n# trials," << r.trials << "\n# seed," << r.seed << "\n";
}

void write_freqresp_csv(const FreqResponseReport& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << "omega";
    for (const auto& n : r.filter_names) out << ",psd_" << n;
    out << "\n";
    for (Eigen::Index i = 0; i < r.omega.size(); ++i) {
        std::vector<double> vals{r.omega(i)};
        for (Eigen::Index j = 0; j < r.psd.cols(); ++j) vals.push_back(r.psd(i, j));
        write_row(out, vals);
    }
}

void write_bench_csv(const std::vector<BenchRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << "T,finite_seconds,infinite_seconds,finite_value,infinite_value\n";
    for (const auto& r : rows) {
        std::vector<double> vals{static_cast<double>(r.T), r.finite_seconds, r.infinite_seconds,
                                 r.finite_value, r.infinite_value};
        write_row(out, vals);
    }
}

void write_gnuplot_script(const std::string& csv_path, int n_series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << "set datafile separator ','\nset key autotitle columnhead\nset grid\n";
    out << "plot";
    for (int j = 0; j < n_series; ++j)
        out << " '" << csv_path << "' using 1:" << (j + 2) << " with lines"
            << (j + 1 < n_series ? "," : "\n");
    out << "pause -1\n";
}

}  // namespace drkf
