#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "drkf/freq.hpp"
#include "drkf/realize.hpp"

namespace drkf {

enum class NoiseKind { White, ArCorrelated, WorstCase };

struct FilterSpec {
    enum Kind { Kalman, DrkfFinite, DrkfInfinite, Rational, HinfProxy } kind = Kalman;
    int order = 2;  // RA(m) order

    std::string name() const;
    static FilterSpec parse(const std::string& s);
};

struct ExperimentConfig {
    StateSpaceModel model;
    double rho = 1.0;               // per-step radius; the finite horizon uses rho * sqrt(T)
    std::vector<double> rho_sweep;  // optional; empty means {rho}
    int T = 50;
    int N = 1024;
    int trials = 1000;
    std::uint64_t seed = 1;
    NoiseKind noise = NoiseKind::White;
    double ar_phi = 0.8;
    double hinf_rho = 1e3;  // large-radius proxy for the H-infinity baseline
    std::vector<FilterSpec> filters;
    int threads = 0;  // 0 = hardware concurrency
    bool zero_disturbance = false;

    void validate() const;
};

// Synthesized filters plus the evaluation machinery shared by the reports.
class FilterBank {
public:
    explicit FilterBank(const ExperimentConfig& cfg);
    ~FilterBank();
    FilterBank(FilterBank&&) noexcept;

    const std::vector<std::string>& names() const { return names_; }
    const std::vector<double>& synth_seconds() const { return synth_seconds_; }

    // ds x T output trajectory of filter i on a stacked measurement vector.
    MatXd apply(std::size_t i, const VecXd& y_stacked, int T) const;

    // Per-step worst-case expected MSE of filter i at the configured radius.
    double worst_case_value(std::size_t i) const;

    // |T_K|^2 per node for filter i (scalar target path).
    VecXd error_psd(std::size_t i) const;

    const FiniteSynthesisResult& finite_result() const;
    const InfiniteSynthesisResult& infinite_result() const;

    const StateSpaceModel& model() const { return cfg_.model; }
    int horizon() const { return cfg_.T; }

private:
    struct Entry;
    ExperimentConfig cfg_;
    RiccatiData ric_;
    std::vector<Entry> entries_;
    std::vector<std::string> names_;
    std::vector<double> synth_seconds_;
    std::unique_ptr<FiniteSynthesisResult> finite_;
    std::unique_ptr<InfiniteSynthesisResult> infinite_;
};

struct SimResult {
    std::vector<std::string> filter_names;
    MatXd mse_curves;       // T x n_filters, per-step average MSE
    VecXd horizon_mean;     // time-averaged MSE per filter
    VecXd final_step;       // MSE at the last step per filter
    VecXd worst_case_value; // per-step worst-case expected MSE per filter
    std::vector<double> synth_seconds;
    double noise_energy_per_step = 0.0;  // empirical E ||xi||^2 / T
    int trials = 0;
    int T = 0;
    std::uint64_t seed = 0;
};

SimResult simulate(const ExperimentConfig& cfg);

// Monte-Carlo worst-case noise generator: xi = D xi0 with D the transport map
// of the finite DR-KF at the simulated horizon.
MatXd worst_case_noise_map(const StateSpaceModel& m, int T, double rho);

struct FreqResponseReport {
    VecXd omega;
    std::vector<std::string> filter_names;
    MatXd psd;  // N x n_filters, |T_K(e^{j omega})|^2
};

FreqResponseReport freq_response_report(const ExperimentConfig& cfg);

// Worst-case expected MSE of one filter: finite filters evaluate the matrix
// dual at horizon T (per-step units), stationary filters the normalized-trace
// dual on the grid.
double evaluate_worst_case(const ExperimentConfig& cfg, const FilterSpec& f, double rho);

struct BenchRow {
    int T = 0;
    double finite_seconds = 0.0;
    double infinite_seconds = 0.0;
    double finite_value = 0.0;
    double infinite_value = 0.0;
};

std::vector<BenchRow> bench_scaling(const StateSpaceModel& m, const std::vector<int>& T_list,
                                    double rho, int N = 512);

// CSV writers with deterministic formatting.
void write_sim_csv(const SimResult& r, const std::string& path);
void write_freqresp_csv(const FreqResponseReport& r, const std::string& path);
void write_bench_csv(const std::vector<BenchRow>& rows, const std::string& path);
void write_gnuplot_script(const std::string& csv_path, int n_series, const std::string& path);

}  // namespace drkf
