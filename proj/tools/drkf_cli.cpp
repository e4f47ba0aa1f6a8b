// Command-line front end: synthesis, rational approximation, simulation,
// frequency reports, worst-case evaluation, and runtime benchmarks.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "drkf/errors.hpp"
#include "drkf/harness.hpp"

namespace {

using namespace drkf;

StateSpaceModel load_model(const std::string& path) { return StateSpaceModel::load(path); }

std::vector<FilterSpec> parse_filters(const std::string& csv) {
    std::vector<FilterSpec> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const std::size_t next = csv.find(',', pos);
        const std::string tok = csv.substr(pos, next == std::string::npos ? next : next - pos);
        if (!tok.empty()) out.push_back(FilterSpec::parse(tok));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (out.empty()) throw ConfigError("no filters given");
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << text << "\n";
}

VecXd load_density_csv(const std::string& path) {
    // one sample per line, or the M_star column of a synth-infinite export
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open density file: " + path);
    std::vector<double> vals;
    std::string line;
    bool has_header = false;
    int mcol = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!has_header && line.find("omega") != std::string::npos) {
            has_header = true;
            // locate M_star column
            std::stringstream ss(line);
            std::string tok;
            int col = 0;
            while (std::getline(ss, tok, ',')) {
                if (tok == "M_star") mcol = col;
                ++col;
            }
            continue;
        }
        std::stringstream ss(line);
        std::string tok;
        int col = 0;
        double v = 0.0;
        while (std::getline(ss, tok, ',')) {
            if (col == (has_header ? mcol : 0)) v = std::stod(tok);
            ++col;
        }
        vals.push_back(v);
    }
    if (vals.empty()) throw ConfigError("density file is empty: " + path);
    return Eigen::Map<const VecXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

int run(int argc, char** argv) {
    CLI::App app{"Wasserstein-2 distributionally robust Kalman filtering toolkit"};
    app.require_subcommand(1);

    std::string model_path, out_prefix = "drkf_out", filters_csv = "kalman,drkf_infinite";
    std::string density_path, noise = "white";
    double rho = 1.0, rho_T = -1.0, eps = -1.0;
    int T = 50, N = 1024, trials = 1000, order = -1, m_max = 8;
    std::uint64_t seed = 1;
    bool gnuplot = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", model_path, "model JSON file")->required();
        sub->add_option("--out", out_prefix, "output file prefix");
    };

    auto* sf = app.add_subcommand("synth-finite", "finite-horizon DR-KF synthesis");
    add_common(sf);
    sf->add_option("--rho", rho, "per-step radius (scaled by sqrt(T))");
    sf->add_option("--rho-T", rho_T, "total horizon radius (overrides --rho)");
    sf->add_option("--T", T, "horizon")->required();

    auto* si = app.add_subcommand("synth-infinite", "infinite-horizon DR-KF synthesis");
    add_common(si);
    si->add_option("--rho", rho, "per-step radius")->required();
    si->add_option("--N", N, "frequency grid size");

    auto* ra = app.add_subcommand("ratapprox", "rational approximation of the DR density");
    add_common(ra);
    ra->add_option("--rho", rho, "per-step radius");
    ra->add_option("--N", N, "frequency grid size");
    ra->add_option("--order", order, "fixed order, best precision");
    ra->add_option("--eps", eps, "fixed precision, least order");
    ra->add_option("--m-max", m_max, "order cap for --eps mode");
    ra->add_option("--density", density_path, "reuse a density CSV instead of solving");

    auto* sim = app.add_subcommand("simulate", "Monte-Carlo time-domain comparison");
    add_common(sim);
    sim->add_option("--rho", rho, "per-step radius");
    sim->add_option("--T", T, "horizon");
    sim->add_option("--N", N, "frequency grid size");
    sim->add_option("--noise", noise, "white|ar|worst");
    sim->add_option("--trials", trials, "number of trials");
    sim->add_option("--seed", seed, "base seed");
    sim->add_option("--filters", filters_csv, "comma list: kalman,drkf_finite,drkf_infinite,raM,hinf_proxy");
    sim->add_flag("--gnuplot", gnuplot, "also write a gnuplot script");

    auto* fr = app.add_subcommand("freqresp", "frequency-response report |T_K|^2");
    add_common(fr);
    fr->add_option("--rho", rho, "per-step radius");
    fr->add_option("--N", N, "frequency grid size");
    fr->add_option("--T", T, "horizon used by finite filters");
    fr->add_option("--filters", filters_csv, "comma list of filters");
    fr->add_flag("--gnuplot", gnuplot, "also write a gnuplot script");

    auto* ev = app.add_subcommand("evaluate", "worst-case expected MSE of filters");
    add_common(ev);
    ev->add_option("--rho", rho, "per-step radius");
    ev->add_option("--T", T, "horizon used by finite filters");
    ev->add_option("--N", N, "frequency grid size");
    ev->add_option("--filters", filters_csv, "comma list of filters");

    auto* be = app.add_subcommand("bench", "runtime scaling over horizons");
    add_common(be);
    be->add_option("--rho", rho, "per-step radius");
    be->add_option("--N", N, "frequency grid size");
    std::vector<int> T_list{10, 25, 50};
    be->add_option("--T-list", T_list, "horizons to time");

    CLI11_PARSE(app, argc, argv);

    if (sf->parsed()) {
        const StateSpaceModel m = load_model(model_path);
        const double r = rho_T > 0.0 ? rho_T : rho * std::sqrt(static_cast<double>(T));
        const FiniteSynthesisResult res = fw_solve_finite(m, T, r);
        write_finite_filter_csv(res, m, out_prefix + "_K.csv");
        write_text(out_prefix + "_summary.json", finite_summary_json(res));
        std::printf("finite synthesis: T=%d rho_T=%.6g value=%.10g gamma=%.10g iters=%d\n", T, r,
                    res.value, res.gamma_star, res.iterations);
        return 0;
    }
    if (si->parsed()) {
        const StateSpaceModel m = load_model(model_path);
        const InfiniteSynthesisResult res = solve_infinite(m, rho, N);
        write_infinite_csv(res, out_prefix + "_freq.csv");
        write_text(out_prefix + "_summary.json", infinite_summary_json(res));
        std::printf("infinite synthesis: rho=%.6g N=%d value=%.10g gamma=%.10g iters=%d residual=%.3g\n",
                    rho, N, res.value, res.gamma_star, res.iterations, res.fixed_point_residual);
        return 0;
    }
    if (ra->parsed()) {
        const StateSpaceModel m = load_model(model_path);
        VecXd density;
        if (!density_path.empty()) {
            density = load_density_csv(density_path);
        } else {
            density = solve_infinite(m, rho, N).M_star.samples;
        }
        RationalPSD r;
        if (order >= 0 && eps > 0.0) {
            auto probe = feasibility_lp(density, order, eps);
            if (!probe) {
                std::fprintf(stderr, "infeasible: no order-%d approximation at eps=%g\n", order, eps);
                return 2;
            }
            r = *probe;
        } else if (order >= 0) {
            r = best_precision(density, order, 1e-9, ErrorMetric::Relative);
        } else if (eps > 0.0) {
            r = least_order(density, eps, m_max);
        } else {
            throw ConfigError("ratapprox: give --order or --eps");
        }
        write_text(out_prefix + "_ratpsd.json", rational_psd_json(r));
        const RationalFactor u = rational_factor(r);
        const RiccatiData ric = solve_dare(m);
        StateSpaceFilter f = assemble_filter(u, m, ric);
        write_text(out_prefix + "_filter.json", filter_to_json(f));
        const RefinedReport rep = refined_error_report(r, density);
        std::printf("ratapprox: m=%d eps=%.6g refined[minP=%.3g minQ=%.3g err=%.3g]\n", r.P.m,
                    r.eps, rep.min_P, rep.min_Q, rep.max_error);
        return 0;
    }

    // remaining commands share the experiment config
    ExperimentConfig cfg{load_model(model_path)};
    cfg.rho = rho;
    cfg.T = T;
    cfg.N = N;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.filters = parse_filters(filters_csv);
    if (noise == "white") cfg.noise = NoiseKind::White;
    else if (noise == "ar") cfg.noise = NoiseKind::ArCorrelated;
    else if (noise == "worst") cfg.noise = NoiseKind::WorstCase;
    else throw ConfigError("unknown noise kind: " + noise);

    if (sim->parsed()) {
        const SimResult res = simulate(cfg);
        const std::string csv = out_prefix + "_sim.csv";
        write_sim_csv(res, csv);
        if (gnuplot) write_gnuplot_script(csv, static_cast<int>(res.filter_names.size()),
                                          out_prefix + "_sim.gp");
        std::printf("simulate: trials=%d T=%d noise=%s\n", res.trials, res.T, noise.c_str());
        for (std::size_t i = 0; i < res.filter_names.size(); ++i)
            std::printf("  %-14s horizon-mean=%.6g final-step=%.6g worst-case=%.6g\n",
                        res.filter_names[i].c_str(), res.horizon_mean(static_cast<Eigen::Index>(i)),
                        res.final_step(static_cast<Eigen::Index>(i)),
                        res.worst_case_value(static_cast<Eigen::Index>(i)));
        return 0;
    }
    if (fr->parsed()) {
        const FreqResponseReport rep = freq_response_report(cfg);
        const std::string csv = out_prefix + "_freqresp.csv";
        write_freqresp_csv(rep, csv);
        if (gnuplot) write_gnuplot_script(csv, static_cast<int>(rep.filter_names.size()),
                                          out_prefix + "_freqresp.gp");
        std::printf("freqresp: N=%d filters=%zu -> %s\n", cfg.N, rep.filter_names.size(), csv.c_str());
        return 0;
    }
    if (ev->parsed()) {
        std::printf("worst-case expected MSE (per step) at rho=%.6g:\n", cfg.rho);
        for (const FilterSpec& f : cfg.filters)
            std::printf("  %-14s %.10g\n", f.name().c_str(), evaluate_worst_case(cfg, f, cfg.rho));
        return 0;
    }
    if (be->parsed()) {
        const auto rows = bench_scaling(cfg.model, T_list, cfg.rho, cfg.N);
        write_bench_csv(rows, out_prefix + "_bench.csv");
        for (const auto& r : rows)
            std::printf("T=%-5d finite=%.3fs infinite=%.3fs\n", r.T, r.finite_seconds,
                        r.infinite_seconds);
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    // exit codes: 0 success, 2 infeasibility, 1 numerical failure, 64 bad usage
    try {
        return run(argc, argv);
    } catch (const drkf::OrderCapExceeded& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return 2;
    } catch (const drkf::ConfigError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 64;
    } catch (const drkf::ModelError& e) {
        std::fprintf(stderr, "model error: %s\n", e.what());
        return 64;
    } catch (const drkf::Error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
