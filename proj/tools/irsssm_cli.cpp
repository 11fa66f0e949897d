// Command-line front end: run experiment campaigns, print FLOP tables and run
// quick oracle self-checks.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "irsssm/channels.hpp"
#include "irsssm/experiment.hpp"
#include "irsssm/flops.hpp"
#include "irsssm/irs_opt.hpp"
#include "irsssm/precoder_opt.hpp"
#include "irsssm/rates.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace irsssm;

namespace {

struct RunArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<int> threads;
    std::optional<std::string> out;
    bool full_scale = false;
    bool timing = false;
};

int cmd_run(const RunArgs& a) {
    const SystemConfig defaults = a.full_scale ? SystemConfig::full_scale() : SystemConfig::desk_scale();
    LoadedConfig lc = load_config(a.config, defaults);
    ExperimentSpec& spec = lc.experiment;
    if (a.seed) spec.base_seed = *a.seed;
    if (a.trials) spec.n_channel_trials = *a.trials;
    if (a.threads) spec.threads = *a.threads;
    if (a.out) spec.output_path = *a.out;
    if (a.timing) spec.record_timing = true;
    if (spec.output_path.empty()) spec.output_path = to_string(spec.kind);
    spec.validate();
    lc.system.validate();

    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentResult res = run_experiment(lc.system, spec);
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::string csv_path = spec.output_path + ".csv";
    const std::string json_path = spec.output_path + ".json";
    {
        std::ofstream os(csv_path, std::ios::binary);
        if (!os) throw InvalidInput("cannot write " + csv_path);
        write_records_csv(os, res.records);
    }
    {
        std::ofstream os(json_path, std::ios::binary);
        if (!os) throw InvalidInput("cannot write " + json_path);
        os << summary_json(lc.system, spec, res) << '\n';
    }

    std::printf("%-8s %5s %4s %6s  %-9s %5s %10s %9s %8s\n", "P[dBm]", "N", "N_e", "y", "method", "n", "mean SR",
                "std err", "iters");
    for (const auto& g : res.groups)
        std::printf("%-8g %5d %4d %6g  %-9s %5d %10.5f %9.2e %8.2f\n", g.point.power_dbm, g.point.n_irs, g.point.n_e,
                    g.point.irs_y, g.method.c_str(), g.n, g.mean, g.std_error, g.mean_iterations);
    std::printf("%zu records, %d failed, %.1f s; wrote %s and %s\n", res.records.size(), res.failures, sec,
                csv_path.c_str(), json_path.c_str());
    if (res.failed()) {
        std::fprintf(stderr, "more than 1%% of records failed\n");
        for (const auto& r : res.records)
            if (!r.error.empty()) std::fprintf(stderr, "  trial %d %s: %s\n", r.trial, r.method.c_str(), r.error.c_str());
        return 1;
    }
    return 0;
}

int cmd_flops(bool full_scale, const std::vector<int>& n_values, double iterations) {
    SystemConfig cfg = full_scale ? SystemConfig::full_scale() : SystemConfig::desk_scale();
    std::printf("N_RF=%d N_k=%d N_b=%d N_e=%d M=%d, %g iteration(s)\n", cfg.n_rf, cfg.n_k, cfg.n_b, cfg.n_e,
                cfg.m_ary, iterations);
    std::printf("%5s  %-9s %14s %14s %14s  %s\n", "N", "method", "shared", "iterative", "total", "order");
    for (int n : n_values) {
        cfg.n_irs = n;
        for (auto m : {FlopMethod::IrsBca, FlopMethod::IrsAdmm, FlopMethod::IrsSdr, FlopMethod::Sca, FlopMethod::Ga}) {
            const auto e = flop_estimates(cfg, m, iterations);
            std::printf("%5d  %-9s %14.6g %14.6g %14.6g  %s\n", n, to_string(m), e.shared, e.iterative, e.total,
                        e.big_o.c_str());
        }
    }
    return 0;
}

// Quick versions of the oracle cross-checks; the full gate is the acceptance binary.
int cmd_validate(std::uint64_t seed) {
    using namespace irsssm::testing;
    const auto cons = Constellation::psk(4);
    int failed = 0;
    auto report = [&](const char* name, double err, double tol) {
        const bool ok = err <= tol;
        if (!ok) ++failed;
        std::printf("[%s] %-34s worst %.2e (tol %.0e)\n", ok ? "PASS" : "FAIL", name, err, tol);
    };

    double rates = 0.0, surrogate = 0.0, gradient = 0.0, bound = 0.0;
    for (std::uint64_t s = seed; s < seed + 10; ++s) {
        const SystemConfig cfg = SystemConfig::desk_scale();
        const ChannelSet ch = draw_channels(cfg, s);
        const auto v = IrsPhaseVector::random(cfg.n_irs, s);
        const auto p = random_precoder(cfg.n_rf, cfg.n_k, s);
        const auto fa = p.analog_blocks();
        const auto fast = secrecy_rate(cfg, ch, v, p, cons, fa);
        const auto slow = oracle::naive_rates(cfg, ch, v, p, cons, fa);
        rates = std::max(rates, rel_err(fast.r_approx, slow.r_approx));

        const auto link = prepare_link(cfg, ch, v, fa);
        const auto qf = build_quadratic_forms(cfg, link.white, p, cons);
        const CVec u = oracle::random_unit_modulus(cfg.n_irs, s);
        const double direct = oracle::surrogate_direct(cfg, link.white, u, p, cons);
        surrogate = std::max(surrogate, std::abs(qf.value(u) - direct) / std::max(1.0, std::abs(direct)));

        const auto pq = build_precoder_quadratics(cfg, link.white, v, cons);
        const CVec g = precoder_gradient(pq, p.p());
        const CVec fd = oracle::fd_gradient([&](const CVec& x) { return precoder_rate(pq, x); }, p.p());
        gradient = std::max(gradient, (g - fd).norm() / std::max(fd.norm(), 1e-300));

        const auto sdr = irs_sdr(qf, {50, s, 1e-6});
        for (std::uint64_t t = 0; t < 100; ++t) {
            const double f = qf.value(oracle::random_unit_modulus(cfg.n_irs, 1000 * s + t));
            bound = std::max(bound, (f - sdr.sdp_value) / std::max(1.0, std::abs(f)));
        }
    }
    report("secrecy rate vs naive pipeline", rates, 1e-10);
    report("IRS surrogate vs direct norms", surrogate, 1e-8);
    report("precoder gradient vs differences", gradient, 1e-4);
    report("SDP bound vs random phases", std::max(0.0, bound), 0.0);
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"IRS-aided hybrid secure spatial modulation: secrecy-rate optimization experiments"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run an experiment campaign from a JSON config");
    run_cmd->add_option("config", run.config, "Config file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--seed", run.seed, "Base seed (trial t uses seed + t)");
    run_cmd->add_option("--trials", run.trials, "Channel trials per grid point");
    run_cmd->add_option("--threads", run.threads, "Worker threads");
    run_cmd->add_option("--out", run.out, "Output stem; writes <stem>.csv and <stem>.json");
    run_cmd->add_flag("--full-scale", run.full_scale, "Start from the full-size system (N=50, N_RF=8, N_k=4)");
    run_cmd->add_flag("--timing", run.timing, "Record wall time per record (makes the CSV run-dependent)");

    bool flops_full = false;
    std::vector<int> flops_n{25, 50, 100};
    double flops_iters = 1.0;
    auto* flops_cmd = app.add_subcommand("flops", "Print closed-form FLOP counts");
    flops_cmd->add_option("--n-irs", flops_n, "IRS element counts")->expected(1, -1);
    flops_cmd->add_option("--iterations", flops_iters, "Solver iterations D")->check(CLI::NonNegativeNumber);
    flops_cmd->add_flag("--full-scale", flops_full, "Use the full-size system");

    std::uint64_t validate_seed = 1;
    auto* validate_cmd = app.add_subcommand("validate", "Cross-check the fast paths against slow oracles");
    validate_cmd->add_option("--seed", validate_seed, "First seed");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run_cmd) return cmd_run(run);
        if (*flops_cmd) return cmd_flops(flops_full, flops_n, flops_iters);
        if (*validate_cmd) return cmd_validate(validate_seed);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
