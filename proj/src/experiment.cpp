#include "irsssm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "irsssm/channels.hpp"
#include "irsssm/flops.hpp"

namespace irsssm {

const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::SrVsPower: return "sr_vs_power";
        case ExperimentKind::Cdf: return "cdf";
        case ExperimentKind::Convergence: return "convergence";
        case ExperimentKind::SrVsElements: return "sr_vs_elements";
        case ExperimentKind::PositionSweep: return "position_sweep";
    }
    return "?";
}

ExperimentKind parse_experiment_kind(const std::string& s) {
    for (auto k : {ExperimentKind::SrVsPower, ExperimentKind::Cdf, ExperimentKind::Convergence,
                   ExperimentKind::SrVsElements, ExperimentKind::PositionSweep})
        if (s == to_string(k)) return k;
    throw InvalidInput("unknown experiment kind '" + s + "'");
}

const std::vector<std::string>& known_methods() {
    static const std::vector<std::string> m = {"random",   "irs_bca", "irs_admm", "irs_sdr",
                                               "pre_none", "pre_sca", "pre_ga",   "comb1",
                                               "comb2",    "comb3"};
    return m;
}

std::vector<std::string> default_methods(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::SrVsPower:
        case ExperimentKind::Cdf: return {"random", "irs_bca", "irs_admm", "irs_sdr"};
        case ExperimentKind::Convergence: return {"comb1", "comb2", "comb3"};
        case ExperimentKind::SrVsElements:
        case ExperimentKind::PositionSweep: return {"random", "comb1", "comb2", "comb3"};
    }
    return {};
}

void ExperimentSpec::validate() const {
    if (n_channel_trials < 1) throw InvalidInput("ExperimentSpec: n_channel_trials must be >= 1");
    if (threads < 1) throw InvalidInput("ExperimentSpec: threads must be >= 1");
    if (!(epsilon > 0.0)) throw InvalidInput("ExperimentSpec: epsilon must be positive");
    if (max_outer < 1) throw InvalidInput("ExperimentSpec: max_outer must be >= 1");
    for (const auto& m : combinations)
        if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end())
            throw InvalidInput("ExperimentSpec: unknown method '" + m + "'");
    for (int n : n_irs)
        if (n < 1) throw InvalidInput("ExperimentSpec: n_irs values must be >= 1");
    for (int n : n_e)
        if (n < 1) throw InvalidInput("ExperimentSpec: n_e values must be >= 1");
}

std::vector<GridPoint> expand_grid(const SystemConfig& base, const ExperimentSpec& spec) {
    const auto powers = spec.power_dbm.empty() ? std::vector<double>{mw_to_dbm(base.p_total)} : spec.power_dbm;
    const auto ns = spec.n_irs.empty() ? std::vector<int>{base.n_irs} : spec.n_irs;
    const auto nes = spec.n_e.empty() ? std::vector<int>{base.n_e} : spec.n_e;
    const auto ys = spec.irs_y.empty() ? std::vector<double>{base.geometry.irs.y} : spec.irs_y;
    std::vector<GridPoint> out;
    for (double p : powers)
        for (int n : ns)
            for (int ne : nes)
                for (double y : ys) out.push_back({p, n, ne, y});
    return out;
}

SystemConfig config_at(const SystemConfig& base, const GridPoint& g) {
    SystemConfig cfg = base;
    cfg.p_total = dbm_to_mw(g.power_dbm);
    cfg.n_irs = g.n_irs;
    cfg.n_e = g.n_e;
    cfg.geometry.irs.y = g.irs_y;
    return cfg;
}

// ---------------------------------------------------------------------------
// One trial

namespace {

using clock_type = std::chrono::steady_clock;

double elapsed_ms(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

FlopMethod flop_method(IrsMethod m) {
    switch (m) {
        case IrsMethod::Bca: return FlopMethod::IrsBca;
        case IrsMethod::Admm: return FlopMethod::IrsAdmm;
        case IrsMethod::Sdr: return FlopMethod::IrsSdr;
    }
    return FlopMethod::IrsBca;
}

FlopMethod flop_method(PrecoderMethod m) {
    return m == PrecoderMethod::Sca ? FlopMethod::Sca : FlopMethod::Ga;
}

// SDR solves one SDP per call; the sweep count of the factorized solver is
// not the iteration count of the interior-point cost model.
double irs_flop_iterations(IrsMethod m, int iterations) {
    return m == IrsMethod::Sdr ? 1.0 : static_cast<double>(iterations);
}

struct TrialContext {
    const SystemConfig& cfg;
    const ChannelSet& ch;
    Constellation cons;
    HybridPrecoder p0;
    std::vector<CVec> fa;
    IrsPhaseVector v_rand;
    std::uint64_t seed;
    std::optional<LinkState> link_rand;
    std::optional<QuadraticForms> qf_rand;
    std::optional<IrsSolveResult> bca_rand;

    double rate(const IrsPhaseVector& v, const HybridPrecoder& p) const {
        return secrecy_rate(cfg, ch, v, p, cons, fa).r_approx;
    }
    const LinkState& link() {
        if (!link_rand) link_rand = prepare_link(cfg, ch, v_rand, fa);
        return *link_rand;
    }
    const QuadraticForms& qf() {
        if (!qf_rand) qf_rand = build_quadratic_forms(cfg, link().white, p0, cons);
        return *qf_rand;
    }
    const IrsSolveResult& bca() {
        if (!bca_rand) bca_rand = irs_bca(qf(), v_rand);
        return *bca_rand;
    }
};

void run_method(TrialContext& ctx, const ExperimentSpec& spec, ExperimentRecord& rec) {
    const std::string& m = rec.method;
    const SystemConfig& cfg = ctx.cfg;
    if (m == "random") {
        rec.sr_bits = ctx.rate(ctx.v_rand, ctx.p0);
    } else if (m == "irs_bca" || m == "irs_admm" || m == "irs_sdr") {
        const IrsMethod which = m == "irs_bca" ? IrsMethod::Bca : m == "irs_admm" ? IrsMethod::Admm : IrsMethod::Sdr;
        SdrOptions so;
        so.seed = ctx.seed;
        const IrsSolveResult r = which == IrsMethod::Bca    ? ctx.bca()
                                 : which == IrsMethod::Admm ? irs_admm(ctx.qf(), ctx.v_rand)
                                                            : irs_sdr(ctx.qf(), so).solve;
        rec.sr_bits = ctx.rate(r.v, ctx.p0);
        rec.iterations = which == IrsMethod::Sdr ? 1 : r.iterations;
        rec.flops = flop_estimates(cfg, flop_method(which), irs_flop_iterations(which, r.iterations)).total;
    } else if (m == "pre_none" || m == "pre_sca" || m == "pre_ga") {
        const IrsPhaseVector& v = ctx.bca().v;
        const LinkState link = prepare_link(cfg, ctx.ch, v, ctx.fa);
        const PrecoderQuadratics pq = build_precoder_quadratics(cfg, link.white, v, ctx.cons);
        if (m == "pre_none") {
            rec.sr_bits = precoder_rate(pq, ctx.p0.p());
        } else {
            const bool sca = m == "pre_sca";
            const PrecoderSolveResult r = sca ? asr_sca(pq, ctx.p0) : cor_ga(pq, ctx.p0);
            rec.sr_bits = r.rate;
            rec.iterations = r.iterations;
            rec.flops = flop_estimates(cfg, sca ? FlopMethod::Sca : FlopMethod::Ga, r.iterations).total;
        }
    } else {
        const Combination comb = Combination::named(m.back() - '0');
        JointOptions jo;
        jo.epsilon = spec.epsilon;
        jo.max_outer = spec.max_outer;
        jo.sdr.seed = ctx.seed;
        jo.fa_blocks = ctx.fa;
        const JointResult r = joint_optimize(cfg, ctx.ch, ctx.cons, comb, ctx.v_rand, ctx.p0, jo);
        rec.sr_bits = r.objective;
        rec.iterations = static_cast<int>(r.trace.size());
        for (const auto& e : r.trace) {
            rec.trace.push_back(e.after_precoder);
            rec.flops +=
                flop_estimates(cfg, flop_method(comb.irs), irs_flop_iterations(comb.irs, e.irs_iterations)).total +
                flop_estimates(cfg, flop_method(comb.precoder), e.precoder_iterations).total;
        }
    }
}

}  // namespace

std::vector<ExperimentRecord> run_trial(const SystemConfig& base, const GridPoint& point, int trial,
                                        const ExperimentSpec& spec) {
    const SystemConfig cfg = config_at(base, point);
    const std::uint64_t seed = spec.base_seed + static_cast<std::uint64_t>(trial);
    const auto methods = spec.combinations.empty() ? default_methods(spec.kind) : spec.combinations;

    std::vector<ExperimentRecord> out;
    auto make = [&](const std::string& m) {
        ExperimentRecord r;
        r.trial = trial;
        r.seed = seed;
        r.point = point;
        r.method = m;
        return r;
    };

    std::optional<ChannelSet> ch;
    std::string digest;
    try {
        cfg.validate();
        ch = draw_channels(cfg, seed);
        digest = channel_digest(*ch);
    } catch (const std::exception& e) {
        for (const auto& m : methods) {
            out.push_back(make(m));
            out.back().error = e.what();
        }
        return out;
    }

    const HybridPrecoder p0 = HybridPrecoder::equal_power(cfg.n_rf, cfg.n_k);
    TrialContext ctx{cfg,
                     *ch,
                     Constellation::psk(cfg.m_ary),
                     p0,
                     p0.analog_blocks(),
                     IrsPhaseVector::random(cfg.n_irs, seed),
                     seed,
                     {},
                     {},
                     {}};
    for (const auto& m : methods) {
        ExperimentRecord rec = make(m);
        rec.channel_digest = digest;
        const auto t0 = clock_type::now();
        try {
            run_method(ctx, spec, rec);
        } catch (const std::exception& e) {
            rec.sr_bits = 0.0;
            rec.error = e.what();
        }
        if (spec.record_timing) rec.wall_ms = elapsed_ms(t0);
        out.push_back(std::move(rec));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Campaign

bool ExperimentResult::failed() const {
    return !records.empty() && failures * 100 > static_cast<int>(records.size());
}

ExperimentResult run_experiment(const SystemConfig& base, const ExperimentSpec& spec) {
    base.validate();
    spec.validate();
    const auto grid = expand_grid(base, spec);
    const int trials = spec.n_channel_trials;
    const std::size_t n_tasks = grid.size() * static_cast<std::size_t>(trials);
    std::vector<std::vector<ExperimentRecord>> slots(n_tasks);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < n_tasks; t = next++) {
            const std::size_t g = t / static_cast<std::size_t>(trials);
            const int trial = static_cast<int>(t % static_cast<std::size_t>(trials));
            slots[t] = run_trial(base, grid[g], trial, spec);
        }
    };
    const int n_threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(spec.threads), n_tasks));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    ExperimentResult res;
    for (auto& s : slots)
        for (auto& r : s) {
            if (!r.error.empty()) ++res.failures;
            res.records.push_back(std::move(r));
        }
    res.groups = summarize(res.records, spec.combinations.empty() ? default_methods(spec.kind) : spec.combinations);
    return res;
}

const std::vector<double>& summary_quantile_levels() {
    static const std::vector<double> q = {0.1, 0.25, 0.5, 0.75, 0.9};
    return q;
}

namespace {

// Linear interpolation between order statistics.
double quantile(const std::vector<double>& sorted, double level) {
    if (sorted.empty()) return 0.0;
    const double pos = level * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<GroupSummary> summarize(const std::vector<ExperimentRecord>& records,
                                    const std::vector<std::string>& methods) {
    std::vector<GridPoint> points;
    for (const auto& r : records)
        if (std::find(points.begin(), points.end(), r.point) == points.end()) points.push_back(r.point);

    std::vector<GroupSummary> out;
    for (const auto& pt : points)
        for (const auto& m : methods) {
            GroupSummary g;
            g.point = pt;
            g.method = m;
            std::vector<double> vals;
            std::vector<const ExperimentRecord*> ok;
            for (const auto& r : records) {
                if (!(r.point == pt) || r.method != m) continue;
                if (!r.error.empty()) {
                    ++g.failures;
                    continue;
                }
                vals.push_back(r.sr_bits);
                ok.push_back(&r);
            }
            g.n = static_cast<int>(vals.size());
            if (g.n > 0) {
                double s = 0.0, it = 0.0, fl = 0.0;
                for (std::size_t i = 0; i < vals.size(); ++i) {
                    s += vals[i];
                    it += ok[i]->iterations;
                    fl += ok[i]->flops;
                    g.max_outer_iterations = std::max<int>(g.max_outer_iterations, static_cast<int>(ok[i]->trace.size()));
                }
                g.mean = s / g.n;
                g.mean_iterations = it / g.n;
                g.mean_flops = fl / g.n;
                if (g.n > 1) {
                    double ss = 0.0;
                    for (double v : vals) ss += (v - g.mean) * (v - g.mean);
                    g.std_error = std::sqrt(ss / (g.n - 1) / g.n);
                }
                std::vector<double> sorted = vals;
                std::sort(sorted.begin(), sorted.end());
                for (double l : summary_quantile_levels()) g.quantiles.push_back(quantile(sorted, l));
                if (g.max_outer_iterations > 0) {
                    g.mean_trace.assign(static_cast<std::size_t>(g.max_outer_iterations), 0.0);
                    for (const auto* r : ok)
                        for (std::size_t k = 0; k < g.mean_trace.size(); ++k)
                            g.mean_trace[k] += r->trace.empty() ? r->sr_bits
                                                                : r->trace[std::min(k, r->trace.size() - 1)];
                    for (double& v : g.mean_trace) v /= g.n;
                }
            }
            out.push_back(std::move(g));
        }
    return out;
}

}  // namespace irsssm
