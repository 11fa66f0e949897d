#include "irsssm/joint.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace irsssm {

Combination Combination::named(int index) {
    switch (index) {
        case 1: return {IrsMethod::Bca, PrecoderMethod::Sca};
        case 2: return {IrsMethod::Sdr, PrecoderMethod::Ga};
        case 3: return {IrsMethod::Admm, PrecoderMethod::Ga};
        default: throw InvalidInput("Combination::named: index must be 1, 2 or 3");
    }
}

const char* to_string(IrsMethod m) {
    switch (m) {
        case IrsMethod::Bca: return "bca";
        case IrsMethod::Admm: return "admm";
        case IrsMethod::Sdr: return "sdr";
    }
    return "?";
}

const char* to_string(PrecoderMethod m) {
    return m == PrecoderMethod::Sca ? "sca" : "ga";
}

std::string Combination::label() const {
    return std::string(to_string(irs)) + "+" + to_string(precoder);
}

namespace {

struct Evaluated {
    LinkState link;
    double rate = 0.0;
};

Evaluated evaluate(const SystemConfig& cfg, const ChannelSet& ch, const Constellation& cons,
                   const IrsPhaseVector& v, const HybridPrecoder& p, const std::vector<CVec>& fa,
                   const AnOptions& an) {
    Evaluated e{prepare_link(cfg, ch, v, fa, an), 0.0};
    e.rate = approx_secrecy_rate(cfg, e.link.white, v, p, cons).r_approx;
    return e;
}

IrsSolveResult run_irs(IrsMethod m, const QuadraticForms& qf, const IrsPhaseVector& v,
                       const JointOptions& opts) {
    switch (m) {
        case IrsMethod::Bca: return irs_bca(qf, v, opts.bca);
        case IrsMethod::Admm: return irs_admm(qf, v, opts.admm);
        case IrsMethod::Sdr: return irs_sdr(qf, opts.sdr).solve;
    }
    throw InvalidInput("joint_optimize: unknown IRS method");
}

PrecoderSolveResult run_precoder(PrecoderMethod m, const PrecoderQuadratics& pq,
                                 const HybridPrecoder& p, const JointOptions& opts) {
    return m == PrecoderMethod::Sca ? asr_sca(pq, p, opts.sca) : cor_ga(pq, p, opts.ga);
}

[[noreturn]] void rethrow_with_context(const std::exception& e, int iteration, const char* step,
                                       const Combination& c) {
    std::ostringstream os;
    os << "joint_optimize[" << c.label() << "]: outer iteration " << iteration << ", " << step
       << " step: " << e.what();
    throw NumericalError(os.str());
}

}  // namespace

JointResult joint_optimize(const SystemConfig& cfg, const ChannelSet& ch, const Constellation& cons,
                           const Combination& combination, const IrsPhaseVector& v0,
                           const HybridPrecoder& p0, const JointOptions& opts) {
    if (!(opts.epsilon > 0.0)) throw InvalidInput("joint_optimize: epsilon must be positive");
    if (opts.max_outer < 1) throw InvalidInput("joint_optimize: max_outer must be >= 1");
    using clock = std::chrono::steady_clock;

    const std::vector<CVec> fa = opts.fa_blocks ? *opts.fa_blocks : p0.analog_blocks();
    IrsPhaseVector v = v0;
    HybridPrecoder p = p0;
    Evaluated cur = evaluate(cfg, ch, cons, v, p, fa, opts.an);

    JointResult res{v0, p0, cur.rate, cur.rate, {}, false, combination, fa, 0};
    for (int it = 1; it <= opts.max_outer; ++it) {
        const auto t0 = clock::now();
        JointTraceEntry entry;
        entry.iteration = it;
        const double start = cur.rate;

        try {
            const QuadraticForms qf = build_quadratic_forms(cfg, cur.link.white, p, cons);
            const IrsSolveResult irs = run_irs(combination.irs, qf, v, opts);
            entry.irs_iterations = irs.iterations;
            Evaluated cand = evaluate(cfg, ch, cons, irs.v, p, fa, opts.an);
            if (cand.rate >= cur.rate) {
                v = irs.v;
                cur = std::move(cand);
                entry.irs_accepted = true;
            }
        } catch (const std::exception& e) {
            rethrow_with_context(e, it, "IRS", combination);
        }
        entry.after_irs = cur.rate;

        try {
            const PrecoderQuadratics pq = build_precoder_quadratics(cfg, cur.link.white, v, cons);
            const PrecoderSolveResult pre = run_precoder(combination.precoder, pq, p, opts);
            entry.precoder_iterations = pre.iterations;
            const double rate = approx_secrecy_rate(cfg, cur.link.white, v, pre.p, cons).r_approx;
            if (rate < cur.rate - 1e-9) ++res.precoder_anomalies;
            p = pre.p;
            cur.rate = rate;
        } catch (const std::exception& e) {
            rethrow_with_context(e, it, "precoder", combination);
        }
        entry.after_precoder = cur.rate;
        entry.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
        res.trace.push_back(entry);

        if (std::abs(cur.rate - start) <= opts.epsilon) {
            res.converged = true;
            break;
        }
    }
    res.v_star = v;
    res.p_star = p;
    res.objective = cur.rate;
    return res;
}

}  // namespace irsssm
