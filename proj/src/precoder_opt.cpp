#include "irsssm/precoder_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace irsssm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

CMat block_responses(const CMat& eff, const CVec& p, int n_k) {
    const int n_rf = static_cast<int>(p.size()) / n_k;
    CMat z(eff.rows(), n_rf);
    for (int i = 0; i < n_rf; ++i) z.col(i) = eff.middleCols(i * n_k, n_k) * p.segment(i * n_k, n_k);
    return z;
}

// Column k holds eff D_k p.
CMat pair_responses(const CMat& eff, const std::vector<DifferencePair>& diffs, const CVec& p,
                    int n_k) {
    const CMat z = block_responses(eff, p, n_k);
    CMat r(eff.rows(), static_cast<Eigen::Index>(diffs.size()));
    for (std::size_t k = 0; k < diffs.size(); ++k) {
        const auto& d = diffs[k];
        const auto kk = static_cast<Eigen::Index>(k);
        if (d.is_zero()) {
            r.col(kk).setZero();
        } else {
            r.col(kk) = d.coef_m() * z.col(d.block_m()) - d.coef_n() * z.col(d.block_n());
        }
    }
    return r;
}

// sum_k w_k D_k^H eff^H r_k, the shared shape of every gradient below.
CVec backproject(const CMat& eff, const std::vector<DifferencePair>& diffs, const RVec& w,
                 const CMat& r, int n_rf, int n_k) {
    CMat acc = CMat::Zero(eff.rows(), n_rf);
    for (std::size_t k = 0; k < diffs.size(); ++k) {
        const auto& d = diffs[k];
        const auto kk = static_cast<Eigen::Index>(k);
        if (d.is_zero() || w(kk) == 0.0) continue;
        acc.col(d.block_m()) += (w(kk) * std::conj(d.coef_m())) * r.col(kk);
        acc.col(d.block_n()) -= (w(kk) * std::conj(d.coef_n())) * r.col(kk);
    }
    CVec g(static_cast<Eigen::Index>(n_rf) * n_k);
    for (int i = 0; i < n_rf; ++i)
        g.segment(i * n_k, n_k) = eff.middleCols(i * n_k, n_k).adjoint() * acc.col(i);
    return g;
}

RVec sq_norms(const CMat& r) { return r.colwise().squaredNorm().transpose(); }

PairBlock make_block(const CMat& eff, const DifferencePair& d, int n_k) {
    PairBlock b{d.block_m(), d.block_n(), {}};
    if (d.is_zero()) {
        b.mat = CMat::Zero(n_k, n_k);
        return b;
    }
    if (d.same_block()) {
        const CMat c = (d.coef_m() - d.coef_n()) * eff.middleCols(d.block_m() * n_k, n_k);
        b.mat = c.adjoint() * c;
    } else {
        CMat c(eff.rows(), 2 * n_k);
        c.leftCols(n_k) = d.coef_m() * eff.middleCols(d.block_m() * n_k, n_k);
        c.rightCols(n_k) = -d.coef_n() * eff.middleCols(d.block_n() * n_k, n_k);
        b.mat = c.adjoint() * c;
    }
    return b;
}

CMat expand_block(const PairBlock& b, int n_rf, int n_k) {
    CMat out = CMat::Zero(static_cast<Eigen::Index>(n_rf) * n_k, static_cast<Eigen::Index>(n_rf) * n_k);
    if (b.mat.rows() == n_k) {
        out.block(b.block_m * n_k, b.block_m * n_k, n_k, n_k) = b.mat;
        return out;
    }
    const int off[2] = {b.block_m * n_k, b.block_n * n_k};
    for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c) out.block(off[a], off[c], n_k, n_k) = b.mat.block(a * n_k, c * n_k, n_k, n_k);
    return out;
}

double log2_sum_exp(const RVec& e) {
    const double mx = e.maxCoeff();
    if (!std::isfinite(mx)) return mx;
    return (mx + std::log((e.array() - mx).exp().sum())) * kLog2e;
}

// Objective of the SCA subproblem and its gradient at p.
struct ScaEval {
    double value = kNegInf;
    CVec grad;
};

ScaEval sca_eval(const PrecoderQuadratics& pq, const ScaExpansion& ex, const CVec& p, bool need_grad) {
    ScaEval out;
    const CMat re = pair_responses(pq.eff_e, pq.diffs, p, pq.n_k);
    const RVec qe = sq_norms(re);
    const double s = (ex.chi0_e.array() * (1.0 + pq.tau * ex.q0_e.array() - pq.tau * qe.array())).sum();
    if (!(s > 0.0)) return out;
    const CMat rb = pair_responses(pq.eff_b, pq.diffs, p, pq.n_k);
    // Re{c^H p} with c = B p0 equals Re{r0^H r(p)}
    RVec expo(pq.n_pairs());
    for (int k = 0; k < pq.n_pairs(); ++k)
        expo(k) = pq.tau * ex.q0_b(k) - 2.0 * pq.tau * ex.r0_b.col(k).dot(rb.col(k)).real();
    const double upper = log2_sum_exp(expo);
    out.value = std::log2(s) - upper;
    if (!need_grad) return out;
    const RVec we = -2.0 * pq.tau * ex.chi0_e / (s * kLn2);
    const double mx = expo.maxCoeff();
    RVec soft = (expo.array() - mx).exp();
    soft /= soft.sum();
    const RVec wb = 2.0 * pq.tau * soft / kLn2;
    out.grad = backproject(pq.eff_e, pq.diffs, we, re, pq.n_rf, pq.n_k) +
               backproject(pq.eff_b, pq.diffs, wb, ex.r0_b, pq.n_rf, pq.n_k);
    return out;
}

// Projected gradient ascent with Armijo backtracking on the concave subproblem.
CVec solve_subproblem(const PrecoderQuadratics& pq, const ScaExpansion& ex, const CVec& start,
                      double radius, const ScaOptions& opts, int* iters_out) {
    CVec p = start;
    ScaEval cur = sca_eval(pq, ex, p, true);
    double step = -1.0;
    int it = 0;
    for (; it < opts.max_inner; ++it) {
        const double gnorm = cur.grad.norm();
        if (!(gnorm > 0.0)) break;
        if (step <= 0.0) step = radius / gnorm;
        const CVec pg = project_to_ball(p + cur.grad, radius) - p;
        if (pg.norm() <= opts.inner_tol) break;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            const CVec cand = project_to_ball(p + step * cur.grad, radius);
            const ScaEval next = sca_eval(pq, ex, cand, false);
            const double predicted = cur.grad.dot(cand - p).real();
            if (next.value >= cur.value + 1e-4 * predicted && next.value >= cur.value) {
                ScaEval moved = sca_eval(pq, ex, cand, true);
                // Barzilai-Borwein guess for the next trial step.
                const CVec s = cand - p;
                const double sy = -s.dot(moved.grad - cur.grad).real();
                step = sy > 0.0 ? s.squaredNorm() / sy : 2.0 * step;
                p = cand;
                cur = std::move(moved);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // no representable ascent left
    }
    *iters_out = it;
    return p;
}

double pair_log_kappa(const CMat& eff, const PrecoderQuadratics& pq, const CVec& p) {
    const RVec q = sq_norms(pair_responses(eff, pq.diffs, p, pq.n_k));
    return std::log2((-pq.tau * q.array()).exp().sum());
}

}  // namespace

CMat PrecoderQuadratics::b_dense(int pair) const {
    return expand_block(b_mats[static_cast<std::size_t>(pair)], n_rf, n_k);
}

CMat PrecoderQuadratics::e_dense(int pair) const {
    return expand_block(e_mats[static_cast<std::size_t>(pair)], n_rf, n_k);
}

PrecoderQuadratics build_precoder_quadratics(const SystemConfig& cfg, const WhitenedChannels& wch,
                                             const IrsPhaseVector& v, const Constellation& cons) {
    PrecoderQuadratics pq;
    pq.eff_b = wch.bob_effective(v.values());
    pq.eff_e = wch.eve_effective(v.values());
    pq.diffs = difference_operators(enumerate_hypotheses(cfg, cons), cfg.n_k);
    pq.tau = cfg.tau();
    pq.n_rf = cfg.n_rf;
    pq.n_k = cfg.n_k;
    pq.b_mats.reserve(pq.diffs.size());
    pq.e_mats.reserve(pq.diffs.size());
    for (const auto& d : pq.diffs) {
        pq.b_mats.push_back(make_block(pq.eff_b, d, cfg.n_k));
        pq.e_mats.push_back(make_block(pq.eff_e, d, cfg.n_k));
    }
    return pq;
}

double bob_log_kappa(const PrecoderQuadratics& pq, const CVec& p) { return pair_log_kappa(pq.eff_b, pq, p); }
double eve_log_kappa(const PrecoderQuadratics& pq, const CVec& p) { return pair_log_kappa(pq.eff_e, pq, p); }

double precoder_rate(const PrecoderQuadratics& pq, const CVec& p) {
    return eve_log_kappa(pq, p) - bob_log_kappa(pq, p);
}

CVec precoder_gradient(const PrecoderQuadratics& pq, const CVec& p) {
    const CMat rb = pair_responses(pq.eff_b, pq.diffs, p, pq.n_k);
    const CMat re = pair_responses(pq.eff_e, pq.diffs, p, pq.n_k);
    const RVec chi_b = (-pq.tau * sq_norms(rb).array()).exp();
    const RVec chi_e = (-pq.tau * sq_norms(re).array()).exp();
    const double c = 2.0 * pq.tau / kLn2;
    const RVec wb = c * chi_b / chi_b.sum();
    const RVec we = -c * chi_e / chi_e.sum();
    return backproject(pq.eff_b, pq.diffs, wb, rb, pq.n_rf, pq.n_k) +
           backproject(pq.eff_e, pq.diffs, we, re, pq.n_rf, pq.n_k);
}

ScaExpansion sca_expand(const PrecoderQuadratics& pq, const CVec& p0) {
    ScaExpansion ex;
    ex.p0 = p0;
    ex.r0_b = pair_responses(pq.eff_b, pq.diffs, p0, pq.n_k);
    ex.q0_b = sq_norms(ex.r0_b);
    ex.q0_e = sq_norms(pair_responses(pq.eff_e, pq.diffs, p0, pq.n_k));
    ex.chi0_e = (-pq.tau * ex.q0_e.array()).exp();
    return ex;
}

double sca_eve_lower(const PrecoderQuadratics& pq, const ScaExpansion& ex, const CVec& p) {
    const RVec qe = sq_norms(pair_responses(pq.eff_e, pq.diffs, p, pq.n_k));
    const double s = (ex.chi0_e.array() * (1.0 + pq.tau * ex.q0_e.array() - pq.tau * qe.array())).sum();
    return s > 0.0 ? std::log2(s) : kNegInf;
}

double sca_bob_upper(const PrecoderQuadratics& pq, const ScaExpansion& ex, const CVec& p) {
    const CMat rb = pair_responses(pq.eff_b, pq.diffs, p, pq.n_k);
    RVec expo(pq.n_pairs());
    for (int k = 0; k < pq.n_pairs(); ++k)
        expo(k) = pq.tau * ex.q0_b(k) - 2.0 * pq.tau * ex.r0_b.col(k).dot(rb.col(k)).real();
    return log2_sum_exp(expo);
}

PrecoderSolveResult asr_sca(const PrecoderQuadratics& pq, const HybridPrecoder& p0,
                            const ScaOptions& opts) {
    const double radius = static_cast<double>(pq.n_rf);
    CVec p = p0.p();
    double rate = precoder_rate(pq, p);
    PrecoderSolveResult res{p0, rate, 0, false, false, {rate}};
    if (!(precoder_gradient(pq, p).norm() > 0.0)) {
        res.converged = res.stationary = true;
        return res;
    }
    for (int it = 0; it < opts.max_iters; ++it) {
        const ScaExpansion ex = sca_expand(pq, p);
        int inner = 0;
        const CVec next = solve_subproblem(pq, ex, p, radius, opts, &inner);
        const double next_rate = precoder_rate(pq, next);
        ++res.iterations;
        // The bounds are tight at p and minorize R, so the true rate cannot drop.
        if (next_rate < rate - 1e-9 * std::max(1.0, std::abs(rate))) {
            std::ostringstream os;
            os << "asr_sca: non-ascent step at iteration " << it << " (" << rate << " -> " << next_rate
               << ")";
            throw NumericalError(os.str());
        }
        const double move = (next - p).norm();
        p = next;
        if (next_rate > res.rate) {
            res.rate = next_rate;
            res.p = HybridPrecoder(project_to_ball(p, radius), pq.n_rf, pq.n_k);
        }
        rate = next_rate;
        res.trace.push_back(rate);
        if (move <= opts.tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

PrecoderSolveResult cor_ga(const PrecoderQuadratics& pq, const HybridPrecoder& p0,
                           const GaOptions& opts) {
    const double radius = static_cast<double>(pq.n_rf);
    CVec p = p0.p();
    double rate = precoder_rate(pq, p);
    PrecoderSolveResult res{p0, rate, 0, false, false, {rate}};
    CVec g = precoder_gradient(pq, p);
    if (!g.allFinite()) throw NumericalError("cor_ga: non-finite gradient at the start point");
    const double gnorm = g.norm();
    if (!(gnorm > 0.0)) {
        res.converged = res.stationary = true;
        return res;
    }
    const double mu0 = opts.mu0 > 0.0 ? opts.mu0 : 0.1 * radius / gnorm;
    double mu = mu0;
    int streak = 0;
    for (int it = 0; it < opts.max_iters; ++it) {
        ++res.iterations;
        const CVec cand = project_to_ball(p + mu * g, radius);
        const double cand_rate = precoder_rate(pq, cand);
        if (cand_rate >= rate) {
            const double gain = cand_rate - rate;
            p = cand;
            rate = cand_rate;
            res.trace.push_back(rate);
            if (gain <= opts.tol) {
                res.converged = true;
                break;
            }
            g = precoder_gradient(pq, p);
            if (!g.allFinite()) throw NumericalError("cor_ga: non-finite gradient");
            if (++streak >= 5) {
                mu = std::min(2.0 * mu, mu0);
                streak = 0;
            }
        } else {
            mu *= 0.5;
            streak = 0;
            if (mu < 1e-12 * mu0) {
                res.converged = true;
                break;
            }
        }
    }
    res.p = HybridPrecoder(p, pq.n_rf, pq.n_k);
    res.rate = rate;
    return res;
}

HybridPrecoder factorize_hybrid(const HybridPrecoder& p) {
    HybridPrecoder out = p;
    HybridFactorization fz;
    const auto analog = p.analog_blocks();
    for (int i = 0; i < p.n_rf(); ++i) {
        const CVec blk = p.block(i);
        const double bn = blk.norm();
        if (!(bn > 0.0)) {
            fz.f_blocks.push_back(analog[static_cast<std::size_t>(i)]);
            fz.d_gains.push_back(cplx{});
            fz.residuals.push_back(0.0);
            fz.skipped.push_back(true);
            fz.flagged.push_back(true);
            continue;
        }
        const CVec& f = analog[static_cast<std::size_t>(i)];
        const cplx d = f.dot(blk);  // f^H p_i, ||f|| = 1
        const double resid = (blk - f * d).norm();
        fz.f_blocks.push_back(f);
        fz.d_gains.push_back(d);
        fz.residuals.push_back(resid);
        fz.skipped.push_back(false);
        fz.flagged.push_back(resid > 1e-6 * bn);
    }
    out.factorization = std::move(fz);
    return out;
}

}  // namespace irsssm
