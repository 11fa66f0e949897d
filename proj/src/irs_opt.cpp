#include "irsssm/irs_opt.hpp"

#include <cmath>
#include <limits>

#include "irsssm/rng.hpp"

namespace irsssm {

namespace {

// Pairwise-difference sums over all ordered (m, n):
//   sum (x_m - x_n)(y_m - y_n)^H = 2K sum x y^H - 2 (sum x)(sum y)^H
CMat pair_outer_sum(const CMat& x, const CMat& y) {
    const double k = static_cast<double>(x.cols());
    return 2.0 * k * (x * y.adjoint()) - 2.0 * (x.rowwise().sum() * y.rowwise().sum().adjoint());
}

void assemble(const CMat& a, const CMat& s, const CMat& reflect, double scale, CMat& phi, CRow& d,
              double& c_sum) {
    const CMat w = reflect.adjoint() * reflect;
    const CMat r = pair_outer_sum(s, s);                 // sum ds ds^H
    phi = scale * w.cwiseProduct(r.conjugate());
    phi = 0.5 * (phi + phi.adjoint()).eval();
    const CMat x = pair_outer_sum(a.conjugate(), s.conjugate());  // sum conj(da) ds^T
    d = scale * reflect.cwiseProduct(x).colwise().sum();
    const double k = static_cast<double>(a.cols());
    c_sum = scale * (2.0 * k * a.squaredNorm() - 2.0 * a.rowwise().sum().squaredNorm());
}

CMat responses(const CMat& direct, const HybridPrecoder& p, const Constellation& cons) {
    const int m = cons.size();
    CMat out(direct.rows(), static_cast<Eigen::Index>(p.n_rf()) * m);
    for (int i = 0; i < p.n_rf(); ++i) {
        const CVec z = direct.middleCols(i * p.n_k(), p.n_k()) * p.block(i);
        for (int j = 0; j < m; ++j) out.col(i * m + j) = z * cons[j];
    }
    return out;
}

}  // namespace

double QuadraticForms::value(const CVec& v) const {
    const CMat ph = phi();
    return (v.adjoint() * ph * v)(0, 0).real() + 2.0 * (delta() * v)(0, 0).real() + c_const;
}

CVec QuadraticForms::pair_a(Receiver rx, int m, int n) const {
    const CMat& a = rx == Receiver::Bob ? a_bob : a_eve;
    return a.col(m) - a.col(n);
}

CMat QuadraticForms::pair_c(Receiver rx, int m, int n) const {
    const CMat& refl = rx == Receiver::Bob ? g_tilde : m_tilde;
    return refl * (s_vecs.col(m) - s_vecs.col(n)).asDiagonal();
}

CMat QuadraticForms::pair_b(Receiver rx, int m, int n) const {
    const CMat c = pair_c(rx, m, n);
    return c.adjoint() * c;
}

QuadraticForms build_quadratic_forms(const SystemConfig& cfg, const WhitenedChannels& wch,
                                     const HybridPrecoder& p, const Constellation& cons) {
    QuadraticForms qf;
    qf.tau = cfg.tau();
    qf.scale = kLog2e * qf.tau;
    qf.a_bob = responses(wch.h_tilde, p, cons);
    qf.a_eve = responses(wch.q_tilde, p, cons);
    qf.s_vecs = responses(wch.f, p, cons);
    qf.g_tilde = wch.g_tilde;
    qf.m_tilde = wch.m_tilde;
    double cb = 0.0, ce = 0.0;
    assemble(qf.a_bob, qf.s_vecs, qf.g_tilde, qf.scale, qf.phi_b, qf.d_row, cb);
    assemble(qf.a_eve, qf.s_vecs, qf.m_tilde, qf.scale, qf.phi_e, qf.d_prime_row, ce);
    qf.c_const = cb - ce;
    return qf;
}

// ---------------------------------------------------------------------------
// ADMM

double default_admm_rho(const QuadraticForms& qf) {
    return 2.0 * qf.phi_e.trace().real() / qf.n_elements() + 1.0;
}

IrsSolveResult irs_admm(const QuadraticForms& qf, const IrsPhaseVector& v0,
                        const AdmmOptions& opts) {
    const int n = qf.n_elements();
    if (v0.size() != n) throw InvalidInput("irs_admm: v0 length mismatch");
    const double rho = opts.rho > 0.0 ? opts.rho : default_admm_rho(qf);

    CMat lhs = 2.0 * qf.phi_e;
    lhs.diagonal().array() += rho;
    const Eigen::LLT<CMat> llt(lhs);
    const CVec lin = 2.0 * qf.delta().adjoint();

    CVec v = v0.values();
    CVec u = v;
    CVec lambda = CVec::Zero(n);

    IrsSolveResult res{v0, qf.value(v0), 0, false, {}, 0.0};
    res.trace.push_back(res.surrogate);
    double prev = res.surrogate;

    for (int outer = 0; outer < opts.max_outer; ++outer) {
        const CVec rhs_fixed = 2.0 * qf.phi_b * v + lin;
        bool inner_done = false;
        for (int it = 0; it < opts.max_inner; ++it) {
            u = llt.solve(rhs_fixed + lambda + rho * v);
            const CVec target = u - lambda / rho;
            CVec v_next = IrsPhaseVector::project(target, v).values();
            lambda -= rho * (u - v_next);
            const double dv = (v_next - v).norm();
            v = std::move(v_next);
            if (dv <= opts.tol && (u - v).norm() <= opts.tol) {
                inner_done = true;
                break;
            }
        }
        ++res.iterations;
        const double val = qf.value(v);
        res.trace.push_back(val);
        res.primal_residual = (u - v).norm();
        if (val > res.surrogate) {
            res.surrogate = val;
            res.v = IrsPhaseVector(v);
        }
        if (inner_done && std::abs(val - prev) <= opts.tol) {
            res.converged = true;
            break;
        }
        prev = val;
    }
    return res;
}

// ---------------------------------------------------------------------------
// BCA

IrsSolveResult irs_bca(const QuadraticForms& qf, const IrsPhaseVector& v0, const BcaOptions& opts) {
    const int n = qf.n_elements();
    if (v0.size() != n) throw InvalidInput("irs_bca: v0 length mismatch");
    const CMat ph = qf.phi();
    const CVec dconj = qf.delta().adjoint();
    CVec v = v0.values();
    CVec phv = ph * v;

    IrsSolveResult res{v0, qf.value(v), 0, false, {}, 0.0};
    res.trace.push_back(res.surrogate);
    double val = res.surrogate;
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        for (int k = 0; k < n; ++k) {
            const cplx g = phv(k) - ph(k, k) * v(k) + dconj(k);
            const double mag = std::abs(g);
            if (!(mag > 0.0)) continue;
            const cplx next = g / mag;
            const cplx delta = next - v(k);
            if (delta == cplx{}) continue;
            phv += ph.col(k) * delta;
            v(k) = next;
            if (opts.record_element_trace) res.trace.push_back(qf.value(v));
        }
        ++res.iterations;
        const double next_val = qf.value(v);
        if (!opts.record_element_trace) res.trace.push_back(next_val);
        const double gain = next_val - val;
        val = next_val;
        if (gain <= opts.tol) {
            res.converged = true;
            break;
        }
    }
    // Renormalize against drift from repeated incremental updates.
    res.v = IrsPhaseVector::project(v, v0.values());
    res.surrogate = qf.value(res.v);
    return res;
}

// ---------------------------------------------------------------------------
// SDR

CMat sdr_matrix(const QuadraticForms& qf) {
    const int n = qf.n_elements();
    CMat psi = CMat::Zero(n + 1, n + 1);
    psi.topLeftCorner(n, n) = qf.phi();
    psi.bottomLeftCorner(1, n) = qf.delta();
    psi.topRightCorner(n, 1) = qf.delta().adjoint();
    return 0.5 * (psi + psi.adjoint());
}

SdrResult irs_sdr(const QuadraticForms& qf, const SdrOptions& opts) {
    if (opts.n_randomizations < 1) throw InvalidInput("irs_sdr: need at least one randomization");
    const int n = qf.n_elements();
    const CMat psi = sdr_matrix(qf);
    SdpOptions sdp_opts;
    sdp_opts.tol = opts.sdp_tol;
    sdp_opts.seed = opts.seed;
    const SdpSolution sol = sdp_unit_diag(psi, sdp_opts);

    const CMat& factor = sol.factor;
    const Eigen::Index r = factor.cols();
    const CVec ones = CVec::Ones(n);
    IrsSolveResult best{IrsPhaseVector::ones(n), -std::numeric_limits<double>::infinity(), 0, true,
                        {}, 0.0};
    CVec z(r);
    for (int draw = 0; draw < opts.n_randomizations; ++draw) {
        StreamRng rng({opts.seed, 0x5D2ULL, static_cast<std::uint64_t>(draw)});
        for (Eigen::Index c = 0; c < r; ++c) z(c) = rng.complex_normal();
        const CVec xi = factor * z;
        const cplx t = xi(n);
        const cplx t_phase = std::abs(t) > 0.0 ? t / std::abs(t) : cplx(1.0, 0.0);
        const CVec raw = xi.head(n) * std::conj(t_phase);
        IrsPhaseVector cand = IrsPhaseVector::project(raw, ones);
        const double val = qf.value(cand);
        best.trace.push_back(val);
        if (val > best.surrogate) {
            best.surrogate = val;
            best.v = std::move(cand);
        }
    }
    best.iterations = sol.sweeps;
    return {std::move(best), sol.value + qf.c_const, sol.q};
}

}  // namespace irsssm
