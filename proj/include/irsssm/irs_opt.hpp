#pragma once

#include <cstdint>
#include <vector>

#include "irsssm/model.hpp"
#include "irsssm/sdp.hpp"

namespace irsssm {

enum class Receiver { Bob, Eve };

/// The secrecy objective written as quadratic forms in the IRS vector v, for
/// a fixed precoder p.
///
/// For hypothesis k = (i, j), a_k = b_j H~_i p_i is the direct response and
/// s_k = b_j F_i p_i the field incident on the IRS, so the whitened received
/// point is a_k + G~ diag(s_k) v. Each pair (m, n) then contributes
///   ||A + C v||^2 = v^H B v + 2 Re{A^H C v} + ||A||^2
/// with A = a_m - a_n, C = G~ diag(s_m - s_n), B = C^H C.
/// The aggregates are scaled by log2(e) * tau:
///   phi_b = sum B,  d_row = sum A^H C,  and likewise for Eve,
///   c_const = scale * (sum ||A_B||^2 - sum ||A_E||^2).
/// The surrogate is v^H (phi_b - phi_e) v + 2 Re{(d_row - d_prime_row) v} + c_const.
///
/// Only the per-hypothesis vectors are cached; per-pair quantities are formed
/// on request.
struct QuadraticForms {
    CMat phi_b, phi_e;   // N x N Hermitian PSD
    CRow d_row;          // Bob linear term, length N
    CRow d_prime_row;    // Eve linear term
    double c_const = 0.0;

    CMat a_bob;    // n_b x K, columns a_k
    CMat a_eve;    // n_e x K
    CMat s_vecs;   // N x K, columns s_k (shared by both receivers)
    CMat g_tilde;  // whitened IRS -> Bob
    CMat m_tilde;  // whitened IRS -> Eve
    double tau = 0.0;
    double scale = 0.0;  // log2(e) * tau

    int n_elements() const { return static_cast<int>(phi_b.rows()); }
    int n_hyp() const { return static_cast<int>(s_vecs.cols()); }

    CMat phi() const { return phi_b - phi_e; }
    CRow delta() const { return d_row - d_prime_row; }
    double value(const CVec& v) const;
    double value(const IrsPhaseVector& v) const { return value(v.values()); }

    CVec pair_a(Receiver rx, int m, int n) const;
    CMat pair_c(Receiver rx, int m, int n) const;
    CMat pair_b(Receiver rx, int m, int n) const;
    CMat s_diag(int k) const { return s_vecs.col(k).asDiagonal(); }
};

QuadraticForms build_quadratic_forms(const SystemConfig& cfg, const WhitenedChannels& wch,
                                     const HybridPrecoder& p, const Constellation& cons);

struct IrsSolveResult {
    IrsPhaseVector v;
    double surrogate = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;
    double primal_residual = 0.0;  // ADMM only: final ||u - v||
};

struct AdmmOptions {
    double rho = 0.0;  // <= 0 selects default_admm_rho()
    double tol = 0.01;
    int max_outer = 100;
    int max_inner = 500;
};

/// 2 tr(phi_e) / N + 1.
double default_admm_rho(const QuadraticForms& qf);

/// DC-linearized ADMM. The outer loop linearizes v^H phi_b v at the current
/// iterate; the inner loop alternates the closed-form u-update, unit-modulus
/// projection of u - lambda/rho and the dual step lambda -= rho (u - v).
/// Returns the best iterate seen, so the surrogate never drops below v0's.
IrsSolveResult irs_admm(const QuadraticForms& qf, const IrsPhaseVector& v0,
                        const AdmmOptions& opts = {});

struct BcaOptions {
    double tol = 1e-6;  // absolute surrogate gain per sweep
    int max_sweeps = 500;
    bool record_element_trace = false;
};

/// Cyclic closed-form element updates
///   v_n = phase(sum_{j != n} phi_nj v_j + conj(delta_n)),
/// keeping v_n when the argument is zero.
IrsSolveResult irs_bca(const QuadraticForms& qf, const IrsPhaseVector& v0,
                       const BcaOptions& opts = {});

struct SdrOptions {
    int n_randomizations = 200;
    std::uint64_t seed = 0;
    double sdp_tol = 1e-6;
};

struct SdrResult {
    IrsSolveResult solve;
    double sdp_value = 0.0;  // tr(psi Q) + c_const, an upper bound on the surrogate
    CMat q;
};

/// Homogenized lift psi = [[phi, delta^H], [delta, 0]] (Hermitian part).
CMat sdr_matrix(const QuadraticForms& qf);

/// Relax, solve the unit-diagonal SDP, then Gaussian randomization.
SdrResult irs_sdr(const QuadraticForms& qf, const SdrOptions& opts = {});

}  // namespace irsssm
