#pragma once

#include <vector>

#include "irsssm/model.hpp"

namespace irsssm {

/// One pair matrix B_mn = (eff D_mn)^H (eff D_mn). Only the rows/columns of
/// the (at most two) blocks touched by D_mn are stored.
struct PairBlock {
    int block_m = 0;
    int block_n = 0;
    CMat mat;  // n_k x n_k when same_block, else 2n_k x 2n_k ordered (m, n)
};

/// Precoder-domain quadratic forms for fixed v. Evaluation goes through the
/// per-block responses of the whitened effective channels, which is the same
/// quantity as p^H B_mn p without forming the matrices.
struct PrecoderQuadratics {
    CMat eff_b;  // Bob whitened effective channel H~ + G~ V F
    CMat eff_e;  // Eve
    std::vector<DifferencePair> diffs;
    std::vector<PairBlock> b_mats;
    std::vector<PairBlock> e_mats;
    double tau = 0.0;
    int n_rf = 0;
    int n_k = 0;

    int n_tx() const { return n_rf * n_k; }
    int n_pairs() const { return static_cast<int>(diffs.size()); }
    CMat b_dense(int pair) const;
    CMat e_dense(int pair) const;
};

PrecoderQuadratics build_precoder_quadratics(const SystemConfig& cfg, const WhitenedChannels& wch,
                                             const IrsPhaseVector& v, const Constellation& cons);

/// log2 kappa at each receiver, and R_s^a = log2 kappa_E - log2 kappa_B.
double bob_log_kappa(const PrecoderQuadratics& pq, const CVec& p);
double eve_log_kappa(const PrecoderQuadratics& pq, const CVec& p);
double precoder_rate(const PrecoderQuadratics& pq, const CVec& p);

/// Gradient g with dR = Re{g^H dp}.
CVec precoder_gradient(const PrecoderQuadratics& pq, const CVec& p);

/// Expansion data for the SCA bounds at a point p0.
struct ScaExpansion {
    CVec p0;
    RVec q0_b, q0_e;  // pair distances at p0
    RVec chi0_e;      // exp(-tau q0_e)
    CMat r0_b;        // Bob pair responses eff_b D_mn p0, one column per pair
};

ScaExpansion sca_expand(const PrecoderQuadratics& pq, const CVec& p0);

/// log2 sum chi0 (1 + tau q0 - tau q(p)), a concave lower bound on log2 kappa_E.
/// Returns -inf outside the domain where the sum is positive.
double sca_eve_lower(const PrecoderQuadratics& pq, const ScaExpansion& ex, const CVec& p);
/// log2 sum exp(tau q0 - 2 tau Re{c^H p}), c = B p0; a convex upper bound on log2 kappa_B.
double sca_bob_upper(const PrecoderQuadratics& pq, const ScaExpansion& ex, const CVec& p);

struct PrecoderSolveResult {
    HybridPrecoder p;
    double rate = 0.0;
    int iterations = 0;
    bool converged = false;
    bool stationary = false;  // gradient vanished at the start point
    std::vector<double> trace;  // R_s^a after each accepted step, starting with p0
};

struct ScaOptions {
    double tol = 0.01;  // on ||p_k - p_{k-1}||
    int max_iters = 50;
    double inner_tol = 1e-8;  // projected-gradient norm
    int max_inner = 50;
};

PrecoderSolveResult asr_sca(const PrecoderQuadratics& pq, const HybridPrecoder& p0,
                            const ScaOptions& opts = {});

struct GaOptions {
    double mu0 = 0.0;  // <= 0 selects 0.1 n_rf / ||grad(p0)||
    double tol = 1e-4;
    int max_iters = 500;
};

PrecoderSolveResult cor_ga(const PrecoderQuadratics& pq, const HybridPrecoder& p0,
                           const GaOptions& opts = {});

/// Per block: f_i = phase(p_i) / sqrt(n_k), d_i = f_i^H p_i.
HybridPrecoder factorize_hybrid(const HybridPrecoder& p);

}  // namespace irsssm
