#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "irsssm/config.hpp"
#include "irsssm/types.hpp"

namespace irsssm {

/// Complex channel matrices. Column count n_tx = n_rf * n_k.
struct ChannelSet {
    CMat h;  // n_b x n_tx, Alice -> Bob
    CMat q;  // n_e x n_tx, Alice -> Eve
    CMat f;  // n_irs x n_tx, Alice -> IRS
    CMat g;  // n_b x n_irs, IRS -> Bob
    CMat m;  // n_e x n_irs, IRS -> Eve

    void validate(const SystemConfig& cfg) const;
    static ChannelSet zeros(const SystemConfig& cfg);
};

/// Unit-average-energy symbol alphabet.
class Constellation {
public:
    /// Gray-labelled M-PSK; M=2 gives {+1, -1}, M=4 gives QPSK on the diagonals.
    static Constellation psk(int m);
    /// Rescales the points to unit average energy.
    static Constellation from_points(std::vector<cplx> points);

    const std::vector<cplx>& symbols() const { return symbols_; }
    int size() const { return static_cast<int>(symbols_.size()); }
    cplx operator[](int j) const { return symbols_[static_cast<std::size_t>(j)]; }

private:
    explicit Constellation(std::vector<cplx> s) : symbols_(std::move(s)) {}
    std::vector<cplx> symbols_;
};

/// One of the n_rf * M transmit possibilities: subarray i carries symbol b_j.
struct TransmitHypothesis {
    int subarray = 0;  // 0-based block index
    int symbol = 0;    // 0-based constellation index
    cplx value{};      // b_j
    CVec x_vec;        // diagonal of E_i b_j, zero outside block i
};

/// Hypotheses ordered by (subarray, symbol); index k = i * M + j.
std::vector<TransmitHypothesis> enumerate_hypotheses(const SystemConfig& cfg,
                                                     const Constellation& cons);

/// D_mn = X_m - X_n, stored as at most two scaled block selectors so that
/// D_mn p costs O(n_k).
class DifferencePair {
public:
    DifferencePair(int m, int n, const TransmitHypothesis& hm, const TransmitHypothesis& hn,
                   int n_k);

    int m() const { return m_; }
    int n() const { return n_; }
    int block_m() const { return block_m_; }
    int block_n() const { return block_n_; }
    cplx coef_m() const { return coef_m_; }
    cplx coef_n() const { return coef_n_; }
    int n_k() const { return n_k_; }
    bool same_block() const { return block_m_ == block_n_; }
    bool is_zero() const { return m_ == n_; }

    /// (X_m - X_n) p.
    CVec apply(const CVec& p) const;
    /// Diagonal of X_m - X_n as a dense vector of length n_tx.
    CVec diagonal(int n_tx) const;
    CMat dense(int n_tx) const;

private:
    int m_, n_;
    int block_m_, block_n_;
    cplx coef_m_, coef_n_;
    int n_k_;
};

/// All ordered pairs, row-major in (m, n).
std::vector<DifferencePair> difference_operators(const std::vector<TransmitHypothesis>& hyps,
                                                 int n_k);

/// IRS reflection coefficients, every entry of unit modulus.
class IrsPhaseVector {
public:
    static constexpr double kModulusTol = 1e-9;

    explicit IrsPhaseVector(CVec v);

    static IrsPhaseVector ones(int n);
    static IrsPhaseVector from_phases(const RVec& theta);
    /// Uniform phases; element k draws from its own stream so prefixes are nested.
    static IrsPhaseVector random(int n, std::uint64_t seed);
    /// Elementwise phase of raw; entries with raw == 0 keep the value in fallback.
    static IrsPhaseVector project(const CVec& raw, const CVec& fallback);

    const CVec& values() const { return v_; }
    int size() const { return static_cast<int>(v_.size()); }
    cplx operator[](int k) const { return v_(k); }

private:
    CVec v_;
};

struct HybridFactorization {
    std::vector<CVec> f_blocks;       // unit-modulus entries scaled 1/sqrt(n_k)
    std::vector<cplx> d_gains;        // least-squares digital gain per block
    std::vector<double> residuals;    // ||p_i - f_i d_i||
    std::vector<bool> skipped;        // zero block
    std::vector<bool> flagged;        // relative residual > 1e-6
};

/// Stacked precoder p = F_A F_D, n_rf blocks of length n_k, ||p|| <= n_rf.
class HybridPrecoder {
public:
    static constexpr double kNormTol = 1e-9;

    HybridPrecoder(CVec p, int n_rf, int n_k);

    /// Constant-modulus blocks 1/sqrt(n_k), then scaled to ||p|| = n_rf.
    static HybridPrecoder equal_power(int n_rf, int n_k);

    const CVec& p() const { return p_; }
    int n_rf() const { return n_rf_; }
    int n_k() const { return n_k_; }
    double norm() const { return p_.norm(); }
    auto block(int i) const { return p_.segment(i * n_k_, n_k_); }

    /// Analog vectors implied by p: elementwise phase / sqrt(n_k); zero entries get phase 0.
    std::vector<CVec> analog_blocks() const;

    std::optional<HybridFactorization> factorization;

private:
    CVec p_;
    int n_rf_, n_k_;
};

/// Radial projection onto the ball ||p|| <= radius.
CVec project_to_ball(const CVec& p, double radius);

enum class AnStrategy { Auto, NullSpace, RandomUnitary, Identity };

struct AnOptions {
    AnStrategy strategy = AnStrategy::Auto;
    std::uint64_t seed = 0;  // random-unitary draws
};

struct AnProjection {
    CMat t_an;    // n_rf x n_rf, ||t_an||_F^2 = n_rf
    CMat cov_b;   // C_B
    CMat cov_e;   // C_E
    AnStrategy used = AnStrategy::Auto;
    bool degenerate = false;  // effective Bob channel was rank 0
};

/// Block-diagonal F_A (n_tx x n_rf) from per-subarray analog vectors.
CMat analog_matrix(const std::vector<CVec>& fa_blocks, int n_k);

/// direct + reflect * diag(v) * f
CMat effective_channel(const CMat& direct, const CMat& reflect, const CVec& v, const CMat& f);

/// Null space of (H + G V F) F_A when n_rf > n_b, otherwise a random unitary.
AnProjection build_an_projection(const SystemConfig& cfg, const ChannelSet& ch,
                                 const IrsPhaseVector& v, const std::vector<CVec>& fa_blocks,
                                 const AnOptions& opts = {});

struct Covariances {
    CMat omega_b;
    CMat omega_e;
};

/// Omega = (1 - beta) P C + sigma^2 I at each receiver. Throws NumericalError if not PD.
Covariances interference_covariances(const SystemConfig& cfg, const AnProjection& an);

struct WhitenedChannels {
    CMat h_tilde, g_tilde;  // Omega_B^{-1/2} H, Omega_B^{-1/2} G
    CMat q_tilde, m_tilde;  // Omega_E^{-1/2} Q, Omega_E^{-1/2} M
    CMat f;                 // Alice -> IRS (not whitened)
    CMat omega_b, omega_e;

    CMat bob_effective(const CVec& v) const { return effective_channel(h_tilde, g_tilde, v, f); }
    CMat eve_effective(const CVec& v) const { return effective_channel(q_tilde, m_tilde, v, f); }
};

/// Hermitian inverse square root; throws NumericalError when the smallest
/// eigenvalue is below rel_floor times the largest.
CMat inverse_sqrt_hermitian(const CMat& a, double rel_floor = 1e-12);
CMat sqrt_hermitian(const CMat& a);

WhitenedChannels whiten(const ChannelSet& ch, const CMat& omega_b, const CMat& omega_e);

/// AN projection, covariances and whitened channels for one (v, F_A).
struct LinkState {
    AnProjection an;
    Covariances cov;
    WhitenedChannels white;
};

LinkState prepare_link(const SystemConfig& cfg, const ChannelSet& ch, const IrsPhaseVector& v,
                       const std::vector<CVec>& fa_blocks, const AnOptions& opts = {});

struct Detection {
    int subarray = 0;
    int symbol = 0;
    bool operator==(const Detection&) const = default;
};

/// Exhaustive ML over (i, j); ties resolve to the smallest (i, j).
Detection ml_detect(const SystemConfig& cfg, const ChannelSet& ch, const IrsPhaseVector& v,
                    const HybridPrecoder& p, const Constellation& cons, const CVec& y);

}  // namespace irsssm
