#pragma once

#include <cstdint>

#include "irsssm/model.hpp"
#include "irsssm/rng.hpp"

namespace irsssm::testing {

/// Small system with unit-variance channels and powers chosen so that the
/// pair exponents tau * q are of order one (neither saturated nor flat).
inline SystemConfig generic_config(int n_rf, int n_k, int n_b, int n_e, int n_irs, int m_ary = 4) {
    SystemConfig cfg;
    cfg.n_rf = n_rf;
    cfg.n_k = n_k;
    cfg.n_b = n_b;
    cfg.n_e = n_e;
    cfg.n_irs = n_irs;
    cfg.m_ary = m_ary;
    cfg.p_total = 2.0;
    cfg.beta = 0.35;
    cfg.sigma_b2 = 1.0;
    cfg.sigma_e2 = 1.0;
    return cfg;
}

inline CMat gaussian_matrix(int rows, int cols, std::uint64_t seed, std::uint64_t tag, double variance = 1.0) {
    StreamRng rng({seed, tag});
    CMat m(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) m(r, c) = rng.complex_normal(variance);
    return m;
}

inline ChannelSet gaussian_channels(const SystemConfig& cfg, std::uint64_t seed, double scale = 1.0) {
    ChannelSet ch;
    ch.h = gaussian_matrix(cfg.n_b, cfg.n_tx(), seed, 1, scale);
    ch.q = gaussian_matrix(cfg.n_e, cfg.n_tx(), seed, 2, scale);
    ch.f = gaussian_matrix(cfg.n_irs, cfg.n_tx(), seed, 3, scale);
    ch.g = gaussian_matrix(cfg.n_b, cfg.n_irs, seed, 4, scale);
    ch.m = gaussian_matrix(cfg.n_e, cfg.n_irs, seed, 5, scale);
    return ch;
}

inline CVec gaussian_vector(int n, std::uint64_t seed, std::uint64_t tag = 9) {
    return gaussian_matrix(n, 1, seed, tag).col(0);
}

/// Random precoder strictly inside the ball.
inline HybridPrecoder random_precoder(int n_rf, int n_k, std::uint64_t seed, double frac = 0.8) {
    CVec p = gaussian_vector(n_rf * n_k, seed, 17);
    p *= frac * n_rf / p.norm();
    return HybridPrecoder(p, n_rf, n_k);
}

inline double rel_err(double a, double b) {
    const double d = std::abs(a - b);
    const double s = std::max(std::abs(a), std::abs(b));
    return s > 0.0 ? d / s : d;
}

}  // namespace irsssm::testing
