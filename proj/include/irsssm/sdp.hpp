#pragma once

#include <cstdint>

#include "irsssm/types.hpp"

namespace irsssm {

struct SdpOptions {
    /// Residual tolerance, relative to ||psi||_F (absolute when psi = 0).
    double tol = 1e-6;
    /// Factor rank; 0 selects ceil(sqrt(2K)).
    int rank = 0;
    int max_sweeps = 20000;
    int restarts = 8;
    std::uint64_t seed = 0;
};

struct SdpSolution {
    CMat q;          // K x K, unit diagonal, PSD
    CMat factor;     // K x r with unit-norm rows, q = factor * factor^H
    double value = 0.0;     // tr(psi q)
    double residual = 0.0;  // relative dual-infeasibility + stationarity
    int sweeps = 0;
};

class SdpError : public NumericalError {
public:
    SdpError(const std::string& what, SdpSolution best)
        : NumericalError(what), best_(std::move(best)) {}
    const SdpSolution& best() const { return best_; }

private:
    SdpSolution best_;
};

/// max tr(psi Q) s.t. diag(Q) = 1, Q >= 0, for Hermitian psi.
///
/// Low-rank factorized ascent: Q = V V^H with unit-norm rows, maximized one row
/// at a time in closed form (each row update is exact, so the objective never
/// decreases). Optimality is certified through the dual: with
/// y_i = Re (psi Q)_ii the slack S = diag(y) - psi must be PSD, and then
/// tr(psi Q) = sum(y) is optimal. A negative eigenvalue of S triggers a
/// restart along the offending direction.
SdpSolution sdp_unit_diag(const CMat& psi, const SdpOptions& opts = {});

}  // namespace irsssm
