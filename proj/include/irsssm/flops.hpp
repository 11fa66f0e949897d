#pragma once

#include <string>

#include "irsssm/config.hpp"

namespace irsssm {

enum class FlopMethod { IrsAdmm, IrsBca, IrsSdr, Sca, Ga };

const char* to_string(FlopMethod m);

struct FlopEstimate {
    double shared = 0.0;    // per-hypothesis and per-pair assembly (IRS methods only)
    double iterative = 0.0; // iteration-count-scaled part
    double total = 0.0;
    std::string big_o;
};

/// Closed-form operation counts for one run with `iterations` solver
/// iterations. Every polynomial term is clamped at zero. sdp_accuracy is the
/// interior-point accuracy varsigma in the N^4.5 ln(1/varsigma) SDP cost.
FlopEstimate flop_estimates(const SystemConfig& cfg, FlopMethod method, double iterations,
                            double sdp_accuracy = 1e-6);

/// Per-hypothesis term: a_ij and s_ij.
double flops_hypothesis_terms(const SystemConfig& cfg);
/// Per-pair term: B, C and D for Bob plus the Eve counterparts.
double flops_pair_terms(const SystemConfig& cfg);

}  // namespace irsssm
