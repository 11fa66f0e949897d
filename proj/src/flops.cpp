#include "irsssm/flops.hpp"

#include <algorithm>
#include <cmath>

namespace irsssm {

namespace {

double clamp0(double x) { return std::max(0.0, x); }

// B, C and D terms for one receiver with r antennas.
double receiver_pair_terms(double n, double r) {
    return clamp0(8 * n * n * r - 2 * n * n) + clamp0(8 * n * n * r - 2 * n * r) +
           clamp0(8 * n * r - 2 * n);
}

}  // namespace

const char* to_string(FlopMethod m) {
    switch (m) {
        case FlopMethod::IrsAdmm: return "irs_admm";
        case FlopMethod::IrsBca: return "irs_bca";
        case FlopMethod::IrsSdr: return "irs_sdr";
        case FlopMethod::Sca: return "sca";
        case FlopMethod::Ga: return "ga";
    }
    return "?";
}

double flops_hypothesis_terms(const SystemConfig& cfg) {
    const double nb = cfg.n_b, nk = cfg.n_k, n = cfg.n_irs;
    return clamp0(8 * nb * nk - 2 * nb) + clamp0(8 * n * nk - 2 * n);
}

double flops_pair_terms(const SystemConfig& cfg) {
    const double n = cfg.n_irs;
    return receiver_pair_terms(n, cfg.n_b) + receiver_pair_terms(n, cfg.n_e);
}

FlopEstimate flop_estimates(const SystemConfig& cfg, FlopMethod method, double iterations,
                            double sdp_accuracy) {
    const double d = clamp0(iterations);
    const double n = cfg.n_irs;
    const double k = static_cast<double>(cfg.n_hyp());
    const double t = static_cast<double>(cfg.n_tx());
    FlopEstimate est;
    const bool irs = method == FlopMethod::IrsAdmm || method == FlopMethod::IrsBca ||
                     method == FlopMethod::IrsSdr;
    if (irs) est.shared = k * flops_hypothesis_terms(cfg) + k * k * flops_pair_terms(cfg);
    switch (method) {
        case FlopMethod::IrsAdmm:
            est.iterative = d * clamp0(n * n * n + 24 * n * n - 5 * n);
            est.big_o = "O(N^3)";
            break;
        case FlopMethod::IrsBca:
            est.iterative = d * n;
            est.big_o = "O(N^2)";
            break;
        case FlopMethod::IrsSdr:
            est.iterative = d * std::pow(n, 4.5) * std::log(1.0 / sdp_accuracy);
            est.big_o = "O(N^4.5 log(1/eps))";
            break;
        case FlopMethod::Sca:
            est.iterative = d * (4 * k * k * clamp0(8 * t * t + 6 * t - 2) + t * t * t);
            est.big_o = "O((N_RF N_k)^3)";
            break;
        case FlopMethod::Ga:
            est.iterative = d * (k * k * clamp0(32 * t * t + 4 * t - 4) + 6 * t);
            est.big_o = "O((N_RF M)^2 (N_RF N_k)^2)";
            break;
    }
    est.total = est.shared + est.iterative;
    return est;
}

}  // namespace irsssm
