#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "irsssm/model.hpp"

namespace irsssm {

struct MiEstimate {
    double mi_bob = 0.0;
    double mi_eve = 0.0;
    double se_bob = 0.0;
    double se_eve = 0.0;
};

/// Cut-off rates and the approximate secrecy rate R_s^a = log2 kappa_E - log2 kappa_B.
struct RateReport {
    double i0_bob = 0.0;
    double i0_eve = 0.0;
    double r_approx = 0.0;
    double kappa_b = 0.0;
    double kappa_e = 0.0;
    std::optional<MiEstimate> mc;
};

/// Squared norms ||eff D_mn p||^2 for every pair, same order as diffs.
std::vector<double> pair_distances(const CMat& eff, const std::vector<DifferencePair>& diffs,
                                   const CVec& p);

/// sum_{m,n} exp(-tau ||eff D_mn p||^2). eff is an already whitened effective
/// channel (e.g. H~ + G~ V F). Each term lies in [0, 1]; the diagonal terms are
/// exactly 1, so the result is bounded below by the hypothesis count. Terms whose
/// exponent underflows contribute 0.
double kappa(const CMat& eff, const std::vector<DifferencePair>& diffs, const CVec& p, double tau);

double kappa(const CMat& direct_tilde, const CMat& reflect_tilde, const CMat& f,
             const IrsPhaseVector& v, const std::vector<DifferencePair>& diffs, const CVec& p,
             double tau);

RateReport approx_secrecy_rate(const SystemConfig& cfg, const WhitenedChannels& wch,
                               const IrsPhaseVector& v, const HybridPrecoder& p,
                               const Constellation& cons);

/// Full pipeline: AN projection for (v, fa_blocks), whitening, then the cut-off rates.
RateReport secrecy_rate(const SystemConfig& cfg, const ChannelSet& ch, const IrsPhaseVector& v,
                        const HybridPrecoder& p, const Constellation& cons,
                        const std::vector<CVec>& fa_blocks, const AnOptions& an = {});

/// Monte Carlo estimate of the discrete-input mutual information at each
/// receiver in the whitened (unit noise variance) domain. Noise for draw s and
/// hypothesis m comes from its own counter stream, so the estimate depends only
/// on the seed.
MiEstimate mc_mutual_information(const SystemConfig& cfg, const WhitenedChannels& wch,
                                 const IrsPhaseVector& v, const HybridPrecoder& p,
                                 const Constellation& cons, int n_noise_samples,
                                 std::uint64_t seed);

}  // namespace irsssm
