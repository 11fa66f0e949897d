#include "irsssm/rates.hpp"

#include <algorithm>
#include <cmath>

#include "irsssm/rng.hpp"

namespace irsssm {

namespace {

// z_i = eff[:, block i] * p_i for every subarray.
CMat block_responses(const CMat& eff, const CVec& p, int n_k) {
    const int n_rf = static_cast<int>(p.size()) / n_k;
    CMat z(eff.rows(), n_rf);
    for (int i = 0; i < n_rf; ++i) z.col(i) = eff.middleCols(i * n_k, n_k) * p.segment(i * n_k, n_k);
    return z;
}

// Noiseless received points for every hypothesis (columns).
CMat hypothesis_points(const CMat& eff, const HybridPrecoder& p, const Constellation& cons) {
    const CMat z = block_responses(eff, p.p(), p.n_k());
    const int m = cons.size();
    CMat y(eff.rows(), static_cast<Eigen::Index>(p.n_rf()) * m);
    for (int i = 0; i < p.n_rf(); ++i)
        for (int j = 0; j < m; ++j) y.col(i * m + j) = z.col(i) * cons[j];
    return y;
}

double log_sum_exp(const std::vector<double>& x) {
    const double mx = *std::max_element(x.begin(), x.end());
    double s = 0.0;
    for (double v : x) s += std::exp(v - mx);
    return mx + std::log(s);
}

double mi_sample_mean(const CMat& pts, int n_samples, std::uint64_t seed, std::uint64_t rx,
                      double* std_err) {
    const int k = static_cast<int>(pts.cols());
    const int nr = static_cast<int>(pts.rows());
    std::vector<double> expo(static_cast<std::size_t>(k));
    double sum = 0.0, sum2 = 0.0;
    CVec noise(nr);
    for (int s = 0; s < n_samples; ++s) {
        double acc = 0.0;
        for (int m = 0; m < k; ++m) {
            StreamRng rng({seed, rx, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(m)});
            for (int r = 0; r < nr; ++r) noise(r) = rng.complex_normal();
            const double nn = noise.squaredNorm();
            for (int n = 0; n < k; ++n)
                expo[static_cast<std::size_t>(n)] = -(pts.col(m) - pts.col(n) + noise).squaredNorm() + nn;
            acc += log_sum_exp(expo) * kLog2e;
        }
        const double x = std::log2(double(k)) - acc / k;
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n_samples;
    const double var = std::max(0.0, (sum2 - n_samples * mean * mean) / (n_samples - 1));
    *std_err = std::sqrt(var / n_samples);
    return mean;
}

}  // namespace

std::vector<double> pair_distances(const CMat& eff, const std::vector<DifferencePair>& diffs,
                                   const CVec& p) {
    std::vector<double> out(diffs.size(), 0.0);
    if (diffs.empty()) return out;
    const CMat z = block_responses(eff, p, diffs.front().n_k());
    for (std::size_t k = 0; k < diffs.size(); ++k) {
        const auto& d = diffs[k];
        if (d.is_zero()) continue;
        out[k] = (d.coef_m() * z.col(d.block_m()) - d.coef_n() * z.col(d.block_n())).squaredNorm();
    }
    return out;
}

double kappa(const CMat& eff, const std::vector<DifferencePair>& diffs, const CVec& p, double tau) {
    double s = 0.0;
    for (double q : pair_distances(eff, diffs, p)) s += std::exp(-tau * q);
    return s;
}

double kappa(const CMat& direct_tilde, const CMat& reflect_tilde, const CMat& f,
             const IrsPhaseVector& v, const std::vector<DifferencePair>& diffs, const CVec& p,
             double tau) {
    return kappa(effective_channel(direct_tilde, reflect_tilde, v.values(), f), diffs, p, tau);
}

RateReport approx_secrecy_rate(const SystemConfig& cfg, const WhitenedChannels& wch,
                               const IrsPhaseVector& v, const HybridPrecoder& p,
                               const Constellation& cons) {
    const auto diffs = difference_operators(enumerate_hypotheses(cfg, cons), cfg.n_k);
    const double tau = cfg.tau();
    RateReport r;
    r.kappa_b = kappa(wch.bob_effective(v.values()), diffs, p.p(), tau);
    r.kappa_e = kappa(wch.eve_effective(v.values()), diffs, p.p(), tau);
    const double two_log_k = 2.0 * std::log2(double(cfg.n_hyp()));
    r.i0_bob = two_log_k - std::log2(r.kappa_b);
    r.i0_eve = two_log_k - std::log2(r.kappa_e);
    r.r_approx = std::log2(r.kappa_e) - std::log2(r.kappa_b);
    return r;
}

RateReport secrecy_rate(const SystemConfig& cfg, const ChannelSet& ch, const IrsPhaseVector& v,
                        const HybridPrecoder& p, const Constellation& cons,
                        const std::vector<CVec>& fa_blocks, const AnOptions& an) {
    const LinkState link = prepare_link(cfg, ch, v, fa_blocks, an);
    return approx_secrecy_rate(cfg, link.white, v, p, cons);
}

MiEstimate mc_mutual_information(const SystemConfig& cfg, const WhitenedChannels& wch,
                                 const IrsPhaseVector& v, const HybridPrecoder& p,
                                 const Constellation& cons, int n_noise_samples,
                                 std::uint64_t seed) {
    if (n_noise_samples < 100) throw InvalidInput("mc_mutual_information: need >= 100 samples");
    const double amp = std::sqrt(cfg.beta * cfg.p_total);
    const CMat pts_b = amp * hypothesis_points(wch.bob_effective(v.values()), p, cons);
    const CMat pts_e = amp * hypothesis_points(wch.eve_effective(v.values()), p, cons);
    MiEstimate est;
    est.mi_bob = mi_sample_mean(pts_b, n_noise_samples, seed, 0xB0B, &est.se_bob);
    est.mi_eve = mi_sample_mean(pts_e, n_noise_samples, seed, 0xE7E, &est.se_eve);
    return est;
}

}  // namespace irsssm
