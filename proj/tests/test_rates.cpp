#include <doctest.h>

#include <cmath>

#include "irsssm/channels.hpp"
#include "irsssm/rates.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace irsssm;
using namespace irsssm::testing;

TEST_SUITE("rates") {

TEST_CASE("approximate secrecy rate matches the dense unwhitened pipeline") {
    const auto cons = Constellation::psk(4);
    SUBCASE("null-space AN, generic channels") {
        const SystemConfig cfg = generic_config(4, 2, 2, 2, 5);
        for (std::uint64_t s = 0; s < 20; ++s) {
            const ChannelSet ch = gaussian_channels(cfg, s, 0.3);
            const auto v = IrsPhaseVector::random(cfg.n_irs, s);
            const auto p = random_precoder(cfg.n_rf, cfg.n_k, s);
            const auto fa = p.analog_blocks();
            const auto fast = secrecy_rate(cfg, ch, v, p, cons, fa);
            const auto slow = oracle::naive_rates(cfg, ch, v, p, cons, fa);
            CHECK(rel_err(fast.kappa_b, slow.kappa_b) < 1e-10);
            CHECK(rel_err(fast.kappa_e, slow.kappa_e) < 1e-10);
            CHECK(std::abs(fast.r_approx - slow.r_approx) <= 1e-10 * std::max(1.0, std::abs(slow.r_approx)));
        }
    }
    SUBCASE("random-unitary AN when there is no null space") {
        const SystemConfig cfg = generic_config(2, 2, 2, 2, 4);
        for (std::uint64_t s = 0; s < 10; ++s) {
            const ChannelSet ch = gaussian_channels(cfg, s, 0.3);
            const auto v = IrsPhaseVector::random(cfg.n_irs, s);
            const auto p = random_precoder(cfg.n_rf, cfg.n_k, s);
            const auto fa = p.analog_blocks();
            const AnOptions an{AnStrategy::Auto, s};
            const auto link = prepare_link(cfg, ch, v, fa, an);
            const auto fast = approx_secrecy_rate(cfg, link.white, v, p, cons);
            const auto slow = oracle::naive_rates(cfg, ch, v, p, cons, fa, &link.an.t_an);
            CHECK(std::abs(fast.r_approx - slow.r_approx) <= 1e-10 * std::max(1.0, std::abs(slow.r_approx)));
        }
    }
    SUBCASE("desk-scale physical channels") {
        const SystemConfig cfg = SystemConfig::desk_scale();
        for (std::uint64_t s = 0; s < 3; ++s) {
            const ChannelSet ch = draw_channels(cfg, s);
            const auto v = IrsPhaseVector::random(cfg.n_irs, s);
            const auto p = HybridPrecoder::equal_power(cfg.n_rf, cfg.n_k);
            const auto fa = p.analog_blocks();
            const auto fast = secrecy_rate(cfg, ch, v, p, cons, fa);
            const auto slow = oracle::naive_rates(cfg, ch, v, p, cons, fa);
            CHECK(std::abs(fast.r_approx - slow.r_approx) <= 1e-10 * std::max(1.0, std::abs(slow.r_approx)));
        }
    }
}

TEST_CASE("kappa bounds and limits") {
    const SystemConfig cfg = generic_config(4, 2, 2, 2, 5);
    const auto cons = Constellation::psk(4);
    const auto diffs = difference_operators(enumerate_hypotheses(cfg, cons), cfg.n_k);
    const int k = cfg.n_hyp();
    const ChannelSet ch = gaussian_channels(cfg, 5);
    const CVec p = random_precoder(cfg.n_rf, cfg.n_k, 5).p();
    const CMat eff = effective_channel(ch.h, ch.g, IrsPhaseVector::ones(5).values(), ch.f);

    const double kv = kappa(eff, diffs, p, cfg.tau());
    CHECK(kv >= k);
    CHECK(kv <= double(k) * k);
    // zero channel: every pair term is 1
    CHECK(kappa(CMat::Zero(2, cfg.n_tx()), diffs, p, cfg.tau()) == doctest::Approx(double(k) * k));
    // huge SNR: only the diagonal survives
    CHECK(kappa(eff, diffs, p, 1e9) == doctest::Approx(double(k)));
    // underflowing exponents contribute exactly 0
    CHECK(kappa(eff, diffs, p, 1e300) == double(k));

    const auto d = pair_distances(eff, diffs, p);
    for (int m = 0; m < k; ++m) CHECK(d[static_cast<std::size_t>(m * k + m)] == 0.0);
    for (int m = 0; m < k; ++m)
        for (int n = 0; n < k; ++n)
            CHECK(std::abs(d[static_cast<std::size_t>(m * k + n)] - d[static_cast<std::size_t>(n * k + m)]) < 1e-12);
}

TEST_CASE("secrecy rate with a silent eavesdropper equals Bob's cut-off rate minus its ceiling") {
    SystemConfig cfg = generic_config(4, 2, 2, 2, 5);
    const auto cons = Constellation::psk(4);
    ChannelSet ch = gaussian_channels(cfg, 9);
    ch.q.setZero();
    ch.m.setZero();
    const auto v = IrsPhaseVector::random(5, 9);
    const auto p = random_precoder(4, 2, 9);
    const auto r = secrecy_rate(cfg, ch, v, p, cons, p.analog_blocks());
    const double k = cfg.n_hyp();
    CHECK(r.kappa_e == doctest::Approx(k * k));
    CHECK(r.i0_eve == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.r_approx == doctest::Approx(r.i0_bob));
    CHECK(r.r_approx <= std::log2(k) + 1e-12);
}

TEST_CASE("cut-off rate lower-bounds the Monte Carlo mutual information") {
    const SystemConfig cfg = generic_config(2, 2, 2, 2, 3);
    const auto cons = Constellation::psk(4);
    const ChannelSet ch = gaussian_channels(cfg, 33);
    const auto v = IrsPhaseVector::random(3, 33);
    const auto p = random_precoder(2, 2, 33);
    const auto link = prepare_link(cfg, ch, v, p.analog_blocks(), {AnStrategy::Auto, 1});
    const auto r = approx_secrecy_rate(cfg, link.white, v, p, cons);
    const auto mi = mc_mutual_information(cfg, link.white, v, p, cons, 2000, 4);
    const double cap = std::log2(double(cfg.n_hyp()));
    CHECK(mi.mi_bob <= cap + 4.0 * mi.se_bob);
    CHECK(mi.mi_eve <= cap + 4.0 * mi.se_eve);
    CHECK(mi.mi_bob + 4.0 * mi.se_bob >= r.i0_bob);
    CHECK(mi.mi_eve + 4.0 * mi.se_eve >= r.i0_eve);

    const auto again = mc_mutual_information(cfg, link.white, v, p, cons, 2000, 4);
    CHECK(again.mi_bob == mi.mi_bob);
    CHECK(again.mi_eve == mi.mi_eve);
    CHECK_THROWS_AS(mc_mutual_information(cfg, link.white, v, p, cons, 10, 4), InvalidInput);
}

namespace {

WhitenedChannels plain_white(const ChannelSet& ch) {
    WhitenedChannels w;
    w.h_tilde = ch.h;
    w.g_tilde = ch.g;
    w.q_tilde = ch.q;
    w.m_tilde = ch.m;
    w.f = ch.f;
    w.omega_b = CMat::Identity(ch.h.rows(), ch.h.rows());
    w.omega_e = CMat::Identity(ch.q.rows(), ch.q.rows());
    return w;
}

}  // namespace

TEST_CASE("symmetric receivers give zero secrecy rate") {
    const SystemConfig cfg = generic_config(4, 2, 2, 2, 5);
    const auto cons = Constellation::psk(4);
    ChannelSet ch = gaussian_channels(cfg, 14);
    ch.q = ch.h;
    ch.m = ch.g;
    const auto r = approx_secrecy_rate(cfg, plain_white(ch), IrsPhaseVector::random(5, 1),
                                       random_precoder(4, 2, 14), cons);
    CHECK(r.r_approx == 0.0);
    CHECK(r.kappa_b == r.kappa_e);
}

TEST_CASE("full-size parameter point matches the oracle") {
    const SystemConfig cfg = SystemConfig::full_scale();
    const auto cons = Constellation::psk(4);
    const ChannelSet ch = draw_channels(cfg, 2024);
    const auto v = IrsPhaseVector::random(cfg.n_irs, 2024);
    const auto p = HybridPrecoder::equal_power(cfg.n_rf, cfg.n_k);
    const auto fa = p.analog_blocks();
    const auto fast = secrecy_rate(cfg, ch, v, p, cons, fa);
    const auto slow = oracle::naive_rates(cfg, ch, v, p, cons, fa);
    MESSAGE("full-size anchor R_s^a = " << fast.r_approx);
    CHECK(fast.kappa_b >= 32.0);
    CHECK(fast.kappa_e <= 1024.0);
    CHECK(std::abs(fast.r_approx - slow.r_approx) <= 1e-10 * std::max(1.0, std::abs(slow.r_approx)));
}

TEST_CASE("Monte Carlo mutual information limits") {
    const SystemConfig cfg = generic_config(4, 2, 2, 2, 3);
    const auto cons = Constellation::psk(4);
    const auto v = IrsPhaseVector::random(3, 2);
    const auto p = random_precoder(4, 2, 2);
    SUBCASE("zero channel carries no information") {
        const auto mi = mc_mutual_information(cfg, plain_white(ChannelSet::zeros(cfg)), v, p, cons, 200, 1);
        CHECK(std::abs(mi.mi_bob) <= 3.0 * mi.se_bob + 1e-12);
        CHECK(std::abs(mi.mi_eve) <= 3.0 * mi.se_eve + 1e-12);
    }
    SUBCASE("very high SNR saturates at log2 K") {
        ChannelSet ch = gaussian_channels(cfg, 2);
        ch.h *= 1e4;
        ch.g *= 1e4;
        ch.q *= 1e4;
        ch.m *= 1e4;
        const auto mi = mc_mutual_information(cfg, plain_white(ch), v, p, cons, 200, 1);
        CHECK(std::abs(mi.mi_bob - std::log2(double(cfg.n_hyp()))) < 0.05);
        CHECK(std::abs(mi.mi_eve - std::log2(double(cfg.n_hyp()))) < 0.05);
    }
    SUBCASE("cut-off rate sits below the estimate on 20 seeds") {
        int below = 0;
        for (std::uint64_t s = 0; s < 20; ++s) {
            const ChannelSet ch = gaussian_channels(cfg, 100 + s, 0.2);
            const auto w = plain_white(ch);
            const auto r = approx_secrecy_rate(cfg, w, v, p, cons);
            const auto mi = mc_mutual_information(cfg, w, v, p, cons, 200, s);
            if (r.i0_bob <= mi.mi_bob + 3.0 * mi.se_bob && r.i0_eve <= mi.mi_eve + 3.0 * mi.se_eve) ++below;
        }
        CHECK(below == 20);
    }
}

}  // TEST_SUITE
