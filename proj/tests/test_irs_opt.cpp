#include <doctest.h>

#include <cmath>

#include "irsssm/irs_opt.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace irsssm;
using namespace irsssm::testing;

namespace {

struct Instance {
    SystemConfig cfg;
    WhitenedChannels wch;
    HybridPrecoder p;
    QuadraticForms qf;
};

Instance make_instance(int n_irs, std::uint64_t seed, int n_rf = 4, int n_k = 2, int m = 4) {
    SystemConfig cfg = generic_config(n_rf, n_k, 2, 2, n_irs, m);
    const ChannelSet ch = gaussian_channels(cfg, seed, 0.3);
    const auto p = random_precoder(n_rf, n_k, seed);
    const auto link = prepare_link(cfg, ch, IrsPhaseVector::ones(n_irs), p.analog_blocks(), {AnStrategy::Auto, seed});
    const auto cons = Constellation::psk(m);
    auto qf = build_quadratic_forms(cfg, link.white, p, cons);
    return {cfg, link.white, p, std::move(qf)};
}

bool unit_modulus(const IrsPhaseVector& v) {
    return ((v.values().array().abs() - 1.0).abs() <= 1e-9).all();
}

double gap(double opt, double got) { return (opt - got) / std::abs(opt); }

}  // namespace

TEST_SUITE("irs_opt") {

TEST_CASE("surrogate from quadratic forms matches direct norm evaluation") {
    SUBCASE("tiny instance N=2, one subarray, BPSK") {
        const auto in = make_instance(2, 3, 1, 2, 2);
        const auto cons = Constellation::psk(2);
        for (std::uint64_t s = 0; s < 50; ++s) {
            const CVec v = oracle::random_unit_modulus(2, s);
            const double direct = oracle::surrogate_direct(in.cfg, in.wch, v, in.p, cons);
            CHECK(std::abs(in.qf.value(v) - direct) <= 1e-8 * std::max(1.0, std::abs(direct)));
        }
    }
    SUBCASE("20 generic instances x 50 phase vectors") {
        const auto cons = Constellation::psk(4);
        double worst = 0.0;
        for (std::uint64_t i = 0; i < 20; ++i) {
            const auto in = make_instance(6, 100 + i);
            for (std::uint64_t s = 0; s < 50; ++s) {
                const CVec v = oracle::random_unit_modulus(6, s);
                const double direct = oracle::surrogate_direct(in.cfg, in.wch, v, in.p, cons);
                worst = std::max(worst, std::abs(in.qf.value(v) - direct) / std::max(1.0, std::abs(direct)));
            }
        }
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("per-pair pieces reproduce the aggregates") {
    const auto in = make_instance(4, 7, 2, 2, 4);
    const auto& qf = in.qf;
    const int k = qf.n_hyp();
    CMat phib = CMat::Zero(4, 4), phie = CMat::Zero(4, 4);
    CRow db = CRow::Zero(4), de = CRow::Zero(4);
    for (int m = 0; m < k; ++m)
        for (int n = 0; n < k; ++n) {
            if (m == n) {
                CHECK(qf.pair_a(Receiver::Bob, m, n).norm() == 0.0);
                CHECK(qf.pair_c(Receiver::Eve, m, n).norm() == 0.0);
                CHECK(qf.pair_b(Receiver::Bob, m, n).norm() == 0.0);
                continue;
            }
            phib += qf.pair_b(Receiver::Bob, m, n);
            phie += qf.pair_b(Receiver::Eve, m, n);
            db += qf.pair_a(Receiver::Bob, m, n).adjoint() * qf.pair_c(Receiver::Bob, m, n);
            de += qf.pair_a(Receiver::Eve, m, n).adjoint() * qf.pair_c(Receiver::Eve, m, n);
        }
    CHECK((qf.scale * phib - qf.phi_b).norm() <= 1e-10 * qf.phi_b.norm());
    CHECK((qf.scale * phie - qf.phi_e).norm() <= 1e-10 * qf.phi_e.norm());
    CHECK((qf.scale * db - qf.d_row).norm() <= 1e-10 * qf.d_row.norm());
    CHECK((qf.scale * de - qf.d_prime_row).norm() <= 1e-10 * qf.d_prime_row.norm());
    CHECK((qf.phi_b - qf.phi_b.adjoint()).norm() < 1e-12 * qf.phi_b.norm());
    Eigen::SelfAdjointEigenSolver<CMat> es(qf.phi_e);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * qf.phi_e.norm());
}

TEST_CASE("no reflected path: forms vanish and the surrogate is constant") {
    SystemConfig cfg = generic_config(4, 2, 2, 2, 5);
    ChannelSet ch = gaussian_channels(cfg, 4);
    ch.f.setZero();
    const auto p = random_precoder(4, 2, 4);
    const auto link = prepare_link(cfg, ch, IrsPhaseVector::ones(5), p.analog_blocks());
    const auto qf = build_quadratic_forms(cfg, link.white, p, Constellation::psk(4));
    CHECK(qf.phi_b.norm() == 0.0);
    CHECK(qf.phi_e.norm() == 0.0);
    CHECK(qf.d_row.norm() == 0.0);
    CHECK(qf.d_prime_row.norm() == 0.0);
    const double c = qf.value(IrsPhaseVector::ones(5));
    CHECK(qf.value(IrsPhaseVector::random(5, 1)) == doctest::Approx(c));

    SUBCASE("ADMM and BCA leave v0 alone on a flat objective") {
        const auto v0 = IrsPhaseVector::random(5, 8);
        CHECK((irs_admm(qf, v0).v.values() - v0.values()).norm() == 0.0);
        CHECK((irs_bca(qf, v0).v.values() - v0.values()).norm() == 0.0);
    }
    SUBCASE("SDR on a zero lift returns a unit-modulus vector at the constant") {
        const auto r = irs_sdr(qf);
        CHECK(unit_modulus(r.solve.v));
        CHECK(r.solve.surrogate == doctest::Approx(qf.c_const));
        CHECK(r.sdp_value == doctest::Approx(qf.c_const));
    }
}

TEST_CASE("BCA closed-form element update") {
    QuadraticForms qf;
    qf.phi_b = CMat::Zero(1, 1);
    qf.phi_e = CMat::Zero(1, 1);
    qf.d_row = CRow::Constant(1, cplx(3.0, -4.0));
    qf.d_prime_row = CRow::Zero(1);
    SUBCASE("single element lands on conj(delta)/|delta| in one sweep") {
        const auto r = irs_bca(qf, IrsPhaseVector::ones(1));
        CHECK(std::abs(r.v[0] - cplx(0.6, 0.8)) < 1e-15);
        CHECK(r.surrogate == doctest::Approx(10.0));
    }
    SUBCASE("zero coupling and zero delta keep the element") {
        QuadraticForms z = qf;
        z.phi_b = CMat::Zero(2, 2);
        z.phi_e = CMat::Zero(2, 2);
        z.d_row = CRow::Zero(2);
        z.d_row(0) = cplx(1.0, 0.0);
        z.d_prime_row = CRow::Zero(2);
        CVec v0(2);
        v0 << cplx(0.0, 1.0), cplx(0.0, -1.0);
        const auto r = irs_bca(z, IrsPhaseVector(v0));
        CHECK(std::abs(r.v[0] - cplx(1.0, 0.0)) < 1e-15);
        CHECK(std::abs(r.v[1] - cplx(0.0, -1.0)) == 0.0);
    }
}

TEST_CASE("ADMM projection keeps the previous phase where the argument vanishes") {
    // phi = 0, delta = (1, 0): the second element never receives any pull.
    QuadraticForms qf;
    qf.phi_b = CMat::Zero(2, 2);
    qf.phi_e = CMat::Zero(2, 2);
    qf.d_row = CRow::Zero(2);
    qf.d_row(0) = cplx(0.0, 2.0);
    qf.d_prime_row = CRow::Zero(2);
    CVec v0(2);
    v0 << cplx(1.0, 0.0), cplx(0.0, 1.0);
    const auto r = irs_admm(qf, IrsPhaseVector(v0), {1.0, 1e-9, 100, 500});
    CHECK(std::abs(r.v[1] - cplx(0.0, 1.0)) < 1e-12);
    CHECK(std::abs(r.v[0] - cplx(0.0, -1.0)) < 1e-6);
}

TEST_CASE("N=3 solvers against the 1-degree exhaustive grid") {
    for (std::uint64_t s = 0; s < 3; ++s) {
        const auto in = make_instance(3, 500 + s);
        const auto grid = oracle::grid_optimum3(in.qf, 1.0);
        const auto v0 = IrsPhaseVector::random(3, s);
        const auto admm = irs_admm(in.qf, v0);
        const auto bca = irs_bca(in.qf, v0);
        const auto sdr = irs_sdr(in.qf, {200, s, 1e-6});
        CAPTURE(s);
        CAPTURE(grid.best);
        CHECK(gap(grid.best, sdr.solve.surrogate) <= 0.02);
        CHECK(gap(grid.best, admm.surrogate) <= 0.02);
        CHECK(gap(grid.best, bca.surrogate) <= 0.05);
        CHECK(sdr.sdp_value >= grid.best - 1e-9 * std::abs(grid.best));
    }
}

TEST_CASE("solvers return unit-modulus vectors and never lose ground") {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto in = make_instance(8, 900 + s);
        const auto v0 = IrsPhaseVector::random(8, s);
        const double f0 = in.qf.value(v0);
        const auto admm = irs_admm(in.qf, v0);
        const auto bca = irs_bca(in.qf, v0, {1e-9, 500, true});
        const auto sdr = irs_sdr(in.qf, {50, s, 1e-6});
        CHECK(unit_modulus(admm.v));
        CHECK(unit_modulus(bca.v));
        CHECK(unit_modulus(sdr.solve.v));
        CHECK(admm.surrogate >= f0 - 1e-9);
        CHECK(bca.surrogate >= f0 - 1e-9);
        CHECK(admm.surrogate == doctest::Approx(in.qf.value(admm.v)));
        CHECK(bca.surrogate == doctest::Approx(in.qf.value(bca.v)));
        CHECK(sdr.solve.surrogate == doctest::Approx(in.qf.value(sdr.solve.v)));
        // element-level trace
        REQUIRE(bca.trace.size() >= 2);
        for (std::size_t t = 1; t < bca.trace.size(); ++t) CHECK(bca.trace[t] >= bca.trace[t - 1] - 1e-9);
        CHECK(default_admm_rho(in.qf) == doctest::Approx(2.0 * in.qf.phi_e.trace().real() / 8 + 1.0));
    }
}

TEST_CASE("SDR relaxation bounds every unit-modulus vector") {
    for (std::uint64_t s = 0; s < 3; ++s) {
        const auto in = make_instance(6, 1300 + s);
        const auto r = irs_sdr(in.qf, {200, s, 1e-6});
        const CMat& q = r.q;
        CHECK((q.diagonal().array() - 1.0).abs().maxCoeff() <= 1e-6);
        Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (q + q.adjoint()));
        CHECK(es.eigenvalues().minCoeff() >= -1e-6);
        double best = -1e300;
        for (std::uint64_t t = 0; t < 1000; ++t) best = std::max(best, in.qf.value(oracle::random_unit_modulus(6, t)));
        CHECK(r.sdp_value >= best - 1e-9 * std::abs(best));
        CHECK(r.sdp_value >= r.solve.surrogate - 1e-9 * std::abs(r.solve.surrogate));
    }
}

TEST_CASE("SDR lift matrix structure") {
    const auto in = make_instance(3, 1);
    const CMat psi = sdr_matrix(in.qf);
    REQUIRE(psi.rows() == 4);
    CHECK((psi - psi.adjoint()).norm() < 1e-14 * psi.norm());
    CHECK(std::abs(psi(3, 3)) == 0.0);
    CVec t(4);
    const CVec v = oracle::random_unit_modulus(3, 2);
    t << v, cplx(1.0, 0.0);
    CHECK((t.adjoint() * psi * t)(0, 0).real() + in.qf.c_const == doctest::Approx(in.qf.value(v)));
}

}  // TEST_SUITE
