#include <doctest.h>

#include <cmath>

#include "irsssm/sdp.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace irsssm;
using namespace irsssm::testing;

namespace {

CMat random_hermitian(int k, std::uint64_t seed) {
    const CMat a = gaussian_matrix(k, k, seed, 77);
    return 0.5 * (a + a.adjoint());
}

void check_feasible(const SdpSolution& s) {
    CHECK((s.q.diagonal().array() - 1.0).abs().maxCoeff() <= 1e-6);
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (s.q + s.q.adjoint()));
    CHECK(es.eigenvalues().minCoeff() >= -1e-6);
}

}  // namespace

TEST_SUITE("sdp") {

TEST_CASE("identity objective attains the trace bound") {
    const auto s = sdp_unit_diag(CMat::Identity(5, 5));
    check_feasible(s);
    CHECK(s.value == doctest::Approx(5.0));
}

TEST_CASE("diagonal objective value is the diagonal sum") {
    CMat psi = CMat::Zero(6, 6);
    for (int i = 0; i < 6; ++i) psi(i, i) = (i % 2 == 0) ? 1.0 : -1.0;
    const auto s = sdp_unit_diag(psi);
    check_feasible(s);
    CHECK(s.value == doctest::Approx(0.0).epsilon(1e-9));

    psi.diagonal().setConstant(1.0);
    psi(2, 2) = -1.0;
    CHECK(sdp_unit_diag(psi).value == doctest::Approx(4.0));
}

TEST_CASE("zero objective") {
    const auto s = sdp_unit_diag(CMat::Zero(4, 4));
    check_feasible(s);
    CHECK(s.value == 0.0);
}

TEST_CASE("rank-one MaxCut-like instance is tight") {
    // psi = w w^H with unit-modulus w: Q = w w^H reaches tr = |sum|w||^2 = K^2.
    const CVec w = oracle::random_unit_modulus(5, 3);
    const auto s = sdp_unit_diag(w * w.adjoint());
    check_feasible(s);
    CHECK(s.value == doctest::Approx(25.0).epsilon(1e-8));
}

TEST_CASE("agrees with the full-matrix projected gradient solver") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const CMat psi = random_hermitian(4, seed);
        const auto s = sdp_unit_diag(psi, {1e-8, 0, 20000, 8, seed});
        check_feasible(s);
        const double ref = oracle::projected_gradient_sdp(psi);
        CAPTURE(seed);
        CHECK(rel_err(s.value, ref) <= 1e-4);
        CHECK(s.value == doctest::Approx((psi * s.q).trace().real()).epsilon(1e-10));
    }
}

TEST_CASE("dual certificate holds at the returned point") {
    for (std::uint64_t seed = 10; seed < 15; ++seed) {
        const CMat psi = random_hermitian(8, seed);
        const auto s = sdp_unit_diag(psi);
        check_feasible(s);
        CHECK(s.residual <= 1e-6);
        const CMat pq = psi * s.q;
        CMat slack = -psi;
        for (int i = 0; i < 8; ++i) slack(i, i) += pq(i, i).real();
        Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (slack + slack.adjoint()));
        CHECK(es.eigenvalues().minCoeff() >= -1e-5 * psi.norm());
        // weak duality: any feasible Q gives at most sum(y)
        for (std::uint64_t t = 0; t < 20; ++t) {
            const CVec x = oracle::random_unit_modulus(8, t);
            CHECK((x.adjoint() * psi * x)(0, 0).real() <= s.value + 1e-9 * psi.norm());
        }
    }
}

TEST_CASE("input validation") {
    CMat bad = CMat::Zero(3, 3);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(sdp_unit_diag(bad), InvalidInput);
    CHECK_THROWS_AS(sdp_unit_diag(CMat::Zero(2, 3)), InvalidInput);
}

}  // TEST_SUITE
