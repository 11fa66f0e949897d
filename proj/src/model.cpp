#include "irsssm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "irsssm/rng.hpp"

namespace irsssm {

namespace {

void check_shape(const CMat& a, Eigen::Index rows, Eigen::Index cols, const char* name) {
    if (a.rows() != rows || a.cols() != cols) {
        std::ostringstream os;
        os << "ChannelSet: " << name << " is " << a.rows() << "x" << a.cols() << ", expected "
           << rows << "x" << cols;
        throw InvalidInput(os.str());
    }
    if (!a.allFinite()) throw InvalidInput(std::string("ChannelSet: non-finite entry in ") + name);
}

int gray(int k) { return k ^ (k >> 1); }

// Clears round-off so that axis points such as -1 are exact.
cplx snap(cplx z) {
    auto clean = [](double x) { return std::abs(x) < 1e-15 ? 0.0 : x; };
    return {clean(z.real()), clean(z.imag())};
}

CMat hermitian_part(const CMat& a) { return 0.5 * (a + a.adjoint()); }

CMat random_unitary(int n, std::uint64_t seed) {
    StreamRng rng({seed, 0x414eULL});
    CMat z(n, n);
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) z(r, c) = rng.complex_normal();
    Eigen::HouseholderQR<CMat> qr(z);
    CMat q = qr.householderQ() * CMat::Identity(n, n);
    // Fix the column phases so the draw is Haar distributed.
    const CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < n; ++c) {
        const double mag = std::abs(r(c, c));
        if (mag > 0.0) q.col(c) *= r(c, c) / mag;
    }
    return q;
}

}  // namespace

void ChannelSet::validate(const SystemConfig& cfg) const {
    const Eigen::Index nt = cfg.n_tx();
    check_shape(h, cfg.n_b, nt, "h");
    check_shape(q, cfg.n_e, nt, "q");
    check_shape(f, cfg.n_irs, nt, "f");
    check_shape(g, cfg.n_b, cfg.n_irs, "g");
    check_shape(m, cfg.n_e, cfg.n_irs, "m");
}

ChannelSet ChannelSet::zeros(const SystemConfig& cfg) {
    const int nt = cfg.n_tx();
    return {CMat::Zero(cfg.n_b, nt), CMat::Zero(cfg.n_e, nt), CMat::Zero(cfg.n_irs, nt),
            CMat::Zero(cfg.n_b, cfg.n_irs), CMat::Zero(cfg.n_e, cfg.n_irs)};
}

// ---------------------------------------------------------------------------
// Constellation

Constellation Constellation::psk(int m) {
    if (m < 2 || (m & (m - 1)) != 0) throw InvalidInput("psk: order must be a power of two >= 2");
    const double offset = (m == 2) ? 0.0 : kPi / m;
    std::vector<cplx> s(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k)
        s[static_cast<std::size_t>(gray(k))] = snap(std::polar(1.0, 2.0 * kPi * k / m + offset));
    return Constellation(std::move(s));
}

Constellation Constellation::from_points(std::vector<cplx> points) {
    if (points.size() < 2) throw InvalidInput("constellation needs at least two points");
    double energy = 0.0;
    for (auto& b : points) energy += std::norm(b);
    energy /= static_cast<double>(points.size());
    if (!(energy > 0.0)) throw InvalidInput("constellation has zero energy");
    const double s = 1.0 / std::sqrt(energy);
    for (auto& b : points) b *= s;
    return Constellation(std::move(points));
}

// ---------------------------------------------------------------------------
// Hypotheses and difference operators

std::vector<TransmitHypothesis> enumerate_hypotheses(const SystemConfig& cfg,
                                                     const Constellation& cons) {
    std::vector<TransmitHypothesis> out;
    out.reserve(static_cast<std::size_t>(cfg.n_rf * cons.size()));
    for (int i = 0; i < cfg.n_rf; ++i) {
        for (int j = 0; j < cons.size(); ++j) {
            TransmitHypothesis h;
            h.subarray = i;
            h.symbol = j;
            h.value = cons[j];
            h.x_vec = CVec::Zero(cfg.n_tx());
            h.x_vec.segment(i * cfg.n_k, cfg.n_k).setConstant(cons[j]);
            out.push_back(std::move(h));
        }
    }
    return out;
}

DifferencePair::DifferencePair(int m, int n, const TransmitHypothesis& hm,
                               const TransmitHypothesis& hn, int n_k)
    : m_(m),
      n_(n),
      block_m_(hm.subarray),
      block_n_(hn.subarray),
      coef_m_(hm.value),
      coef_n_(hn.value),
      n_k_(n_k) {
    if (m == n) coef_m_ = coef_n_ = cplx{};
}

CVec DifferencePair::apply(const CVec& p) const {
    CVec out = CVec::Zero(p.size());
    if (is_zero()) return out;
    out.segment(block_m_ * n_k_, n_k_) += coef_m_ * p.segment(block_m_ * n_k_, n_k_);
    out.segment(block_n_ * n_k_, n_k_) -= coef_n_ * p.segment(block_n_ * n_k_, n_k_);
    return out;
}

CVec DifferencePair::diagonal(int n_tx) const { return apply(CVec::Ones(n_tx)); }

CMat DifferencePair::dense(int n_tx) const { return diagonal(n_tx).asDiagonal(); }

std::vector<DifferencePair> difference_operators(const std::vector<TransmitHypothesis>& hyps,
                                                 int n_k) {
    std::vector<DifferencePair> out;
    out.reserve(hyps.size() * hyps.size());
    const int k = static_cast<int>(hyps.size());
    for (int m = 0; m < k; ++m)
        for (int n = 0; n < k; ++n)
            out.emplace_back(m, n, hyps[static_cast<std::size_t>(m)],
                             hyps[static_cast<std::size_t>(n)], n_k);
    return out;
}

// ---------------------------------------------------------------------------
// IRS phase vector

IrsPhaseVector::IrsPhaseVector(CVec v) : v_(std::move(v)) {
    for (Eigen::Index k = 0; k < v_.size(); ++k) {
        const double err = std::abs(std::abs(v_(k)) - 1.0);
        if (!(err <= kModulusTol)) {
            std::ostringstream os;
            os << "IrsPhaseVector: |v_" << k << "| = " << std::abs(v_(k)) << " is not unit modulus";
            throw InvalidInput(os.str());
        }
    }
}

IrsPhaseVector IrsPhaseVector::ones(int n) { return IrsPhaseVector(CVec::Ones(n)); }

IrsPhaseVector IrsPhaseVector::from_phases(const RVec& theta) {
    CVec v(theta.size());
    for (Eigen::Index k = 0; k < theta.size(); ++k) v(k) = std::polar(1.0, theta(k));
    return IrsPhaseVector(std::move(v));
}

IrsPhaseVector IrsPhaseVector::random(int n, std::uint64_t seed) {
    CVec v(n);
    for (int k = 0; k < n; ++k) {
        StreamRng rng({seed, 0x5652ULL, static_cast<std::uint64_t>(k)});
        v(k) = std::polar(1.0, rng.phase());
    }
    return IrsPhaseVector(std::move(v));
}

IrsPhaseVector IrsPhaseVector::project(const CVec& raw, const CVec& fallback) {
    CVec v(raw.size());
    for (Eigen::Index k = 0; k < raw.size(); ++k) {
        const double mag = std::abs(raw(k));
        v(k) = (mag > 0.0 && std::isfinite(mag)) ? raw(k) / mag : fallback(k);
    }
    return IrsPhaseVector(std::move(v));
}

// ---------------------------------------------------------------------------
// Hybrid precoder

HybridPrecoder::HybridPrecoder(CVec p, int n_rf, int n_k) : p_(std::move(p)), n_rf_(n_rf), n_k_(n_k) {
    if (n_rf < 1 || n_k < 1 || p_.size() != static_cast<Eigen::Index>(n_rf) * n_k)
        throw InvalidInput("HybridPrecoder: length must equal n_rf * n_k");
    if (!p_.allFinite()) throw InvalidInput("HybridPrecoder: non-finite entry");
    if (p_.norm() > n_rf + kNormTol)
        throw InvalidInput("HybridPrecoder: ||p|| exceeds n_rf");
}

HybridPrecoder HybridPrecoder::equal_power(int n_rf, int n_k) {
    CVec p = CVec::Constant(static_cast<Eigen::Index>(n_rf) * n_k, 1.0 / std::sqrt(double(n_k)));
    p *= n_rf / p.norm();
    return HybridPrecoder(std::move(p), n_rf, n_k);
}

std::vector<CVec> HybridPrecoder::analog_blocks() const {
    std::vector<CVec> out;
    const double a = 1.0 / std::sqrt(double(n_k_));
    for (int i = 0; i < n_rf_; ++i) {
        CVec f(n_k_);
        for (int k = 0; k < n_k_; ++k) {
            const cplx z = p_(i * n_k_ + k);
            f(k) = std::abs(z) > 0.0 ? a * z / std::abs(z) : cplx(a, 0.0);
        }
        out.push_back(std::move(f));
    }
    return out;
}

CVec project_to_ball(const CVec& p, double radius) {
    const double n = p.norm();
    return n > radius ? CVec(p * (radius / n)) : p;
}

// ---------------------------------------------------------------------------
// Artificial noise

CMat analog_matrix(const std::vector<CVec>& fa_blocks, int n_k) {
    const int n_rf = static_cast<int>(fa_blocks.size());
    CMat fa = CMat::Zero(static_cast<Eigen::Index>(n_rf) * n_k, n_rf);
    for (int i = 0; i < n_rf; ++i) {
        if (fa_blocks[static_cast<std::size_t>(i)].size() != n_k)
            throw InvalidInput("analog_matrix: block length must equal n_k");
        fa.block(i * n_k, i, n_k, 1) = fa_blocks[static_cast<std::size_t>(i)];
    }
    return fa;
}

CMat effective_channel(const CMat& direct, const CMat& reflect, const CVec& v, const CMat& f) {
    return direct + reflect * v.asDiagonal() * f;
}

AnProjection build_an_projection(const SystemConfig& cfg, const ChannelSet& ch,
                                 const IrsPhaseVector& v, const std::vector<CVec>& fa_blocks,
                                 const AnOptions& opts) {
    if (static_cast<int>(fa_blocks.size()) != cfg.n_rf)
        throw InvalidInput("build_an_projection: need one analog vector per RF chain");
    const CMat fa = analog_matrix(fa_blocks, cfg.n_k);
    const CMat a_bob = effective_channel(ch.h, ch.g, v.values(), ch.f) * fa;
    const CMat a_eve = effective_channel(ch.q, ch.m, v.values(), ch.f) * fa;
    const int n = cfg.n_rf;

    AnProjection an;
    AnStrategy strategy = opts.strategy;
    if (strategy == AnStrategy::Auto)
        strategy = (cfg.n_rf > cfg.n_b) ? AnStrategy::NullSpace : AnStrategy::RandomUnitary;

    if (strategy == AnStrategy::NullSpace) {
        Eigen::JacobiSVD<CMat> svd(a_bob, Eigen::ComputeFullV);
        const RVec& sv = svd.singularValues();
        const double smax = sv.size() > 0 ? sv(0) : 0.0;
        if (!(smax > std::numeric_limits<double>::min())) {
            an.t_an = CMat::Identity(n, n);
            an.degenerate = true;
            an.used = AnStrategy::Identity;
        } else {
            int rank = 0;
            for (Eigen::Index k = 0; k < sv.size(); ++k)
                if (sv(k) > 1e-10 * smax) ++rank;
            const int dim = n - rank;
            if (dim == 0) {
                an.t_an = random_unitary(n, opts.seed);
                an.used = AnStrategy::RandomUnitary;
            } else {
                const CMat basis = svd.matrixV().rightCols(dim);
                an.t_an = std::sqrt(double(n) / dim) * basis * basis.adjoint();
                an.used = AnStrategy::NullSpace;
            }
        }
    } else if (strategy == AnStrategy::RandomUnitary) {
        an.t_an = random_unitary(n, opts.seed);
        an.used = AnStrategy::RandomUnitary;
    } else {
        an.t_an = CMat::Identity(n, n);
        an.used = AnStrategy::Identity;
    }

    const CMat tt = an.t_an * an.t_an.adjoint();
    an.cov_b = hermitian_part(a_bob * tt * a_bob.adjoint());
    an.cov_e = hermitian_part(a_eve * tt * a_eve.adjoint());
    return an;
}

Covariances interference_covariances(const SystemConfig& cfg, const AnProjection& an) {
    const double jam = (1.0 - cfg.beta) * cfg.p_total;
    Covariances c;
    c.omega_b = jam * an.cov_b;
    c.omega_b.diagonal().array() += cfg.sigma_b2;
    c.omega_e = jam * an.cov_e;
    c.omega_e.diagonal().array() += cfg.sigma_e2;
    c.omega_b = hermitian_part(c.omega_b);
    c.omega_e = hermitian_part(c.omega_e);
    for (const auto* om : {&c.omega_b, &c.omega_e}) {
        Eigen::SelfAdjointEigenSolver<CMat> es(*om, Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues().minCoeff();
        if (!(lmin > 0.0)) {
            std::ostringstream os;
            os << "interference covariance is not positive definite (smallest eigenvalue "
               << lmin << ")";
            throw NumericalError(os.str());
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// Whitening

CMat inverse_sqrt_hermitian(const CMat& a, double rel_floor) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(a));
    const RVec& ev = es.eigenvalues();
    const double lmax = ev.maxCoeff();
    const double lmin = ev.minCoeff();
    if (!(lmax > 0.0) || lmin < rel_floor * lmax) {
        std::ostringstream os;
        os << "ill-conditioned whitener: eigenvalue range [" << lmin << ", " << lmax << "]";
        throw NumericalError(os.str());
    }
    const RVec s = ev.array().rsqrt();
    return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

CMat sqrt_hermitian(const CMat& a) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(a));
    const RVec s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

WhitenedChannels whiten(const ChannelSet& ch, const CMat& omega_b, const CMat& omega_e) {
    const CMat wb = inverse_sqrt_hermitian(omega_b);
    const CMat we = inverse_sqrt_hermitian(omega_e);
    WhitenedChannels w;
    w.h_tilde = wb * ch.h;
    w.g_tilde = wb * ch.g;
    w.q_tilde = we * ch.q;
    w.m_tilde = we * ch.m;
    w.f = ch.f;
    w.omega_b = omega_b;
    w.omega_e = omega_e;
    return w;
}

LinkState prepare_link(const SystemConfig& cfg, const ChannelSet& ch, const IrsPhaseVector& v,
                       const std::vector<CVec>& fa_blocks, const AnOptions& opts) {
    LinkState s;
    s.an = build_an_projection(cfg, ch, v, fa_blocks, opts);
    s.cov = interference_covariances(cfg, s.an);
    s.white = whiten(ch, s.cov.omega_b, s.cov.omega_e);
    return s;
}

// ---------------------------------------------------------------------------
// Detection

Detection ml_detect(const SystemConfig& cfg, const ChannelSet& ch, const IrsPhaseVector& v,
                    const HybridPrecoder& p, const Constellation& cons, const CVec& y) {
    if (y.size() != cfg.n_b) throw InvalidInput("ml_detect: y must have length n_b");
    const CMat heff = effective_channel(ch.h, ch.g, v.values(), ch.f);
    const double amp = std::sqrt(cfg.beta * cfg.p_total);
    Detection best;
    double best_metric = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cfg.n_rf; ++i) {
        const CVec z = amp * heff.middleCols(i * cfg.n_k, cfg.n_k) * p.block(i);
        for (int j = 0; j < cons.size(); ++j) {
            const double metric = (y - z * cons[j]).squaredNorm();
            if (metric < best_metric) {
                best_metric = metric;
                best = {i, j};
            }
        }
    }
    return best;
}

}  // namespace irsssm
