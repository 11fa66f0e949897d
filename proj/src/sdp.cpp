#include "irsssm/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "irsssm/rng.hpp"

namespace irsssm {

namespace {

void normalize_rows(CMat& v) {
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        const double n = v.row(i).norm();
        if (n > 0.0) {
            v.row(i) /= n;
        } else {
            v.row(i).setZero();
            v(i, 0) = 1.0;
        }
    }
}

CMat random_factor(Eigen::Index k, Eigen::Index r, std::uint64_t seed, int attempt) {
    StreamRng rng({seed, 0x5D9ULL, static_cast<std::uint64_t>(attempt)});
    CMat v(k, r);
    for (Eigen::Index c = 0; c < r; ++c)
        for (Eigen::Index i = 0; i < k; ++i) v(i, c) = rng.complex_normal();
    normalize_rows(v);
    return v;
}

// Row-by-row exact maximization until the sweep gain stalls.
int mixing_sweeps(const CMat& psi, CMat& v, int max_sweeps, double scale) {
    const Eigen::Index k = psi.rows();
    CMat g = psi * v;  // kept equal to psi * v
    double prev = (v.adjoint() * g).trace().real();
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        double max_step = 0.0;
        for (Eigen::Index i = 0; i < k; ++i) {
            Eigen::RowVectorXcd gi = g.row(i) - psi(i, i) * v.row(i);
            const double n = gi.norm();
            if (!(n > 0.0)) continue;
            const Eigen::RowVectorXcd next = gi / n;
            const Eigen::RowVectorXcd delta = next - v.row(i);
            const double step = delta.norm();
            if (step == 0.0) continue;
            max_step = std::max(max_step, step);
            g.noalias() += psi.col(i) * delta;
            v.row(i) = next;
        }
        const double obj = (v.adjoint() * g).trace().real();
        const double gain = obj - prev;
        prev = obj;
        if (max_step < 1e-10 || gain <= 1e-15 * scale) {
            ++sweep;
            break;
        }
    }
    return sweep;
}

struct Certificate {
    double residual = 0.0;
    CVec escape;  // eigenvector of the most negative slack eigenvalue
    double slack_min = 0.0;
};

Certificate certify(const CMat& psi, const CMat& v, double scale) {
    const CMat g = psi * v;
    const Eigen::Index k = psi.rows();
    RVec y(k);
    double stationarity = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        y(i) = g.row(i).dot(v.row(i)).real();
        stationarity = std::max(stationarity, (g.row(i) - y(i) * v.row(i)).norm());
    }
    CMat slack = -psi;
    slack.diagonal() += y.cast<cplx>();
    slack = 0.5 * (slack + slack.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMat> es(slack);
    Certificate c;
    c.slack_min = es.eigenvalues()(0);
    c.escape = es.eigenvectors().col(0);
    c.residual = std::max(std::max(0.0, -c.slack_min), stationarity) / scale;
    return c;
}

}  // namespace

SdpSolution sdp_unit_diag(const CMat& psi_in, const SdpOptions& opts) {
    if (psi_in.rows() != psi_in.cols() || psi_in.rows() == 0)
        throw InvalidInput("sdp_unit_diag: psi must be square and non-empty");
    const CMat psi = 0.5 * (psi_in + psi_in.adjoint());
    if ((psi - psi_in).norm() > 1e-9 * std::max(1.0, psi_in.norm()))
        throw InvalidInput("sdp_unit_diag: psi must be Hermitian");
    const Eigen::Index k = psi.rows();
    const Eigen::Index r =
        opts.rank > 0 ? std::min<Eigen::Index>(opts.rank, k)
                      : std::min<Eigen::Index>(k, static_cast<Eigen::Index>(std::ceil(std::sqrt(2.0 * k))));
    const double fro = psi.norm();
    const double scale = fro > 0.0 ? fro : 1.0;

    SdpSolution best;
    best.residual = std::numeric_limits<double>::infinity();
    best.value = -std::numeric_limits<double>::infinity();

    CMat v = random_factor(k, r, opts.seed, 0);
    int total_sweeps = 0;
    for (int attempt = 0; attempt <= opts.restarts; ++attempt) {
        total_sweeps += mixing_sweeps(psi, v, opts.max_sweeps, scale);
        const Certificate cert = certify(psi, v, scale);
        const double value = (v.adjoint() * psi * v).trace().real();
        if (cert.residual < best.residual ||
            (cert.residual <= opts.tol && value > best.value)) {
            best.factor = v;
            best.value = value;
            best.residual = cert.residual;
        }
        if (cert.residual <= opts.tol) break;
        // Escape the saddle: push every row toward the negative-curvature direction.
        CMat next = random_factor(k, r, opts.seed, attempt + 1);
        if (cert.slack_min < 0.0) {
            CMat push = v;
            for (Eigen::Index i = 0; i < k; ++i) push.row(i) += 0.5 * cert.escape(i) * next.row(0);
            normalize_rows(push);
            next = attempt % 2 == 0 ? push : next;
        }
        v = next;
    }
    best.q = best.factor * best.factor.adjoint();
    best.q.diagonal().setOnes();
    best.sweeps = total_sweeps;
    if (!(best.residual <= opts.tol)) {
        std::ostringstream os;
        os << "sdp_unit_diag: residual " << best.residual << " above tolerance " << opts.tol
           << " after " << opts.restarts << " restarts";
        throw SdpError(os.str(), best);
    }
    return best;
}

}  // namespace irsssm
