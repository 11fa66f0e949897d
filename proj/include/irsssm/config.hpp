#pragma once

#include <cmath>

#include "irsssm/types.hpp"

namespace irsssm {

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline double distance(const Point3& a, const Point3& b) {
    return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                     (a.z - b.z) * (a.z - b.z));
}

/// Node coordinates in meters. Defaults place the IRS next to Bob.
struct Geometry {
    Point3 alice{10.0, 0.0, 2.0};
    Point3 irs{0.0, 45.0, 2.0};
    Point3 bob{10.0, 45.0, 0.0};
    Point3 eve{10.0, 35.0, 0.0};
};

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

/// Scalar system parameters. Powers and noise variances are linear milliwatts.
struct SystemConfig {
    int n_rf = 8;
    int n_k = 4;
    int n_b = 2;
    int n_e = 2;
    int n_irs = 50;
    int m_ary = 4;
    double p_total = 1000.0;  // 30 dBm
    double beta = 0.35;
    double sigma_b2 = 1e-8;  // -80 dBm
    double sigma_e2 = 1e-8;
    Geometry geometry{};
    double alpha_ai = 2.2;
    double alpha_ab = 2.7;
    double alpha_ib = 2.5;
    double pl0_db = -30.0;

    int n_tx() const { return n_rf * n_k; }
    int n_hyp() const { return n_rf * m_ary; }
    /// Exponent scale beta * P / 4 shared by every cut-off-rate term.
    double tau() const { return beta * p_total / 4.0; }

    /// Throws InvalidInput on any violated invariant.
    void validate() const;

    static SystemConfig full_scale();
    /// N=16, N_RF=4, N_k=2, M=4; everything else as full_scale().
    static SystemConfig desk_scale();
};

}  // namespace irsssm
