#include "irsssm/config.hpp"

#include <string>

namespace irsssm {

namespace {

bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidInput("SystemConfig: " + what);
}

}  // namespace

void SystemConfig::validate() const {
    require(n_rf >= 1, "n_rf must be >= 1");
    require(n_k >= 1, "n_k must be >= 1");
    require(n_b >= 1, "n_b must be >= 1");
    require(n_e >= 1, "n_e must be >= 1");
    require(n_irs >= 1, "n_irs must be >= 1");
    require(m_ary >= 2 && is_power_of_two(m_ary), "m_ary must be a power of two >= 2");
    require(beta > 0.0 && beta <= 1.0, "beta must lie in (0, 1]");
    require(p_total > 0.0 && std::isfinite(p_total), "p_total must be positive");
    require(sigma_b2 > 0.0 && sigma_e2 > 0.0, "noise variances must be positive");
}

SystemConfig SystemConfig::full_scale() { return SystemConfig{}; }

SystemConfig SystemConfig::desk_scale() {
    SystemConfig cfg;
    cfg.n_rf = 4;
    cfg.n_k = 2;
    cfg.n_irs = 16;
    return cfg;
}

}  // namespace irsssm
