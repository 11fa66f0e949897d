#pragma once

#include <cstdint>
#include <string>

#include "irsssm/model.hpp"

namespace irsssm {

/// PL0 - 10 alpha log10(d / 1 m). Throws InvalidInput for d < 1 m.
double path_loss_db(double d, double alpha, double pl0_db = -30.0);

/// Rayleigh channels with per-link variance 10^(PL/10). Entry (r, c) of every
/// link draws from its own counter stream keyed on (seed, link, r, c), so a
/// larger element or antenna count extends the same realization.
ChannelSet draw_channels(const SystemConfig& cfg, std::uint64_t seed);

/// FNV-1a over the raw bytes of every entry, as 16 hex digits.
std::string channel_digest(const ChannelSet& ch);

}  // namespace irsssm
