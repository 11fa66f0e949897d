#include "irsssm/channels.hpp"

#include <cmath>
#include <cstring>
#include <sstream>
#include <iomanip>

#include "irsssm/rng.hpp"

namespace irsssm {

namespace {

enum Link : std::uint64_t { kAliceBob = 1, kAliceEve = 2, kAliceIrs = 3, kIrsBob = 4, kIrsEve = 5 };

double link_variance(const Point3& a, const Point3& b, double alpha, double pl0_db, const char* name) {
    const double d = distance(a, b);
    if (d < 1.0) throw InvalidInput(std::string("draw_channels: ") + name + " distance below 1 m");
    return std::pow(10.0, path_loss_db(d, alpha, pl0_db) / 10.0);
}

CMat draw_link(int rows, int cols, double variance, std::uint64_t seed, Link link) {
    CMat out(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            StreamRng rng({seed, link, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(c)});
            out(r, c) = rng.complex_normal(variance);
        }
    return out;
}

}  // namespace

double path_loss_db(double d, double alpha, double pl0_db) {
    if (!(d >= 1.0)) throw InvalidInput("path_loss_db: distance must be at least 1 m");
    return pl0_db - 10.0 * alpha * std::log10(d);
}

ChannelSet draw_channels(const SystemConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const Geometry& g = cfg.geometry;
    const double v_ab = link_variance(g.alice, g.bob, cfg.alpha_ab, cfg.pl0_db, "Alice-Bob");
    const double v_ae = link_variance(g.alice, g.eve, cfg.alpha_ab, cfg.pl0_db, "Alice-Eve");
    const double v_ai = link_variance(g.alice, g.irs, cfg.alpha_ai, cfg.pl0_db, "Alice-IRS");
    const double v_ib = link_variance(g.irs, g.bob, cfg.alpha_ib, cfg.pl0_db, "IRS-Bob");
    const double v_ie = link_variance(g.irs, g.eve, cfg.alpha_ib, cfg.pl0_db, "IRS-Eve");
    ChannelSet ch;
    ch.h = draw_link(cfg.n_b, cfg.n_tx(), v_ab, seed, kAliceBob);
    ch.q = draw_link(cfg.n_e, cfg.n_tx(), v_ae, seed, kAliceEve);
    ch.f = draw_link(cfg.n_irs, cfg.n_tx(), v_ai, seed, kAliceIrs);
    ch.g = draw_link(cfg.n_b, cfg.n_irs, v_ib, seed, kIrsBob);
    ch.m = draw_link(cfg.n_e, cfg.n_irs, v_ie, seed, kIrsEve);
    return ch;
}

std::string channel_digest(const ChannelSet& ch) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const CMat& m) {
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            for (Eigen::Index r = 0; r < m.rows(); ++r) {
                const double parts[2] = {m(r, c).real(), m(r, c).imag()};
                unsigned char bytes[sizeof parts];
                std::memcpy(bytes, parts, sizeof parts);
                for (unsigned char b : bytes) {
                    h ^= b;
                    h *= 0x100000001b3ULL;
                }
            }
    };
    feed(ch.h);
    feed(ch.q);
    feed(ch.f);
    feed(ch.g);
    feed(ch.m);
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

}  // namespace irsssm
