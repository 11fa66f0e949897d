#pragma once

#include <optional>
#include <string>
#include <vector>

#include "irsssm/irs_opt.hpp"
#include "irsssm/precoder_opt.hpp"
#include "irsssm/rates.hpp"

namespace irsssm {

enum class IrsMethod { Bca, Admm, Sdr };
enum class PrecoderMethod { Sca, Ga };

struct Combination {
    IrsMethod irs = IrsMethod::Bca;
    PrecoderMethod precoder = PrecoderMethod::Sca;

    /// I = BCA + SCA, II = SDR + GA, III = ADMM + GA.
    static Combination named(int index);
    std::string label() const;
    bool operator==(const Combination&) const = default;
};

const char* to_string(IrsMethod m);
const char* to_string(PrecoderMethod m);

struct JointOptions {
    double epsilon = 0.01;
    int max_outer = 20;
    AnOptions an{};
    /// Analog beams for the AN projection. Defaults to those implied by p0 and
    /// stays fixed for the whole run, so the precoder step sees a fixed whitening.
    std::optional<std::vector<CVec>> fa_blocks;
    AdmmOptions admm{};
    BcaOptions bca{};
    SdrOptions sdr{};
    ScaOptions sca{};
    GaOptions ga{};
};

struct JointTraceEntry {
    int iteration = 0;
    double after_irs = 0.0;       // R_s^a after the (guarded) IRS step
    bool irs_accepted = false;    // false when the IRS step was reverted
    double after_precoder = 0.0;  // R_s^a after the precoder step
    int irs_iterations = 0;
    int precoder_iterations = 0;
    double wall_ms = 0.0;
};

struct JointResult {
    IrsPhaseVector v_star;
    HybridPrecoder p_star;
    double objective = 0.0;
    double initial_objective = 0.0;
    std::vector<JointTraceEntry> trace;
    bool converged = false;
    Combination combination{};
    std::vector<CVec> fa_blocks;
    int precoder_anomalies = 0;  // precoder steps that lowered R_s^a
};

/// Alternating IRS / precoder optimization of R_s^a. The IRS step is reverted
/// when it lowers R_s^a; the run stops once an outer iteration changes R_s^a
/// by at most epsilon.
JointResult joint_optimize(const SystemConfig& cfg, const ChannelSet& ch, const Constellation& cons,
                           const Combination& combination, const IrsPhaseVector& v0,
                           const HybridPrecoder& p0, const JointOptions& opts = {});

}  // namespace irsssm
