#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "irsssm/config.hpp"
#include "irsssm/joint.hpp"

namespace irsssm {

enum class ExperimentKind { SrVsPower, Cdf, Convergence, SrVsElements, PositionSweep };

const char* to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& s);

/// Methods a trial can run:
///   random                    random IRS phases, equal-power precoder
///   irs_bca, irs_admm, irs_sdr IRS optimizer from the random phases, precoder fixed
///   pre_none, pre_sca, pre_ga  precoder optimizer with the IRS fixed at the BCA solution
///   comb1, comb2, comb3        joint alternation (BCA+SCA, SDR+GA, ADMM+GA)
const std::vector<std::string>& known_methods();
std::vector<std::string> default_methods(ExperimentKind k);

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::SrVsPower;
    // Grid axes; an empty axis means "the value in the system config".
    std::vector<double> power_dbm;
    std::vector<int> n_irs;
    std::vector<int> n_e;
    std::vector<double> irs_y;
    int n_channel_trials = 100;
    std::uint64_t base_seed = 1;
    std::vector<std::string> combinations;  // method list; empty selects default_methods(kind)
    std::string output_path;                // stem; writes <stem>.csv and <stem>.json
    int threads = 1;
    bool record_timing = false;  // wall_ms stays 0 unless set, keeping the CSV reproducible
    double epsilon = 0.01;
    int max_outer = 20;

    void validate() const;
};

struct GridPoint {
    double power_dbm = 0.0;
    int n_irs = 0;
    int n_e = 0;
    double irs_y = 0.0;
    bool operator==(const GridPoint&) const = default;
};

/// Cartesian product of the axes in the order power, n_irs, n_e, irs_y.
std::vector<GridPoint> expand_grid(const SystemConfig& base, const ExperimentSpec& spec);
SystemConfig config_at(const SystemConfig& base, const GridPoint& g);

struct ExperimentRecord {
    int trial = 0;
    std::uint64_t seed = 0;
    GridPoint point{};
    std::string method;
    double sr_bits = 0.0;
    int iterations = 0;
    double wall_ms = 0.0;
    double flops = 0.0;
    std::string channel_digest;
    std::string error;            // empty on success
    std::vector<double> trace;    // joint methods: R_s^a after each outer iteration
    bool operator==(const ExperimentRecord&) const = default;
};

/// Runs every method of one (grid point, trial). Failures are captured per
/// method in ExperimentRecord::error.
std::vector<ExperimentRecord> run_trial(const SystemConfig& cfg, const GridPoint& point, int trial,
                                        const ExperimentSpec& spec);

struct GroupSummary {
    GridPoint point{};
    std::string method;
    int n = 0;
    int failures = 0;
    double mean = 0.0;
    double std_error = 0.0;
    std::vector<double> quantiles;  // at summary_quantile_levels()
    double mean_iterations = 0.0;
    double mean_flops = 0.0;
    std::vector<double> mean_trace;  // joint methods, padded with the final value
    int max_outer_iterations = 0;
};

const std::vector<double>& summary_quantile_levels();

struct ExperimentResult {
    std::vector<ExperimentRecord> records;  // sorted by grid point, trial, method order
    std::vector<GroupSummary> groups;
    int failures = 0;
    /// True when more than 1% of records failed.
    bool failed() const;
};

ExperimentResult run_experiment(const SystemConfig& base, const ExperimentSpec& spec);
std::vector<GroupSummary> summarize(const std::vector<ExperimentRecord>& records,
                                    const std::vector<std::string>& methods);

void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_records_csv(std::istream& is);

std::string summary_json(const SystemConfig& base, const ExperimentSpec& spec,
                         const ExperimentResult& result);

/// Config file: a JSON object with "system" and "experiment" sections whose
/// keys match the SystemConfig and ExperimentSpec field names. Powers may be
/// given in dBm through p_total_dbm, sigma_b2_dbm and sigma_e2_dbm. Keys
/// left out keep their value in `defaults`.
struct LoadedConfig {
    SystemConfig system;
    ExperimentSpec experiment;
};

LoadedConfig parse_config(const std::string& json_text,
                          const SystemConfig& defaults = SystemConfig::desk_scale());
LoadedConfig load_config(const std::string& path,
                         const SystemConfig& defaults = SystemConfig::desk_scale());

}  // namespace irsssm
