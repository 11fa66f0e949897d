#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "irsssm/experiment.hpp"

namespace irsssm {

namespace {

using nlohmann::json;

constexpr const char* kCsvHeader =
    "trial,seed,power_dbm,n_irs,n_e,irs_y,method,sr_bits,iterations,wall_ms,flops,channel_digest,error,trace";

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

// Splits one CSV line, honouring double-quoted fields.
std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out(1);
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                out.back() += '"';
                ++i;
            } else if (c == '"') {
                in_quotes = false;
            } else {
                out.back() += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            out.emplace_back();
        } else {
            out.back() += c;
        }
    }
    return out;
}

double to_double(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw InvalidInput("read_records_csv: bad number '" + s + "'");
    return v;
}

// One logical record; a quoted field may span physical lines.
bool read_record(std::istream& is, std::string& rec) {
    if (!std::getline(is, rec)) return false;
    std::string more;
    while (std::count(rec.begin(), rec.end(), '"') % 2 == 1 && std::getline(is, more)) rec += '\n' + more;
    return true;
}

}  // namespace

void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& records) {
    os << kCsvHeader << '\n';
    for (const auto& r : records) {
        std::string trace;
        for (std::size_t i = 0; i < r.trace.size(); ++i) {
            if (i) trace += ';';
            trace += fmt(r.trace[i]);
        }
        os << r.trial << ',' << r.seed << ',' << fmt(r.point.power_dbm) << ',' << r.point.n_irs << ','
           << r.point.n_e << ',' << fmt(r.point.irs_y) << ',' << quote(r.method) << ',' << fmt(r.sr_bits)
           << ',' << r.iterations << ',' << fmt(r.wall_ms) << ',' << fmt(r.flops) << ','
           << r.channel_digest << ',' << quote(r.error) << ',' << trace << '\n';
    }
}

std::vector<ExperimentRecord> read_records_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kCsvHeader)
        throw InvalidInput("read_records_csv: missing or unexpected header");
    std::vector<ExperimentRecord> out;
    while (read_record(is, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 14) throw InvalidInput("read_records_csv: expected 14 fields: " + line);
        ExperimentRecord r;
        r.trial = std::stoi(f[0]);
        r.seed = std::stoull(f[1]);
        r.point.power_dbm = to_double(f[2]);
        r.point.n_irs = std::stoi(f[3]);
        r.point.n_e = std::stoi(f[4]);
        r.point.irs_y = to_double(f[5]);
        r.method = f[6];
        r.sr_bits = to_double(f[7]);
        r.iterations = std::stoi(f[8]);
        r.wall_ms = to_double(f[9]);
        r.flops = to_double(f[10]);
        r.channel_digest = f[11];
        r.error = f[12];
        std::stringstream ts(f[13]);
        std::string item;
        while (std::getline(ts, item, ';'))
            if (!item.empty()) r.trace.push_back(to_double(item));
        out.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json point_json(const Point3& p) { return {{"x", p.x}, {"y", p.y}, {"z", p.z}}; }

json system_json(const SystemConfig& c) {
    return {{"n_rf", c.n_rf},
            {"n_k", c.n_k},
            {"n_b", c.n_b},
            {"n_e", c.n_e},
            {"n_irs", c.n_irs},
            {"m_ary", c.m_ary},
            {"p_total", c.p_total},
            {"beta", c.beta},
            {"sigma_b2", c.sigma_b2},
            {"sigma_e2", c.sigma_e2},
            {"geometry",
             {{"alice", point_json(c.geometry.alice)},
              {"irs", point_json(c.geometry.irs)},
              {"bob", point_json(c.geometry.bob)},
              {"eve", point_json(c.geometry.eve)}}},
            {"alpha_ai", c.alpha_ai},
            {"alpha_ab", c.alpha_ab},
            {"alpha_ib", c.alpha_ib},
            {"pl0_db", c.pl0_db}};
}

json experiment_json(const ExperimentSpec& s) {
    return {{"kind", to_string(s.kind)},
            {"power_dbm", s.power_dbm},
            {"n_irs", s.n_irs},
            {"n_e", s.n_e},
            {"irs_y", s.irs_y},
            {"n_channel_trials", s.n_channel_trials},
            {"base_seed", s.base_seed},
            {"combinations", s.combinations.empty() ? default_methods(s.kind) : s.combinations},
            {"output_path", s.output_path},
            {"epsilon", s.epsilon},
            {"max_outer", s.max_outer}};
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const char* section) {
    if (!obj.is_object()) throw InvalidInput(std::string("config: section '") + section + "' must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw InvalidInput(std::string("config: unknown key '") + it.key() + "' in " + section);
    }
}

Point3 read_point(const json& j, const char* name) {
    check_keys(j, {"x", "y", "z"}, name);
    Point3 p;
    p.x = j.value("x", 0.0);
    p.y = j.value("y", 0.0);
    p.z = j.value("z", 0.0);
    return p;
}

template <class T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void read_power(const json& j, const char* key, const char* dbm_key, double& out) {
    if (j.contains(key) && j.contains(dbm_key))
        throw InvalidInput(std::string("config: give either ") + key + " or " + dbm_key + ", not both");
    if (j.contains(key)) out = j.at(key).get<double>();
    if (j.contains(dbm_key)) out = dbm_to_mw(j.at(dbm_key).get<double>());
}

}  // namespace

std::string summary_json(const SystemConfig& base, const ExperimentSpec& spec,
                         const ExperimentResult& result) {
    json groups = json::array();
    for (const auto& g : result.groups) {
        json q = json::object();
        for (std::size_t i = 0; i < g.quantiles.size(); ++i)
            q[fmt(summary_quantile_levels()[i])] = g.quantiles[i];
        json entry = {{"power_dbm", g.point.power_dbm},
                      {"n_irs", g.point.n_irs},
                      {"n_e", g.point.n_e},
                      {"irs_y", g.point.irs_y},
                      {"method", g.method},
                      {"n", g.n},
                      {"failures", g.failures},
                      {"mean_sr_bits", g.mean},
                      {"std_error", g.std_error},
                      {"quantiles", q},
                      {"mean_iterations", g.mean_iterations},
                      {"mean_flops", g.mean_flops}};
        if (!g.mean_trace.empty()) {
            entry["mean_trace"] = g.mean_trace;
            entry["max_outer_iterations"] = g.max_outer_iterations;
        }
        groups.push_back(std::move(entry));
    }
    const json doc = {{"system", system_json(base)},
                      {"experiment", experiment_json(spec)},
                      {"records", result.records.size()},
                      {"failures", result.failures},
                      {"groups", groups}};
    return doc.dump(2) + "\n";
}

LoadedConfig parse_config(const std::string& text, const SystemConfig& defaults) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("config: ") + e.what());
    }
    check_keys(doc, {"system", "experiment"}, "top level");
    LoadedConfig out;
    out.system = defaults;
    try {
        if (doc.contains("system")) {
            const json& s = doc.at("system");
            check_keys(s, {"n_rf", "n_k", "n_b", "n_e", "n_irs", "m_ary", "p_total", "p_total_dbm", "beta",
                           "sigma_b2", "sigma_b2_dbm", "sigma_e2", "sigma_e2_dbm", "geometry", "alpha_ai",
                           "alpha_ab", "alpha_ib", "pl0_db"},
                       "system");
            SystemConfig& c = out.system;
            read(s, "n_rf", c.n_rf);
            read(s, "n_k", c.n_k);
            read(s, "n_b", c.n_b);
            read(s, "n_e", c.n_e);
            read(s, "n_irs", c.n_irs);
            read(s, "m_ary", c.m_ary);
            read_power(s, "p_total", "p_total_dbm", c.p_total);
            read(s, "beta", c.beta);
            read_power(s, "sigma_b2", "sigma_b2_dbm", c.sigma_b2);
            read_power(s, "sigma_e2", "sigma_e2_dbm", c.sigma_e2);
            read(s, "alpha_ai", c.alpha_ai);
            read(s, "alpha_ab", c.alpha_ab);
            read(s, "alpha_ib", c.alpha_ib);
            read(s, "pl0_db", c.pl0_db);
            if (s.contains("geometry")) {
                const json& g = s.at("geometry");
                check_keys(g, {"alice", "irs", "bob", "eve"}, "geometry");
                if (g.contains("alice")) c.geometry.alice = read_point(g.at("alice"), "alice");
                if (g.contains("irs")) c.geometry.irs = read_point(g.at("irs"), "irs");
                if (g.contains("bob")) c.geometry.bob = read_point(g.at("bob"), "bob");
                if (g.contains("eve")) c.geometry.eve = read_point(g.at("eve"), "eve");
            }
        }
        if (doc.contains("experiment")) {
            const json& e = doc.at("experiment");
            check_keys(e, {"kind", "power_dbm", "n_irs", "n_e", "irs_y", "n_channel_trials", "base_seed",
                           "combinations", "output_path", "threads", "record_timing", "epsilon", "max_outer"},
                       "experiment");
            ExperimentSpec& x = out.experiment;
            if (e.contains("kind")) x.kind = parse_experiment_kind(e.at("kind").get<std::string>());
            read(e, "power_dbm", x.power_dbm);
            read(e, "n_irs", x.n_irs);
            read(e, "n_e", x.n_e);
            read(e, "irs_y", x.irs_y);
            read(e, "n_channel_trials", x.n_channel_trials);
            read(e, "base_seed", x.base_seed);
            read(e, "combinations", x.combinations);
            read(e, "output_path", x.output_path);
            read(e, "threads", x.threads);
            read(e, "record_timing", x.record_timing);
            read(e, "epsilon", x.epsilon);
            read(e, "max_outer", x.max_outer);
        }
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("config: ") + e.what());
    }
    out.system.validate();
    out.experiment.validate();
    return out;
}

LoadedConfig load_config(const std::string& path, const SystemConfig& defaults) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), defaults);
}

}  // namespace irsssm
