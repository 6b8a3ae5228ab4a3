#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "json.hpp"

namespace blowup {

/// Bad configuration or command line; the CLI exits with status 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string construction = "qpf";  // denjoy | qpf | qpf-filled | general | sharkovsky | rees
    std::string base = "rotation";     // rotation | torus2 | odometer (general only)
    double omega = 0.0;                // 0 selects the golden mean
    double omega2 = 0.41421356237309503;
    double rho = 0.41421356237309503;
    double c = 0.25;
    double r = 1.0 / 3.0;
    long N = 40;
    std::string pinch;  // empty: one-sided, or oscillating for qpf-filled
    double theta_star = 0.3;
    double x0 = 0.1;       // denjoy basepoint
    double x_star = 0.25;  // rees atom
    long grid = 10000;     // dataset resolution
    int depth = 30;        // attractor depth
    long samples = 100000; // minimal-set sample size
    std::uint64_t seed = 1;
    std::string out = "out";
    bool verify_only = false;

    double omega_value() const;
    nlohmann::json to_json() const;
};

/// key = value lines, '#' starts a comment. Throws UsageError on unknown keys
/// or malformed values.
std::map<std::string, std::string> read_config_file(const std::string& path);
void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& kv);

/// Range checks; throws UsageError.
void validate(const RunConfig& cfg);

struct RunResult {
    nlohmann::json report;
    nlohmann::json timings;
    bool pass = false;
};

/// Builds the construction, runs its property suite and, unless verify_only,
/// writes the datasets. report.json and timings.json are always written to
/// cfg.out. Progress lines go to `log`.
RunResult run(const RunConfig& cfg, std::ostream& log);

}  // namespace blowup
