#ifndef SNAQ_CONFIG_H
#define SNAQ_CONFIG_H

#include <cstdint>
#include <string>
#include <vector>

#include "snaq/analytics.h"
#include "snaq/decoder.h"
#include "snaq/params.h"
#include "snaq/schedule.h"

namespace snaq {

// Raised for malformed config text; what() starts with "line N: " when the
// problem is tied to a line.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
    std::vector<Architecture> archs{Architecture::kSnaq};
    std::vector<int> distances{3, 5, 7};
    Rational rho{1};
    int rounds = 0;  // 0 means d
    ScheduleMode mode = ScheduleMode::kPipelined;
    PauliType basis = PauliType::Z;  // circuit command only

    // Noise points are the cartesian product of the three lists.
    std::vector<double> p_g{1e-3};
    std::vector<double> p_sh{1e-5};
    std::vector<double> p_id{1e-4};
    bool linear_idle = false;

    TimingParams timing;

    uint64_t shots = 100000;
    uint64_t seed = 1;
    int threads = 1;
    DecoderKind decoder = DecoderKind::kUnionFind;

    // Fit and latency inputs.
    std::string ler_csv;
    std::vector<std::string> fits;
    double target = 1e-6;
    std::string distill_layout;  // empty means the shipped layout
    std::vector<int> distill_distances{7, 15};

    std::string out_dir = ".";

    std::vector<NoiseParams> noise_points() const;
    void validate() const;
};

ExperimentConfig parse_config(const std::string &text);
ExperimentConfig load_config(const std::string &path);

// Canonical text; parse_config(config_text(c)) reproduces c.
std::string config_text(const ExperimentConfig &c);
// FNV-1a of the canonical text with threads and out_dir blanked, as 16 hex
// digits.
std::string config_hash(const ExperimentConfig &c);

}  // namespace snaq

#endif
