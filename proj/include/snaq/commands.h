#ifndef SNAQ_COMMANDS_H
#define SNAQ_COMMANDS_H

#include <string>
#include <vector>

#include "snaq/config.h"

namespace snaq {

// A file a command wants written under the output directory.
struct OutputFile {
    std::string name;
    std::string content;
};

// Raised for inputs the command cannot act on (shots = 0, missing fits, ...).
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// First line of every output: "# snaqsim <command> config_hash=<hex> seed=<n>".
std::string metadata_line(const std::string &command, const ExperimentConfig &c);

// One circuit per (arch, d) at the first noise point.
std::vector<OutputFile> cmd_circuit(const ExperimentConfig &c);

// ler.csv: arch,d,rho,mode,p_g,p_sh,p_id,shots,failures,p_L,ci_low,ci_high
// sorted by (arch, d, noise).
std::vector<OutputFile> cmd_sample(const ExperimentConfig &c);

struct LerRow {
    Architecture arch = Architecture::kSnaq;
    int d = 0;
    Rational rho{1};
    NoiseParams noise;
    FitPoint point;
};
std::vector<LerRow> parse_ler_csv(const std::string &text);

// Fits the rows for (arch, rho); they must share one noise point.
FitParams cmd_fit(const std::string &ler_csv_text, Architecture arch, const Rational &rho, uint64_t seed = 1);
// fit_<arch>.json for every arch in the config, from c.ler_csv.
std::vector<OutputFile> cmd_fit(const ExperimentConfig &c);

// se_round.csv and separation.csv always; speedup.csv when c.fits is set.
std::vector<OutputFile> cmd_latency(const ExperimentConfig &c);

// distill.csv with one row per (arch, d) for d in the config distances.
std::vector<OutputFile> cmd_distill(const ExperimentConfig &c);

}  // namespace snaq

#endif
