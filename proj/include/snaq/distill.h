#ifndef SNAQ_DISTILL_H
#define SNAQ_DISTILL_H

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "snaq/analytics.h"
#include "snaq/geometry.h"
#include "snaq/params.h"

namespace snaq {

struct DistillLayout {
    // Per logical qubit: (column, row) in the patch grid.
    std::vector<std::pair<int, int>> slots;
    // Per tCNOT layer: (control, target) pairs.
    std::vector<std::vector<std::pair<int, int>>> layers;
    int se_rounds = 0;
};

DistillLayout parse_distill_layout(const std::string &text);
DistillLayout load_distill_layout(const std::string &path);
// The layout shipped in the data directory.
const DistillLayout &default_distill_layout();

struct DistillPhase {
    std::string name;
    double ns = 0;
};

struct DistillationPlan {
    Architecture arch = Architecture::kSnaq;
    int d = 0;
    Rational rho{1};
    int patches = 0;
    int tcnot_layers = 0;
    int se_rounds = 0;
    double time_ns = 0;
    int64_t physical_qubits = 0;
    double volume = 0;  // qubit * s
    std::vector<DistillPhase> phases;
};

// Hops a patch travels to overlay its partner: d per row step, d + 1 per
// column step.
int distill_hops(const DistillLayout &l, int a, int b, int d);

DistillationPlan estimate_15to1(Architecture arch, int d, const Rational &rho, const TimingParams &timing = {},
                                const DistillLayout &layout = default_distill_layout());

// 1 - V_snaq / V_baseline
double volume_reduction(const DistillationPlan &snaq, const DistillationPlan &baseline);

nlohmann::json to_json(const DistillationPlan &p);

}  // namespace snaq

#endif
