#ifndef SNAQ_CIRCUIT_H
#define SNAQ_CIRCUIT_H

#include <cstdint>
#include <string>
#include <vector>

#include "snaq/params.h"
#include "snaq/schedule.h"

namespace snaq {

enum class Gate {
    kQubitCoords,
    kR,
    kRX,
    kH,
    kCX,
    kM,
    kMX,
    kXError,
    kZError,
    kDepolarize1,
    kDepolarize2,
    kDetector,
    kObservableInclude,
    kTick,
};

const char *gate_name(Gate g);
bool is_noise(Gate g);

// DETECTOR and OBSERVABLE_INCLUDE targets are absolute measurement indices;
// the text form uses rec[-k] lookbacks.
struct CircuitOp {
    Gate gate = Gate::kTick;
    std::vector<uint32_t> targets;
    std::vector<double> args;  // probability, coordinates, or observable index

    double p() const { return args.empty() ? 0.0 : args[0]; }
    friend bool operator==(const CircuitOp &a, const CircuitOp &b) {
        return a.gate == b.gate && a.targets == b.targets && a.args == b.args;
    }
};

struct StabilizerCircuit {
    uint32_t num_qubits = 0;
    std::vector<CircuitOp> ops;
    int64_t duration_ns = 0;

    uint32_t num_measurements() const;
    uint32_t num_detectors() const;
    uint32_t num_observables() const;
    // Measurement sets of each detector, in detector order.
    std::vector<std::vector<uint32_t>> detectors() const;

    // Appends, merging with the previous op when gate and args agree.
    void append(Gate g, std::vector<uint32_t> targets, std::vector<double> args = {});
};

StabilizerCircuit lower(const SyndromeSchedule &schedule, const NoiseParams &noise);

// 1 - (1 - p_id)^(t / 1 us), or t * p_id with linear_idle.
double idle_probability(int64_t duration_ns, const NoiseParams &noise);

std::string emit_text(const StabilizerCircuit &c);
StabilizerCircuit parse_text(const std::string &text);

struct ResourceCount {
    uint32_t qubits = 0;
    uint64_t cnots = 0;
    uint64_t measurements = 0;
    int64_t duration_ns = 0;
};

ResourceCount count_resources(const StabilizerCircuit &c);

}  // namespace snaq

#endif
