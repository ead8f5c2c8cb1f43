#ifndef SNAQ_SCHEDULE_H
#define SNAQ_SCHEDULE_H

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "snaq/geometry.h"
#include "snaq/params.h"

namespace snaq {

enum class OpKind { kInit, kMeasure, kCnot, kH, kShuttle, kIdle, kTInject, kSFold };
const char *op_name(OpKind k);
OpKind op_from_name(const std::string &name);

struct TimedInstruction {
    OpKind kind = OpKind::kIdle;
    std::vector<int> qubits;  // CNOT: control then target
    int64_t start_ns = 0;
    int64_t duration_ns = 0;
    // SHUTTLE: dots visited, including the starting dot when the qubit was
    // parked on the grid. hops counts the port hop when from_port/to_port.
    std::vector<Dot> path;
    int hops = 0;
    bool from_port = false;
    bool to_port = false;
    int port = -1;  // INIT/MEASURE site
    PauliType basis = PauliType::Z;
    int round = -1;       // SE round, -1 for data load/unload
    int layer = 0;        // CNOT layer 1..5
    int stabilizer = -1;  // global stabilizer index for ancilla ops

    int64_t end_ns() const { return start_ns + duration_ns; }
};

enum class QubitRole { kData, kAncilla };

struct QubitInfo {
    QubitRole role = QubitRole::kData;
    int patch = 0;
    int index = 0;  // data index inside the patch; unused for ancillas
};

enum class ScheduleMode { kNonPipelined, kPipelined, kBothEdges };
const char *mode_name(ScheduleMode m);
ScheduleMode mode_from_name(const std::string &name);

struct SyndromeSchedule {
    ScheduleMode mode = ScheduleMode::kNonPipelined;
    int rounds = 0;
    std::vector<TimedInstruction> instructions;  // sorted by start time
    std::vector<QubitInfo> qubits;
    std::vector<CodePatch> patches;
    std::vector<int> stab_offset;  // per patch, first global stabilizer index
    std::shared_ptr<const WaveAssignment> waves;  // the same assignment serves every round
    std::vector<Port> ports;
    int capacity_per_side = 0;
    // Qubits that rest on a dot for the whole schedule without being shuttled.
    std::vector<std::pair<int, Dot>> static_sites;
    std::vector<int64_t> cnot_start;  // per round
    int64_t makespan = 0;
    int64_t round_period = 0;  // steady-state SE round time
    bool memory = false;
    PauliType basis = PauliType::Z;
    bool idle_filled = false;
    TimingParams timing;

    int num_qubits() const { return (int)qubits.size(); }
    int num_stabilizers() const;
    const Stabilizer &stabilizer(int global) const;
    int patch_of_stabilizer(int global) const;
    // Global data qubit id of (patch, data index).
    int data_qubit(int patch, int index) const;
};

// Data corners visited by an ancilla, in CNOT layer order.
std::vector<Corner> corner_order(PauliType t);
// CNOT layer (1..5) used for a corner.
int corner_layer(PauliType t, Corner c);

SyndromeSchedule build_se_rounds(const std::vector<CodePatch> &patches, const WaveAssignment &waves,
                                 const TimingParams &timing, ScheduleMode mode, int rounds);
// Pipelined mode builds three rounds so the steady-state period is visible.
SyndromeSchedule build_se_round(const CodePatch &patch, const WaveAssignment &waves, const TimingParams &timing,
                                ScheduleMode mode);

SyndromeSchedule build_memory_experiment(const DotArray &array, const CodePatch &patch, int rounds, PauliType basis,
                                         const WaveAssignment &waves, const TimingParams &timing, ScheduleMode mode);

// Every data qubit of a moves round(c_route * (s + d)) rows, applies one CNOT
// layer onto its partner in b, and (unless one_way) moves back.
SyndromeSchedule build_tcnot(const CodePatch &a, const CodePatch &b, int separation_s, const TimingParams &timing,
                             bool one_way = false);

// d pipelined SE rounds over the lattice-surgery region. The array supplies
// the width check and the readout density.
SyndromeSchedule build_lattice_surgery(const DotArray &array, const CodePatch &a, const CodePatch &b,
                                       int separation_s, const TimingParams &timing);

struct ValidationReport {
    bool collision_free = true;
    bool ports_ok = true;
    bool cnot_order_ok = true;
    bool idle_ok = true;
    std::vector<std::string> errors;
    std::vector<int64_t> idle_ns;  // per qubit
    int64_t max_data_idle_per_round = 0;

    bool ok() const { return collision_free && ports_ok && cnot_order_ok && idle_ok; }
};

ValidationReport validate(const SyndromeSchedule &s);

nlohmann::json to_json(const SyndromeSchedule &s);
std::string to_gantt_csv(const SyndromeSchedule &s);

}  // namespace snaq

#endif
