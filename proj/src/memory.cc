#include "snaq/memory.h"

#include <algorithm>
#include <stdexcept>

#include "snaq/timing.h"

namespace snaq {

double baseline_hops_per_round(Architecture arch, int d) {
    switch (arch) {
        case Architecture::kTwoByN: return 2.0 * (d + 1);
        case Architecture::kSpinBus: return 3.0 * kSpinBusCellHops;
        case Architecture::kSnaq: break;
    }
    throw std::invalid_argument("baseline circuits exist only for 2xn and spinbus");
}

StabilizerCircuit baseline_memory_circuit(Architecture arch, int d, int rounds, PauliType basis,
                                          const NoiseParams &noise, const TimingParams &timing) {
    double hops = baseline_hops_per_round(arch, d);
    noise.validate();
    // rho = d puts every ancilla in one wave.
    DotArray a = build_array(d + 2, 2 * (d + 1), Rational(d));
    CodePatch p = embed_patch(a, d, 0);
    WaveAssignment w = assign_waves(a, p);
    SyndromeSchedule s = build_memory_experiment(a, p, rounds, basis, w, timing, ScheduleMode::kNonPipelined);
    NoiseParams gate_only;
    gate_only.p_g = noise.p_g;
    StabilizerCircuit src = lower(s, gate_only);

    double p_hop = std::min(hops / 4 * noise.p_sh, 0.75);
    double round_ns = se_round_time(arch, d, Rational(1), RoundMode::kPipelined, timing);
    double p_idle = idle_probability((int64_t)std::max(0.0, round_ns - 4.0 * timing.t_cnot), noise);

    std::vector<uint32_t> data;
    std::vector<bool> ancilla(s.num_qubits(), false);
    for (int q = 0; q < s.num_qubits(); q++) {
        if (s.qubits[q].role == QubitRole::kAncilla) {
            ancilla[q] = true;
        } else {
            data.push_back((uint32_t)q);
        }
    }

    StabilizerCircuit out;
    out.num_qubits = src.num_qubits;
    out.duration_ns = (int64_t)(rounds * round_ns);
    bool cx_since_idle = false;
    for (const CircuitOp &op : src.ops) {
        if (op.gate == Gate::kCX && p_hop > 0) {
            std::vector<uint32_t> moving;
            for (uint32_t q : op.targets) {
                if (ancilla[q]) moving.push_back(q);
            }
            if (!moving.empty()) out.append(Gate::kDepolarize1, moving, {p_hop});
        }
        if (op.gate == Gate::kCX) cx_since_idle = true;
        if ((op.gate == Gate::kM || op.gate == Gate::kMX) && cx_since_idle &&
            std::any_of(op.targets.begin(), op.targets.end(), [&](uint32_t q) { return ancilla[q]; })) {
            if (p_idle > 0) out.append(Gate::kDepolarize1, data, {p_idle});
            cx_since_idle = false;
        }
        out.ops.push_back(op);
    }
    return out;
}

StabilizerCircuit memory_circuit(const MemorySpec &spec, PauliType basis) {
    int rounds = spec.rounds > 0 ? spec.rounds : spec.d;
    if (spec.arch != Architecture::kSnaq) {
        return baseline_memory_circuit(spec.arch, spec.d, rounds, basis, spec.noise, spec.timing);
    }
    if (spec.d < 3 || spec.d % 2 == 0) throw std::invalid_argument("distance must be odd and >= 3");
    DotArray a = build_array(spec.d + 2, 2 * (spec.d + 1), spec.rho);
    CodePatch p = embed_patch(a, spec.d, 0);
    WaveAssignment w = assign_waves(a, p, spec.mode == ScheduleMode::kBothEdges);
    return lower(build_memory_experiment(a, p, rounds, basis, w, spec.timing, spec.mode), spec.noise);
}

}  // namespace snaq
