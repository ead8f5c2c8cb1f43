#ifndef SNAQ_MEMORY_H
#define SNAQ_MEMORY_H

#include "snaq/analytics.h"
#include "snaq/circuit.h"
#include "snaq/params.h"

namespace snaq {

// Shuttle hops an ancilla makes per SE round. 2xN walks the moving rail across
// two data columns (2(d+1)); SpinBus tours the four cells around its plaquette,
// crossing three cell sides (3 x 50), with init and readout at the end cells.
double baseline_hops_per_round(Architecture arch, int d);

// Memory experiment for a baseline architecture. The circuit is a standard
// single-wave surface code round with gate noise; each CNOT is preceded by a
// quarter of the round's shuttle error on the ancilla, and data qubits idle
// for the round time less four CNOTs.
StabilizerCircuit baseline_memory_circuit(Architecture arch, int d, int rounds, PauliType basis,
                                          const NoiseParams &noise, const TimingParams &timing = {});

struct MemorySpec {
    Architecture arch = Architecture::kSnaq;
    int d = 3;
    int rounds = 0;  // 0 means d
    Rational rho{1};
    NoiseParams noise;
    TimingParams timing;
    ScheduleMode mode = ScheduleMode::kPipelined;  // SNAQ only
};

// SNAQ: dot-level schedule lowered to a circuit; baselines as above.
StabilizerCircuit memory_circuit(const MemorySpec &spec, PauliType basis);

}  // namespace snaq

#endif
