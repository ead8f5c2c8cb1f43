#ifndef SNAQ_ENGINE_H
#define SNAQ_ENGINE_H

#include <cstdint>
#include <string>
#include <vector>

#include "snaq/circuit.h"

namespace snaq {

struct FrameSampler {
    std::vector<CircuitOp> program;  // gates and noise only
    uint32_t num_qubits = 0;
    uint32_t num_measurements = 0;
    uint32_t num_detectors = 0;
    uint32_t num_observables = 0;
    std::vector<std::vector<uint32_t>> detectors;    // measurement sets
    std::vector<std::vector<uint32_t>> observables;  // measurement sets
};

FrameSampler compile(const StabilizerCircuit &c);

// Shot-major bit matrix: row s holds detectors (or observables) of shot s in
// little-endian 64-bit words.
struct DetectorSamples {
    uint64_t shots = 0;
    uint32_t num_detectors = 0;
    uint32_t num_observables = 0;
    size_t det_words = 0;
    size_t obs_words = 0;
    std::vector<uint64_t> det;
    std::vector<uint64_t> obs;

    bool detector(uint64_t shot, uint32_t d) const { return (det[shot * det_words + d / 64] >> (d % 64)) & 1; }
    bool observable(uint64_t shot, uint32_t k) const { return (obs[shot * obs_words + k / 64] >> (k % 64)) & 1; }
    const uint64_t *det_row(uint64_t shot) const { return det.data() + shot * det_words; }
    uint64_t obs_mask(uint64_t shot) const { return obs_words ? obs[shot * obs_words] : 0; }
};

// Shots are processed in fixed shards with seeds derived from (seed, shard),
// so the output does not depend on the thread count.
DetectorSamples sample(const FrameSampler &s, uint64_t shots, uint64_t seed, int threads = 1);

struct DemPart {
    std::vector<uint32_t> detectors;
    uint64_t observables = 0;
};

struct DemMechanism {
    double p = 0;
    std::vector<uint32_t> detectors;  // sorted
    uint64_t observables = 0;         // bit mask
    // Suggested split into the X-part and Z-part signatures when the dominant
    // contributing fault has both; empty otherwise.
    std::vector<DemPart> parts;
};

struct DetectorErrorModel {
    uint32_t num_detectors = 0;
    uint32_t num_observables = 0;
    std::vector<DemMechanism> mechanisms;
    std::vector<std::vector<double>> coords;  // per detector, may be empty
};

DetectorErrorModel extract_dem(const StabilizerCircuit &c);
// Independent per-component probability equivalent to DEPOLARIZE1(p) / DEPOLARIZE2(p).
double depolarize1_component(double p);
double depolarize2_component(double p);
// XOR-combination of two independent mechanisms with equal signatures.
double xor_combine(double a, double b);

// Samples mechanisms directly; used to cross-check the circuit sampler.
DetectorSamples sample_dem(const DetectorErrorModel &dem, uint64_t shots, uint64_t seed);

std::string dem_text(const DetectorErrorModel &dem);
// Dense bit-packed export, shot-major, little-endian words; detectors then observables.
std::string samples_to_packed(const DetectorSamples &s);
std::string samples_to_01(const DetectorSamples &s);

// SplitMix64 step used to derive independent stream seeds.
uint64_t derive_seed(uint64_t seed, uint64_t stream);

}  // namespace snaq

#endif
