#ifndef SNAQ_DECODER_H
#define SNAQ_DECODER_H

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "snaq/engine.h"

namespace snaq {

// v == DecodingGraph::boundary() marks a boundary edge.
struct GraphEdge {
    uint32_t u = 0;
    uint32_t v = 0;
    double p = 0;
    double weight = 0;  // ln((1 - p) / p), clamped at 0
    uint64_t observables = 0;
    std::vector<uint32_t> mechanisms;  // DEM indices that contribute
};

struct DecodingGraph {
    uint32_t num_detectors = 0;
    uint32_t num_observables = 0;
    std::vector<GraphEdge> edges;
    std::vector<std::vector<uint32_t>> adjacency;  // node -> incident edge ids, boundary last

    uint32_t boundary() const { return num_detectors; }
    uint32_t num_nodes() const { return num_detectors + 1; }
    // Edge id joining u and v, or -1.
    int64_t find_edge(uint32_t u, uint32_t v) const;
};

// Mechanisms with more than two detectors are split into edges already present
// in the model; a mechanism that cannot be split this way is an error.
DecodingGraph build_graph(const DetectorErrorModel &dem);

double edge_weight(double p);

enum class DecoderKind { kUnionFind, kMatching };

const char *decoder_name(DecoderKind k);
DecoderKind decoder_from_name(const std::string &name);

// Per-call scratch lives in the decoder object; one instance per thread.
class Decoder {
  public:
    virtual ~Decoder() = default;
    // Fired detector ids in, predicted observable mask out.
    virtual uint64_t decode(const std::vector<uint32_t> &defects) = 0;
};

std::unique_ptr<Decoder> make_decoder(const DecodingGraph &g, DecoderKind kind);

// Dense syndrome convenience wrapper.
uint64_t decode(const DecodingGraph &g, const std::vector<uint8_t> &syndrome,
                DecoderKind kind = DecoderKind::kUnionFind);

// Predicted observable masks, one per shot.
std::vector<uint64_t> decode_batch(const DecodingGraph &g, const DetectorSamples &samples, DecoderKind kind,
                                   int threads = 1);

struct Interval {
    double low = 0;
    double high = 0;
};

// Wilson score interval at 95%.
Interval wilson_interval(uint64_t failures, uint64_t shots, double z = 1.959963984540054);

struct BasisEstimate {
    uint64_t shots = 0;
    uint64_t failures = 0;
    double p = 0;
    Interval ci;
};

struct LerEstimate {
    uint64_t shots = 0;     // summed over both bases
    uint64_t failures = 0;  // summed over both bases
    double p_L = 0;         // 1 - (1 - p_X)(1 - p_Z)
    Interval ci;
    BasisEstimate x;
    BasisEstimate z;
};

double combine_bases(double p_x, double p_z);

struct LerOptions {
    DecoderKind decoder = DecoderKind::kUnionFind;
    int threads = 1;
};

BasisEstimate estimate_basis(const StabilizerCircuit &c, uint64_t shots, uint64_t seed, const LerOptions &opt = {});
LerEstimate estimate_ler(const StabilizerCircuit &circuit_x, const StabilizerCircuit &circuit_z, uint64_t shots,
                         uint64_t seed, const LerOptions &opt = {});

nlohmann::json to_json(const LerEstimate &e);

}  // namespace snaq

#endif
