#ifndef SNAQ_PARAMS_H
#define SNAQ_PARAMS_H

#include <cstdint>
#include <stdexcept>
#include <string>

namespace snaq {

// Latencies in nanoseconds.
struct TimingParams {
    int64_t t_exchange = 10;
    int64_t t_cnot = 200;
    int64_t t_h = 30;
    int64_t t_shuttle = 2;
    int64_t t_init = 500;
    int64_t t_meas = 500;
    // Same-direction group shuttles keep one empty dot between ancillas, so a
    // wave needs buffer_factor lane sweeps to clear the channel.
    int64_t buffer_factor = 2;
    // Multiplies tCNOT shuttle distances.
    double c_route = 1.0;

    void validate() const {
        if (t_exchange <= 0 || t_cnot <= 0 || t_h <= 0 || t_shuttle <= 0 || t_init <= 0 || t_meas <= 0 ||
            buffer_factor <= 0 || !(c_route > 0)) {
            throw std::invalid_argument("timing parameters must be strictly positive");
        }
    }

    // Five CNOT layers, two Hadamard layers and three one-hop repositionings.
    int64_t cnot_span() const { return 2 * t_h + 5 * t_cnot + 3 * t_shuttle; }
};

struct NoiseParams {
    double p_g = 0;
    double p_sh = 0;
    double p_id = 0;
    // Idle error grows as t * p_id instead of 1 - (1 - p_id)^t.
    bool linear_idle = false;

    void validate() const {
        for (double p : {p_g, p_sh, p_id}) {
            if (!(p >= 0 && p < 1)) {
                throw std::invalid_argument("noise probabilities must lie in [0, 1)");
            }
        }
    }
};

}  // namespace snaq

#endif
