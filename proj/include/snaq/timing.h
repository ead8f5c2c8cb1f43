#ifndef SNAQ_TIMING_H
#define SNAQ_TIMING_H

#include <cstdint>
#include <string>
#include <vector>

#include "snaq/analytics.h"
#include "snaq/geometry.h"
#include "snaq/params.h"

namespace snaq {

enum class RoundMode { kNonPipelined, kPipelined, kBothEdges, kTwoColumn };

const char *round_mode_name(RoundMode m);
RoundMode round_mode_from_name(const std::string &name);

// Baseline round times are linear fits pinned to published block latencies:
// 2xN rounds take a + b d, SpinBus rounds a constant c.
struct BaselineTiming {
    double twobyn_a_ns = 0;
    double twobyn_b_ns = 0;
    double spinbus_ns = 0;

    // Solves a, b from the 12d-round 2xN blocks at d=7 and d=15, and c from
    // the 6d-round SpinBus block at d=7.
    static BaselineTiming calibrated();
};

// Ancilla waves for one SNAQ round in the given mode.
int64_t snaq_waves(int d, const Rational &rho, RoundMode mode);

// Nanoseconds. SNAQ uses the closed forms of the constructive scheduler.
double se_round_time(Architecture arch, int d, const Rational &rho, RoundMode mode,
                     const TimingParams &timing = {}, const BaselineTiming &base = BaselineTiming::calibrated());

// Merge + split: d rounds. SNAQ runs pipelined rounds over the LS region, so
// the time grows with the separation s; the baselines ignore s.
double ls_time(Architecture arch, int d, const Rational &rho, int s, const TimingParams &timing = {},
               const BaselineTiming &base = BaselineTiming::calibrated());

// Shuttle out, one CNOT layer, shuttle back; plus half a both-edges round.
double tcnot_time(int d, const Rational &rho, int s, bool include_half_se, const TimingParams &timing = {});

struct ClockRow {
    Architecture arch = Architecture::kSnaq;
    std::string op;  // "tcnot+se" or "ls"
    int d = 0;
    double time_ns = 0;
    double speedup = 0;  // this op's time over the SNAQ tCNOT+SE time
};

// One SNAQ tCNOT+SE row, one SNAQ LS row and one LS row per baseline fit.
// Propagates error-floor errors from required_distance.
std::vector<ClockRow> clock_speed_comparison(const std::vector<FitParams> &fits, double target_p_L,
                                             const TimingParams &timing = {},
                                             const BaselineTiming &base = BaselineTiming::calibrated());

}  // namespace snaq

#endif
