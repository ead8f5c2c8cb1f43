#include "snaq/timing.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace snaq {

const char *round_mode_name(RoundMode m) {
    switch (m) {
        case RoundMode::kNonPipelined: return "non_pipelined";
        case RoundMode::kPipelined: return "pipelined";
        case RoundMode::kBothEdges: return "both_edges";
        case RoundMode::kTwoColumn: return "two_column";
    }
    return "?";
}

RoundMode round_mode_from_name(const std::string &name) {
    for (RoundMode m : {RoundMode::kNonPipelined, RoundMode::kPipelined, RoundMode::kBothEdges, RoundMode::kTwoColumn}) {
        if (name == round_mode_name(m)) return m;
    }
    throw std::invalid_argument("unknown round mode '" + name + "'");
}

BaselineTiming BaselineTiming::calibrated() {
    // Published block latencies in us and their round counts.
    const double twobyn_d7 = 156.2 / (12 * 7), twobyn_d15 = 346.3 / (12 * 15);
    const double spinbus_d7 = 109.2 / (6 * 7);
    BaselineTiming b;
    b.twobyn_b_ns = (twobyn_d15 - twobyn_d7) / 8 * 1000;
    b.twobyn_a_ns = twobyn_d7 * 1000 - 7 * b.twobyn_b_ns;
    b.spinbus_ns = spinbus_d7 * 1000;
    return b;
}

namespace {

void check(int d, const Rational &rho) {
    if (d < 3 || d % 2 == 0) throw std::invalid_argument("distance must be odd and >= 3");
    if (!(Rational(0) < rho)) throw std::invalid_argument("rho must be positive");
}

// One buffered pass of a wave over a lane of `lane` dots.
double sweep(const TimingParams &t, int lane) { return (double)t.buffer_factor * lane * t.t_shuttle; }

double serialized(const TimingParams &t, int64_t waves, int lane) {
    return waves * (t.t_init + sweep(t, lane)) + waves * (t.t_meas + sweep(t, lane)) + t.cnot_span();
}

// Measurements queue at the exit ports, so only the init stream bounds the period.
double pipelined(const TimingParams &t, int64_t waves, int lane) {
    return std::max((double)waves * t.t_init, t.cnot_span() + 2 * waves * sweep(t, lane));
}

}  // namespace

int64_t snaq_waves(int d, const Rational &rho, RoundMode mode) {
    check(d, rho);
    switch (mode) {
        case RoundMode::kNonPipelined:
        case RoundMode::kPipelined: return wave_count_for_distance(d, rho);
        // Each channel row splits in half, one half per edge.
        case RoundMode::kBothEdges: return (Rational(d + 1) / (Rational(4) * rho)).ceil();
        case RoundMode::kTwoColumn: return wave_count(2LL * (d * d - 1), rho, 2 * (d + 1));
    }
    return 0;
}

double se_round_time(Architecture arch, int d, const Rational &rho, RoundMode mode, const TimingParams &timing,
                     const BaselineTiming &base) {
    check(d, rho);
    switch (arch) {
        case Architecture::kTwoByN: return base.twobyn_a_ns + base.twobyn_b_ns * d;
        case Architecture::kSpinBus: return base.spinbus_ns;
        case Architecture::kSnaq: break;
    }
    timing.validate();
    int64_t w = snaq_waves(d, rho, mode);
    switch (mode) {
        case RoundMode::kNonPipelined:
        case RoundMode::kBothEdges: return serialized(timing, w, d + 2);
        case RoundMode::kPipelined: return pipelined(timing, w, d + 2);
        case RoundMode::kTwoColumn: return serialized(timing, w, 2 * d + 3);
    }
    return 0;
}

double ls_time(Architecture arch, int d, const Rational &rho, int s, const TimingParams &timing,
               const BaselineTiming &base) {
    if (s < 0) throw std::invalid_argument("separation must be nonnegative");
    if (arch != Architecture::kSnaq) return d * se_round_time(arch, d, rho, RoundMode::kPipelined, timing, base);
    check(d, rho);
    timing.validate();
    int64_t w = wave_count(ls_stabilizer_count(d, s), rho, ls_region_rows(d, s));
    return d * pipelined(timing, w, 2 * d + 3);
}

double tcnot_time(int d, const Rational &rho, int s, bool include_half_se, const TimingParams &timing) {
    check(d, rho);
    if (s < 0) throw std::invalid_argument("separation must be nonnegative");
    timing.validate();
    double hops = std::round(timing.c_route * (s + d));
    double t = 2 * hops * timing.t_shuttle + timing.t_cnot;
    if (include_half_se) t += 0.5 * se_round_time(Architecture::kSnaq, d, rho, RoundMode::kBothEdges, timing);
    return t;
}

std::vector<ClockRow> clock_speed_comparison(const std::vector<FitParams> &fits, double target_p_L,
                                             const TimingParams &timing, const BaselineTiming &base) {
    const FitParams *snaq = nullptr;
    for (const FitParams &f : fits) {
        if (f.arch == Architecture::kSnaq) snaq = &f;
    }
    if (!snaq) throw std::invalid_argument("clock comparison needs a SNAQ fit");
    int ds = required_distance(*snaq, target_p_L);
    double ref = tcnot_time(ds, snaq->rho, 0, true, timing);

    std::vector<ClockRow> rows;
    rows.push_back({Architecture::kSnaq, "tcnot+se", ds, ref, 1.0});
    double ls = ls_time(Architecture::kSnaq, ds, snaq->rho, 0, timing, base);
    rows.push_back({Architecture::kSnaq, "ls", ds, ls, ls / ref});
    for (const FitParams &f : fits) {
        if (f.arch == Architecture::kSnaq) continue;
        int d = required_distance(f, target_p_L);
        double t = ls_time(f.arch, d, f.rho, 0, timing, base);
        rows.push_back({f.arch, "ls", d, t, t / ref});
    }
    return rows;
}

}  // namespace snaq
