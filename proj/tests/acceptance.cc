// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. Pass criterion numbers as arguments to run a
// subset.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "snaq/analytics.h"
#include "snaq/decoder.h"
#include "snaq/distill.h"
#include "snaq/engine.h"
#include "snaq/geometry.h"
#include "snaq/memory.h"
#include "snaq/timing.h"

using namespace snaq;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

int g_threads = 1;

std::string fmt(const char *f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char *f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

MemorySpec memory(Architecture arch, int d, Rational rho, NoiseParams noise) {
    MemorySpec s;
    s.arch = arch;
    s.d = d;
    s.rho = rho;
    s.noise = noise;
    return s;
}

LerEstimate run(const MemorySpec &s, uint64_t shots, uint64_t seed) {
    LerOptions opt;
    opt.threads = g_threads;
    return estimate_ler(memory_circuit(s, PauliType::X), memory_circuit(s, PauliType::Z), shots, seed, opt);
}

// ceil((d^2 - 1) / (2 rho (d + 1))) with rho = p / q, in 128-bit integers.
int64_t wave_oracle(int64_t d, int64_t p, int64_t q) {
    __int128 num = (__int128)(d * d - 1) * q;
    __int128 den = (__int128)2 * p * (d + 1);
    return (int64_t)((num + den - 1) / den);
}

Outcome wave_table() {
    Outcome o;
    const std::pair<int64_t, int64_t> rhos[] = {{1, 2}, {1, 1}, {3, 2}, {2, 1}, {3, 1}, {4, 1}};
    int cells = 0;
    for (int d = 3; d <= 31; d += 2) {
        for (auto [p, q] : rhos) {
            Rational rho(p, q);
            DotArray a = build_array(d + 2, 2 * (d + 1), rho);
            WaveAssignment w = assign_waves(a, embed_patch(a, d, 0));
            int64_t want = wave_oracle(d, p, q);
            cells++;
            if (w.n_waves != want) {
                o.pass = false;
                o.detail = fmt("d=%d rho=%s: %d waves, oracle %lld", d, rho.str().c_str(), w.n_waves, (long long)want);
                return o;
            }
        }
    }
    o.detail = fmt("%d cells match", cells);
    return o;
}

// Smallest undetectable logical fault set of size <= 3, or 0 if none.
int min_logical_weight(const DetectorErrorModel &dem) {
    std::map<std::vector<uint32_t>, std::set<uint64_t>> by_dets;
    for (const DemMechanism &m : dem.mechanisms) {
        if (m.detectors.empty() && m.observables) return 1;
        by_dets[m.detectors].insert(m.observables);
    }
    // Two mechanisms cancel on detectors exactly when their detector sets agree.
    for (const auto &[dets, obs] : by_dets) {
        if (obs.size() > 1) return 2;
    }
    std::vector<std::pair<const std::vector<uint32_t> *, uint64_t>> ms;
    for (const auto &[dets, obs] : by_dets) ms.push_back({&dets, *obs.begin()});
    for (size_t i = 0; i < ms.size(); i++) {
        for (size_t j = i + 1; j < ms.size(); j++) {
            std::vector<uint32_t> x;
            std::set_symmetric_difference(ms[i].first->begin(), ms[i].first->end(), ms[j].first->begin(),
                                          ms[j].first->end(), std::back_inserter(x));
            auto it = by_dets.find(x);
            if (it == by_dets.end()) continue;
            for (uint64_t o : it->second) {
                if (ms[i].second ^ ms[j].second ^ o) return 3;
            }
        }
    }
    return 0;
}

Outcome distance_oracle() {
    Outcome o;
    NoiseParams noise{1e-3, 1e-5, 1e-4};
    std::ostringstream out;
    for (Architecture arch : {Architecture::kSnaq, Architecture::kTwoByN, Architecture::kSpinBus}) {
        for (int d : {3, 5}) {
            for (PauliType b : {PauliType::X, PauliType::Z}) {
                DetectorErrorModel dem = extract_dem(memory_circuit(memory(arch, d, Rational(1), noise), b));
                int w = min_logical_weight(dem);
                bool ok = d == 3 ? w != 1 : (w == 0 || w > 2);
                if (!ok) o.pass = false;
                if (arch == Architecture::kSnaq && d == 3 && b == PauliType::Z) {
                    out << "snaq d=3 min weight " << w << ", ";
                }
                if (!ok) out << arch_name(arch) << " d=" << d << " " << pauli_name(b) << " weight " << w << "; ";
            }
        }
    }
    o.detail = out.str() + (o.pass ? "no low-weight logical in 12 models" : "");
    return o;
}

Outcome noiseless() {
    Outcome o;
    uint64_t events = 0;
    for (Architecture arch : {Architecture::kSnaq, Architecture::kTwoByN, Architecture::kSpinBus}) {
        for (int d : {3, 5, 7}) {
            for (PauliType b : {PauliType::X, PauliType::Z}) {
                StabilizerCircuit c = memory_circuit(memory(arch, d, Rational(1), {}), b);
                DetectorSamples s = sample(compile(c), 10000, 7, g_threads);
                for (uint64_t w : s.det) events += __builtin_popcountll(w);
                for (uint64_t w : s.obs) events += __builtin_popcountll(w);
            }
        }
    }
    o.pass = events == 0;
    o.detail = fmt("%llu detector/observable flips over 18 circuits x 10^4 shots", (unsigned long long)events);
    return o;
}

Outcome slope() {
    Outcome o;
    const double ps[] = {3e-3, 1e-3, 3e-4};
    std::ostringstream out;
    for (int d : {3, 5}) {
        std::vector<double> x, y;
        for (double p : ps) {
            uint64_t shots = d == 3 ? 200000 : (p < 5e-4 ? 2000000 : 500000);
            LerEstimate e = run(memory(Architecture::kSnaq, d, Rational(1), {p, 0, 0}), shots, 11 + d);
            if (e.failures == 0) {
                o.pass = false;
                out << "d=" << d << " p_g=" << p << " saw no failures; ";
                continue;
            }
            x.push_back(std::log(p));
            y.push_back(std::log(e.p_L));
        }
        if (x.size() < 2) continue;
        double mx = 0, my = 0;
        for (size_t i = 0; i < x.size(); i++) mx += x[i] / x.size(), my += y[i] / x.size();
        double sxy = 0, sxx = 0;
        for (size_t i = 0; i < x.size(); i++) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
        double k = sxy / sxx, want = (d + 1) / 2.0;
        if (std::abs(k - want) > 0.5) o.pass = false;
        out << fmt("d=%d slope %.2f (want %.1f) ", d, k, want);
    }
    o.detail = out.str();
    return o;
}

bool overlap(const Interval &a, const Interval &b) { return a.low <= b.high && b.low <= a.high; }

Outcome serialization() {
    Outcome o;
    NoiseParams noise{0, 0, 1e-2};
    const uint64_t shots = 1000000;
    LerEstimate r1 = run(memory(Architecture::kSnaq, 7, Rational(1), noise), shots, 51);
    LerEstimate r2 = run(memory(Architecture::kSnaq, 7, Rational(2), noise), shots, 52);
    LerEstimate r52 = run(memory(Architecture::kSnaq, 7, Rational(5, 2), noise), shots, 53);
    double factor = r1.p_L / r2.p_L;
    bool separated = r2.ci.high < r1.ci.low;
    bool same_waves = wave_count_for_distance(7, Rational(2)) == wave_count_for_distance(7, Rational(5, 2));
    bool plateau = same_waves && overlap(r2.ci, r52.ci);
    o.pass = factor >= 3 && separated && plateau;
    o.detail = fmt("rho=1 %.3g [%.3g, %.3g], rho=2 %.3g [%.3g, %.3g], factor %.1f; rho=5/2 %.3g [%.3g, %.3g] %s",
                   r1.p_L, r1.ci.low, r1.ci.high, r2.p_L, r2.ci.low, r2.ci.high, factor, r52.p_L, r52.ci.low,
                   r52.ci.high, plateau ? "overlaps rho=2" : "does not overlap rho=2");
    return o;
}

bool within(double got, double want, double rel) { return std::abs(got - want) <= rel * want; }

Outcome timing_anchors() {
    Outcome o;
    TimingParams t;
    BaselineTiming b = BaselineTiming::calibrated();
    double twobyn = ls_time(Architecture::kTwoByN, 11, Rational(1), 0, t, b) / 1000;
    double spinbus = ls_time(Architecture::kSpinBus, 11, Rational(1), 0, t, b) / 1000;
    double ls = ls_time(Architecture::kSnaq, 11, Rational(1), 0, t, b) / 1000;
    double tc = tcnot_time(11, Rational(1), 0, true, t) / 1000;
    o.pass = within(twobyn, 20.8, 0.02) && within(spinbus, 28.6, 0.02) && within(ls, 55.6, 0.10) &&
             within(tc, 2.5, 0.10);
    o.detail = fmt("2xN LS %.2f us, SpinBus LS %.2f us, SNAQ LS %.2f us, SNAQ tCNOT+SE/2 %.3f us", twobyn, spinbus, ls,
                   tc);
    return o;
}

Outcome se_bound() {
    Outcome o;
    double worst = 0;
    int worst_d = 0;
    for (int d = 3; d <= 21; d += 2) {
        double t = se_round_time(Architecture::kSnaq, d, Rational(2), RoundMode::kNonPipelined);
        if (t > worst) worst = t, worst_d = d;
    }
    o.pass = worst < 10000;
    o.detail = fmt("max %.2f us at d=%d", worst / 1000, worst_d);
    return o;
}

Outcome distillation() {
    Outcome o;
    struct Cell {
        Architecture arch;
        int d;
        double us, vol, tol;
    };
    const Cell cells[] = {{Architecture::kTwoByN, 7, 156.2, 0.152, 0.02},  {Architecture::kTwoByN, 15, 346.3, 1.555, 0.02},
                          {Architecture::kSpinBus, 7, 109.2, 0.159, 0.02}, {Architecture::kSpinBus, 15, 234.0, 1.576, 0.02},
                          {Architecture::kSnaq, 7, 40.6, 0.063, 0.10},     {Architecture::kSnaq, 15, 91.5, 0.658, 0.10}};
    std::ostringstream out;
    for (const Cell &c : cells) {
        DistillationPlan p = estimate_15to1(c.arch, c.d, Rational(1));
        double identity = p.patches * (2.0 * c.d * c.d - 1) * p.time_ns * 1e-9;
        bool ok = within(p.time_ns / 1000, c.us, c.tol) && within(p.volume, c.vol, c.tol) &&
                  within(p.volume, identity, 0.01);
        if (!ok) o.pass = false;
        out << fmt("%s d=%d %.1f us %.3f; ", arch_name(c.arch), c.d, p.time_ns / 1000, p.volume);
    }
    o.detail = out.str();
    return o;
}

Outcome volume_reductions() {
    Outcome o;
    std::ostringstream out;
    for (int d : {7, 15}) {
        double lo = d == 7 ? 0.58 : 0.57, hi = d == 7 ? 0.60 : 0.58;
        DistillationPlan s = estimate_15to1(Architecture::kSnaq, d, Rational(1));
        for (Architecture b : {Architecture::kTwoByN, Architecture::kSpinBus}) {
            double r = volume_reduction(s, estimate_15to1(b, d, Rational(1)));
            if (r < lo - 0.03 || r > hi + 0.03) o.pass = false;
            out << fmt("d=%d vs %s %.1f%%; ", d, arch_name(b), 100 * r);
        }
    }
    o.detail = out.str();
    return o;
}

Outcome fit_inversion() {
    Outcome o;
    FitParams truth;
    truth.arch = Architecture::kSnaq;
    truth.rho = Rational(2);
    truth.A = 0.08;
    truth.alpha = 0.04;
    truth.beta = 0.003;
    truth.gamma = 0.012;
    std::vector<FitPoint> pts;
    for (int d : {3, 5, 7, 9, 11}) pts.push_back({d, extrapolate(truth, d), 0, 0});
    FitParams f = fit_scaling(pts, truth.rho, truth.arch);
    double worst = 0;
    for (auto [got, want] : {std::pair{f.A, truth.A}, {f.alpha, truth.alpha}, {f.beta, truth.beta},
                             {f.gamma, truth.gamma}}) {
        worst = std::max(worst, std::abs(got - want) / want);
    }
    o.pass = worst < 1e-3;
    o.detail = fmt("max relative parameter error %.2e", worst);
    return o;
}

Outcome speedup() {
    Outcome o;
    NoiseParams noise{1e-3, 1e-5, 1e-4};
    const uint64_t shots = 2000000;
    auto fit = [&](Architecture arch, Rational rho, uint64_t seed) {
        std::vector<FitPoint> pts;
        for (int d : {3, 5, 7}) {
            LerEstimate e = run(memory(arch, d, rho, noise), shots, seed + d);
            pts.push_back({d, e.p_L, e.ci.low, e.ci.high});
        }
        return fit_scaling(pts, rho, arch);
    };
    FitParams twobyn = fit(Architecture::kTwoByN, Rational(1), 100);
    FitParams spinbus = fit(Architecture::kSpinBus, Rational(1), 200);
    std::ostringstream out;
    for (Rational rho : {Rational(1), Rational(2)}) {
        FitParams snaq = fit(Architecture::kSnaq, rho, 300 + 10 * rho.num);
        std::vector<ClockRow> rows = clock_speed_comparison({snaq, twobyn, spinbus}, 1e-6);
        out << "rho=" << rho.str() << ": d*=" << rows[0].d;
        for (const ClockRow &r : rows) {
            if (r.arch == Architecture::kSnaq) continue;
            if (r.speedup <= 4) o.pass = false;
            out << fmt(" %s %.2fx (d*=%d)", arch_name(r.arch), r.speedup, r.d);
            if (rho == Rational(1)) {
                double pub = r.arch == Architecture::kTwoByN ? 7.5 : 10.6;
                bool near = within(r.speedup, pub, 0.30);
                if (!near) o.pass = false;
                out << fmt(" [published %.1fx, %s]", pub, near ? "within 30%" : "outside 30%");
            }
        }
        out << "; ";
    }
    o.detail = out.str();
    return o;
}

}  // namespace

int main(int argc, char **argv) {
    if (const char *env = std::getenv("SNAQSIM_THREADS")) g_threads = std::max(1, std::atoi(env));
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"wave-count table", wave_table},
        {"distance oracle", distance_oracle},
        {"noiseless determinism", noiseless},
        {"scaling slope", slope},
        {"serialization sensitivity", serialization},
        {"timing anchors", timing_anchors},
        {"SE-duration bound", se_bound},
        {"distillation table", distillation},
        {"volume reduction", volume_reductions},
        {"fit self-inversion", fit_inversion},
        {"clock speedup", speedup},
    };
    std::set<int> only;
    for (int i = 1; i < argc; i++) only.insert(std::atoi(argv[i]));
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); i++) {
        int id = (int)i + 1;
        if (!only.empty() && !only.count(id)) continue;
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                    o.detail.c_str(), s);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed ? 1 : 0;
}
