#include "snaq/engine.h"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <set>

using namespace snaq;

namespace {

StabilizerCircuit memory_circuit(int d, PauliType basis, ScheduleMode mode, const NoiseParams &n) {
    DotArray a = build_array(d + 2, 2 * (d + 1), Rational(1));
    CodePatch p = embed_patch(a, d, 0);
    WaveAssignment w = assign_waves(a, p);
    return lower(build_memory_experiment(a, p, d, basis, w, TimingParams{}, mode), n);
}

NoiseParams reference_noise() {
    NoiseParams n;
    n.p_g = 1e-3;
    n.p_sh = 1e-4;
    n.p_id = 1e-2;
    return n;
}

double obs_rate(const DetectorSamples &s) {
    uint64_t k = 0;
    for (uint64_t i = 0; i < s.shots; i++) k += s.observable(i, 0);
    return (double)k / (double)s.shots;
}

double det_density(const DetectorSamples &s) {
    uint64_t k = 0;
    for (uint64_t i = 0; i < s.shots; i++) {
        for (size_t w = 0; w < s.det_words; w++) k += (uint64_t)__builtin_popcountll(s.det_row(i)[w]);
    }
    return (double)k / (double)s.shots / s.num_detectors;
}

std::vector<int> flips(const StabilizerCircuit &c) {
    DetectorSamples s = sample(compile(c), 1, 0);
    std::vector<int> out;
    for (uint32_t d = 0; d < s.num_detectors; d++) out.push_back(s.detector(0, d));
    return out;
}

// Dense two-qubit Pauli conjugation. Qubit 0 is the low bit of the index.
using Mat = std::array<std::complex<double>, 16>;

Mat mul(const Mat &a, const Mat &b) {
    Mat r{};
    for (int i = 0; i < 4; i++)
        for (int j = 0; j < 4; j++)
            for (int k = 0; k < 4; k++) r[i * 4 + j] += a[i * 4 + k] * b[k * 4 + j];
    return r;
}

Mat dagger(const Mat &a) {
    Mat r{};
    for (int i = 0; i < 4; i++)
        for (int j = 0; j < 4; j++) r[i * 4 + j] = std::conj(a[j * 4 + i]);
    return r;
}

using M2 = std::array<std::complex<double>, 4>;
const std::complex<double> kI(0, 1);
const M2 kPauli[4] = {{1, 0, 0, 1}, {0, 1, 1, 0}, {0, -kI, kI, 0}, {1, 0, 0, -1}};  // I X Y Z

Mat kron(const M2 &hi, const M2 &lo) {
    Mat r{};
    for (int i = 0; i < 4; i++)
        for (int j = 0; j < 4; j++) r[i * 4 + j] = hi[(i >> 1) * 2 + (j >> 1)] * lo[(i & 1) * 2 + (j & 1)];
    return r;
}

// Returns the Pauli index (0..3) on each qubit of P, up to phase.
std::array<int, 2> decompose(const Mat &p) {
    for (int a = 0; a < 4; a++) {
        for (int b = 0; b < 4; b++) {
            Mat q = kron(kPauli[b], kPauli[a]);
            std::complex<double> tr = 0;
            for (int i = 0; i < 4; i++)
                for (int k = 0; k < 4; k++) tr += std::conj(q[k * 4 + i]) * p[k * 4 + i];
            if (std::abs(tr) > 2) return {a, b};
        }
    }
    return {-1, -1};
}

Mat gate_matrix(const std::string &g) {
    const double s = 1 / std::sqrt(2.0);
    M2 h{s, s, s, -s};
    if (g == "H 0") return kron(kPauli[0], h);
    if (g == "H 1") return kron(h, kPauli[0]);
    Mat cx{};
    for (int i = 0; i < 4; i++) {
        int c = g == "CX 0 1" ? (i & 1) : (i >> 1) & 1;
        int j = c ? i ^ (g == "CX 0 1" ? 2 : 1) : i;
        cx[j * 4 + i] = 1;
    }
    return cx;
}

}  // namespace

TEST(Components, DepolarizeConversion) {
    for (double p : {1e-4, 1e-2, 0.3}) {
        double q = depolarize1_component(p);
        // A given anticommuting component fires through two of three channels.
        EXPECT_NEAR(2 * q * (1 - q), 2 * p / 3, 1e-12);
        double q2 = depolarize2_component(p);
        double odd = 0.5 - 0.5 * std::pow(1 - 2 * q2, 8);
        EXPECT_NEAR(odd, 8 * p / 15, 1e-12);
    }
    EXPECT_NEAR(xor_combine(0.1, 0.1), 0.18, 1e-15);
    EXPECT_EQ(xor_combine(0.0, 0.25), 0.25);
}

TEST(Dem, SingleErrorSingleMechanism) {
    DetectorErrorModel dem = extract_dem(parse_text("R 0\nX_ERROR(0.1) 0\nM 0\nDETECTOR(1, 2) rec[-1]\n"));
    ASSERT_EQ(dem.mechanisms.size(), 1u);
    EXPECT_DOUBLE_EQ(dem.mechanisms[0].p, 0.1);
    EXPECT_EQ(dem.mechanisms[0].detectors, std::vector<uint32_t>{0});
    EXPECT_EQ(dem.mechanisms[0].observables, 0u);
    EXPECT_EQ(dem_text(dem), "error(0.1) D0\ndetector(1, 2) D0\n");
}

TEST(Dem, EqualSignaturesMerge) {
    DetectorErrorModel dem =
        extract_dem(parse_text("R 0\nX_ERROR(0.1) 0\nX_ERROR(0.1) 0\nM 0\nDETECTOR rec[-1]\nOBSERVABLE_INCLUDE(0) rec[-1]\n"));
    ASSERT_EQ(dem.mechanisms.size(), 1u);
    EXPECT_NEAR(dem.mechanisms[0].p, 0.18, 1e-15);
    EXPECT_EQ(dem.mechanisms[0].observables, 1u);
}

TEST(Dem, DisjointCircuitsUnion) {
    const char *a = "R 0 1\nDEPOLARIZE1(0.01) 0\nCX 0 1\nDEPOLARIZE2(0.02) 0 1\nM 0 1\nDETECTOR rec[-2]\nDETECTOR rec[-1]\n";
    const char *b = "RX 2\nZ_ERROR(0.03) 2\nMX 2\nDETECTOR rec[-1]\nOBSERVABLE_INCLUDE(0) rec[-1]\n";
    DetectorErrorModel da = extract_dem(parse_text(a));
    DetectorErrorModel db = extract_dem(parse_text(b));
    DetectorErrorModel ab = extract_dem(parse_text(std::string(a) + b));
    std::set<std::pair<std::vector<uint32_t>, uint64_t>> want, got;
    std::map<std::vector<uint32_t>, double> pa;
    for (const auto &m : da.mechanisms) want.insert({m.detectors, m.observables}), pa[m.detectors] = m.p;
    for (auto m : db.mechanisms) {
        for (uint32_t &d : m.detectors) d += da.num_detectors;
        want.insert({m.detectors, m.observables});
        pa[m.detectors] = m.p;
    }
    for (const auto &m : ab.mechanisms) {
        got.insert({m.detectors, m.observables});
        EXPECT_NEAR(m.p, pa[m.detectors], 1e-15);
    }
    EXPECT_EQ(got, want);
}

TEST(Dem, InvisibleErrorsDropped) {
    // Z before a Z-basis measurement flips nothing.
    DetectorErrorModel dem = extract_dem(parse_text("R 0\nZ_ERROR(0.2) 0\nM 0\nDETECTOR rec[-1]\n"));
    EXPECT_TRUE(dem.mechanisms.empty());
}

TEST(Dem, MatchesReferenceModel) {
    // Mechanism count and total probability from an independent stabilizer simulator.
    struct Case {
        int d;
        PauliType basis;
        ScheduleMode mode;
        size_t mechanisms;
        double total;
    };
    for (const Case &k : {Case{3, PauliType::Z, ScheduleMode::kNonPipelined, 219, 0.6155898417633596},
                          Case{5, PauliType::X, ScheduleMode::kPipelined, 1679, 2.8748793575302036}}) {
        DetectorErrorModel dem = extract_dem(memory_circuit(k.d, k.basis, k.mode, reference_noise()));
        double total = 0;
        for (const auto &m : dem.mechanisms) total += m.p;
        EXPECT_EQ(dem.mechanisms.size(), k.mechanisms) << k.d;
        EXPECT_NEAR(total, k.total, 1e-9 * k.total) << k.d;
    }
}

TEST(Sampler, MatchesReferenceRates) {
    // Reference: 200000 shots of the same circuit, observable 0.109395,
    // detector density 0.0416373.
    StabilizerCircuit c = memory_circuit(3, PauliType::Z, ScheduleMode::kNonPipelined, reference_noise());
    DetectorSamples s = sample(compile(c), 100000, 11);
    double sigma = std::sqrt(0.109 * 0.891 * (1.0 / 100000 + 1.0 / 200000));
    EXPECT_NEAR(obs_rate(s), 0.109395, 4 * sigma);
    EXPECT_NEAR(det_density(s), 0.0416373, 1e-3);
}

TEST(Sampler, GateNoiseMatchesReference) {
    // Reference: 2e6 shots of the emitted text in an independent sampler.
    NoiseParams n;
    n.p_g = 1e-3;
    StabilizerCircuit c = memory_circuit(3, PauliType::Z, ScheduleMode::kNonPipelined, n);
    DetectorSamples s = sample(compile(c), 100000, 21);
    double sigma = std::sqrt(0.017146 * (1 - 0.017146) * (1.0 / 100000 + 1.0 / 2000000));
    EXPECT_NEAR(obs_rate(s), 0.017146, 3 * sigma);
    EXPECT_EQ(extract_dem(c).mechanisms.size(), 219u);
}

TEST(Sampler, DemAgreesWithCircuit) {
    StabilizerCircuit c = memory_circuit(3, PauliType::X, ScheduleMode::kPipelined, reference_noise());
    DetectorSamples a = sample(compile(c), 100000, 3);
    DetectorSamples b = sample_dem(extract_dem(c), 100000, 4);
    double pa = obs_rate(a), pb = obs_rate(b);
    double sigma = std::sqrt(pa * (1 - pa) * 2.0 / 100000);
    EXPECT_NEAR(pa, pb, 3 * sigma);
    EXPECT_NEAR(det_density(a), det_density(b), 1e-3);
}

TEST(Sampler, NoiselessIsDeterministic) {
    for (PauliType b : {PauliType::X, PauliType::Z}) {
        StabilizerCircuit c = memory_circuit(3, b, ScheduleMode::kNonPipelined, NoiseParams{});
        DetectorSamples s = sample(compile(c), 10000, 1);
        EXPECT_EQ(det_density(s), 0.0);
        EXPECT_EQ(obs_rate(s), 0.0);
    }
}

TEST(Sampler, SeedAndThreadInvariance) {
    StabilizerCircuit c = memory_circuit(3, PauliType::Z, ScheduleMode::kNonPipelined, reference_noise());
    FrameSampler f = compile(c);
    DetectorSamples a = sample(f, 5000, 42, 1);
    DetectorSamples b = sample(f, 5000, 42, 3);
    DetectorSamples c2 = sample(f, 5000, 43, 1);
    EXPECT_EQ(a.det, b.det);
    EXPECT_EQ(a.obs, b.obs);
    EXPECT_NE(a.det, c2.det);
    EXPECT_EQ(samples_to_packed(a), samples_to_packed(b));
}

TEST(Sampler, CliffordConjugationMatchesDense) {
    const std::string gates[] = {"H 0", "H 1", "CX 0 1", "CX 1 0"};
    const char *err[2] = {"X_ERROR", "Z_ERROR"};
    for (const std::string &g : gates) {
        Mat u = gate_matrix(g);
        for (int q = 0; q < 2; q++) {
            for (int pauli = 1; pauli <= 3; pauli++) {  // X Y Z
                Mat p = q == 0 ? kron(kPauli[0], kPauli[pauli]) : kron(kPauli[pauli], kPauli[0]);
                std::array<int, 2> out = decompose(mul(mul(u, p), dagger(u)));
                ASSERT_GE(out[0], 0);
                for (int mb = 0; mb < 4; mb++) {
                    bool mx[2] = {(mb & 1) != 0, (mb & 2) != 0};
                    std::string text = "R 0 1\n";
                    if (pauli == 1 || pauli == 2) text += std::string(err[0]) + "(1) " + std::to_string(q) + "\n";
                    if (pauli == 3 || pauli == 2) text += std::string(err[1]) + "(1) " + std::to_string(q) + "\n";
                    text += g + "\n";
                    for (int k = 0; k < 2; k++) text += std::string(mx[k] ? "MX " : "M ") + std::to_string(k) + "\n";
                    text += "DETECTOR rec[-2]\nDETECTOR rec[-1]\n";
                    std::vector<int> got = flips(parse_text(text));
                    for (int k = 0; k < 2; k++) {
                        int o = out[k];
                        bool want = mx[k] ? (o == 2 || o == 3) : (o == 1 || o == 2);
                        EXPECT_EQ(got[k], (int)want) << g << " pauli " << pauli << " on " << q << " basis " << mb;
                    }
                }
            }
        }
    }
}

TEST(Sampler, FlipsAreLinear) {
    std::mt19937_64 rng(5);
    const char *kinds[] = {"X_ERROR", "Z_ERROR"};
    for (int trial = 0; trial < 20; trial++) {
        std::vector<std::string> body;
        for (int i = 0; i < 12; i++) {
            int a = (int)(rng() % 4), b = (int)((a + 1 + rng() % 3) % 4);
            body.push_back(rng() % 2 ? "H " + std::to_string(a) : "CX " + std::to_string(a) + " " + std::to_string(b));
        }
        auto build = [&](std::vector<std::pair<int, std::string>> errs) {
            std::string t = "R 0 1 2 3\n";
            for (size_t i = 0; i <= body.size(); i++) {
                for (auto &e : errs) {
                    if (e.first == (int)i) t += e.second + "\n";
                }
                if (i < body.size()) t += body[i] + "\n";
            }
            t += "M 0 1\nMX 2 3\nDETECTOR rec[-4]\nDETECTOR rec[-3]\nDETECTOR rec[-2]\nDETECTOR rec[-1]\n";
            return parse_text(t);
        };
        std::pair<int, std::string> e1{(int)(rng() % 13), std::string(kinds[rng() % 2]) + "(1) " + std::to_string(rng() % 4)};
        std::pair<int, std::string> e2{(int)(rng() % 13), std::string(kinds[rng() % 2]) + "(1) " + std::to_string(rng() % 4)};
        std::vector<int> f1 = flips(build({e1})), f2 = flips(build({e2})), f12 = flips(build({e1, e2}));
        for (size_t k = 0; k < f12.size(); k++) EXPECT_EQ(f12[k], f1[k] ^ f2[k]);
    }
}

TEST(Dem, HookErrorsKeepDistance) {
    // No single mechanism is an undetected logical at d=3; at d=5 no pair is.
    for (int d : {3, 5}) {
        for (PauliType b : {PauliType::X, PauliType::Z}) {
            for (ScheduleMode m : {ScheduleMode::kNonPipelined, ScheduleMode::kPipelined}) {
                DetectorErrorModel dem = extract_dem(memory_circuit(d, b, m, reference_noise()));
                std::map<std::vector<uint32_t>, std::set<uint64_t>> by_sig;
                for (const auto &mech : dem.mechanisms) {
                    EXPECT_FALSE(mech.detectors.empty() && mech.observables) << d;
                    by_sig[mech.detectors].insert(mech.observables);
                }
                if (d < 5) continue;
                for (const auto &kv : by_sig) EXPECT_EQ(kv.second.size(), 1u) << d;
            }
        }
    }
}

TEST(Export, TextFormats) {
    DetectorSamples s = sample(compile(parse_text("R 0 1\nX_ERROR(1) 0\nM 0 1\nDETECTOR rec[-2]\nDETECTOR rec[-1]\n"
                                                  "OBSERVABLE_INCLUDE(0) rec[-2]\n")),
                               2, 0);
    EXPECT_EQ(samples_to_01(s), "10 1\n10 1\n");
    std::string packed = samples_to_packed(s);
    ASSERT_EQ(packed.size(), 32u);
    EXPECT_EQ(packed[0], 1);
    EXPECT_EQ(packed[8], 1);
}

TEST(Compile, DetectorCounts) {
    EXPECT_EQ(compile(StabilizerCircuit{}).num_detectors, 0u);
    // Two syndrome rounds: 4 + 8 comparisons + 4 final checks.
    DotArray a = build_array(5, 8, Rational(1));
    CodePatch p = embed_patch(a, 3, 0);
    WaveAssignment w = assign_waves(a, p);
    StabilizerCircuit c = lower(
        build_memory_experiment(a, p, 2, PauliType::Z, w, TimingParams{}, ScheduleMode::kNonPipelined), NoiseParams{});
    EXPECT_EQ(compile(c).num_detectors, 16u);
    DetectorSamples s = sample(compile(parse_text("R 0\nX_ERROR(1) 0\nM 0\nDETECTOR rec[-1]\n")), 100, 9);
    for (uint64_t i = 0; i < s.shots; i++) EXPECT_TRUE(s.detector(i, 0));
}

TEST(Compile, RejectsDanglingRecords) {
    StabilizerCircuit c;
    c.num_qubits = 1;
    c.append(Gate::kM, {0});
    c.append(Gate::kDetector, {3});
    EXPECT_THROW(compile(c), std::invalid_argument);
}

TEST(Seeds, DeriveSeedSpreads) {
    std::set<uint64_t> seen;
    for (uint64_t k = 0; k < 1000; k++) seen.insert(derive_seed(7, k));
    EXPECT_EQ(seen.size(), 1000u);
    EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
    EXPECT_NE(derive_seed(7, 3), derive_seed(8, 3));
}
