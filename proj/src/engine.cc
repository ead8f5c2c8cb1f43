#include "snaq/engine.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace snaq {

namespace {

constexpr uint64_t kShardShots = 1024;
constexpr size_t kShardWords = kShardShots / 64;

}  // namespace

uint64_t derive_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

FrameSampler compile(const StabilizerCircuit &c) {
    FrameSampler s;
    s.num_qubits = c.num_qubits;
    uint32_t nm = 0;
    for (const auto &op : c.ops) {
        switch (op.gate) {
            case Gate::kQubitCoords:
            case Gate::kTick:
                break;
            case Gate::kDetector:
            case Gate::kObservableInclude:
                for (uint32_t m : op.targets) {
                    if (m >= nm) {
                        throw std::invalid_argument("detector references measurement " + std::to_string(m) +
                                                    " before it happens");
                    }
                }
                if (op.gate == Gate::kDetector) {
                    s.detectors.push_back(op.targets);
                } else {
                    size_t k = (size_t)op.p();
                    if (s.observables.size() <= k) s.observables.resize(k + 1);
                    auto &v = s.observables[k];
                    v.insert(v.end(), op.targets.begin(), op.targets.end());
                }
                break;
            default:
                for (uint32_t q : op.targets) {
                    if (q >= c.num_qubits) throw std::invalid_argument("qubit " + std::to_string(q) + " out of range");
                }
                if (op.gate == Gate::kM || op.gate == Gate::kMX) nm += (uint32_t)op.targets.size();
                s.program.push_back(op);
        }
    }
    s.num_measurements = nm;
    s.num_detectors = (uint32_t)s.detectors.size();
    s.num_observables = (uint32_t)s.observables.size();
    if (s.num_observables > 64) throw std::invalid_argument("at most 64 observables are supported");
    return s;
}

namespace {

// Geometric skipping over a bit space of n positions with hit probability p.
template <typename F>
void for_each_hit(std::mt19937_64 &rng, double p, uint64_t n, F &&f) {
    if (p <= 0 || n == 0) return;
    if (p >= 1) {
        for (uint64_t i = 0; i < n; i++) f(i);
        return;
    }
    std::geometric_distribution<uint64_t> gap(p);
    uint64_t i = gap(rng);
    while (i < n) {
        f(i);
        i += 1 + gap(rng);
    }
}

struct Shard {
    size_t words;
    std::vector<uint64_t> x, z, rec;

    Shard(uint32_t nq, uint32_t nm, size_t w) : words(w), x((size_t)nq * w), z((size_t)nq * w), rec((size_t)nm * w) {}
    uint64_t *X(uint32_t q) { return x.data() + (size_t)q * words; }
    uint64_t *Z(uint32_t q) { return z.data() + (size_t)q * words; }
};

void run_shard(const FrameSampler &s, Shard &sh, uint64_t shots, std::mt19937_64 &rng) {
    const size_t W = sh.words;
    uint32_t nm = 0;
    for (const auto &op : s.program) {
        const auto &t = op.targets;
        switch (op.gate) {
            case Gate::kR:
            case Gate::kRX:
                for (uint32_t q : t) {
                    std::fill_n(sh.X(q), W, 0);
                    std::fill_n(sh.Z(q), W, 0);
                }
                break;
            case Gate::kH:
                for (uint32_t q : t) std::swap_ranges(sh.X(q), sh.X(q) + W, sh.Z(q));
                break;
            case Gate::kCX:
                for (size_t i = 0; i + 1 < t.size(); i += 2) {
                    uint64_t *xc = sh.X(t[i]), *zc = sh.Z(t[i]);
                    uint64_t *xt = sh.X(t[i + 1]), *zt = sh.Z(t[i + 1]);
                    for (size_t w = 0; w < W; w++) {
                        xt[w] ^= xc[w];
                        zc[w] ^= zt[w];
                    }
                }
                break;
            case Gate::kM:
            case Gate::kMX: {
                size_t base = nm;
                for (uint32_t q : t) {
                    const uint64_t *src = op.gate == Gate::kM ? sh.X(q) : sh.Z(q);
                    std::copy_n(src, W, sh.rec.data() + (size_t)nm * W);
                    // The other component acts as a phase on the collapsed state.
                    std::fill_n(op.gate == Gate::kM ? sh.Z(q) : sh.X(q), W, 0);
                    nm++;
                }
                for_each_hit(rng, op.p(), (uint64_t)t.size() * shots, [&](uint64_t i) {
                    uint64_t k = i / shots, b = i % shots;
                    sh.rec[(base + k) * W + b / 64] ^= 1ULL << (b % 64);
                });
                break;
            }
            case Gate::kXError:
            case Gate::kZError:
                for_each_hit(rng, op.p(), (uint64_t)t.size() * shots, [&](uint64_t i) {
                    uint64_t k = i / shots, b = i % shots;
                    uint64_t *f = op.gate == Gate::kXError ? sh.X(t[k]) : sh.Z(t[k]);
                    f[b / 64] ^= 1ULL << (b % 64);
                });
                break;
            case Gate::kDepolarize1: {
                std::uniform_int_distribution<int> pick(1, 3);
                for_each_hit(rng, op.p(), (uint64_t)t.size() * shots, [&](uint64_t i) {
                    uint64_t k = i / shots, b = i % shots;
                    int e = pick(rng);  // 1 = X, 2 = Z, 3 = Y
                    uint64_t bit = 1ULL << (b % 64);
                    if (e & 1) sh.X(t[k])[b / 64] ^= bit;
                    if (e & 2) sh.Z(t[k])[b / 64] ^= bit;
                });
                break;
            }
            case Gate::kDepolarize2: {
                std::uniform_int_distribution<int> pick(1, 15);
                uint64_t pairs = t.size() / 2;
                for_each_hit(rng, op.p(), pairs * shots, [&](uint64_t i) {
                    uint64_t k = i / shots, b = i % shots;
                    int e = pick(rng);
                    uint64_t bit = 1ULL << (b % 64);
                    uint32_t a = t[2 * k], c = t[2 * k + 1];
                    if (e & 1) sh.X(a)[b / 64] ^= bit;
                    if (e & 2) sh.Z(a)[b / 64] ^= bit;
                    if (e & 4) sh.X(c)[b / 64] ^= bit;
                    if (e & 8) sh.Z(c)[b / 64] ^= bit;
                });
                break;
            }
            default:
                break;
        }
    }
}

// Scatters measurement-major parity words into shot-major rows.
void scatter(const std::vector<std::vector<uint32_t>> &sets, const Shard &sh, uint64_t shots, uint64_t first_shot,
             size_t row_words, std::vector<uint64_t> &out) {
    const size_t W = sh.words;
    std::vector<uint64_t> acc(W);
    for (size_t d = 0; d < sets.size(); d++) {
        std::fill(acc.begin(), acc.end(), 0);
        for (uint32_t m : sets[d]) {
            const uint64_t *r = sh.rec.data() + (size_t)m * W;
            for (size_t w = 0; w < W; w++) acc[w] ^= r[w];
        }
        for (size_t w = 0; w < W; w++) {
            uint64_t v = acc[w];
            while (v) {
                int b = __builtin_ctzll(v);
                v &= v - 1;
                uint64_t shot = w * 64 + b;
                if (shot >= shots) break;
                out[(first_shot + shot) * row_words + d / 64] |= 1ULL << (d % 64);
            }
        }
    }
}

}  // namespace

DetectorSamples sample(const FrameSampler &s, uint64_t shots, uint64_t seed, int threads) {
    DetectorSamples out;
    out.shots = shots;
    out.num_detectors = s.num_detectors;
    out.num_observables = s.num_observables;
    out.det_words = (s.num_detectors + 63) / 64;
    out.obs_words = (s.num_observables + 63) / 64;
    out.det.assign(shots * out.det_words, 0);
    out.obs.assign(shots * out.obs_words, 0);
    uint64_t n_shards = (shots + kShardShots - 1) / kShardShots;
    threads = std::max(1, std::min<int>(threads, (int)std::max<uint64_t>(n_shards, 1)));

    auto worker = [&](int tid) {
        Shard sh(s.num_qubits, s.num_measurements, kShardWords);
        for (uint64_t k = tid; k < n_shards; k += threads) {
            uint64_t first = k * kShardShots;
            uint64_t n = std::min<uint64_t>(kShardShots, shots - first);
            std::fill(sh.x.begin(), sh.x.end(), 0);
            std::fill(sh.z.begin(), sh.z.end(), 0);
            std::mt19937_64 rng(derive_seed(seed, k));
            run_shard(s, sh, n, rng);
            scatter(s.detectors, sh, n, first, out.det_words, out.det);
            scatter(s.observables, sh, n, first, out.obs_words, out.obs);
        }
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; t++) pool.emplace_back(worker, t);
        for (auto &th : pool) th.join();
    }
    return out;
}

// Each nontrivial Pauli anticommutes with 2 of the 3 (8 of the 15) components,
// so (1 - 2q)^2 = 1 - 4p/3 and (1 - 2q)^8 = 1 - 16p/15.
double depolarize1_component(double p) { return 0.5 - 0.5 * std::sqrt(1 - 4 * p / 3); }
double depolarize2_component(double p) { return 0.5 - 0.5 * std::pow(1 - 16 * p / 15, 1.0 / 8); }
double xor_combine(double a, double b) { return a * (1 - b) + b * (1 - a); }

DetectorErrorModel extract_dem(const StabilizerCircuit &c) {
    FrameSampler s = compile(c);
    DetectorErrorModel dem;
    dem.num_detectors = s.num_detectors;
    dem.num_observables = s.num_observables;
    for (const auto &op : c.ops) {
        if (op.gate == Gate::kDetector) dem.coords.push_back(op.args);
    }
    const uint32_t nbits = s.num_detectors + s.num_observables;
    const size_t B = (nbits + 63) / 64;

    // Which detectors/observables read each measurement.
    std::vector<std::vector<uint64_t>> reads(s.num_measurements, std::vector<uint64_t>(B, 0));
    for (uint32_t d = 0; d < s.num_detectors; d++) {
        for (uint32_t m : s.detectors[d]) reads[m][d / 64] ^= 1ULL << (d % 64);
    }
    for (uint32_t k = 0; k < s.num_observables; k++) {
        uint32_t bit = s.num_detectors + k;
        for (uint32_t m : s.observables[k]) reads[m][bit / 64] ^= 1ULL << (bit % 64);
    }

    // Reverse pass: sens_x[q] holds the detectors an X error on q would flip
    // at the current point in the circuit.
    std::vector<uint64_t> sx((size_t)s.num_qubits * B, 0), sz((size_t)s.num_qubits * B, 0);
    auto SX = [&](uint32_t q) { return sx.data() + (size_t)q * B; };
    auto SZ = [&](uint32_t q) { return sz.data() + (size_t)q * B; };

    struct Key {
        std::vector<uint64_t> bits;
        bool operator==(const Key &o) const { return bits == o.bits; }
    };
    struct KeyHash {
        size_t operator()(const Key &k) const {
            uint64_t h = 1469598103934665603ULL;
            for (uint64_t w : k.bits) h = (h ^ w) * 1099511628211ULL;
            return (size_t)h;
        }
    };
    struct Entry {
        double p = 0;
        double pure = 0;   // probability from faults with a single Pauli type
        double split = 0;  // dominant mixed fault, with its parts below
        std::vector<uint64_t> xpart, zpart;
    };
    std::unordered_map<Key, Entry, KeyHash> merged;
    std::vector<Key> order;
    std::vector<uint64_t> tmp(B), tx(B), tz(B);
    auto nonzero = [&](const uint64_t *sig) {
        for (size_t i = 0; i < B; i++) {
            if (sig[i]) return true;
        }
        return false;
    };
    // xs/zs: signatures of the X and Z parts of a mixed fault, else null.
    auto add = [&](const uint64_t *sig, double p, const uint64_t *xs = nullptr, const uint64_t *zs = nullptr) {
        if (p <= 0 || !nonzero(sig)) return;
        Key k{std::vector<uint64_t>(sig, sig + B)};
        auto it = merged.find(k);
        if (it == merged.end()) {
            it = merged.emplace(k, Entry{}).first;
            order.push_back(k);
        }
        Entry &e = it->second;
        e.p = xor_combine(e.p, p);
        if (xs && zs && nonzero(xs) && nonzero(zs)) {
            if (p > e.split) {
                e.split = p;
                e.xpart.assign(xs, xs + B);
                e.zpart.assign(zs, zs + B);
            }
        } else {
            e.pure += p;
        }
    };
    auto xor_into = [&](uint64_t *dst, const uint64_t *a, const uint64_t *b) {
        for (size_t i = 0; i < B; i++) dst[i] = a[i] ^ b[i];
    };

    uint32_t nm = s.num_measurements;
    for (auto it = s.program.rbegin(); it != s.program.rend(); ++it) {
        const auto &op = *it;
        const auto &t = op.targets;
        switch (op.gate) {
            case Gate::kR:
            case Gate::kRX:
                for (uint32_t q : t) {
                    std::fill_n(SX(q), B, 0);
                    std::fill_n(SZ(q), B, 0);
                }
                break;
            case Gate::kH:
                for (auto q = t.rbegin(); q != t.rend(); ++q) std::swap_ranges(SX(*q), SX(*q) + B, SZ(*q));
                break;
            case Gate::kCX:
                for (size_t i = t.size(); i >= 2; i -= 2) {
                    uint32_t a = t[i - 2], b = t[i - 1];
                    for (size_t w = 0; w < B; w++) {
                        SX(a)[w] ^= SX(b)[w];
                        SZ(b)[w] ^= SZ(a)[w];
                    }
                }
                break;
            case Gate::kM:
            case Gate::kMX:
                for (size_t i = t.size(); i-- > 0;) {
                    nm--;
                    uint32_t q = t[i];
                    add(reads[nm].data(), op.p());
                    uint64_t *flip = op.gate == Gate::kM ? SX(q) : SZ(q);
                    uint64_t *gone = op.gate == Gate::kM ? SZ(q) : SX(q);
                    for (size_t w = 0; w < B; w++) flip[w] ^= reads[nm][w];
                    std::fill_n(gone, B, 0);
                }
                break;
            case Gate::kXError:
                for (uint32_t q : t) add(SX(q), op.p());
                break;
            case Gate::kZError:
                for (uint32_t q : t) add(SZ(q), op.p());
                break;
            case Gate::kDepolarize1: {
                double p = depolarize1_component(op.p());
                for (uint32_t q : t) {
                    add(SX(q), p);
                    add(SZ(q), p);
                    xor_into(tmp.data(), SX(q), SZ(q));
                    add(tmp.data(), p, SX(q), SZ(q));
                }
                break;
            }
            case Gate::kDepolarize2: {
                double p = depolarize2_component(op.p());
                for (size_t i = 0; i + 1 < t.size(); i += 2) {
                    uint32_t a = t[i], b = t[i + 1];
                    for (int e = 1; e < 16; e++) {
                        for (size_t w = 0; w < B; w++) {
                            tx[w] = ((e & 1) ? SX(a)[w] : 0) ^ ((e & 4) ? SX(b)[w] : 0);
                            tz[w] = ((e & 2) ? SZ(a)[w] : 0) ^ ((e & 8) ? SZ(b)[w] : 0);
                            tmp[w] = tx[w] ^ tz[w];
                        }
                        add(tmp.data(), p, tx.data(), tz.data());
                    }
                }
                break;
            }
            default:
                break;
        }
    }

    auto unpack = [&](const std::vector<uint64_t> &bits, std::vector<uint32_t> &dets, uint64_t &obs) {
        for (uint32_t bit = 0; bit < nbits; bit++) {
            if ((bits[bit / 64] >> (bit % 64)) & 1) {
                if (bit < s.num_detectors) {
                    dets.push_back(bit);
                } else {
                    obs |= 1ULL << (bit - s.num_detectors);
                }
            }
        }
    };
    for (const Key &k : order) {
        const Entry &e = merged[k];
        DemMechanism m;
        m.p = e.p;
        unpack(k.bits, m.detectors, m.observables);
        if (e.split > e.pure) {
            m.parts.resize(2);
            unpack(e.xpart, m.parts[0].detectors, m.parts[0].observables);
            unpack(e.zpart, m.parts[1].detectors, m.parts[1].observables);
        }
        dem.mechanisms.push_back(std::move(m));
    }
    std::sort(dem.mechanisms.begin(), dem.mechanisms.end(), [](const DemMechanism &a, const DemMechanism &b) {
        return a.detectors != b.detectors ? a.detectors < b.detectors : a.observables < b.observables;
    });
    return dem;
}

DetectorSamples sample_dem(const DetectorErrorModel &dem, uint64_t shots, uint64_t seed) {
    DetectorSamples out;
    out.shots = shots;
    out.num_detectors = dem.num_detectors;
    out.num_observables = dem.num_observables;
    out.det_words = (dem.num_detectors + 63) / 64;
    out.obs_words = (dem.num_observables + 63) / 64;
    out.det.assign(shots * out.det_words, 0);
    out.obs.assign(shots * out.obs_words, 0);
    std::mt19937_64 rng(derive_seed(seed, 0));
    for (const auto &m : dem.mechanisms) {
        for_each_hit(rng, m.p, shots, [&](uint64_t s) {
            for (uint32_t d : m.detectors) out.det[s * out.det_words + d / 64] ^= 1ULL << (d % 64);
            if (out.obs_words) out.obs[s * out.obs_words] ^= m.observables;
        });
    }
    return out;
}

std::string dem_text(const DetectorErrorModel &dem) {
    std::ostringstream out;
    out.precision(12);
    for (const auto &m : dem.mechanisms) {
        out << "error(" << m.p << ")";
        auto targets = [&](const std::vector<uint32_t> &dets, uint64_t obs) {
            for (uint32_t d : dets) out << " D" << d;
            for (uint32_t k = 0; k < 64; k++) {
                if ((obs >> k) & 1) out << " L" << k;
            }
        };
        if (m.parts.empty()) {
            targets(m.detectors, m.observables);
        } else {
            for (size_t i = 0; i < m.parts.size(); i++) {
                if (i) out << " ^";
                targets(m.parts[i].detectors, m.parts[i].observables);
            }
        }
        out << '\n';
    }
    for (size_t d = 0; d < dem.coords.size(); d++) {
        if (dem.coords[d].empty()) continue;
        out << "detector(";
        for (size_t i = 0; i < dem.coords[d].size(); i++) out << (i ? ", " : "") << dem.coords[d][i];
        out << ") D" << d << '\n';
    }
    return out.str();
}

std::string samples_to_packed(const DetectorSamples &s) {
    std::string out;
    for (uint64_t shot = 0; shot < s.shots; shot++) {
        for (size_t w = 0; w < s.det_words; w++) {
            uint64_t v = s.det[shot * s.det_words + w];
            for (int b = 0; b < 8; b++) out.push_back((char)((v >> (8 * b)) & 0xFF));
        }
        for (size_t w = 0; w < s.obs_words; w++) {
            uint64_t v = s.obs[shot * s.obs_words + w];
            for (int b = 0; b < 8; b++) out.push_back((char)((v >> (8 * b)) & 0xFF));
        }
    }
    return out;
}

std::string samples_to_01(const DetectorSamples &s) {
    std::string out;
    for (uint64_t shot = 0; shot < s.shots; shot++) {
        for (uint32_t d = 0; d < s.num_detectors; d++) out.push_back(s.detector(shot, d) ? '1' : '0');
        if (s.num_observables) out.push_back(' ');
        for (uint32_t k = 0; k < s.num_observables; k++) out.push_back(s.observable(shot, k) ? '1' : '0');
        out.push_back('\n');
    }
    return out;
}

}  // namespace snaq
