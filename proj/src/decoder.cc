#include "snaq/decoder.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "snaq/blossom.h"

namespace snaq {

double edge_weight(double p) {
    if (p <= 0) return std::numeric_limits<double>::infinity();
    if (p >= 0.5) return 0.0;
    return std::log((1 - p) / p);
}

int64_t DecodingGraph::find_edge(uint32_t u, uint32_t v) const {
    if (u >= adjacency.size()) return -1;
    for (uint32_t e : adjacency[u]) {
        const GraphEdge &ge = edges[e];
        if ((ge.u == u && ge.v == v) || (ge.u == v && ge.v == u)) return e;
    }
    return -1;
}

namespace {

using Pair = std::pair<uint32_t, uint32_t>;

Pair key(uint32_t a, uint32_t b) { return a < b ? Pair{a, b} : Pair{b, a}; }

std::string describe(const DemMechanism &m) {
    std::ostringstream out;
    out << "error(" << m.p << ")";
    for (uint32_t d : m.detectors) out << " D" << d;
    for (int k = 0; k < 64; k++) {
        if ((m.observables >> k) & 1) out << " L" << k;
    }
    return out.str();
}

// Splits `dets` into existing graphlike signatures whose observables XOR to `obs`.
bool split(std::vector<uint32_t> &dets, uint64_t obs, const std::map<Pair, uint64_t> &known, uint32_t boundary,
           std::vector<Pair> &out) {
    if (dets.empty()) return obs == 0;
    uint32_t a = dets[0];
    auto try_part = [&](uint32_t b, size_t j) {
        auto it = known.find(key(a, b));
        if (it == known.end()) return false;
        std::vector<uint32_t> rest;
        for (size_t i = 1; i < dets.size(); i++) {
            if (i != j) rest.push_back(dets[i]);
        }
        out.push_back(key(a, b));
        if (split(rest, obs ^ it->second, known, boundary, out)) return true;
        out.pop_back();
        return false;
    };
    for (size_t j = 1; j < dets.size(); j++) {
        if (try_part(dets[j], j)) return true;
    }
    return try_part(boundary, 0);
}

}  // namespace

DecodingGraph build_graph(const DetectorErrorModel &dem) {
    DecodingGraph g;
    g.num_detectors = dem.num_detectors;
    g.num_observables = dem.num_observables;
    const uint32_t b = g.boundary();

    auto edge_key = [&](const std::vector<uint32_t> &d) { return d.size() == 1 ? key(d[0], b) : key(d[0], d[1]); };

    // Observable mask per graphlike signature; the likeliest wins a conflict.
    std::map<Pair, uint64_t> known;
    std::map<Pair, double> known_p;
    auto learn = [&](const std::vector<uint32_t> &d, uint64_t obs, double p) {
        if (d.empty() || d.size() > 2) return;
        Pair k = edge_key(d);
        auto it = known_p.find(k);
        if (it == known_p.end() || p > it->second) {
            known[k] = obs;
            known_p[k] = p;
        }
    };
    for (const auto &m : dem.mechanisms) {
        if (m.parts.empty()) {
            learn(m.detectors, m.observables, m.p);
        } else {
            for (const auto &part : m.parts) learn(part.detectors, part.observables, m.p);
        }
    }

    std::map<Pair, uint32_t> index;
    auto add = [&](Pair k, double p, uint32_t mech) {
        auto it = index.find(k);
        if (it == index.end()) {
            it = index.emplace(k, (uint32_t)g.edges.size()).first;
            GraphEdge e;
            e.u = k.first;
            e.v = k.second;
            e.observables = known.at(k);
            g.edges.push_back(e);
        }
        GraphEdge &e = g.edges[it->second];
        e.p = xor_combine(e.p, p);
        e.mechanisms.push_back(mech);
    };
    // Edges for one signature, or false when it cannot be expressed.
    auto place = [&](const std::vector<uint32_t> &dets, uint64_t obs, std::vector<Pair> &out) {
        if (dets.empty()) return false;
        if (dets.size() <= 2) {
            Pair k = edge_key(dets);
            if (!known.count(k) || known[k] != obs) {
                std::vector<uint32_t> tmp = dets;
                return split(tmp, obs, known, b, out);
            }
            out.push_back(k);
            return true;
        }
        std::vector<uint32_t> tmp = dets;
        return split(tmp, obs, known, b, out);
    };

    for (uint32_t i = 0; i < dem.mechanisms.size(); i++) {
        const DemMechanism &m = dem.mechanisms[i];
        if (m.detectors.empty()) continue;  // undetectable; nothing to match
        std::vector<Pair> parts;
        bool ok = !m.parts.empty();
        for (const auto &part : m.parts) ok = ok && place(part.detectors, part.observables, parts);
        if (!ok) {
            parts.clear();
            if (!place(m.detectors, m.observables, parts)) {
                throw std::invalid_argument("cannot decompose hyperedge " + describe(m));
            }
        }
        for (Pair k : parts) add(k, m.p, i);
    }

    g.adjacency.assign(g.num_nodes(), {});
    for (uint32_t e = 0; e < g.edges.size(); e++) {
        GraphEdge &ge = g.edges[e];
        ge.weight = edge_weight(ge.p);
        g.adjacency[ge.u].push_back(e);
        g.adjacency[ge.v].push_back(e);
    }
    return g;
}

const char *decoder_name(DecoderKind k) { return k == DecoderKind::kMatching ? "matching" : "union_find"; }

DecoderKind decoder_from_name(const std::string &name) {
    if (name == "union_find" || name == "uf") return DecoderKind::kUnionFind;
    if (name == "matching" || name == "mwpm") return DecoderKind::kMatching;
    throw std::invalid_argument("unknown decoder '" + name + "'");
}

namespace {

constexpr double kEps = 1e-9;

// Weighted union-find: odd clusters grow uniformly along their frontier edges
// until every cluster is even or touches the boundary, then a spanning forest
// of the grown edges is peeled leaf-first.
class UnionFind : public Decoder {
  public:
    explicit UnionFind(const DecodingGraph &g)
        : g_(g),
          parent_(g.num_nodes()),
          odd_(g.num_nodes(), 0),
          boundary_(g.num_nodes(), 0),
          members_(g.num_nodes()),
          active_(g.num_nodes(), 0),
          growth_(g.edges.size(), 0.0),
          rate_(g.edges.size(), 0),
          stamp_(g.edges.size(), 0),
          defect_(g.num_nodes(), 0),
          seen_(g.num_nodes(), 0),
          parent_edge_(g.num_nodes(), -1),
          root_stamp_(g.num_nodes(), 0) {
        for (uint32_t v = 0; v < g.num_nodes(); v++) parent_[v] = v;
    }

    uint64_t decode(const std::vector<uint32_t> &defects) override {
        if (defects.empty()) return 0;
        const uint32_t b = g_.boundary();
        touch(b);
        boundary_[b] = 1;
        for (uint32_t d : defects) {
            if (d >= g_.num_detectors) throw std::invalid_argument("defect index out of range");
            touch(d);
            odd_[d] ^= 1;
            defect_[d] ^= 1;
        }
        grow(defects);
        uint64_t obs = peel();
        reset();
        return obs;
    }

  private:
    uint32_t find(uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void touch(uint32_t v) {
        if (active_[v]) return;
        active_[v] = 1;
        members_[v].assign(1, v);
        touched_.push_back(v);
    }

    void unite(uint32_t x, uint32_t y) {
        touch(x);
        touch(y);
        uint32_t a = find(x), c = find(y);
        if (a == c) return;
        if (members_[a].size() < members_[c].size()) std::swap(a, c);
        parent_[c] = a;
        odd_[a] ^= odd_[c];
        boundary_[a] |= boundary_[c];
        members_[a].insert(members_[a].end(), members_[c].begin(), members_[c].end());
        members_[c].clear();
    }

    void grow(const std::vector<uint32_t> &defects) {
        std::vector<uint32_t> roots, frontier;
        for (;;) {
            ++epoch_;
            roots.clear();
            for (uint32_t d : defects) {
                uint32_t r = find(d);
                if (root_stamp_[r] == epoch_) continue;
                root_stamp_[r] = epoch_;
                if (odd_[r] && !boundary_[r]) roots.push_back(r);
            }
            if (roots.empty()) return;
            frontier.clear();
            for (uint32_t r : roots) {
                for (uint32_t x : members_[r]) {
                    for (uint32_t e : g_.adjacency[x]) {
                        const GraphEdge &ge = g_.edges[e];
                        if (growth_[e] >= ge.weight) continue;
                        uint32_t y = ge.u == x ? ge.v : ge.u;
                        if (active_[y] && find(y) == r) continue;
                        if (stamp_[e] != epoch_) {
                            stamp_[e] = epoch_;
                            rate_[e] = 0;
                            frontier.push_back(e);
                        }
                        rate_[e]++;
                    }
                }
            }
            if (frontier.empty()) throw std::invalid_argument("odd syndrome parity with no path to the boundary");
            double delta = std::numeric_limits<double>::infinity();
            for (uint32_t e : frontier) {
                double w = g_.edges[e].weight;
                if (std::isinf(w)) continue;
                delta = std::min(delta, (w - growth_[e]) / rate_[e]);
            }
            if (std::isinf(delta)) throw std::invalid_argument("odd syndrome parity with no path to the boundary");
            for (uint32_t e : frontier) {
                const GraphEdge &ge = g_.edges[e];
                if (growth_[e] == 0) grown_touched_.push_back(e);
                growth_[e] += delta * rate_[e];
                if (growth_[e] >= ge.weight - kEps) {
                    growth_[e] = ge.weight;
                    grown_.push_back(e);
                    unite(ge.u, ge.v);
                }
            }
        }
    }

    uint64_t peel() {
        // Local forest over fully grown edges.
        for (uint32_t e : grown_) {
            const GraphEdge &ge = g_.edges[e];
            local_[ge.u].push_back(e);
            local_[ge.v].push_back(e);
        }
        order_.clear();
        auto bfs = [&](uint32_t root) {
            if (seen_[root]) return;
            seen_[root] = 1;
            size_t head = order_.size();
            order_.push_back(root);
            while (head < order_.size()) {
                uint32_t x = order_[head++];
                for (uint32_t e : local_[x]) {
                    const GraphEdge &ge = g_.edges[e];
                    uint32_t y = ge.u == x ? ge.v : ge.u;
                    if (seen_[y]) continue;
                    seen_[y] = 1;
                    parent_edge_[y] = (int64_t)e;
                    order_.push_back(y);
                }
            }
        };
        bfs(g_.boundary());
        for (uint32_t v : touched_) bfs(v);
        uint64_t obs = 0;
        for (size_t i = order_.size(); i-- > 0;) {
            uint32_t v = order_[i];
            if (!defect_[v] || parent_edge_[v] < 0) continue;
            const GraphEdge &ge = g_.edges[parent_edge_[v]];
            uint32_t up = ge.u == v ? ge.v : ge.u;
            defect_[v] = 0;
            defect_[up] ^= 1;
            obs ^= ge.observables;
        }
        return obs;
    }

    void reset() {
        for (uint32_t v : touched_) {
            parent_[v] = v;
            odd_[v] = 0;
            boundary_[v] = 0;
            members_[v].clear();
            active_[v] = 0;
            defect_[v] = 0;
            seen_[v] = 0;
            parent_edge_[v] = -1;
        }
        for (uint32_t e : grown_) {
            local_[g_.edges[e].u].clear();
            local_[g_.edges[e].v].clear();
        }
        for (uint32_t e : grown_touched_) growth_[e] = 0;
        touched_.clear();
        grown_.clear();
        grown_touched_.clear();
    }

    const DecodingGraph &g_;
    std::vector<uint32_t> parent_;
    std::vector<uint8_t> odd_, boundary_;
    std::vector<std::vector<uint32_t>> members_;
    std::vector<uint8_t> active_;
    std::vector<double> growth_;
    std::vector<uint32_t> rate_;
    std::vector<uint64_t> stamp_;
    std::vector<uint8_t> defect_, seen_;
    std::vector<int64_t> parent_edge_;
    std::vector<uint64_t> root_stamp_;
    std::vector<std::vector<uint32_t>> local_ = std::vector<std::vector<uint32_t>>(g_.num_nodes());
    std::vector<uint32_t> touched_, grown_, grown_touched_, order_;
    uint64_t epoch_ = 0;
};

// Exact minimum-weight matching on the defect graph: shortest paths between
// defects (never through the boundary), one boundary twin per defect.
class Matching : public Decoder {
  public:
    explicit Matching(const DecodingGraph &g)
        : g_(g), dist_(g.num_nodes(), kInf), obs_(g.num_nodes(), 0), stamp_(g.num_nodes(), 0) {}

    uint64_t decode(const std::vector<uint32_t> &defects) override {
        size_t n = defects.size();
        if (n == 0) return 0;
        for (uint32_t d : defects) {
            if (d >= g_.num_detectors) throw std::invalid_argument("defect index out of range");
        }
        std::vector<std::vector<double>> dd(n, std::vector<double>(n, kInf));
        std::vector<std::vector<uint64_t>> po(n, std::vector<uint64_t>(n, 0));
        std::vector<double> db(n, kInf);
        std::vector<uint64_t> bo(n, 0);
        for (size_t i = 0; i < n; i++) {
            dijkstra(defects[i]);
            for (size_t j = 0; j < n; j++) {
                if (stamp_[defects[j]] == epoch_) {
                    dd[i][j] = dist_[defects[j]];
                    po[i][j] = obs_[defects[j]];
                }
            }
            if (stamp_[g_.boundary()] == epoch_) {
                db[i] = dist_[g_.boundary()];
                bo[i] = obs_[g_.boundary()];
            }
        }

        // Maximum-cardinality matching on C - w picks the lightest perfect matching.
        std::vector<WeightedEdge> edges;
        constexpr double kScale = 1e4;
        int64_t top = 0;
        auto scaled = [&](double x) { return (int64_t)std::llround(x * kScale); };
        for (size_t i = 0; i < n; i++) {
            for (size_t j = i + 1; j < n; j++) {
                if (dd[i][j] < kInf) top = std::max(top, scaled(dd[i][j]));
            }
            if (db[i] < kInf) top = std::max(top, scaled(db[i]));
        }
        top += 1;
        for (size_t i = 0; i < n; i++) {
            for (size_t j = i + 1; j < n; j++) {
                if (dd[i][j] < kInf) edges.push_back({(int)i, (int)j, top - scaled(dd[i][j])});
                edges.push_back({(int)(n + i), (int)(n + j), top});
            }
            if (db[i] < kInf) edges.push_back({(int)i, (int)(n + i), top - scaled(db[i])});
        }
        std::vector<int> mate = max_weight_matching((int)(2 * n), edges, true);
        uint64_t result = 0;
        for (size_t i = 0; i < n; i++) {
            int m = mate[i];
            if (m < 0) {
                throw std::invalid_argument("odd syndrome parity with no path to the boundary");
            }
            if (m >= (int)n) {
                result ^= bo[i];
            } else if (m > (int)i) {
                result ^= po[i][m];
            }
        }
        return result;
    }

  private:
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    void dijkstra(uint32_t src) {
        ++epoch_;
        using Item = std::pair<double, uint32_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
        stamp_[src] = epoch_;
        dist_[src] = 0;
        obs_[src] = 0;
        pq.push({0, src});
        while (!pq.empty()) {
            auto [dx, x] = pq.top();
            pq.pop();
            if (dx > dist_[x]) continue;
            if (x == g_.boundary()) continue;
            for (uint32_t e : g_.adjacency[x]) {
                const GraphEdge &ge = g_.edges[e];
                if (std::isinf(ge.weight)) continue;
                uint32_t y = ge.u == x ? ge.v : ge.u;
                double nd = dx + ge.weight;
                if (stamp_[y] != epoch_ || nd < dist_[y]) {
                    stamp_[y] = epoch_;
                    dist_[y] = nd;
                    obs_[y] = obs_[x] ^ ge.observables;
                    pq.push({nd, y});
                }
            }
        }
    }

    const DecodingGraph &g_;
    std::vector<double> dist_;
    std::vector<uint64_t> obs_;
    std::vector<uint64_t> stamp_;
    uint64_t epoch_ = 0;
};

}  // namespace

std::unique_ptr<Decoder> make_decoder(const DecodingGraph &g, DecoderKind kind) {
    if (kind == DecoderKind::kMatching) return std::make_unique<Matching>(g);
    return std::make_unique<UnionFind>(g);
}

uint64_t decode(const DecodingGraph &g, const std::vector<uint8_t> &syndrome, DecoderKind kind) {
    if (syndrome.size() != g.num_detectors) {
        throw std::invalid_argument("syndrome length " + std::to_string(syndrome.size()) + " does not match " +
                                    std::to_string(g.num_detectors) + " detectors");
    }
    std::vector<uint32_t> defects;
    for (uint32_t i = 0; i < syndrome.size(); i++) {
        if (syndrome[i]) defects.push_back(i);
    }
    return make_decoder(g, kind)->decode(defects);
}

std::vector<uint64_t> decode_batch(const DecodingGraph &g, const DetectorSamples &s, DecoderKind kind, int threads) {
    if (s.num_detectors != g.num_detectors) throw std::invalid_argument("sample width does not match the graph");
    std::vector<uint64_t> out(s.shots, 0);
    threads = std::max(1, std::min<int>(threads, (int)std::max<uint64_t>(1, s.shots / 256)));
    auto work = [&](uint64_t lo, uint64_t hi) {
        auto dec = make_decoder(g, kind);
        std::vector<uint32_t> defects;
        for (uint64_t shot = lo; shot < hi; shot++) {
            defects.clear();
            const uint64_t *row = s.det_row(shot);
            for (size_t w = 0; w < s.det_words; w++) {
                uint64_t bits = row[w];
                while (bits) {
                    defects.push_back((uint32_t)(w * 64 + __builtin_ctzll(bits)));
                    bits &= bits - 1;
                }
            }
            out[shot] = dec->decode(defects);
        }
    };
    if (threads == 1) {
        work(0, s.shots);
        return out;
    }
    std::vector<std::thread> pool;
    uint64_t per = (s.shots + threads - 1) / threads;
    for (int t = 0; t < threads; t++) {
        uint64_t lo = std::min<uint64_t>(s.shots, t * per), hi = std::min<uint64_t>(s.shots, lo + per);
        pool.emplace_back(work, lo, hi);
    }
    for (auto &th : pool) th.join();
    return out;
}

Interval wilson_interval(uint64_t failures, uint64_t shots, double z) {
    if (shots == 0) return {0, 1};
    double n = (double)shots, p = (double)failures / n, z2 = z * z;
    double denom = 1 + z2 / n;
    double center = (p + z2 / (2 * n)) / denom;
    double half = z / denom * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    Interval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
    if (failures == 0) ci.low = 0;
    if (failures == shots) ci.high = 1;
    return ci;
}

double combine_bases(double p_x, double p_z) { return 1 - (1 - p_x) * (1 - p_z); }

BasisEstimate estimate_basis(const StabilizerCircuit &c, uint64_t shots, uint64_t seed, const LerOptions &opt) {
    FrameSampler fs = compile(c);
    DecodingGraph g = build_graph(extract_dem(c));
    uint64_t mask = fs.num_observables >= 64 ? ~0ULL : ((1ULL << fs.num_observables) - 1);
    BasisEstimate r;
    r.shots = shots;
    constexpr uint64_t kChunk = 1 << 16;
    for (uint64_t k = 0, done = 0; done < shots; k++) {
        uint64_t n = std::min(kChunk, shots - done);
        DetectorSamples s = sample(fs, n, derive_seed(seed, k), opt.threads);
        std::vector<uint64_t> pred = decode_batch(g, s, opt.decoder, opt.threads);
        for (uint64_t i = 0; i < n; i++) r.failures += ((pred[i] ^ s.obs_mask(i)) & mask) != 0;
        done += n;
    }
    r.p = shots ? (double)r.failures / (double)shots : 0;
    r.ci = wilson_interval(r.failures, shots);
    return r;
}

LerEstimate estimate_ler(const StabilizerCircuit &circuit_x, const StabilizerCircuit &circuit_z, uint64_t shots,
                         uint64_t seed, const LerOptions &opt) {
    if (shots < 1000) throw std::invalid_argument("estimate_ler needs at least 1000 shots per basis");
    LerEstimate e;
    e.x = estimate_basis(circuit_x, shots, derive_seed(seed, 0), opt);
    e.z = estimate_basis(circuit_z, shots, derive_seed(seed, 1), opt);
    e.shots = e.x.shots + e.z.shots;
    e.failures = e.x.failures + e.z.failures;
    e.p_L = combine_bases(e.x.p, e.z.p);
    // Both bounds are monotone in each basis rate.
    e.ci = {combine_bases(e.x.ci.low, e.z.ci.low), combine_bases(e.x.ci.high, e.z.ci.high)};
    return e;
}

nlohmann::json to_json(const LerEstimate &e) {
    auto basis = [](const BasisEstimate &b) {
        return nlohmann::json{{"shots", b.shots}, {"failures", b.failures}, {"p", b.p}, {"ci_low", b.ci.low},
                              {"ci_high", b.ci.high}};
    };
    return nlohmann::json{{"shots", e.shots},     {"failures", e.failures},   {"p_L", e.p_L},
                          {"ci_low", e.ci.low},   {"ci_high", e.ci.high},     {"X", basis(e.x)},
                          {"Z", basis(e.z)}};
}

}  // namespace snaq
