#include "snaq/schedule.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace snaq {

namespace {

constexpr int64_t kForever = std::numeric_limits<int64_t>::max() / 4;

const char *kOpNames[] = {"INIT", "MEASURE", "CNOT", "H", "SHUTTLE", "IDLE", "T_INJECT", "S_FOLD"};

std::string dot_str(const Dot &d) {
    return "(" + std::to_string(d.row) + "," + std::to_string(d.col) + ")";
}

}  // namespace

const char *op_name(OpKind k) { return kOpNames[(int)k]; }

OpKind op_from_name(const std::string &name) {
    for (int i = 0; i < 8; i++) {
        if (name == kOpNames[i]) {
            return (OpKind)i;
        }
    }
    throw std::invalid_argument("unknown instruction kind '" + name + "'");
}

const char *mode_name(ScheduleMode m) {
    switch (m) {
        case ScheduleMode::kNonPipelined:
            return "non_pipelined";
        case ScheduleMode::kPipelined:
            return "pipelined";
        case ScheduleMode::kBothEdges:
            return "both_edges";
    }
    return "?";
}

ScheduleMode mode_from_name(const std::string &name) {
    if (name == "non_pipelined") return ScheduleMode::kNonPipelined;
    if (name == "pipelined") return ScheduleMode::kPipelined;
    if (name == "both_edges") return ScheduleMode::kBothEdges;
    throw std::invalid_argument("unknown schedule mode '" + name + "'");
}

int SyndromeSchedule::num_stabilizers() const {
    int n = 0;
    for (const auto &p : patches) {
        n += (int)p.stabilizers.size();
    }
    return n;
}

int SyndromeSchedule::patch_of_stabilizer(int global) const {
    for (size_t p = patches.size(); p-- > 0;) {
        if (global >= stab_offset[p]) {
            return (int)p;
        }
    }
    throw std::out_of_range("stabilizer index out of range");
}

const Stabilizer &SyndromeSchedule::stabilizer(int global) const {
    int p = patch_of_stabilizer(global);
    return patches[p].stabilizers.at(global - stab_offset[p]);
}

int SyndromeSchedule::data_qubit(int patch, int index) const {
    int q = index;
    for (int p = 0; p < patch; p++) {
        q += (int)patches[p].data_sites.size();
    }
    return q;
}

// Hook-safe zigzag: X checks run N-shaped, Z checks run Z-shaped, so the last
// two CNOTs of an ancilla never align with the logical of its own type.
std::vector<Corner> corner_order(PauliType t) {
    if (t == PauliType::X) {
        return {kNW, kNE, kSW, kSE};
    }
    return {kNW, kSW, kNE, kSE};
}

int corner_layer(PauliType t, Corner c) {
    // Ancilla sits at home_a in layers 1, 2, 4 and at home_b in layers 3, 5.
    static const int x_layer[4] = {1, 4, 3, 5};  // NW SW NE SE
    static const int z_layer[4] = {1, 2, 3, 5};
    return t == PauliType::X ? x_layer[c] : z_layer[c];
}

namespace {

struct Hold {
    int64_t a;
    int64_t b;
    int owner;
};

// Exact occupancy intervals per dot.
class Reservations {
  public:
    // Smallest end among holds of other owners overlapping [a, b), or -1.
    int64_t conflict(const Dot &d, int64_t a, int64_t b, int owner) const {
        auto it = table_.find(key(d));
        if (it == table_.end()) {
            return -1;
        }
        int64_t best = -1;
        for (const Hold &h : it->second) {
            if (h.owner != owner && h.a < b && a < h.b) {
                best = best < 0 ? h.b : std::min(best, h.b);
            }
        }
        return best;
    }

    void add(const Dot &d, int64_t a, int64_t b, int owner) {
        if (b > a) {
            table_[key(d)].push_back(Hold{a, b, owner});
        }
    }

    void release(const Dot &d, int owner, int64_t t) {
        auto &v = table_[key(d)];
        for (Hold &h : v) {
            if (h.owner == owner && h.b == kForever) {
                h.b = t;
            }
        }
    }

    void prune(int64_t t) {
        for (auto &kv : table_) {
            auto &v = kv.second;
            v.erase(std::remove_if(v.begin(), v.end(), [&](const Hold &h) { return h.b <= t; }), v.end());
        }
    }

  private:
    static int64_t key(const Dot &d) { return ((int64_t)d.row << 32) ^ (uint32_t)d.col; }
    std::unordered_map<int64_t, std::vector<Hold>> table_;
};

// Per-position hold windows of a shuttle departing at dep. The last position
// is held forever unless the shuttle ends in a port.
struct Window {
    int64_t a;
    int64_t b;
};

std::vector<Window> shuttle_windows(size_t n, int64_t dep, int64_t ts, bool from_port, bool to_port,
                                    int64_t extra) {
    int hops = (int)n - 1 + (from_port ? 1 : 0) + (to_port ? 1 : 0);
    int off = from_port ? 1 : 0;
    std::vector<Window> w(n);
    for (size_t k = 0; k < n; k++) {
        int64_t reach = dep + ((int64_t)k + off) * ts;
        int64_t a = (k == 0 && !from_port) ? dep : reach;
        int64_t b;
        if (k + 1 < n) {
            b = dep + ((int64_t)k + 1 + off) * ts + extra;
        } else if (to_port) {
            b = dep + (int64_t)hops * ts + extra;
        } else {
            b = kForever;
        }
        w[k] = Window{a, b};
    }
    return w;
}

// Vertical run along a lane followed by a horizontal run along a row.
std::vector<Dot> lane_path(int lane, int port_row, const Dot &dest) {
    std::vector<Dot> p;
    int step = dest.row >= port_row ? 1 : -1;
    for (int r = port_row; r != dest.row; r += step) {
        p.push_back(Dot{r, lane});
    }
    int cstep = dest.col >= lane ? 1 : -1;
    for (int c = lane; c != dest.col; c += cstep) {
        p.push_back(Dot{dest.row, c});
    }
    p.push_back(dest);
    return p;
}

class Builder {
  public:
    Builder(const std::vector<CodePatch> &patches, const TimingParams &timing, ScheduleMode mode) {
        timing.validate();
        s_.patches = patches;
        s_.mode = mode;
        s_.timing = timing;
        t_ = timing;
        int off = 0;
        lane_l_ = std::numeric_limits<int>::max();
        lane_r_ = std::numeric_limits<int>::min();
        for (size_t p = 0; p < patches.size(); p++) {
            s_.stab_offset.push_back(off);
            off += (int)patches[p].stabilizers.size();
            lane_l_ = std::min(lane_l_, patches[p].lane_left);
            lane_r_ = std::max(lane_r_, patches[p].lane_right);
            for (size_t i = 0; i < patches[p].data_sites.size(); i++) {
                new_qubit(QubitRole::kData, (int)p, (int)i);
            }
        }
        pool_.resize(off);
    }

    int lane_length() const { return lane_r_ - lane_l_ + 1; }
    int64_t sweep() const { return t_.buffer_factor * lane_length() * t_.t_shuttle; }
    const TimingParams &timing() const { return t_; }
    SyndromeSchedule &sched() { return s_; }

    int new_qubit(QubitRole role, int patch, int index) {
        s_.qubits.push_back(QubitInfo{role, patch, index});
        pos_.push_back(Dot{-1, -1});
        free_at_.push_back(0);
        return (int)s_.qubits.size() - 1;
    }

    // Data qubits resting on their sites for the whole schedule.
    void park_data_static() {
        for (size_t p = 0; p < s_.patches.size(); p++) {
            for (size_t i = 0; i < s_.patches[p].data_sites.size(); i++) {
                int q = s_.data_qubit((int)p, (int)i);
                const Dot &d = s_.patches[p].data_sites[i];
                s_.static_sites.push_back({q, d});
                res_.add(d, 0, kForever, q);
                pos_[q] = d;
            }
        }
    }

    void emit(TimedInstruction ins) { s_.instructions.push_back(std::move(ins)); }

    void prune(int64_t t) { res_.prune(t); }

    int64_t shuttle(int q, const std::vector<Dot> &path, int64_t earliest, bool from_port, bool to_port,
                    int64_t extra, int round, bool exact) {
        const int64_t ts = t_.t_shuttle;
        int hops = (int)path.size() - 1 + (from_port ? 1 : 0) + (to_port ? 1 : 0);
        if (hops <= 0) {
            throw std::logic_error("shuttle without movement");
        }
        int64_t dep = earliest;
        for (;;) {
            auto win = shuttle_windows(path.size(), dep, ts, from_port, to_port, extra);
            bool clear = true;
            for (size_t k = 0; k < path.size(); k++) {
                int64_t c = res_.conflict(path[k], win[k].a, win[k].b, q);
                if (c < 0) {
                    continue;
                }
                if (c >= kForever || exact) {
                    throw std::runtime_error("routing failure: channel row " + std::to_string(path[k].row) +
                                             " blocked at dot " + dot_str(path[k]) + " for qubit " +
                                             std::to_string(q));
                }
                dep = std::max(dep + 1, c - (win[k].a - dep));
                clear = false;
                break;
            }
            if (clear) {
                break;
            }
        }
        auto win = shuttle_windows(path.size(), dep, ts, from_port, to_port, extra);
        if (!from_port) {
            res_.release(path[0], q, dep);
        }
        for (size_t k = 0; k < path.size(); k++) {
            res_.add(path[k], win[k].a, win[k].b, q);
        }
        TimedInstruction ins;
        ins.kind = OpKind::kShuttle;
        ins.qubits = {q};
        ins.start_ns = dep;
        ins.duration_ns = hops * ts;
        ins.path = path;
        ins.hops = hops;
        ins.from_port = from_port;
        ins.to_port = to_port;
        ins.round = round;
        emit(ins);
        pos_[q] = to_port ? Dot{-1, -1} : path.back();
        return dep + hops * ts;
    }

    void port_op(OpKind kind, int q, int port, int64_t t, PauliType basis, int round, int stab) {
        TimedInstruction ins;
        ins.kind = kind;
        ins.qubits = {q};
        ins.start_ns = t;
        ins.duration_ns = kind == OpKind::kInit ? t_.t_init : t_.t_meas;
        ins.port = port;
        ins.basis = basis;
        ins.round = round;
        ins.stabilizer = stab;
        emit(ins);
        if (kind == OpKind::kMeasure) {
            free_at_[q] = t + t_.t_meas;
        }
    }

    // Ancilla for stabilizer a that is free by time t.
    int acquire(int a, int64_t t) {
        for (int q : pool_[a]) {
            if (free_at_[q] <= t) {
                free_at_[q] = kForever;
                return q;
            }
        }
        int q = new_qubit(QubitRole::kAncilla, s_.patch_of_stabilizer(a), a);
        pool_[a].push_back(q);
        free_at_[q] = kForever;
        return q;
    }

    int lane(Side side) const { return side == Side::kLeft ? lane_l_ : lane_r_; }

    struct Move {
        int q;
        std::vector<Dot> path;
    };

    // Group shuttle from ports onto the grid. Moves arrive in preference
    // order, except that nobody parks on a dot another pending move needs.
    int64_t dispatch_in(std::vector<Move> moves, int64_t t0, int round) {
        int64_t last = t0;
        while (!moves.empty()) {
            size_t pick = moves.size();
            for (size_t x = 0; x < moves.size() && pick == moves.size(); x++) {
                bool ok = true;
                for (size_t z = 0; z < moves.size() && ok; z++) {
                    if (z == x) continue;
                    const auto &pz = moves[z].path;
                    ok = std::find(pz.begin(), pz.end(), moves[x].path.back()) == pz.end();
                }
                if (ok) pick = x;
            }
            if (pick == moves.size()) {
                throw std::runtime_error("routing failure: cyclic channel dependency in channel row " +
                                         std::to_string(moves[0].path.back().row));
            }
            Move m = moves[pick];
            moves.erase(moves.begin() + pick);
            last = std::max(last, shuttle(m.q, m.path, t0, true, false, (t_.buffer_factor - 1) * t_.t_shuttle,
                                          round, false));
        }
        return last;
    }

    // Group shuttle from the grid into ports; arrival times per move.
    std::vector<int64_t> dispatch_out(std::vector<Move> moves, int64_t t0, int round) {
        std::vector<int64_t> arrive(moves.size());
        std::vector<size_t> idx(moves.size());
        for (size_t i = 0; i < idx.size(); i++) idx[i] = i;
        while (!idx.empty()) {
            size_t pick = idx.size();
            for (size_t x = 0; x < idx.size() && pick == idx.size(); x++) {
                bool ok = true;
                const auto &px = moves[idx[x]].path;
                for (size_t z = 0; z < idx.size() && ok; z++) {
                    if (z == x) continue;
                    ok = std::find(px.begin(), px.end(), moves[idx[z]].path.front()) == px.end();
                }
                if (ok) pick = x;
            }
            if (pick == idx.size()) {
                throw std::runtime_error("routing failure: cyclic channel dependency in channel row " +
                                         std::to_string(moves[idx[0]].path.front().row));
            }
            size_t i = idx[pick];
            idx.erase(idx.begin() + pick);
            arrive[i] = shuttle(moves[i].q, moves[i].path, t0, false, true,
                                (t_.buffer_factor - 1) * t_.t_shuttle, round, false);
        }
        return arrive;
    }

    Dot position(int q) const { return pos_[q]; }

  private:
    SyndromeSchedule s_;
    TimingParams t_;
    Reservations res_;
    std::vector<Dot> pos_;
    std::vector<int64_t> free_at_;
    std::vector<std::vector<int>> pool_;
    int lane_l_ = 0;
    int lane_r_ = 0;
};

struct RoundDriver {
    Builder &b;
    const WaveAssignment &w;
    std::vector<int> qubit_of;  // per stabilizer, ancilla in use this round

    bool both() const { return w.both_edges; }

    std::vector<Builder::Move> entry_moves(int k) {
        std::vector<Builder::Move> out;
        for (int a : w.members[k]) {
            const Stabilizer &st = b.sched().stabilizer(a);
            Side side = w.entry_side[a];
            out.push_back({qubit_of[a], lane_path(b.lane(side), w.ports[w.in_port[a]].row, st.home_a)});
        }
        return out;
    }

    std::vector<Builder::Move> exit_moves(int k, std::vector<int> &order) {
        order = w.members[k];
        auto &sch = b.sched();
        // Closest to the exit lane first.
        std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
            const Stabilizer &sx = sch.stabilizer(x);
            const Stabilizer &sy = sch.stabilizer(y);
            Side ex = both() ? w.entry_side[x] : Side::kRight;
            Side ey = both() ? w.entry_side[y] : Side::kRight;
            if (ex != ey) return ex < ey;
            if (sx.home_b.col != sy.home_b.col) {
                return ex == Side::kRight ? sx.home_b.col > sy.home_b.col : sx.home_b.col < sy.home_b.col;
            }
            return sx.home_b.row < sy.home_b.row;
        });
        std::vector<Builder::Move> out;
        for (int a : order) {
            const Stabilizer &st = sch.stabilizer(a);
            Side side = both() ? w.entry_side[a] : Side::kRight;
            auto p = lane_path(b.lane(side), w.ports[w.out_port[a]].row, st.home_b);
            std::reverse(p.begin(), p.end());
            out.push_back({qubit_of[a], p});
        }
        return out;
    }

    void inits(int k, int64_t t, int round) {
        for (int a : w.members[k]) {
            qubit_of[a] = b.acquire(a, t);
            b.port_op(OpKind::kInit, qubit_of[a], w.in_port[a], t, PauliType::Z, round, a);
        }
    }

    int64_t enter(int k, int64_t t0, int round) {
        int64_t last = b.dispatch_in(entry_moves(k), t0, round);
        return std::max(t0 + b.sweep(), last);
    }

    // Returns the window end; arrival times per member land in arrive.
    int64_t leave(int k, int64_t t0, int round, std::vector<int> &order, std::vector<int64_t> &arrive) {
        arrive = b.dispatch_out(exit_moves(k, order), t0, round);
        int64_t last = t0 + b.sweep();
        for (int64_t x : arrive) last = std::max(last, x);
        return last;
    }

    void measure(int a, int64_t t, int round) {
        b.port_op(OpKind::kMeasure, qubit_of[a], w.out_port[a], t, PauliType::Z, round, a);
    }

    int64_t cnot_phase(int64_t c, int round) {
        const TimingParams &t = b.timing();
        auto &sch = b.sched();
        int n = sch.num_stabilizers();
        auto hadamards = [&](int64_t at) {
            for (int a = 0; a < n; a++) {
                if (sch.stabilizer(a).type == PauliType::X) {
                    TimedInstruction h;
                    h.kind = OpKind::kH;
                    h.qubits = {qubit_of[a]};
                    h.start_ns = at;
                    h.duration_ns = t.t_h;
                    h.round = round;
                    h.stabilizer = a;
                    b.emit(h);
                }
            }
        };
        auto layer = [&](int l, int64_t at) {
            for (int a = 0; a < n; a++) {
                const Stabilizer &st = sch.stabilizer(a);
                int p = sch.patch_of_stabilizer(a);
                for (Corner c : corner_order(st.type)) {
                    if (st.corners[c] < 0 || corner_layer(st.type, c) != l) continue;
                    int dq = sch.data_qubit(p, st.corners[c]);
                    TimedInstruction g;
                    g.kind = OpKind::kCnot;
                    g.qubits = st.type == PauliType::X ? std::vector<int>{qubit_of[a], dq}
                                                       : std::vector<int>{dq, qubit_of[a]};
                    g.start_ns = at;
                    g.duration_ns = t.t_cnot;
                    g.round = round;
                    g.layer = l;
                    g.stabilizer = a;
                    b.emit(g);
                }
            }
        };
        auto shift = [&](int dir, int64_t at) {
            std::vector<int> order(n);
            for (int a = 0; a < n; a++) order[a] = a;
            // Vacate first so that nobody steps onto an occupied dot.
            std::sort(order.begin(), order.end(), [&](int x, int y) {
                Dot px = b.position(qubit_of[x]);
                Dot py = b.position(qubit_of[y]);
                if (px.row != py.row) return px.row < py.row;
                return dir > 0 ? px.col > py.col : px.col < py.col;
            });
            for (int a : order) {
                Dot from = b.position(qubit_of[a]);
                Dot to{from.row, from.col + dir};
                b.shuttle(qubit_of[a], {from, to}, at, false, false, 0, round, true);
            }
        };
        int64_t at = c;
        hadamards(at);
        at += t.t_h;
        layer(1, at);
        at += t.t_cnot;
        layer(2, at);
        at += t.t_cnot;
        shift(+1, at);
        at += t.t_shuttle;
        layer(3, at);
        at += t.t_cnot;
        shift(-1, at);
        at += t.t_shuttle;
        layer(4, at);
        at += t.t_cnot;
        shift(+1, at);
        at += t.t_shuttle;
        layer(5, at);
        at += t.t_cnot;
        hadamards(at);
        at += t.t_h;
        return at;
    }

    // One serialized round starting at t; returns the round end.
    int64_t serial_round(int64_t t, int round) {
        const TimingParams &tp = b.timing();
        b.prune(t);
        for (int k = 0; k < w.n_waves; k++) {
            inits(k, t, round);
            t = enter(k, t + tp.t_init, round);
        }
        b.sched().cnot_start.push_back(t);
        t = cnot_phase(t, round);
        for (int i = 0; i < w.n_waves; i++) {
            int k = both() ? w.n_waves - 1 - i : i;
            std::vector<int> order;
            std::vector<int64_t> arrive;
            int64_t end = leave(k, t, round, order, arrive);
            for (int a : order) measure(a, end, round);
            t = end + tp.t_meas;
        }
        return t;
    }
};

// Pipelined rounds: inits stream at the left ports, ancillas wait there until
// the channel clears, measurements queue at the right ports.
int64_t pipelined_rounds(RoundDriver &drv, int64_t t0, int rounds) {
    Builder &b = drv.b;
    const TimingParams &tp = b.timing();
    const WaveAssignment &w = drv.w;
    std::map<int, int64_t> in_free;
    std::map<int, int64_t> out_free;
    int64_t chan = t0;
    int64_t end = t0;
    for (int r = 0; r < rounds; r++) {
        b.prune(chan);
        std::vector<int64_t> ready(w.n_waves);
        for (int k = 0; k < w.n_waves; k++) {
            int64_t t = t0;
            for (int a : w.members[k]) t = std::max(t, in_free[w.in_port[a]]);
            drv.inits(k, t, r);
            for (int a : w.members[k]) in_free[w.in_port[a]] = t + tp.t_init;
            ready[k] = t + tp.t_init;
        }
        int64_t t = chan;
        for (int k = 0; k < w.n_waves; k++) {
            t = drv.enter(k, std::max(t, ready[k]), r);
        }
        b.sched().cnot_start.push_back(t);
        t = drv.cnot_phase(t, r);
        for (int k = 0; k < w.n_waves; k++) {
            std::vector<int> order;
            std::vector<int64_t> arrive;
            int64_t wend = drv.leave(k, t, r, order, arrive);
            for (size_t i = 0; i < order.size(); i++) {
                int a = order[i];
                int64_t m = std::max(arrive[i], out_free[w.out_port[a]]);
                drv.measure(a, m, r);
                out_free[w.out_port[a]] = m + tp.t_meas;
                end = std::max(end, m + tp.t_meas);
            }
            t = wend;
        }
        chan = t;
    }
    return end;
}

int64_t run_rounds(RoundDriver &drv, int64_t t0, int rounds, ScheduleMode mode) {
    if (mode == ScheduleMode::kPipelined) {
        return pipelined_rounds(drv, t0, rounds);
    }
    int64_t t = t0;
    for (int r = 0; r < rounds; r++) {
        t = drv.serial_round(t, r);
    }
    return t;
}

void check_waves(const std::vector<CodePatch> &patches, const WaveAssignment &w, ScheduleMode mode) {
    size_t n = 0;
    for (const auto &p : patches) n += p.stabilizers.size();
    if (w.wave_of.size() != n || (int)w.members.size() != w.n_waves || w.n_waves <= 0) {
        throw std::invalid_argument("wave assignment does not match the patches");
    }
    if ((mode == ScheduleMode::kBothEdges) != w.both_edges) {
        throw std::invalid_argument(std::string("wave assignment ") + (w.both_edges ? "uses" : "does not use") +
                                    " both edges but mode is " + mode_name(mode));
    }
}

// Sort, add IDLE fills and set the makespan.
void finish(SyndromeSchedule &s, bool fill_idle) {
    std::stable_sort(s.instructions.begin(), s.instructions.end(),
                     [](const TimedInstruction &a, const TimedInstruction &b) { return a.start_ns < b.start_ns; });
    int64_t makespan = 0;
    for (const auto &ins : s.instructions) makespan = std::max(makespan, ins.end_ns());
    s.makespan = makespan;
    if (fill_idle) {
        int nq = s.num_qubits();
        std::vector<std::vector<const TimedInstruction *>> per(nq);
        for (const auto &ins : s.instructions) {
            for (int q : ins.qubits) per[q].push_back(&ins);
        }
        std::vector<bool> is_static(nq, false);
        for (const auto &kv : s.static_sites) is_static[kv.first] = true;
        std::vector<TimedInstruction> idles;
        auto add_idle = [&](int q, int64_t a, int64_t b, int round) {
            if (b > a) {
                TimedInstruction ins;
                ins.kind = OpKind::kIdle;
                ins.qubits = {q};
                ins.start_ns = a;
                ins.duration_ns = b - a;
                ins.round = round;
                idles.push_back(ins);
            }
        };
        for (int q = 0; q < nq; q++) {
            if (per[q].empty()) continue;
            bool data = s.qubits[q].role == QubitRole::kData;
            int64_t cur = is_static[q] ? 0 : per[q].front()->start_ns;
            bool alive = data;
            for (const auto *ins : per[q]) {
                if (ins->kind == OpKind::kInit) alive = true;
                if (alive) add_idle(q, cur, ins->start_ns, ins->round);
                cur = std::max(cur, ins->end_ns());
                if (ins->kind == OpKind::kMeasure) alive = false;
            }
            if (is_static[q]) add_idle(q, cur, makespan, -1);
        }
        for (auto &i : idles) s.instructions.push_back(std::move(i));
        std::stable_sort(s.instructions.begin(), s.instructions.end(),
                         [](const TimedInstruction &a, const TimedInstruction &b) { return a.start_ns < b.start_ns; });
        s.idle_filled = true;
    }
}

}  // namespace

}  // namespace snaq

namespace snaq {

namespace {

void finalize_rounds(SyndromeSchedule &s, const WaveAssignment &w, int rounds) {
    s.rounds = rounds;
    s.waves = std::make_shared<const WaveAssignment>(w);
    s.ports = w.ports;
    s.capacity_per_side = w.capacity_per_side;
}

int64_t steady_period(const SyndromeSchedule &s, int64_t span_of_one) {
    if (s.cnot_start.size() < 2) {
        return span_of_one;
    }
    return (s.cnot_start.back() - s.cnot_start.front()) / (int64_t)(s.cnot_start.size() - 1);
}

}  // namespace

SyndromeSchedule build_se_rounds(const std::vector<CodePatch> &patches, const WaveAssignment &waves,
                                 const TimingParams &timing, ScheduleMode mode, int rounds) {
    if (rounds < 1) {
        throw std::invalid_argument("rounds must be >= 1, got " + std::to_string(rounds));
    }
    check_waves(patches, waves, mode);
    Builder b(patches, timing, mode);
    b.park_data_static();
    RoundDriver drv{b, waves, std::vector<int>(waves.wave_of.size(), -1)};
    run_rounds(drv, 0, rounds, mode);
    SyndromeSchedule s = std::move(b.sched());
    finalize_rounds(s, waves, rounds);
    finish(s, true);
    s.round_period = mode == ScheduleMode::kPipelined ? steady_period(s, s.makespan) : s.makespan / rounds;
    return s;
}

SyndromeSchedule build_se_round(const CodePatch &patch, const WaveAssignment &waves, const TimingParams &timing,
                                ScheduleMode mode) {
    return build_se_rounds({patch}, waves, timing, mode, mode == ScheduleMode::kPipelined ? 3 : 1);
}

SyndromeSchedule build_memory_experiment(const DotArray &array, const CodePatch &patch, int rounds, PauliType basis,
                                         const WaveAssignment &waves, const TimingParams &timing, ScheduleMode mode) {
    if (rounds < 1) {
        throw std::invalid_argument("rounds must be >= 1, got " + std::to_string(rounds));
    }
    std::vector<CodePatch> patches{patch};
    check_waves(patches, waves, mode);
    Builder b(patches, timing, mode);
    const TimingParams &tp = b.timing();
    WaveAssignment dw = assign_data_waves(array, patch);

    // Serialized transversal init through both edges, deepest first.
    int64_t t = 0;
    for (int k = 0; k < dw.n_waves; k++) {
        std::vector<Builder::Move> moves;
        for (int q : dw.members[k]) {
            b.port_op(OpKind::kInit, q, dw.in_port[q], t, basis, -1, -1);
            moves.push_back({q, lane_path(b.lane(dw.entry_side[q]), dw.ports[dw.in_port[q]].row,
                                          patch.data_sites[q])});
        }
        int64_t g0 = t + tp.t_init;
        t = std::max(g0 + b.sweep(), b.dispatch_in(moves, g0, -1));
    }

    RoundDriver drv{b, waves, std::vector<int>(waves.wave_of.size(), -1)};
    t = run_rounds(drv, t, rounds, mode);
    b.prune(t);

    // Serialized transversal readout, shallowest first.
    for (int k = dw.n_waves - 1; k >= 0; k--) {
        std::vector<int> order = dw.members[k];
        std::reverse(order.begin(), order.end());
        std::vector<Builder::Move> moves;
        for (int q : order) {
            auto p = lane_path(b.lane(dw.entry_side[q]), dw.ports[dw.out_port[q]].row, patch.data_sites[q]);
            std::reverse(p.begin(), p.end());
            moves.push_back({q, p});
        }
        auto arrive = b.dispatch_out(moves, t, -1);
        int64_t end = t + b.sweep();
        for (int64_t x : arrive) end = std::max(end, x);
        for (int q : order) {
            b.port_op(OpKind::kMeasure, q, dw.out_port[q], end, basis, -1, -1);
        }
        t = end + tp.t_meas;
    }

    SyndromeSchedule s = std::move(b.sched());
    finalize_rounds(s, waves, rounds);
    s.memory = true;
    s.basis = basis;
    finish(s, true);
    if (mode == ScheduleMode::kPipelined) {
        s.round_period = steady_period(s, s.makespan);
    } else {
        s.round_period = rounds > 1 ? steady_period(s, 0) : 0;
    }
    return s;
}

SyndromeSchedule build_tcnot(const CodePatch &a, const CodePatch &b, int separation_s, const TimingParams &timing,
                             bool one_way) {
    if (a.data_rows != b.data_rows || a.data_cols != b.data_cols) {
        throw std::invalid_argument("tCNOT patches must be congruent");
    }
    if (separation_s < 0) {
        throw std::invalid_argument("separation must be nonnegative, got " + std::to_string(separation_s));
    }
    timing.validate();
    int d = a.distance;
    int64_t m = std::llround(timing.c_route * (double)(separation_s + d));
    if (m < 1) {
        throw std::invalid_argument("tCNOT shuttle distance must be at least one hop");
    }
    SyndromeSchedule s;
    s.mode = ScheduleMode::kNonPipelined;
    s.timing = timing;
    s.patches = {a, b};
    s.stab_offset = {0, (int)a.stabilizers.size()};
    int n = (int)a.data_sites.size();
    for (int p = 0; p < 2; p++) {
        for (int i = 0; i < n; i++) s.qubits.push_back(QubitInfo{QubitRole::kData, p, i});
    }
    // Rigid lockstep translation: qubits of one column stay two rows apart.
    auto run = [&](int q, const Dot &from, int64_t start, int dir) {
        TimedInstruction ins;
        ins.kind = OpKind::kShuttle;
        ins.qubits = {q};
        ins.start_ns = start;
        ins.duration_ns = m * timing.t_shuttle;
        ins.hops = (int)m;
        for (int64_t k = 0; k <= m; k++) ins.path.push_back(Dot{from.row + dir * (int)k, from.col});
        s.instructions.push_back(ins);
    };
    int64_t go = m * timing.t_shuttle;
    for (int i = 0; i < n; i++) {
        run(i, a.data_sites[i], 0, +1);
        TimedInstruction g;
        g.kind = OpKind::kCnot;
        g.qubits = {i, n + i};
        g.start_ns = go;
        g.duration_ns = timing.t_cnot;
        g.layer = 1;
        s.instructions.push_back(g);
        if (!one_way) {
            Dot there{a.data_sites[i].row + (int)m, a.data_sites[i].col};
            run(i, there, go + timing.t_cnot, -1);
        }
    }
    finish(s, false);
    return s;
}

SyndromeSchedule build_lattice_surgery(const DotArray &array, const CodePatch &a, const CodePatch &b,
                                       int separation_s, const TimingParams &timing) {
    if (a.distance != b.distance || a.data_cols != b.data_cols) {
        throw std::invalid_argument("lattice surgery patches must have the same distance");
    }
    int d = a.distance;
    if (array.width < 2 * d + 3) {
        throw std::invalid_argument("lattice surgery requires two-column layout (width " +
                                    std::to_string(array.width) + " < 2d+3=" + std::to_string(2 * d + 3) + ")");
    }
    std::vector<CodePatch> region = ls_region(d, separation_s);
    DotArray local = build_array(2 * d + 3, ls_region_rows(d, separation_s), array.rho);
    WaveAssignment w = assign_waves(local, region);
    return build_se_rounds(region, w, timing, ScheduleMode::kPipelined, d);
}

ValidationReport validate(const SyndromeSchedule &s) {
    ValidationReport rep;
    int nq = s.num_qubits();
    auto fail = [&](bool &flag, const std::string &msg) {
        flag = false;
        if (rep.errors.size() < 50) rep.errors.push_back(msg);
    };

    // Occupancy, derived from shuttles and static sites.
    std::map<std::pair<int, int>, std::vector<Hold>> occ;
    auto hold = [&](const Dot &d, int64_t a, int64_t b, int q) {
        if (b > a) occ[{d.row, d.col}].push_back(Hold{a, b, q});
    };
    for (const auto &kv : s.static_sites) hold(kv.second, 0, kForever, kv.first);
    std::vector<std::vector<const TimedInstruction *>> moves(nq);
    for (const auto &ins : s.instructions) {
        for (int q : ins.qubits) {
            if (q < 0 || q >= nq) {
                fail(rep.idle_ok, std::string("instruction ") + op_name(ins.kind) + " names unknown qubit " +
                                      std::to_string(q));
            }
        }
        if (ins.kind == OpKind::kShuttle && !ins.qubits.empty() && ins.qubits[0] >= 0 && ins.qubits[0] < nq) {
            moves[ins.qubits[0]].push_back(&ins);
        }
    }
    for (int q = 0; q < nq; q++) {
        auto &v = moves[q];
        for (size_t i = 0; i < v.size(); i++) {
            const auto &ins = *v[i];
            if (ins.path.empty()) continue;
            auto win = shuttle_windows(ins.path.size(), ins.start_ns, s.timing.t_shuttle, ins.from_port, ins.to_port, 0);
            if (!ins.to_port) {
                win.back().b = i + 1 < v.size() ? v[i + 1]->start_ns : kForever;
            }
            for (size_t k = 0; k < ins.path.size(); k++) hold(ins.path[k], win[k].a, win[k].b, q);
        }
    }
    for (auto &kv : occ) {
        auto &v = kv.second;
        std::sort(v.begin(), v.end(), [](const Hold &x, const Hold &y) { return x.a < y.a; });
        std::vector<Hold> active;
        for (const Hold &h : v) {
            active.erase(std::remove_if(active.begin(), active.end(), [&](const Hold &x) { return x.b <= h.a; }),
                         active.end());
            for (const Hold &x : active) {
                if (x.owner != h.owner) {
                    fail(rep.collision_free, "collision at dot (" + std::to_string(kv.first.first) + "," +
                                                 std::to_string(kv.first.second) + ") between qubits " +
                                                 std::to_string(x.owner) + " and " + std::to_string(h.owner) +
                                                 " at t=" + std::to_string(h.a));
                    break;
                }
            }
            active.push_back(h);
        }
    }

    // Ports: one operation per port at a time, bounded concurrency per side.
    std::map<int, std::vector<std::pair<int64_t, int64_t>>> per_port;
    std::vector<std::pair<int64_t, int>> events[2];
    for (const auto &ins : s.instructions) {
        if ((ins.kind != OpKind::kInit && ins.kind != OpKind::kMeasure) || ins.port < 0) continue;
        if (ins.port >= (int)s.ports.size()) {
            fail(rep.ports_ok, "unknown port " + std::to_string(ins.port));
            continue;
        }
        per_port[ins.port].push_back({ins.start_ns, ins.end_ns()});
        int side = (int)s.ports[ins.port].side;
        events[side].push_back({ins.start_ns, +1});
        events[side].push_back({ins.end_ns(), -1});
    }
    for (auto &kv : per_port) {
        auto &v = kv.second;
        std::sort(v.begin(), v.end());
        for (size_t i = 1; i < v.size(); i++) {
            if (v[i].first < v[i - 1].second) {
                fail(rep.ports_ok, "port " + std::to_string(kv.first) + " double-booked at t=" +
                                       std::to_string(v[i].first));
                break;
            }
        }
    }
    if (s.capacity_per_side > 0) {
        for (int side = 0; side < 2; side++) {
            auto &e = events[side];
            std::sort(e.begin(), e.end());  // ends (-1) sort before starts at equal times
            int cur = 0;
            for (const auto &x : e) {
                cur += x.second;
                if (cur > s.capacity_per_side) {
                    fail(rep.ports_ok, std::string(side_name((Side)side)) + " side runs " + std::to_string(cur) +
                                           " port operations at t=" + std::to_string(x.first) + ", capacity " +
                                           std::to_string(s.capacity_per_side));
                    break;
                }
            }
        }
    }

    // CNOT order and once-per-round init/measure.
    if (s.rounds > 0 && !s.patches.empty() && s.num_stabilizers() > 0 && s.waves) {
        int ns = s.num_stabilizers();
        std::vector<std::vector<const TimedInstruction *>> cn((size_t)s.rounds * ns);
        std::vector<int> inits((size_t)s.rounds * ns, 0);
        std::vector<int> meas((size_t)s.rounds * ns, 0);
        std::vector<int64_t> init_t((size_t)s.rounds * ns, 0);
        std::vector<int64_t> meas_t((size_t)s.rounds * ns, 0);
        for (const auto &ins : s.instructions) {
            if (ins.stabilizer < 0 || ins.round < 0 || ins.round >= s.rounds || ins.stabilizer >= ns) continue;
            size_t key = (size_t)ins.round * ns + ins.stabilizer;
            if (ins.kind == OpKind::kCnot) cn[key].push_back(&ins);
            if (ins.kind == OpKind::kInit) inits[key]++, init_t[key] = ins.end_ns();
            if (ins.kind == OpKind::kMeasure) meas[key]++, meas_t[key] = ins.start_ns;
        }
        for (int r = 0; r < s.rounds; r++) {
            for (int a = 0; a < ns; a++) {
                size_t key = (size_t)r * ns + a;
                std::string tag = "stabilizer " + std::to_string(a) + " round " + std::to_string(r);
                if (inits[key] != 1 || meas[key] != 1) {
                    fail(rep.cnot_order_ok, tag + " has " + std::to_string(inits[key]) + " inits and " +
                                                std::to_string(meas[key]) + " measurements");
                    continue;
                }
                const Stabilizer &st = s.stabilizer(a);
                int p = s.patch_of_stabilizer(a);
                std::vector<int> want;
                for (Corner c : corner_order(st.type)) {
                    if (st.corners[c] >= 0) want.push_back(s.data_qubit(p, st.corners[c]));
                }
                auto &v = cn[key];
                std::stable_sort(v.begin(), v.end(), [](auto *x, auto *y) { return x->start_ns < y->start_ns; });
                std::vector<int> got;
                int64_t prev_end = init_t[key];
                bool timely = true;
                for (const auto *g : v) {
                    got.push_back(st.type == PauliType::X ? g->qubits[1] : g->qubits[0]);
                    timely = timely && g->start_ns >= prev_end;
                    prev_end = g->end_ns();
                }
                timely = timely && prev_end <= meas_t[key];
                if (got != want || !timely) {
                    fail(rep.cnot_order_ok, tag + " CNOTs out of hook-safe order");
                }
            }
        }
    }

    // Per-qubit accounting: no overlapping operations; IDLE covers the gaps.
    rep.idle_ns.assign(nq, 0);
    std::vector<std::vector<const TimedInstruction *>> per(nq);
    for (const auto &ins : s.instructions) {
        for (int q : ins.qubits) {
            if (q >= 0 && q < nq) per[q].push_back(&ins);
        }
    }
    std::vector<bool> is_static(nq, false);
    for (const auto &kv : s.static_sites) is_static[kv.first] = true;
    for (int q = 0; q < nq; q++) {
        auto &v = per[q];
        std::stable_sort(v.begin(), v.end(), [](auto *x, auto *y) { return x->start_ns < y->start_ns; });
        int64_t cur = v.empty() ? 0 : (is_static[q] ? 0 : v.front()->start_ns);
        bool alive = s.qubits[q].role == QubitRole::kData;
        int64_t gaps = 0;
        for (const auto *ins : v) {
            if (ins->kind == OpKind::kInit) alive = true;
            if (ins->start_ns < cur) {
                fail(rep.idle_ok, "qubit " + std::to_string(q) + " has overlapping operations at t=" +
                                      std::to_string(ins->start_ns));
            } else if (alive) {
                gaps += ins->start_ns - cur;
            }
            if (ins->kind == OpKind::kIdle) rep.idle_ns[q] += ins->duration_ns;
            cur = std::max(cur, ins->end_ns());
            if (ins->kind == OpKind::kMeasure) alive = false;
        }
        if (is_static[q]) gaps += std::max<int64_t>(0, s.makespan - cur);
        if (s.idle_filled && gaps > 0) {
            fail(rep.idle_ok, "qubit " + std::to_string(q) + " has " + std::to_string(gaps) + " ns without IDLE");
        }
        if (!s.idle_filled) rep.idle_ns[q] = gaps;
        if (s.qubits[q].role == QubitRole::kData && s.rounds > 0) {
            rep.max_data_idle_per_round = std::max(rep.max_data_idle_per_round, rep.idle_ns[q] / s.rounds);
        }
    }
    return rep;
}

nlohmann::json to_json(const SyndromeSchedule &s) {
    nlohmann::json ev = nlohmann::json::array();
    for (const auto &ins : s.instructions) {
        nlohmann::json e = {{"kind", op_name(ins.kind)},
                            {"qubits", ins.qubits},
                            {"start_ns", ins.start_ns},
                            {"duration_ns", ins.duration_ns}};
        if (ins.round >= 0) e["round"] = ins.round;
        if (ins.kind == OpKind::kShuttle) {
            nlohmann::json path = nlohmann::json::array();
            for (const Dot &d : ins.path) path.push_back({d.row, d.col});
            e["path"] = path;
            e["hops"] = ins.hops;
        }
        if (ins.port >= 0) e["port"] = ins.port;
        if (ins.kind == OpKind::kCnot && ins.layer > 0) e["layer"] = ins.layer;
        ev.push_back(e);
    }
    return {{"mode", mode_name(s.mode)},
            {"rounds", s.rounds},
            {"makespan_ns", s.makespan},
            {"round_period_ns", s.round_period},
            {"num_qubits", s.num_qubits()},
            {"events", ev}};
}

std::string to_gantt_csv(const SyndromeSchedule &s) {
    std::ostringstream out;
    out << "qubit,kind,start_ns,end_ns,round\n";
    for (const auto &ins : s.instructions) {
        for (int q : ins.qubits) {
            out << q << ',' << op_name(ins.kind) << ',' << ins.start_ns << ',' << ins.end_ns() << ',' << ins.round
                << '\n';
        }
    }
    return out.str();
}

}  // namespace snaq
