#include "snaq/circuit.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace snaq {

namespace {

struct GateInfo {
    Gate gate;
    const char *name;
};

const GateInfo kGates[] = {
    {Gate::kQubitCoords, "QUBIT_COORDS"},
    {Gate::kR, "R"},
    {Gate::kRX, "RX"},
    {Gate::kH, "H"},
    {Gate::kCX, "CX"},
    {Gate::kM, "M"},
    {Gate::kMX, "MX"},
    {Gate::kXError, "X_ERROR"},
    {Gate::kZError, "Z_ERROR"},
    {Gate::kDepolarize1, "DEPOLARIZE1"},
    {Gate::kDepolarize2, "DEPOLARIZE2"},
    {Gate::kDetector, "DETECTOR"},
    {Gate::kObservableInclude, "OBSERVABLE_INCLUDE"},
    {Gate::kTick, "TICK"},
};

bool is_measure(Gate g) { return g == Gate::kM || g == Gate::kMX; }

}  // namespace

const char *gate_name(Gate g) {
    for (const auto &gi : kGates) {
        if (gi.gate == g) return gi.name;
    }
    return "?";
}

bool is_noise(Gate g) {
    return g == Gate::kXError || g == Gate::kZError || g == Gate::kDepolarize1 || g == Gate::kDepolarize2;
}

uint32_t StabilizerCircuit::num_measurements() const {
    uint32_t n = 0;
    for (const auto &op : ops) {
        if (is_measure(op.gate)) n += (uint32_t)op.targets.size();
    }
    return n;
}

uint32_t StabilizerCircuit::num_detectors() const {
    uint32_t n = 0;
    for (const auto &op : ops) n += op.gate == Gate::kDetector;
    return n;
}

uint32_t StabilizerCircuit::num_observables() const {
    uint32_t n = 0;
    for (const auto &op : ops) {
        if (op.gate == Gate::kObservableInclude) n = std::max(n, (uint32_t)op.p() + 1);
    }
    return n;
}

std::vector<std::vector<uint32_t>> StabilizerCircuit::detectors() const {
    std::vector<std::vector<uint32_t>> out;
    for (const auto &op : ops) {
        if (op.gate == Gate::kDetector) out.push_back(op.targets);
    }
    return out;
}

void StabilizerCircuit::append(Gate g, std::vector<uint32_t> targets, std::vector<double> args) {
    for (uint32_t t : targets) {
        if (g != Gate::kDetector && g != Gate::kObservableInclude) num_qubits = std::max(num_qubits, t + 1);
    }
    bool mergeable = g != Gate::kDetector && g != Gate::kObservableInclude && g != Gate::kTick &&
                     g != Gate::kQubitCoords;
    if (mergeable && !ops.empty() && ops.back().gate == g && ops.back().args == args) {
        auto &v = ops.back().targets;
        v.insert(v.end(), targets.begin(), targets.end());
        return;
    }
    ops.push_back(CircuitOp{g, std::move(targets), std::move(args)});
}

double idle_probability(int64_t duration_ns, const NoiseParams &noise) {
    double us = (double)duration_ns / 1000.0;
    if (noise.linear_idle) return us * noise.p_id;
    return -std::expm1(us * std::log1p(-noise.p_id));
}

StabilizerCircuit lower(const SyndromeSchedule &schedule, const NoiseParams &noise) {
    noise.validate();
    ValidationReport rep = validate(schedule);
    if (!rep.ok()) {
        throw std::invalid_argument("schedule failed validation: " +
                                    (rep.errors.empty() ? std::string("unknown") : rep.errors[0]));
    }
    StabilizerCircuit c;
    c.duration_ns = schedule.makespan;
    c.num_qubits = (uint32_t)schedule.num_qubits();

    // Coordinates: data sites and stabilizer homes.
    for (int q = 0; q < schedule.num_qubits(); q++) {
        const QubitInfo &qi = schedule.qubits[q];
        Dot d = qi.role == QubitRole::kData ? schedule.patches[qi.patch].data_sites[qi.index]
                                            : schedule.stabilizer(qi.index).home_a;
        c.append(Gate::kQubitCoords, {(uint32_t)q}, {(double)d.col, (double)d.row});
    }

    auto noise_op = [&](Gate g, std::vector<uint32_t> t, double p) {
        if (p > 0) c.append(g, std::move(t), {p});
    };
    int ns = schedule.num_stabilizers();
    std::vector<int64_t> stab_meas((size_t)std::max(schedule.rounds, 0) * ns, -1);
    std::map<int, uint32_t> data_meas;
    uint32_t nm = 0;

    for (const auto &ins : schedule.instructions) {
        std::vector<uint32_t> q(ins.qubits.begin(), ins.qubits.end());
        switch (ins.kind) {
            case OpKind::kInit:
                if (ins.basis == PauliType::X) {
                    c.append(Gate::kRX, q);
                    noise_op(Gate::kZError, q, noise.p_g);
                } else {
                    c.append(Gate::kR, q);
                    noise_op(Gate::kXError, q, noise.p_g);
                }
                break;
            case OpKind::kMeasure: {
                Gate g = ins.basis == PauliType::X ? Gate::kMX : Gate::kM;
                c.append(g, q, noise.p_g > 0 ? std::vector<double>{noise.p_g} : std::vector<double>{});
                if (ins.stabilizer >= 0 && ins.round >= 0) {
                    stab_meas[(size_t)ins.round * ns + ins.stabilizer] = nm;
                } else if (schedule.qubits[ins.qubits[0]].role == QubitRole::kData) {
                    data_meas[ins.qubits[0]] = nm;
                }
                nm++;
                break;
            }
            case OpKind::kH:
                c.append(Gate::kH, q);
                noise_op(Gate::kDepolarize1, q, noise.p_g / 10);
                break;
            case OpKind::kCnot:
                c.append(Gate::kCX, q);
                noise_op(Gate::kDepolarize2, q, noise.p_g);
                break;
            case OpKind::kShuttle: {
                double p = ins.hops * noise.p_sh;
                if (p >= 1) {
                    throw std::invalid_argument("shuttle of " + std::to_string(ins.hops) +
                                                " hops gives error probability m*p_sh >= 1");
                }
                noise_op(Gate::kDepolarize1, q, p);
                break;
            }
            case OpKind::kIdle: {
                double p = idle_probability(ins.duration_ns, noise);
                if (p >= 1) {
                    throw std::invalid_argument("idle of " + std::to_string(ins.duration_ns) +
                                                " ns gives error probability >= 1");
                }
                noise_op(Gate::kDepolarize1, q, p);
                break;
            }
            case OpKind::kTInject:
            case OpKind::kSFold:
                throw std::invalid_argument(std::string("cannot lower ") + op_name(ins.kind) +
                                            " into a stabilizer circuit");
        }
    }

    // Detectors: first-round checks of the prepared basis, then round-to-round
    // comparisons, then the final comparison against the data readout.
    auto det = [&](std::vector<uint32_t> recs, int a, int r) {
        Dot h = schedule.stabilizer(a).home_a;
        c.append(Gate::kDetector, std::move(recs), {(double)h.col, (double)h.row, (double)r});
    };
    auto rec = [&](int r, int a) -> uint32_t {
        int64_t m = stab_meas[(size_t)r * ns + a];
        if (m < 0) throw std::invalid_argument("schedule lacks a measurement for a stabilizer");
        return (uint32_t)m;
    };
    for (int r = 0; r < schedule.rounds; r++) {
        for (int a = 0; a < ns; a++) {
            if (r == 0) {
                if (schedule.memory && schedule.stabilizer(a).type == schedule.basis) det({rec(0, a)}, a, 0);
            } else {
                det({rec(r, a), rec(r - 1, a)}, a, r);
            }
        }
    }
    if (schedule.memory && schedule.rounds > 0) {
        for (int a = 0; a < ns; a++) {
            const Stabilizer &st = schedule.stabilizer(a);
            if (st.type != schedule.basis) continue;
            int p = schedule.patch_of_stabilizer(a);
            std::vector<uint32_t> recs{rec(schedule.rounds - 1, a)};
            for (int corner : st.corners) {
                if (corner >= 0) recs.push_back(data_meas.at(schedule.data_qubit(p, corner)));
            }
            det(recs, a, schedule.rounds);
        }
        std::vector<uint32_t> obs;
        for (int i : schedule.patches[0].logical_support(schedule.basis)) {
            obs.push_back(data_meas.at(schedule.data_qubit(0, i)));
        }
        c.append(Gate::kObservableInclude, obs, {0.0});
    }
    return c;
}

namespace {

std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

}  // namespace

std::string emit_text(const StabilizerCircuit &c) {
    std::ostringstream out;
    if (c.duration_ns > 0) out << "# duration_ns " << c.duration_ns << "\n";
    uint32_t nm = 0;
    for (const auto &op : c.ops) {
        out << gate_name(op.gate);
        if (!op.args.empty()) {
            out << '(';
            for (size_t i = 0; i < op.args.size(); i++) out << (i ? ", " : "") << fmt_double(op.args[i]);
            out << ')';
        }
        if (op.gate == Gate::kDetector || op.gate == Gate::kObservableInclude) {
            for (uint32_t m : op.targets) out << " rec[-" << (nm - m) << ']';
        } else {
            for (uint32_t t : op.targets) out << ' ' << t;
        }
        out << '\n';
        if (is_measure(op.gate)) nm += (uint32_t)op.targets.size();
    }
    return out.str();
}

namespace {

class Parser {
  public:
    explicit Parser(const std::string &text) : text_(text) {}

    StabilizerCircuit run() {
        std::istringstream in(text_);
        std::string line;
        while (std::getline(in, line)) {
            line_no_++;
            parse_line(line);
        }
        return c_;
    }

  private:
    [[noreturn]] void fail(size_t col, const std::string &msg) const {
        throw std::invalid_argument("line " + std::to_string(line_no_) + ":" + std::to_string(col + 1) + ": " + msg);
    }

    void parse_line(const std::string &raw) {
        std::string line = raw;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        size_t hash = line.find('#');
        if (hash != std::string::npos) {
            std::string comment = line.substr(hash + 1);
            std::istringstream cs(comment);
            std::string key;
            int64_t v;
            if (cs >> key >> v && key == "duration_ns") c_.duration_ns = v;
            line = line.substr(0, hash);
        }
        size_t i = 0;
        auto skip = [&] {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) i++;
        };
        skip();
        if (i >= line.size()) return;
        size_t name_col = i;
        while (i < line.size() && (std::isalnum((unsigned char)line[i]) || line[i] == '_')) i++;
        std::string name = line.substr(name_col, i - name_col);
        if (name.empty()) fail(name_col, "expected an instruction name");
        std::string upper = name;
        for (char &ch : upper) ch = (char)std::toupper((unsigned char)ch);
        if (upper == "CNOT") upper = "CX";
        if (upper == "MZ") upper = "M";
        if (upper == "RZ") upper = "R";
        const GateInfo *gi = nullptr;
        for (const auto &g : kGates) {
            if (upper == g.name) gi = &g;
        }
        if (!gi) fail(name_col, "unknown instruction '" + name + "'");
        Gate g = gi->gate;

        std::vector<double> args;
        std::vector<size_t> arg_cols;
        if (i < line.size() && line[i] == '(') {
            i++;
            for (;;) {
                skip();
                size_t col = i;
                size_t used = 0;
                double v;
                try {
                    v = std::stod(line.substr(i), &used);
                } catch (...) {
                    fail(col, "expected a number");
                }
                args.push_back(v);
                arg_cols.push_back(col);
                i += used;
                skip();
                if (i < line.size() && line[i] == ',') {
                    i++;
                    continue;
                }
                if (i < line.size() && line[i] == ')') {
                    i++;
                    break;
                }
                fail(i, "expected ',' or ')'");
            }
        }
        if (is_noise(g) || is_measure(g)) {
            if (args.size() > 1 || (is_noise(g) && args.size() != 1)) {
                fail(name_col, std::string(gi->name) + " takes one probability");
            }
            for (size_t k = 0; k < args.size(); k++) {
                if (!(args[k] >= 0 && args[k] <= 1)) fail(arg_cols[k], "probability out of range [0, 1]");
            }
        }
        if (g == Gate::kObservableInclude &&
            (args.size() != 1 || args[0] < 0 || args[0] != std::floor(args[0]))) {
            fail(name_col, "OBSERVABLE_INCLUDE needs a nonnegative integer index");
        }

        std::vector<uint32_t> targets;
        for (;;) {
            skip();
            if (i >= line.size()) break;
            size_t col = i;
            if (line.compare(i, 4, "rec[") == 0) {
                if (g != Gate::kDetector && g != Gate::kObservableInclude) fail(col, "measurement record not allowed here");
                i += 4;
                size_t used = 0;
                long long k;
                try {
                    k = std::stoll(line.substr(i), &used);
                } catch (...) {
                    fail(i, "expected a lookback");
                }
                i += used;
                if (i >= line.size() || line[i] != ']') fail(i, "expected ']'");
                i++;
                if (k >= 0 || -k > (long long)nm_) fail(col, "lookback rec[" + std::to_string(k) + "] out of range");
                targets.push_back((uint32_t)(nm_ + k));
            } else if (std::isdigit((unsigned char)line[i])) {
                if (g == Gate::kDetector || g == Gate::kObservableInclude) fail(col, "expected rec[-k]");
                size_t j = i;
                while (j < line.size() && std::isdigit((unsigned char)line[j])) j++;
                targets.push_back((uint32_t)std::stoul(line.substr(i, j - i)));
                i = j;
            } else {
                fail(col, "bad target");
            }
            if (i < line.size() && line[i] != ' ' && line[i] != '\t') fail(i, "expected whitespace");
        }
        if (g == Gate::kCX || g == Gate::kDepolarize2) {
            if (targets.size() % 2) fail(name_col, std::string(gi->name) + " needs an even number of targets");
        }
        if (g == Gate::kTick && !targets.empty()) fail(name_col, "TICK takes no targets");
        if (is_measure(g)) nm_ += (uint32_t)targets.size();
        if (g != Gate::kDetector && g != Gate::kObservableInclude) {
            for (uint32_t t : targets) c_.num_qubits = std::max(c_.num_qubits, t + 1);
        }
        c_.ops.push_back(CircuitOp{g, targets, args});
    }

    const std::string &text_;
    StabilizerCircuit c_;
    int line_no_ = 0;
    uint32_t nm_ = 0;
};

}  // namespace

StabilizerCircuit parse_text(const std::string &text) { return Parser(text).run(); }

ResourceCount count_resources(const StabilizerCircuit &c) {
    ResourceCount r;
    std::set<uint32_t> used;
    for (const auto &op : c.ops) {
        if (op.gate == Gate::kDetector || op.gate == Gate::kObservableInclude || op.gate == Gate::kTick ||
            op.gate == Gate::kQubitCoords || is_noise(op.gate)) {
            continue;
        }
        used.insert(op.targets.begin(), op.targets.end());
        if (op.gate == Gate::kCX) r.cnots += op.targets.size() / 2;
        if (is_measure(op.gate)) r.measurements += op.targets.size();
    }
    r.qubits = (uint32_t)used.size();
    r.duration_ns = c.duration_ns;
    return r;
}

}  // namespace snaq
