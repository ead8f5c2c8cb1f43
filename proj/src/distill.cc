#include "snaq/distill.h"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "snaq/timing.h"

namespace snaq {

namespace {

[[noreturn]] void fail(int line, const std::string &msg) {
    throw std::invalid_argument("line " + std::to_string(line) + ": " + msg);
}

int to_int(const std::string &tok, int line) {
    size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(tok, &used);
    } catch (const std::exception &) {
        fail(line, "bad integer '" + tok + "'");
    }
    if (used != tok.size()) fail(line, "bad integer '" + tok + "'");
    return v;
}

}  // namespace

DistillLayout parse_distill_layout(const std::string &text) {
    DistillLayout l;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    std::vector<int> slot_line;
    std::set<std::pair<int, int>> taken;
    while (std::getline(in, raw)) {
        line++;
        std::string s = raw.substr(0, raw.find('#'));
        std::istringstream ls(s);
        std::string kw;
        if (!(ls >> kw)) continue;
        std::vector<std::string> toks;
        for (std::string t; ls >> t;) toks.push_back(t);
        if (kw == "slot") {
            if (toks.size() != 3) fail(line, "slot takes <qubit> <column> <row>");
            int q = to_int(toks[0], line), c = to_int(toks[1], line), r = to_int(toks[2], line);
            if (q < 0 || c < 0 || r < 0) fail(line, "negative slot field");
            if (!taken.insert({c, r}).second) fail(line, "grid position used twice");
            if ((int)l.slots.size() <= q) l.slots.resize(q + 1, {-1, -1});
            if (l.slots[q].first >= 0) fail(line, "qubit " + std::to_string(q) + " placed twice");
            l.slots[q] = {c, r};
        } else if (kw == "layer") {
            if (toks.empty()) fail(line, "empty layer");
            std::vector<std::pair<int, int>> layer;
            std::set<int> busy;
            for (const std::string &t : toks) {
                size_t colon = t.find(':');
                if (colon == std::string::npos) fail(line, "expected control:target, got '" + t + "'");
                int a = to_int(t.substr(0, colon), line), b = to_int(t.substr(colon + 1), line);
                if (a == b) fail(line, "control equals target");
                if (!busy.insert(a).second || !busy.insert(b).second) {
                    fail(line, "qubit used twice in one layer");
                }
                layer.push_back({a, b});
            }
            l.layers.push_back(std::move(layer));
        } else if (kw == "se_rounds") {
            if (toks.size() != 1) fail(line, "se_rounds takes one integer");
            l.se_rounds = to_int(toks[0], line);
            if (l.se_rounds < 0) fail(line, "se_rounds must be nonnegative");
        } else {
            fail(line, "unknown keyword '" + kw + "'");
        }
    }
    for (size_t q = 0; q < l.slots.size(); q++) {
        if (l.slots[q].first < 0) throw std::invalid_argument("qubit " + std::to_string(q) + " has no slot");
    }
    for (const auto &layer : l.layers) {
        for (auto [a, b] : layer) {
            if (a < 0 || b < 0 || a >= (int)l.slots.size() || b >= (int)l.slots.size()) {
                throw std::invalid_argument("layer references a qubit without a slot");
            }
        }
    }
    return l;
}

DistillLayout load_distill_layout(const std::string &path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    try {
        return parse_distill_layout(ss.str());
    } catch (const std::invalid_argument &e) {
        throw std::invalid_argument(path + ":" + e.what());
    }
}

const DistillLayout &default_distill_layout() {
    static const DistillLayout l = load_distill_layout(std::string(SNAQ_DATA_DIR) + "/distill_15to1.txt");
    return l;
}

int distill_hops(const DistillLayout &l, int a, int b, int d) {
    auto [ca, ra] = l.slots.at(a);
    auto [cb, rb] = l.slots.at(b);
    return std::abs(ra - rb) * d + std::abs(ca - cb) * (d + 1);
}

DistillationPlan estimate_15to1(Architecture arch, int d, const Rational &rho, const TimingParams &timing,
                                const DistillLayout &layout) {
    if (d < 3 || d % 2 == 0) throw std::invalid_argument("distance must be odd and >= 3");
    if (!(Rational(0) < rho)) throw std::invalid_argument("rho must be positive");
    timing.validate();
    DistillationPlan p;
    p.arch = arch;
    p.d = d;
    p.rho = rho;
    switch (arch) {
        case Architecture::kTwoByN:
            p.patches = 10;
            p.se_rounds = 12 * d;
            p.phases.push_back({"se", p.se_rounds * se_round_time(arch, d, rho, RoundMode::kPipelined, timing)});
            break;
        case Architecture::kSpinBus:
            p.patches = 15;
            p.se_rounds = 6 * d;
            p.phases.push_back({"se", p.se_rounds * se_round_time(arch, d, rho, RoundMode::kPipelined, timing)});
            break;
        case Architecture::kSnaq: {
            p.patches = (int)layout.slots.size();
            p.se_rounds = layout.se_rounds;
            p.tcnot_layers = (int)layout.layers.size();
            // Each column loads and unloads its patch through its own edge.
            int64_t ports = (Rational(2) * rho * Rational(d + 1)).floor();
            int64_t waves = (d * d + ports - 1) / ports;
            double sweep = (double)timing.buffer_factor * (2 * d + 3) * timing.t_shuttle;
            p.phases.push_back({"init", waves * (timing.t_init + sweep)});
            double tc = 0;
            for (const auto &layer : layout.layers) {
                double worst = 0;
                for (auto [a, b] : layer) {
                    int s = distill_hops(layout, a, b, d) - d;
                    worst = std::max(worst, tcnot_time(d, rho, std::max(s, 0), false, timing));
                }
                tc += worst;
            }
            p.phases.push_back({"tcnot", tc});
            p.phases.push_back({"se", p.se_rounds * se_round_time(arch, d, rho, RoundMode::kTwoColumn, timing)});
            p.phases.push_back({"t_inject", (double)timing.t_init});
            p.phases.push_back({"s_fold", 2.0 * d * timing.t_shuttle + timing.t_cnot});
            p.phases.push_back({"measure", waves * (timing.t_meas + sweep)});
            break;
        }
    }
    for (const DistillPhase &ph : p.phases) p.time_ns += ph.ns;
    p.physical_qubits = (int64_t)p.patches * (2LL * d * d - 1);
    p.volume = p.physical_qubits * p.time_ns * 1e-9;
    return p;
}

double volume_reduction(const DistillationPlan &snaq, const DistillationPlan &baseline) {
    if (snaq.d != baseline.d) throw std::invalid_argument("volume reduction needs equal distances");
    return 1.0 - snaq.volume / baseline.volume;
}

nlohmann::json to_json(const DistillationPlan &p) {
    nlohmann::json phases = nlohmann::json::object();
    for (const DistillPhase &ph : p.phases) phases[ph.name] = ph.ns;
    return {{"arch", arch_name(p.arch)},
            {"d", p.d},
            {"rho", p.rho.str()},
            {"patches", p.patches},
            {"tcnot_layers", p.tcnot_layers},
            {"se_rounds", p.se_rounds},
            {"time_us", p.time_ns / 1000},
            {"physical_qubits", p.physical_qubits},
            {"volume_qubit_s", p.volume},
            {"phases_ns", phases}};
}

}  // namespace snaq
