#include "snaq/commands.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "snaq/distill.h"
#include "snaq/memory.h"
#include "snaq/timing.h"

namespace snaq {

namespace {

std::string num(double x) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string read_file(const std::string &path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

// Stable per-task stream id: FNV-1a of the task key.
uint64_t task_stream(const std::string &key) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : key) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<Architecture> sorted_archs(const ExperimentConfig &c) {
    std::vector<Architecture> a = c.archs;
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

std::vector<int> sorted_unique(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::vector<NoiseParams> sorted_noise(const ExperimentConfig &c) {
    std::vector<NoiseParams> n = c.noise_points();
    auto key = [](const NoiseParams &p) { return std::make_tuple(p.p_g, p.p_sh, p.p_id); };
    std::sort(n.begin(), n.end(), [&](const NoiseParams &a, const NoiseParams &b) { return key(a) < key(b); });
    n.erase(std::unique(n.begin(), n.end(), [&](const NoiseParams &a, const NoiseParams &b) { return key(a) == key(b); }),
            n.end());
    return n;
}

MemorySpec spec_for(const ExperimentConfig &c, Architecture arch, int d, const NoiseParams &noise) {
    MemorySpec s;
    s.arch = arch;
    s.d = d;
    s.rounds = c.rounds;
    s.rho = c.rho;
    s.noise = noise;
    s.timing = c.timing;
    s.mode = c.mode;
    return s;
}

}  // namespace

std::string metadata_line(const std::string &command, const ExperimentConfig &c) {
    return "# snaqsim " + command + " config_hash=" + config_hash(c) + " seed=" + std::to_string(c.seed) + "\n";
}

std::vector<OutputFile> cmd_circuit(const ExperimentConfig &c) {
    c.validate();
    NoiseParams noise = c.noise_points().front();
    std::vector<OutputFile> out;
    for (Architecture arch : sorted_archs(c)) {
        for (int d : sorted_unique(c.distances)) {
            std::string stem = std::string(arch_name(arch)) + "_d" + std::to_string(d);
            if (arch == Architecture::kSnaq) {
                DotArray a = build_array(d + 2, 2 * (d + 1), c.rho);
                CodePatch p = embed_patch(a, d, 0);
                WaveAssignment w = assign_waves(a, p, c.mode == ScheduleMode::kBothEdges);
                SyndromeSchedule s = build_memory_experiment(a, p, c.rounds > 0 ? c.rounds : d, c.basis, w,
                                                             c.timing, c.mode);
                ValidationReport r = validate(s);
                if (!r.ok()) {
                    throw std::runtime_error("schedule for " + stem + " failed validation: " +
                                             (r.errors.empty() ? std::string("?") : r.errors.front()));
                }
                out.push_back({"schedule_" + stem + ".csv", to_gantt_csv(s)});
            }
            StabilizerCircuit circ = memory_circuit(spec_for(c, arch, d, noise), c.basis);
            out.push_back({"circuit_" + stem + "_" + pauli_name(c.basis) + ".stim",
                           metadata_line("circuit", c) + emit_text(circ)});
        }
    }
    return out;
}

std::vector<OutputFile> cmd_sample(const ExperimentConfig &c) {
    if (c.shots == 0) throw UsageError("shots must be at least 1");
    c.validate();
    LerOptions opt;
    opt.decoder = c.decoder;
    opt.threads = std::max(1, c.threads);
    std::ostringstream o;
    o << metadata_line("sample", c);
    o << "arch,d,rho,mode,p_g,p_sh,p_id,shots,failures,p_L,ci_low,ci_high\n";
    for (Architecture arch : sorted_archs(c)) {
        for (int d : sorted_unique(c.distances)) {
            for (const NoiseParams &n : sorted_noise(c)) {
                MemorySpec spec = spec_for(c, arch, d, n);
                std::string key = std::string(arch_name(arch)) + "/" + std::to_string(d) + "/" + c.rho.str() + "/" +
                                  num(n.p_g) + "/" + num(n.p_sh) + "/" + num(n.p_id);
                LerEstimate e = estimate_ler(memory_circuit(spec, PauliType::X), memory_circuit(spec, PauliType::Z),
                                             c.shots, derive_seed(c.seed, task_stream(key)), opt);
                o << arch_name(arch) << "," << d << "," << c.rho.str() << "," << mode_name(c.mode) << ","
                  << num(n.p_g) << "," << num(n.p_sh) << "," << num(n.p_id) << "," << e.shots << "," << e.failures
                  << "," << num(e.p_L) << "," << num(e.ci.low) << "," << num(e.ci.high) << "\n";
            }
        }
    }
    return {{"ler.csv", o.str()}};
}

std::vector<LerRow> parse_ler_csv(const std::string &text) {
    std::vector<LerRow> rows;
    std::istringstream in(text);
    std::string raw;
    std::map<std::string, size_t> col;
    int line = 0;
    auto need = [&](const char *name) {
        auto it = col.find(name);
        if (it == col.end()) throw UsageError(std::string("LER csv lacks column '") + name + "'");
        return it->second;
    };
    while (std::getline(in, raw)) {
        line++;
        if (raw.empty() || raw[0] == '#') continue;
        std::vector<std::string> f = split(raw, ',');
        if (col.empty()) {
            for (size_t i = 0; i < f.size(); i++) col[f[i]] = i;
            continue;
        }
        auto get = [&](const char *name) {
            size_t i = need(name);
            if (i >= f.size()) throw UsageError("line " + std::to_string(line) + ": too few fields");
            return f[i];
        };
        auto dbl = [&](const char *name) {
            std::string s = get(name);
            double x = 0;
            auto r = std::from_chars(s.data(), s.data() + s.size(), x);
            if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
                throw UsageError("line " + std::to_string(line) + ": bad number '" + s + "'");
            }
            return x;
        };
        LerRow r;
        try {
            r.arch = arch_from_name(get("arch"));
            r.rho = Rational::parse(get("rho"));
        } catch (const UsageError &) {
            throw;
        } catch (const std::invalid_argument &e) {
            throw UsageError("line " + std::to_string(line) + ": " + e.what());
        }
        r.d = (int)dbl("d");
        r.noise = {dbl("p_g"), dbl("p_sh"), dbl("p_id")};
        r.point = {r.d, dbl("p_L"), dbl("ci_low"), dbl("ci_high")};
        rows.push_back(r);
    }
    return rows;
}

FitParams cmd_fit(const std::string &ler_csv_text, Architecture arch, const Rational &rho, uint64_t seed) {
    std::vector<FitPoint> pts;
    const NoiseParams *first = nullptr;
    std::vector<LerRow> rows = parse_ler_csv(ler_csv_text);
    for (const LerRow &r : rows) {
        if (r.arch != arch || !(r.rho == rho)) continue;
        if (!first) {
            first = &r.noise;
        } else if (r.noise.p_g != first->p_g || r.noise.p_sh != first->p_sh || r.noise.p_id != first->p_id) {
            throw UsageError("rows for " + std::string(arch_name(arch)) + " span several noise points");
        }
        pts.push_back(r.point);
    }
    if (pts.empty()) throw UsageError("no rows for " + std::string(arch_name(arch)) + " at rho " + rho.str());
    FitOptions opt;
    opt.seed = seed;
    return fit_scaling(pts, rho, arch, opt);
}

std::vector<OutputFile> cmd_fit(const ExperimentConfig &c) {
    if (c.ler_csv.empty()) throw UsageError("fit needs ler_csv");
    c.validate();
    std::string text = read_file(c.ler_csv);
    std::vector<OutputFile> out;
    for (Architecture arch : sorted_archs(c)) {
        nlohmann::json j = to_json(cmd_fit(text, arch, c.rho, c.seed));
        j["config_hash"] = config_hash(c);
        out.push_back({"fit_" + std::string(arch_name(arch)) + ".json", j.dump(2) + "\n"});
    }
    return out;
}

std::vector<OutputFile> cmd_latency(const ExperimentConfig &c) {
    c.validate();
    std::vector<OutputFile> out;
    BaselineTiming base = BaselineTiming::calibrated();
    std::vector<int> ds = sorted_unique(c.distances);

    std::ostringstream se;
    se << metadata_line("latency", c) << "arch,d,rho,mode,waves,se_round_ns\n";
    for (int d : ds) {
        for (RoundMode m : {RoundMode::kNonPipelined, RoundMode::kPipelined, RoundMode::kBothEdges,
                            RoundMode::kTwoColumn}) {
            se << "snaq," << d << "," << c.rho.str() << "," << round_mode_name(m) << "," << snaq_waves(d, c.rho, m)
               << "," << num(se_round_time(Architecture::kSnaq, d, c.rho, m, c.timing, base)) << "\n";
        }
        for (Architecture a : {Architecture::kTwoByN, Architecture::kSpinBus}) {
            se << arch_name(a) << "," << d << ",1,pipelined,1,"
               << num(se_round_time(a, d, Rational(1), RoundMode::kPipelined, c.timing, base)) << "\n";
        }
    }
    out.push_back({"se_round.csv", se.str()});

    std::ostringstream sep;
    sep << metadata_line("latency", c) << "d,rho,s,ls_ns,tcnot_ns,tcnot_se_ns\n";
    for (int d : ds) {
        for (int s : {0, 10, 30, 100, 300, 1000, 3000, 10000, 30000}) {
            sep << d << "," << c.rho.str() << "," << s << ","
                << num(ls_time(Architecture::kSnaq, d, c.rho, s, c.timing, base)) << ","
                << num(tcnot_time(d, c.rho, s, false, c.timing)) << ","
                << num(tcnot_time(d, c.rho, s, true, c.timing)) << "\n";
        }
    }
    out.push_back({"separation.csv", sep.str()});

    if (!c.fits.empty()) {
        std::vector<FitParams> fits;
        for (const std::string &path : c.fits) {
            try {
                fits.push_back(fit_from_json(nlohmann::json::parse(read_file(path))));
            } catch (const nlohmann::json::exception &e) {
                throw UsageError(path + ": " + e.what());
            }
        }
        std::ostringstream sp;
        sp << metadata_line("latency", c) << "arch,op,d,rho,target,time_ns,speedup\n";
        for (const ClockRow &r : clock_speed_comparison(fits, c.target, c.timing, base)) {
            Rational rho{1};
            for (const FitParams &f : fits) {
                if (f.arch == r.arch) rho = f.rho;
            }
            sp << arch_name(r.arch) << "," << r.op << "," << r.d << "," << rho.str() << "," << num(c.target) << ","
               << num(r.time_ns) << "," << num(r.speedup) << "\n";
        }
        out.push_back({"speedup.csv", sp.str()});
    }
    return out;
}

std::vector<OutputFile> cmd_distill(const ExperimentConfig &c) {
    c.validate();
    DistillLayout layout = c.distill_layout.empty() ? default_distill_layout() : load_distill_layout(c.distill_layout);
    std::ostringstream o;
    o << metadata_line("distill", c)
      << "arch,d,rho,patches,tcnot_layers,se_rounds,time_us,physical_qubits,volume_qubit_s,snaq_reduction\n";
    for (int d : sorted_unique(c.distill_distances)) {
        DistillationPlan snaq = estimate_15to1(Architecture::kSnaq, d, c.rho, c.timing, layout);
        for (Architecture a : {Architecture::kSnaq, Architecture::kTwoByN, Architecture::kSpinBus}) {
            DistillationPlan p = a == Architecture::kSnaq ? snaq : estimate_15to1(a, d, Rational(1), c.timing, layout);
            o << arch_name(a) << "," << d << "," << p.rho.str() << "," << p.patches << "," << p.tcnot_layers << ","
              << p.se_rounds << "," << num(p.time_ns / 1000) << "," << p.physical_qubits << "," << num(p.volume)
              << "," << num(volume_reduction(snaq, p)) << "\n";
        }
    }
    return {{"distill.csv", o.str()}};
}

}  // namespace snaq
