#include "snaq/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace snaq {

namespace {

struct Value {
    bool array = false;
    std::vector<std::string> items;
};

[[noreturn]] void fail(int line, const std::string &msg) {
    throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string &s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Drops a trailing comment, ignoring '#' inside quotes.
std::string strip_comment(const std::string &s) {
    bool in_str = false;
    for (size_t i = 0; i < s.size(); i++) {
        if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_str = !in_str;
        if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

// Reads one scalar starting at s[i]; advances i past it.
void read_scalar(const std::string &s, size_t &i, Value &v, int line) {
    if (s[i] == '"') {
        std::string out;
        for (i++; i < s.size() && s[i] != '"'; i++) {
            if (s[i] == '\\' && i + 1 < s.size()) i++;
            out += s[i];
        }
        if (i >= s.size()) fail(line, "unterminated string");
        i++;
        v.items.push_back(out);
        return;
    }
    size_t j = i;
    while (j < s.size() && s[j] != ',' && s[j] != ']') j++;
    std::string tok = trim(s.substr(i, j - i));
    if (tok.empty()) fail(line, "missing value");
    v.items.push_back(tok);
    i = j;
}

Value parse_value(const std::string &text, int line) {
    std::string s = trim(text);
    Value v;
    if (s.empty()) fail(line, "missing value");
    size_t i = 0;
    if (s[0] != '[') {
        read_scalar(s, i, v, line);
        if (!trim(s.substr(i)).empty()) fail(line, "trailing characters after value");
        return v;
    }
    v.array = true;
    i = 1;
    auto skip = [&] {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) i++;
    };
    skip();
    if (i < s.size() && s[i] == ']') {
        i++;
    } else {
        while (true) {
            skip();
            if (i >= s.size()) fail(line, "unterminated array");
            read_scalar(s, i, v, line);
            skip();
            if (i >= s.size()) fail(line, "unterminated array");
            if (s[i] == ']') {
                i++;
                break;
            }
            if (s[i] != ',') fail(line, "expected ',' or ']' in array");
            i++;
        }
    }
    if (!trim(s.substr(i)).empty()) fail(line, "trailing characters after array");
    return v;
}

std::string fmt_double(double x) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string quote(const std::string &s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

template <typename T, typename F>
std::string list(const std::vector<T> &v, F f) {
    std::string out = "[";
    for (size_t i = 0; i < v.size(); i++) out += (i ? ", " : "") + f(v[i]);
    return out + "]";
}

struct Setter {
    int line;
    const Value &v;
    const std::string &key;

    const std::string &one() const {
        if (v.array) fail(line, key + " takes a single value");
        return v.items[0];
    }
    std::vector<std::string> many() const { return v.items; }

    double num(const std::string &s) const {
        double x = 0;
        auto r = std::from_chars(s.data(), s.data() + s.size(), x);
        if (r.ec != std::errc() || r.ptr != s.data() + s.size()) fail(line, key + ": bad number '" + s + "'");
        return x;
    }
    int64_t integer(const std::string &s) const {
        int64_t x = 0;
        auto r = std::from_chars(s.data(), s.data() + s.size(), x);
        if (r.ec != std::errc() || r.ptr != s.data() + s.size()) fail(line, key + ": bad integer '" + s + "'");
        return x;
    }
    uint64_t uinteger(const std::string &s) const {
        uint64_t x = 0;
        auto r = std::from_chars(s.data(), s.data() + s.size(), x);
        if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
            fail(line, key + ": bad nonnegative integer '" + s + "'");
        }
        return x;
    }
    bool boolean(const std::string &s) const {
        if (s == "true") return true;
        if (s == "false") return false;
        fail(line, key + ": expected true or false, got '" + s + "'");
    }
    std::vector<double> nums() const {
        std::vector<double> out;
        for (const auto &s : v.items) out.push_back(num(s));
        return out;
    }
    // Wraps name lookups so their errors carry the line.
    template <typename F>
    auto named(F f) const {
        try {
            return f();
        } catch (const ConfigError &) {
            throw;
        } catch (const std::invalid_argument &e) {
            fail(line, key + ": " + e.what());
        }
    }
};

using Handler = std::function<void(ExperimentConfig &, const Setter &)>;

const std::map<std::string, Handler> &handlers() {
    static const std::map<std::string, Handler> h = {
        {"archs",
         [](ExperimentConfig &c, const Setter &s) {
             c.archs.clear();
             for (const auto &n : s.many()) c.archs.push_back(s.named([&] { return arch_from_name(n); }));
         }},
        {"distances",
         [](ExperimentConfig &c, const Setter &s) {
             c.distances.clear();
             for (const auto &n : s.many()) c.distances.push_back((int)s.integer(n));
         }},
        {"rho", [](ExperimentConfig &c, const Setter &s) { c.rho = s.named([&] { return Rational::parse(s.one()); }); }},
        {"rounds", [](ExperimentConfig &c, const Setter &s) { c.rounds = (int)s.integer(s.one()); }},
        {"mode", [](ExperimentConfig &c, const Setter &s) { c.mode = s.named([&] { return mode_from_name(s.one()); }); }},
        {"basis",
         [](ExperimentConfig &c, const Setter &s) {
             const std::string &b = s.one();
             if (b == "X" || b == "x") {
                 c.basis = PauliType::X;
             } else if (b == "Z" || b == "z") {
                 c.basis = PauliType::Z;
             } else {
                 fail(s.line, "basis must be X or Z");
             }
         }},
        {"shots", [](ExperimentConfig &c, const Setter &s) { c.shots = s.uinteger(s.one()); }},
        {"seed", [](ExperimentConfig &c, const Setter &s) { c.seed = s.uinteger(s.one()); }},
        {"threads", [](ExperimentConfig &c, const Setter &s) { c.threads = (int)s.integer(s.one()); }},
        {"decoder",
         [](ExperimentConfig &c, const Setter &s) { c.decoder = s.named([&] { return decoder_from_name(s.one()); }); }},
        {"ler_csv", [](ExperimentConfig &c, const Setter &s) { c.ler_csv = s.one(); }},
        {"fits", [](ExperimentConfig &c, const Setter &s) { c.fits = s.many(); }},
        {"target", [](ExperimentConfig &c, const Setter &s) { c.target = s.num(s.one()); }},
        {"distill_layout", [](ExperimentConfig &c, const Setter &s) { c.distill_layout = s.one(); }},
        {"distill_distances",
         [](ExperimentConfig &c, const Setter &s) {
             c.distill_distances.clear();
             for (const auto &n : s.many()) c.distill_distances.push_back((int)s.integer(n));
         }},
        {"out_dir", [](ExperimentConfig &c, const Setter &s) { c.out_dir = s.one(); }},
        {"noise.p_g", [](ExperimentConfig &c, const Setter &s) { c.p_g = s.nums(); }},
        {"noise.p_sh", [](ExperimentConfig &c, const Setter &s) { c.p_sh = s.nums(); }},
        {"noise.p_id", [](ExperimentConfig &c, const Setter &s) { c.p_id = s.nums(); }},
        {"noise.linear_idle", [](ExperimentConfig &c, const Setter &s) { c.linear_idle = s.boolean(s.one()); }},
        {"timing.t_exchange", [](ExperimentConfig &c, const Setter &s) { c.timing.t_exchange = s.integer(s.one()); }},
        {"timing.t_cnot", [](ExperimentConfig &c, const Setter &s) { c.timing.t_cnot = s.integer(s.one()); }},
        {"timing.t_h", [](ExperimentConfig &c, const Setter &s) { c.timing.t_h = s.integer(s.one()); }},
        {"timing.t_shuttle", [](ExperimentConfig &c, const Setter &s) { c.timing.t_shuttle = s.integer(s.one()); }},
        {"timing.t_init", [](ExperimentConfig &c, const Setter &s) { c.timing.t_init = s.integer(s.one()); }},
        {"timing.t_meas", [](ExperimentConfig &c, const Setter &s) { c.timing.t_meas = s.integer(s.one()); }},
        {"timing.buffer_factor",
         [](ExperimentConfig &c, const Setter &s) { c.timing.buffer_factor = s.integer(s.one()); }},
        {"timing.c_route", [](ExperimentConfig &c, const Setter &s) { c.timing.c_route = s.num(s.one()); }},
    };
    return h;
}

}  // namespace

std::vector<NoiseParams> ExperimentConfig::noise_points() const {
    std::vector<NoiseParams> out;
    for (double g : p_g) {
        for (double sh : p_sh) {
            for (double id : p_id) out.push_back({g, sh, id, linear_idle});
        }
    }
    return out;
}

void ExperimentConfig::validate() const {
    if (archs.empty()) throw ConfigError("archs is empty");
    if (distances.empty()) throw ConfigError("distances is empty");
    for (int d : distances) {
        if (d < 3 || d % 2 == 0) throw ConfigError("distance " + std::to_string(d) + " must be odd and >= 3");
    }
    for (int d : distill_distances) {
        if (d < 3 || d % 2 == 0) throw ConfigError("distill distance " + std::to_string(d) + " must be odd and >= 3");
    }
    if (!(Rational(0) < rho)) throw ConfigError("rho must be positive");
    if (rounds < 0) throw ConfigError("rounds must be nonnegative");
    if (threads < 0) throw ConfigError("threads must be nonnegative");
    if (p_g.empty() || p_sh.empty() || p_id.empty()) throw ConfigError("noise lists must be nonempty");
    for (const NoiseParams &n : noise_points()) n.validate();
    timing.validate();
    if (!(target > 0 && target < 1)) throw ConfigError("target must lie in (0, 1)");
}

ExperimentConfig parse_config(const std::string &text) {
    ExperimentConfig c;
    std::istringstream in(text);
    std::string raw, section;
    std::set<std::string> seen;
    int line = 0;
    while (std::getline(in, raw)) {
        line++;
        std::string s = trim(strip_comment(raw));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(line, "malformed section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section != "noise" && section != "timing") fail(line, "unknown section '" + section + "'");
            continue;
        }
        size_t eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected key = value");
        std::string key = trim(s.substr(0, eq));
        if (key.empty()) fail(line, "missing key");
        std::string full = section.empty() ? key : section + "." + key;
        auto it = handlers().find(full);
        if (it == handlers().end()) fail(line, "unknown key '" + full + "'");
        if (!seen.insert(full).second) fail(line, "duplicate key '" + full + "'");
        Value v = parse_value(s.substr(eq + 1), line);
        it->second(c, Setter{line, v, full});
    }
    return c;
}

ExperimentConfig load_config(const std::string &path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError &e) {
        throw ConfigError(path + ":" + e.what());
    }
}

std::string config_text(const ExperimentConfig &c) {
    auto str = [](const std::string &s) { return quote(s); };
    auto arch = [](Architecture a) { return quote(arch_name(a)); };
    auto num = [](double x) { return fmt_double(x); };
    auto dist = [](int d) { return std::to_string(d); };
    const TimingParams &t = c.timing;
    std::ostringstream o;
    o << "archs = " << list(c.archs, arch) << "\n"
      << "distances = " << list(c.distances, dist) << "\n"
      << "rho = " << quote(c.rho.str()) << "\n"
      << "rounds = " << c.rounds << "\n"
      << "mode = " << quote(mode_name(c.mode)) << "\n"
      << "basis = " << quote(pauli_name(c.basis)) << "\n"
      << "shots = " << c.shots << "\n"
      << "seed = " << c.seed << "\n"
      << "threads = " << c.threads << "\n"
      << "decoder = " << quote(decoder_name(c.decoder)) << "\n"
      << "ler_csv = " << quote(c.ler_csv) << "\n"
      << "fits = " << list(c.fits, str) << "\n"
      << "target = " << num(c.target) << "\n"
      << "distill_layout = " << quote(c.distill_layout) << "\n"
      << "distill_distances = " << list(c.distill_distances, dist) << "\n"
      << "out_dir = " << quote(c.out_dir) << "\n"
      << "\n[noise]\n"
      << "p_g = " << list(c.p_g, num) << "\n"
      << "p_sh = " << list(c.p_sh, num) << "\n"
      << "p_id = " << list(c.p_id, num) << "\n"
      << "linear_idle = " << (c.linear_idle ? "true" : "false") << "\n"
      << "\n[timing]\n"
      << "t_exchange = " << t.t_exchange << "\n"
      << "t_cnot = " << t.t_cnot << "\n"
      << "t_h = " << t.t_h << "\n"
      << "t_shuttle = " << t.t_shuttle << "\n"
      << "t_init = " << t.t_init << "\n"
      << "t_meas = " << t.t_meas << "\n"
      << "buffer_factor = " << t.buffer_factor << "\n"
      << "c_route = " << num(t.c_route) << "\n";
    return o.str();
}

std::string config_hash(const ExperimentConfig &c) {
    // Threads and output location do not change results.
    ExperimentConfig k = c;
    k.threads = 0;
    k.out_dir.clear();
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : config_text(k)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

}  // namespace snaq
