#include "snaq/analytics.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <set>

namespace snaq {

const char *arch_name(Architecture a) {
    switch (a) {
        case Architecture::kSnaq: return "snaq";
        case Architecture::kTwoByN: return "2xn";
        case Architecture::kSpinBus: return "spinbus";
    }
    return "?";
}

Architecture arch_from_name(const std::string &name) {
    std::string s;
    for (char c : name) s += (char)std::tolower((unsigned char)c);
    if (s == "snaq") return Architecture::kSnaq;
    if (s == "2xn" || s == "twobyn") return Architecture::kTwoByN;
    if (s == "spinbus") return Architecture::kSpinBus;
    throw std::invalid_argument("unknown architecture '" + name + "'");
}

double scaling_base(const FitParams &f, int d) {
    double nw = (double)wave_count_for_distance(d, f.rho);
    return f.alpha + f.beta * d + f.gamma * nw;
}

double extrapolate(const FitParams &f, int d) {
    return f.A * std::pow(scaling_base(f, d), (d + 1) / 2.0);
}

namespace {

using Vec = std::vector<double>;

struct SimplexResult {
    Vec x;
    double fx = 0;
    bool converged = false;
};

// Plain Nelder-Mead with the standard coefficients.
SimplexResult nelder_mead(const std::function<double(const Vec &)> &f, Vec x0, double step, int max_evals) {
    size_t n = x0.size();
    std::vector<Vec> pts(n + 1, x0);
    Vec fv(n + 1);
    for (size_t i = 0; i < n; i++) pts[i + 1][i] += step;
    int evals = 0;
    auto eval = [&](const Vec &x) {
        evals++;
        double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };
    for (size_t i = 0; i <= n; i++) fv[i] = eval(pts[i]);

    std::vector<size_t> order(n + 1);
    SimplexResult r;
    while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return fv[a] < fv[b]; });
        size_t best = order[0], worst = order[n], second = order[n - 1];

        double fspread = fv[worst] - fv[best];
        double xspread = 0;
        for (size_t i = 0; i <= n; i++) {
            for (size_t k = 0; k < n; k++) xspread = std::max(xspread, std::abs(pts[i][k] - pts[best][k]));
        }
        if (fspread <= 1e-15 + 1e-12 * std::abs(fv[best]) || xspread <= 1e-10) {
            r.converged = true;
            break;
        }
        if (evals >= max_evals) break;

        Vec c(n, 0.0);
        for (size_t i = 0; i <= n; i++) {
            if (i == worst) continue;
            for (size_t k = 0; k < n; k++) c[k] += pts[i][k] / n;
        }
        auto along = [&](double t) {
            Vec y(n);
            for (size_t k = 0; k < n; k++) y[k] = c[k] + t * (pts[worst][k] - c[k]);
            return y;
        };
        Vec xr = along(-1.0);
        double fr = eval(xr);
        if (fr < fv[best]) {
            Vec xe = along(-2.0);
            double fe = eval(xe);
            if (fe < fr) {
                pts[worst] = xe, fv[worst] = fe;
            } else {
                pts[worst] = xr, fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            pts[worst] = xr, fv[worst] = fr;
            continue;
        }
        Vec xc = fr < fv[worst] ? along(-0.5) : along(0.5);
        double fc = eval(xc);
        if (fc < std::min(fr, fv[worst])) {
            pts[worst] = xc, fv[worst] = fc;
            continue;
        }
        for (size_t i = 0; i <= n; i++) {
            if (i == best) continue;
            for (size_t k = 0; k < n; k++) pts[i][k] = pts[best][k] + 0.5 * (pts[i][k] - pts[best][k]);
            fv[i] = eval(pts[i]);
        }
    }
    size_t best = std::min_element(fv.begin(), fv.end()) - fv.begin();
    r.x = pts[best];
    r.fx = fv[best];
    return r;
}

// Multi-start followed by restarts from the incumbent until it stops moving.
SimplexResult minimize(const std::function<double(const Vec &)> &f, const std::vector<std::pair<double, double>> &box,
                       const FitOptions &opt) {
    std::mt19937_64 rng(opt.seed);
    SimplexResult best;
    best.fx = std::numeric_limits<double>::infinity();
    for (int s = 0; s < std::max(opt.starts, 1); s++) {
        Vec x0;
        for (auto [lo, hi] : box) x0.push_back(std::uniform_real_distribution<double>(lo, hi)(rng));
        SimplexResult r = nelder_mead(f, x0, 0.5, opt.max_evals);
        if (r.fx < best.fx) best = r;
    }
    for (int k = 0; k < 50; k++) {
        SimplexResult r = nelder_mead(f, best.x, 0.05, opt.max_evals);
        bool moved = r.fx < best.fx - 1e-15 - 1e-12 * std::abs(best.fx);
        if (r.fx <= best.fx) best = r;
        if (!moved && r.converged) break;
    }
    return best;
}

double log_sigma(const FitPoint &p) {
    if (!(p.ci_low > 0) || !(p.ci_high > p.ci_low)) return -1;
    double s = (std::log(p.ci_high) - std::log(p.ci_low)) / (2 * 1.959963984540054);
    return std::isfinite(s) && s > 0 ? s : -1;
}

}  // namespace

uint64_t hash_points(const std::vector<FitPoint> &points) {
    uint64_t h = 1469598103934665603ULL;
    char buf[128];
    for (const FitPoint &p : points) {
        int n = std::snprintf(buf, sizeof buf, "%d %.17g %.17g %.17g\n", p.d, p.p_L, p.ci_low, p.ci_high);
        for (int i = 0; i < n; i++) {
            h ^= (unsigned char)buf[i];
            h *= 1099511628211ULL;
        }
    }
    return h;
}

FitParams fit_scaling(const std::vector<FitPoint> &points, const Rational &rho, Architecture arch,
                      const FitOptions &opt) {
    std::set<int> ds;
    for (const FitPoint &p : points) {
        if (!(p.p_L > 0 && p.p_L < 1)) throw std::invalid_argument("fit points need p_L in (0, 1)");
        if (p.d < 1) throw std::invalid_argument("fit points need d >= 1");
        ds.insert(p.d);
    }
    if (ds.size() < 3) throw std::invalid_argument("fit needs at least 3 distinct distances");

    // Weights come from the CI width; all points fall back to unit weight if any lacks one.
    std::vector<double> w(points.size(), 1.0);
    bool have_ci = true;
    for (size_t i = 0; i < points.size(); i++) {
        double s = log_sigma(points[i]);
        if (s < 0) have_ci = false;
        w[i] = s > 0 ? 1.0 / (s * s) : 1.0;
    }
    if (!have_ci) std::fill(w.begin(), w.end(), 1.0);

    std::vector<double> nw(points.size()), y(points.size()), e(points.size());
    for (size_t i = 0; i < points.size(); i++) {
        nw[i] = (double)wave_count_for_distance(points[i].d, rho);
        y[i] = std::log(points[i].p_L);
        e[i] = (points[i].d + 1) / 2.0;
    }
    int nfree = arch == Architecture::kSnaq ? 3 : arch == Architecture::kTwoByN ? 2 : 1;

    // ln A is solved in closed form for each (alpha, beta, gamma).
    auto unpack = [&](const Vec &x, double &a, double &b, double &g) {
        a = std::exp(x[0]);
        b = nfree > 1 ? std::exp(x[1]) : 0.0;
        g = nfree > 2 ? std::exp(x[2]) : 0.0;
    };
    auto solve = [&](const Vec &x, double &lnA) {
        double a, b, g;
        unpack(x, a, b, g);
        std::vector<double> lb(points.size());
        double sw = 0, swr = 0;
        for (size_t i = 0; i < points.size(); i++) {
            lb[i] = e[i] * std::log(a + b * points[i].d + g * nw[i]);
            sw += w[i];
            swr += w[i] * (y[i] - lb[i]);
        }
        lnA = swr / sw;
        double obj = 0;
        for (size_t i = 0; i < points.size(); i++) {
            double r = lnA + lb[i] - y[i];
            obj += w[i] * r * r;
        }
        return obj;
    };
    auto objective = [&](const Vec &x) {
        double lnA;
        return solve(x, lnA);
    };

    std::vector<std::pair<double, double>> box = {{std::log(1e-4), std::log(1.0)},
                                                  {std::log(1e-7), std::log(1e-1)},
                                                  {std::log(1e-6), std::log(1e-1)}};
    box.resize(nfree);
    SimplexResult r = minimize(objective, box, opt);

    FitParams f;
    f.arch = arch;
    f.rho = rho;
    double lnA;
    f.residual = std::sqrt(solve(r.x, lnA));
    f.A = std::exp(lnA);
    unpack(r.x, f.alpha, f.beta, f.gamma);
    f.data_hash = hash_points(points);
    if (!r.converged) throw FitError("fit did not converge within the evaluation budget", f);
    return f;
}

int required_distance(const FitParams &f, double target_p_L, int d_max) {
    if (!(target_p_L > 0)) throw std::invalid_argument("target p_L must be positive");
    for (int d = 3; d <= d_max; d += 2) {
        double base = scaling_base(f, d);
        if (base >= 1) {
            double nw = (double)wave_count_for_distance(d, f.rho);
            double terms[3] = {f.alpha, f.beta * d, f.gamma * nw};
            const char *names[3] = {"alpha (gate)", "beta*d (shuttle)", "gamma*n_w (idle)"};
            int k = (int)(std::max_element(terms, terms + 3) - terms);
            char buf[256];
            std::snprintf(buf, sizeof buf,
                          "error-floor: base reaches %.6g >= 1 at d=%d before p_L <= %.3g; limiting term %s = %.6g",
                          base, d, target_p_L, names[k], terms[k]);
            throw std::domain_error(buf);
        }
        if (extrapolate(f, d) <= target_p_L) return d;
    }
    throw std::domain_error("error-floor: target not reached by d=" + std::to_string(d_max));
}

nlohmann::json to_json(const FitParams &f) {
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", (unsigned long long)f.data_hash);
    return {{"arch", arch_name(f.arch)}, {"rho", f.rho.str()}, {"A", f.A},
            {"alpha", f.alpha},          {"beta", f.beta},      {"gamma", f.gamma},
            {"residual", f.residual},    {"data_hash", hash}};
}

FitParams fit_from_json(const nlohmann::json &j) {
    FitParams f;
    f.arch = arch_from_name(j.at("arch").get<std::string>());
    f.rho = Rational::parse(j.at("rho").get<std::string>());
    f.A = j.at("A").get<double>();
    f.alpha = j.at("alpha").get<double>();
    f.beta = j.at("beta").get<double>();
    f.gamma = j.at("gamma").get<double>();
    f.residual = j.value("residual", 0.0);
    f.data_hash = std::stoull(j.value("data_hash", std::string("0")), nullptr, 16);
    return f;
}

double analytic_ls_error(int s, int d, double p_L1, double p_L_idle) {
    double dd = d;
    return (s + dd) * dd * dd / (4 * dd * dd * dd) * p_L1 + p_L_idle;
}

double analytic_tcnot_error(const AnalyticTcnotModel &m, int s, int d) {
    return m.A * std::pow(m.B * (s + d) + m.C, (d + 1) / 2.0);
}

AnalyticTcnotModel fit_tcnot_model(const std::vector<TcnotPoint> &points, const FitOptions &opt) {
    if (points.size() < 3) throw std::invalid_argument("tCNOT fit needs at least 3 points");
    for (const TcnotPoint &p : points) {
        if (!(p.p_L > 0 && p.p_L < 1)) throw std::invalid_argument("fit points need p_L in (0, 1)");
    }
    auto solve = [&](const Vec &x, double &lnA) {
        double b = std::exp(x[0]), c = std::exp(x[1]);
        std::vector<double> lb(points.size());
        double sum = 0;
        for (size_t i = 0; i < points.size(); i++) {
            lb[i] = (points[i].d + 1) / 2.0 * std::log(b * (points[i].s + points[i].d) + c);
            sum += std::log(points[i].p_L) - lb[i];
        }
        lnA = sum / points.size();
        double obj = 0;
        for (size_t i = 0; i < points.size(); i++) {
            double r = lnA + lb[i] - std::log(points[i].p_L);
            obj += r * r;
        }
        return obj;
    };
    auto objective = [&](const Vec &x) {
        double lnA;
        return solve(x, lnA);
    };
    SimplexResult r = minimize(objective, {{std::log(1e-7), std::log(1e-1)}, {std::log(1e-4), std::log(1.0)}}, opt);
    AnalyticTcnotModel m;
    double lnA;
    m.residual = std::sqrt(solve(r.x, lnA));
    m.A = std::exp(lnA);
    m.B = std::exp(r.x[0]);
    m.C = std::exp(r.x[1]);
    if (!r.converged) {
        FitParams best;
        best.A = m.A;
        throw FitError("tCNOT fit did not converge within the evaluation budget", best);
    }
    return m;
}

int tcnot_range(const AnalyticTcnotModel &m, int d, double excess) {
    if (m.B <= 0) return std::numeric_limits<int>::max();
    double limit = (1 + excess) * analytic_tcnot_error(m, 0, d);
    double k = std::pow(1 + excess, 2.0 / (d + 1));
    int s = std::max(0, (int)std::floor((k - 1) * (m.B * d + m.C) / m.B));
    while (s > 0 && analytic_tcnot_error(m, s, d) > limit) s--;
    while (analytic_tcnot_error(m, s + 1, d) <= limit) s++;
    return s;
}

CostMetrics cost_metrics(Architecture arch, int d, const Rational &rho) {
    if (d < 3 || d % 2 == 0) throw std::invalid_argument("distance must be odd and >= 3");
    CostMetrics c;
    c.physical_qubits = 2LL * d * d - 1;
    switch (arch) {
        case Architecture::kSnaq:
            if (!(Rational(0) < rho)) throw std::invalid_argument("rho must be positive");
            // Sensors along both long edges of the patch.
            c.readouts = 2 * (Rational(2) * rho * Rational(d + 1)).floor();
            c.area_um2 = c.readouts * kReadoutAreaUm2 + c.physical_qubits * kQubitAreaUm2;
            break;
        case Architecture::kTwoByN:
            c.readouts = c.physical_qubits;
            c.area_um2 = c.readouts * kReadoutAreaUm2 + c.physical_qubits * kQubitAreaUm2;
            break;
        case Architecture::kSpinBus:
            // One cell per data qubit; each cell owns one horizontal and one
            // vertical channel segment. The cell interior is not counted.
            c.readouts = (int64_t)d * d;
            c.area_um2 = c.readouts * kReadoutAreaUm2 + (double)d * d * 2 * kSpinBusCellHops * kQubitAreaUm2;
            break;
    }
    return c;
}

}  // namespace snaq
