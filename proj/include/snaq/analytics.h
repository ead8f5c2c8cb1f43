#ifndef SNAQ_ANALYTICS_H
#define SNAQ_ANALYTICS_H

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "snaq/geometry.h"

namespace snaq {

enum class Architecture { kSnaq, kTwoByN, kSpinBus };

const char *arch_name(Architecture a);
// Accepts "snaq", "2xn", "spinbus" in any case.
Architecture arch_from_name(const std::string &name);

struct FitPoint {
    int d = 0;
    double p_L = 0;
    double ci_low = 0;
    double ci_high = 0;
};

// p_L(d) = A (alpha + beta d + gamma n_w(rho, d))^((d + 1) / 2)
struct FitParams {
    Architecture arch = Architecture::kSnaq;
    Rational rho{1};
    double A = 0;
    double alpha = 0;
    double beta = 0;
    double gamma = 0;
    double residual = 0;  // weighted residual norm in log space
    uint64_t data_hash = 0;
};

struct FitOptions {
    int starts = 16;
    uint64_t seed = 1;
    int max_evals = 20000;  // per simplex run
};

// Thrown when the simplex budget runs out; carries the best point found.
struct FitError : std::runtime_error {
    FitParams best;
    FitError(const std::string &what, const FitParams &b) : std::runtime_error(what), best(b) {}
};

// alpha + beta d + gamma n_w(rho, d)
double scaling_base(const FitParams &f, int d);
double extrapolate(const FitParams &f, int d);

FitParams fit_scaling(const std::vector<FitPoint> &points, const Rational &rho, Architecture arch,
                      const FitOptions &opt = {});

// Smallest odd d >= 3 with extrapolate(f, d) <= target. Throws
// std::domain_error starting with "error-floor" when the base reaches 1 first.
int required_distance(const FitParams &f, double target_p_L, int d_max = 100001);

uint64_t hash_points(const std::vector<FitPoint> &points);

nlohmann::json to_json(const FitParams &f);
FitParams fit_from_json(const nlohmann::json &j);

// ((s + d) d^2 / (4 d^3)) p_L1 + p_L_idle
double analytic_ls_error(int s, int d, double p_L1, double p_L_idle);

// p_L = A (B (s + d) + C)^((d + 1) / 2)
struct AnalyticTcnotModel {
    double A = 0;
    double B = 0;
    double C = 0;
    double residual = 0;
};

struct TcnotPoint {
    int s = 0;
    int d = 0;
    double p_L = 0;
};

double analytic_tcnot_error(const AnalyticTcnotModel &m, int s, int d);
AnalyticTcnotModel fit_tcnot_model(const std::vector<TcnotPoint> &points, const FitOptions &opt = {});

// Largest separation whose error stays within (1 + excess) of the s = 0 value.
int tcnot_range(const AnalyticTcnotModel &m, int d, double excess = 0.1);

struct CostMetrics {
    int64_t readouts = 0;       // per logical qubit
    double area_um2 = 0;        // per logical qubit, no interconnect
    int64_t physical_qubits = 0;
};

constexpr double kQubitAreaUm2 = 0.01;
constexpr double kReadoutAreaUm2 = 1.0;
constexpr int kSpinBusCellHops = 50;

CostMetrics cost_metrics(Architecture arch, int d, const Rational &rho);

}  // namespace snaq

#endif
