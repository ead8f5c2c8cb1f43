#include "snaq/analytics.h"

#include <gtest/gtest.h>

#include <cmath>

using namespace snaq;

namespace {

std::vector<FitPoint> synthetic(const FitParams &f, std::vector<int> ds) {
    std::vector<FitPoint> pts;
    for (int d : ds) pts.push_back({d, extrapolate(f, d), 0, 0});
    return pts;
}

FitParams params(Architecture arch, Rational rho, double A, double a, double b, double g) {
    FitParams f;
    f.arch = arch;
    f.rho = rho;
    f.A = A;
    f.alpha = a;
    f.beta = b;
    f.gamma = g;
    return f;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST(Fit, SelfInversion) {
    FitParams truth = params(Architecture::kSnaq, Rational(2), 0.1, 0.05, 0.002, 0.01);
    FitParams f = fit_scaling(synthetic(truth, {3, 5, 7, 9, 11}), Rational(2), Architecture::kSnaq);
    EXPECT_LT(rel(f.A, 0.1), 1e-3);
    EXPECT_LT(rel(f.alpha, 0.05), 1e-3);
    EXPECT_LT(rel(f.beta, 0.002), 1e-3);
    EXPECT_LT(rel(f.gamma, 0.01), 1e-3);
    EXPECT_LT(f.residual, 1e-6);
}

TEST(Fit, BaselinesPinParameters) {
    FitParams sb = params(Architecture::kSpinBus, Rational(1), 0.2, 0.08, 0, 0);
    FitParams f = fit_scaling(synthetic(sb, {3, 5, 7}), Rational(1), Architecture::kSpinBus);
    EXPECT_EQ(f.beta, 0.0);
    EXPECT_EQ(f.gamma, 0.0);
    EXPECT_LT(rel(f.alpha, 0.08), 1e-3);

    FitParams tn = params(Architecture::kTwoByN, Rational(1), 0.05, 0.03, 0.004, 0);
    f = fit_scaling(synthetic(tn, {3, 5, 7, 9}), Rational(1), Architecture::kTwoByN);
    EXPECT_EQ(f.gamma, 0.0);
    EXPECT_LT(rel(f.beta, 0.004), 1e-3);
}

TEST(Fit, WeightsFollowConfidenceWidth) {
    // One wildly wrong point with a huge interval should barely move the fit.
    FitParams sb = params(Architecture::kSpinBus, Rational(1), 0.2, 0.08, 0, 0);
    std::vector<FitPoint> pts;
    for (int d : {3, 5, 7, 9}) {
        double p = extrapolate(sb, d);
        pts.push_back({d, p, p * 0.99, p * 1.01});
    }
    pts[3].p_L *= 3;
    pts[3].ci_low = pts[3].p_L * 1e-3;
    pts[3].ci_high = 0.9;
    FitParams f = fit_scaling(pts, Rational(1), Architecture::kSpinBus);
    EXPECT_LT(rel(f.alpha, 0.08), 1e-2);
}

TEST(Fit, Errors) {
    FitParams sb = params(Architecture::kSpinBus, Rational(1), 0.2, 0.08, 0, 0);
    EXPECT_THROW(fit_scaling(synthetic(sb, {3, 5}), Rational(1), Architecture::kSpinBus), std::invalid_argument);
    EXPECT_THROW(fit_scaling(synthetic(sb, {3, 3, 5, 5}), Rational(1), Architecture::kSpinBus),
                 std::invalid_argument);
    auto pts = synthetic(sb, {3, 5, 7});
    pts[1].p_L = 0;
    EXPECT_THROW(fit_scaling(pts, Rational(1), Architecture::kSpinBus), std::invalid_argument);
}

TEST(Fit, SeedStable) {
    FitParams truth = params(Architecture::kSnaq, Rational(1), 0.3, 0.04, 0.001, 0.02);
    auto pts = synthetic(truth, {3, 5, 7, 9});
    pts[0].p_L *= 1.1;
    FitOptions a, b;
    b.seed = 99;
    FitParams fa = fit_scaling(pts, Rational(1), Architecture::kSnaq, a);
    FitParams fb = fit_scaling(pts, Rational(1), Architecture::kSnaq, b);
    EXPECT_NEAR(fa.residual, fb.residual, 1e-9);
}

TEST(Extrapolate, MonotoneWithoutGrowthTerms) {
    FitParams f = params(Architecture::kSpinBus, Rational(1), 0.1, 0.3, 0, 0);
    for (int d = 3; d < 61; d += 2) EXPECT_GT(extrapolate(f, d), extrapolate(f, d + 2));
}

TEST(Extrapolate, RequiredDistanceRoundTrip) {
    FitParams f = params(Architecture::kSnaq, Rational(2), 0.1, 0.02, 0.0005, 0.002);
    for (int d = 3; d <= 41; d += 2) {
        if (extrapolate(f, d) >= extrapolate(f, d - 2) && d > 3) break;
        EXPECT_EQ(required_distance(f, extrapolate(f, d)), d) << d;
    }
}

TEST(Extrapolate, ErrorFloor) {
    FitParams f = params(Architecture::kSpinBus, Rational(1), 0.1, 1.2, 0, 0);
    try {
        required_distance(f, 1e-6);
        FAIL();
    } catch (const std::domain_error &e) {
        EXPECT_EQ(std::string(e.what()).rfind("error-floor", 0), 0u);
        EXPECT_NE(std::string(e.what()).find("alpha"), std::string::npos);
    }
    // The idle term eventually dominates any SNAQ fit with gamma > 0.
    FitParams g = params(Architecture::kSnaq, Rational(1), 0.1, 0.05, 0, 0.05);
    try {
        required_distance(g, 1e-30);
        FAIL();
    } catch (const std::domain_error &e) {
        EXPECT_NE(std::string(e.what()).find("idle"), std::string::npos);
    }
}

TEST(Extrapolate, BaseOrderingAcrossArchitectures) {
    FitParams sb = params(Architecture::kSpinBus, Rational(1), 0.1, 0.2, 0, 0);
    FitParams sq = params(Architecture::kSnaq, Rational(2), 0.1, 0.05, 0.001, 0.01);
    for (int d = 3; d < 101; d += 2) {
        EXPECT_GT(extrapolate(sb, d), extrapolate(sb, d + 2));
        EXPECT_LE(scaling_base(sq, d), scaling_base(sq, d + 2));
    }
}

TEST(Fit, JsonRoundTrip) {
    FitParams truth = params(Architecture::kTwoByN, Rational(3, 2), 0.05, 0.03, 0.004, 0);
    auto pts = synthetic(truth, {3, 5, 7});
    FitParams f = fit_scaling(pts, Rational(3, 2), Architecture::kTwoByN);
    nlohmann::json j = to_json(f);
    for (const char *k : {"arch", "rho", "A", "alpha", "beta", "gamma", "residual", "data_hash"}) {
        EXPECT_TRUE(j.contains(k)) << k;
    }
    EXPECT_EQ(j["arch"], "2xn");
    EXPECT_EQ(j["rho"], "3/2");
    FitParams g = fit_from_json(j);
    EXPECT_EQ(g.arch, f.arch);
    EXPECT_EQ(g.rho, f.rho);
    EXPECT_EQ(g.data_hash, hash_points(pts));
    EXPECT_DOUBLE_EQ(g.alpha, f.alpha);
    pts[0].p_L *= 1.0000001;
    EXPECT_NE(hash_points(pts), f.data_hash);
}

TEST(LatticeSurgery, Prefactor) {
    EXPECT_EQ(analytic_ls_error(11, 11, 1.0, 0.0), 0.5);
    EXPECT_EQ(analytic_ls_error(4, 7, 0.0, 3e-4), 3e-4);
    double d1 = analytic_ls_error(10, 5, 1e-3, 1e-5) - analytic_ls_error(9, 5, 1e-3, 1e-5);
    double d2 = analytic_ls_error(101, 5, 1e-3, 1e-5) - analytic_ls_error(100, 5, 1e-3, 1e-5);
    EXPECT_NEAR(d1, d2, 1e-15);
    EXPECT_GT(d1, 0);
}

TEST(Tcnot, FlatWithoutShuttleTerm) {
    AnalyticTcnotModel m{0.2, 0, 0.01, 0};
    EXPECT_EQ(analytic_tcnot_error(m, 0, 5), analytic_tcnot_error(m, 1000, 5));
}

TEST(Tcnot, SelfInversion) {
    AnalyticTcnotModel truth{0.3, 2e-4, 0.02, 0};
    std::vector<TcnotPoint> pts;
    for (int d : {3, 5})
        for (int s : {0, 50, 200, 800}) pts.push_back({s, d, analytic_tcnot_error(truth, s, d)});
    AnalyticTcnotModel m = fit_tcnot_model(pts);
    EXPECT_LT(rel(m.A, 0.3), 1e-3);
    EXPECT_LT(rel(m.B, 2e-4), 1e-3);
    EXPECT_LT(rel(m.C, 0.02), 1e-3);
}

TEST(Tcnot, RangeLinearInNoiseRatio) {
    // B tracks p_sh and C tracks p_g, so the range follows p_g / p_sh.
    double p_sh = 1e-5;
    std::vector<int> r;
    for (double ratio : {50.0, 100.0, 200.0, 400.0}) {
        AnalyticTcnotModel m{1.0, p_sh, ratio * p_sh, 0};
        int s = tcnot_range(m, 5);
        EXPECT_LE(analytic_tcnot_error(m, s, 5), 1.1 * analytic_tcnot_error(m, 0, 5));
        EXPECT_GT(analytic_tcnot_error(m, s + 1, 5), 1.1 * analytic_tcnot_error(m, 0, 5));
        r.push_back(s);
    }
    double slope1 = (r[1] - r[0]) / 50.0, slope3 = (r[3] - r[2]) / 200.0;
    EXPECT_NEAR(slope1, slope3, 0.02);
    EXPECT_GT(r[3], 7 * r[0]);
}

TEST(Cost, ReadoutsAndArea) {
    CostMetrics sb = cost_metrics(Architecture::kSpinBus, 5, Rational(1));
    EXPECT_EQ(sb.readouts, 25);
    EXPECT_DOUBLE_EQ(sb.readouts * kReadoutAreaUm2, 25.0);
    EXPECT_EQ(cost_metrics(Architecture::kSnaq, 11, Rational(1)).readouts, 48);
    EXPECT_EQ(cost_metrics(Architecture::kSnaq, 11, Rational(2)).readouts, 96);
    EXPECT_EQ(cost_metrics(Architecture::kTwoByN, 7, Rational(1)).readouts, 97);
    for (Architecture a : {Architecture::kSnaq, Architecture::kTwoByN, Architecture::kSpinBus}) {
        for (int d : {3, 7, 15}) EXPECT_EQ(cost_metrics(a, d, Rational(1)).physical_qubits, 2 * d * d - 1);
    }
    CostMetrics sq = cost_metrics(Architecture::kSnaq, 11, Rational(1));
    EXPECT_NEAR(sq.area_um2, 48 + 241 * 0.01, 1e-12);
    EXPECT_LT(sq.area_um2, cost_metrics(Architecture::kTwoByN, 11, Rational(1)).area_um2);
    EXPECT_THROW(cost_metrics(Architecture::kSnaq, 4, Rational(1)), std::invalid_argument);
}

TEST(Arch, Names) {
    for (Architecture a : {Architecture::kSnaq, Architecture::kTwoByN, Architecture::kSpinBus}) {
        EXPECT_EQ(arch_from_name(arch_name(a)), a);
    }
    EXPECT_EQ(arch_from_name("SpinBus"), Architecture::kSpinBus);
    EXPECT_THROW(arch_from_name("ladder"), std::invalid_argument);
}

TEST(Extrapolate, ModerateIdleStillReachesUtilityScale) {
    // Pipelined memory at rho=2, (p_g, p_sh, p_id) = (1e-3, 1e-5, 5e-3),
    // 10^6 shots per basis, union-find decoding.
    std::vector<FitPoint> pts = {{3, 5.431e-03, 5.231e-03, 5.638e-03},
                                 {5, 1.255e-03, 1.160e-03, 1.357e-03},
                                 {7, 3.680e-04, 3.186e-04, 4.250e-04},
                                 {9, 7.300e-05, 5.285e-05, 1.008e-04}};
    for (uint64_t seed : {1, 7, 42}) {
        FitOptions o;
        o.seed = seed;
        FitParams f = fit_scaling(pts, Rational(2), Architecture::kSnaq, o);
        int d = required_distance(f, 1e-6);
        EXPECT_GE(d, 11);
        EXPECT_LE(d, 25);
        EXPECT_LT(extrapolate(f, d), 1e-6);
    }
}
