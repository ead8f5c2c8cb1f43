#include "snaq/distill.h"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace snaq;

namespace {

const Architecture kSnaq = Architecture::kSnaq;
const Architecture k2xN = Architecture::kTwoByN;
const Architecture kSpinBus = Architecture::kSpinBus;

struct Cell {
    Architecture arch;
    int d;
    double us;
    double volume;
};

const Cell kTable[] = {
    {k2xN, 7, 156.2, 0.152},  {k2xN, 15, 346.3, 1.555},  {kSpinBus, 7, 109.2, 0.159},
    {kSpinBus, 15, 234.0, 1.576}, {kSnaq, 7, 40.6, 0.063}, {kSnaq, 15, 91.5, 0.658},
};

}  // namespace

TEST(Distill, PublishedTable) {
    for (const Cell &c : kTable) {
        DistillationPlan p = estimate_15to1(c.arch, c.d, Rational(1));
        double tol = c.arch == kSnaq ? 0.10 : 0.02;
        EXPECT_NEAR(p.time_ns / 1000, c.us, tol * c.us) << arch_name(c.arch) << " d=" << c.d;
        EXPECT_NEAR(p.volume, c.volume, tol * c.volume) << arch_name(c.arch) << " d=" << c.d;
    }
}

TEST(Distill, VolumeIdentity) {
    for (Architecture a : {kSnaq, k2xN, kSpinBus}) {
        for (int d : {3, 7, 15, 21}) {
            DistillationPlan p = estimate_15to1(a, d, Rational(1));
            EXPECT_EQ(p.physical_qubits, p.patches * (2 * d * d - 1));
            EXPECT_NEAR(p.volume, p.patches * (2 * d * d - 1) * p.time_ns * 1e-9, 1e-12);
            double sum = 0;
            for (const DistillPhase &ph : p.phases) sum += ph.ns;
            EXPECT_DOUBLE_EQ(sum, p.time_ns);
        }
    }
    EXPECT_EQ(estimate_15to1(k2xN, 7, Rational(1)).patches, 10);
    EXPECT_EQ(estimate_15to1(kSpinBus, 7, Rational(1)).patches, 15);
    EXPECT_EQ(estimate_15to1(kSnaq, 7, Rational(1)).patches, 16);
}

TEST(Distill, VolumeReduction) {
    for (int d : {7, 15}) {
        DistillationPlan s = estimate_15to1(kSnaq, d, Rational(1));
        double lo = d == 7 ? 0.58 : 0.57, hi = d == 7 ? 0.60 : 0.58;
        for (Architecture b : {k2xN, kSpinBus}) {
            double r = volume_reduction(s, estimate_15to1(b, d, Rational(1)));
            EXPECT_GT(r, lo - 0.03) << d;
            EXPECT_LT(r, hi + 0.03) << d;
        }
        EXPECT_EQ(volume_reduction(s, s), 0.0);
    }
    EXPECT_THROW(volume_reduction(estimate_15to1(kSnaq, 7, Rational(1)), estimate_15to1(k2xN, 9, Rational(1))),
                 std::invalid_argument);
}

TEST(Distill, SeCountPerTcnot) {
    DistillationPlan p = estimate_15to1(kSnaq, 7, Rational(1));
    EXPECT_EQ(p.tcnot_layers, 5);
    EXPECT_EQ(p.se_rounds, 4);
    EXPECT_DOUBLE_EQ((double)p.se_rounds / p.tcnot_layers, 0.8);
}

TEST(Distill, LayerListEncodes) {
    // Track each qubit's parity set through the CNOTs.
    const DistillLayout &l = default_distill_layout();
    ASSERT_EQ(l.slots.size(), 16u);
    std::vector<std::set<int>> val(16);
    for (int q : {0, 1, 2, 4, 8}) val[q] = {q};
    for (const auto &layer : l.layers) {
        for (auto [a, b] : layer) {
            for (int x : val[a]) {
                if (!val[b].erase(x)) val[b].insert(x);
            }
        }
    }
    for (int j = 1; j < 16; j++) {
        std::set<int> want;
        for (int k : {1, 2, 4, 8}) {
            if (j & k) want.insert(k);
        }
        if ((j & 8) && j != 8) want.insert(0);
        EXPECT_EQ(val[j], want) << j;
    }
    EXPECT_EQ(val[0], std::set<int>{0});
    std::set<std::pair<int, int>> grid(l.slots.begin(), l.slots.end());
    EXPECT_EQ(grid.size(), 16u);
    for (auto [c, r] : l.slots) {
        EXPECT_LT(c, 2);
        EXPECT_LT(r, 8);
    }
}

TEST(Distill, LayoutParseErrors) {
    auto msg = [](const std::string &text) {
        try {
            parse_distill_layout(text);
        } catch (const std::invalid_argument &e) {
            return std::string(e.what());
        }
        return std::string();
    };
    EXPECT_EQ(msg("slot 0 0 0\nslot 1 0 0\n"), "line 2: grid position used twice");
    EXPECT_EQ(msg("slot 0 0 0\nslot 1 0 1\nlayer 0:1 1:0\n"), "line 3: qubit used twice in one layer");
    EXPECT_EQ(msg("slot 0 0 0\nlayer 0-1\n"), "line 2: expected control:target, got '0-1'");
    EXPECT_EQ(msg("wave 3\n"), "line 1: unknown keyword 'wave'");
    EXPECT_EQ(msg("slot 0 x 0\n"), "line 1: bad integer 'x'");
    EXPECT_EQ(msg("slot 1 0 0\n"), "qubit 0 has no slot");
    EXPECT_EQ(msg("slot 0 0 0\nlayer 0:3\n"), "layer references a qubit without a slot");
    DistillLayout l = parse_distill_layout("# comment\nslot 0 0 0\nslot 1 0 3  # far\nlayer 0:1\nse_rounds 2\n");
    EXPECT_EQ(l.se_rounds, 2);
    EXPECT_EQ(distill_hops(l, 0, 1, 7), 21);
}

TEST(Distill, CustomLayoutChangesTime) {
    DistillLayout l = default_distill_layout();
    DistillationPlan base = estimate_15to1(kSnaq, 7, Rational(1), {}, l);
    l.layers.push_back(l.layers.back());
    DistillationPlan more = estimate_15to1(kSnaq, 7, Rational(1), {}, l);
    EXPECT_GT(more.time_ns, base.time_ns);
    EXPECT_EQ(more.tcnot_layers, 6);
    EXPECT_THROW(estimate_15to1(kSnaq, 8, Rational(1)), std::invalid_argument);
    EXPECT_THROW(estimate_15to1(kSnaq, 7, Rational(0)), std::invalid_argument);
}

TEST(Distill, Json) {
    nlohmann::json j = to_json(estimate_15to1(kSnaq, 7, Rational(1)));
    EXPECT_EQ(j["arch"], "snaq");
    EXPECT_EQ(j["patches"], 16);
    EXPECT_TRUE(j["phases_ns"].contains("tcnot"));
    EXPECT_TRUE(j["phases_ns"].contains("s_fold"));
}
