#include "snaq/config.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "snaq/commands.h"

using namespace snaq;

namespace {

std::string error_of(const std::string &text) {
    try {
        parse_config(text);
    } catch (const ConfigError &e) {
        return e.what();
    }
    return "";
}

std::vector<std::vector<std::string>> csv_rows(const std::string &text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        for (std::string x; std::getline(ls, x, ',');) f.push_back(x);
        rows.push_back(f);
    }
    return rows;
}

std::filesystem::path scratch_dir(const std::string &name) {
    auto p = std::filesystem::temp_directory_path() / ("snaqsim_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

void write(const std::filesystem::path &p, const std::string &text) { std::ofstream(p) << text; }

}  // namespace

TEST(Config, Defaults) {
    ExperimentConfig c = parse_config("");
    EXPECT_EQ(c.archs, std::vector<Architecture>{Architecture::kSnaq});
    EXPECT_EQ(c.distances, (std::vector<int>{3, 5, 7}));
    EXPECT_EQ(c.timing.t_cnot, 200);
    EXPECT_EQ(c.mode, ScheduleMode::kPipelined);
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, ParsesSectionsArraysAndComments) {
    ExperimentConfig c = parse_config(
        "# sweep\n"
        "archs = [\"snaq\", \"2xN\"]  # both\n"
        "distances = [5, 3]\n"
        "rho = \"3/2\"\n"
        "mode = \"non_pipelined\"\n"
        "decoder = \"matching\"\n"
        "out_dir = \"a # b\"\n"
        "\n"
        "[noise]\n"
        "p_g = [1e-3, 3e-3]\n"
        "p_id = 0.01\n"
        "linear_idle = true\n"
        "[timing]\n"
        "t_cnot = 150\n"
        "c_route = 1.25\n");
    EXPECT_EQ(c.archs, (std::vector<Architecture>{Architecture::kSnaq, Architecture::kTwoByN}));
    EXPECT_EQ(c.distances, (std::vector<int>{5, 3}));
    EXPECT_EQ(c.rho, Rational(3, 2));
    EXPECT_EQ(c.mode, ScheduleMode::kNonPipelined);
    EXPECT_EQ(c.decoder, DecoderKind::kMatching);
    EXPECT_EQ(c.out_dir, "a # b");
    EXPECT_EQ(c.p_g, (std::vector<double>{1e-3, 3e-3}));
    EXPECT_EQ(c.p_id, std::vector<double>{0.01});
    EXPECT_TRUE(c.linear_idle);
    EXPECT_EQ(c.timing.t_cnot, 150);
    EXPECT_EQ(c.timing.c_route, 1.25);
    auto pts = c.noise_points();
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_EQ(pts[1].p_g, 3e-3);
    EXPECT_EQ(pts[1].p_sh, 1e-5);
    EXPECT_TRUE(pts[1].linear_idle);
}

TEST(Config, ErrorsCarryLineNumbers) {
    EXPECT_EQ(error_of("shots = 10\nbogus = 1\n"), "line 2: unknown key 'bogus'");
    EXPECT_EQ(error_of("\n\nseed = 1\nseed = 2\n"), "line 4: duplicate key 'seed'");
    EXPECT_EQ(error_of("shots 10\n"), "line 1: expected key = value");
    EXPECT_EQ(error_of("[hardware]\n"), "line 1: unknown section 'hardware'");
    EXPECT_EQ(error_of("distances = [3, 5\n"), "line 1: unterminated array");
    EXPECT_EQ(error_of("x\n[noise]\n"), "line 1: expected key = value");
    EXPECT_EQ(error_of("[noise]\np_g = 1e-3x\n"), "line 2: noise.p_g: bad number '1e-3x'");
    EXPECT_EQ(error_of("archs = [\"ibm\"]\n"), "line 1: archs: unknown architecture 'ibm'");
    EXPECT_EQ(error_of("seed = -1\n"), "line 1: seed: bad nonnegative integer '-1'");
    EXPECT_EQ(error_of("out_dir = \"x\n"), "line 1: unterminated string");
    EXPECT_EQ(error_of("rho = [1, 2]\n"), "line 1: rho takes a single value");
}

TEST(Config, ValidateRejects) {
    ExperimentConfig c;
    c.distances = {4};
    EXPECT_THROW(c.validate(), ConfigError);
    c = ExperimentConfig{};
    c.rho = Rational(0);
    EXPECT_THROW(c.validate(), ConfigError);
    c = ExperimentConfig{};
    c.p_id = {1.5};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = ExperimentConfig{};
    c.timing.t_meas = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Config, CanonicalTextRoundTrips) {
    ExperimentConfig c;
    c.archs = {Architecture::kSpinBus, Architecture::kSnaq};
    c.distances = {9, 3};
    c.rho = Rational(5, 2);
    c.p_sh = {1e-5, 3.3e-7};
    c.fits = {"a.json", "b \"q\".json"};
    c.timing.c_route = 0.1;
    c.basis = PauliType::X;
    std::string text = config_text(c);
    ExperimentConfig back = parse_config(text);
    EXPECT_EQ(config_text(back), text);
    EXPECT_EQ(back.fits, c.fits);
    EXPECT_EQ(back.p_sh, c.p_sh);
    EXPECT_EQ(back.rho, c.rho);
    EXPECT_EQ(config_hash(back), config_hash(c));
}

TEST(Config, HashIgnoresThreadsAndOutputDirOnly) {
    ExperimentConfig a, b;
    b.threads = 8;
    b.out_dir = "/tmp/elsewhere";
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
    b.seed = 2;
    EXPECT_NE(config_hash(a), config_hash(b));
    b = a;
    b.timing.t_init = 501;
    EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Cli, SampleWithZeroShotsIsUsageError) {
    ExperimentConfig c;
    c.shots = 0;
    EXPECT_THROW(cmd_sample(c), UsageError);
}

TEST(Cli, DistillDefaultConfigReproducesTable) {
    auto files = cmd_distill(ExperimentConfig{});
    ASSERT_EQ(files.size(), 1u);
    EXPECT_EQ(files[0].content.rfind("# snaqsim distill config_hash=", 0), 0u);
    auto rows = csv_rows(files[0].content);
    ASSERT_EQ(rows.size(), 7u);
    EXPECT_EQ(rows[0][6], "time_us");
    EXPECT_EQ(rows[0][8], "volume_qubit_s");
    struct Want {
        const char *arch;
        const char *d;
        double us, vol, tol;
    };
    const Want want[] = {{"snaq", "7", 40.6, 0.063, 0.10},     {"2xn", "7", 156.2, 0.152, 0.02},
                         {"spinbus", "7", 109.2, 0.159, 0.02}, {"snaq", "15", 91.5, 0.658, 0.10},
                         {"2xn", "15", 346.3, 1.555, 0.02},    {"spinbus", "15", 234.0, 1.576, 0.02}};
    for (int i = 0; i < 6; i++) {
        const auto &r = rows[i + 1];
        EXPECT_EQ(r[0], want[i].arch);
        EXPECT_EQ(r[1], want[i].d);
        EXPECT_NEAR(std::stod(r[6]), want[i].us, want[i].tol * want[i].us) << i;
        EXPECT_NEAR(std::stod(r[8]), want[i].vol, want[i].tol * want[i].vol) << i;
    }
}

TEST(Cli, DistillLayoutIsConfigurable) {
    auto dir = scratch_dir("layout");
    write(dir / "bad.txt", "slot 0 0 0\nlayer 0:9\n");
    ExperimentConfig c;
    c.distill_layout = (dir / "bad.txt").string();
    EXPECT_THROW(cmd_distill(c), std::invalid_argument);
}

TEST(Cli, CircuitValidatesAndEmits) {
    ExperimentConfig c;
    c.archs = {Architecture::kSnaq, Architecture::kSpinBus};
    c.distances = {3};
    auto files = cmd_circuit(c);
    ASSERT_EQ(files.size(), 3u);
    EXPECT_EQ(files[0].name, "schedule_snaq_d3.csv");
    EXPECT_EQ(files[1].name, "circuit_snaq_d3_Z.stim");
    EXPECT_EQ(files[2].name, "circuit_spinbus_d3_Z.stim");
    EXPECT_NE(files[1].content.find("DETECTOR"), std::string::npos);
    EXPECT_NE(files[1].content.find("OBSERVABLE_INCLUDE"), std::string::npos);
}

TEST(Cli, SampleIsByteIdenticalAcrossRunsAndThreads) {
    ExperimentConfig c;
    c.archs = {Architecture::kSpinBus, Architecture::kSnaq};
    c.distances = {3};
    c.p_g = {1e-2, 5e-3};
    c.shots = 3000;
    std::string a = cmd_sample(c)[0].content;
    c.threads = 3;
    std::string b = cmd_sample(c)[0].content;
    EXPECT_EQ(a, b);
    auto rows = csv_rows(a);
    ASSERT_EQ(rows.size(), 5u);
    // Sorted by arch, then noise.
    EXPECT_EQ(rows[1][0], "snaq");
    EXPECT_EQ(rows[1][4], "0.005");
    EXPECT_EQ(rows[2][4], "0.01");
    EXPECT_EQ(rows[3][0], "spinbus");
    EXPECT_EQ(rows[1][7], "6000");
    c.seed = 2;
    EXPECT_NE(cmd_sample(c)[0].content, a);
}

TEST(Cli, FitRejectsMixedNoiseAndMissingRows) {
    std::string csv =
        "arch,d,rho,mode,p_g,p_sh,p_id,shots,failures,p_L,ci_low,ci_high\n"
        "snaq,3,1,pipelined,0.001,0,0,10,1,0.1,0.05,0.2\n"
        "snaq,5,1,pipelined,0.002,0,0,10,1,0.1,0.05,0.2\n"
        "snaq,7,1,pipelined,0.001,0,0,10,1,0.1,0.05,0.2\n";
    EXPECT_THROW(cmd_fit(csv, Architecture::kSnaq, Rational(1)), UsageError);
    EXPECT_THROW(cmd_fit(csv, Architecture::kSpinBus, Rational(1)), UsageError);
    EXPECT_THROW(cmd_fit("arch,d\nsnaq,3\n", Architecture::kSnaq, Rational(1)), UsageError);
}

TEST(Cli, SampleFitLatencyPipeline) {
    auto dir = scratch_dir("pipeline");
    ExperimentConfig c = parse_config(
        "archs = [\"snaq\", \"2xn\", \"spinbus\"]\n"
        "distances = [3, 5, 7]\n"
        "rho = 2\n"
        "shots = 50000\n"
        "[noise]\n"
        "p_g = 3e-3\n");
    auto ler = cmd_sample(c);
    write(dir / ler[0].name, ler[0].content);
    c.ler_csv = (dir / "ler.csv").string();
    auto fits = cmd_fit(c);
    ASSERT_EQ(fits.size(), 3u);
    std::string hash = config_hash(c);
    for (const auto &f : fits) {
        write(dir / f.name, f.content);
        c.fits.push_back((dir / f.name).string());
        EXPECT_EQ(nlohmann::json::parse(f.content)["config_hash"], hash);
    }
    c.target = 1e-6;
    auto lat = cmd_latency(c);
    ASSERT_EQ(lat.size(), 3u);
    EXPECT_EQ(lat[2].name, "speedup.csv");
    auto rows = csv_rows(lat[2].content);
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows[1][1], "tcnot+se");
    for (size_t i = 2; i < rows.size(); i++) {
        if (rows[i][0] == "snaq") continue;
        EXPECT_GT(std::stod(rows[i][6]), 4.0) << rows[i][0];
    }
}

TEST(Config, ShippedConfigsParse) {
    for (const char *name : {"desk_scale.toml", "idle_sweep.toml"}) {
        ExperimentConfig c = load_config(std::string(SNAQ_DATA_DIR) + "/../configs/" + name);
        EXPECT_NO_THROW(c.validate()) << name;
    }
}
