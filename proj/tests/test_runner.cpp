#include "tanlock/runner.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace tanlock;
namespace fs = std::filesystem;

namespace {

const fs::path scenario_dir{TANLOCK_SCENARIO_DIR};
const fs::path golden_dir{TANLOCK_GOLDEN_DIR};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("tanlock_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

Scenario short_scenario() {
    auto s = parse_scenario("name = short\n"
                            "divider.ratio_int = 4\n"
                            "divider.ratio_frac = 1/5\n"
                            "stimulus.step_value = 0.3\n"
                            "stimulus.step_time = 0.05\n"
                            "stimulus.initial_phase = 0.25\n"
                            "run.samples = 100\n"
                            "analysis.hold = 20\n");
    return s;
}

} // namespace

TEST(Runner, HeadersAreFixed) {
    std::ostringstream trace;
    write_trace_csv(trace, {});
    EXPECT_EQ(trace.str(), "k,t,ratio,edge,f_dco,s_sin,s_cos,phi,v_filter,saturated,degenerate\n");
    std::ostringstream plane;
    write_phase_plane_csv(plane, {});
    EXPECT_EQ(plane.str(), "phi_k,phi_k1\n");
}

TEST(Runner, ShortTraceMatchesGolden) {
    std::ostringstream log;
    const auto dir = scratch("golden");
    run_scenario(short_scenario(), dir, log);
    EXPECT_EQ(slurp(dir / "trace.csv"), slurp(golden_dir / "short_trace.csv"));
}

TEST(Runner, Fig7LocksAtRatioFour) {
    std::ostringstream log;
    const auto dir = scratch("fig7");
    ASSERT_EQ(run_scenario(load_scenario(scenario_dir / "fig7.scn"), dir, log), exit_ok) << log.str();
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    EXPECT_TRUE(report["lock"]["locked"].get<bool>());
    EXPECT_NEAR(report["lock"]["dco_to_sample_ratio"].get<double>(), 4.0, 0.004);
    EXPECT_EQ(report["tool"].get<std::string>(), std::string(tool_version));
    EXPECT_EQ(report["seed"].get<std::uint64_t>(), 7u);
    EXPECT_EQ(first_line(slurp(dir / "trace.csv")), trace_csv_header);
    EXPECT_EQ(first_line(slurp(dir / "phase_plane.csv")), phase_plane_csv_header);
}

TEST(Runner, LockInitializedRunIsQuiet) {
    std::ostringstream log;
    const auto dir = scratch("lock_init");
    auto s = load_scenario(scenario_dir / "lock_init.scn");
    ASSERT_EQ(run_scenario(s, dir, log), exit_ok);
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    EXPECT_LT(report["lock"]["steady_phi_std"].get<double>(), 1e-9);
}

TEST(Runner, OutputsAreByteIdenticalAcrossRuns) {
    std::ostringstream log;
    auto s = load_scenario(scenario_dir / "fig10.scn");
    s.stimulus.snr_db = 20.0;
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    run_scenario(s, a, log);
    run_scenario(s, b, log);
    for(const char* file : {"trace.csv", "phase_plane.csv", "report.json"})
        EXPECT_EQ(slurp(a / file), slurp(b / file)) << file;
}

TEST(Runner, UnwritableOutputIsAnIoError) {
    const auto blocker = scratch("blocker");
    std::ofstream(blocker) << "not a directory";
    std::ostringstream log;
    EXPECT_EQ(run_scenario(short_scenario(), blocker / "out", log), exit_error);
    fs::remove(blocker);
}

TEST(Runner, UnlockedRunStillWritesTraces) {
    auto s = short_scenario();
    s.synth.adaptation.enabled = false;
    s.stimulus.step_value = 0.0;
    s.run_length = 500;
    std::ostringstream log;
    const auto dir = scratch("unlocked");
    EXPECT_EQ(run_scenario(s, dir, log), exit_unlocked);
    EXPECT_TRUE(fs::exists(dir / "trace.csv"));
    EXPECT_TRUE(fs::exists(dir / "report.json"));
}

TEST(Runner, CompareRatioColumnIsRecomputable) {
    auto s = load_scenario(scenario_dir / "fig14.scn");
    s.sweep.snr_list = {10.0, 20.0};
    s.sweep.trials = 2;
    s.run_length = 600;
    std::ostringstream log;
    const auto dir = scratch("compare");
    run_compare(s, dir, log);
    std::istringstream csv(slurp(dir / "jitter_sweep.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, jitter_sweep_csv_header);
    int rows = 0;
    while(std::getline(csv, line)) {
        double snr = 0, tdtl = 0, ndtl = 0, ratio = 0;
        char c = 0;
        std::istringstream row(line);
        row >> snr >> c >> tdtl >> c >> ndtl >> c >> ratio;
        EXPECT_DOUBLE_EQ(ratio, ndtl / tdtl);
        ++rows;
    }
    EXPECT_EQ(rows, 2);
}

TEST(Runner, LockrangeRows) {
    auto s = load_scenario(scenario_dir / "fig7.scn");
    std::ostringstream log;
    const auto dir = scratch("lockrange");
    ASSERT_EQ(run_lockrange(s, linear_grid(0.9, 1.1, 3), dir, log), exit_ok) << log.str();
    const auto csv = slurp(dir / "lockrange.csv");
    EXPECT_EQ(first_line(csv), lockrange_csv_header);
    EXPECT_NE(csv.find("ndtl,1,1,"), std::string::npos);
    EXPECT_NE(csv.find("tdtl,1,1,"), std::string::npos);
    const auto j = nlohmann::json::parse(slurp(dir / "lockrange.json"));
    EXPECT_TRUE(j.contains("ndtl_less_asymmetric"));
}

TEST(Runner, LinearGrid) {
    EXPECT_EQ(linear_grid(0.5, 1.5, 3), (std::vector<double>{0.5, 1.0, 1.5}));
    EXPECT_EQ(linear_grid(0.7, 1.5, 1), (std::vector<double>{0.7}));
    EXPECT_EQ(linear_grid(0.5, 1.5, 101)[50], 1.0);
}

TEST(Runner, DividerSequence) {
    DividerConfig cfg;
    cfg.ratio_frac = Rational(1, 5);
    EXPECT_EQ(divider_sequence(cfg, 5), (std::vector<int>{4, 4, 4, 4, 5}));
}
