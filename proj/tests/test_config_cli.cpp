#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include "social_learning/cli.hpp"
#include "social_learning/config.hpp"
#include "social_learning/output.hpp"
#include "social_learning/scenarios.hpp"

using namespace social_learning;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = CONFIG_DIR;

const char* kTwoAgent = R"(
network:
  adjacency: [[1], [0]]
  combination: metropolis
hypotheses:
  count: 2
  truth: 1
likelihoods:
  - agents: [0, 1]
    kind: gaussian
    means: [0, 1]
protocol:
  kind: full
simulation:
  horizon: 10
  seed: 3
)";

std::vector<std::string> problems_of(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.problems();
    }
    return {};
}

bool any_contains(const std::vector<std::string>& list, const std::string& needle) {
    for (const auto& s : list) {
        if (s.find(needle) != std::string::npos) return true;
    }
    return false;
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    if (pos == std::string::npos) throw std::logic_error("pattern not found: " + from);
    return text.replace(pos, from.size(), to);
}

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult cli(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("sociallearn_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Config, MinimalParses) {
    const auto config = parse_config_text(kTwoAgent);
    EXPECT_EQ(config.num_agents(), 2u);
    EXPECT_EQ(config.hypotheses(), 2u);
    EXPECT_EQ(config.network.truth, 0u);
    EXPECT_EQ(config.horizon, 10u);
    EXPECT_EQ(config.seed, 3u);
    EXPECT_TRUE(std::holds_alternative<FullSharing>(config.protocol));
    EXPECT_EQ(config.initial_beliefs[1], Belief::uniform(2));
}

TEST(Config, ShippedTenAgentConfigMatchesScenario) {
    const auto parsed = parse_config(kConfigs / "fig3.cfg");
    const auto built = scenarios::trending_never_truth(1, 2000);
    EXPECT_EQ(parsed.horizon, built.horizon);
    EXPECT_LT((parsed.network.combination.entries() - built.network.combination.entries()).cwiseAbs().maxCoeff(), 1e-15);
    for (std::size_t k = 0; k < 10; ++k) {
        const auto& a = parsed.network.model.agent(k).gaussian_family()->means;
        const auto& b = built.network.model.agent(k).gaussian_family()->means;
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t h = 0; h < a.size(); ++h) EXPECT_NEAR(a[h], b[h], 1e-15);
    }
    const auto& trend = std::get<TrendingBootstrap>(parsed.protocol).trend;
    for (Hypothesis h = 0; h < 5; ++h) EXPECT_EQ(trend.prob(h), std::get<TrendingBootstrap>(built.protocol).trend.prob(h));
}

TEST(Config, EveryShippedConfigParses) {
    for (const auto& entry : fs::directory_iterator(kConfigs)) {
        EXPECT_NO_THROW(parse_config(entry.path())) << entry.path();
    }
    const auto counter = parse_config(kConfigs / "counterexample.cfg");
    EXPECT_TRUE(counter.allow_zero_beliefs);
    EXPECT_EQ(counter.network.truth, 3u);
    EXPECT_NEAR(counter.initial_beliefs[0].prob(3), 0.3, 1e-15);
}

TEST(Config, MissingTrendNamesField) {
    const auto problems = problems_of(replace(kTwoAgent, "kind: full", "kind: trending"));
    ASSERT_EQ(problems.size(), 1u);
    EXPECT_NE(problems[0].find("protocol.trend"), std::string::npos);
}

TEST(Config, TrendMustSumToOne) {
    const auto problems = problems_of(replace(kTwoAgent, "kind: full", "kind: trending\n  trend: [0.5, 0.4]"));
    EXPECT_TRUE(any_contains(problems, "sums to 0.9")) << ::testing::PrintToString(problems);
}

TEST(Config, AllProblemsAreItemized) {
    std::string text = replace(kTwoAgent, "means: [0, 1]", "means: [0, 1, 2]");
    text = replace(text, "seed: 3", "seed: 3\n  colour: blue");
    text = replace(text, "truth: 1", "truth: 7");
    const auto problems = problems_of(text);
    EXPECT_GE(problems.size(), 3u) << ::testing::PrintToString(problems);
    EXPECT_TRUE(any_contains(problems, "simulation.colour"));
    EXPECT_TRUE(any_contains(problems, "means"));
    EXPECT_TRUE(any_contains(problems, "hypotheses.truth"));
}

TEST(Config, UncoveredAgentIsReported) {
    const auto problems = problems_of(replace(kTwoAgent, "agents: [0, 1]", "agents: [0]"));
    EXPECT_TRUE(any_contains(problems, "agent 1")) << ::testing::PrintToString(problems);
}

TEST(Cli, SimulateHorizonZeroWritesHeaderAndInitialRows) {
    const auto dir = scratch("h0");
    const auto r = cli({"simulate", (kConfigs / "fig3.cfg").string(), "--horizon", "0", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream trace(slurp(dir / "trace.csv"));
    std::string line;
    std::getline(trace, line);
    EXPECT_EQ(line, "time,agent,hypothesis,log_belief,tau,Q");
    std::size_t rows = 0;
    while (std::getline(trace, line)) {
        EXPECT_EQ(line.rfind("0,", 0), 0u);
        ++rows;
    }
    EXPECT_EQ(rows, 50u);
    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    EXPECT_EQ(summary["horizon"], 0);
    EXPECT_EQ(summary["agents"], 10);
    for (const char* f : {"network.csv", "beliefs.csv", "rates.csv", "tau.csv"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
}

TEST(Cli, SimulateIsReproducible) {
    const auto a = scratch("rep_a");
    const auto b = scratch("rep_b");
    ASSERT_EQ(cli({"simulate", (kConfigs / "fig3.cfg").string(), "--horizon", "50", "--out", a.string()}).code, 0);
    ASSERT_EQ(cli({"simulate", (kConfigs / "fig3.cfg").string(), "--horizon", "50", "--out", b.string()}).code, 0);
    EXPECT_EQ(slurp(a / "trace.csv"), slurp(b / "trace.csv"));
    EXPECT_EQ(slurp(a / "summary.json"), slurp(b / "summary.json"));
}

TEST(Cli, BadConfigExitsTwo) {
    const auto dir = scratch("bad");
    std::ofstream(dir / "bad.cfg") << replace(kTwoAgent, "kind: full", "kind: trending");
    const auto r = cli({"simulate", (dir / "bad.cfg").string(), "--out", dir.string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("protocol.trend"), std::string::npos);
}

TEST(Cli, VerifyUnknownCheckListsAvailable) {
    const auto r = cli({"verify", "bogus"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("supermartingale"), std::string::npos);
}

TEST(Cli, VerifyWritesReports) {
    const auto dir = scratch("verify");
    const auto r = cli({"verify", "fixed_point", "--seed", "1", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("1/1 checks passed"), std::string::npos) << r.out;
    const auto json = nlohmann::json::parse(slurp(dir / "checks.json"));
    EXPECT_FALSE(json.empty());
    EXPECT_TRUE(fs::exists(dir / "checks.txt"));
}

TEST(Cli, RatesPrintsTable) {
    const auto dir = scratch("rates");
    const auto r = cli({"rates", (kConfigs / "fig3.cfg").string(), "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("-0.036"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("-0.504"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "rates.csv"));
    EXPECT_TRUE(fs::exists(dir / "kl_contributions.csv"));
}

TEST(Cli, SweepWritesOneRowPerPoint) {
    const auto dir = scratch("sweep");
    const auto r = cli({"sweep", (kConfigs / "fig3.cfg").string(), "--seeds", "1,2", "--horizons", "20,40", "--out",
                        dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream csv(slurp(dir / "sweep.csv"));
    std::string line;
    std::size_t rows = 0;
    std::getline(csv, line);
    while (std::getline(csv, line)) ++rows;
    EXPECT_EQ(rows, 4u);
}

TEST(Cli, MissingSubcommandIsUsageError) {
    EXPECT_EQ(cli({}).code, 2);
    EXPECT_EQ(cli({"simulate"}).code, 2);
}
