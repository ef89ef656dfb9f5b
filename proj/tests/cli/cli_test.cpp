#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "brachiation/episode_io.hpp"
#include "brachiation/errors.hpp"
#include "../unit/test_support.hpp"
#include "config.hpp"

namespace brachiation {
namespace {

using cli::RunConfig;

const std::filesystem::path kExperiments = BRACHIATION_EXPERIMENTS_DIR;
const std::string kLab = BRACHIATION_LAB_PATH;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

int run_lab(const std::string& args) {
  const int status = std::system((kLab + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Exact-model spring-damper swing, which tracks and grabs.
std::string exact_config(const std::filesystem::path& out) {
  return "[guess]\nk_s = 680\nb_s = 20\nz_s = 1.9\n"
         "[episode]\nic = \"-48,-98,1.84\"\n"
         "[output]\ndir = \"" + out.string() + "\"\n";
}

TEST(Config, ExperimentFilesLoadAndValidate) {
  for (const char* name : {"fig3_single_swing", "fig4_spring_damper", "fig5_monte_carlo",
                           "fig7_continuous"}) {
    RunConfig c;
    EXPECT_NO_THROW(cli::apply_file(c, kExperiments / (std::string(name) + ".toml"))) << name;
    EXPECT_NO_THROW(c.finalize()) << name;
  }
}

TEST(Config, ExperimentValues) {
  RunConfig c;
  cli::apply_file(c, kExperiments / "fig7_continuous.toml");
  c.finalize();
  EXPECT_EQ(c.scenario.plant, PlantKind::kFullCable);
  EXPECT_EQ(c.scenario.swings, 5);
  EXPECT_NEAR(c.scenario.initial.q[0], deg(-46.2), 1e-15);
  EXPECT_EQ(c.scenario.initial.q[2], 1.88);
  EXPECT_NEAR(c.scenario.guess.p[2], 640.0, 1e-12);
  EXPECT_EQ(c.scenario.station_x, 1.0);
}

TEST(Config, UnknownKeyNamed) {
  testing::TempDir dir("cfg");
  write_text(dir / "c.toml", "[controller]\nlamda = 8\n");
  RunConfig c;
  try {
    cli::apply_file(c, dir / "c.toml");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "controller.lamda");
  }
}

TEST(Config, BadValueAndInvariantNamed) {
  RunConfig c;
  try {
    cli::apply(c, "episode.dt", "fast");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "episode.dt");
  }
  cli::apply(c, "controller.k_d0", "1.5");
  try {
    c.finalize();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "controller.k_d0");
  }
}

TEST(Config, CommentsQuotesAndTopLevelKeys) {
  testing::TempDir dir("cfg");
  write_text(dir / "a.toml", "# heading\n[output]\ndir = \"out#1\"  # trailing\n");
  RunConfig c;
  cli::apply_file(c, dir / "a.toml");
  EXPECT_EQ(c.out_dir, "out#1");
  write_text(dir / "b.toml", "seed = 3\n");
  EXPECT_THROW(cli::apply_file(c, dir / "b.toml"), ConfigError);
}

TEST(Config, InitialConditionUnits) {
  const RobotState s = cli::parse_initial_condition("-35,-110,1.84,90,0,0.5", "--ic");
  EXPECT_NEAR(s.q[0], deg(-35.0), 1e-15);
  EXPECT_NEAR(s.qdot[0], kPi / 2.0, 1e-15);
  EXPECT_EQ(s.qdot[2], 0.5);
  EXPECT_THROW(cli::parse_initial_condition("1,2", "--ic"), ConfigError);
}

TEST(Config, GuessKeysCommuteOnProduct) {
  RunConfig a;
  cli::apply(a, "guess.z_s", "2.0");
  cli::apply(a, "guess.k_s", "500");
  RunConfig b;
  cli::apply(b, "guess.k_s", "500");
  cli::apply(b, "guess.z_s", "2.0");
  EXPECT_NEAR(a.scenario.guess.p[2], 1000.0, 1e-9);
  EXPECT_NEAR(b.scenario.guess.p[2], 1000.0, 1e-9);
}

TEST(Config, HelpListsEveryKeyWithUnit) {
  const std::string help = cli::describe_keys();
  for (const auto& k : cli::config_keys()) {
    EXPECT_NE(help.find(std::string(k.key)), std::string::npos) << k.key;
    EXPECT_FALSE(k.unit.empty());
  }
}

TEST(Lab, MissingConfigLeavesNoOutput) {
  testing::TempDir dir("lab");
  EXPECT_EQ(run_lab("swing --config " + (dir / "absent.toml").string() + " --out " +
                    (dir / "out").string()),
            1);
  EXPECT_FALSE(std::filesystem::exists(dir / "out"));
}

TEST(Lab, SwingWritesReadableCsvs) {
  testing::TempDir dir("lab");
  write_text(dir / "c.toml", exact_config(dir / "swing"));
  ASSERT_EQ(run_lab("swing --config " + (dir / "c.toml").string()), 0);
  const EpisodeLog log = read_episode(dir / "swing" / "episode_adaptive-robust.csv",
                                      dir / "swing" / "events_adaptive-robust.csv");
  EXPECT_EQ(log.rows.size(), 1101u);
  EXPECT_LT(compute_metrics(log.rows).rmse_y, 0.5);
}

TEST(Lab, ContinuousSingleSwingMatchesSwing) {
  testing::TempDir dir("lab");
  write_text(dir / "c.toml", exact_config(dir / "unused"));
  const std::string cfg = " --config " + (dir / "c.toml").string();
  ASSERT_EQ(run_lab("swing" + cfg + " --out " + (dir / "a").string()), 0);
  ASSERT_EQ(run_lab("continuous --swings 1" + cfg + " --out " + (dir / "b").string()), 0);
  EXPECT_EQ(slurp(dir / "a" / "episode_adaptive-robust.csv"), slurp(dir / "b" / "episode.csv"));
}

TEST(Lab, ConfigErrorExitCodeAndDisturbanceFlag) {
  testing::TempDir dir("lab");
  EXPECT_EQ(run_lab("swing --disturbance 10 --out " + (dir / "x").string()), 1);
  EXPECT_EQ(run_lab("swing --log-rate 3 --out " + (dir / "x").string()), 1);
  EXPECT_FALSE(std::filesystem::exists(dir / "x"));
  write_text(dir / "c.toml", exact_config(dir / "d"));
  run_lab("swing --disturbance 10,5 --config " + (dir / "c.toml").string());
  const auto rows = read_episode_csv(dir / "d" / "episode_adaptive-robust.csv");
  EXPECT_NEAR(rows[50].F_d, 10.0 * std::sin(2.0 * kPi * 5.0 * rows[50].t), 1e-9);
}

TEST(Lab, MonteCarloRepeatableAndSingleRunAggregate) {
  testing::TempDir dir("lab");
  const std::string common = " --plant spring-damper -n 1 --seed 7 --out ";
  ASSERT_EQ(run_lab("monte-carlo" + common + (dir / "a").string()), 0);
  ASSERT_EQ(run_lab("monte-carlo" + common + (dir / "b").string()), 0);
  EXPECT_EQ(slurp(dir / "a" / "aggregate.csv"), slurp(dir / "b" / "aggregate.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "a" / "runs" / "episode_000_feedback-linearization.csv"));
  const auto agg = read_aggregate_csv(dir / "a" / "aggregate.csv");
  const auto rows = read_episode_csv(dir / "a" / "runs" / "episode_000_adaptive-robust.csv");
  EXPECT_NEAR(agg[0].rmse_y, compute_metrics(rows).rmse_y, 1e-12);
  EXPECT_EQ(agg[0].runs, 1);
}

}  // namespace
}  // namespace brachiation
