#include <sstream>

#include <gtest/gtest.h>

#include "aaoreg/settings.hpp"

using namespace aaoreg;

namespace {
Settings parse(const std::string& text) {
  std::istringstream in(text);
  return parse_settings(in, "test");
}
}  // namespace

TEST(Settings, ParsesCommentsAndLastEntryWins) {
  const Settings s = parse("# comment\n\nxi = 1, 2 # trailing\n  seed=3\nseed = 4\n");
  EXPECT_EQ(s.get("xi"), "1, 2");
  EXPECT_EQ(s.get("seed"), "4");
  EXPECT_FALSE(s.get("rho").has_value());
}

TEST(Settings, UnknownKeyListsValidKeys) {
  try {
    parse("colour = red\n");
    FAIL();
  } catch (const SettingsError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("test:1"), std::string::npos);
    EXPECT_NE(msg.find("colour"), std::string::npos);
    EXPECT_NE(msg.find("tau_sq"), std::string::npos);
  }
  EXPECT_THROW(parse("no equals sign\n"), SettingsError);
  EXPECT_THROW(parse("xi =\n"), SettingsError);
}

TEST(Settings, MethodNames) {
  EXPECT_EQ(parse_method("irgnm-aao"), std::make_pair(Paradigm::irgnm, Formulation::aao));
  EXPECT_EQ(parse_method("landweber-reduced"), std::make_pair(Paradigm::landweber, Formulation::reduced));
  EXPECT_EQ(parse_method("tikhonov-red"), std::make_pair(Paradigm::tikhonov, Formulation::reduced));
  EXPECT_THROW(parse_method("newton-aao"), SettingsError);
  EXPECT_THROW(parse_method("irgnm"), SettingsError);
}

TEST(Settings, AppliesAndValidatesSolverKeys) {
  SolverConfig cfg;
  apply_settings(parse("method = landweber-reduced\nrho = 2\nmax_outer = 1e5\nalpha_rule = sigma\n"
                       "state_norm = h2\nmu_policy = fixed\nmu = 0.1\ntau_sq = 9\n"),
                 cfg);
  EXPECT_EQ(cfg.paradigm, Paradigm::landweber);
  EXPECT_EQ(cfg.formulation, Formulation::reduced);
  EXPECT_EQ(cfg.rho, 2.0);
  EXPECT_EQ(cfg.max_outer, 100000u);
  EXPECT_EQ(cfg.alpha_rule, AlphaRule::sigma_rule);
  EXPECT_EQ(cfg.state_norm, StateNorm::h2);
  EXPECT_EQ(cfg.mu_policy, MuPolicy::fixed);
  EXPECT_EQ(cfg.tau_sq, 9.0);

  SolverConfig c2;
  EXPECT_THROW(apply_settings(parse("alpha_decay = 1.5\n"), c2), SettingsError);
  EXPECT_THROW(apply_settings(parse("rho = abc\n"), c2), SettingsError);
  EXPECT_THROW(apply_settings(parse("max_outer = 2.5\n"), c2), SettingsError);
  EXPECT_THROW(apply_settings(parse("max_outer = -1\n"), c2), SettingsError);
  EXPECT_THROW(apply_settings(parse("reg_target = both\n"), c2), SettingsError);
}

TEST(Settings, ExperimentOverrides) {
  ExperimentSpec spec = table1_spec();
  apply_settings(parse("xi = 0\ntau_sq = 4\nseed = 7\nrecord_timing = false\nmax_outer = 60\njobs = 2\n"), spec);
  EXPECT_EQ(spec.xis, std::vector<double>{0.0});
  EXPECT_EQ(spec.tau_sq_for(0), 4.0);
  EXPECT_EQ(spec.seed, 7u);
  EXPECT_FALSE(spec.record_timing);
  EXPECT_EQ(spec.jobs, 2u);
  for (const auto& cfg : spec.solver_matrix) EXPECT_EQ(cfg.max_outer, 60u);

  EXPECT_THROW(apply_settings(parse("method = irgnm-aao\n"), spec), SettingsError);
  EXPECT_THROW(apply_settings(parse("noise_level = -1\n"), spec), SettingsError);
  EXPECT_THROW(apply_settings(parse("xi = 1,2\ntau_sq = 4,4,4\n"), spec), SettingsError);
}

TEST(Settings, NewXiListKeepsPerXiTauSq) {
  ExperimentSpec spec = table1_spec();
  apply_settings(parse("xi = 1000, 0, 7\n"), spec);
  ASSERT_EQ(spec.tau_sqs.size(), 3u);
  EXPECT_EQ(spec.tau_sq_for(0), 20.0);
  EXPECT_EQ(spec.tau_sq_for(1), 4.0);
  EXPECT_EQ(spec.tau_sq_for(2), 4.0);
}

TEST(Settings, MergeOverrides) {
  Settings a = parse("seed = 1\nrho = 3\n");
  a.merge(parse("seed = 2\n"));
  EXPECT_EQ(a.get("seed"), "2");
  EXPECT_EQ(a.get("rho"), "3");
}
