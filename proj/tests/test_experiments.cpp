#include <cmath>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "cpt/experiments.hpp"

using namespace cpt;

TEST(DynamicsExperiment, SinglePairTransient) {
  ExperimentConfig cfg;
  cfg.n_pairs = 1;
  const auto r = run_dynamics_experiment(cfg);
  EXPECT_NEAR(r.max_transients[g2], 0.5, 0.02);
  EXPECT_GE(r.final_populations[g3], 0.99);
}

TEST(DynamicsExperiment, UnequalDetunings) {
  ExperimentConfig cfg;
  cfg.det.delta1 = 240.0;
  EXPECT_GE(run_dynamics_experiment(cfg).final_populations[g3], 0.98);
}

TEST(DynamicsExperiment, ThreeToOneSplit) {
  ExperimentConfig cfg;
  cfg.target_angle = pi / 12;
  const auto p = run_dynamics_experiment(cfg).final_populations;
  EXPECT_NEAR(p[g1], 0.75, 0.02);
  EXPECT_NEAR(p[g3], 0.25, 0.02);
}

TEST(DynamicsExperiment, PropagatesSynthesisErrors) {
  ExperimentConfig cfg;
  cfg.det.delta2 = -300.0;
  EXPECT_THROW(run_dynamics_experiment(cfg), SynthesisError);
  cfg.det.delta2 = 300.0;
  cfg.decay.gamma_g2 = -1.0;
  EXPECT_THROW(run_dynamics_experiment(cfg), DomainError);
}

TEST(Axis, Values) {
  const Axis a{"x", 100.0, 600.0, 41};
  EXPECT_DOUBLE_EQ(a.value(0), 100.0);
  EXPECT_DOUBLE_EQ(a.value(40), 600.0);
  EXPECT_DOUBLE_EQ(a.value(20), 350.0);
  EXPECT_DOUBLE_EQ((Axis{"y", 3.0, 3.0, 1}.value(0)), 3.0);
  EXPECT_THROW((Axis{"z", 2.0, 1.0, 3}.validate()), DomainError);
}

TEST(EvaluateGrid, IndependentOfWorkerCount) {
  const Axis a{"a", 0.0, 1.0, 7};
  const Axis b{"b", -1.0, 1.0, 5};
  auto cell = [](double x, double y) {
    if (x > 0.9 && y > 0.9) throw DomainError("corner");
    return std::sin(3.0 * x) * std::cos(y);
  };
  const auto one = evaluate_grid(a, b, "f", cell, {1});
  const auto four = evaluate_grid(a, b, "f", cell, {4});
  ASSERT_EQ(one.values.size(), 35u);
  for (std::size_t i = 0; i < one.values.size(); ++i) {
    if (std::isnan(one.values[i])) {
      EXPECT_TRUE(std::isnan(four.values[i]));
    } else {
      EXPECT_EQ(one.values[i], four.values[i]);
    }
  }
  ASSERT_EQ(one.errors.size(), 1u);
  EXPECT_EQ(one.errors, four.errors);
  EXPECT_TRUE(std::isnan(one.at(6, 4)));
  EXPECT_EQ(one.errors[0].rfind("6,4:", 0), 0u);
}

TEST(ScanOnePhoton, ZeroDetuningCellIsMissing) {
  ExperimentConfig base;
  base.n_pairs = 1;
  const auto grid = scan_one_photon({"delta1", 0.0, 300.0, 2}, {"delta2", 300.0, 300.0, 1}, base);
  EXPECT_TRUE(std::isnan(grid.at(0, 0)));
  EXPECT_GE(grid.at(1, 0), 0.99);
  EXPECT_EQ(grid.errors.size(), 1u);
}

TEST(ScanOnePhoton, AsymmetricDetuningsDoWorse) {
  ExperimentConfig base;
  const auto grid = scan_one_photon({"delta1", 100.0, 300.0, 2}, {"delta2", 300.0, 500.0, 2},
                                    base, {1});
  const double matched = grid.at(1, 0);   // (300, 300)
  const double skewed = grid.at(0, 1);    // (100, 500)
  EXPECT_GE(matched, 0.99);
  EXPECT_LT(skewed, matched);
}

TEST(ScanOnePhoton, DecayLowersEfficiency) {
  ExperimentConfig base;
  base.decay = {0.1, 0.01, 0.1};
  const Axis d{"delta", 200.0, 400.0, 3};
  const auto study = scan_one_photon_with_control(d, d, base, {1});
  for (std::size_t i = 0; i < study.decayed.values.size(); ++i) {
    EXPECT_LT(study.decayed.values[i], study.control.values[i]);
  }
}

TEST(ScanTwoPhoton, OriginMatchesBaselineRun) {
  ExperimentConfig base;
  const auto grid = scan_two_photon({"small_delta1", 0.0, 0.0, 1}, {"small_delta2", 0.0, 0.0, 1},
                                    base, {1});
  EXPECT_EQ(grid.at(0, 0), run_dynamics_experiment(base).final_populations[g3]);
}

TEST(ScanTwoPhoton, LargeDetuningCornerFails) {
  ExperimentConfig base;
  const auto grid = scan_two_photon({"small_delta1", 1.0, 1.0, 1}, {"small_delta2", 1.0, 1.0, 1},
                                    base, {1});
  EXPECT_LT(grid.at(0, 0), 0.5);
}

TEST(GridCsv, HeaderAndRows) {
  ScanGrid g{{"delta1", 1.0, 2.0, 2}, {"delta2", 5.0, 5.0, 1}, "P_g3", {0.25, NAN}, {}};
  std::ostringstream os;
  write_grid_csv(os, g);
  EXPECT_EQ(os.str(),
            "# axis1=delta1,min=1,max=2,points=2\n"
            "# axis2=delta2,min=5,max=5,points=1\n"
            "# observable=P_g3\n"
            "delta1,delta2,P_g3\n"
            "1,5,0.25\n"
            "2,5,nan\n");
}

TEST(NScaling, RowsTrackPrediction) {
  ExperimentConfig base;
  const auto rows = n_scaling(5, base);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_NEAR(rows[0].predicted, 0.5, 1e-15);
  EXPECT_NEAR(rows[4].predicted, 0.0245, 1e-4);
  EXPECT_NEAR(rows[4].measured_full, rows[4].predicted, 0.01);
  for (const auto& r : rows) EXPECT_NEAR(r.measured_effective, r.predicted, 1e-3);
  EXPECT_THROW(n_scaling(0, base), DomainError);
}

TEST(NScaling, DoublingNQuartersTheTransient) {
  ExperimentConfig base;
  base.output_samples = 1;
  auto measured = [&](int n) {
    base.n_pairs = n;
    return run_dynamics_experiment(base).max_transients[g2];
  };
  EXPECT_NEAR(measured(5) / measured(10), 4.0, 0.4);
}
