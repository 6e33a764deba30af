#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cpt/core_state.hpp"
#include "cpt/pulse_design.hpp"

using namespace cpt;

TEST(FullHamiltonian, ZeroInputsGiveZeroMatrix) {
  const auto h = build_full_hamiltonian(PhysicalRabi{}, DetuningConfig{0, 0, 0, 0},
                                        DecayConfig{});
  EXPECT_EQ(h.cwiseAbs().maxCoeff(), 0.0);
}

TEST(FullHamiltonian, MatchesChainMatrixOnResonance) {
  const PhysicalRabi r{1.5, 2.5, 3.5, 4.5};
  const DetuningConfig det{300.0, 250.0, 0.0, 0.0};
  const auto h = build_full_hamiltonian(r, det, {});
  HamiltonianMatrix<5> expected = HamiltonianMatrix<5>::Zero();
  expected(0, 1) = expected(1, 0) = 1.5;
  expected(1, 2) = expected(2, 1) = 2.5;
  expected(2, 3) = expected(3, 2) = 3.5;
  expected(3, 4) = expected(4, 3) = 4.5;
  expected(1, 1) = 600.0;
  expected(3, 3) = 500.0;
  expected *= 0.5;
  EXPECT_EQ((h - expected).cwiseAbs().maxCoeff(), 0.0);
}

TEST(FullHamiltonian, TwoPhotonDetuningsAreCumulative) {
  const DetuningConfig det{300.0, 200.0, 0.3, -0.7};
  const auto h = build_full_hamiltonian(PhysicalRabi{}, det, {});
  EXPECT_DOUBLE_EQ(h(g2, g2).real(), 0.3);
  EXPECT_DOUBLE_EQ(h(e2, e2).real(), 200.3);
  EXPECT_DOUBLE_EQ(h(g3, g3).real(), 0.3 - 0.7);
}

TEST(FullHamiltonian, DecayGivesNegativeHalfRateOnDiagonal) {
  const auto h = build_full_hamiltonian(PhysicalRabi{}, DetuningConfig{0, 0, 0, 0},
                                        DecayConfig{0.1, 0.01, 0.1});
  const double expected[] = {0.0, -0.05, -0.005, -0.05, 0.0};
  for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(h(i, i).imag(), expected[i]) << i;
}

TEST(FullHamiltonian, RejectsNegativeDecayAndNonFiniteDetuning) {
  EXPECT_THROW(build_full_hamiltonian(PhysicalRabi{}, {}, DecayConfig{-0.1, 0, 0}),
               DomainError);
  EXPECT_THROW(build_full_hamiltonian(PhysicalRabi{}, DetuningConfig{NAN, 1, 0, 0}, {}),
               DomainError);
  EXPECT_THROW(
      build_full_hamiltonian(PhysicalRabi{}, DetuningConfig{1, INFINITY, 0, 0}, {}),
      DomainError);
}

TEST(FullHamiltonian, HermitianAndChainSparseOnSynthesizedSchedule) {
  TrainDesign d;
  d.det = {300.0, 240.0, 0.2, -0.4};
  const RabiSchedule schedule(design_train(d));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> when(schedule.t_start(), schedule.t_end());
  for (int n = 0; n < 200; ++n) {
    const auto h = build_full_hamiltonian(when(rng), schedule, d.det, {});
    EXPECT_LT((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
    for (int i = 0; i < 5; ++i) {
      for (int j = i + 2; j < 5; ++j) {
        EXPECT_EQ(h(i, j), cplx(0.0)) << i << ',' << j;
        EXPECT_EQ(h(j, i), cplx(0.0)) << j << ',' << i;
      }
    }
  }
}

TEST(DarkState, PinnedCases) {
  const double w = 2.7;
  const auto a = dark_state(0.0, w, w, w);
  EXPECT_NEAR(std::abs(a(g1)), 1.0, 1e-15);
  EXPECT_NEAR(a.norm(), 1.0, 1e-15);

  const auto b = dark_state(w, w, 0.0, w);
  EXPECT_NEAR(b(g1).real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(b(g2).real(), -1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(b(g3), cplx(0.0));

  // O2 = 0 cuts g1 off, leaving the g2-e2-g3 dark state (O4 g2 - O3 g3)
  const auto c = dark_state(w, 0.0, w, w);
  EXPECT_EQ(c(g1), cplx(0.0));
  EXPECT_NEAR(c(g2).real(), -1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(c(g3).real(), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(DarkState, DegenerateInputThrows) {
  EXPECT_THROW(dark_state(0.0, 1.0, 1.0, 0.0), DomainError);
  EXPECT_THROW(dark_state(0.0, 0.0, 0.0, 0.0), DomainError);
}

TEST(DarkState, HasNoExcitedStateCouplingOnResonance) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> omega(0.1, 50.0);
  for (int n = 0; n < 500; ++n) {
    const PhysicalRabi r{omega(rng), omega(rng), omega(rng), omega(rng)};
    const auto v = dark_state(r.omega1, r.omega2, r.omega3, r.omega4);
    EXPECT_NEAR(v.norm(), 1.0, 1e-14);
    const StateVector<5> hv = build_full_hamiltonian(r, DetuningConfig{0, 0, 0, 0}, {}) * v;
    EXPECT_LT(std::abs(hv(e1)), 1e-12);
    EXPECT_LT(std::abs(hv(e2)), 1e-12);
  }
}

TEST(Populations, ModulusSquared) {
  const auto p0 = populations<5>(basis_state<5>(g1));
  EXPECT_EQ(p0[0], 1.0);
  for (int i = 1; i < 5; ++i) EXPECT_EQ(p0[i], 0.0);

  StateVector<5> v = StateVector<5>::Zero();
  v(g1) = cplx(0.5, 0.5);
  v(g2) = cplx(0.5, -0.5);
  const auto p = populations<5>(v);
  EXPECT_DOUBLE_EQ(p[g1], 0.5);
  EXPECT_DOUBLE_EQ(p[g2], 0.5);

  const auto d = populations<5>(dark_state(1.3, 1.3, 1.3, 1.3));
  for (int i : {g1, g2, g3}) EXPECT_NEAR(d[i], 1.0 / 3.0, 1e-15);
  EXPECT_EQ(d[e1], 0.0);
  EXPECT_EQ(d[e2], 0.0);
}

TEST(DetuningConfig, ZetaIsDerived) {
  DetuningConfig det{240.0, 300.0, 0, 0};
  EXPECT_DOUBLE_EQ(det.zeta(), 0.8);
  det.delta2 = 200.0;
  EXPECT_DOUBLE_EQ(det.zeta(), 1.2);
}
