#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "superres/error.hpp"
#include "superres/fock_oracle.hpp"
#include "superres/gaussian_qfi.hpp"

using namespace superres;
using superres::oracle::rel_diff;

namespace {

const PsfSpec kGauss = PsfSpec::gaussian(1.0);

SceneParams scene(double s, double eta, double n_s, double n_n) {
  SceneParams p;
  p.s = s;
  p.eta = eta;
  p.n_s = n_s;
  p.n_n = n_n;
  return p;
}

}  // namespace

TEST(ThermalFock, Vacuum) {
  const auto t = thermal_fock(0.0, 5);
  EXPECT_EQ(t.weights(0), 1.0);
  EXPECT_EQ(t.weights.tail(4).sum(), 0.0);
  EXPECT_EQ(t.tail_mass, 0.0);
}

TEST(ThermalFock, GeometricLaw) {
  const auto t = thermal_fock(1.0, 40, 1e-11);
  const double norm = 1.0 - t.tail_mass;
  EXPECT_NEAR(t.weights(0) * norm, 0.5, 1e-15);
  EXPECT_NEAR(t.weights(1) * norm, 0.25, 1e-15);
  EXPECT_NEAR(t.weights(2) * norm, 0.125, 1e-15);
  EXPECT_NEAR(t.weights.sum(), 1.0, 1e-15);
}

TEST(ThermalFock, MeanPhotonNumber) { EXPECT_NEAR(thermal_fock(0.2, 30).mean_photons(), 0.2, 1e-10); }

TEST(ThermalFock, CutoffTooSmall) {
  EXPECT_THROW(thermal_fock(1.0, 10), CutoffError);
  EXPECT_THROW(thermal_fock(-0.1, 10), ValidationError);
  EXPECT_THROW(thermal_fock(0.1, 1), ValidationError);
}

TEST(BeamSplitter, IdentityAtZero) {
  EXPECT_TRUE(beam_splitter_fock(0.0, 6).isIdentity(0.0));
}

TEST(BeamSplitter, FullReflectionSwapsSinglePhoton) {
  const int d = 6;
  const Eigen::MatrixXd u = beam_splitter_fock(std::numbers::pi / 2.0, d);
  const int one_zero = 1 * d + 0;
  const int zero_one = 0 * d + 1;
  EXPECT_NEAR(std::abs(u(zero_one, one_zero)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(u(one_zero, zero_one)), 1.0, 1e-14);
}

TEST(BeamSplitter, UnitaryAndNumberConserving) {
  const int d = 15;
  const Eigen::MatrixXd u = beam_splitter_fock(0.3, d);
  EXPECT_LE((u.transpose() * u - Eigen::MatrixXd::Identity(d * d, d * d)).cwiseAbs().maxCoeff(), 1e-10);
  for (int i = 0; i < d * d; ++i)
    for (int j = 0; j < d * d; ++j)
      if (i / d + i % d != j / d + j % d) EXPECT_EQ(u(i, j), 0.0);
}

TEST(TruncatedState, Invariants) {
  const auto st = two_mode_state(0.4, 0.1, 0.2, 20);
  const Eigen::MatrixXd& r = st.rho;
  EXPECT_LE((r - r.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(r.trace(), 1.0, 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r, Eigen::EigenvaluesOnly);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
  EXPECT_LE(st.tail_mass, 1e-10);
}

TEST(Oracle, NoSignalNoInformation) {
  const auto p = scene(0.5, 0.3, 0.0, 0.1);
  const auto r = oracle_qfi(p, kGauss, calculus_at(kGauss, p.s, p.eta));
  EXPECT_LE(r.h_total, 1e-12);
}

TEST(Oracle, MatchesClosedForm) {
  const auto p = scene(0.8, 0.3, 0.5, 0.1);
  const auto oc = calculus_at(kGauss, p.s, p.eta);
  const auto r = oracle_qfi(p, kGauss, oc);
  const auto c = qfi_closed_form(p, oc);
  EXPECT_LT(rel_diff(r.h_total, c.h_total), 1e-4);
  EXPECT_LT(rel_diff(r.h_plus, c.h_plus), 1e-4);
  EXPECT_LT(rel_diff(r.h_minus, c.h_minus), 1e-4);
  EXPECT_LE(r.sld_residual, 1e-8);
  EXPECT_LE(r.tail_mass, 1e-10);
}

TEST(Oracle, QuadraticLawAtSmallSeparation) {
  auto ratio = [](double s) {
    const auto p = scene(s, 0.3, 0.5, 0.1);
    return oracle_qfi(p, kGauss, calculus_at(kGauss, s, p.eta)).h_total / (s * s);
  };
  EXPECT_LT(rel_diff(ratio(0.05), ratio(0.025)), 0.02);
}

TEST(Oracle, StableInSpectralFloor) {
  const auto p = scene(0.3, 0.3, 0.5, 0.05);
  const auto oc = calculus_at(kGauss, p.s, p.eta);
  OracleOptions lo;
  lo.eigen_floor = 1e-12;
  OracleOptions hi;
  hi.eigen_floor = 1e-9;
  EXPECT_LT(rel_diff(oracle_qfi(p, kGauss, oc, lo).h_total, oracle_qfi(p, kGauss, oc, hi).h_total), 1e-4);
}

TEST(Oracle, RejectsOversizedStep) {
  const auto p = scene(0.01, 0.3, 0.5, 0.1);
  OracleOptions opt;
  opt.fd_step = 0.005;
  EXPECT_THROW(oracle_qfi(p, kGauss, calculus_at(kGauss, p.s, p.eta), opt), ValidationError);
}

TEST(Oracle, CutoffTooSmallReportsTailMass) {
  const auto p = scene(0.5, 0.5, 2.0, 0.2);
  OracleOptions opt;
  opt.cutoff = 8;
  try {
    oracle_qfi(p, kGauss, calculus_at(kGauss, p.s, p.eta), opt);
    FAIL() << "expected CutoffError";
  } catch (const CutoffError& e) {
    EXPECT_GT(e.diagnostic(), 1e-10);
  }
}
