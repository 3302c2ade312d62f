#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "levdyn/steady_state.hpp"

using namespace levdyn;

namespace {

const CoupledKerr kToy{1.0, 1.0, 0.01, 0.01, 0.005, 1.0};

struct Pair {
  double n_theta, n_y;
};

// Brute-force roots: parametrize by n_theta, solve the theta equation for
// n_y on both signs of D_theta, scan the y residual for sign changes.
std::vector<Pair> brute_force_roots(const CoupledKerr& k, const DriveConfig& d, std::size_t points) {
  const double c1 = 0.25 * d.omega_1 * d.omega_1, c2 = 0.25 * d.omega_2 * d.omega_2;
  const double g1 = 0.25 * k.gamma_theta * k.gamma_theta, g2 = 0.25 * k.gamma_y * k.gamma_y;
  const double n_max = c1 / g1;
  std::vector<Pair> roots;
  for (int sign : {-1, 1}) {
    auto ny_of = [&](double nt) {
      const double Dt = sign * std::sqrt(std::max(0.0, c1 / nt - g1));
      return (d.delta_1 - 12.0 * k.eta_theta * (nt + 1.0) - Dt) / (4.0 * k.eta_thetay);
    };
    auto res = [&](double nt) {
      const double ny = ny_of(nt);
      const double Dy = d.delta_2 - 12.0 * k.eta_y * (ny + 1.0) - 4.0 * k.eta_thetay * nt;
      return ny * (g2 + Dy * Dy) - c2;
    };
    auto nt_at = [&](std::size_t i) {
      // log spacing from 1e-9 n_max, packed towards n_max as well
      const double s = static_cast<double>(i) / static_cast<double>(points - 1);
      return n_max * std::pow(1e-9, 1.0 - s) * (1.0 - 1e-13 * (i == points - 1));
    };
    double prev_x = nt_at(0), prev_r = res(prev_x);
    bool prev_ok = ny_of(prev_x) >= 0.0;
    for (std::size_t i = 1; i < points; ++i) {
      const double x = nt_at(i), r = res(x);
      const bool ok = ny_of(x) >= 0.0;
      if (ok && prev_ok && (r > 0) != (prev_r > 0)) {
        double a = prev_x, b = x, ra = prev_r;
        for (int it = 0; it < 200; ++it) {
          const double m = 0.5 * (a + b), rm = res(m);
          if ((rm > 0) == (ra > 0)) {
            a = m;
            ra = rm;
          } else {
            b = m;
          }
        }
        roots.push_back({0.5 * (a + b), ny_of(0.5 * (a + b))});
      }
      prev_x = x;
      prev_r = r;
      prev_ok = ok;
    }
  }
  std::sort(roots.begin(), roots.end(), [](const Pair& p, const Pair& q) { return p.n_theta < q.n_theta; });
  return roots;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace

TEST(BranchSolve, UndrivenIsOrigin) {
  const auto r = branch_solve(kToy, DriveConfig{0, 0, 2.0, -1.0, Units::normalized});
  ASSERT_EQ(r.branches.size(), 1u);
  EXPECT_EQ(r.branches[0].n_theta, 0.0);
  EXPECT_EQ(r.branches[0].n_y, 0.0);
  EXPECT_EQ(r.branches[0].stability, Stability::stable);
}

TEST(BranchSolve, LinearLimitIsLorentzian) {
  const CoupledKerr lin{0.7, 1.3, 0.0, 0.0, 0.0, 1.0};
  const DriveConfig d{0.4, 0.9, 0.3, -2.0, Units::normalized};
  const auto r = branch_solve(lin, d);
  ASSERT_EQ(r.branches.size(), 1u);
  const auto& b = r.branches[0];
  EXPECT_NEAR(b.n_theta, 0.04 / (0.25 * 0.49 + 0.09), 1e-12);
  EXPECT_NEAR(b.n_y, 0.81 / 4 / (0.25 * 1.69 + 4.0), 1e-12);
  EXPECT_LT(std::abs(b.beta_theta - fixed_amplitude(0.4, 0.7, 0.3)), 1e-12);
  EXPECT_EQ(b.stability, Stability::stable);
}

TEST(BranchSolve, RedRedPointMatchesBruteForce) {
  const DriveConfig d{8.0, 8.0, 5.0, 5.0, Units::normalized};
  const auto r = branch_solve(kToy, d);
  const auto ref = brute_force_roots(kToy, d, 2'000'000);
  EXPECT_GE(r.branches.size(), 3u);
  ASSERT_EQ(r.branches.size(), ref.size());
  EXPECT_FALSE(r.resolution_warning);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    EXPECT_LT(rel(r.branches[i].n_theta, ref[i].n_theta), 1e-7) << i;
    EXPECT_LT(rel(r.branches[i].n_y, ref[i].n_y), 1e-7) << i;
    EXPECT_LT(r.branches[i].residual, 1e-10);
  }
  const auto stable = std::count_if(r.branches.begin(), r.branches.end(),
                                    [](const SteadyBranch& b) { return b.stability == Stability::stable; });
  EXPECT_GE(stable, 2);
  EXPECT_LT(static_cast<std::size_t>(stable), r.branches.size());
}

TEST(BranchSolve, RandomAsymmetricPointsMatchBruteForce) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 6; ++n) {
    const CoupledKerr k{0.5 + u(rng), 0.5 + u(rng), 0.005 + 0.01 * u(rng), 0.005 + 0.01 * u(rng),
                        0.002 + 0.006 * u(rng), 1.0};
    const DriveConfig d{2 + 8 * u(rng), 2 + 8 * u(rng), 1 + 5 * u(rng), 1 + 5 * u(rng), Units::normalized};
    const auto r = branch_solve(k, d);
    const auto ref = brute_force_roots(k, d, 400'000);
    ASSERT_EQ(r.branches.size(), ref.size()) << "case " << n;
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_LT(rel(r.branches[i].n_y, ref[i].n_y), 1e-6);
  }
}

TEST(BranchSolve, BlueBlueIsUnique) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 50; ++n) {
    const DriveConfig d{20 * u(rng), 20 * u(rng), -10 * u(rng), -10 * u(rng), Units::normalized};
    const auto r = branch_solve(kToy, d);
    ASSERT_EQ(r.branches.size(), 1u);
    EXPECT_EQ(r.branches[0].stability, Stability::stable);
  }
}

TEST(BranchSolve, ModeExchangeSymmetry) {
  const CoupledKerr k{1.0, 0.8, 0.01, 0.007, 0.005, 1.0};
  const CoupledKerr ks{0.8, 1.0, 0.007, 0.01, 0.005, 1.0};
  const DriveConfig d{8.0, 6.0, 5.0, 4.0, Units::normalized};
  const DriveConfig ds{6.0, 8.0, 4.0, 5.0, Units::normalized};
  auto a = branch_solve(k, d).branches;
  auto b = branch_solve(ks, ds).branches;
  ASSERT_EQ(a.size(), b.size());
  ASSERT_GT(a.size(), 1u);
  std::sort(b.begin(), b.end(), [](const SteadyBranch& p, const SteadyBranch& q) { return p.n_y < q.n_y; });
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_LT(rel(a[i].n_theta, b[i].n_y), 1e-8);
    EXPECT_LT(rel(a[i].n_y, b[i].n_theta), 1e-8);
    EXPECT_EQ(a[i].stability, b[i].stability);
  }
}

TEST(BranchSolve, RejectsInvalidInput) {
  EXPECT_THROW(branch_solve(CoupledKerr{0.0, 1.0, 0, 0, 0, 1}, DriveConfig{}), DomainError);
  EXPECT_THROW(branch_solve(kToy, DriveConfig{-1.0, 0, 0, 0, Units::normalized}), DomainError);
}

TEST(Stability, Classification) {
  SteadyBranch b;
  const DriveConfig d{};
  // origin of a damped undriven system
  EXPECT_EQ(classify_stability(b, kToy, d).stability, Stability::stable);
  // vanishing damping leaves a centre
  const CoupledKerr weak{1e-12, 1e-12, 0.0, 0.0, 0.0, 1.0};
  EXPECT_EQ(classify_stability(b, weak, d).stability, Stability::marginal);
  const auto rep = classify_stability(b, kToy, d);
  EXPECT_NEAR(rep.max_real, -0.5, 1e-12);
}

TEST(Jacobian, MatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nrm;
  const DriveConfig d{3.0, 2.0, 1.0, -0.5, Units::normalized};
  for (int n = 0; n < 20; ++n) {
    const Vec4 s(3 * nrm(rng), 3 * nrm(rng), 3 * nrm(rng), 3 * nrm(rng));
    const Mat4 J = jacobian(kToy, d, s);
    for (int c = 0; c < 4; ++c) {
      const double h = 1e-6;
      Vec4 sp = s, sm = s;
      sp[c] += h;
      sm[c] -= h;
      const Vec4 fd = (flow(kToy, d, sp) - flow(kToy, d, sm)) / (2 * h);
      EXPECT_LT((fd - J.col(c)).norm(), 1e-7 * (1 + J.norm()));
    }
  }
}

TEST(Jacobian, FlowVanishesOnBranches) {
  const DriveConfig d{8.0, 8.0, 5.0, 5.0, Units::normalized};
  for (const auto& b : branch_solve(kToy, d).branches)
    EXPECT_LT(flow(kToy, d, pack(b.beta_theta, b.beta_y)).norm(), 1e-9);
}

TEST(Sweep, ValidatesAxes) {
  const DriveConfig d{1, 1, 0, 0, Units::normalized};
  EXPECT_THROW(sweep(kToy, d, SweepAxis{DriveParam::omega_1, 0, 1, 0}, SweepAxis{DriveParam::omega_2, 0, 1, 3}),
               ConfigurationError);
  EXPECT_THROW(sweep(kToy, d, SweepAxis{DriveParam::omega_1, 0, 1, 3}, SweepAxis{DriveParam::omega_1, 0, 1, 3}),
               ConfigurationError);
}

TEST(Sweep, IndependentOfWorkerCount) {
  const DriveConfig d{0, 0, 5.0, 5.0, Units::normalized};
  const SweepAxis a1{DriveParam::omega_1, 0.5, 10.0, 12}, a2{DriveParam::omega_2, 0.5, 10.0, 11};
  const auto m1 = sweep(kToy, d, a1, a2, 1);
  const auto m4 = sweep(kToy, d, a1, a2, 4);
  ASSERT_EQ(m1.cells.size(), 132u);
  ASSERT_EQ(m4.cells.size(), m1.cells.size());
  std::size_t multi = 0;
  for (std::size_t i = 0; i < m1.cells.size(); ++i) {
    const auto& x = m1.cells[i].result.branches;
    const auto& y = m4.cells[i].result.branches;
    ASSERT_EQ(x.size(), y.size());
    multi += x.size() > 1;
    for (std::size_t j = 0; j < x.size(); ++j) {
      EXPECT_EQ(x[j].n_theta, y[j].n_theta);
      EXPECT_EQ(x[j].n_y, y[j].n_y);
    }
  }
  EXPECT_GT(multi, 0u);
  // axis_1 outer, axis_2 inner
  EXPECT_EQ(m1.cells[1].axis_1, a1.value(0));
  EXPECT_EQ(m1.cells[1].axis_2, a2.value(1));
}
