#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "pcbf/backstepping.hpp"
#include "pcbf/errors.hpp"
#include "pcbf/filter.hpp"
#include "pcbf/systems.hpp"

using namespace pcbf;

namespace {

State vec(std::initializer_list<double> v)
{
  State x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) { x[i++] = d; }
  return x;
}

constexpr int kPositional[] = {UnicycleIndex::x, UnicycleIndex::y};

}  // namespace

TEST(DoubleIntegrator, Examples)
{
  const auto p = double_integrator();
  EXPECT_EQ(p.system.n, 2);
  EXPECT_EQ(p.system.m, 1);
  EXPECT_EQ(p.system.f(vec({3, -2})), vec({-2, 0}));
  EXPECT_EQ(p.system.g(vec({3, -2})), (Eigen::MatrixXd(2, 1) << 0, 1).finished());
  const State x = vec({0.3, 7});
  EXPECT_DOUBLE_EQ(p.pair.h_value(x), 1.3);
  EXPECT_DOUBLE_EQ(p.pair.hbar_value(x), 0.7);
  EXPECT_DOUBLE_EQ(p.pair.h_value(x) + p.pair.hbar_value(x), 2.0);
  EXPECT_EQ(p.jet.depth(), 1);
  EXPECT_EQ(p.jet.derivatives[0].value(x), 7.0);
}

TEST(DoubleIntegrator, TargetInputCoefficientIsOne)
{
  const auto p = double_integrator();
  for (double c1 : {0.1, 1.0, 5.0}) {
    ChainOptions opts;
    opts.gain_overrides = {c1};
    const auto chain = build_chain(p.pair, p.jet, p.system, vec({0.0, 0.0}), 2, opts);
    const auto k = class_k_linear(1.0);
    for (const State & x : random_corridor_states(SystemKind::DoubleIntegrator, 50, 3)) {
      EXPECT_DOUBLE_EQ(target_slab(chain, p.system, k, k, x).a[0], 1.0);
    }
  }
}

TEST(Unicycle, Dynamics)
{
  const auto model = unicycle_extended();
  const auto & sys = model.system;
  EXPECT_EQ(sys.n, 4);
  EXPECT_EQ(sys.m, 2);
  EXPECT_NEAR((sys.f(vec({0, 0, 1, 0})) - vec({1, 0, 0, 0})).norm(), 0.0, 1e-15);
  for (double th : {0.0, 0.7, -2.0, 10.0}) { EXPECT_EQ(sys.f(vec({0, 0, 0, th})).norm(), 0.0); }
  const Eigen::MatrixXd g1 = sys.g(vec({1, 2, 3, 4}));
  const Eigen::MatrixXd g2 = sys.g(vec({-4, 0, 9, -1}));
  EXPECT_EQ(g1, g2);
  EXPECT_EQ((g1.array() != 0.0).count(), 2);
  EXPECT_EQ(g1(UnicycleIndex::v, UnicycleIndex::u_v), 1.0);
  EXPECT_EQ(g1(UnicycleIndex::theta, UnicycleIndex::u_theta), 1.0);
}

TEST(Unicycle, StateRoundTrip)
{
  const UnicycleState s{1.0, -2.0, 0.5, 7.0};
  const auto back = UnicycleState::from_state(s.to_state());
  EXPECT_EQ(back.x, 1.0);
  EXPECT_EQ(back.y, -2.0);
  EXPECT_EQ(back.v, 0.5);
  EXPECT_EQ(back.theta, 7.0);
  EXPECT_THROW(UnicycleState::from_state(vec({1, 2})), ConfigurationError);
}

TEST(SineCorridor, Examples)
{
  const auto c = sine_corridor();
  const State origin = State::Zero(4);
  EXPECT_EQ(c.pair.h_value(origin), 1.0);
  EXPECT_EQ(c.pair.hbar_value(origin), 1.0);
  EXPECT_NEAR(c.jet.derivatives[0].value(vec({0, 0, 1, 0})), 1.0, 1e-15);
  for (const State & x : random_corridor_states(SystemKind::Unicycle, 1000, 2)) {
    EXPECT_EQ(c.pair.h_gradient(x)[UnicycleIndex::y], 1.0);
    EXPECT_NEAR(c.pair.h_value(x) + c.pair.hbar_value(x), 2.0, 1e-15);
  }
}

TEST(SineCorridor, JetMatchesDriftDerivative)
{
  const auto p = unicycle_sine_corridor();
  for (const State & x : random_corridor_states(SystemKind::Unicycle, 200, 6)) {
    EXPECT_NEAR(p.jet.derivatives[0].value(x), p.pair.h_gradient(x).dot(p.system.f(x)), 1e-13);
  }
}

TEST(SineCorridor, DerivativesMatchFiniteDifferences)
{
  const auto c = sine_corridor();
  const auto samples = random_corridor_states(SystemKind::Unicycle, 100, 13);
  EXPECT_LE(oracle::finite_difference_check(c.pair.h(), samples), 1e-6);
  EXPECT_LE(oracle::finite_difference_check(c.jet.derivatives[0], samples), 1e-6);
  const auto di = double_integrator();
  EXPECT_LE(oracle::finite_difference_check(di.jet.derivatives[0],
    random_corridor_states(SystemKind::DoubleIntegrator, 100, 13)), 1e-6);
}

TEST(LieTerms, Examples)
{
  const auto t = unicycle_lie_terms(1.0, UnicycleState{0, 0, 1, 0});
  EXPECT_NEAR(t.lgv, 1.0, 1e-15);
  EXPECT_NEAR(t.lgtheta, 1.0, 1e-15);
  EXPECT_NEAR(t.drift, 1.0, 1e-15);

  // gradient (cos x, 1) at x = 0 is (1, 1); theta = 3 pi / 4 is orthogonal to it
  const auto z = unicycle_lie_terms(1.0, UnicycleState{0, 0, 0, 0.75 * std::numbers::pi});
  EXPECT_NEAR(z.lgv, 0.0, 1e-15);
  EXPECT_EQ(z.lgtheta, 0.0);
  EXPECT_EQ(z.drift, 0.0);

  const auto a = unicycle_lie_terms(1.0, UnicycleState{0, 0, 2.0, 0.25 * std::numbers::pi});
  EXPECT_NEAR(a.lgtheta, 0.0, 1e-15);
  EXPECT_NEAR(a.lgv, std::sqrt(2.0), 1e-15);

  EXPECT_THROW(unicycle_lie_terms(0.0, UnicycleState{}), ParameterError);
}

TEST(LieTerms, MatchGenericChain)
{
  const auto p = unicycle_sine_corridor();
  const auto k = class_k_linear(1.0);
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> gain(0.1, 5.0);
  for (const State & x : random_corridor_states(SystemKind::Unicycle, 1000, 31)) {
    const double c1 = gain(rng);
    ChainOptions opts;
    opts.gain_overrides = {c1};
    const auto chain = build_chain(p.pair, p.jet, p.system, State::Zero(4), 2, opts);
    const auto slab = target_slab(chain, p.system, k, k, x);
    const auto t = unicycle_lie_terms(c1, UnicycleState::from_state(x));
    const double h2 = chain.h(2, x);
    // lower = -L_f h2 - h2, so L_f h2 = -lower - h2
    EXPECT_NEAR(slab.a[0], t.lgv, 1e-12);
    EXPECT_NEAR(slab.a[1], t.lgtheta, 1e-12);
    EXPECT_NEAR(-slab.lower - h2, t.drift, 1e-12 * (1.0 + std::abs(t.drift)));
  }
}

TEST(LieTerms, InputVanishesOnlyWithDrift)
{
  // Sample states where the input coefficients vanish: v = 0 and heading orthogonal to the gradient.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ux(-10.0, 10.0);
  std::uniform_real_distribution<double> off(-0.99, 0.99);
  for (int i = 0; i < 1000; ++i) {
    const double x = ux(rng);
    const double th = std::atan2(std::cos(x), -1.0);  // (cos th, sin th) orthogonal to (cos x, 1)
    const UnicycleState s{x, off(rng) - std::sin(x), 0.0, th};
    const auto t = unicycle_lie_terms(1.0, s);
    const double lg = std::hypot(t.lgv, t.lgtheta);
    ASSERT_LT(lg, 1e-10);
    ASSERT_LT(std::abs(t.drift), 1e-8);
  }
  // And over random states: whenever |L_g h2| is tiny, so is L_f h2.
  for (const State & x : random_corridor_states(SystemKind::Unicycle, 1000, 51)) {
    const auto t = unicycle_lie_terms(1.0, UnicycleState::from_state(x));
    if (std::hypot(t.lgv, t.lgtheta) < 1e-10) { EXPECT_LT(std::abs(t.drift), 1e-8); }
  }
}

TEST(CheckGradientNonzero, Examples)
{
  const auto c = sine_corridor();
  EXPECT_TRUE(check_gradient_nonzero(c.pair, corridor_grid(SystemKind::Unicycle, 41, 21), kPositional));
  EXPECT_TRUE(check_gradient_nonzero(c.pair, random_corridor_states(SystemKind::Unicycle, 500, 1)));

  const auto base = single_cbf_baseline(SystemKind::Unicycle, 1.0, 1.0);
  std::vector<State> midline;
  for (double x = -3.0; x <= 3.0; x += 0.5) { midline.push_back(UnicycleState{x, -std::sin(x), 1.0, 0.3}.to_state()); }
  EXPECT_FALSE(check_gradient_nonzero(base.h_s, midline, kPositional));

  BarrierField tiny{[](const State &) { return 0.0; }, [](const State &) { return vec({0.0, 1e-30}); }, {}, "tiny"};
  EXPECT_TRUE(check_gradient_nonzero(tiny, std::vector<State>{vec({0.0, 0.0})}));
  EXPECT_THROW(check_gradient_nonzero(tiny, std::vector<State>{}), UsageError);
}

TEST(SingleBaseline, DoubleIntegratorLosesAuthorityAtMidline)
{
  const auto base = single_cbf_baseline(SystemKind::DoubleIntegrator, 1.0, 1.0);
  for (double x2 : {-2.0, 0.0, 0.5, 3.0}) {
    const auto c = base.constraint(vec({0.0, x2}));
    EXPECT_EQ(c.a[0], 0.0);
  }
  // h2_s = c1 (1 - x1^2) - 2 x1 x2
  EXPECT_DOUBLE_EQ(base.h2_s.value(vec({0.5, 1.0})), 0.75 - 1.0);
  const auto ok = base.constraint(vec({0.0, 0.5}));
  EXPECT_TRUE(zero_lg_consistency(ok, default_eps(ok.a)));
  EXPECT_LE(std::abs(0.5), std::sqrt(0.5));
  EXPECT_THROW(single_cbf_baseline(SystemKind::DoubleIntegrator, 0.0, 1.0), ParameterError);
}

TEST(SingleBaseline, ValidityBoundAtMidline)
{
  for (double c1 : {0.5, 1.0, 2.0}) {
    for (double c2 : {0.5, 1.0, 3.0}) {
      const auto base = single_cbf_baseline(SystemKind::DoubleIntegrator, c1, c2);
      const double bound = std::sqrt(c1 * c2 / 2.0);
      for (double x2 : {0.0, 0.5 * bound, bound * (1 - 1e-6), bound * (1 + 1e-6), 2.0 * bound}) {
        for (double sign : {-1.0, 1.0}) {
          const auto c = base.constraint(vec({0.0, sign * x2}));
          EXPECT_EQ(zero_lg_consistency(c, default_eps(c.a)), x2 <= bound) << c1 << " " << c2 << " " << x2;
        }
      }
    }
  }
}

TEST(SingleBaseline, DerivativesMatchFiniteDifferences)
{
  for (SystemKind kind : {SystemKind::DoubleIntegrator, SystemKind::Unicycle}) {
    const auto base = single_cbf_baseline(kind, 1.3, 0.7);
    const auto samples = random_corridor_states(kind, 100, 17);
    EXPECT_LE(oracle::finite_difference_check(base.h_s, samples), 1e-6);
    EXPECT_LE(oracle::finite_difference_check(base.h2_s, samples), 1e-6);
    const auto p = corridor_problem(kind);
    for (const State & x : samples) {
      // h2_s = c1 h_s + L_f h_s
      EXPECT_NEAR(base.h2_s.value(x), 1.3 * base.h_s.value(x) + base.h_s.gradient(x).dot(p.system.f(x)), 1e-12);
    }
  }
}

TEST(SingleBaseline, UnicycleCorrectionGrowsNearMidline)
{
  const auto base = single_cbf_baseline(SystemKind::Unicycle, 1.0, 1.0);
  // Moving toward the midline sin x + y = 0 with v != 0 and heading crossing it.
  double prev = 0.0;
  for (double d : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
    const State x = UnicycleState{0.0, d, 1.0, 0.0}.to_state();
    const auto c = base.constraint(x);
    const auto r = solve_half_space(c, vec({1.0, 0.0}));
    EXPECT_GT(r.correction_norm, prev);
    EXPECT_GT(c.lower, 0.5);  // required correction stays bounded away from zero
    prev = r.correction_norm;
  }
  EXPECT_GT(prev, 1e3);
}

TEST(CorridorSamples, StrictlyInterior)
{
  for (SystemKind kind : {SystemKind::DoubleIntegrator, SystemKind::Unicycle}) {
    const auto p = corridor_problem(kind);
    const auto a = random_corridor_states(kind, 1000, 1);
    const auto b = random_corridor_states(kind, 1000, 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i], b[i]);
      EXPECT_GT(p.pair.h_value(a[i]), 0.0);
      EXPECT_GT(p.pair.hbar_value(a[i]), 0.0);
    }
    const auto grid = corridor_grid(kind, 7, 5);
    EXPECT_EQ(grid.size(), 35u);
  }
  EXPECT_THROW(corridor_grid(SystemKind::Unicycle, 0, 3), UsageError);
}

TEST(SystemKind, Names)
{
  EXPECT_EQ(system_kind_from_string("double_integrator"), SystemKind::DoubleIntegrator);
  EXPECT_EQ(system_kind_from_string("unicycle"), SystemKind::Unicycle);
  EXPECT_EQ(to_string(SystemKind::Unicycle), "unicycle");
  EXPECT_THROW(system_kind_from_string("bicycle"), ConfigurationError);
}
