#include <cmath>
#include <cstdint>
#include <random>
#include <tuple>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "vi/feasible_sets.hpp"

using vi::Vector;

namespace {

vi::BoxSet unit_box(std::size_t n) { return {Vector::filled(n, -1.0), Vector::filled(n, 1.0)}; }

}  // namespace

TEST(Project, Examples) {
  const vi::FeasibleSet box = unit_box(2);
  EXPECT_EQ(vi::project(box, Vector{0.5, 0.5}), (Vector{0.5, 0.5}));
  EXPECT_EQ(vi::project(box, Vector{2.0, -3.0}), (Vector{1.0, -1.0}));

  const vi::FeasibleSet ball = vi::BallSet(Vector::zeros(2), 1.0);
  const Vector p = vi::project(ball, Vector{3.0, 4.0});
  EXPECT_NEAR(p[0], 0.6, 1e-15);
  EXPECT_NEAR(p[1], 0.8, 1e-15);

  const vi::FeasibleSet half = vi::HalfSpace(Vector{1.0, 0.0}, Vector{0.0, 0.0});
  EXPECT_EQ(vi::project(half, Vector{2.0, 5.0}), (Vector{0.0, 5.0}));
  EXPECT_EQ(vi::project(half, Vector{-2.0, 5.0}), (Vector{-2.0, 5.0}));
}

TEST(Project, DimensionMismatch) {
  const vi::FeasibleSet box = unit_box(2);
  EXPECT_THROW(vi::project(box, Vector{1.0}), vi::dimension_error);
  EXPECT_THROW(vi::BoxSet(Vector{0.0}, Vector{1.0, 2.0}), vi::dimension_error);
}

TEST(Sets, ConstructionInvariants) {
  EXPECT_THROW(vi::BoxSet(Vector{1.0}, Vector{0.0}), std::invalid_argument);
  EXPECT_THROW(vi::BallSet(Vector{0.0}, 0.0), std::invalid_argument);
  EXPECT_THROW(vi::HalfSpace(Vector{0.0, 0.0}, Vector{1.0, 1.0}), std::invalid_argument);
}

TEST(Contains, Examples) {
  const vi::FeasibleSet box = unit_box(1);
  EXPECT_TRUE(vi::contains(box, Vector{0.0}, 0.0));
  EXPECT_TRUE(vi::contains(box, Vector{1.0 + 1e-9}, 1e-8));
  EXPECT_FALSE(vi::contains(box, Vector{1.0 + 1e-7}, 1e-8));
  const vi::FeasibleSet ball = vi::BallSet(Vector::zeros(2), 1.0);
  EXPECT_FALSE(vi::contains(ball, Vector{2.0, 0.0}, 0.0));
  EXPECT_TRUE(vi::contains(ball, Vector{0.6, 0.8}, 1e-15));
  const vi::FeasibleSet half = vi::HalfSpace(Vector{2.0, 0.0}, Vector{0.0, 0.0});
  EXPECT_TRUE(vi::contains(half, Vector{1e-9, 3.0}, 1e-8));
  EXPECT_FALSE(vi::contains(half, Vector{1e-7, 3.0}, 1e-8));
  EXPECT_THROW(vi::contains(box, Vector{0.0}, -1.0), std::invalid_argument);
}

TEST(Example41Box, Bounds) {
  const auto b1 = vi::example41_box(1);
  EXPECT_EQ(b1.lower(), Vector{-1.0});
  EXPECT_EQ(b1.upper(), Vector{1.0});
  const auto b3 = vi::example41_box(3);
  EXPECT_EQ(b3.upper(), (Vector{1.0, 0.5, 1.0 / 3.0}));
  EXPECT_EQ(b3.lower(), (Vector{-1.0, -0.5, -1.0 / 3.0}));
  EXPECT_EQ(vi::example41_box(2).project(Vector{1.0, 1.0}), (Vector{1.0, 0.5}));
  EXPECT_THROW(vi::example41_box(0), std::invalid_argument);
}

TEST(NaturalResidual, Examples) {
  std::uint64_t projections = 0;
  auto ex41 = vi::make_example41(1.0);
  const vi::FeasibleSet c41 = vi::example41_box(4);
  EXPECT_EQ(vi::natural_residual(Vector::zeros(4), 0.7, ex41, c41, projections), Vector::zeros(4));
  EXPECT_EQ(projections, 1u);
  EXPECT_EQ(ex41.eval_count(), 1u);

  auto identity = vi::make_affine(vi::DenseMatrix::identity(1), Vector{0.0});
  const vi::FeasibleSet c = unit_box(1);
  // 1 - P_C(1 - 0.5) = 0.5
  EXPECT_EQ(vi::natural_residual(Vector{1.0}, 0.5, identity, c, projections), Vector{0.5});
  // 2 - P_C(2 - 2) = 2 - P_C(0) = 2
  EXPECT_EQ(vi::natural_residual(Vector{2.0}, 1.0, identity, c, projections), Vector{2.0});
  EXPECT_EQ(projections, 3u);
  EXPECT_EQ(identity.eval_count(), 2u);
  EXPECT_THROW(vi::natural_residual(Vector{2.0}, 0.0, identity, c, projections), std::invalid_argument);
}

template <typename Set>
class ProjectionProperties : public ::testing::Test {
 protected:
  static Set make(gen::Rng& rng, std::size_t n) {
    if constexpr (std::is_same_v<Set, vi::BoxSet>) return gen::box(rng, n);
    else if constexpr (std::is_same_v<Set, vi::BallSet>) return gen::ball(rng, n);
    else return gen::halfspace(rng, n);
  }
};

using SetTypes = ::testing::Types<vi::BoxSet, vi::BallSet, vi::HalfSpace>;
TYPED_TEST_SUITE(ProjectionProperties, SetTypes);

TYPED_TEST(ProjectionProperties, IdempotentNonexpansiveAndVariational) {
  gen::Rng rng(424242);
  std::uniform_int_distribution<std::size_t> dim(1, 12);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = dim(rng);
    const TypeParam set = TestFixture::make(rng, n);
    const Vector x = gen::vec(rng, n, -6.0, 6.0);
    const Vector y = gen::vec(rng, n, -6.0, 6.0);
    const Vector u = gen::inside(rng, set);
    ASSERT_TRUE(set.contains(u, 1e-12));

    const Vector px = set.project(x);
    const Vector py = set.project(y);
    EXPECT_TRUE(set.contains(px, 1e-12));

    if constexpr (std::is_same_v<TypeParam, vi::BallSet>) {
      EXPECT_LE(vi::distance(set.project(px), px), 1e-12);
    } else {
      EXPECT_EQ(set.project(px), px);
    }
    EXPECT_LE(vi::distance(px, py), vi::distance(x, y) + 1e-12);

    // <z - P z, u - P z> <= 0 and ||z - P z||^2 <= <z - P z, z - u>
    const Vector r = vi::subtract(x, px);
    EXPECT_LE(vi::dot(r, vi::subtract(u, px)), 1e-10);
    EXPECT_LE(vi::squared_norm(r), vi::dot(r, vi::subtract(x, u)) + 1e-10);
  }
}

TEST(NaturalResidual, ScalingInequalities) {
  gen::Rng rng(99);
  std::uniform_real_distribution<double> step(1e-6, 2.0);
  const vi::FeasibleSet c = vi::example41_box(10);
  auto F = vi::make_example41(1.0);
  std::uint64_t projections = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Vector z = gen::vec(rng, 10, -2.0, 2.0);
    double alpha = step(rng), beta = step(rng);
    if (alpha < beta) std::swap(alpha, beta);
    const double ea = vi::norm(vi::natural_residual(z, alpha, F, c, projections));
    const double eb = vi::norm(vi::natural_residual(z, beta, F, c, projections));
    EXPECT_LE(ea / alpha, eb / beta + 1e-10);
    EXPECT_LE(eb, ea + 1e-10);
  }
}
