#include "distnav/collision.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace distnav;
using distnav::fixtures::Gen;

namespace {

const TimeGrid kGrid(0.0, 0.4, 10);

Trajectory constant(Vec2 p, const TimeGrid& g = kGrid) { return Trajectory(g, std::vector<Vec2>(g.steps, p)); }

}  // namespace

TEST(CollisionKernel, PeakIsNormalisedGaussian) {
  const CollisionKernel k{10.0, 0.35, 2};
  EXPECT_DOUBLE_EQ(k.peak(), 10.0 / (2.0 * std::numbers::pi * 0.35 * 0.35));
  const CollisionKernel k1{10.0, 0.3, 1};
  EXPECT_DOUBLE_EQ(k1.peak(), 10.0 / (std::sqrt(2.0 * std::numbers::pi) * 0.3));
}

TEST(CollisionKernel, InvalidParametersThrow) {
  EXPECT_THROW((CollisionKernel{0.0, 0.3, 2}.validate()), PreconditionError);
  EXPECT_THROW((CollisionKernel{1.0, -0.3, 2}.validate()), PreconditionError);
  EXPECT_THROW((CollisionKernel{1.0, 0.3, 3}.validate()), PreconditionError);
}

TEST(PairwisePenalty, IdenticalTrajectoriesGivePeak) {
  Gen gen(11);
  const CollisionKernel k{10.0, 0.35, 2};
  for (int n = 0; n < 20; ++n) {
    const auto f = gen.trajectory(kGrid);
    EXPECT_NEAR(pairwise_penalty(f, f, k), k.peak(), 1e-12 * k.peak());
  }
}

TEST(PairwisePenalty, FarApartIsNegligible) {
  const CollisionKernel k{10.0, 0.35, 2};
  const double v = pairwise_penalty(constant({0, 0}), constant({10 * k.sigma, 0}), k);
  EXPECT_LT(v, 1e-20 * k.weight / (k.sigma * k.sigma));
}

TEST(PairwisePenalty, OneSigmaCrossingGivesPeakOverRootE) {
  const CollisionKernel k{10.0, 0.35, 2};
  std::vector<Vec2> a, b;
  for (std::size_t t = 0; t < kGrid.steps; ++t) {
    a.push_back({static_cast<double>(t), 0.0});
    b.push_back({static_cast<double>(t), t == 4 ? k.sigma : 5.0});
  }
  EXPECT_NEAR(pairwise_penalty(Trajectory(kGrid, a), Trajectory(kGrid, b), k), k.peak() * std::exp(-0.5),
              1e-14 * k.peak());
}

TEST(PairwisePenalty, GridMismatchThrows) {
  const CollisionKernel k{};
  EXPECT_THROW(pairwise_penalty(constant({0, 0}), constant({0, 0}, TimeGrid(0.0, 0.5, 10)), k), PreconditionError);
}

TEST(PairwisePenalty, SymmetricBoundedAndLinearInWeight) {
  Gen gen(12);
  for (int n = 0; n < 1000; ++n) {
    const CollisionKernel k = gen.kernel();
    const auto a = gen.trajectory(kGrid, 1.0);
    const auto b = gen.trajectory(kGrid, 1.0);
    const double ab = pairwise_penalty(a, b, k);
    EXPECT_EQ(ab, pairwise_penalty(b, a, k));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, k.weight / (2.0 * std::numbers::pi * k.sigma * k.sigma) * (1 + 1e-15));
    const CollisionKernel k3{3.0 * k.weight, k.sigma, 2};
    EXPECT_NEAR(pairwise_penalty(a, b, k3), 3.0 * ab, 1e-14 * ab + 1e-300);
  }
}

TEST(PenaltyMatrix, EntriesMatchPairwiseAndTranspose) {
  Gen gen(13);
  const CollisionKernel k{10.0, 0.5, 2};
  const auto a = gen.cloud(0, kGrid, 3);
  const auto b = gen.cloud(1, kGrid, 4);
  const auto ab = penalty_matrix(a, b, k);
  const auto ba = penalty_matrix(b, a, k);
  ASSERT_EQ(ab.rows, 3u);
  ASSERT_EQ(ab.cols, 4u);
  for (std::size_t y = 0; y < 3; ++y) {
    for (std::size_t z = 0; z < 4; ++z) {
      EXPECT_EQ(ab(y, z), pairwise_penalty(a.trajectory(y), b.trajectory(z), k));
      EXPECT_EQ(ab(y, z), ba(z, y));
    }
  }
  EXPECT_EQ(ab.transposed().values, ba.values);
}

TEST(PenaltyMatrix, SelfMatrixHasPeakDiagonal) {
  Gen gen(14);
  const CollisionKernel k{10.0, 0.5, 2};
  const auto a = gen.cloud(0, kGrid, 6);
  const auto aa = penalty_matrix(a, a, k);
  for (std::size_t y = 0; y < 6; ++y) {
    EXPECT_NEAR(aa(y, y), k.peak(), 1e-12 * k.peak());
    for (std::size_t z = 0; z < 6; ++z) EXPECT_EQ(aa(y, z), aa(z, y));
  }
}

TEST(PenaltyMatrix, OneByOne) {
  const CollisionKernel k{10.0, 0.5, 2};
  const SampleSet a(0, kGrid, std::vector{constant({0, 0})});
  const SampleSet b(1, kGrid, std::vector{constant({0.3, 0.1})});
  const auto m = penalty_matrix(a, b, k);
  ASSERT_EQ(m.values.size(), 1u);
  EXPECT_EQ(m(0, 0), pairwise_penalty(a.trajectory(0), b.trajectory(0), k));
}

TEST(ExpectedPenalty, SharedSingleSampleGivesPeak) {
  const CollisionKernel k{10.0, 0.5, 2};
  const SampleSet a(0, kGrid, std::vector{constant({1, 1})});
  const SampleSet b(1, kGrid, std::vector{constant({1, 1})});
  EXPECT_NEAR(expected_penalty(a, b, k), k.peak(), 1e-12 * k.peak());
}

TEST(ExpectedPenalty, FarSetsAreNegligible) {
  Gen gen(15);
  const CollisionKernel k{10.0, 0.35, 2};
  const auto a = gen.cloud(0, kGrid, 10);
  std::vector<Trajectory> far;
  for (std::size_t j = 0; j < 10; ++j) far.push_back(constant({100.0 + static_cast<double>(j), 100.0}));
  EXPECT_LT(expected_penalty(a, SampleSet(1, kGrid, far), k), 1e-20);
}

TEST(ExpectedPenalty, WeightedDoubleSum) {
  Gen gen(16);
  const CollisionKernel k{10.0, 0.8, 2};
  auto a = gen.cloud(0, kGrid, 5);
  auto b = gen.cloud(1, kGrid, 7);
  a.set_weights({0.5, 1.5, 1.0, 0.2, 1.8});
  b.set_weights({1, 2, 0, 1, 1, 1, 1});
  double direct = 0.0;
  for (std::size_t y = 0; y < 5; ++y) {
    for (std::size_t z = 0; z < 7; ++z) {
      direct += pairwise_penalty(a.trajectory(y), b.trajectory(z), k) * a.weights()[y] * b.weights()[z];
    }
  }
  EXPECT_NEAR(expected_penalty(a, b, k), direct / 35.0, 1e-12 * direct);
}

TEST(JointExpectedPenalty, PairSumsAndErrors) {
  Gen gen(17);
  const CollisionKernel k{10.0, 0.8, 2};
  std::vector<SampleSet> sets{gen.cloud(0, kGrid, 8), gen.cloud(1, kGrid, 9)};
  EXPECT_DOUBLE_EQ(joint_expected_penalty(sets, k), expected_penalty(sets[0], sets[1], k));

  std::vector<Trajectory> far;
  for (std::size_t j = 0; j < 5; ++j) far.push_back(constant({200.0, static_cast<double>(j)}));
  sets.emplace_back(2, kGrid, far);
  EXPECT_NEAR(joint_expected_penalty(sets, k), expected_penalty(sets[0], sets[1], k), 1e-12);

  std::vector<SampleSet> reordered{sets[2], sets[0], sets[1]};
  EXPECT_NEAR(joint_expected_penalty(reordered, k), joint_expected_penalty(sets, k), 1e-15);

  std::vector<SampleSet> one{sets[0]};
  EXPECT_THROW(joint_expected_penalty(one, k), PreconditionError);
}

TEST(ExpectedPenalty, HandCaseStartsAtQuarter) {
  // Two samples each, only (a1, b1) in contact with psi = 1: 1/(2*2) = 0.25.
  const distnav::fixtures::HandCase hc;
  EXPECT_DOUBLE_EQ(discrete_objective(hc.sets, hc.cache), 0.25);
}
