#include "netembed/netsim.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace netembed;

TEST(MakeLayer, ShapeAndDeterminism) {
  const RandomLayer tiny = make_layer(1, 1, relu(), 3);
  EXPECT_EQ(tiny.matrix.rows(), 1);
  EXPECT_EQ(tiny.matrix.cols(), 1);

  const RandomLayer a = make_layer(16, 32, relu(), 7);
  const RandomLayer b = make_layer(16, 32, relu(), 7);
  EXPECT_EQ((a.matrix - b.matrix).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(make_layer(0, 4, relu(), 1), std::invalid_argument);
  EXPECT_THROW(make_layer(4, 0, relu(), 1), std::invalid_argument);
}

TEST(MakeLayer, EntryVarianceNearOneOverM) {
  const int n = 64, m = 256;  // m*n = 16384 entries
  const RandomLayer layer = make_layer(n, m, relu(), 19);
  const double mean = layer.matrix.mean();
  const double var =
      (layer.matrix.array() - mean).square().sum() / (m * n - 1);
  EXPECT_NEAR(var, 1.0 / m, 0.2 / m);
}

// sqrt(m)*M has standard normal entries, so ||Mx|| concentrates around 1
// like a normalized chi: sd ~ 1/sqrt(2m) = 0.022 at m = 1024. The [0.9, 1.1]
// band is 4.5 sigma; 99/100 is comfortable (verified over seeds).
TEST(MakeLayer, NormPreservationConcentrates) {
  const int n = 64, m = 1024;
  const RandomLayer layer = make_layer(n, m, identity_activation(), 5);
  int inside = 0;
  for (int t = 0; t < 100; ++t) {
    Vector x(n);
    for (int i = 0; i < n; ++i)
      x(i) = rng::gaussian_at(333, 50, static_cast<std::uint64_t>(t) * n + i);
    x.normalize();
    const double norm = (layer.matrix * x).norm();
    if (norm >= 0.9 && norm <= 1.1) ++inside;
  }
  EXPECT_GE(inside, 99);
}

// Same seed, larger m: the standard-normal draws are addressed by (row, col),
// so the smaller matrix is a scaled prefix of the larger one.
TEST(MakeLayer, SameSeedNestsAcrossOutputDims) {
  const int n = 8;
  const RandomLayer small = make_layer(n, 16, relu(), 77);
  const RandomLayer big = make_layer(n, 64, relu(), 77);
  const Matrix prefix = big.matrix.topRows(16) * std::sqrt(64.0 / 16.0);
  EXPECT_LT((prefix - small.matrix).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ApplyLayer, ZeroMapsToZeroAndIdentityIsExact) {
  const RandomLayer layer = make_layer(12, 24, relu(), 2);
  EXPECT_EQ(apply_layer(layer, Vector::Zero(12)).norm(), 0.0);

  RandomLayer lin = layer;
  lin.activation = identity_activation();
  Vector x(12);
  for (int i = 0; i < 12; ++i) x(i) = std::sin(i + 1.0);
  EXPECT_EQ((apply_layer(lin, x) - lin.matrix * x).norm(), 0.0);

  EXPECT_THROW(apply_layer(layer, Vector::Zero(5)), std::invalid_argument);
}

TEST(ApplyLayer, ReluKeepsPositivePartExactly) {
  const RandomLayer layer = make_layer(6, 40, relu(), 9);
  Vector x(6);
  x << 0.3, -0.1, 0.5, 0.2, -0.7, 0.1;
  const Vector pre = layer.matrix * x;
  const Vector post = apply_layer(layer, x);
  for (int i = 0; i < post.size(); ++i) {
    EXPECT_GE(post(i), 0.0);
    if (pre(i) > 0.0) EXPECT_EQ(post(i), pre(i));
  }
}

// Every semi-truncated activation is 1-Lipschitz coordinate-wise.
TEST(Activation, ElementwiseContraction) {
  const std::vector<ActivationSpec> specs = {
      relu(), identity_activation(), truncated_linear(1.0, -1.0, 1.0),
      truncated_linear(0.5, -2.0, 0.5),
      truncated_linear(0.9, -std::numeric_limits<double>::infinity(), 1.5)};
  for (const auto& spec : specs) {
    for (int t = 0; t < 2000; ++t) {
      const double u = 10.0 * rng::gaussian_at(4, 60, 2 * t);
      const double v = 10.0 * rng::gaussian_at(4, 60, 2 * t + 1);
      EXPECT_LE(std::abs(spec(u) - spec(v)), std::abs(u - v) + 1e-12);
    }
  }
}

TEST(ValidateSemiTruncated, AcceptsContractFamily) {
  EXPECT_TRUE(validate_semi_truncated(relu()).all_pass());
  EXPECT_TRUE(validate_semi_truncated(identity_activation()).all_pass());
  for (double s : {0.1, 0.5, 1.0}) {
    EXPECT_TRUE(validate_semi_truncated(truncated_linear(s, -1.0, 2.0)).all_pass());
    EXPECT_TRUE(validate_semi_truncated(
                    truncated_linear(s, -std::numeric_limits<double>::infinity(), 0.7))
                    .all_pass());
  }
}

TEST(ValidateSemiTruncated, RejectsCounterexamples) {
  const auto steep = validate_semi_truncated(
      [](double x) { return 2.0 * x; }, -1e9, 1e9);
  EXPECT_FALSE(steep.positive_side);
  EXPECT_FALSE(steep.all_pass());

  const auto offset = validate_semi_truncated(
      [](double x) { return x + 0.1; }, -1e9, 1e9);
  EXPECT_FALSE(offset.zero_at_zero);
  EXPECT_FALSE(offset.all_pass());

  // quadratic is neither linear nor constant anywhere
  const auto curved = validate_semi_truncated(
      [](double x) { return x * x * (x > 0 ? 1e-4 : 0.0); }, 0.0, 1e9);
  EXPECT_FALSE(curved.piecewise_structure);

  EXPECT_THROW(validate_semi_truncated(relu(), 50), std::invalid_argument);
}

TEST(ForwardStack, EmptyStackReturnsInput) {
  const ManifoldModel model = make_gmm_model(16, 2, 1, 4);
  const PointCloud cloud = sample_points(model, 10, 6);
  const StackResult out = forward_stack({}, cloud);
  ASSERT_EQ(out.clouds.size(), 1u);
  EXPECT_EQ((out.clouds[0].points - cloud.points).norm(), 0.0);
}

TEST(ForwardStack, RenormalizedIdentityLayerGivesUnitImages) {
  const ManifoldModel model = make_gmm_model(32, 3, 2, 8);
  const PointCloud cloud = sample_points(model, 20, 3);
  const RandomLayer layer = make_layer(32, 64, identity_activation(), 15);
  const StackResult out = forward_stack({layer}, cloud, true);
  ASSERT_EQ(out.clouds.size(), 1u);
  for (int i = 0; i < 20; ++i) {
    EXPECT_NEAR(out.clouds[0].points.col(i).norm(), 1.0, 1e-12);
    const Vector expected = (layer.matrix * cloud.points.col(i)).normalized();
    EXPECT_LT((out.clouds[0].points.col(i) - expected).norm(), 1e-12);
    EXPECT_NEAR(out.scales[0](i), (layer.matrix * cloud.points.col(i)).norm(), 1e-12);
  }
}

TEST(ForwardStack, DimensionMismatchRejected) {
  const ManifoldModel model = make_gmm_model(16, 2, 1, 4);
  const PointCloud cloud = sample_points(model, 5, 6);
  const RandomLayer wrong = make_layer(8, 16, relu(), 1);
  EXPECT_THROW(forward_stack({wrong}, cloud), std::invalid_argument);
}

TEST(ForwardStack, ZeroImageUnderRenormalizationIsDegenerate) {
  RandomLayer layer = identity_layer(3, relu());
  layer.matrix = -Matrix::Identity(3, 3);  // ReLU clips everything
  PointCloud cloud;
  cloud.points = Matrix::Zero(3, 1);
  cloud.points(0, 0) = 1.0;
  try {
    forward_stack({layer}, cloud, true);
    FAIL() << "expected DegenerateError";
  } catch (const DegenerateError& e) {
    EXPECT_NE(std::string(e.what()).find("point 0"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("layer 0"), std::string::npos);
  }
  // without renormalization the zero image is returned as-is
  const StackResult raw = forward_stack({layer}, cloud, false);
  EXPECT_EQ(raw.clouds[0].points.col(0).norm(), 0.0);
}

TEST(ForwardStack, DeterministicAcrossRuns) {
  const ManifoldModel model = make_gmm_model(64, 4, 3, 10);
  const PointCloud cloud = sample_points(model, 30, 11);
  std::vector<RandomLayer> stack;
  stack.push_back(make_layer(64, 128, relu(), 21));
  stack.push_back(make_layer(128, 96, relu(), 22));
  const StackResult a = forward_stack(stack, cloud, true);
  const StackResult b = forward_stack(stack, cloud, true);
  for (std::size_t i = 0; i < a.clouds.size(); ++i)
    EXPECT_EQ((a.clouds[i].points - b.clouds[i].points).cwiseAbs().maxCoeff(), 0.0);
}

// With the identity activation, pairwise distances after the layer stay
// within a multiplicative band that tightens as m grows.
TEST(ForwardStack, IdentityLayerDistortionShrinksWithM) {
  const ManifoldModel model = make_gmm_model(64, 4, 3, 30);
  const PointCloud cloud = sample_points(model, 50, 31);
  double max_dist[2] = {0.0, 0.0};
  const int ms[2] = {256, 2048};
  for (int idx = 0; idx < 2; ++idx) {
    const RandomLayer layer = make_layer(64, ms[idx], identity_activation(), 33);
    const Matrix post = apply_layer(layer, cloud.points);
    for (int i = 0; i < cloud.count(); ++i) {
      for (int j = i + 1; j < cloud.count(); ++j) {
        const double pre = (cloud.points.col(i) - cloud.points.col(j)).norm();
        const double after = (post.col(i) - post.col(j)).norm();
        if (pre > 1e-9)
          max_dist[idx] = std::max(max_dist[idx], std::abs(after / pre - 1.0));
      }
    }
  }
  EXPECT_LT(max_dist[1], max_dist[0]);
  EXPECT_LT(max_dist[1], 0.2);
}
