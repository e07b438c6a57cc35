#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "netembed/models.hpp"

namespace netembed {

enum class ActivationKind { ReLU, TruncatedLinear, Identity };

inline const char* to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::ReLU: return "relu";
    case ActivationKind::TruncatedLinear: return "truncated";
    case ActivationKind::Identity: return "identity";
  }
  return "?";
}

// Scalar activation f(x) = slope * clamp(x, lower, upper) in the truncated
// case; linear on [lower, upper], constant outside, f(0) = 0 whenever
// lower <= 0 <= upper. ReLU is the special case slope=1, lower=0,
// upper=+inf. The struct does not enforce validity; see
// validate_semi_truncated for the contract checks.
struct ActivationSpec {
  ActivationKind kind = ActivationKind::ReLU;
  double slope = 1.0;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();

  double operator()(double x) const {
    switch (kind) {
      case ActivationKind::ReLU: return x > 0.0 ? x : 0.0;
      case ActivationKind::Identity: return x;
      case ActivationKind::TruncatedLinear:
        return slope * std::clamp(x, lower, upper);
    }
    return x;
  }

  // a.e. derivative, used by subgradient recovery
  double derivative(double x) const {
    switch (kind) {
      case ActivationKind::ReLU: return x > 0.0 ? 1.0 : 0.0;
      case ActivationKind::Identity: return 1.0;
      case ActivationKind::TruncatedLinear:
        return (x > lower && x < upper) ? slope : 0.0;
    }
    return 1.0;
  }
};

inline ActivationSpec relu() { return ActivationSpec{}; }

inline ActivationSpec identity_activation() {
  ActivationSpec a;
  a.kind = ActivationKind::Identity;
  a.lower = -std::numeric_limits<double>::infinity();
  return a;
}

inline ActivationSpec truncated_linear(double slope, double lower, double upper) {
  ActivationSpec a;
  a.kind = ActivationKind::TruncatedLinear;
  a.slope = slope;
  a.lower = lower;
  a.upper = upper;
  return a;
}

// Random linear map R^n -> R^m with i.i.d. N(0, 1/m) entries, i.e.
// sqrt(m) * matrix has standard normal entries and E||Mx||^2 = ||x||^2.
struct RandomLayer {
  int in_dim = 0;   // n
  int out_dim = 0;  // m
  Matrix matrix;    // m x n
  ActivationSpec activation;
  std::uint64_t seed = 0;
};

// Entry (r, c) is addressed by counter r*n + c, so layers built from the
// same seed with different m share their leading rows.
inline RandomLayer make_layer(int n, int m, const ActivationSpec& activation,
                              std::uint64_t seed) {
  if (n < 1 || m < 1)
    throw std::invalid_argument("make_layer: dimensions must be positive (n=" +
                                std::to_string(n) + ", m=" + std::to_string(m) + ")");
  RandomLayer layer;
  layer.in_dim = n;
  layer.out_dim = m;
  layer.activation = activation;
  layer.seed = seed;
  layer.matrix.resize(m, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c)
      layer.matrix(r, c) =
          scale * rng::gaussian_at(seed, rng::stream::kLayerMatrix,
                                   static_cast<std::uint64_t>(r) * n + c);
  return layer;
}

// Exact identity map, used as a control in covering-recursion experiments.
inline RandomLayer identity_layer(int n, const ActivationSpec& activation =
                                             identity_activation()) {
  if (n < 1) throw std::invalid_argument("identity_layer: n must be positive");
  RandomLayer layer;
  layer.in_dim = n;
  layer.out_dim = n;
  layer.activation = activation;
  layer.matrix = Matrix::Identity(n, n);
  return layer;
}

// f(Mx), column-wise for matrix inputs; pure.
template <typename Derived>
typename Derived::PlainObject apply_layer(const RandomLayer& layer,
                                          const Eigen::MatrixBase<Derived>& input) {
  if (input.rows() != layer.in_dim)
    throw std::invalid_argument("apply_layer: input has dimension " +
                                std::to_string(input.rows()) +
                                ", layer expects " + std::to_string(layer.in_dim));
  typename Derived::PlainObject out = layer.matrix * input;
  for (Eigen::Index c = 0; c < out.cols(); ++c)
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      out(r, c) = layer.activation(out(r, c));
  return out;
}

// Per-property result of checking the semi-truncated contract on a grid:
// f(0) = 0; 0 < f(x) <= x for x > 0; 0 >= f(x) >= x for x < 0; and f is
// linear through the origin on [lower, upper], constant outside.
struct SemiTruncatedReport {
  bool zero_at_zero = false;
  bool positive_side = false;
  bool negative_side = false;
  bool piecewise_structure = false;

  bool all_pass() const {
    return zero_at_zero && positive_side && negative_side && piecewise_structure;
  }
};

// Checks an arbitrary scalar function against the contract on a symmetric
// log-spaced grid of `grid` points spanning [1e-6, 1e3] in magnitude.
// `lower`/`upper` declare where the function claims to be linear.
inline SemiTruncatedReport validate_semi_truncated(
    const std::function<double(double)>& f, double lower, double upper,
    int grid = 512) {
  if (grid < 100)
    throw std::invalid_argument("validate_semi_truncated: grid must be >= 100");

  SemiTruncatedReport report;
  constexpr double kTol = 1e-9;
  report.zero_at_zero = std::abs(f(0.0)) <= kTol;

  const int half = grid / 2;
  std::vector<double> xs;
  xs.reserve(2 * half);
  for (int i = 0; i < half; ++i) {
    const double t = -6.0 + 9.0 * i / (half - 1);  // magnitudes 1e-6 .. 1e3
    const double mag = std::pow(10.0, t);
    xs.push_back(mag);
    xs.push_back(-mag);
  }

  report.positive_side = true;
  report.negative_side = true;
  for (double x : xs) {
    const double y = f(x);
    if (x > 0.0 && !(y > 0.0 && y <= x * (1.0 + kTol)))
      report.positive_side = false;
    if (x < 0.0 && !(y <= 0.0 && y >= x * (1.0 + kTol)))
      report.negative_side = false;
  }

  // Estimate the slope from the smallest-magnitude grid point inside the
  // linear interval, then require linearity inside and constancy outside.
  double slope = 0.0;
  double slope_at = std::numeric_limits<double>::infinity();
  bool have_slope = false;
  for (double x : xs) {
    if (x > lower && x < upper && std::abs(x) < slope_at) {
      slope = f(x) / x;
      slope_at = std::abs(x);
      have_slope = true;
    }
  }
  report.piecewise_structure = true;
  for (double x : xs) {
    const double y = f(x);
    if (x > lower && x < upper) {
      if (!have_slope || std::abs(y - slope * x) > kTol * std::max(1.0, std::abs(x)))
        report.piecewise_structure = false;
    } else if (x >= upper && std::isfinite(upper)) {
      if (std::abs(y - f(upper)) > kTol) report.piecewise_structure = false;
    } else if (x <= lower && std::isfinite(lower)) {
      if (std::abs(y - f(lower)) > kTol) report.piecewise_structure = false;
    }
  }
  return report;
}

inline SemiTruncatedReport validate_semi_truncated(const ActivationSpec& spec,
                                                   int grid = 512) {
  const double lower =
      spec.kind == ActivationKind::ReLU ? 0.0
      : spec.kind == ActivationKind::Identity
          ? -std::numeric_limits<double>::infinity()
          : spec.lower;
  const double upper = spec.kind == ActivationKind::TruncatedLinear
                           ? spec.upper
                           : std::numeric_limits<double>::infinity();
  return validate_semi_truncated([&spec](double x) { return spec(x); }, lower,
                                 upper, grid);
}

// Outputs of a layer stack. clouds[i] is the output of layer i; when
// renormalize is set, every output is rescaled to the unit sphere before
// feeding the next layer, and scales[i] records the pre-normalization norms.
struct StackResult {
  std::vector<PointCloud> clouds;
  std::vector<Vector> scales;
};

inline StackResult forward_stack(const std::vector<RandomLayer>& layers,
                                 const PointCloud& input,
                                 bool renormalize = true) {
  StackResult result;
  if (layers.empty()) {
    result.clouds.push_back(input);
    return result;
  }
  Matrix current = input.points;
  for (std::size_t li = 0; li < layers.size(); ++li) {
    const RandomLayer& layer = layers[li];
    if (current.rows() != layer.in_dim)
      throw std::invalid_argument(
          "forward_stack: layer " + std::to_string(li) + " expects dimension " +
          std::to_string(layer.in_dim) + ", got " + std::to_string(current.rows()));
    Matrix out = apply_layer(layer, current);
    Vector scales = Vector::Ones(out.cols());
    if (renormalize) {
      for (int c = 0; c < out.cols(); ++c) {
        const double norm = out.col(c).norm();
        if (norm < 1e-12)
          throw DegenerateError("forward_stack: point " + std::to_string(c) +
                                " collapsed to zero at layer " +
                                std::to_string(li));
        scales(c) = norm;
        out.col(c) /= norm;
      }
    }
    PointCloud cloud;
    cloud.points = out;
    cloud.provenance = input.provenance + "/layer" + std::to_string(li) +
                       "(m=" + std::to_string(layer.out_dim) +
                       "," + to_string(layer.activation.kind) +
                       (renormalize ? ",renorm" : "") + ")";
    result.clouds.push_back(std::move(cloud));
    result.scales.push_back(std::move(scales));
    current = result.clouds.back().points;
  }
  return result;
}

}  // namespace netembed
