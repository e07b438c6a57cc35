#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "netembed/errors.hpp"
#include "netembed/rng.hpp"

namespace netembed {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ModelKind { GMM, UnionOfSubspaces, ExplicitCloud };

inline const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::GMM: return "gmm";
    case ModelKind::UnionOfSubspaces: return "uos";
    case ModelKind::ExplicitCloud: return "cloud";
  }
  return "?";
}

// Parametric description of the input set: a union of L k-dimensional
// components inside the unit sphere of R^n, or an explicit point list.
struct ManifoldModel {
  ModelKind kind = ModelKind::GMM;
  int ambient_dim = 0;            // n
  int intrinsic_dim = 0;          // k <= n
  int components = 1;             // L >= 1
  std::vector<Matrix> bases;      // L matrices, n x k, orthonormal columns
  std::vector<Vector> centers;    // empty = all components centered at origin
  Matrix cloud;                   // ExplicitCloud only: n x count
  std::uint64_t seed = 0;
};

// Finite point set, one unit-norm column per point. `provenance` tags the
// generating model and seeds so artifacts stay self-describing.
struct PointCloud {
  Matrix points;
  std::string provenance;

  int dim() const { return static_cast<int>(points.rows()); }
  int count() const { return static_cast<int>(points.cols()); }
};

namespace detail {

inline Matrix gaussian_matrix(int rows, int cols, std::uint64_t seed,
                              std::uint64_t stream,
                              std::uint64_t counter_base = 0) {
  Matrix g(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      g(r, c) = rng::gaussian_at(
          seed, stream,
          counter_base + static_cast<std::uint64_t>(r) * cols + c);
  return g;
}

// Thin QR with the sign convention diag(R) >= 0, so the basis is a
// deterministic function of the Gaussian input on every platform.
inline Matrix orthonormal_basis(const Matrix& gaussian) {
  const int n = static_cast<int>(gaussian.rows());
  const int k = static_cast<int>(gaussian.cols());
  Eigen::HouseholderQR<Matrix> qr(gaussian);
  Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  const Matrix r = qr.matrixQR().topLeftCorner(k, k);
  for (int j = 0; j < k; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

}  // namespace detail

// L random orthonormal n x k bases via QR of seeded Gaussian matrices.
// `with_centers` adds one random unit center per component; centered
// components are excluded from the closed-form covering comparisons.
inline ManifoldModel make_gmm_model(int n, int k, int L, std::uint64_t seed,
                                    bool with_centers = false) {
  if (n < 1 || k < 1 || k > n || L < 1)
    throw std::invalid_argument(
        "make_gmm_model: need 1 <= k <= n and L >= 1 (got n=" +
        std::to_string(n) + ", k=" + std::to_string(k) +
        ", L=" + std::to_string(L) + ")");
  ManifoldModel model;
  model.kind = ModelKind::GMM;
  model.ambient_dim = n;
  model.intrinsic_dim = k;
  model.components = L;
  model.seed = seed;
  model.bases.reserve(L);
  const std::uint64_t per_basis =
      static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(k);
  for (int j = 0; j < L; ++j) {
    const Matrix g = detail::gaussian_matrix(n, k, seed, rng::stream::kModelBasis,
                                             static_cast<std::uint64_t>(j) * per_basis);
    model.bases.push_back(detail::orthonormal_basis(g));
  }
  if (with_centers) {
    model.centers.reserve(L);
    for (int j = 0; j < L; ++j) {
      Vector c(n);
      for (int i = 0; i < n; ++i)
        c(i) = rng::gaussian_at(seed, rng::stream::kModelCenter,
                                static_cast<std::uint64_t>(j) * n + i);
      model.centers.push_back(c.normalized());
    }
  }
  return model;
}

// Same construction as the centerless GMM; only the kind tag differs.
inline ManifoldModel make_union_of_subspaces(int n, int k, int L,
                                             std::uint64_t seed) {
  ManifoldModel model = make_gmm_model(n, k, L, seed, false);
  model.kind = ModelKind::UnionOfSubspaces;
  return model;
}

inline ManifoldModel make_explicit_cloud(const Matrix& points) {
  if (points.cols() < 1)
    throw std::invalid_argument("make_explicit_cloud: empty point list");
  for (int j = 0; j < points.cols(); ++j) {
    const double norm = points.col(j).norm();
    if (std::abs(norm - 1.0) > 1e-9)
      throw std::invalid_argument(
          "make_explicit_cloud: point " + std::to_string(j) +
          " has norm " + std::to_string(norm) + ", expected 1");
  }
  ManifoldModel model;
  model.kind = ModelKind::ExplicitCloud;
  model.ambient_dim = static_cast<int>(points.rows());
  model.intrinsic_dim = static_cast<int>(points.rows());
  model.components = 1;
  model.cloud = points;
  return model;
}

// Gram deviation from identity, max over components. Sampling a fresh model
// should give values at machine-epsilon scale; 1e-9 is the contract.
inline double basis_orthonormality_error(const ManifoldModel& model) {
  double worst = 0.0;
  const Matrix eye = Matrix::Identity(model.intrinsic_dim, model.intrinsic_dim);
  for (const Matrix& b : model.bases)
    worst = std::max(worst, (b.transpose() * b - eye).cwiseAbs().maxCoeff());
  return worst;
}

// Draws `count` points: component uniform, k-dim standard Gaussian
// coefficients through the basis, then projection to the unit sphere.
// Point i depends only on (seed, i), never on evaluation order.
inline PointCloud sample_points(const ManifoldModel& model, int count,
                                std::uint64_t seed) {
  if (count < 1)
    throw std::invalid_argument("sample_points: count must be >= 1");

  PointCloud out;
  out.provenance = std::string(to_string(model.kind)) + "(n=" +
                   std::to_string(model.ambient_dim) +
                   ",k=" + std::to_string(model.intrinsic_dim) +
                   ",L=" + std::to_string(model.components) +
                   ",seed=" + std::to_string(model.seed) + ")/sample(seed=" +
                   std::to_string(seed) + ",count=" + std::to_string(count) + ")";

  if (model.kind == ModelKind::ExplicitCloud) {
    if (count > model.cloud.cols())
      throw std::invalid_argument(
          "sample_points: count " + std::to_string(count) +
          " exceeds stored cloud size " + std::to_string(model.cloud.cols()));
    out.points = model.cloud.leftCols(count);
    return out;
  }

  const int n = model.ambient_dim;
  const int k = model.intrinsic_dim;
  const int L = model.components;
  out.points.resize(n, count);
  for (int i = 0; i < count; ++i) {
    int comp = static_cast<int>(
        rng::uniform_at(seed, rng::stream::kSampleComponent, i) * L);
    if (comp >= L) comp = L - 1;  // uniform_at can return exactly 1
    Vector coeff(k);
    for (int j = 0; j < k; ++j)
      coeff(j) = rng::gaussian_at(seed, rng::stream::kSampleCoeff,
                                  static_cast<std::uint64_t>(i) * k + j);
    Vector x = model.bases[comp] * coeff;
    if (!model.centers.empty()) x += model.centers[comp];
    const double norm = x.norm();
    if (norm < 1e-12)
      throw DegenerateError("sample_points: zero vector drawn at index " +
                            std::to_string(i));
    out.points.col(i) = x / norm;
  }
  return out;
}

}  // namespace netembed
