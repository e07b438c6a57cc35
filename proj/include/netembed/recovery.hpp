#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netembed/netsim.hpp"
#include "netembed/parallel.hpp"

namespace netembed {

enum class RecoveryMethod { Linear, IterativeProjected };

inline const char* to_string(RecoveryMethod m) {
  return m == RecoveryMethod::Linear ? "linear" : "iterative";
}

struct RecoveryResult {
  Vector estimate;           // unit norm
  int component_index = 0;   // selected model component
  double residual = 0.0;     // ||f(M xhat) - q||
  std::optional<double> error;  // ||x - xhat|| when ground truth is known
  int iterations = 0;
  RecoveryMethod method = RecoveryMethod::Linear;
};

namespace detail {

inline double observation_residual(const RandomLayer& layer, const Vector& xhat,
                                   const Vector& q) {
  return (apply_layer(layer, xhat) - q).norm();
}

// Largest eigenvalue of M^T M by power iteration from a fixed start.
inline double lambda_max_estimate(const Matrix& m, int iters = 20) {
  Vector v = Vector::Ones(m.cols()).normalized();
  double lambda = 1.0;
  for (int i = 0; i < iters; ++i) {
    Vector w = m.transpose() * (m * v);
    const double norm = w.norm();
    if (norm < 1e-300) return 1.0;
    lambda = norm;
    v = w / norm;
  }
  return lambda;
}

// Exact minimizer of ||M B w - q|| inside one component, mapped back to the
// sphere. Solves the k-dimensional least-squares problem; exact for the
// identity activation with a consistent observation.
inline std::optional<Vector> component_least_squares(const RandomLayer& layer,
                                                     const Matrix& basis,
                                                     const Vector& q) {
  const Matrix a = layer.matrix * basis;  // m x k
  const Vector w = a.colPivHouseholderQr().solve(q);
  Vector y = basis * w;
  const double norm = y.norm();
  if (norm < 1e-12) return std::nullopt;
  return y / norm;
}

}  // namespace detail

// Linear estimator: back-project z = M^T q, project onto each component,
// pick the candidate whose image best fits the observation (ties to the
// lowest index). For the identity activation the selected candidate is
// polished by an exact in-component least-squares solve.
inline RecoveryResult recover_linear(const RandomLayer& layer, const Vector& q,
                                     const ManifoldModel& model) {
  if (q.size() != layer.out_dim)
    throw std::invalid_argument("recover_linear: observation has dimension " +
                                std::to_string(q.size()) + ", layer outputs " +
                                std::to_string(layer.out_dim));
  if (model.bases.empty())
    throw std::invalid_argument(
        "recover_linear: model carries no component bases");
  if (q.norm() < 1e-300)
    throw DegenerateError(
        "recovery: observation is the zero vector; it carries no direction");

  const Vector z = layer.matrix.transpose() * q;
  int best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  Vector best_candidate;
  for (std::size_t j = 0; j < model.bases.size(); ++j) {
    const Matrix& basis = model.bases[j];
    Vector proj = basis * (basis.transpose() * z);
    const double norm = proj.norm();
    if (norm < 1e-12) continue;
    proj /= norm;
    const double score = q.dot(apply_layer(layer, proj));
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(j);
      best_candidate = std::move(proj);
    }
  }
  if (best < 0)
    throw DegenerateError(
        "recovery: back-projection vanished in every component");

  RecoveryResult result;
  result.method = RecoveryMethod::Linear;
  result.component_index = best;
  result.estimate = best_candidate;
  result.residual = detail::observation_residual(layer, result.estimate, q);

  if (layer.activation.kind == ActivationKind::Identity) {
    const auto polished =
        detail::component_least_squares(layer, model.bases[best], q);
    if (polished) {
      const double res = detail::observation_residual(layer, *polished, q);
      if (res < result.residual) {
        result.estimate = *polished;
        result.residual = res;
      }
    }
  }
  return result;
}

struct IterativeOptions {
  int max_iter = 200;
  double step = 0.0;   // <= 0 selects 1/lambda_max(M^T M) by power iteration
  double tol = 1e-10;  // stop when the residual improves by less than this
};

// Projected subgradient refinement of h(z) = 0.5*||f(Mz) - q||^2 inside the
// component selected by `init`: gradient step, projection onto the component
// subspace, renormalization to the sphere. Returns the best iterate seen;
// never worse than init. For the identity activation the quadratic is solved
// exactly instead of iterated.
inline RecoveryResult recover_iterative(const RandomLayer& layer, const Vector& q,
                                        const ManifoldModel& model,
                                        const RecoveryResult& init,
                                        const IterativeOptions& opts = {}) {
  if (opts.max_iter < 1)
    throw std::invalid_argument("recover_iterative: max_iter must be >= 1");
  if (opts.tol < 0.0)
    throw std::invalid_argument("recover_iterative: tol must be >= 0");
  if (init.component_index < 0 ||
      init.component_index >= static_cast<int>(model.bases.size()))
    throw std::invalid_argument("recover_iterative: init component out of range");

  RecoveryResult result = init;
  result.method = RecoveryMethod::IterativeProjected;
  result.iterations = 0;
  if (init.residual <= 1e-15) return result;  // already optimal

  const Matrix& basis = model.bases[init.component_index];

  if (layer.activation.kind == ActivationKind::Identity) {
    const auto solved = detail::component_least_squares(layer, basis, q);
    if (solved) {
      const double res = detail::observation_residual(layer, *solved, q);
      if (res < result.residual) {
        result.estimate = *solved;
        result.residual = res;
      }
    }
    result.iterations = 1;
    return result;
  }

  const double step =
      opts.step > 0.0 ? opts.step
                      : 1.0 / detail::lambda_max_estimate(layer.matrix);
  Vector x = init.estimate;
  double prev_res = init.residual;
  for (int it = 1; it <= opts.max_iter; ++it) {
    result.iterations = it;
    const Vector u = layer.matrix * x;
    Vector r(u.size());
    Vector mask(u.size());
    for (int i = 0; i < u.size(); ++i) {
      r(i) = layer.activation(u(i)) - q(i);
      mask(i) = layer.activation.derivative(u(i));
    }
    const Vector grad = layer.matrix.transpose() * mask.cwiseProduct(r);
    x -= step * grad;
    x = basis * (basis.transpose() * x);
    const double norm = x.norm();
    if (!std::isfinite(norm) || norm < 1e-15)
      throw NumericalError(
          "recovery: iterate became " +
          std::string(std::isfinite(norm) ? "zero" : "non-finite") +
          " at iteration " + std::to_string(it));
    x /= norm;
    const double res = detail::observation_residual(layer, x, q);
    if (!std::isfinite(res))
      throw NumericalError("recovery: residual became non-finite at iteration " +
                           std::to_string(it));
    if (res < result.residual) {
      result.estimate = x;
      result.residual = res;
    }
    if (prev_res - res < opts.tol) break;
    prev_res = res;
  }
  return result;
}

// Euclidean recovery error; for one-dimensional components the global sign
// is unidentifiable, so the error is min over both signs.
inline double recovery_error(const Vector& truth, const Vector& estimate,
                             int component_dim) {
  const double direct = (truth - estimate).norm();
  if (component_dim == 1)
    return std::min(direct, (truth + estimate).norm());
  return direct;
}

struct SweepRow {
  int m = 0;
  int trial = 0;
  RecoveryMethod method = RecoveryMethod::Linear;
  double residual = 0.0;
  double error = 0.0;
  int iterations = 0;
};

struct SweepMedian {
  RecoveryMethod method = RecoveryMethod::Linear;
  int m = 0;
  double median_error = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;        // trial-level results, fixed order
  std::vector<SweepMedian> medians;  // per (method, m)
  double slope_linear = std::numeric_limits<double>::quiet_NaN();
  double slope_iterative = std::numeric_limits<double>::quiet_NaN();
  bool floor_linear = false;      // medians at numerical floor, slope unreliable
  bool floor_iterative = false;
};

namespace detail {

inline double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// Log-log slope of medians vs m; medians at or below the numerical floor are
// excluded and flagged.
inline std::pair<double, bool> loglog_slope(const std::vector<int>& ms,
                                            const std::vector<double>& medians) {
  constexpr double kFloor = 1e-12;
  std::vector<double> lx, ly;
  bool floored = false;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (medians[i] > kFloor) {
      lx.push_back(std::log(static_cast<double>(ms[i])));
      ly.push_back(std::log(medians[i]));
    } else {
      floored = true;
    }
  }
  if (lx.size() < 2)
    return {std::numeric_limits<double>::quiet_NaN(), true};
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= lx.size();
  my /= ly.size();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  return {num / den, floored};
}

}  // namespace detail

// For each m and trial: a fresh layer and a fresh ground-truth point, linear
// recovery and iterative refinement, errors against the truth. The layer
// seed depends on the trial only, so matrices across the m grid share
// leading rows and per-trial errors are comparable along m. Trials
// parallelize over slots; the output order is fixed.
inline SweepResult recovery_error_sweep(const ManifoldModel& model,
                                        std::uint64_t master_seed,
                                        const std::vector<int>& m_list,
                                        int trials,
                                        const ActivationSpec& activation,
                                        const IterativeOptions& opts = {},
                                        int threads = 1) {
  if (m_list.size() < 3 || !std::is_sorted(m_list.begin(), m_list.end()))
    throw std::invalid_argument(
        "recovery_error_sweep: m_list must be >= 3 ascending values");
  if (m_list.back() < 10 * m_list.front())
    throw std::invalid_argument(
        "recovery_error_sweep: m_list must span at least one decade");
  if (trials < 10)
    throw std::invalid_argument("recovery_error_sweep: trials must be >= 10");

  const int n = model.ambient_dim;
  SweepResult result;
  result.rows.resize(m_list.size() * trials * 2);

  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
    const std::uint64_t x_seed =
        rng::derive_seed(master_seed, rng::tag::kTrialPoint, t);
    const std::uint64_t layer_seed =
        rng::derive_seed(master_seed, rng::tag::kTrialLayer, t);
    const PointCloud truth_cloud = sample_points(model, 1, x_seed);
    const Vector truth = truth_cloud.points.col(0);
    for (std::size_t mi = 0; mi < m_list.size(); ++mi) {
      const RandomLayer layer = make_layer(n, m_list[mi], activation, layer_seed);
      const Vector q = apply_layer(layer, truth);
      const RecoveryResult lin = recover_linear(layer, q, model);
      const RecoveryResult ref = recover_iterative(layer, q, model, lin, opts);
      const std::size_t base = (mi * trials + t) * 2;
      result.rows[base] = {m_list[mi], static_cast<int>(t), RecoveryMethod::Linear,
                           lin.residual,
                           recovery_error(truth, lin.estimate, model.intrinsic_dim),
                           lin.iterations};
      result.rows[base + 1] = {m_list[mi], static_cast<int>(t),
                               RecoveryMethod::IterativeProjected, ref.residual,
                               recovery_error(truth, ref.estimate, model.intrinsic_dim),
                               ref.iterations};
    }
  });

  for (RecoveryMethod method :
       {RecoveryMethod::Linear, RecoveryMethod::IterativeProjected}) {
    std::vector<double> medians_for_slope;
    for (int m : m_list) {
      std::vector<double> errs;
      errs.reserve(trials);
      for (const SweepRow& row : result.rows)
        if (row.m == m && row.method == method) errs.push_back(row.error);
      const double med = detail::median_of(std::move(errs));
      result.medians.push_back({method, m, med});
      medians_for_slope.push_back(med);
    }
    const auto [slope, floored] = detail::loglog_slope(m_list, medians_for_slope);
    if (method == RecoveryMethod::Linear) {
      result.slope_linear = slope;
      result.floor_linear = floored;
    } else {
      result.slope_iterative = slope;
      result.floor_iterative = floored;
    }
  }
  return result;
}

}  // namespace netembed
