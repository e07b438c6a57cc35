#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "netembed/models.hpp"

namespace netembed {

// Fraction of coordinates whose positivity indicators differ. A pseudometric
// on sign patterns; coordinates exactly 0 count as "not positive".
inline double hamming_variant(const Vector& u, const Vector& v) {
  if (u.size() != v.size() || u.size() < 1)
    throw std::invalid_argument("hamming_variant: length mismatch (" +
                                std::to_string(u.size()) + " vs " +
                                std::to_string(v.size()) + ")");
  int differ = 0;
  for (int i = 0; i < u.size(); ++i)
    differ += (u(i) > 0.0) != (v(i) > 0.0);
  return static_cast<double>(differ) / static_cast<double>(u.size());
}

// Normalized angular distance arccos(<x,y>)/pi for unit vectors.
inline double geodesic_distance(const Vector& x, const Vector& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("geodesic_distance: dimension mismatch");
  if (std::abs(x.norm() - 1.0) > 1e-6 || std::abs(y.norm() - 1.0) > 1e-6)
    throw std::invalid_argument("geodesic_distance: inputs must be unit vectors");
  const double dot = std::clamp(x.dot(y), -1.0, 1.0);
  constexpr double pi = 3.14159265358979323846;
  return std::acos(dot) / pi;
}

enum class PreMetric { Euclidean, Geodesic };
enum class PostMetric { HammingVariant, Euclidean };

inline const char* to_string(PreMetric m) {
  return m == PreMetric::Euclidean ? "euclidean" : "geodesic";
}
inline const char* to_string(PostMetric m) {
  return m == PostMetric::HammingVariant ? "hamming" : "euclidean";
}

// How well the post-map distances track the pre-map distances: the scale
// constant is the least-squares fit through the origin, residuals are
// |d_post - c*d_pre|, and spearman is the rank correlation of the two
// distance lists over all pairs (fixed i<j enumeration order).
struct DistortionReport {
  int pairs = 0;
  double scale_constant = 0.0;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double spearman = 0.0;
  PreMetric pre_metric = PreMetric::Euclidean;
  PostMetric post_metric = PostMetric::Euclidean;
};

namespace detail {

inline std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * (i + j) + 1.0;  // average rank for ties
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace detail

inline double spearman_correlation(const std::vector<double>& a,
                                   const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("spearman_correlation: need two aligned lists");
  return detail::pearson(detail::average_ranks(a), detail::average_ranks(b));
}

inline DistortionReport distortion_report(const PointCloud& pre,
                                          const Matrix& post,
                                          PreMetric pre_metric,
                                          PostMetric post_metric) {
  if (post.cols() != pre.count())
    throw std::invalid_argument(
        "distortion_report: clouds misaligned (" + std::to_string(pre.count()) +
        " pre vs " + std::to_string(post.cols()) + " post points)");
  const int n = pre.count();
  if (n < 2)
    throw std::invalid_argument("distortion_report: need at least 2 points");

  const std::size_t pair_count = static_cast<std::size_t>(n) * (n - 1) / 2;
  std::vector<double> d_pre, d_post;
  d_pre.reserve(pair_count);
  d_post.reserve(pair_count);

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double dp;
      if (pre_metric == PreMetric::Euclidean)
        dp = (pre.points.col(i) - pre.points.col(j)).norm();
      else
        dp = geodesic_distance(pre.points.col(i), pre.points.col(j));
      double dq;
      if (post_metric == PostMetric::Euclidean)
        dq = (post.col(i) - post.col(j)).norm();
      else
        dq = hamming_variant(post.col(i), post.col(j));
      d_pre.push_back(dp);
      d_post.push_back(dq);
    }
  }

  double num = 0.0, den = 0.0;
  for (std::size_t p = 0; p < d_pre.size(); ++p) {
    num += d_pre[p] * d_post[p];
    den += d_pre[p] * d_pre[p];
  }
  DistortionReport report;
  report.pairs = static_cast<int>(pair_count);
  report.pre_metric = pre_metric;
  report.post_metric = post_metric;
  report.scale_constant = den > 0.0 ? num / den : 0.0;
  double sum_res = 0.0;
  for (std::size_t p = 0; p < d_pre.size(); ++p) {
    const double r = std::abs(d_post[p] - report.scale_constant * d_pre[p]);
    sum_res += r;
    report.max_residual = std::max(report.max_residual, r);
  }
  report.mean_residual = sum_res / static_cast<double>(pair_count);
  report.spearman = spearman_correlation(d_pre, d_post);
  return report;
}

// Greedy sequential net in fixed index order: a point joins the net iff its
// distance to every current net point exceeds eps. The result is a maximal
// eps-separated subset, which sandwiches the true covering number; recursion
// checks absorb the gap with an explicit slack factor.
struct CoveringEstimate {
  double radius = 0.0;
  int net_size = 0;
  double bound_value = std::numeric_limits<double>::quiet_NaN();  // optional comparison
};

inline CoveringEstimate empirical_covering(const Matrix& points, double eps) {
  if (points.cols() < 1)
    throw std::invalid_argument("empirical_covering: empty cloud");
  if (!(eps > 0.0))
    throw std::invalid_argument("empirical_covering: eps must be > 0");
  std::vector<int> net;
  net.reserve(16);
  for (int i = 0; i < points.cols(); ++i) {
    bool separated = true;
    for (int j : net) {
      if ((points.col(i) - points.col(j)).norm() <= eps) {
        separated = false;
        break;
      }
    }
    if (separated) net.push_back(i);
  }
  CoveringEstimate est;
  est.radius = eps;
  est.net_size = static_cast<int>(net.size());
  return est;
}

inline CoveringEstimate empirical_covering(const PointCloud& cloud, double eps) {
  return empirical_covering(cloud.points, eps);
}

// One covering-recursion check: net(post, eps) against
// slack * net(pre, eps / (1 + width/sqrt(m))).
struct RecursionCheck {
  double eps = 0.0;
  double shrunk_eps = 0.0;
  int net_post = 0;
  int net_pre_shrunk = 0;
  double bound_rhs = 0.0;
  bool pass = false;
};

inline RecursionCheck verify_covering_recursion(const PointCloud& pre,
                                                const Matrix& post, double eps,
                                                double width_est, int m,
                                                double slack) {
  if (post.cols() != pre.count())
    throw std::invalid_argument("verify_covering_recursion: clouds misaligned");
  if (slack < 1.0)
    throw std::invalid_argument("verify_covering_recursion: slack must be >= 1");
  if (width_est < 0.0)
    throw std::invalid_argument("verify_covering_recursion: width must be >= 0");
  if (m < 1)
    throw std::invalid_argument("verify_covering_recursion: m must be >= 1");

  RecursionCheck check;
  check.eps = eps;
  check.shrunk_eps = eps / (1.0 + width_est / std::sqrt(static_cast<double>(m)));
  check.net_post = empirical_covering(post, eps).net_size;
  check.net_pre_shrunk = empirical_covering(pre.points, check.shrunk_eps).net_size;
  check.bound_rhs = slack * check.net_pre_shrunk;
  check.pass = check.net_post <= check.bound_rhs;
  return check;
}

}  // namespace netembed
