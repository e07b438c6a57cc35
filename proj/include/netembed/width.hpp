#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "netembed/models.hpp"
#include "netembed/parallel.hpp"

namespace netembed {

// Monte Carlo estimate of the Gaussian mean width of a finite cloud:
// the mean over probes g of sup_{x,y in cloud} <g, x-y>. This lower-bounds
// the width of any set containing the cloud.
struct MeanWidthEstimate {
  double value = 0.0;
  double std_error = 0.0;
  int probes = 0;
  int cloud_size = 0;
};

enum class CoveringSource { GMMFormula, EmpiricalNet, LayerRecursion };

struct CoveringBound {
  double radius = 0.0;
  double value = 1.0;
  CoveringSource source = CoveringSource::GMMFormula;
};

// Covering value as a function of the radius; >= 1 everywhere by contract.
using CoveringFn = std::function<double(double)>;

// Per probe, the supremum over ordered pairs equals
// max_x <g,x> - min_y <g,y>, so the scan is linear in the cloud size.
// Probe p draws its Gaussian from counters [p*n, (p+1)*n): results are
// bit-identical for any `threads`.
inline MeanWidthEstimate estimate_mean_width(const PointCloud& cloud,
                                             int probes, std::uint64_t seed,
                                             int threads = 1) {
  if (cloud.count() < 2)
    throw DegenerateError(
        "estimate_mean_width: need at least 2 points, got " +
        std::to_string(cloud.count()));
  if (probes < 1)
    throw std::invalid_argument("estimate_mean_width: probes must be >= 1");

  const int n = cloud.dim();
  const std::uint64_t un = static_cast<std::uint64_t>(n);
  std::vector<double> sup(probes);

  // Probes are grouped in blocks so the dot products run as one GEMM.
  constexpr int kBlock = 256;
  const std::size_t blocks = (static_cast<std::size_t>(probes) + kBlock - 1) / kBlock;
  parallel_for(blocks, threads, [&](std::size_t blk) {
    const int first = static_cast<int>(blk) * kBlock;
    const int width = std::min(kBlock, probes - first);
    Matrix g(n, width);
    for (int p = 0; p < width; ++p)
      for (int i = 0; i < n; ++i)
        g(i, p) = rng::gaussian_at(
            seed, rng::stream::kWidthProbe,
            static_cast<std::uint64_t>(first + p) * un + i);
    const Matrix dots = cloud.points.transpose() * g;  // count x width
    for (int p = 0; p < width; ++p)
      sup[first + p] = dots.col(p).maxCoeff() - dots.col(p).minCoeff();
  });

  double mean = 0.0;
  for (double s : sup) mean += s;
  mean /= probes;
  double ss = 0.0;
  for (double s : sup) ss += (s - mean) * (s - mean);
  const double sd = probes > 1 ? std::sqrt(ss / (probes - 1)) : 0.0;

  MeanWidthEstimate est;
  est.value = mean;
  est.std_error = sd / std::sqrt(static_cast<double>(probes));
  est.probes = probes;
  est.cloud_size = cloud.count();
  return est;
}

// Closed-form covering number of a union of L k-dimensional unit balls:
// L*(1 + 2/eps)^k for eps < 1, and 1 otherwise.
inline CoveringBound covering_number_gmm(int L, int k, double eps) {
  if (L < 1 || k < 1)
    throw std::invalid_argument("covering_number_gmm: need L >= 1 and k >= 1");
  if (!(eps > 0.0))
    throw std::invalid_argument("covering_number_gmm: radius must be > 0");
  CoveringBound bound;
  bound.radius = eps;
  bound.source = CoveringSource::GMMFormula;
  bound.value = eps < 1.0 ? L * std::pow(1.0 + 2.0 / eps, k) : 1.0;
  return bound;
}

inline CoveringFn gmm_covering_fn(int L, int k) {
  if (L < 1 || k < 1)
    throw std::invalid_argument("gmm_covering_fn: need L >= 1 and k >= 1");
  return [L, k](double eps) { return covering_number_gmm(L, k, eps).value; };
}

// Width bound for the union-of-L-k-dimensional-components model:
// constant * sqrt(k + ln L). The multiplicative constant is not pinned by
// theory; callers fit it empirically.
inline double mean_width_gmm_bound(int k, int L, double constant = 1.0) {
  if (k < 1 || L < 1)
    throw std::invalid_argument("mean_width_gmm_bound: need k >= 1 and L >= 1");
  if (!(constant > 0.0))
    throw std::invalid_argument("mean_width_gmm_bound: constant must be > 0");
  return constant * std::sqrt(static_cast<double>(k) + std::log(static_cast<double>(L)));
}

inline constexpr int kDudleyDefaultSubintervals = 4000;

// Entropy integral constant * \int_0^radius_max sqrt(log covering(eps)) deps
// by the composite midpoint rule. The integrand has at worst a sqrt-log
// singularity at 0 and a kink where covering drops to 1, so the midpoint
// sum converges as the subinterval count grows; the default resolution sits
// well inside 0.1% of a 10^6-interval evaluation for the closed-form
// covering functions used here.
inline double dudley_bound(const CoveringFn& covering, double radius_max = 2.0,
                           double constant = 1.0,
                           int subintervals = kDudleyDefaultSubintervals) {
  if (!(radius_max > 0.0))
    throw std::invalid_argument("dudley_bound: radius_max must be > 0");
  if (subintervals < 2000)
    throw std::invalid_argument("dudley_bound: subintervals must be >= 2000");
  const double h = radius_max / subintervals;
  double sum = 0.0;
  for (int i = 0; i < subintervals; ++i) {
    const double eps = radius_max * (i + 0.5) / subintervals;
    const double c = covering(eps);
    if (c < 1.0 - 1e-12)
      throw std::invalid_argument(
          "dudley_bound: covering(" + std::to_string(eps) + ") = " +
          std::to_string(c) + " violates covering >= 1");
    const double logc = c > 1.0 ? std::log(c) : 0.0;
    sum += std::sqrt(logc);
  }
  return constant * h * sum;
}

// Net-size / training-set-size estimate exp(constant * width^2 / eps^2).
inline double sudakov_net_size(double width, double eps, double constant = 1.0) {
  if (width < 0.0)
    throw std::invalid_argument("sudakov_net_size: width must be >= 0");
  if (!(eps > 0.0))
    throw std::invalid_argument("sudakov_net_size: eps must be > 0");
  if (!(constant > 0.0))
    throw std::invalid_argument("sudakov_net_size: constant must be > 0");
  return std::exp(constant * width * width / (eps * eps));
}

// One layer of the covering recursion: the image covering at radius eps is
// bounded by the input covering at radius eps / (1 + width/sqrt(m)).
// Composable; width = 0 or m -> infinity gives the identity.
inline CoveringFn layer_covering_recursion(CoveringFn base, double width, int m) {
  if (width < 0.0)
    throw std::invalid_argument("layer_covering_recursion: width must be >= 0");
  if (m < 1)
    throw std::invalid_argument("layer_covering_recursion: m must be >= 1");
  const double factor = 1.0 + width / std::sqrt(static_cast<double>(m));
  return [base = std::move(base), factor](double eps) {
    return base(eps / factor);
  };
}

}  // namespace netembed
