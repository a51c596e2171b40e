#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "chaoslab/rng.hpp"

namespace chaoslab {

/// Thread count from CHAOSLAB_THREADS, falling back to hardware concurrency.
std::size_t default_thread_count();

namespace detail {
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);
}

/// Runs task(replica, plan) for replica = 0..R-1 on a pool of `threads`
/// workers. Output slot i is written only by replica i, so the result does
/// not depend on scheduling. A throwing replica is reported as ReplicaError
/// naming the lowest failing index.
template <typename Task>
auto run_replicas(Task&& task, std::size_t replicas, const SeedPlan& plan, std::size_t threads)
    -> std::vector<decltype(task(std::size_t{}, plan))> {
  using T = decltype(task(std::size_t{}, plan));
  std::vector<T> out(replicas);
  detail::parallel_for(replicas, threads, [&](std::size_t i) { out[i] = task(i, plan); });
  return out;
}

/// Streaming count/mean/variance/min/max (Welford update, Chan merge).
class SummaryStats {
 public:
  void add(double x) noexcept;
  void merge(const SummaryStats& other) noexcept;

  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Unbiased sample variance; 0 for fewer than two samples.
  double variance() const noexcept;
  double stddev() const noexcept;
  double stderr_mean() const noexcept;
  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
};

struct MomentEstimate {
  double estimate;
  double stderr_est;
  std::array<double, 2> ci95;
};

/// Mean of |s|^p with CLT standard error.
MomentEstimate lp_moment(std::span<const std::complex<double>> samples, double p);
MomentEstimate lp_moment(std::span<const double> samples, double p);

struct DecayPoint {
  double l;
  double estimate;
  double stderr_est;
};

struct DecayFit {
  double slope;
  double intercept;
  std::array<double, 2> slope_ci95;
};

/// Weighted least squares of log(estimate) on l with sigma_i = stderr_i / estimate_i;
/// unit weights when every stderr is zero. The slope interval is scaled by
/// the residual variance with a Student-t quantile on n - 2 degrees of freedom.
DecayFit decay_fit(std::span<const DecayPoint> points);

/// Sample quantile, linear interpolation between order statistics (type 7).
double quantile(std::vector<double> values, double q);

}  // namespace chaoslab
