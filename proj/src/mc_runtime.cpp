#include "chaoslab/mc_runtime.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "chaoslab/errors.hpp"

namespace chaoslab {

std::size_t default_thread_count() {
  if (const char* env = std::getenv("CHAOSLAB_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body) {
  if (count == 0) throw DomainError("run_replicas: replica count must be at least 1");
  threads = std::max<std::size_t>(1, std::min(threads, count));
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::size_t err_index = std::numeric_limits<std::size_t>::max();
  std::string err_text;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (const std::exception& e) {
        std::lock_guard lock(err_mutex);
        if (i < err_index) {
          err_index = i;
          err_text = e.what();
        }
      } catch (...) {
        std::lock_guard lock(err_mutex);
        if (i < err_index) {
          err_index = i;
          err_text = "unknown exception";
        }
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (err_index != std::numeric_limits<std::size_t>::max()) throw ReplicaError(err_index, err_text);
}

}  // namespace detail

void SummaryStats::add(double x) noexcept {
  if (n_ == 0) {
    min_ = max_ = x;
  } else {
    min_ = std::min(min_, x);
    max_ = std::max(max_, x);
  }
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

void SummaryStats::merge(const SummaryStats& o) noexcept {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double d = o.mean_ - mean_;
  mean_ = (na * mean_ + nb * o.mean_) / n;
  m2_ += o.m2_ + d * d * na * nb / n;
  n_ += o.n_;
  min_ = std::min(min_, o.min_);
  max_ = std::max(max_, o.max_);
}

double SummaryStats::variance() const noexcept {
  return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
}

double SummaryStats::stddev() const noexcept { return std::sqrt(variance()); }

double SummaryStats::stderr_mean() const noexcept {
  return n_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

namespace {

MomentEstimate moment_from(const SummaryStats& s) {
  const double se = s.stderr_mean();
  return {s.mean(), se, {s.mean() - 1.96 * se, s.mean() + 1.96 * se}};
}

}  // namespace

MomentEstimate lp_moment(std::span<const std::complex<double>> samples, double p) {
  if (samples.empty()) throw DomainError("lp_moment: samples must be nonempty");
  if (!(p > 0.0)) throw DomainError("lp_moment: p must be positive");
  SummaryStats s;
  for (const auto& z : samples) s.add(std::pow(std::abs(z), p));
  return moment_from(s);
}

MomentEstimate lp_moment(std::span<const double> samples, double p) {
  if (samples.empty()) throw DomainError("lp_moment: samples must be nonempty");
  if (!(p > 0.0)) throw DomainError("lp_moment: p must be positive");
  SummaryStats s;
  for (double x : samples) s.add(std::pow(std::abs(x), p));
  return moment_from(s);
}

DecayFit decay_fit(std::span<const DecayPoint> points) {
  const std::size_t n = points.size();
  if (n < 3) throw DomainError("decay_fit: at least 3 points are required");
  std::vector<double> x(n), y(n), w(n);
  bool any_sigma = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(points[i].estimate > 0.0))
      throw DomainError("decay_fit: estimate at l = " + std::to_string(points[i].l) + " is not positive");
    x[i] = points[i].l;
    y[i] = std::log(points[i].estimate);
    if (points[i].stderr_est > 0.0) any_sigma = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!any_sigma) {
      w[i] = 1.0;
      continue;
    }
    const double sigma = points[i].stderr_est / points[i].estimate;
    if (!(sigma > 0.0)) throw DomainError("decay_fit: mixed zero and nonzero standard errors");
    w[i] = 1.0 / (sigma * sigma);
  }
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double xm = sx / sw, ym = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (x[i] - xm) * (x[i] - xm);
    sxy += w[i] * (x[i] - xm) * (y[i] - ym);
  }
  if (!(sxx > 0.0)) throw DomainError("decay_fit: abscissae must not all coincide");
  const double slope = sxy / sxx;
  const double intercept = ym - slope * xm;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - intercept - slope * x[i];
    rss += w[i] * r * r;
  }
  const double dof = static_cast<double>(n - 2);
  const double se = std::sqrt(rss / dof / sxx);
  const boost::math::students_t dist(dof);
  const double tq = boost::math::quantile(dist, 0.975);
  return {slope, intercept, {slope - tq * se, slope + tq * se}};
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("quantile: values must be nonempty");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile: q must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

}  // namespace chaoslab
