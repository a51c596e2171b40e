#include "chaoslab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "chaoslab/errors.hpp"

namespace chaoslab::fft {

namespace {

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <typename T>
using AlignedBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
AlignedBuffer<T> aligned(std::size_t n) {
  return AlignedBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * n)));
}

enum class Kind { c2r, forward, backward };

std::mutex planner_mutex;

// Plans live for the whole process. The planner is not thread safe, the
// new-array execute functions are.
fftw_plan get_plan(Kind kind, int n) {
  static std::map<std::pair<Kind, int>, fftw_plan> plans;
  std::lock_guard lock(planner_mutex);
  const auto key = std::make_pair(kind, n);
  if (auto it = plans.find(key); it != plans.end()) return it->second;
  fftw_plan plan = nullptr;
  if (kind == Kind::c2r) {
    auto in = aligned<fftw_complex>(static_cast<std::size_t>(n / 2 + 1));
    auto out = aligned<double>(static_cast<std::size_t>(n));
    plan = fftw_plan_dft_c2r_1d(n, in.get(), out.get(), FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
  } else {
    auto buf = aligned<fftw_complex>(static_cast<std::size_t>(n));
    plan = fftw_plan_dft_1d(n, buf.get(), buf.get(),
                            kind == Kind::forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw Error("fftw: failed to create plan of size " + std::to_string(n));
  plans.emplace(key, plan);
  return plan;
}

struct Scratch {
  AlignedBuffer<fftw_complex> spectrum;
  AlignedBuffer<double> real;
  AlignedBuffer<fftw_complex> complex;
};

Scratch& scratch(Kind kind, int n) {
  thread_local std::map<std::pair<Kind, int>, Scratch> buffers;
  auto& s = buffers[{kind, n}];
  if (kind == Kind::c2r && !s.spectrum) {
    s.spectrum = aligned<fftw_complex>(static_cast<std::size_t>(n / 2 + 1));
    s.real = aligned<double>(static_cast<std::size_t>(n));
  } else if (kind != Kind::c2r && !s.complex) {
    s.complex = aligned<fftw_complex>(static_cast<std::size_t>(n));
  }
  return s;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

void real_synthesis(std::span<const std::complex<double>> coeffs, std::span<double> out) {
  const std::size_t n = out.size();
  if (!is_power_of_two(n) || n < 2) throw DomainError("real_synthesis: size must be a power of two");
  if (coeffs.size() > n / 2) throw DomainError("real_synthesis: too many coefficients for the grid");
  const int ni = static_cast<int>(n);
  fftw_plan plan = get_plan(Kind::c2r, ni);
  Scratch& s = scratch(Kind::c2r, ni);
  fftw_complex* spec = s.spectrum.get();
  for (std::size_t k = 0; k <= n / 2; ++k) spec[k][0] = spec[k][1] = 0.0;
  if (!coeffs.empty()) spec[0][0] = coeffs[0].real();
  for (std::size_t k = 1; k < coeffs.size(); ++k) {
    spec[k][0] = 0.5 * coeffs[k].real();
    spec[k][1] = 0.5 * coeffs[k].imag();
  }
  fftw_execute_dft_c2r(plan, spec, s.real.get());
  std::copy(s.real.get(), s.real.get() + n, out.begin());
}

void complex_dft(std::span<std::complex<double>> data, Direction dir) {
  const std::size_t n = data.size();
  if (!is_power_of_two(n)) throw DomainError("complex_dft: size must be a power of two");
  const Kind kind = dir == Direction::forward ? Kind::forward : Kind::backward;
  const int ni = static_cast<int>(n);
  fftw_plan plan = get_plan(kind, ni);
  Scratch& s = scratch(kind, ni);
  fftw_complex* buf = s.complex.get();
  for (std::size_t i = 0; i < n; ++i) {
    buf[i][0] = data[i].real();
    buf[i][1] = data[i].imag();
  }
  fftw_execute_dft(plan, buf, buf);
  for (std::size_t i = 0; i < n; ++i) data[i] = {buf[i][0], buf[i][1]};
}

}  // namespace chaoslab::fft
