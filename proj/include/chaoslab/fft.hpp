#pragma once

#include <complex>
#include <span>

// Thin wrapper over FFTW. Plans are created once per size (FFTW_ESTIMATE, so
// the chosen algorithm does not depend on timing) and executed on
// thread-local aligned scratch buffers; results are therefore bitwise
// reproducible across runs and thread counts.
namespace chaoslab::fft {

/// out[j] = Re sum_{k < coeffs.size()} coeffs[k] exp(2 pi i k j / N), N = out.size().
/// N must be a power of two and coeffs.size() <= N/2.
void real_synthesis(std::span<const std::complex<double>> coeffs, std::span<double> out);

enum class Direction { forward, backward };

/// Unnormalized in-place complex DFT; forward uses exp(-2 pi i k j / N).
void complex_dft(std::span<std::complex<double>> data, Direction dir);

}  // namespace chaoslab::fft
