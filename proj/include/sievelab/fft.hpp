#pragma once

#include <complex>
#include <vector>

namespace sievelab::fft {

// Unnormalized in-place transforms of arbitrary length (FFTW backend,
// cached plans).  forward computes sum_n x_n e(-2pi i kn/N), backward
// the conjugate sum.  Execution is thread-safe on distinct buffers.
void forward(std::vector<std::complex<double>>& data);
void backward(std::vector<std::complex<double>>& data);

}  // namespace sievelab::fft
