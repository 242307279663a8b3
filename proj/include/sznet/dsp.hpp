// Copyright 2026 The sznet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "sznet/error.hpp"
#include "sznet/recording.hpp"

namespace sznet {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using ComplexVectorX = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

struct Band {
  double low_hz = 0.0;
  double high_hz = 0.0;
};

inline constexpr std::size_t kNumBands = 7;
using BandSet = std::array<Band, kNumBands>;

// delta, theta, alpha, low beta, high beta, low gamma, high gamma.
inline constexpr BandSet kDefaultBands = {{{0.5, 4.0},
                                           {4.0, 7.0},
                                           {7.0, 13.0},
                                           {13.0, 15.0},
                                           {15.0, 30.0},
                                           {30.0, 45.0},
                                           {45.0, 70.0}}};

inline constexpr Eigen::Index kDefaultNumTaps = 501;

// Strictly increasing, positive-width bands whose interiors do not overlap.
void validate_bands(const BandSet& bands);

template <typename Scalar>
struct FirKernel {
  Band band;
  Scalar sample_rate_hz = 0;
  VectorX<Scalar> taps;

  Eigen::Index group_delay() const { return (taps.size() - 1) / 2; }
};

namespace detail {

template <typename Scalar>
Scalar sinc(Scalar x) {
  if (x == Scalar(0)) return Scalar(1);
  const Scalar px = std::numbers::pi_v<Scalar> * x;
  return std::sin(px) / px;
}

// Hamming-windowed sinc low-pass normalised to unit DC gain.
template <typename Scalar>
VectorX<Scalar> windowed_lowpass(Scalar cutoff_hz, Scalar fs, Eigen::Index num_taps) {
  VectorX<Scalar> h(num_taps);
  if (cutoff_hz <= Scalar(0)) {
    h.setZero();
    return h;
  }
  const Scalar fc = Scalar(2) * cutoff_hz / fs;
  const Scalar mid = Scalar(num_taps - 1) / Scalar(2);
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  for (Eigen::Index n = 0; n < num_taps; ++n) {
    const Scalar window =
        Scalar(0.54) - Scalar(0.46) * std::cos(two_pi * Scalar(n) / Scalar(num_taps - 1));
    h[n] = fc * sinc(fc * (Scalar(n) - mid)) * window;
  }
  return h / h.sum();
}

}  // namespace detail

// Linear-phase band-pass built as the difference of two unit-DC low-passes,
// so the DC gain is zero whenever low_hz > 0.
template <typename Scalar = double>
FirKernel<Scalar> design_bandpass(const Band& band, Scalar sample_rate_hz,
                                  Eigen::Index num_taps = kDefaultNumTaps) {
  if (!(sample_rate_hz > Scalar(0))) {
    throw ValidationError("sample rate must be positive");
  }
  if (num_taps < 3 || num_taps % 2 == 0) {
    throw ValidationError("number of taps must be odd and >= 3");
  }
  if (!(band.low_hz >= 0.0) || !(band.low_hz < band.high_hz)) {
    throw ValidationError("band edges must satisfy 0 <= low < high");
  }
  if (!(band.high_hz < static_cast<double>(sample_rate_hz) / 2.0)) {
    throw ValidationError("band (" + std::to_string(band.low_hz) + ", " +
                          std::to_string(band.high_hz) +
                          ") Hz lies above the Nyquist frequency " +
                          std::to_string(static_cast<double>(sample_rate_hz) / 2.0) +
                          " Hz");
  }
  FirKernel<Scalar> k;
  k.band = band;
  k.sample_rate_hz = sample_rate_hz;
  k.taps = detail::windowed_lowpass(Scalar(band.high_hz), sample_rate_hz, num_taps) -
           detail::windowed_lowpass(Scalar(band.low_hz), sample_rate_hz, num_taps);
  return k;
}

// Zero-phase FIR filtering: reflection-pad by the group delay, then take the
// centred part of the full convolution. Output has the input's length.
template <typename Derived, typename Scalar = typename Derived::Scalar>
VectorX<Scalar> filter_signal(const Eigen::MatrixBase<Derived>& signal,
                              const FirKernel<Scalar>& kernel) {
  const Eigen::Index n = signal.size();
  const Eigen::Index taps = kernel.taps.size();
  if (n <= taps) {
    throw ValidationError("signal of length " + std::to_string(n) +
                          " is not longer than the " + std::to_string(taps) +
                          "-tap kernel");
  }
  const Eigen::Index d = kernel.group_delay();
  VectorX<Scalar> padded(n + 2 * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    padded[i] = signal(d - i);
    padded[n + d + i] = signal(n - 2 - i);
  }
  padded.segment(d, n) = signal.derived().reshaped();
  // Symmetric taps: correlation and convolution coincide.
  VectorX<Scalar> out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i] = padded.segment(i, taps).dot(kernel.taps);
  }
  return out;
}

// x + iH{x} via the frequency domain: zero negative frequencies, double the
// positive ones, keep DC and Nyquist. The real part is the input verbatim.
template <typename Derived, typename Scalar = typename Derived::Scalar>
ComplexVectorX<Scalar> analytic_signal(const Eigen::MatrixBase<Derived>& signal) {
  const Eigen::Index n = signal.size();
  ComplexVectorX<Scalar> out(n);
  if (n == 0) return out;
  std::vector<Scalar> in(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) in[static_cast<std::size_t>(i)] = signal(i);
  Eigen::FFT<Scalar> fft;
  std::vector<std::complex<Scalar>> spec;
  fft.fwd(spec, in);
  const Eigen::Index half = n / 2;
  for (Eigen::Index k = 1; k < n; ++k) {
    if (n % 2 == 0 && k == half) continue;
    spec[static_cast<std::size_t>(k)] *= (k <= half) ? Scalar(2) : Scalar(0);
  }
  std::vector<std::complex<Scalar>> time;
  fft.inv(time, spec);
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i] = {signal(i), time[static_cast<std::size_t>(i)].imag()};
  }
  return out;
}

template <typename Scalar>
struct PhaseSeries {
  VectorX<Scalar> phase;                  // (-pi, pi]
  std::vector<Eigen::Index> degenerate;   // samples with zero modulus, phase 0
};

template <typename Derived>
PhaseSeries<typename Derived::Scalar::value_type> instantaneous_phase(
    const Eigen::MatrixBase<Derived>& analytic) {
  using Scalar = typename Derived::Scalar::value_type;
  PhaseSeries<Scalar> out;
  out.phase.resize(analytic.size());
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    const auto z = analytic(i);
    if (z.real() == Scalar(0) && z.imag() == Scalar(0)) {
      out.phase[i] = Scalar(0);
      out.degenerate.push_back(i);
      continue;
    }
    const Scalar p = std::atan2(z.imag(), z.real());
    out.phase[i] = p <= -std::numbers::pi_v<Scalar> ? std::numbers::pi_v<Scalar> : p;
  }
  return out;
}

template <typename Scalar>
struct Spectrum {
  VectorX<Scalar> frequency_hz;
  VectorX<Scalar> power;  // |DFT|^2 / length, bins 0..floor(length/2)
};

template <typename Derived, typename Scalar = typename Derived::Scalar>
Spectrum<Scalar> periodogram(const Eigen::MatrixBase<Derived>& signal,
                             Scalar sample_rate_hz) {
  const Eigen::Index n = signal.size();
  if (n < 2) throw ValidationError("periodogram needs at least two samples");
  std::vector<Scalar> in(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) in[static_cast<std::size_t>(i)] = signal(i);
  Eigen::FFT<Scalar> fft;
  std::vector<std::complex<Scalar>> spec;
  fft.fwd(spec, in);
  const Eigen::Index bins = n / 2 + 1;
  Spectrum<Scalar> out;
  out.frequency_hz.resize(bins);
  out.power.resize(bins);
  for (Eigen::Index k = 0; k < bins; ++k) {
    out.frequency_hz[k] = Scalar(k) * sample_rate_hz / Scalar(n);
    out.power[k] = std::norm(spec[static_cast<std::size_t>(k)]) / Scalar(n);
  }
  return out;
}

inline constexpr double kLogPowerFloor = 1e-12;

// ln(mean power over bins centred in [low, high) + floor), one entry per band.
template <typename Scalar>
Eigen::Matrix<Scalar, kNumBands, 1> band_log_power(const Spectrum<Scalar>& spectrum,
                                                   const BandSet& bands) {
  Eigen::Matrix<Scalar, kNumBands, 1> out;
  for (std::size_t b = 0; b < kNumBands; ++b) {
    Scalar sum = 0;
    Eigen::Index count = 0;
    for (Eigen::Index k = 0; k < spectrum.power.size(); ++k) {
      const double f = static_cast<double>(spectrum.frequency_hz[k]);
      if (f >= bands[b].low_hz && f < bands[b].high_hz) {
        sum += spectrum.power[k];
        ++count;
      }
    }
    if (count == 0) {
      throw ValidationError("band (" + std::to_string(bands[b].low_hz) + ", " +
                            std::to_string(bands[b].high_hz) +
                            ") Hz contains no spectrum bins");
    }
    out[static_cast<Eigen::Index>(b)] =
        std::log(sum / Scalar(count) + Scalar(kLogPowerFloor));
  }
  return out;
}

// Instantaneous phases of a whole recording, one channels x length matrix per
// band. Filtering the full recording keeps the delta band well posed; callers
// slice epochs out afterwards.
struct BandPhases {
  std::vector<SampleMatrix> phase;
  std::size_t degenerate_samples = 0;
};

BandPhases band_phases(const Recording& recording, const BandSet& bands,
                       Eigen::Index num_taps = kDefaultNumTaps);

}  // namespace sznet
