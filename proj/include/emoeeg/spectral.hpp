#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emoeeg/error.hpp"

namespace emoeeg::spectral {

// ---------------------------------------------------------------------------
// FFT
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Twiddle exp(sign * 2*pi*i*k/n) with the angle reduced exactly before the
/// trig call.
inline std::complex<double> twiddle(std::size_t k, std::size_t n, double sign) {
  const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k % n) / static_cast<double>(n);
  return {std::cos(angle), std::sin(angle)};
}

/// In-place iterative radix-2 Cooley-Tukey; n must be a power of two.
inline void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    std::vector<std::complex<double>> w(half);
    for (std::size_t k = 0; k < half; ++k) w[k] = twiddle(k, len, sign);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const auto u = a[i + k];
        const auto v = a[i + k + half] * w[k];
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= static_cast<double>(n);
}

/// Bluestein chirp-z for arbitrary lengths.
inline std::vector<std::complex<double>> fft_bluestein(std::span<const std::complex<double>> x) {
  const std::size_t n = x.size();
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  std::vector<std::complex<double>> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // exp(-i*pi*k^2/n); reduce k^2 mod 2n to keep the angle small.
    const std::size_t k2 = (k * k) % (2 * n);
    const double angle = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
    chirp[k] = {std::cos(angle), std::sin(angle)};
  }
  std::vector<std::complex<double>> a(m), b(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);
  fft_pow2(a, false);
  fft_pow2(b, false);
  for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
  fft_pow2(a, true);
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * chirp[k];
  return out;
}

}  // namespace detail

/// Forward DFT, X[k] = sum_n x[n] exp(-2*pi*i*k*n/N).
inline std::vector<std::complex<double>> fft(std::span<const double> x) {
  std::vector<std::complex<double>> a(x.begin(), x.end());
  if (a.empty()) return a;
  if (detail::is_pow2(a.size())) {
    detail::fft_pow2(a, false);
    return a;
  }
  return detail::fft_bluestein(a);
}

// ---------------------------------------------------------------------------
// Estimator types
// ---------------------------------------------------------------------------

enum class Window { hann_periodic, rectangular };

struct WelchParams {
  std::size_t segment_len = 256;
  std::size_t overlap = 128;
  Window window = Window::hann_periodic;
  double sample_rate_hz = 128.0;

  /// Throws unless the parameters are usable on a signal of `signal_len` samples.
  void validate(std::size_t signal_len) const {
    if (segment_len < 2 || segment_len % 2 != 0)
      throw Error(Errc::invalid_argument, "welch: segment_len must be even and >= 2");
    if (overlap >= segment_len)
      throw Error(Errc::invalid_argument, "welch: overlap must be smaller than segment_len");
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz))
      throw Error(Errc::invalid_argument, "welch: sample rate must be positive");
    if (segment_len > signal_len)
      throw Error(Errc::invalid_argument, "welch: signal shorter than one segment (" +
                                              std::to_string(signal_len) + " < " +
                                              std::to_string(segment_len) + ")");
  }

  friend bool operator==(const WelchParams&, const WelchParams&) = default;
};

/// One-sided PSD on the grid 0, df, ..., fs/2 with df = fs / segment_len.
struct PsdEstimate {
  std::vector<double> freqs;
  std::vector<double> power;
  WelchParams params;
  std::size_t n_segments_averaged = 0;

  double df() const { return params.sample_rate_hz / static_cast<double>(params.segment_len); }
  double total_power() const {
    double acc = 0.0;
    for (double p : power) acc += p;
    return acc * df();
  }
};

/// Frequency band on the half-open interval [low_hz, high_hz).
struct BandDef {
  std::string name;
  double low_hz = 0.0;
  double high_hz = 0.0;

  friend bool operator==(const BandDef&, const BandDef&) = default;
};

inline const std::array<BandDef, 4>& canonical_bands() {
  static const std::array<BandDef, 4> bands{{
      {"theta", 4.0, 8.0},
      {"alpha", 8.0, 12.0},
      {"beta", 12.0, 30.0},
      {"gamma", 30.0, 64.0},
  }};
  return bands;
}

inline const BandDef& band_by_name(std::string_view name) {
  for (const auto& b : canonical_bands())
    if (b.name == name) return b;
  throw Error(Errc::invalid_argument, "unknown band '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Periodic (DFT-even) Hann window: w[k] = 0.5 * (1 - cos(2*pi*k/n)).
inline std::vector<double> hann_window(std::size_t n) {
  if (n < 2) throw Error(Errc::invalid_argument, "hann_window: length must be >= 2");
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k)
    w[k] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n)));
  return w;
}

inline std::vector<double> make_window(Window kind, std::size_t n) {
  if (kind == Window::rectangular) return std::vector<double>(n, 1.0);
  return hann_window(n);
}

namespace detail {

/// Adds the one-sided modified periodogram of `segment` into `acc`.
inline void accumulate_periodogram(std::span<const double> segment, std::span<const double> window,
                                   double fs, double window_energy, std::span<double> acc) {
  const std::size_t n = segment.size();
  std::vector<double> tapered(n);
  for (std::size_t i = 0; i < n; ++i) tapered[i] = segment[i] * window[i];
  const auto spectrum = fft(tapered);
  const double scale = 1.0 / (fs * window_energy);
  const std::size_t half = n / 2;
  for (std::size_t k = 0; k <= half; ++k) {
    double p = std::norm(spectrum[k]) * scale;
    if (k != 0 && k != half) p *= 2.0;
    acc[k] += p;
  }
}

inline std::vector<double> freq_grid(std::size_t segment_len, double fs) {
  std::vector<double> f(segment_len / 2 + 1);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = static_cast<double>(k) * fs / static_cast<double>(segment_len);
  return f;
}

}  // namespace detail

/// One-sided modified periodogram P[k] = |DFT(w*x)[k]|^2 / (fs * sum w^2),
/// interior bins doubled. Segment length must be even.
inline PsdEstimate periodogram(std::span<const double> segment, std::span<const double> window, double fs) {
  if (segment.size() != window.size())
    throw Error(Errc::dimension_mismatch, "periodogram: segment and window lengths differ");
  if (segment.size() < 2 || segment.size() % 2 != 0)
    throw Error(Errc::invalid_argument, "periodogram: segment length must be even and >= 2");
  if (!(fs > 0.0)) throw Error(Errc::invalid_argument, "periodogram: sample rate must be positive");
  double energy = 0.0;
  for (double w : window) energy += w * w;
  if (!(energy > 0.0)) throw Error(Errc::invalid_argument, "periodogram: window has zero energy");

  PsdEstimate out;
  out.params.segment_len = segment.size();
  out.params.overlap = 0;
  out.params.sample_rate_hz = fs;
  out.freqs = detail::freq_grid(segment.size(), fs);
  out.power.assign(out.freqs.size(), 0.0);
  detail::accumulate_periodogram(segment, window, fs, energy, out.power);
  out.n_segments_averaged = 1;
  return out;
}

/// Welch PSD: mean of modified periodograms over segments starting every
/// (segment_len - overlap) samples. Trailing samples that do not fill a
/// segment are dropped.
inline PsdEstimate welch_psd(std::span<const double> signal, const WelchParams& params) {
  params.validate(signal.size());
  const auto window = make_window(params.window, params.segment_len);
  double energy = 0.0;
  for (double w : window) energy += w * w;

  const std::size_t step = params.segment_len - params.overlap;
  const std::size_t n_segments = (signal.size() - params.segment_len) / step + 1;

  PsdEstimate out;
  out.params = params;
  out.freqs = detail::freq_grid(params.segment_len, params.sample_rate_hz);
  out.power.assign(out.freqs.size(), 0.0);
  for (std::size_t s = 0; s < n_segments; ++s)
    detail::accumulate_periodogram(signal.subspan(s * step, params.segment_len), window,
                                   params.sample_rate_hz, energy, out.power);
  if (n_segments > 1)
    for (double& p : out.power) p /= static_cast<double>(n_segments);
  out.n_segments_averaged = n_segments;
  return out;
}

/// Rectangular integration sum P[k]*df over bins with low <= f[k] < high.
inline double band_power(const PsdEstimate& psd, const BandDef& band) {
  if (psd.freqs.empty()) throw Error(Errc::invalid_argument, "band_power: empty PSD");
  const double nyquist = psd.freqs.back();
  if (!(band.low_hz >= 0.0) || !(band.high_hz > band.low_hz) || band.high_hz > nyquist)
    throw Error(Errc::invalid_argument, "band_power: band '" + band.name + "' outside [0, " +
                                            std::to_string(nyquist) + "] Hz");
  double acc = 0.0;
  for (std::size_t k = 0; k < psd.freqs.size(); ++k)
    if (psd.freqs[k] >= band.low_hz && psd.freqs[k] < band.high_hz) acc += psd.power[k];
  return acc * psd.df();
}

}  // namespace emoeeg::spectral
