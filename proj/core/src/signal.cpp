#include "eqtri/signal.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace eqtri {

void SignalParams::validate() const {
  if (K < 2) throw std::invalid_argument("sequence length K must be at least 2");
  for (const int r : roots) {
    if (r <= 0) throw std::invalid_argument("Zadoff-Chu roots must be positive");
    if (std::gcd(r, K) != 1) {
      throw NotCoprime("root " + std::to_string(r) + " is not coprime with K = " + std::to_string(K));
    }
  }
  if (!(sample_period > 0.0) || !(speed_of_sound > 0.0)) {
    throw std::invalid_argument("sample period and speed of sound must be positive");
  }
  if (!(psi.array() > 0.0).all() || !(sigma.array() > 0.0).all() || !psi.allFinite() || !sigma.allFinite()) {
    throw std::invalid_argument("attenuation and noise levels must be positive and finite");
  }
}

SignalParams SignalParams::at_snr(double snr_db) const {
  SignalParams out = *this;
  out.sigma = psi * std::pow(10.0, -snr_db / 20.0);
  return out;
}

double zc_phase(int K, int root, double k) {
  const double base = std::numbers::pi * root / K;
  return (K % 2 == 1) ? base * k * (k + 1.0) : base * k * k;
}

ZcSequence zadoff_chu(int K, int root) {
  if (K < 2) throw std::invalid_argument("sequence length K must be at least 2");
  if (std::gcd(root, K) != 1) {
    throw NotCoprime("root " + std::to_string(root) + " is not coprime with K = " + std::to_string(K));
  }
  ZcSequence seq{K, root, {}};
  seq.symbols.reserve(K);
  for (int k = 0; k < K; ++k) {
    // k(k+1) and k^2 grow past 2^53 only for absurd K; reduce modulo 2K first.
    const long long kk = (K % 2 == 1) ? (static_cast<long long>(k) * (k + 1)) % (2LL * K)
                                      : (static_cast<long long>(k) * k) % (2LL * K);
    const double phi = std::numbers::pi * root * static_cast<double>(kk) / K;
    seq.symbols.emplace_back(std::cos(phi), std::sin(phi));
  }
  return seq;
}

int frame_length(double max_range, const SignalParams& sig) {
  return static_cast<int>(std::lround(max_range / sig.range_resolution())) + sig.K + 64;
}

ReceivedFrame simulate_link(const ZcSequence& seq, double range_m, const SignalParams& sig, Link link,
                            int length, Rng& rng) {
  if (!(range_m > 0.0)) throw std::invalid_argument("range must be positive");
  const long tau = std::lround(range_m / sig.range_resolution());
  if (tau + seq.K > length) {
    throw FrameOverflow("delay " + std::to_string(tau) + " does not fit a frame of " +
                        std::to_string(length) + " samples");
  }
  const double psi = sig.psi(link.transmitter, link.beacon);
  const double sigma = sig.sigma(link.transmitter, link.beacon);

  ReceivedFrame frame;
  frame.true_delay = static_cast<int>(tau);
  frame.link = link;
  frame.samples.assign(length, {0.0, 0.0});
  for (int k = 0; k < seq.K; ++k) {
    frame.samples[tau + k] = psi * seq.symbols[k];
  }
  if (sigma > 0.0) {
    std::normal_distribution<double> normal(0.0, sigma / std::sqrt(2.0));
    for (auto& s : frame.samples) {
      const double re = normal(rng);
      const double im = normal(rng);
      s += std::complex<double>(re, im);
    }
  }
  return frame;
}

namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
// FFTW_ESTIMATE keeps the plan, and so every rounding, reproducible.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(std::complex<double>* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<std::complex<double>[], FftwFree>;

FftwBuffer fftw_buffer(int n) {
  return FftwBuffer(static_cast<std::complex<double>*>(fftw_malloc(sizeof(std::complex<double>) * n)));
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

/// Per-thread buffers and plans for one transform length, plus the
/// conjugated spectra of the templates seen so far.
struct FftWorkspace {
  explicit FftWorkspace(int n) : n(n), time(fftw_buffer(n)), freq(fftw_buffer(n)) {
    std::lock_guard lock(planner_mutex());
    forward = fftw_plan_dft_1d(n, as_fftw(time.get()), as_fftw(freq.get()), FFTW_FORWARD, FFTW_ESTIMATE);
    inverse = fftw_plan_dft_1d(n, as_fftw(freq.get()), as_fftw(time.get()), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~FftWorkspace() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(inverse);
  }
  FftWorkspace(const FftWorkspace&) = delete;
  FftWorkspace& operator=(const FftWorkspace&) = delete;

  /// conj(FFT(s)) / n, so the backward transform needs no rescaling.
  const std::vector<std::complex<double>>& template_spectrum(const ZcSequence& seq) {
    for (const auto& [symbols, spectrum] : templates) {
      if (symbols == seq.symbols) return spectrum;
    }
    std::fill(time.get(), time.get() + n, std::complex<double>{0.0, 0.0});
    std::copy(seq.symbols.begin(), seq.symbols.end(), time.get());
    fftw_execute(forward);
    std::vector<std::complex<double>> spectrum(n);
    for (int k = 0; k < n; ++k) spectrum[k] = std::conj(freq.get()[k]) / static_cast<double>(n);
    templates.emplace_back(seq.symbols, std::move(spectrum));
    return templates.back().second;
  }

  int n;
  FftwBuffer time, freq;
  fftw_plan forward = nullptr, inverse = nullptr;
  std::vector<std::pair<std::vector<std::complex<double>>, std::vector<std::complex<double>>>> templates;
};

FftWorkspace& workspace(int n) {
  thread_local std::map<int, std::unique_ptr<FftWorkspace>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<FftWorkspace>(n);
  return *slot;
}

}  // namespace

double estimate_range(const ReceivedFrame& frame, const ZcSequence& seq, const SignalParams& sig) {
  const int n_lags = static_cast<int>(frame.samples.size()) - seq.K + 1;
  if (n_lags < 3) throw NoPeak("frame shorter than the sequence");

  // Cross-correlation through a zero-padded FFT; the padding keeps the
  // circular wrap away from the lags we read.
  const int length = static_cast<int>(frame.samples.size());
  int n_fft = 1;
  while (n_fft < length + seq.K) n_fft <<= 1;
  FftWorkspace& ws = workspace(n_fft);
  const std::vector<std::complex<double>>& fs = ws.template_spectrum(seq);
  std::copy(frame.samples.begin(), frame.samples.end(), ws.time.get());
  std::fill(ws.time.get() + length, ws.time.get() + n_fft, std::complex<double>{0.0, 0.0});
  fftw_execute(ws.forward);
  for (int k = 0; k < n_fft; ++k) ws.freq.get()[k] *= fs[k];
  fftw_execute(ws.inverse);
  const std::complex<double>* corr = ws.time.get();

  std::vector<double> mag(n_lags);
  double power = 0.0;
  for (int lag = 0; lag < n_lags; ++lag) {
    const double p = std::norm(corr[lag]);
    mag[lag] = std::sqrt(p);
    power += p;
  }

  const auto peak_it = std::max_element(mag.begin(), mag.end());
  const int peak = static_cast<int>(peak_it - mag.begin());
  const double floor = std::sqrt(power / n_lags) * std::sqrt(std::log(static_cast<double>(n_lags)));
  if (!(*peak_it >= 3.0 * floor)) {
    throw NoPeak("correlation peak " + std::to_string(*peak_it) + " below 3x noise floor " +
                 std::to_string(floor));
  }

  double offset = 0.0;
  if (peak > 0 && peak < n_lags - 1) {
    const double l = mag[peak - 1], c = mag[peak], r = mag[peak + 1];
    const double denom = l - 2.0 * c + r;
    if (denom < 0.0) offset = std::clamp(0.5 * (l - r) / denom, -0.5, 0.5);
  }
  return (peak + offset) * sig.range_resolution();
}

std::vector<double> periodic_autocorrelation(const ZcSequence& seq) {
  std::vector<double> out(seq.K);
  for (int lag = 0; lag < seq.K; ++lag) {
    std::complex<double> acc{0.0, 0.0};
    for (int k = 0; k < seq.K; ++k) {
      acc += seq.symbols[(k + lag) % seq.K] * std::conj(seq.symbols[k]);
    }
    out[lag] = std::abs(acc);
  }
  return out;
}

}  // namespace eqtri
