#pragma once

// Zadoff-Chu ranging front end: sequence generation, a sampled delay-plus-noise
// channel per transmitter/beacon link, and correlation-peak range estimation.

#include "eqtri/errors.hpp"
#include "eqtri/types.hpp"

#include <array>
#include <complex>
#include <vector>

namespace eqtri {

using LinkMatrix = Eigen::Matrix<double, 3, 4>;  // (transmitter i, beacon j)

struct SignalParams {
  int K = 151;
  std::array<int, 3> roots{1, 2, 3};
  double sample_period = 1e-6;    // Ts, seconds
  double speed_of_sound = 343.0;  // c, m/s
  LinkMatrix psi = LinkMatrix::Ones();
  LinkMatrix sigma = LinkMatrix::Ones();

  /// Throws NotCoprime for a root sharing a factor with K and
  /// std::invalid_argument for any other violated invariant.
  void validate() const;

  /// Range spanned by one sample, c Ts.
  double range_resolution() const { return speed_of_sound * sample_period; }

  /// Copy with sigma_ij = psi_ij 10^(-snr_db / 20), i.e. per-link SNR psi^2 / sigma^2.
  SignalParams at_snr(double snr_db) const;
};

struct ZcSequence {
  int K = 0;
  int root = 0;
  std::vector<std::complex<double>> symbols;
};

/// Phase phi[k] for a possibly fractional index k.
double zc_phase(int K, int root, double k);

ZcSequence zadoff_chu(int K, int root);

struct Link {
  int transmitter = 0;
  int beacon = 0;
};

struct ReceivedFrame {
  std::vector<std::complex<double>> samples;
  int true_delay = 0;
  Link link;
};

/// Guarded frame length for ranges up to max_range: tau_max + K + 64.
int frame_length(double max_range, const SignalParams& sig);

/// psi_ij s[k - tau] plus circular complex Gaussian noise of total variance
/// sigma_ij^2, tau = round(range / (c Ts)). FrameOverflow if tau + K > length.
ReceivedFrame simulate_link(const ZcSequence& seq, double range_m, const SignalParams& sig, Link link,
                            int length, Rng& rng);

/// Correlates against the conjugate template, takes the magnitude peak and
/// refines it with a 3-point parabola. NoPeak when the peak is below three
/// times the noise floor (RMS correlation magnitude times sqrt(ln #lags),
/// the expected maximum of pure-noise correlations).
double estimate_range(const ReceivedFrame& frame, const ZcSequence& seq, const SignalParams& sig);

/// Periodic autocorrelation magnitude at every lag.
std::vector<double> periodic_autocorrelation(const ZcSequence& seq);

}  // namespace eqtri
