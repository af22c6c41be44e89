#pragma once

// Gaussian-approximation performance model of the block decision-feedback
// detector: post-whitening SNR per symbol, the M-PSK SER integral, frame
// BER, the high-SNR closed form, the multipath diversity bound and the
// operation-count polynomials of the compared detectors.

#include <cstddef>
#include <string_view>

#include "equalab/channel.hpp"
#include "equalab/numerics.hpp"

namespace equalab {

struct SerModel {
  int M;
  double g_psk;  // sin^2(pi / M)
  explicit SerModel(int order);
};

struct EffectiveScalarChannel {
  double xi;         // ||Psi_k j_k||^2
  double noise_var;  // variance of the whitened, matched noise; equals xi
  double gamma;      // xi^2 / noise_var = xi
};

inline constexpr std::size_t kSerQuadratureNodes = 64;

/// Number of leading symbols the frame average runs over (N - Lf + 2,
/// capped at N). Assumes perfect feedback.
std::size_t averaged_symbols(std::size_t N, std::size_t lf);

/// j_k^H Lambda_k^{-1} j_k for 0-based symbol k < averaged_symbols(N, Lf).
double gamma_k(const ChannelMatrix& h, std::size_t k, std::size_t lf, double sigma2);

/// The same quantity through the pre-whitening filter Psi_k = Lambda_k^{-1/2}.
EffectiveScalarChannel whitened_channel(const ChannelMatrix& h, std::size_t k, std::size_t lf,
                                        double sigma2);

/// (1 / (sigma2 Lf)) * sum_{i <= min(Lf-1, L-1)} |h_i(t)|^2
double gamma_high_snr(const CVec& taps_at_t, std::size_t lf, double sigma2);

/// (1/pi) * integral_0^{(M-1)pi/M} exp(-g_psk gamma / sin^2 theta) d theta
double ser_mpsk(double gamma, const SerModel& m, std::size_t nodes = kSerQuadratureNodes);

/// Mean of SER_k / log2(M) over the first averaged_symbols(N, Lf) symbols.
double ber_frame(const ChannelMatrix& h, std::size_t lf, double sigma2, const SerModel& m);

/// 0.5 * (g_psk snr / (L Lf sin2theta))^(-L)
double diversity_bound(double snr, std::size_t L, std::size_t lf, const SerModel& m,
                       double sin2theta = 1.0);

struct Complexity {
  double additions;
  double multiplications;
};

/// Operation-count polynomial per frame for amldfbe, lmmse, mmse-dfe or bad.
Complexity complexity_model(std::string_view detector, std::size_t N, std::size_t L,
                            std::size_t lf, std::size_t lb);

}  // namespace equalab
