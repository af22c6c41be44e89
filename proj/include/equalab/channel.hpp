#pragma once

// Doubly selective SISO channel: Jakes sum-of-sinusoids taps, the banded
// (N+L-1) x N convolution matrix, AWGN transmission and least-squares
// estimation from a pilot frame.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "equalab/numerics.hpp"

namespace equalab {

inline constexpr double kSpeedOfLight = 299'792'458.0;

struct RankDeficientPilot : Error {
  using Error::Error;
};

struct FadingParams {
  double carrier_hz = 2e9;
  double symbol_period_s = 128.0 / kSpeedOfLight;
  double speed_mps = 0.0;
  int oscillators = 16;
  /// When set, overrides carrier/period/speed.
  std::optional<double> normalized_doppler;

  static FadingParams from_doppler(double fd_ts, int oscillators = 16);
  static FadingParams from_motion(double speed_kmh, double carrier_hz, double symbol_period_s,
                                  int oscillators = 16);

  /// f_d * T_s with f_d = v f_c / c.
  double fd_ts() const;
  void validate() const;
};

/// taps[l][t] is the gain of path l (0-based delay) for the symbol sent at time t.
struct ChannelRealization {
  std::size_t L = 0;
  std::size_t N = 0;
  std::vector<CVec> taps;
  FadingParams params;

  const cplx& tap(std::size_t l, std::size_t t) const { return taps[l][t]; }
  /// Static channel with the same taps at every t.
  static ChannelRealization constant(const CVec& taps_l, std::size_t N);
  /// Sub-block [t0, t0 + n) of every tap process.
  ChannelRealization slice(std::size_t t0, std::size_t n) const;
};

class ChannelMatrix {
 public:
  explicit ChannelMatrix(const ChannelRealization& real);

  std::size_t L() const { return L_; }
  std::size_t N() const { return N_; }
  std::size_t rows() const { return N_ + L_ - 1; }

  /// Entry (i, j); structurally zero unless 0 <= i - j < L.
  cplx at(std::size_t i, std::size_t j) const {
    return (i >= j && i - j < L_) ? band_[j * L_ + (i - j)] : cplx{};
  }
  /// h_j[l] = H(j + l, j)
  const cplx& band(std::size_t j, std::size_t l) const { return band_[j * L_ + l]; }

  /// Dense copy of H.
  CMat dense() const;

  /// h_g^H h_i over the overlapping rows only. Pairs with |g - i| >= L are
  /// structurally orthogonal; asking for one returns 0 and is recorded in
  /// zero_queries().
  cplx column_inner(std::size_t g, std::size_t i) const;
  /// h_j^H v for a vector of length rows().
  cplx column_dot(std::size_t j, const CVec& v) const;

  static std::uint64_t& zero_queries();

 private:
  std::size_t L_, N_;
  std::vector<cplx> band_;
};

ChannelMatrix build_channel_matrix(const ChannelRealization& real);

struct NoiseModel {
  double variance;  // per complex sample
  explicit NoiseModel(double v);
  static NoiseModel from_snr_db(double snr_db);
};

/// Smallest variance used where a noiseless path is wanted.
inline constexpr double kNoiselessVariance = 1e-30;

ChannelRealization jakes_realize(const FadingParams& params, std::size_t L, std::size_t N,
                                 std::uint64_t seed);

/// r = H s, no noise.
CVec convolve(const ChannelMatrix& h, const CVec& s);
CVec transmit(const ChannelMatrix& h, const CVec& s, const NoiseModel& noise, std::uint64_t seed);

/// Quasi-static LS estimate of L taps from a known pilot; the result repeats
/// the estimated taps over n_out symbol times (defaults to the pilot length).
ChannelRealization ls_estimate(const CVec& pilot, const CVec& r, std::size_t L,
                               std::optional<std::size_t> n_out = std::nullopt);

/// Fixture format: one line per (t, l), t-major, "t,l,re,im".
void write_fixture(std::ostream& os, const ChannelRealization& real);
ChannelRealization read_fixture(std::istream& is);

}  // namespace equalab
