#include "equalab/channel.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace equalab {

FadingParams FadingParams::from_doppler(double fd_ts, int oscillators) {
  FadingParams p;
  p.normalized_doppler = fd_ts;
  p.oscillators = oscillators;
  return p;
}

FadingParams FadingParams::from_motion(double speed_kmh, double carrier_hz, double symbol_period_s,
                                       int oscillators) {
  FadingParams p;
  p.speed_mps = speed_kmh / 3.6;
  p.carrier_hz = carrier_hz;
  p.symbol_period_s = symbol_period_s;
  p.oscillators = oscillators;
  return p;
}

double FadingParams::fd_ts() const {
  if (normalized_doppler) return *normalized_doppler;
  return speed_mps * carrier_hz / kSpeedOfLight * symbol_period_s;
}

void FadingParams::validate() const {
  if (!(fd_ts() >= 0.0)) throw Error("fading: f_d*T_s must be non-negative");
  if (oscillators < 8) throw Error("fading: need at least 8 oscillators per tap");
}

ChannelRealization ChannelRealization::constant(const CVec& taps_l, std::size_t N) {
  ChannelRealization c;
  c.L = taps_l.size();
  c.N = N;
  c.params = FadingParams::from_doppler(0.0);
  for (const auto& g : taps_l) c.taps.emplace_back(N, g);
  return c;
}

ChannelRealization ChannelRealization::slice(std::size_t t0, std::size_t n) const {
  if (t0 + n > N) throw DimensionMismatch("ChannelRealization::slice out of range");
  ChannelRealization c;
  c.L = L;
  c.N = n;
  c.params = params;
  for (const auto& tap_t : taps) c.taps.emplace_back(tap_t.begin() + t0, tap_t.begin() + t0 + n);
  return c;
}

ChannelMatrix::ChannelMatrix(const ChannelRealization& real)
    : L_(real.L), N_(real.N), band_(real.L * real.N) {
  if (L_ == 0 || N_ == 0) throw DimensionMismatch("ChannelMatrix: need L >= 1 and N >= 1");
  for (std::size_t j = 0; j < N_; ++j)
    for (std::size_t l = 0; l < L_; ++l) band_[j * L_ + l] = real.tap(l, j);
}

CMat ChannelMatrix::dense() const {
  CMat h(rows(), N_);
  for (std::size_t j = 0; j < N_; ++j)
    for (std::size_t l = 0; l < L_; ++l) h(j + l, j) = band(j, l);
  return h;
}

std::uint64_t& ChannelMatrix::zero_queries() {
  thread_local std::uint64_t n = 0;
  return n;
}

cplx ChannelMatrix::column_inner(std::size_t g, std::size_t i) const {
  const std::size_t d = g > i ? g - i : i - g;
  if (d >= L_) {
    ++zero_queries();
    return {};
  }
  // rows shared by columns g and i: [max(g,i), min(g,i) + L)
  const std::size_t lo = std::max(g, i);
  cplx acc = 0.0;
  for (std::size_t row = lo; row < std::min(g, i) + L_; ++row)
    acc += std::conj(band(g, row - g)) * band(i, row - i);
  const std::size_t n = L_ - d;
  ops::mul(n);
  ops::add(n - 1);
  return acc;
}

cplx ChannelMatrix::column_dot(std::size_t j, const CVec& v) const {
  cplx acc = 0.0;
  for (std::size_t l = 0; l < L_; ++l) acc += std::conj(band(j, l)) * v[j + l];
  ops::mul(L_);
  ops::add(L_ - 1);
  return acc;
}

ChannelMatrix build_channel_matrix(const ChannelRealization& real) { return ChannelMatrix(real); }

NoiseModel::NoiseModel(double v) : variance(v) {
  if (!(v > 0.0)) throw Error("noise variance must be positive");
}

NoiseModel NoiseModel::from_snr_db(double snr_db) {
  return NoiseModel(std::pow(10.0, -snr_db / 10.0));
}

ChannelRealization jakes_realize(const FadingParams& params, std::size_t L, std::size_t N,
                                 std::uint64_t seed) {
  params.validate();
  if (L == 0 || N == 0) throw DimensionMismatch("jakes_realize: need L >= 1 and N >= 1");
  const int M = params.oscillators;
  const double omega = 2.0 * std::numbers::pi * params.fd_ts();
  const double amp = 1.0 / std::sqrt(static_cast<double>(L) * M);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-std::numbers::pi, std::numbers::pi);

  ChannelRealization c;
  c.L = L;
  c.N = N;
  c.params = params;
  c.taps.assign(L, CVec(N));
  std::vector<double> doppler(M), phase(M);
  for (std::size_t l = 0; l < L; ++l) {
    // one random rotation of an evenly spaced set of arrival angles per tap
    const double theta = unif(rng);
    for (int m = 0; m < M; ++m) {
      const double alpha = (2.0 * std::numbers::pi * (m + 1) - std::numbers::pi + theta) / M;
      doppler[m] = omega * std::cos(alpha);
      phase[m] = unif(rng);
    }
    // advance each oscillator by phasor rotation instead of re-evaluating sincos
    for (int m = 0; m < M; ++m) {
      const cplx step = std::polar(1.0, doppler[m]);
      cplx cur = std::polar(amp, phase[m]);
      for (std::size_t t = 0; t < N; ++t) {
        c.taps[l][t] += cur;
        cur *= step;
      }
    }
  }
  return c;
}

CVec convolve(const ChannelMatrix& h, const CVec& s) {
  if (s.size() != h.N()) throw DimensionMismatch("convolve: frame length mismatch");
  CVec r(h.rows());
  for (std::size_t j = 0; j < h.N(); ++j)
    for (std::size_t l = 0; l < h.L(); ++l) r[j + l] += h.band(j, l) * s[j];
  return r;
}

CVec transmit(const ChannelMatrix& h, const CVec& s, const NoiseModel& noise, std::uint64_t seed) {
  CVec r = convolve(h, s);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(noise.variance / 2.0));
  for (auto& v : r) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v += cplx(re, im);
  }
  return r;
}

ChannelRealization ls_estimate(const CVec& pilot, const CVec& r, std::size_t L,
                               std::optional<std::size_t> n_out) {
  const std::size_t np = pilot.size();
  if (L == 0 || np < 2 * L) throw DimensionMismatch("ls_estimate: pilot shorter than 2L");
  if (r.size() != np + L - 1) throw DimensionMismatch("ls_estimate: received length != Np+L-1");
  // normal equations of the (Np+L-1) x L pilot convolution matrix
  CMat gram(L, L);
  CVec rhs(L);
  for (std::size_t a = 0; a < L; ++a) {
    for (std::size_t b = 0; b < L; ++b) {
      cplx acc = 0.0;
      for (std::size_t t = 0; t < np; ++t) {
        const std::size_t tb = t + a;  // row where pilot[t] meets delay a
        if (tb < b || tb - b >= np) continue;
        acc += std::conj(pilot[t]) * pilot[tb - b];
      }
      gram(a, b) = acc;
    }
    cplx acc = 0.0;
    for (std::size_t t = 0; t < np; ++t) acc += std::conj(pilot[t]) * r[t + a];
    rhs[a] = acc;
  }
  CVec taps_hat;
  try {
    taps_hat = Cholesky(gram).solve(rhs);
  } catch (const NotPositiveDefinite&) {
    throw RankDeficientPilot("ls_estimate: pilot Gram matrix is singular");
  }
  return ChannelRealization::constant(taps_hat, n_out.value_or(np));
}

void write_fixture(std::ostream& os, const ChannelRealization& real) {
  os << "# L=" << real.L << " N=" << real.N << "\n";
  os << std::setprecision(17);
  for (std::size_t t = 0; t < real.N; ++t)
    for (std::size_t l = 0; l < real.L; ++l)
      os << t << ',' << l << ',' << real.tap(l, t).real() << ',' << real.tap(l, t).imag() << "\n";
}

ChannelRealization read_fixture(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("fixture: empty input");
  ChannelRealization c;
  if (std::sscanf(line.c_str(), "# L=%zu N=%zu", &c.L, &c.N) != 2)
    throw Error("fixture: bad header");
  c.taps.assign(c.L, CVec(c.N));
  std::size_t seen = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::size_t t = 0, l = 0;
    double re = 0, im = 0;
    char c1, c2, c3;
    if (!(ls >> t >> c1 >> l >> c2 >> re >> c3 >> im) || t >= c.N || l >= c.L)
      throw Error("fixture: bad line '" + line + "'");
    c.taps[l][t] = {re, im};
    ++seen;
  }
  if (seen != c.L * c.N) throw Error("fixture: wrong entry count");
  return c;
}

}  // namespace equalab
