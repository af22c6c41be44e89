#pragma once

#include <random>

#include "equalab/channel.hpp"
#include "equalab/numerics.hpp"

namespace equalab::testing {

inline CMat random_matrix(std::size_t r, std::size_t c, std::mt19937_64& eng) {
  std::normal_distribution<double> g;
  CMat m(r, c);
  for (auto& z : m.data()) z = {g(eng), g(eng)};
  return m;
}

inline CVec random_vector(std::size_t n, std::mt19937_64& eng) {
  std::normal_distribution<double> g;
  CVec v(n);
  for (auto& z : v) z = {g(eng), g(eng)};
  return v;
}

// M M^H + I
inline CMat random_pd(std::size_t n, std::mt19937_64& eng) {
  const CMat m = random_matrix(n, n, eng);
  return m * hermitian_transpose(m) + CMat::identity(n);
}

inline double max_abs_diff(const CMat& a, const CMat& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

inline double residual(const CVec& a, const CVec& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

// Rayleigh static taps, per-tap power 1/L.
inline CVec rayleigh_taps(std::size_t L, std::mt19937_64& eng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5 / static_cast<double>(L)));
  CVec h(L);
  for (auto& z : h) z = {g(eng), g(eng)};
  return h;
}

// Dense-matrix reference for the detector's window model, built straight from
// H without any band shortcuts.
struct DenseWindow {
  CMat undetected;  // columns of H_k^H H for undetected window symbols
  CMat lambda;
  CVec target;
};

inline DenseWindow dense_window(const ChannelMatrix& h, std::size_t k, std::size_t lf,
                                double sigma2) {
  const CMat H = h.dense();
  const std::size_t N = h.N();
  const std::size_t start = std::min(k, N - lf);
  CMat hk(H.rows(), lf);
  for (std::size_t i = 0; i < H.rows(); ++i)
    for (std::size_t a = 0; a < lf; ++a) hk(i, a) = H(i, start + a);
  const CMat J = hermitian_transpose(hk) * H;  // Lf x N
  const CMat Jp = hermitian_transpose(hk) * hk;
  DenseWindow w;
  w.target = J.column(k);
  const std::size_t last = std::min(N - 1, start + lf - 1);
  w.undetected = CMat(lf, last - k);
  for (std::size_t a = 0; a < lf; ++a)
    for (std::size_t j = k + 1; j <= last; ++j) w.undetected(a, j - k - 1) = J(a, j);
  w.lambda = sigma2 * Jp;
  if (last > k) w.lambda = w.undetected * hermitian_transpose(w.undetected) + w.lambda;
  return w;
}

}  // namespace equalab::testing
