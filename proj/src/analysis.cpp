#include "equalab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "equalab/equalizers.hpp"
#include "equalab/window.hpp"

namespace equalab {

SerModel::SerModel(int order) : M(order) {
  if (order < 2) throw Error("SerModel: constellation order must be >= 2");
  const double s = std::sin(std::numbers::pi / order);
  g_psk = s * s;
}

std::size_t averaged_symbols(std::size_t N, std::size_t lf) {
  return std::min(N, N + 2 > lf ? N + 2 - lf : std::size_t{0});
}

namespace {

WindowState window_for(const ChannelMatrix& h, const BandGram& gram, std::size_t k,
                       std::size_t lf, double sigma2) {
  if (!(sigma2 > 0.0)) throw Error("gamma_k: noise variance must be positive");
  if (k >= averaged_symbols(h.N(), lf)) throw DimensionMismatch("gamma_k: k outside averaging range");
  return assemble_window(h, gram, k, AmlDfbeConfig::for_channel(h.L(), lf, true), sigma2);
}

double gamma_from(const WindowState& w) {
  const CVec x = solve_hermitian_pd(HermitianPD(w.lambda), w.target);
  return dot(w.target, x).real();
}

}  // namespace

double gamma_k(const ChannelMatrix& h, std::size_t k, std::size_t lf, double sigma2) {
  return gamma_from(window_for(h, BandGram(h), k, lf, sigma2));
}

EffectiveScalarChannel whitened_channel(const ChannelMatrix& h, std::size_t k, std::size_t lf,
                                        double sigma2) {
  const WindowState w = window_for(h, BandGram(h), k, lf, sigma2);
  const CMat psi = inv_sqrt_pd(HermitianPD(w.lambda));
  const double xi = norm2(psi * w.target);
  return {xi, xi, xi};
}

double gamma_high_snr(const CVec& taps_at_t, std::size_t lf, double sigma2) {
  if (!(sigma2 > 0.0)) throw Error("gamma_high_snr: noise variance must be positive");
  const std::size_t upto = std::min(lf, taps_at_t.size());
  double energy = 0.0;
  for (std::size_t i = 0; i < upto; ++i) energy += std::norm(taps_at_t[i]);
  return energy / (sigma2 * static_cast<double>(lf));
}

double ser_mpsk(double gamma, const SerModel& m, std::size_t nodes) {
  if (!(gamma >= 0.0)) throw Error("ser_mpsk: gamma must be non-negative");
  const double hi = (m.M - 1) * std::numbers::pi / m.M;
  const double a = m.g_psk * gamma;
  const double v = integrate_fixed(
      [a](double theta) {
        const double s = std::sin(theta);
        return std::exp(-a / (s * s));
      },
      0.0, hi, nodes);
  return std::clamp(v / std::numbers::pi, 0.0, 1.0);
}

double ber_frame(const ChannelMatrix& h, std::size_t lf, double sigma2, const SerModel& m) {
  const std::size_t count = averaged_symbols(h.N(), lf);
  if (count == 0) throw DimensionMismatch("ber_frame: empty averaging range");
  const BandGram gram(h);
  const double bits = std::log2(static_cast<double>(m.M));
  double acc = 0.0;
  for (std::size_t k = 0; k < count; ++k)
    acc += ser_mpsk(gamma_from(window_for(h, gram, k, lf, sigma2)), m) / bits;
  return acc / static_cast<double>(count);
}

double diversity_bound(double snr, std::size_t L, std::size_t lf, const SerModel& m,
                       double sin2theta) {
  if (!(snr > 0.0)) throw Error("diversity_bound: SNR must be positive");
  const double base = m.g_psk * snr / (static_cast<double>(L * lf) * sin2theta);
  return 0.5 * std::pow(base, -static_cast<double>(L));
}

Complexity complexity_model(std::string_view detector, std::size_t N_, std::size_t L_,
                            std::size_t lf_, std::size_t lb_) {
  const double N = static_cast<double>(N_), L = static_cast<double>(L_);
  const double f = static_cast<double>(lf_), b = static_cast<double>(lb_);
  const double f2 = f * f, f3 = f2 * f, b2 = b * b, b3 = b2 * b;
  if (detector == "amldfbe")
    return {N * (8 * f3 + 34 * f2 + (6 * L + 7) * f + (3 * L - 1)),
            N * ((2 * f3 + 42 * f2) - (12 * L + 19) * f + 18)};
  if (detector == "lmmse")
    return {N * (8 * f3 + 30 * f2 + 2 * (3 * L + 2) * f),
            N * (2 * f3 + 42 * f2 - (12 * L - 17) * f - (6 * L - 1))};
  if (detector == "mmse-dfe")
    return {N * (8 * (f3 + b3) + 42 * (f2 + b2) + 2 * (3 * L + 2) * (f + b)),
            N * (2 * (f3 + b3) + 42 * (f2 + b2) + (12 * L - 11) * (f + b) + 6)};
  if (detector == "bad")
    return {N * (16 * (f3 + b3) + 84 * (f2 + b2) + 4 * (3 * L + 2) * (f + b)),
            N * (4 * (f3 + b3) + 84 * (f2 + b2) + 2 * (12 * L - 11) * (f + b) + 12)};
  throw UnknownDetector("complexity_model: unknown detector '" + std::string(detector) + "'");
}

}  // namespace equalab
