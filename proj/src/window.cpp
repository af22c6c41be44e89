#include "equalab/window.hpp"

#include <algorithm>
#include <atomic>
#include <iostream>

namespace equalab {

void AmlDfbeConfig::validate(std::size_t L, std::size_t N) const {
  if (backward_len != L - 1) throw DimensionMismatch("A-ML-DFBE: backward length must be L-1");
  if (forward_len == 0) throw DimensionMismatch("A-ML-DFBE: forward length must be positive");
  const std::size_t cap = use_matched_filter ? N : N + L - 1;
  if (forward_len > cap) throw DimensionMismatch("A-ML-DFBE: forward length exceeds frame");
  if (forward_len < L) {
    static std::atomic<bool> warned{false};
    if (!warned.exchange(true))
      std::cerr << "warning: A-ML-DFBE forward length " << forward_len
                << " is shorter than the channel (" << L << " taps)\n";
  }
}

BandGram::BandGram(const ChannelMatrix& h) : L_(h.L()), N_(h.N()), upper_(h.N() * h.L()) {
  for (std::size_t g = 0; g < N_; ++g)
    for (std::size_t d = 0; d < L_ && g + d < N_; ++d) upper_[g * L_ + d] = h.column_inner(g, g + d);
}

cplx BandGram::entry(std::size_t g, std::size_t i) const {
  if (i >= g) return i - g < L_ ? upper_[g * L_ + (i - g)] : cplx{};
  return g - i < L_ ? std::conj(upper_[i * L_ + (g - i)]) : cplx{};
}

namespace {

// Column i of the windowed mixing matrix.
CVec window_column(const ChannelMatrix& h, const BandGram& gram, std::size_t start, std::size_t lf,
                   bool mf, std::size_t i) {
  CVec c(lf);
  const std::size_t L = h.L();
  for (std::size_t a = 0; a < lf; ++a) {
    const std::size_t g = start + a;
    if (mf) {
      // h_g^H h_i vanishes beyond the band; never touch those pairs
      if ((g > i ? g - i : i - g) < L) c[a] = gram.entry(g, i);
    } else if (g >= i && g - i < L) {
      c[a] = h.band(i, g - i);
    }
  }
  return c;
}

void set_column(CMat& m, std::size_t j, const CVec& c) {
  for (std::size_t a = 0; a < c.size(); ++a) m(a, j) = c[a];
}

}  // namespace

WindowState assemble_window(const ChannelMatrix& h, const BandGram& gram, std::size_t k,
                            const AmlDfbeConfig& cfg, double sigma2) {
  const std::size_t N = h.N(), L = h.L(), lf = cfg.forward_len;
  if (k >= N) throw DimensionMismatch("assemble_window: symbol index out of range");
  const bool mf = cfg.use_matched_filter;

  WindowState w;
  w.k = k;
  w.matched_filter = mf;
  w.start = mf ? std::min(k, N - lf) : std::min(k, N + L - 1 - lf);

  // Detected columns visible in the window. In the sliding phase this is
  // exactly the last L_b decisions.
  const std::size_t lb = L - 1;
  const std::size_t first_fb = w.start >= lb ? w.start - lb : 0;
  for (std::size_t i = first_fb; i < k; ++i) w.fed_back.push_back(i);
  const std::size_t last_col = std::min(N - 1, w.start + lf - 1);
  for (std::size_t i = k + 1; i <= last_col; ++i) w.undetected.push_back(i);

  w.feedback_cols = CMat(lf, w.fed_back.size());
  for (std::size_t j = 0; j < w.fed_back.size(); ++j)
    set_column(w.feedback_cols, j, window_column(h, gram, w.start, lf, mf, w.fed_back[j]));
  w.target = window_column(h, gram, w.start, lf, mf, k);
  w.undetected_cols = CMat(lf, w.undetected.size());
  for (std::size_t j = 0; j < w.undetected.size(); ++j)
    set_column(w.undetected_cols, j, window_column(h, gram, w.start, lf, mf, w.undetected[j]));

  if (mf) {
    w.noise_shape = CMat(lf, lf);
    for (std::size_t a = 0; a < lf; ++a)
      for (std::size_t b = 0; b < lf; ++b) {
        const std::size_t g = w.start + a, i = w.start + b;
        if ((g > i ? g - i : i - g) < L) w.noise_shape(a, b) = gram.entry(g, i);
      }
  } else {
    w.noise_shape = CMat::identity(lf);
  }

  double trace = 0.0;
  for (std::size_t a = 0; a < lf; ++a) trace += w.noise_shape(a, a).real();
  w.sigma2_used = std::max(sigma2, 1e-12 * trace / static_cast<double>(lf));

  CMat noise_term = w.sigma2_used * w.noise_shape;
  if (w.undetected.empty()) {
    w.lambda = std::move(noise_term);
  } else {
    w.lambda = w.undetected_cols * hermitian_transpose(w.undetected_cols) + noise_term;
  }
  return w;
}

WindowState assemble_window(const ChannelMatrix& h, std::size_t k, const AmlDfbeConfig& cfg,
                            double sigma2) {
  return assemble_window(h, BandGram(h), k, cfg, sigma2);
}

CVec matched_filter_bank(const ChannelMatrix& h, const CVec& r) {
  if (r.size() != h.rows()) throw DimensionMismatch("received length != N+L-1");
  CVec mf(h.N());
  for (std::size_t i = 0; i < h.N(); ++i) mf[i] = h.column_dot(i, r);
  return mf;
}

CVec forward_output(const WindowState& w, const CVec& r, const CVec& mf_bank) {
  const std::size_t lf = w.target.size();
  CVec y(lf);
  for (std::size_t a = 0; a < lf; ++a) y[a] = w.matched_filter ? mf_bank[w.start + a] : r[w.start + a];
  return y;
}

}  // namespace equalab
