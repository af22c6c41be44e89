#pragma once

// Sliding-window model shared by the block decision-feedback detector and
// the analytical SER machinery.
//
// Symbol indices are 0-based. For target symbol k the matched-filter window
// covers columns [start, start + Lf) of H with start = min(k, N - Lf); once
// the window reaches the end of the frame it stays fixed and only the split
// between detected and undetected columns moves. Without the matched filter
// the window covers rows [start, start + Lf) of H with
// start = min(k, N + L - 1 - Lf).

#include <cstddef>
#include <vector>

#include "equalab/channel.hpp"
#include "equalab/numerics.hpp"

namespace equalab {

struct AmlDfbeConfig {
  std::size_t forward_len = 10;  // L_f
  std::size_t backward_len = 0;  // L_b, must equal L - 1
  bool use_matched_filter = true;

  static AmlDfbeConfig for_channel(std::size_t L, std::size_t Lf, bool matched_filter = true) {
    return {Lf, L - 1, matched_filter};
  }
  void validate(std::size_t L, std::size_t N) const;
};

/// Banded Gram of the channel columns: entry(g, i) = h_g^H h_i, zero when
/// |g - i| >= L. Built once per frame from O(L) band inner products.
class BandGram {
 public:
  explicit BandGram(const ChannelMatrix& h);
  cplx entry(std::size_t g, std::size_t i) const;
  std::size_t L() const { return L_; }

 private:
  std::size_t L_, N_;
  std::vector<cplx> upper_;  // upper_[g * L + d] = h_g^H h_{g+d}
};

struct WindowState {
  std::size_t k = 0;
  std::size_t start = 0;
  bool matched_filter = true;
  std::vector<std::size_t> fed_back;    // detected symbols still visible in the window
  CMat feedback_cols;                   // Lf x |fed_back|
  CVec target;                          // j_k
  std::vector<std::size_t> undetected;  // k+1 .. last in-window column
  CMat undetected_cols;                 // J_{k+1}, Lf x |undetected|
  CMat noise_shape;                     // J'_k with the matched filter, I without
  double sigma2_used = 0.0;             // after the conditioning floor
  CMat lambda;                          // J_{k+1} J_{k+1}^H + sigma2 J'_k
};

WindowState assemble_window(const ChannelMatrix& h, const BandGram& gram, std::size_t k,
                            const AmlDfbeConfig& cfg, double sigma2);
WindowState assemble_window(const ChannelMatrix& h, std::size_t k, const AmlDfbeConfig& cfg,
                            double sigma2);

/// All matched-filter outputs h_i^H r, i = 0..N-1.
CVec matched_filter_bank(const ChannelMatrix& h, const CVec& r);

/// Forward-process output y for a window (matched-filter outputs or raw samples).
CVec forward_output(const WindowState& w, const CVec& r, const CVec& mf_bank);

}  // namespace equalab
