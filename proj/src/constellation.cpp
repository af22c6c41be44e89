#include "equalab/constellation.hpp"

#include <cmath>
#include <numbers>

namespace equalab {

Constellation::Constellation(int order) : order_(order), bits_(0) {
  if (order < 2 || (order & (order - 1)) != 0)
    throw Error("constellation order must be a power of two >= 2");
  while ((1 << bits_) < order) ++bits_;
  points_.resize(order);
  labels_.resize(order);
  from_label_.resize(order);
  for (int m = 0; m < order; ++m) {
    points_[m] = std::polar(1.0, 2.0 * std::numbers::pi * m / order);
    // snap the exact axis points so BPSK/QPSK are exactly {+-1, +-i}
    if (std::abs(points_[m].real()) < 1e-15) points_[m].real(0.0);
    if (std::abs(points_[m].imag()) < 1e-15) points_[m].imag(0.0);
    labels_[m] = static_cast<unsigned>(m ^ (m >> 1));
    from_label_[labels_[m]] = m;
  }
}

int Constellation::nearest(cplx z) const {
  int best = 0;
  double best_d = std::norm(z - points_[0]);
  for (int m = 1; m < order_; ++m) {
    const double d = std::norm(z - points_[m]);
    if (d < best_d) {
      best_d = d;
      best = m;
    }
  }
  return best;
}

std::vector<std::uint8_t> Constellation::to_bits(const std::vector<int>& indices) const {
  std::vector<std::uint8_t> bits;
  bits.reserve(indices.size() * bits_);
  for (int m : indices)
    for (int b = bits_ - 1; b >= 0; --b) bits.push_back((labels_[m] >> b) & 1u);
  return bits;
}

std::vector<int> Constellation::from_bits(const std::vector<std::uint8_t>& bits) const {
  if (bits.size() % bits_ != 0) throw DimensionMismatch("bit count not a multiple of log2(M)");
  std::vector<int> out(bits.size() / bits_);
  for (std::size_t s = 0; s < out.size(); ++s) {
    unsigned lab = 0;
    for (int b = 0; b < bits_; ++b) lab = (lab << 1) | bits[s * bits_ + b];
    out[s] = from_label_[lab];
  }
  return out;
}

}  // namespace equalab
