#pragma once

#include <cstdint>
#include <vector>

#include "equalab/numerics.hpp"

namespace equalab {

/// Unit-energy M-PSK with Gray labels. Point m is exp(i 2 pi m / M), so BPSK
/// is {+1, -1}; point m carries the label m ^ (m >> 1).
class Constellation {
 public:
  explicit Constellation(int order);
  static Constellation bpsk() { return Constellation(2); }

  int order() const { return order_; }
  int bits_per_symbol() const { return bits_; }
  const CVec& points() const { return points_; }
  const cplx& point(int m) const { return points_[m]; }
  unsigned label(int m) const { return labels_[m]; }
  int index_of_label(unsigned label) const { return from_label_[label]; }

  /// Index of the closest point; lowest index wins ties.
  int nearest(cplx z) const;

  /// Symbol indices -> bits, most significant label bit first.
  std::vector<std::uint8_t> to_bits(const std::vector<int>& indices) const;
  std::vector<int> from_bits(const std::vector<std::uint8_t>& bits) const;

 private:
  int order_;
  int bits_;
  CVec points_;
  std::vector<unsigned> labels_;
  std::vector<int> from_label_;
};

}  // namespace equalab
