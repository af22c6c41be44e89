#pragma once

// Dense complex linear algebra and fixed-order quadrature.
//
// Storage is row-major and dense. Callers that know about band structure
// (the channel matrix, the matched-filter Gram) exploit it themselves; the
// kernels here never look for zeros.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace equalab {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotPositiveDefinite : Error {
  using Error::Error;
};
struct ConvergenceFailure : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};

/// Complex operation tally. One complex multiply (or real-by-complex scale)
/// counts as one multiplication; one complex add or subtract as one addition.
struct OpCount {
  std::uint64_t mul = 0;
  std::uint64_t add = 0;

  OpCount& operator+=(const OpCount& o) {
    mul += o.mul;
    add += o.add;
    return *this;
  }
  friend OpCount operator-(OpCount a, const OpCount& b) {
    a.mul -= b.mul;
    a.add -= b.add;
    return a;
  }
  friend bool operator==(const OpCount&, const OpCount&) = default;
};

namespace ops {
// Per-thread running tally; detectors snapshot it before and after a frame.
OpCount& tally();
inline void mul(std::uint64_t n) { tally().mul += n; }
inline void add(std::uint64_t n) { tally().add += n; }
}  // namespace ops

class CMat {
 public:
  CMat() = default;
  CMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  CMat(std::size_t rows, std::size_t cols, std::vector<cplx> data);

  static CMat identity(std::size_t n);
  static CMat diagonal(const std::vector<double>& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<cplx>& data() const { return data_; }
  std::vector<cplx>& data() { return data_; }

  CVec column(std::size_t j) const;
  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

CMat hermitian_transpose(const CMat& a);
CMat operator*(const CMat& a, const CMat& b);
CMat operator+(const CMat& a, const CMat& b);
CMat operator-(const CMat& a, const CMat& b);
CMat operator*(double s, const CMat& a);
CVec operator*(const CMat& a, const CVec& x);

/// x^H y
cplx dot(const CVec& x, const CVec& y);
double norm2(const CVec& x);
double frobenius(const CMat& a);

/// Lower-triangular Cholesky factor of a Hermitian positive definite matrix.
class Cholesky {
 public:
  explicit Cholesky(const CMat& a);
  CVec solve(const CVec& b) const;
  const CMat& lower() const { return l_; }

 private:
  CMat l_;
};

/// Square matrix that is Hermitian to within 1e-12 relative asymmetry.
/// Positive definiteness is checked when the matrix is factored.
class HermitianPD {
 public:
  explicit HermitianPD(CMat m);
  const CMat& matrix() const { return m_; }
  std::size_t size() const { return m_.rows(); }

 private:
  CMat m_;
};

CVec solve_hermitian_pd(const HermitianPD& a, const CVec& b);

struct Eigh {
  std::vector<double> values;  // ascending
  CMat vectors;                // columns are eigenvectors
};
Eigh eigh(const CMat& a);

/// Unique Hermitian PD inverse square root, via eigendecomposition.
CMat inv_sqrt_pd(const HermitianPD& a);

struct GaussLegendre {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(std::size_t n);

double integrate_fixed(const std::function<double(double)>& f, double lo, double hi,
                       std::size_t nodes);

}  // namespace equalab
