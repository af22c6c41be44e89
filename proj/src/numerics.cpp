#include "equalab/numerics.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace equalab {

namespace ops {
OpCount& tally() {
  thread_local OpCount t;
  return t;
}
}  // namespace ops

CMat::CMat(std::size_t rows, std::size_t cols, std::vector<cplx> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) throw DimensionMismatch("CMat: entry count != rows*cols");
}

CMat CMat::identity(std::size_t n) {
  CMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMat CMat::diagonal(const std::vector<double>& d) {
  CMat m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

CVec CMat::column(std::size_t j) const {
  CVec c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

bool CMat::all_finite() const {
  for (const auto& z : data_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

CMat hermitian_transpose(const CMat& a) {
  CMat t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = std::conj(a(i, j));
  return t;
}

CMat operator*(const CMat& a, const CMat& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matrix product: inner dimensions differ");
  CMat c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const cplx aip = a(i, p);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aip * b(p, j);
    }
  const std::uint64_t m = a.rows(), n = b.cols(), k = a.cols();
  ops::mul(m * n * k);
  if (k > 0) ops::add(m * n * (k - 1));
  return c;
}

CMat operator+(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("matrix sum");
  CMat c = a;
  for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] += b.data()[i];
  ops::add(c.data().size());
  return c;
}

CMat operator-(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("matrix difference");
  CMat c = a;
  for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] -= b.data()[i];
  ops::add(c.data().size());
  return c;
}

CMat operator*(double s, const CMat& a) {
  CMat c = a;
  for (auto& z : c.data()) z *= s;
  ops::mul(c.data().size());
  return c;
}

CVec operator*(const CMat& a, const CVec& x) {
  if (a.cols() != x.size()) throw DimensionMismatch("matrix-vector product");
  CVec y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
    y[i] = acc;
  }
  ops::mul(a.rows() * a.cols());
  if (a.cols() > 0) ops::add(a.rows() * (a.cols() - 1));
  return y;
}

cplx dot(const CVec& x, const CVec& y) {
  if (x.size() != y.size()) throw DimensionMismatch("dot: length mismatch");
  cplx acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
  ops::mul(x.size());
  if (!x.empty()) ops::add(x.size() - 1);
  return acc;
}

double norm2(const CVec& x) {
  double acc = 0.0;
  for (const auto& z : x) acc += std::norm(z);
  return acc;
}

double frobenius(const CMat& a) {
  double acc = 0.0;
  for (const auto& z : a.data()) acc += std::norm(z);
  return std::sqrt(acc);
}

Cholesky::Cholesky(const CMat& a) : l_(a.rows(), a.cols()) {
  if (!a.square()) throw DimensionMismatch("Cholesky: matrix not square");
  const std::size_t n = a.rows();
  std::uint64_t muls = 0, adds = 0;
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j).real();
    for (std::size_t p = 0; p < j; ++p) d -= std::norm(l_(j, p));
    muls += j;
    adds += j;
    if (!(d > 0.0) || !std::isfinite(d))
      throw NotPositiveDefinite("Cholesky: non-positive pivot at column " + std::to_string(j));
    const double ljj = std::sqrt(d);
    l_(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      cplx s = a(i, j);
      for (std::size_t p = 0; p < j; ++p) s -= l_(i, p) * std::conj(l_(j, p));
      l_(i, j) = s / ljj;
    }
    muls += (n - j - 1) * (j + 1);
    adds += (n - j - 1) * j;
  }
  ops::mul(muls);
  ops::add(adds);
}

CVec Cholesky::solve(const CVec& b) const {
  const std::size_t n = l_.rows();
  if (b.size() != n) throw DimensionMismatch("Cholesky::solve: rhs length mismatch");
  CVec x = b;
  for (std::size_t i = 0; i < n; ++i) {
    cplx s = x[i];
    for (std::size_t p = 0; p < i; ++p) s -= l_(i, p) * x[p];
    x[i] = s / l_(i, i).real();
  }
  for (std::size_t i = n; i-- > 0;) {
    cplx s = x[i];
    for (std::size_t p = i + 1; p < n; ++p) s -= std::conj(l_(p, i)) * x[p];
    x[i] = s / l_(i, i).real();
  }
  // each triangle: n(n-1)/2 multiply-adds plus n scalings
  ops::mul(n * (n - 1) + 2 * n);
  ops::add(n * (n - 1));
  return x;
}

HermitianPD::HermitianPD(CMat m) : m_(std::move(m)) {
  if (!m_.square()) throw DimensionMismatch("HermitianPD: matrix not square");
  double scale = 0.0, asym = 0.0;
  for (std::size_t i = 0; i < m_.rows(); ++i)
    for (std::size_t j = 0; j < m_.cols(); ++j) {
      scale = std::max(scale, std::abs(m_(i, j)));
      asym = std::max(asym, std::abs(m_(i, j) - std::conj(m_(j, i))));
    }
  if (asym > 1e-12 * scale) throw NotPositiveDefinite("HermitianPD: matrix is not Hermitian");
}

CVec solve_hermitian_pd(const HermitianPD& a, const CVec& b) {
  if (b.size() != a.size()) throw DimensionMismatch("solve_hermitian_pd: rhs length mismatch");
  return Cholesky(a.matrix()).solve(b);
}

namespace {

Eigen::MatrixXcd to_eigen(const CMat& a) {
  Eigen::MatrixXcd m(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  return m;
}

}  // namespace

Eigh eigh(const CMat& a) {
  if (!a.square()) throw DimensionMismatch("eigh: matrix not square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(a));
  if (es.info() != Eigen::Success) throw ConvergenceFailure("eigh: iteration cap reached");
  const std::size_t n = a.rows();
  Eigh out{std::vector<double>(n), CMat(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = es.eigenvalues()(i);
    for (std::size_t j = 0; j < n; ++j) out.vectors(j, i) = es.eigenvectors()(j, i);
  }
  return out;
}

CMat inv_sqrt_pd(const HermitianPD& a) {
  const Eigh e = eigh(a.matrix());
  const std::size_t n = a.size();
  const double top = n ? e.values.back() : 0.0;
  for (double v : e.values)
    if (!(v > 1e-14 * top)) throw NotPositiveDefinite("inv_sqrt_pd: eigenvalue below floor");
  CMat out(n, n);
  for (std::size_t p = 0; p < n; ++p) {
    const double s = 1.0 / std::sqrt(e.values[p]);
    for (std::size_t i = 0; i < n; ++i) {
      const cplx ui = e.vectors(i, p) * s;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += ui * std::conj(e.vectors(j, p));
    }
  }
  // symmetrize rounding so the result passes the HermitianPD check downstream
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const cplx m = 0.5 * (out(i, j) + std::conj(out(j, i)));
      out(i, j) = m;
      out(j, i) = std::conj(m);
    }
  return out;
}

namespace {

GaussLegendre compute_gauss_legendre(std::size_t n) {
  GaussLegendre g{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p2) / static_cast<double>(j);
      }
      dp = static_cast<double>(n) * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    g.nodes[i] = -x;
    g.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.weights[i] = w;
    g.weights[n - 1 - i] = w;
  }
  return g;
}

}  // namespace

const GaussLegendre& gauss_legendre(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendre>(compute_gauss_legendre(n));
  return *slot;
}

double integrate_fixed(const std::function<double(double)>& f, double lo, double hi,
                       std::size_t nodes) {
  if (!(lo < hi) || nodes < 2) throw Error("integrate_fixed: need lo < hi and nodes >= 2");
  const GaussLegendre& g = gauss_legendre(nodes);
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes; ++i) acc += g.weights[i] * f(mid + half * g.nodes[i]);
  return half * acc;
}

}  // namespace equalab
