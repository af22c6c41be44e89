#include <algorithm>

#include "equalab/equalizers.hpp"

namespace equalab {

MmseWindow mmse_window(const ChannelMatrix& h, std::size_t k, std::size_t lf, std::size_t lead) {
  if (k >= h.N()) throw DimensionMismatch("mmse_window: symbol index out of range");
  if (lf == 0) throw DimensionMismatch("mmse_window: empty window");
  const std::size_t L = h.L();
  MmseWindow w;
  w.row0 = k - std::min(lead, k);
  const std::size_t row_end = std::min(w.row0 + lf, h.rows());
  w.rows = row_end - w.row0;
  const std::size_t c0 = w.row0 >= L - 1 ? w.row0 - (L - 1) : 0;
  const std::size_t c1 = std::min(h.N() - 1, row_end - 1);
  for (std::size_t j = c0; j <= c1; ++j) w.cols.push_back(j);
  w.hw = CMat(w.rows, w.cols.size());
  for (std::size_t a = 0; a < w.rows; ++a)
    for (std::size_t b = 0; b < w.cols.size(); ++b) w.hw(a, b) = h.at(w.row0 + a, w.cols[b]);
  return w;
}

namespace {

CMat select_cols(const CMat& m, const std::vector<std::size_t>& which) {
  CMat out(m.rows(), which.size());
  for (std::size_t a = 0; a < m.rows(); ++a)
    for (std::size_t b = 0; b < which.size(); ++b) out(a, b) = m(a, which[b]);
  return out;
}

std::size_t position_of(const MmseWindow& w, std::size_t col) {
  return static_cast<std::size_t>(std::find(w.cols.begin(), w.cols.end(), col) - w.cols.begin());
}

// (H_I H_I^H + sigma2 I)^{-1} h_k for the chosen interference columns.
CVec wiener(const MmseWindow& w, const std::vector<std::size_t>& interferers, std::size_t target,
            double sigma2) {
  const CMat hi = select_cols(w.hw, interferers);
  CMat cov = hi * hermitian_transpose(hi) + sigma2 * CMat::identity(w.rows);
  const CVec h_k = w.hw.column(position_of(w, target));
  return Cholesky(cov).solve(h_k);
}

CVec window_samples(const MmseWindow& w, const CVec& r) {
  return CVec(r.begin() + static_cast<std::ptrdiff_t>(w.row0),
              r.begin() + static_cast<std::ptrdiff_t>(w.row0 + w.rows));
}

void check_inputs(const ChannelMatrix& h, const CVec& r, double sigma2, std::size_t lf) {
  if (r.size() != h.rows()) throw DimensionMismatch("mmse: received length != N+L-1");
  if (!(sigma2 > 0.0)) throw Error("mmse: noise variance must be positive");
  if (lf < h.L()) throw DimensionMismatch("mmse: window shorter than the channel");
}

}  // namespace

CVec lmmse_filter(const ChannelMatrix& h, std::size_t k, std::size_t lf, double sigma2,
                  std::size_t lead, MmseWindow* window_out) {
  MmseWindow w = mmse_window(h, k, lf, lead);
  std::vector<std::size_t> all(w.cols.size());
  for (std::size_t b = 0; b < all.size(); ++b) all[b] = b;
  CVec f = wiener(w, all, k, sigma2);
  if (window_out) *window_out = std::move(w);
  return f;
}

DetectionResult linear_mmse_detect(const ChannelMatrix& h, const CVec& r, const Constellation& c,
                                   double sigma2, std::size_t lf, std::size_t lead) {
  check_inputs(h, r, sigma2, lf);
  const OpCount before = ops::tally();
  std::vector<int> idx(h.N());
  for (std::size_t k = 0; k < h.N(); ++k) {
    MmseWindow w;
    const CVec f = lmmse_filter(h, k, lf, sigma2, lead, &w);
    const cplx est = dot(f, window_samples(w, r));
    const double gain = dot(f, w.hw.column(position_of(w, k))).real();
    idx[k] = c.nearest(est / gain);
  }
  DetectionResult out = DetectionResult::from_indices(std::move(idx), c);
  out.op_count = ops::tally() - before;
  return out;
}

DetectionResult mmse_dfe_detect(const ChannelMatrix& h, const CVec& r, const Constellation& c,
                                double sigma2, std::size_t lf, std::size_t lb, FeedbackSource fb,
                                std::size_t lead) {
  check_inputs(h, r, sigma2, lf);
  if (lb == 0) throw DimensionMismatch("mmse-dfe: backward length must be >= 1");
  if (fb.genie && fb.genie->size() != h.N()) throw DimensionMismatch("genie frame length != N");
  const OpCount before = ops::tally();
  std::vector<int> idx(h.N());
  for (std::size_t k = 0; k < h.N(); ++k) {
    const MmseWindow w = mmse_window(h, k, lf, lead);
    // past symbols inside the feedback span are assumed cancelled
    std::vector<std::size_t> fed, interf;
    for (std::size_t b = 0; b < w.cols.size(); ++b) {
      const std::size_t j = w.cols[b];
      if (j < k && k - j <= lb)
        fed.push_back(b);
      else
        interf.push_back(b);
    }
    const CVec f = wiener(w, interf, k, sigma2);
    cplx est = dot(f, window_samples(w, r));
    for (std::size_t b : fed) {
      const cplx tap = dot(f, w.hw.column(b));  // backward filter coefficient
      const std::size_t j = w.cols[b];
      est -= tap * c.point(fb.genie ? (*fb.genie)[j] : idx[j]);
      ops::mul(1);
      ops::add(1);
    }
    const double gain = dot(f, w.hw.column(position_of(w, k))).real();
    idx[k] = c.nearest(est / gain);
  }
  DetectionResult out = DetectionResult::from_indices(std::move(idx), c);
  out.op_count = ops::tally() - before;
  return out;
}

}  // namespace equalab
