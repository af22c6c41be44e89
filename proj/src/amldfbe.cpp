#include <limits>

#include "equalab/equalizers.hpp"

namespace equalab {

DetectionResult DetectionResult::from_indices(std::vector<int> idx, const Constellation& c) {
  DetectionResult d;
  d.symbols.reserve(idx.size());
  for (int m : idx) d.symbols.push_back(c.point(m));
  d.bits = c.to_bits(idx);
  d.indices = std::move(idx);
  return d;
}

namespace {

// argmin_s (y - j s)^H Lambda^{-1} (y - j s). Expanding the quadratic form,
// only -2 Re(s* z) + |s|^2 q depends on s, with x = Lambda^{-1} j,
// z = x^H y and q = x^H j.
struct ApproxMlDecision {
  int index;
  double gamma;
};

ApproxMlDecision approx_ml_decide(const CMat& lambda, const CVec& target, const CVec& y,
                                  const Constellation& c) {
  const Cholesky chol(lambda);
  const CVec x = chol.solve(target);
  const cplx z = dot(x, y);
  const double q = dot(x, target).real();
  int best = 0;
  double best_metric = std::numeric_limits<double>::infinity();
  for (int m = 0; m < c.order(); ++m) {
    const cplx s = c.point(m);
    const double metric = -2.0 * (std::conj(s) * z).real() + std::norm(s) * q;
    if (metric < best_metric) {
      best_metric = metric;
      best = m;
    }
  }
  ops::mul(2 * static_cast<std::uint64_t>(c.order()));
  ops::add(static_cast<std::uint64_t>(c.order()));
  return {best, q};
}

DetectionResult run_block_dfe(const ChannelMatrix& h, const CVec& r, const AmlDfbeConfig& cfg,
                              const Constellation& c, double sigma2, FeedbackSource fb,
                              bool record_gamma) {
  if (!(sigma2 > 0.0)) throw Error("A-ML-DFBE: noise variance must be positive");
  if (r.size() != h.rows()) throw DimensionMismatch("A-ML-DFBE: received length != N+L-1");
  cfg.validate(h.L(), h.N());
  const std::size_t N = h.N();
  if (fb.genie && fb.genie->size() != N) throw DimensionMismatch("genie frame length != N");

  const OpCount before = ops::tally();
  const BandGram gram(h);
  const CVec mf = cfg.use_matched_filter ? matched_filter_bank(h, r) : CVec{};

  std::vector<int> decided(N, 0);
  std::vector<double> gamma;
  if (record_gamma) gamma.resize(N);
  for (std::size_t k = 0; k < N; ++k) {
    const WindowState w = assemble_window(h, gram, k, cfg, sigma2);
    CVec y = forward_output(w, r, mf);
    if (!w.fed_back.empty()) {
      CVec past(w.fed_back.size());
      for (std::size_t j = 0; j < past.size(); ++j) {
        const std::size_t i = w.fed_back[j];
        past[j] = c.point(fb.genie ? (*fb.genie)[i] : decided[i]);
      }
      const CVec rebuilt = w.feedback_cols * past;
      for (std::size_t a = 0; a < y.size(); ++a) y[a] -= rebuilt[a];
      ops::add(y.size());
    }
    const ApproxMlDecision d = approx_ml_decide(w.lambda, w.target, y, c);
    decided[k] = d.index;
    if (record_gamma) gamma[k] = d.gamma;
  }

  DetectionResult out = DetectionResult::from_indices(std::move(decided), c);
  out.op_count = ops::tally() - before;
  out.gamma = std::move(gamma);
  return out;
}

}  // namespace

DetectionResult amldfbe_detect(const ChannelMatrix& h, const CVec& r, const AmlDfbeConfig& cfg,
                               const Constellation& c, double sigma2, FeedbackSource fb,
                               bool record_gamma) {
  if (!cfg.use_matched_filter) throw Error("amldfbe_detect: config disables the matched filter");
  return run_block_dfe(h, r, cfg, c, sigma2, fb, record_gamma);
}

DetectionResult amldfbe_detect_no_mf(const ChannelMatrix& h, const CVec& r, AmlDfbeConfig cfg,
                                     const Constellation& c, double sigma2, FeedbackSource fb) {
  cfg.use_matched_filter = false;
  return run_block_dfe(h, r, cfg, c, sigma2, fb, false);
}

}  // namespace equalab
