#include <cmath>
#include <limits>

#include "equalab/equalizers.hpp"

namespace equalab {

namespace {

std::uint64_t checked_pow(std::uint64_t base, std::size_t exp, std::uint64_t cap) {
  std::uint64_t v = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (v > cap / base) return cap + 1;
    v *= base;
  }
  return v;
}

// |r_t - sum_l h_l(t-l) s_{t-l}|^2 with s taken from `sym(t-l)` for the
// symbols that exist.
template <class SymbolAt>
double row_metric(const ChannelRealization& ch, const CVec& r, std::size_t t, SymbolAt sym) {
  cplx pred = 0.0;
  for (std::size_t l = 0; l < ch.L; ++l) {
    if (l > t) break;
    const std::size_t j = t - l;
    if (j >= ch.N) continue;
    pred += ch.tap(l, j) * sym(j);
  }
  return std::norm(r[t] - pred);
}

}  // namespace

DetectionResult mlse_detect(const ChannelRealization& ch, const CVec& r, const Constellation& c,
                            std::uint64_t state_cap) {
  const std::size_t N = ch.N, L = ch.L;
  if (r.size() != N + L - 1) throw DimensionMismatch("mlse: received length != N+L-1");
  const std::uint64_t M = static_cast<std::uint64_t>(c.order());
  const OpCount before = ops::tally();

  if (L == 1) {
    std::vector<int> idx(N);
    for (std::size_t t = 0; t < N; ++t) {
      double best = std::numeric_limits<double>::infinity();
      for (int m = 0; m < c.order(); ++m) {
        const double d = std::norm(r[t] - ch.tap(0, t) * c.point(m));
        if (d < best) {
          best = d;
          idx[t] = m;
        }
      }
    }
    ops::mul(N * M);
    ops::add(N * M);
    DetectionResult out = DetectionResult::from_indices(std::move(idx), c);
    out.op_count = ops::tally() - before;
    return out;
  }

  const std::size_t K = L - 1;  // channel memory
  const std::uint64_t S = checked_pow(M, K, state_cap);
  if (S > state_cap) throw StateSpaceTooLarge("mlse: M^(L-1) exceeds the state cap");
  if (N <= K) return exhaustive_ml(ChannelMatrix(ch), r, c);

  // state digit d holds the index of s_{t-1-d}
  auto digit = [&](std::uint64_t state, std::size_t d) {
    for (std::size_t i = 0; i < d; ++i) state /= M;
    return static_cast<int>(state % M);
  };
  const std::uint64_t top = S / M;  // weight of the oldest digit

  std::vector<double> metric(S), next(S);
  // first K symbols enumerated directly: state s encodes s_{K-1} .. s_0
  for (std::uint64_t s = 0; s < S; ++s) {
    double acc = 0.0;
    for (std::size_t t = 0; t < K; ++t)
      acc += row_metric(ch, r, t, [&](std::size_t j) { return c.point(digit(s, K - 1 - j)); });
    metric[s] = acc;
  }
  ops::mul(S * K * L);
  ops::add(S * K * L);

  std::vector<std::uint8_t> back((N - K) * S);
  std::vector<cplx> isi(S);
  for (std::size_t t = K; t < N; ++t) {
    for (std::uint64_t ps = 0; ps < S; ++ps) {
      cplx acc = 0.0;
      std::uint64_t st = ps;
      for (std::size_t l = 1; l <= K; ++l) {
        acc += ch.tap(l, t - l) * c.point(static_cast<int>(st % M));
        st /= M;
      }
      isi[ps] = acc;
    }
    std::fill(next.begin(), next.end(), std::numeric_limits<double>::infinity());
    for (std::uint64_t ps = 0; ps < S; ++ps) {
      const std::uint64_t shifted = (ps * M) % S;
      const auto oldest = static_cast<std::uint8_t>(ps / top);
      for (std::uint64_t m = 0; m < M; ++m) {
        const double bm = std::norm(r[t] - isi[ps] - ch.tap(0, t) * c.point(static_cast<int>(m)));
        const double cand = metric[ps] + bm;
        const std::uint64_t ns = shifted + m;
        if (cand < next[ns]) {
          next[ns] = cand;
          back[(t - K) * S + ns] = oldest;
        }
      }
    }
    metric.swap(next);
    ops::mul(S * K + S * M * 2);
    ops::add(S * K + S * M * 3);
  }

  // zero-padded tail rows depend only on the final state
  std::uint64_t best_state = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t s = 0; s < S; ++s) {
    double acc = metric[s];
    for (std::size_t t = N; t < N + K; ++t)
      acc += row_metric(ch, r, t, [&](std::size_t j) { return c.point(digit(s, N - 1 - j)); });
    if (acc < best) {
      best = acc;
      best_state = s;
    }
  }
  ops::mul(S * K * L);
  ops::add(S * K * L);

  std::vector<int> idx(N);
  std::uint64_t state = best_state;
  for (std::size_t t = N; t-- > K;) {
    idx[t] = static_cast<int>(state % M);
    state = state / M + static_cast<std::uint64_t>(back[(t - K) * S + state]) * top;
  }
  for (std::size_t j = 0; j < K; ++j) idx[j] = digit(state, K - 1 - j);

  DetectionResult out = DetectionResult::from_indices(std::move(idx), c);
  out.op_count = ops::tally() - before;
  return out;
}

double sequence_metric(const ChannelMatrix& h, const CVec& r, const CVec& s) {
  const CVec hs = convolve(h, s);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) acc += std::norm(r[i] - hs[i]);
  return acc;
}

DetectionResult exhaustive_ml(const ChannelMatrix& h, const CVec& r, const Constellation& c) {
  const std::size_t N = h.N(), L = h.L();
  if (r.size() != h.rows()) throw DimensionMismatch("exhaustive_ml: received length != N+L-1");
  const std::uint64_t M = static_cast<std::uint64_t>(c.order());
  if (checked_pow(M, N, 1u << 24) > (1u << 24))
    throw SearchSpaceTooLarge("exhaustive_ml: M^N exceeds 2^24");

  // depth-first in lexicographic order; row t of ||r - Hs||^2 is final once
  // s_t is fixed, so partial sums are exact prefix metrics
  std::vector<int> cur(N, 0), best_idx(N, 0);
  std::vector<double> prefix(N + 1, 0.0);
  double best = std::numeric_limits<double>::infinity();
  auto row = [&](std::size_t t) {
    cplx pred = 0.0;
    for (std::size_t l = 0; l < L && l <= t; ++l) {
      const std::size_t j = t - l;
      if (j < N) pred += h.band(j, l) * c.point(cur[j]);
    }
    return std::norm(r[t] - pred);
  };
  std::size_t depth = 0;
  cur[0] = -1;
  while (true) {
    if (++cur[depth] >= static_cast<int>(M)) {
      if (depth == 0) break;
      --depth;
      continue;
    }
    prefix[depth + 1] = prefix[depth] + row(depth);
    if (depth + 1 < N) {
      ++depth;
      cur[depth] = -1;
      continue;
    }
    double total = prefix[N];
    for (std::size_t t = N; t < N + L - 1; ++t) total += row(t);
    if (total < best) {
      best = total;
      best_idx = cur;
    }
  }
  return DetectionResult::from_indices(std::move(best_idx), c);
}

}  // namespace equalab
