#include "equalab/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "equalab/analysis.hpp"
#include "equalab/rng.hpp"

namespace equalab {

namespace {

enum Stream : std::uint64_t { kChannel = 0, kData = 1, kNoise = 2, kPilotNoise = 3, kPilotData = 4 };
constexpr std::uint64_t kAnalyticTag = 0xa7a1;

std::string label_of(const DetectorSpec& d) { return std::string(detector_id(d.kind)); }
std::size_t lf_of(const DetectorSpec& d) { return detector_uses_lf(d.kind) ? d.lf : 0; }

std::vector<int> random_indices(std::size_t n, int M, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_int_distribution<int> pick(0, M - 1);
  std::vector<int> idx(n);
  for (auto& v : idx) v = pick(eng);
  return idx;
}

CVec to_symbols(const std::vector<int>& idx, const Constellation& c) {
  CVec s(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) s[i] = c.point(idx[i]);
  return s;
}

struct FrameTally {
  std::uint64_t bits = 0, bit_errors = 0, symbol_errors = 0;
  double seconds = 0.0;
  OpCount ops;
};

struct FrameOutcome {
  std::vector<FrameTally> per_detector;
  std::string error;  // non-empty when a detector threw
};

FrameOutcome simulate_frame(const SweepConfig& cfg, const Constellation& c, std::size_t snr_idx,
                            std::uint64_t frame, const std::vector<char>& active) {
  FrameOutcome out;
  out.per_detector.resize(cfg.detectors.size());
  const std::uint64_t base = derive_seed({cfg.master_seed, snr_idx, frame});
  const NoiseModel noise = NoiseModel::from_snr_db(cfg.snr_db[snr_idx]);
  const std::size_t N = cfg.N, L = cfg.L;

  try {
    const bool ls = cfg.channel_est == ChannelEstimation::Ls;
    // pilot block, L-1 guard symbols, data block
    const std::size_t span = ls ? 2 * N + L - 1 : N;
    const ChannelRealization full =
        jakes_realize(cfg.fading, L, span, derive_seed({base, kChannel}));
    const ChannelRealization truth = ls ? full.slice(N + L - 1, N) : full;

    const std::vector<int> tx = random_indices(N, c.order(), derive_seed({base, kData}));
    const std::vector<std::uint8_t> tx_bits = c.to_bits(tx);
    const CVec r =
        transmit(ChannelMatrix(truth), to_symbols(tx, c), noise, derive_seed({base, kNoise}));

    ChannelRealization seen = truth;
    if (ls) {
      const CVec pilot =
          to_symbols(random_indices(N, c.order(), derive_seed({base, kPilotData})), c);
      const CVec rp = transmit(ChannelMatrix(full.slice(0, N)), pilot, noise,
                               derive_seed({base, kPilotNoise}));
      seen = ls_estimate(pilot, rp, L, N);
    }
    const ChannelMatrix h(seen);
    const DetectInput in{seen, h, r, c, noise.variance,
                         FeedbackSource{cfg.genie_feedback ? &tx : nullptr}};
    const int bps = c.bits_per_symbol();

    for (std::size_t d = 0; d < cfg.detectors.size(); ++d) {
      if (!active[d]) continue;
      const DetectorSpec& spec = cfg.detectors[d];
      const auto t0 = std::chrono::steady_clock::now();
      const DetectionResult res = cfg.detector ? cfg.detector(spec, in) : detect(spec, in);
      const auto t1 = std::chrono::steady_clock::now();
      if (res.indices.size() != N) throw DimensionMismatch("detector returned wrong frame length");

      std::size_t scored = N;
      if (cfg.score == ScoreRange::Averaged && detector_uses_lf(spec.kind))
        scored = averaged_symbols(N, spec.lf);
      FrameTally& t = out.per_detector[d];
      t.bits = scored * static_cast<std::uint64_t>(bps);
      for (std::size_t k = 0; k < scored; ++k) {
        if (res.indices[k] != tx[k]) ++t.symbol_errors;
        for (int b = 0; b < bps; ++b)
          if (res.bits[k * bps + b] != tx_bits[k * bps + b]) ++t.bit_errors;
      }
      t.ops = res.op_count;
      if (cfg.timing) t.seconds = std::chrono::duration<double>(t1 - t0).count();
    }
  } catch (const std::exception& e) {
    char seed[32];
    std::snprintf(seed, sizeof seed, "0x%016llx", static_cast<unsigned long long>(base));
    out.error = "frame " + std::to_string(frame) + " at " + std::to_string(cfg.snr_db[snr_idx]) +
                " dB (frame seed " + seed + "): " + e.what();
  }
  return out;
}

std::vector<BerRecord> sweep(const SweepConfig& cfg, int workers) {
  cfg.validate();
  const Constellation c(cfg.M);
  std::vector<BerRecord> records;
  const std::size_t D = cfg.detectors.size();

  for (std::size_t si = 0; si < cfg.snr_db.size(); ++si) {
    std::vector<BerRecord> point(D);
    std::vector<char> active(D, 1);
    std::uint64_t frames = 0;
    while (frames < cfg.trials_max && std::find(active.begin(), active.end(), 1) != active.end()) {
      const std::uint64_t nb = std::min<std::uint64_t>(cfg.batch_frames, cfg.trials_max - frames);
      std::vector<FrameOutcome> batch(nb);
      if (workers > 1) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
        for (std::int64_t f = 0; f < static_cast<std::int64_t>(nb); ++f)
          batch[f] = simulate_frame(cfg, c, si, frames + f, active);
      } else {
        for (std::uint64_t f = 0; f < nb; ++f)
          batch[f] = simulate_frame(cfg, c, si, frames + f, active);
      }
      for (const FrameOutcome& o : batch)
        if (!o.error.empty()) throw FrameError(o.error);
      for (std::size_t d = 0; d < D; ++d) {
        if (!active[d]) continue;
        BerRecord& rec = point[d];
        for (const FrameOutcome& o : batch) {
          const FrameTally& t = o.per_detector[d];
          rec.bits += t.bits;
          rec.bit_errors += t.bit_errors;
          rec.symbol_errors += t.symbol_errors;
          rec.wall_seconds += t.seconds;
          rec.ops += t.ops;
        }
        rec.frames += nb;
      }
      frames += nb;
      for (std::size_t d = 0; d < D; ++d)
        if (point[d].bit_errors >= cfg.min_bit_errors) active[d] = 0;
    }
    for (std::size_t d = 0; d < D; ++d) {
      BerRecord& rec = point[d];
      rec.detector = label_of(cfg.detectors[d]);
      rec.lf = lf_of(cfg.detectors[d]);
      rec.snr_db = cfg.snr_db[si];
      const double symbols = static_cast<double>(rec.bits) / c.bits_per_symbol();
      rec.ber = rec.bits ? static_cast<double>(rec.bit_errors) / static_cast<double>(rec.bits) : 0.0;
      rec.ser = symbols > 0 ? static_cast<double>(rec.symbol_errors) / symbols : 0.0;
      records.push_back(std::move(rec));
    }
  }
  return records;
}

std::vector<std::size_t> block_dfe_lfs(const SweepConfig& cfg) {
  std::vector<std::size_t> lfs;
  for (const DetectorSpec& d : cfg.detectors)
    if (d.kind == DetectorKind::AmlDfbe && std::find(lfs.begin(), lfs.end(), d.lf) == lfs.end())
      lfs.push_back(d.lf);
  return lfs;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void SweepConfig::validate() const {
  if (snr_db.empty()) throw ConfigError("no SNR points");
  for (double s : snr_db)
    if (!std::isfinite(s)) throw ConfigError("SNR must be finite");
  if (detectors.empty()) throw ConfigError("no detectors");
  if (N == 0) throw ConfigError("N must be >= 1");
  if (L == 0) throw ConfigError("L must be >= 1");
  if (M < 2 || (M & (M - 1)) != 0) throw ConfigError("modulation order must be a power of two >= 2");
  if (trials_max < 1) throw ConfigError("trials_max must be >= 1");
  if (batch_frames < 1) throw ConfigError("batch_frames must be >= 1");
  if (analytic_realizations < 1) throw ConfigError("analytic_realizations must be >= 1");
  try {
    fading.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  for (const DetectorSpec& d : detectors) {
    if (!detector_uses_lf(d.kind)) continue;
    if (d.lf == 0) throw ConfigError("Lf must be >= 1");
    if ((d.kind == DetectorKind::AmlDfbe && d.lf > N) ||
        (d.kind == DetectorKind::AmlDfbeNoMf && d.lf > N + L - 1))
      throw ConfigError("Lf larger than the frame");
    if ((d.kind == DetectorKind::Lmmse || d.kind == DetectorKind::MmseDfe) && d.lf < L)
      throw ConfigError("MMSE window shorter than the channel");
  }
  if (channel_est == ChannelEstimation::Ls && N < L)
    throw ConfigError("LS estimation needs a pilot of at least L symbols");
}

int worker_count(int requested) {
  int n = requested > 0 ? requested : omp_get_max_threads();
  if (const char* cap = std::getenv("EQUALAB_THREADS")) {
    const int c = std::atoi(cap);
    if (c > 0) n = std::min(n, c);
  }
  return std::max(n, 1);
}

std::vector<BerRecord> run_sweep(const SweepConfig& cfg) {
  return sweep(cfg, worker_count(cfg.threads));
}

std::vector<BerRecord> run_sweep_serial(const SweepConfig& cfg) { return sweep(cfg, 1); }

std::vector<BerRecord> analytic_curve(const SweepConfig& cfg) {
  cfg.validate();
  const SerModel m(cfg.M);
  const std::size_t R = cfg.analytic_realizations;
  const std::vector<std::size_t> lfs = block_dfe_lfs(cfg);
  std::vector<BerRecord> out;
  // same R channels at every SNR
  std::vector<ChannelMatrix> channels;
  channels.reserve(R);
  for (std::size_t i = 0; i < R; ++i)
    channels.emplace_back(
        jakes_realize(cfg.fading, cfg.L, cfg.N, derive_seed({cfg.master_seed, kAnalyticTag, i})));
  const int workers = worker_count(cfg.threads);
  for (std::size_t lf : lfs) {
    for (double snr : cfg.snr_db) {
      const double sigma2 = NoiseModel::from_snr_db(snr).variance;
      std::vector<double> per(R);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
      for (std::int64_t i = 0; i < static_cast<std::int64_t>(R); ++i)
        per[i] = ber_frame(channels[i], lf, sigma2, m);
      double acc = 0.0;
      for (double v : per) acc += v;
      BerRecord rec;
      rec.detector = "amldfbe";
      rec.lf = lf;
      rec.snr_db = snr;
      rec.frames = R;
      rec.ber = acc / static_cast<double>(R);
      rec.ser = rec.ber * std::log2(static_cast<double>(cfg.M));
      rec.source = "analytic";
      out.push_back(rec);
    }
  }
  return out;
}

std::vector<BerRecord> bound_curve(const SweepConfig& cfg) {
  cfg.validate();
  const SerModel m(cfg.M);
  std::vector<BerRecord> out;
  for (std::size_t lf : block_dfe_lfs(cfg)) {
    for (double snr : cfg.snr_db) {
      BerRecord rec;
      rec.detector = "amldfbe-bound";
      rec.lf = lf;
      rec.snr_db = snr;
      rec.ser = diversity_bound(std::pow(10.0, snr / 10.0), cfg.L, lf, m);
      rec.ber = rec.ser / std::log2(static_cast<double>(cfg.M));
      rec.source = "analytic";
      out.push_back(rec);
    }
  }
  return out;
}

void write_csv(std::ostream& os, const std::vector<BerRecord>& records) {
  os << kCsvHeader << '\n';
  for (const BerRecord& r : records)
    os << r.detector << ',' << r.lf << ',' << fmt(r.snr_db) << ',' << r.frames << ',' << r.bits
       << ',' << r.bit_errors << ',' << r.symbol_errors << ',' << fmt(r.ber) << ',' << fmt(r.ser)
       << ',' << fmt(r.wall_seconds) << ',' << r.source << '\n';
}

std::vector<BerRecord> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw ConfigError("read_csv: bad header");
  std::vector<BerRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 11) throw ConfigError("read_csv: expected 11 fields: " + line);
    BerRecord r;
    try {
      r.detector = f[0];
      r.lf = std::stoul(f[1]);
      r.snr_db = std::stod(f[2]);
      r.frames = std::stoull(f[3]);
      r.bits = std::stoull(f[4]);
      r.bit_errors = std::stoull(f[5]);
      r.symbol_errors = std::stoull(f[6]);
      r.ber = std::stod(f[7]);
      r.ser = std::stod(f[8]);
      r.wall_seconds = std::stod(f[9]);
    } catch (const std::exception&) {
      throw ConfigError("read_csv: malformed row: " + line);
    }
    r.source = f[10];
    out.push_back(std::move(r));
  }
  return out;
}

void write_ops_csv(std::ostream& os, const std::vector<BerRecord>& records,
                   const SweepConfig& cfg) {
  os << "detector,lf,snr_db,frames,mul_per_frame,add_per_frame,model_mul,model_add\n";
  for (const BerRecord& r : records) {
    if (r.source != "sim" || r.frames == 0) continue;
    const double f = static_cast<double>(r.frames);
    std::string model_mul = "", model_add = "";
    if (r.detector == "amldfbe" || r.detector == "lmmse" || r.detector == "mmse-dfe") {
      const Complexity cm = complexity_model(r.detector, cfg.N, cfg.L, r.lf, cfg.L - 1);
      model_mul = fmt(cm.multiplications);
      model_add = fmt(cm.additions);
    }
    os << r.detector << ',' << r.lf << ',' << fmt(r.snr_db) << ',' << r.frames << ','
       << fmt(static_cast<double>(r.ops.mul) / f) << ',' << fmt(static_cast<double>(r.ops.add) / f)
       << ',' << model_mul << ',' << model_add << '\n';
  }
}

}  // namespace equalab
