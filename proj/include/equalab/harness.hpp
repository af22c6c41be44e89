#pragma once

// Seeded Monte Carlo BER/SER sweeps over (detector, SNR) points with early
// stopping, analytic and bound curves, and CSV output.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "equalab/channel.hpp"
#include "equalab/equalizers.hpp"

namespace equalab {

struct ConfigError : Error {
  using Error::Error;
};

/// Raised when a detector fails inside a sweep; names the frame seed.
struct FrameError : Error {
  using Error::Error;
};

enum class ChannelEstimation { Perfect, Ls };

/// Which symbols of a frame are scored. Averaged keeps the leading
/// averaged_symbols(N, Lf) symbols of windowed detectors.
enum class ScoreRange { All, Averaged };

using DetectorFn = std::function<DetectionResult(const DetectorSpec&, const DetectInput&)>;

struct SweepConfig {
  std::vector<double> snr_db{10.0};
  std::vector<DetectorSpec> detectors{DetectorSpec{}};
  std::size_t N = 128;
  std::size_t L = 5;
  int M = 2;
  FadingParams fading = FadingParams::from_doppler(1e-4);
  ChannelEstimation channel_est = ChannelEstimation::Perfect;
  std::uint64_t trials_max = 1'000'000;  // frames per point
  std::uint64_t min_bit_errors = 200;
  std::uint64_t master_seed = 1;
  std::size_t batch_frames = 32;
  bool genie_feedback = false;
  ScoreRange score = ScoreRange::All;
  bool timing = true;  // false writes wall_seconds = 0
  std::size_t analytic_realizations = 200;
  int threads = 0;  // 0: OpenMP default, still capped by EQUALAB_THREADS

  DetectorFn detector;  // empty: the built-in dispatch

  void validate() const;
};

struct BerRecord {
  std::string detector;
  std::size_t lf = 0;
  double snr_db = 0.0;
  std::uint64_t frames = 0;
  std::uint64_t bits = 0;
  std::uint64_t bit_errors = 0;
  std::uint64_t symbol_errors = 0;
  double ber = 0.0;
  double ser = 0.0;
  double wall_seconds = 0.0;
  std::string source = "sim";
  OpCount ops;  // accumulated over all frames, sim only
};

inline constexpr std::string_view kCsvHeader =
    "detector,lf,snr_db,frames,bits,bit_errors,symbol_errors,ber,ser,wall_seconds,source";

/// Worker count after the EQUALAB_THREADS cap.
int worker_count(int requested);

/// Frames of a point run in fixed batches across OpenMP workers; results are
/// reduced in frame order, so records do not depend on the worker count.
std::vector<BerRecord> run_sweep(const SweepConfig& cfg);
/// Single-threaded reference with identical output.
std::vector<BerRecord> run_sweep_serial(const SweepConfig& cfg);

/// Frame-averaged analytic BER of every matched-filter block DFE entry,
/// averaged over cfg.analytic_realizations seeded channels.
std::vector<BerRecord> analytic_curve(const SweepConfig& cfg);
/// Diversity bound for the same entries; reported as detector "amldfbe-bound".
std::vector<BerRecord> bound_curve(const SweepConfig& cfg);

void write_csv(std::ostream& os, const std::vector<BerRecord>& records);
std::vector<BerRecord> read_csv(std::istream& is);
/// Per-frame measured operation counts next to the closed-form model.
void write_ops_csv(std::ostream& os, const std::vector<BerRecord>& records,
                   const SweepConfig& cfg);

// Parsing helpers shared by the CLI and config files.
std::vector<double> parse_snr_list(std::string_view text);
std::vector<std::size_t> parse_size_list(std::string_view text);
/// "id[:lf[:lb]],..."; ids without a pinned lf are crossed with `lfs`.
std::vector<DetectorSpec> parse_detector_list(std::string_view text,
                                              const std::vector<std::size_t>& lfs);

}  // namespace equalab
