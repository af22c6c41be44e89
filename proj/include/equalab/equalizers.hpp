#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "equalab/channel.hpp"
#include "equalab/constellation.hpp"
#include "equalab/numerics.hpp"
#include "equalab/window.hpp"

namespace equalab {

struct StateSpaceTooLarge : Error {
  using Error::Error;
};
struct SearchSpaceTooLarge : Error {
  using Error::Error;
};
struct UnknownDetector : Error {
  using Error::Error;
};

struct DetectionResult {
  std::vector<int> indices;  // constellation index per symbol
  CVec symbols;
  std::vector<std::uint8_t> bits;
  OpCount op_count;
  std::vector<double> gamma;  // per-symbol j_k^H Lambda_k^{-1} j_k when requested

  static DetectionResult from_indices(std::vector<int> idx, const Constellation& c);
};

/// Where decision feedback comes from. Genie feedback substitutes the true
/// symbols for past decisions.
struct FeedbackSource {
  const std::vector<int>* genie = nullptr;
};

DetectionResult amldfbe_detect(const ChannelMatrix& h, const CVec& r, const AmlDfbeConfig& cfg,
                               const Constellation& c, double sigma2, FeedbackSource fb = {},
                               bool record_gamma = false);
/// Same detector with the forward matched filter removed.
DetectionResult amldfbe_detect_no_mf(const ChannelMatrix& h, const CVec& r, AmlDfbeConfig cfg,
                                     const Constellation& c, double sigma2, FeedbackSource fb = {});

inline constexpr std::uint64_t kDefaultMlseStateCap = 1u << 20;

DetectionResult mlse_detect(const ChannelRealization& real, const CVec& r, const Constellation& c,
                            std::uint64_t state_cap = kDefaultMlseStateCap);

/// Brute force over all M^N frames; ties go to the lexicographically smallest
/// index vector.
DetectionResult exhaustive_ml(const ChannelMatrix& h, const CVec& r, const Constellation& c);

/// Squared distance ||r - H s|| ^2 for a candidate frame.
double sequence_metric(const ChannelMatrix& h, const CVec& r, const CVec& s);

struct MmseWindow {
  std::size_t row0 = 0;
  std::size_t rows = 0;
  std::vector<std::size_t> cols;  // columns of H that touch the window
  CMat hw;                        // rows x cols slice of H
};

/// Window of Lf received samples starting `lead` samples before the target's
/// first tap; truncated at the frame edges.
MmseWindow mmse_window(const ChannelMatrix& h, std::size_t k, std::size_t lf, std::size_t lead);

/// Sliding-window Wiener filter w = (H_w H_w^H + sigma2 I)^{-1} h_w for symbol k.
CVec lmmse_filter(const ChannelMatrix& h, std::size_t k, std::size_t lf, double sigma2,
                  std::size_t lead, MmseWindow* window_out = nullptr);

DetectionResult linear_mmse_detect(const ChannelMatrix& h, const CVec& r, const Constellation& c,
                                   double sigma2, std::size_t lf, std::size_t lead = 0);
DetectionResult mmse_dfe_detect(const ChannelMatrix& h, const CVec& r, const Constellation& c,
                                double sigma2, std::size_t lf, std::size_t lb,
                                FeedbackSource fb = {}, std::size_t lead = 0);

enum class DetectorKind { AmlDfbe, AmlDfbeNoMf, Mlse, Lmmse, MmseDfe, Exhaustive };

DetectorKind parse_detector(std::string_view id);
std::string_view detector_id(DetectorKind k);
/// Whether the detector takes a forward (window) length.
bool detector_uses_lf(DetectorKind k);

struct DetectorSpec {
  DetectorKind kind = DetectorKind::AmlDfbe;
  std::size_t lf = 10;
  std::optional<std::size_t> lb;  // MMSE-DFE only; defaults to L-1
  std::size_t lead = 0;           // MMSE baselines only
};

struct DetectInput {
  const ChannelRealization& channel;  // as seen by the receiver (true or estimated)
  const ChannelMatrix& matrix;        // built from `channel`
  const CVec& r;
  const Constellation& constellation;
  double sigma2;
  FeedbackSource feedback{};
};

DetectionResult detect(const DetectorSpec& spec, const DetectInput& in);

}  // namespace equalab
