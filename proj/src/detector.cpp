#include <array>
#include <utility>

#include "equalab/equalizers.hpp"

namespace equalab {

namespace {
constexpr std::array<std::pair<std::string_view, DetectorKind>, 6> kIds{{
    {"amldfbe", DetectorKind::AmlDfbe},
    {"amldfbe-nomf", DetectorKind::AmlDfbeNoMf},
    {"mlse", DetectorKind::Mlse},
    {"lmmse", DetectorKind::Lmmse},
    {"mmse-dfe", DetectorKind::MmseDfe},
    {"exhaustive", DetectorKind::Exhaustive},
}};
}  // namespace

DetectorKind parse_detector(std::string_view id) {
  for (const auto& [name, kind] : kIds)
    if (name == id) return kind;
  throw UnknownDetector("unknown detector '" + std::string(id) + "'");
}

std::string_view detector_id(DetectorKind k) {
  for (const auto& [name, kind] : kIds)
    if (kind == k) return name;
  return "?";
}

bool detector_uses_lf(DetectorKind k) {
  return k != DetectorKind::Mlse && k != DetectorKind::Exhaustive;
}

DetectionResult detect(const DetectorSpec& spec, const DetectInput& in) {
  const std::size_t L = in.matrix.L();
  switch (spec.kind) {
    case DetectorKind::AmlDfbe:
      return amldfbe_detect(in.matrix, in.r, AmlDfbeConfig::for_channel(L, spec.lf, true),
                            in.constellation, in.sigma2, in.feedback);
    case DetectorKind::AmlDfbeNoMf:
      return amldfbe_detect_no_mf(in.matrix, in.r, AmlDfbeConfig::for_channel(L, spec.lf, false),
                                  in.constellation, in.sigma2, in.feedback);
    case DetectorKind::Mlse:
      return mlse_detect(in.channel, in.r, in.constellation);
    case DetectorKind::Lmmse:
      return linear_mmse_detect(in.matrix, in.r, in.constellation, in.sigma2, spec.lf, spec.lead);
    case DetectorKind::MmseDfe:
      return mmse_dfe_detect(in.matrix, in.r, in.constellation, in.sigma2, spec.lf,
                             spec.lb.value_or(L > 1 ? L - 1 : 1), in.feedback, spec.lead);
    case DetectorKind::Exhaustive:
      return exhaustive_ml(in.matrix, in.r, in.constellation);
  }
  throw UnknownDetector("unhandled detector kind");
}

}  // namespace equalab
