#include <charconv>
#include <cmath>
#include <string>

#include "equalab/harness.hpp"

namespace equalab {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? next : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

double to_double(std::string_view s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError("not a number: '" + std::string(s) + "'");
  return v;
}

std::size_t to_size(std::string_view s) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
    throw ConfigError("not a non-negative integer: '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::vector<double> parse_snr_list(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw ConfigError("empty SNR list");
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("SNR range must be a:b:step");
    const double a = to_double(parts[0]), b = to_double(parts[1]), step = to_double(parts[2]);
    if (!(step > 0.0) || b < a) throw ConfigError("SNR range needs a <= b and step > 0");
    const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9));
    if (n > 100000) throw ConfigError("SNR range too long");
    for (std::size_t i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * step);
    return out;
  }
  for (std::string_view p : split(text, ',')) out.push_back(to_double(p));
  return out;
}

std::vector<std::size_t> parse_size_list(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw ConfigError("empty list");
  std::vector<std::size_t> out;
  for (std::string_view p : split(text, ',')) out.push_back(to_size(p));
  return out;
}

std::vector<DetectorSpec> parse_detector_list(std::string_view text,
                                              const std::vector<std::size_t>& lfs) {
  text = trim(text);
  if (text.empty()) throw ConfigError("empty detector list");
  std::vector<DetectorSpec> out;
  for (std::string_view item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() > 3) throw ConfigError("detector entry must be id[:lf[:lb]]");
    DetectorSpec base;
    try {
      base.kind = parse_detector(parts[0]);
    } catch (const UnknownDetector& e) {
      throw ConfigError(e.what());
    }
    if (parts.size() == 3) {
      if (base.kind != DetectorKind::MmseDfe) throw ConfigError("only mmse-dfe takes a backward length");
      base.lb = to_size(parts[2]);
    }
    if (parts.size() >= 2) {
      base.lf = to_size(parts[1]);
      out.push_back(base);
    } else if (!detector_uses_lf(base.kind)) {
      out.push_back(base);
    } else {
      if (lfs.empty()) throw ConfigError("no Lf given for " + std::string(parts[0]));
      for (std::size_t lf : lfs) {
        DetectorSpec d = base;
        d.lf = lf;
        out.push_back(d);
      }
    }
  }
  return out;
}

}  // namespace equalab
