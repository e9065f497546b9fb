#include "contain/numeric_settings.hpp"

#include <charconv>
#include <string>

namespace contain {
namespace {

NumericSettings g_settings;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_value(std::string_view text, T& out) {
  text = trim(text);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

const NumericSettings& numeric_settings() noexcept { return g_settings; }

void set_numeric_settings(const NumericSettings& settings) noexcept { g_settings = settings; }

std::optional<NumericSettings> parse_numeric_settings(std::string_view text, NumericSettings base) {
  text = trim(text);
  if (text.empty()) return base;

  if (double bare = 0.0; text.find('=') == std::string_view::npos) {
    if (!parse_value(text, bare) || !(bare > 0.0)) return std::nullopt;
    base.solve_rel_tol = bare;
    return base;
  }

  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) continue;

    const auto eq = item.find('=');
    if (eq == std::string_view::npos) return std::nullopt;
    const auto key = trim(item.substr(0, eq));
    const auto value = item.substr(eq + 1);

    double d = 0.0;
    int i = 0;
    if (key == "care_iter" || key == "jacobi_sweeps") {
      if (!parse_value(value, i) || i <= 0) return std::nullopt;
      (key == "care_iter" ? base.care_max_iter : base.jacobi_max_sweeps) = i;
      continue;
    }
    if (!parse_value(value, d) || !(d > 0.0)) return std::nullopt;
    if (key == "solve") base.solve_rel_tol = d;
    else if (key == "eig") base.eig_rel_tol = d;
    else if (key == "pivot") base.pivot_floor = d;
    else if (key == "symmetry") base.symmetry_tol = d;
    else if (key == "hurwitz") base.hurwitz_min_eig = d;
    else if (key == "rank") base.rank_rel_tol = d;
    else return std::nullopt;
  }
  return base;
}

}  // namespace contain
