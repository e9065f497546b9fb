#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "contain/control.hpp"
#include "contain/matrix.hpp"
#include "contain/sim.hpp"
#include "contain/synthesis.hpp"

namespace contain {

// Scenario files are sectioned key/value text:
//
//   # comment            (also ';')
//   [section]
//   key = value
//
// A value is a word, a number, a list of numbers ("1, 2, 3" or "[1, 2, 3]"),
// or a matrix "[[1, 0], [0, 1]]" which may continue over several lines until
// its brackets balance. Repeating a key appends another value (used for
// leader sinusoids). The grammar is documented in README.md.

struct DocumentEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;                 // line of the key
  std::vector<std::size_t> line_starts;  // value offset at which each physical line begins
};

struct ScenarioDocument {
  std::map<std::string, std::vector<DocumentEntry>> sections;

  [[nodiscard]] const DocumentEntry* find(const std::string& section, const std::string& key) const;
  [[nodiscard]] std::vector<const DocumentEntry*> find_all(const std::string& section, const std::string& key) const;
};

/// Splits text into sections and entries. Throws Error(Parse) with a line number.
[[nodiscard]] ScenarioDocument parse_document(std::string_view text);

[[nodiscard]] Matrix parse_matrix_value(const DocumentEntry& e, const std::string& section);
[[nodiscard]] Vector parse_list_value(const DocumentEntry& e, const std::string& section);
[[nodiscard]] double parse_number_value(const DocumentEntry& e, const std::string& section);

/// Builds a Scenario. Topology classification happens here; assumption checks
/// and controller-parameter validation do not. Throws Error(Parse) for syntax
/// or missing fields, and graph errors from build_topology.
[[nodiscard]] Scenario parse_scenario(std::string_view text);
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);

/// The bundled eight-agent scenario: followers 1-6 in an undirected ring,
/// leader 7 feeding followers 1 and 2, leader 8 feeding 4 and 5.
[[nodiscard]] std::string default_scenario_text();

/// Shortest decimal that round-trips to the same double.
[[nodiscard]] std::string format_double(double v);
[[nodiscard]] std::string format_matrix(const Matrix& m);

/// Gain sidecar file: a [gains] section in the same grammar.
[[nodiscard]] std::string format_gain_file(const GainSet& gains, double lmi_max_eig);
[[nodiscard]] GainSet parse_gain_file(std::string_view text);

struct ScenarioOverrides {
  std::optional<ControllerKind> controller;
  std::optional<double> kappa;
  std::optional<double> h;
  std::optional<double> t_end;
};

void apply_overrides(Scenario& scn, const ScenarioOverrides& o);

}  // namespace contain
