#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "deprec/mdp.hpp"

namespace deprec {

inline constexpr const char* kMdpFormatVersion = "deprec-mdp/1";

// Syntax diagnostic with 1-based position information.
struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(int line_, int col_, const std::string& message)
      : std::runtime_error("line " + std::to_string(line_) + ", col " +
                           std::to_string(col_) + ": " + message),
        line(line_),
        col(col_) {}
};

// Structural violations reported by validate_mdp on a syntactically valid
// document.
struct ValidationError : std::runtime_error {
  std::vector<std::string> report;
  explicit ValidationError(std::vector<std::string> r)
      : std::runtime_error(r.empty() ? "invalid MDP" : r.front()),
        report(std::move(r)) {}
};

// Parses an MdpDocument. Probabilities accept decimals and exact fractions
// "p/q". Omitted rewards default to 0; omitted transition rows surface as
// row-sum violations. Rows within 1e-9 of 1 are renormalized exactly.
Mdp parse_mdp(const std::string& text);

// Canonical serialization: fixed field order, shortest round-trip decimals,
// zero rewards omitted. serialize(parse(serialize(m))) is byte-identical.
std::string serialize_mdp(const Mdp& mdp);

using SweepRow = std::pair<double, std::vector<double>>;

// Header "gamma,<state names...>", one row per gamma, 12 significant digits.
std::string write_sweep_csv(const std::vector<SweepRow>& rows,
                            const std::vector<std::string>& state_names);

// Minimal line chart: one polyline per state over the gamma axis.
std::string sweep_svg(const std::vector<SweepRow>& rows,
                      const std::vector<std::string>& state_names);

}  // namespace deprec
