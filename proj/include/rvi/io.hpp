#pragma once

#include "rvi/dp.hpp"
#include "rvi/model.hpp"
#include "rvi/solvers.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rvi {

/**
 * Parses the POMDP text format used by the public test-bed files: preamble
 * (discount, values, states, actions, observations, start) followed by T:, O:
 * and R: entries in single, row or matrix form, with `*`, `uniform` and
 * `identity`. Later entries override earlier ones.
 *
 * `values: cost` negates rewards. R entries that depend on the next state or
 * observation are averaged into r(s, a) under the model's own T and O, and a
 * note is appended to `warnings`. Rows that do not sum to 1 within 1e-6 are
 * rejected with a ModelError naming each of them.
 */
PomdpModel parse_pomdp(std::string_view text, std::vector<std::string>* warnings = nullptr);

/// Text form that parse_pomdp reads back to an equal model. Zero entries are omitted.
std::string serialize_pomdp(const PomdpModel& model);

/// Whole file, or standard input for "-".
std::string read_text(const std::string& path);
/// Writes the file, or standard output for "-".
void write_text(const std::string& path, std::string_view text);

/*
 * Vector-set files. Header `dim=<n> region=<tag>`, then per vector a field
 * line and a value line, with a blank line between vectors:
 *
 *   action=2 support=0,3 history=4:1,0:6
 *   0.10000000000000001 -3.5
 *
 * Family files add `basis=tau|phi` to the header and `entry=<a>:<z>` (or
 * `*:<z>` for observation-keyed families) to every vector.
 */
std::string format_vector_set(const VectorSet& set, int num_states);
std::string format_family(const SimplexFamily& family, int num_states);

using ValueFunction = std::variant<VectorSet, SimplexFamily>;

/// Reads either kind of file. Family bases are rebuilt from `model`.
ValueFunction parse_value_function(std::string_view text, const PomdpModel& model);
/// Plain vector-set files only; no model needed.
VectorSet parse_vector_set(std::string_view text);

std::string stats_csv_header();
std::string format_stats_csv(std::span<const IterationStats> stats);

/// One line per action: `<name or index> rich|poor`; `#` starts a comment.
ActionClassification parse_classes(std::string_view text, const PomdpModel& model);
std::string format_classes(const ActionClassification& classes, const PomdpModel& model);

} // namespace rvi
