#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gridbench/grid/case.hpp"

namespace gridbench::grid {

struct ImportOptions {
  /// Base voltage assigned to MATPOWER buses whose baseKV column is zero.
  double default_base_kv = 138.0;
};

/// Parses the native JSON case schema (described in README.md).
GridCase parse_native_case(std::string_view text);

/// Parses MATPOWER case text (`mpc.baseMVA`, `mpc.bus`, `mpc.gen`,
/// `mpc.branch`). Buses become substations with id = bus number, in-service
/// branches become lines with 0-based ids in file order, and nonzero bus
/// Pd/Qd and Gs/Bs become one load / one shunt per bus.
GridCase parse_matpower_case(std::string_view text, const ImportOptions& options = {});

/// Detects the format from the content and dispatches.
GridCase parse_case(std::string_view text, const ImportOptions& options = {});

GridCase load_case(const std::filesystem::path& path, const ImportOptions& options = {});

/// Serializes to the native schema. parse_native_case(to_native_json(c))
/// reproduces `c`.
std::string to_native_json(const GridCase& grid_case);

}  // namespace gridbench::grid
