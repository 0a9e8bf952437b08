#pragma once

#include "subsel/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace subsel {

/// Parses the JSON instance format:
///   {"blocks": [[[row], ...], ...], "coupling": [[column], ...],
///    "intercept": [column] (optional), "b": [...], "sigma": s}
/// Entries are strings ("p/q" or decimal literals) or JSON integers.
/// Throws InputError naming the offending field or violated invariant.
Instance parseInstance(const std::string& text);
Instance readInstance(const std::filesystem::path& path);

/// Canonical JSON text; parseInstance(writeInstance(x)) reproduces x exactly.
std::string writeInstance(const Instance& instance);

struct GeneratorOptions {
  int blocks = 3;
  int blockCols = 2;  // each block gets 1..blockCols columns
  int blockRows = 2;  // and 1..blockRows rows
  int coupling = 1;
  std::optional<int> sigma;  // drawn from 0..d when absent
  bool intercept = false;
  std::uint64_t seed = 1;
  int range = 3;  // entries p/q with |p| <= range, 1 <= q <= range
};

/// Deterministic for a fixed seed. Throws InputError on invalid options.
Instance generateInstance(const GeneratorOptions& options);

}  // namespace subsel
