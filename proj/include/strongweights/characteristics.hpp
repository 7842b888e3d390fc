#pragma once

#include "strongweights/exponents.hpp"
#include "strongweights/grid.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sw {

struct CharacteristicReport
{
  ClassKind     kind;
  double        exponent;
  double        value; // +inf when a power moment overflows; argmax is then the offending box
  BoxIdx        argmax;
  std::uint64_t boxes_scanned;
};

struct ScanOptions
{
  // Number of disjoint leading-index partitions, each scanned on its own
  // thread. The result does not depend on this value.
  unsigned partitions = 1;
};

/// Exact supremum over every positive-measure box of <w> <w^p1>^(p-1).
CharacteristicReport ap_characteristic(const WeightedGrid &grid, PParam p, const ScanOptions &opts = {});

/// Exact supremum over every positive-measure box of <w^p>^(1/p) / <w>.
CharacteristicReport rh_characteristic(const WeightedGrid &grid, PParam p, const ScanOptions &opts = {});

/// Either characteristic for a raw exponent: q > 1 for the A-class, q >= 1 for
/// the RH-class.
CharacteristicReport characteristic(const WeightedGrid &grid, ClassKind kind, double q,
                                    const ScanOptions &opts = {});

struct QScanEntry
{
  double                q;
  std::optional<double> value;
  std::optional<BoxIdx> argmax;
  std::string           error; // non-empty when q was rejected
};

/// Characteristics for a list of exponents; invalid entries are recorded and skipped.
std::vector<QScanEntry> q_scan(const WeightedGrid &grid, ClassKind kind, std::span<const double> q_list,
                               const ScanOptions &opts = {});

} // namespace sw
