#pragma once

// Feature dataset file ("dataset/1"): a comment line carrying format,
// registry, seed and tool version, a header of registry names, one row per
// site. Labels are 1, 0 or empty (unlabeled).

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pwlab/features.hpp"

namespace pwlab {

struct Dataset {
    std::uint64_t seed = 0;
    std::string registry = kFeatureRegistry;
    std::vector<FeatureVector> rows;

    /// Rows that carry a label.
    std::vector<const FeatureVector*> labeled() const;
};

std::string serialize_dataset(const Dataset& ds);
/// Throws VersionMismatch for a foreign format, RegistryMismatch when the
/// registry tag or column names differ from features/1, SchemaError for
/// malformed rows.
Dataset deserialize_dataset(std::string_view bytes);

}  // namespace pwlab
