#pragma once

#include <filesystem>
#include <string>

#include "cmcmc/types.hpp"

namespace cmcmc {

/// Reads a CSV with a header row.
///
/// location: every column is a coordinate.
/// regression / classification / counts: `response_column` holds y, every
///   other column is a feature.
/// pairwise: columns home_id, visitor_id, outcome (extra columns ignored).
///
/// Numbers are parsed with std::from_chars, independent of the C locale.
Dataset read_dataset_csv(const std::filesystem::path& path, DataKind kind,
                         const std::string& response_column = "y");

void write_dataset_csv(const Dataset& data, const std::filesystem::path& path,
                       const std::string& response_column = "y");

}  // namespace cmcmc
