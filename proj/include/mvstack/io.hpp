#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mvstack/stacking.hpp"
#include "mvstack/types.hpp"

namespace mvstack {

// CSV ingestion, the simulation generator, and versioned model persistence.

inline constexpr const char* kModelFormat = "mvstack-model/1";

struct CsvTable {
  std::vector<std::string> header;  // empty when the file has no header row
  Matrix values;                    // missing cells (empty or NA) are NaN
};

// Rectangular numeric CSV; a header row is auto-detected by a non-numeric
// first record. Empty fields and the literal token NA parse as missing.
CsvTable read_csv(const std::filesystem::path& path);

void write_csv(const std::filesystem::path& path, const Matrix& values,
               const std::vector<std::string>& header = {});

struct LoadedData {
  Dataset dataset;
  ViewHierarchy hierarchy;
  std::vector<std::string> feature_names;
};

// outcome_spec is either a path to a single-column CSV or the name of a
// column in the feature file (requires a header).
LoadedData load_csv(const std::filesystem::path& features_path, const std::string& outcome_spec,
                    const std::filesystem::path& views_path, Family family,
                    std::optional<int> levels = std::nullopt);

// ---------------------------------------------------------------------------
// Simulation generator

struct MissingBlock {
  int row_begin = 1;  // 1-based, inclusive
  int row_end = 0;
  int view = 1;       // top-level view label
};

struct SimSpec {
  int n = 100;
  std::vector<int> view_sizes;       // top-level view sizes
  std::vector<int> sub_view_sizes;   // optional: nested sizes, must align with view boundaries
  int signal_count = 0;
  int signal_offset = 0;             // 0-based start of the signal block
  double signal_magnitude = 10.0;
  bool random_sign = true;
  Family family = Family::binomial;
  std::uint64_t seed = 1;
  std::optional<MissingBlock> missing;
};

struct SimResult {
  Dataset dataset;
  ViewHierarchy hierarchy;
  Vector coefficients;  // the generating coefficient vector
};

// Standard-normal features, a block of +/-`magnitude` coefficients, outcome
// drawn through the family's inverse link; the missing block is applied last.
SimResult simulate(const SimSpec& spec);

SimSpec sim_spec_from_json_file(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Model persistence (self-describing JSON container, format-versioned)

void save_model(const MvsModel& model, const std::filesystem::path& path);
MvsModel load_model(const std::filesystem::path& path);

}  // namespace mvstack
