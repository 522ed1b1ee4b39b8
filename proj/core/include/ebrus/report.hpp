#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ebrus/bounds.hpp"
#include "ebrus/config.hpp"
#include "ebrus/spectral.hpp"
#include "ebrus/tangent.hpp"

namespace ebrus {

inline constexpr const char* kReportSchemaVersion = "1.0.0";

struct SweepRow {
  double value = 0.0;
  std::vector<BoundVerdict> verdicts;
};

struct Report {
  std::string schema_version = kReportSchemaVersion;
  std::string command;
  std::string config_text;  ///< emit_config of the run configuration
  std::string config_hash;  ///< FNV-1a 64 of config_text, hex
  std::uint64_t seed = 0;
  double runtime_seconds = 0.0;
  int threads = 1;

  std::optional<EmbeddingConstants> embedding;  ///< maximizers are not serialized
  std::optional<BoundSet> bounds;
  std::vector<BoundVerdict> verdicts;
  std::vector<ResidualCheck> residuals;
  std::vector<LyapunovReport> lyapunov;  ///< histories are not serialized
  std::optional<QmSummary> qm;
  std::optional<DimensionBound> dimension;
  std::vector<SweepRow> sweep;
  int exit_status = 0;
};

std::string fnv1a_hex(const std::string& text);

std::string to_json(const Report& r, int indent = 2);
Report report_from_json(const std::string& text);

}  // namespace ebrus
