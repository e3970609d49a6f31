#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "fiberscan/pipeline.hpp"
#include "fiberscan/synthgen.hpp"

// JSON forms of the detector config, the per-page report, synthetic specs and
// ground-truth files. All parsers throw fiberscan::Error.

namespace fiberscan {

inline constexpr int kReportSchemaVersion = 1;

/// Flat object, one key per DetectorConfig field. Missing keys keep the
/// values already in `base`; unknown keys are rejected.
DetectorConfig config_from_json(std::string_view text, const DetectorConfig& base = {});
std::string config_to_json(const DetectorConfig& config);

std::string report_to_json(const DetectionReport& report, const std::string& input,
                           bool include_timings = true);

std::string truth_to_json(const GroundTruth& truth);
GroundTruth truth_from_json(std::string_view text);

SyntheticSpec spec_from_json(std::string_view text, const SyntheticSpec& base = {});
std::string spec_to_json(const SyntheticSpec& spec);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace fiberscan
