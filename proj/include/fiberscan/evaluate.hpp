#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fiberscan/pipeline.hpp"
#include "fiberscan/synthgen.hpp"

namespace fiberscan {

/// Fiber-level and document-level scores over a set of pages.
///
/// tp counts ground-truth fibers that were recalled, fn those that were not,
/// fp detected components that do not lie on any ground-truth fiber.
/// precision = tp / (tp + fp), recall = tp / (tp + fn), with 0/0 = 1.
struct Metrics {
  double fiber_precision = 1.0;
  double fiber_recall = 1.0;
  double doc_accuracy = 1.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t matched_detections = 0;
  std::size_t pages = 0;
  std::size_t correct_verdicts = 0;
};

inline constexpr double kDefaultMatchDist = 3.0;
/// A detection matches if at least this fraction of its pixels is near a fiber.
inline constexpr double kDetectionInlierFraction = 0.6;
/// A fiber is recalled if at least this fraction of its centerline is covered.
inline constexpr double kCenterlineCoverage = 0.5;

struct PageScore {
  std::size_t recalled = 0;
  std::size_t missed = 0;
  std::size_t matched_detections = 0;
  std::size_t spurious_detections = 0;
  bool verdict_correct = false;
};

PageScore score_page(const DetectionReport& report, const GroundTruth& truth, double match_dist);

Metrics evaluate(std::span<const DetectionReport> reports, std::span<const GroundTruth> truths,
                 double match_dist = kDefaultMatchDist);

/// Single-line JSON object with the metric fields the CLI prints.
std::string metrics_to_json(const Metrics& m);

struct CorpusPage {
  std::filesystem::path image;
  std::filesystem::path truth;
};

/// Pairs page_*.ppm images with their .json truth files. Throws kCorpus if
/// the directory has no pages or an image lacks its truth file.
std::vector<CorpusPage> list_corpus(const std::filesystem::path& dir);

/// Detects every page (using `jobs` worker threads) and scores the result.
Metrics evaluate_corpus(const std::filesystem::path& dir, const DetectorConfig& config,
                        double match_dist = kDefaultMatchDist, int jobs = 1);

}  // namespace fiberscan
