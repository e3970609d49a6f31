#include "fiberscan/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <json.hpp>

#include "fiberscan/error.hpp"
#include "fiberscan/serialize.hpp"

namespace fiberscan {

namespace {

double ratio_or_one(std::size_t num, std::size_t den) {
  return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
}

double distance_to_fiber(Point2 p, const TruthFiber& fiber) {
  const auto& pts = fiber.points;
  if (pts.size() == 1) return std::hypot(p.x - pts[0].x, p.y - pts[0].y);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < pts.size(); ++i) {
    best = std::min(best, point_segment_distance(p, pts[i - 1], pts[i]));
  }
  return best;
}

}  // namespace

PageScore score_page(const DetectionReport& report, const GroundTruth& truth, double match_dist) {
  PageScore score;
  score.verdict_correct = (report.verdict == Verdict::kFake) == truth.model_page;

  for (const FiberComponent& comp : report.fibers) {
    std::size_t inliers = 0;
    for (const Pixel& px : comp.pixels) {
      const Point2 p{static_cast<double>(px.x), static_cast<double>(px.y)};
      for (const TruthFiber& f : truth.fibers) {
        if (distance_to_fiber(p, f) <= match_dist) {
          ++inliers;
          break;
        }
      }
    }
    const bool matched = !comp.pixels.empty() &&
                         static_cast<double>(inliers) >=
                             kDetectionInlierFraction * static_cast<double>(comp.pixels.size());
    ++(matched ? score.matched_detections : score.spurious_detections);
  }

  // Detected pixels on a grid so coverage is a local window search.
  int w = std::max(report.width, 1);
  int h = std::max(report.height, 1);
  std::vector<std::uint8_t> detected(static_cast<std::size_t>(w) * h, 0);
  for (const FiberComponent& comp : report.fibers) {
    for (const Pixel& p : comp.pixels) {
      if (p.x >= 0 && p.y >= 0 && p.x < w && p.y < h) {
        detected[static_cast<std::size_t>(p.y) * w + p.x] = 1;
      }
    }
  }
  const int reach = static_cast<int>(std::floor(match_dist));
  const double limit2 = match_dist * match_dist;
  const auto covered = [&](const Pixel& c) {
    for (int dy = -reach; dy <= reach; ++dy) {
      for (int dx = -reach; dx <= reach; ++dx) {
        if (static_cast<double>(dx * dx + dy * dy) > limit2) continue;
        const int x = c.x + dx;
        const int y = c.y + dy;
        if (x >= 0 && y >= 0 && x < w && y < h && detected[static_cast<std::size_t>(y) * w + x]) {
          return true;
        }
      }
    }
    return false;
  };
  for (const TruthFiber& f : truth.fibers) {
    const std::vector<Pixel> centerline = rasterize_polyline(f.points);
    const auto hits = static_cast<std::size_t>(std::count_if(centerline.begin(), centerline.end(), covered));
    const bool recalled = !centerline.empty() &&
                          static_cast<double>(hits) >=
                              kCenterlineCoverage * static_cast<double>(centerline.size());
    ++(recalled ? score.recalled : score.missed);
  }
  return score;
}

namespace {

Metrics aggregate(std::span<const PageScore> scores) {
  Metrics m;
  for (const PageScore& s : scores) {
    m.tp += s.recalled;
    m.fn += s.missed;
    m.fp += s.spurious_detections;
    m.matched_detections += s.matched_detections;
    m.correct_verdicts += s.verdict_correct ? 1 : 0;
  }
  m.pages = scores.size();
  m.fiber_precision = ratio_or_one(m.tp, m.tp + m.fp);
  m.fiber_recall = ratio_or_one(m.tp, m.tp + m.fn);
  m.doc_accuracy = ratio_or_one(m.correct_verdicts, m.pages);
  return m;
}

}  // namespace

Metrics evaluate(std::span<const DetectionReport> reports, std::span<const GroundTruth> truths,
                 double match_dist) {
  if (reports.size() != truths.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "evaluate: " + std::to_string(reports.size()) + " reports but " +
                    std::to_string(truths.size()) + " ground truths");
  }
  std::vector<PageScore> scores;
  scores.reserve(reports.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    scores.push_back(score_page(reports[i], truths[i], match_dist));
  }
  return aggregate(scores);
}

std::string metrics_to_json(const Metrics& m) {
  nlohmann::ordered_json j;
  j["fiber_precision"] = m.fiber_precision;
  j["fiber_recall"] = m.fiber_recall;
  j["doc_accuracy"] = m.doc_accuracy;
  j["tp"] = m.tp;
  j["fp"] = m.fp;
  j["fn"] = m.fn;
  return j.dump();
}

std::vector<CorpusPage> list_corpus(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::kCorpus, "corpus directory not found: " + dir.string());
  }
  std::vector<CorpusPage> pages;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto& path = entry.path();
    const auto ext = path.extension();
    if (!entry.is_regular_file() || (ext != ".ppm" && ext != ".pgm")) continue;
    auto truth = path;
    truth.replace_extension(".json");
    if (!std::filesystem::exists(truth)) {
      throw Error(ErrorCode::kCorpus, "missing ground-truth file for " + path.filename().string());
    }
    pages.push_back({path, truth});
  }
  if (pages.empty()) throw Error(ErrorCode::kCorpus, "corpus has no pages: " + dir.string());
  std::sort(pages.begin(), pages.end(),
            [](const CorpusPage& a, const CorpusPage& b) { return a.image < b.image; });
  return pages;
}

Metrics evaluate_corpus(const std::filesystem::path& dir, const DetectorConfig& config,
                        double match_dist, int jobs) {
  const std::vector<CorpusPage> pages = list_corpus(dir);
  std::vector<PageScore> scores(pages.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    for (std::size_t i = next++; i < pages.size(); i = next++) {
      try {
        const GroundTruth truth = truth_from_json(read_text_file(pages[i].truth));
        const DetectionReport report = run_pipeline(read_image(pages[i].image), config);
        scores[i] = score_page(report, truth, match_dist);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = pages.size();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, 64);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return aggregate(scores);
}

}  // namespace fiberscan
