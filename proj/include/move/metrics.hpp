#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "move/dataset.hpp"
#include "move/types.hpp"

namespace move {

struct MetricReport {
  double map_all = 0.0;
  double map_head = 0.0;
  double map_medium = 0.0;
  double map_tail = 0.0;
  double top1 = 0.0;
  double top5 = 0.0;
  Vec per_class_ap;                     // 0 for classes without test positives
  std::vector<std::int64_t> positives;  // test positives per class
};

// Precision averaged at positive ranks; scores ranked descending with ties
// broken by original index. Rank-only, so any strictly monotone transform
// of the scores leaves it unchanged.
double average_precision(const Vec& scores, const std::vector<std::uint8_t>& positives);

// Pure function of (scores, labels, groups). Classes without positives are
// skipped, not errors. Top-1 hits when the argmax class is any positive;
// top-5 when any of the five best-scored classes is.
MetricReport evaluate(const Mat& scores, const std::vector<VecF>& labels,
                      const std::vector<ClassGroup>& groups);

std::string metric_report_csv_header();
std::string metric_report_csv_row(const MetricReport& report);
// Per-class rows: class, count, group, ap.
std::string per_class_csv(const MetricReport& report, const std::vector<ClassGroup>& groups);

}  // namespace move
