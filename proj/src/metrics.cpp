#include "move/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "move/errors.hpp"
#include "move/manifest.hpp"

namespace move {

double average_precision(const Vec& scores, const std::vector<std::uint8_t>& positives) {
  if (scores.size() != static_cast<Eigen::Index>(positives.size())) {
    throw DimensionError("average_precision: score/label length mismatch");
  }
  std::vector<int> order(positives.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&scores](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  std::int64_t seen_positives = 0;
  double sum = 0.0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (positives[static_cast<std::size_t>(order[rank])]) {
      ++seen_positives;
      sum += static_cast<double>(seen_positives) / static_cast<double>(rank + 1);
    }
  }
  if (seen_positives == 0) throw ArgumentError("average_precision: no positives");
  return sum / static_cast<double>(seen_positives);
}

namespace {

double group_mean(const Vec& ap, const std::vector<std::int64_t>& positives,
                  const std::vector<ClassGroup>& groups, const ClassGroup* which) {
  double sum = 0.0;
  std::int64_t n = 0;
  for (Eigen::Index s = 0; s < ap.size(); ++s) {
    if (positives[static_cast<std::size_t>(s)] == 0) continue;
    if (which != nullptr && groups[static_cast<std::size_t>(s)] != *which) continue;
    sum += ap[s];
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

// Indices of the k best scores, ties broken by class index.
std::vector<int> top_k(const Vec& row, int k) {
  std::vector<int> order(static_cast<std::size_t>(row.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&row](int a, int b) {
    if (row[a] != row[b]) return row[a] > row[b];
    return a < b;
  });
  order.resize(static_cast<std::size_t>(std::min<Eigen::Index>(k, row.size())));
  return order;
}

}  // namespace

MetricReport evaluate(const Mat& scores, const std::vector<VecF>& labels,
                      const std::vector<ClassGroup>& groups) {
  const auto num_videos = scores.rows();
  const auto num_classes = scores.cols();
  if (num_videos == 0) throw ArgumentError("evaluate: empty test set");
  if (static_cast<Eigen::Index>(labels.size()) != num_videos) {
    throw DimensionError("evaluate: score/label video counts disagree");
  }
  if (static_cast<Eigen::Index>(groups.size()) != num_classes) {
    throw DimensionError("evaluate: groups must cover all classes");
  }

  MetricReport report;
  report.per_class_ap = Vec::Zero(num_classes);
  report.positives.assign(static_cast<std::size_t>(num_classes), 0);

  for (Eigen::Index s = 0; s < num_classes; ++s) {
    std::vector<std::uint8_t> pos(static_cast<std::size_t>(num_videos), 0);
    std::int64_t count = 0;
    for (Eigen::Index i = 0; i < num_videos; ++i) {
      if (labels[static_cast<std::size_t>(i)][s] > 0.5f) {
        pos[static_cast<std::size_t>(i)] = 1;
        ++count;
      }
    }
    report.positives[static_cast<std::size_t>(s)] = count;
    if (count > 0) {
      report.per_class_ap[s] = average_precision(scores.col(s), pos);
    }
  }

  const ClassGroup head = ClassGroup::kHead;
  const ClassGroup medium = ClassGroup::kMedium;
  const ClassGroup tail = ClassGroup::kTail;
  report.map_all = group_mean(report.per_class_ap, report.positives, groups, nullptr);
  report.map_head = group_mean(report.per_class_ap, report.positives, groups, &head);
  report.map_medium = group_mean(report.per_class_ap, report.positives, groups, &medium);
  report.map_tail = group_mean(report.per_class_ap, report.positives, groups, &tail);

  std::int64_t hit1 = 0, hit5 = 0;
  for (Eigen::Index i = 0; i < num_videos; ++i) {
    const VecF& y = labels[static_cast<std::size_t>(i)];
    const std::vector<int> best = top_k(scores.row(i).transpose(), 5);
    if (y[best[0]] > 0.5f) ++hit1;
    for (int cls : best) {
      if (y[cls] > 0.5f) {
        ++hit5;
        break;
      }
    }
  }
  report.top1 = static_cast<double>(hit1) / static_cast<double>(num_videos);
  report.top5 = static_cast<double>(hit5) / static_cast<double>(num_videos);
  return report;
}

std::string metric_report_csv_header() {
  return "mAP_all,mAP_head,mAP_medium,mAP_tail,top1,top5";
}

std::string metric_report_csv_row(const MetricReport& r) {
  return fmt_double(r.map_all) + "," + fmt_double(r.map_head) + "," + fmt_double(r.map_medium) +
         "," + fmt_double(r.map_tail) + "," + fmt_double(r.top1) + "," + fmt_double(r.top5);
}

std::string per_class_csv(const MetricReport& report, const std::vector<ClassGroup>& groups) {
  std::string out = "class,count,group,ap\n";
  for (Eigen::Index s = 0; s < report.per_class_ap.size(); ++s) {
    out += std::to_string(s) + "," + std::to_string(report.positives[static_cast<std::size_t>(s)]) +
           "," + to_string(groups[static_cast<std::size_t>(s)]) + "," +
           fmt_double(report.per_class_ap[s]) + "\n";
  }
  return out;
}

}  // namespace move
