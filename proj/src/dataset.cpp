#include "move/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "move/errors.hpp"

namespace move {

std::string to_string(CountStrategy s) {
  switch (s) {
    case CountStrategy::kCount: return "count";
    case CountStrategy::kLog: return "log";
    case CountStrategy::kSqrt: return "sqrt";
    case CountStrategy::kLogSqrt: return "log-sqrt";
    case CountStrategy::kLinear: return "linear";
  }
  throw ArgumentError("unknown count strategy");
}

CountStrategy count_strategy_from_string(const std::string& name) {
  if (name == "count") return CountStrategy::kCount;
  if (name == "log") return CountStrategy::kLog;
  if (name == "sqrt") return CountStrategy::kSqrt;
  if (name == "log-sqrt") return CountStrategy::kLogSqrt;
  if (name == "linear") return CountStrategy::kLinear;
  throw ArgumentError("unknown count strategy: " + name);
}

std::string to_string(ClassGroup g) {
  switch (g) {
    case ClassGroup::kHead: return "Head";
    case ClassGroup::kMedium: return "Medium";
    case ClassGroup::kTail: return "Tail";
  }
  throw ArgumentError("unknown class group");
}

ClassGroup class_group_from_string(const std::string& name) {
  if (name == "Head") return ClassGroup::kHead;
  if (name == "Medium") return ClassGroup::kMedium;
  if (name == "Tail") return ClassGroup::kTail;
  throw ArgumentError("unknown class group: " + name);
}

namespace {

// Classes ordered by count descending, ties by index ascending.
std::vector<int> rank_by_count(const std::vector<std::int64_t>& counts) {
  std::vector<int> order(counts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&counts](int a, int b) {
    if (counts[static_cast<std::size_t>(a)] != counts[static_cast<std::size_t>(b)]) {
      return counts[static_cast<std::size_t>(a)] > counts[static_cast<std::size_t>(b)];
    }
    return a < b;
  });
  return order;
}

}  // namespace

ClassStats compute_tail_criterion(const std::vector<std::int64_t>& counts,
                                  CountStrategy strategy) {
  const auto num_classes = static_cast<Eigen::Index>(counts.size());
  if (num_classes < 1) throw ArgumentError("compute_tail_criterion: no classes");
  for (std::int64_t c : counts) {
    if (c <= 0) throw ArgumentError("compute_tail_criterion: counts must be positive");
  }

  ClassStats stats;
  stats.strategy = strategy;
  stats.q.resize(num_classes);

  switch (strategy) {
    case CountStrategy::kCount:
      for (Eigen::Index s = 0; s < num_classes; ++s) {
        stats.q[s] = static_cast<double>(counts[static_cast<std::size_t>(s)]);
      }
      break;
    case CountStrategy::kLog:
    case CountStrategy::kLogSqrt: {
      const double root = strategy == CountStrategy::kLogSqrt ? 0.5 : 1.0;
      double denom = 0.0;
      for (Eigen::Index s = 0; s < num_classes; ++s) {
        stats.q[s] = std::log(std::pow(static_cast<double>(counts[static_cast<std::size_t>(s)]),
                                       root));
        denom += stats.q[s];
      }
      if (denom != 0.0) stats.q /= denom;
      break;
    }
    case CountStrategy::kSqrt: {
      double denom = 0.0;
      for (Eigen::Index s = 0; s < num_classes; ++s) {
        stats.q[s] = std::sqrt(static_cast<double>(counts[static_cast<std::size_t>(s)]));
        denom += stats.q[s];
      }
      stats.q /= denom;
      break;
    }
    case CountStrategy::kLinear: {
      // Uniform ramp over frequency rank: most frequent 1, rarest 0.
      const std::vector<int> order = rank_by_count(counts);
      for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const double value =
            num_classes == 1
                ? 0.0
                : static_cast<double>(num_classes - 1 - static_cast<Eigen::Index>(pos)) /
                      static_cast<double>(num_classes - 1);
        stats.q[order[pos]] = value;
      }
      break;
    }
  }

  const double q_min = stats.q.minCoeff();
  const double q_max = stats.q.maxCoeff();
  if (q_max == q_min) {
    // Degenerate min-max: balanced data, full augmentation freedom.
    stats.tau = Vec::Zero(num_classes);
  } else {
    stats.tau = (stats.q.array() - q_min) / (q_max - q_min);
  }
  return stats;
}

double instance_tau(const VecF& labels, const Vec& tau) {
  if (labels.size() != tau.size()) throw DimensionError("instance_tau: label/tau size mismatch");
  double best = 1.0;
  bool found = false;
  for (Eigen::Index s = 0; s < labels.size(); ++s) {
    if (labels[s] > 0.5f) {
      best = found ? std::min(best, tau[s]) : tau[s];
      found = true;
    }
  }
  if (!found) throw ArgumentError("instance_tau: video with no positive label");
  return best;
}

std::vector<ClassGroup> group_split(const std::vector<std::int64_t>& counts, double head_frac,
                                    double tail_frac) {
  if (!(head_frac > 0.0) || !(tail_frac > 0.0) || head_frac + tail_frac > 1.0) {
    throw ArgumentError("group_split: fractions must be positive and sum to at most 1");
  }
  const auto num_classes = static_cast<std::int64_t>(counts.size());
  const auto head_count =
      static_cast<std::int64_t>(std::floor(head_frac * static_cast<double>(num_classes) + 1e-9));
  const auto tail_count =
      static_cast<std::int64_t>(std::floor(tail_frac * static_cast<double>(num_classes) + 1e-9));
  const std::vector<int> order = rank_by_count(counts);
  std::vector<ClassGroup> groups(counts.size(), ClassGroup::kMedium);
  for (std::int64_t pos = 0; pos < num_classes; ++pos) {
    const int cls = order[static_cast<std::size_t>(pos)];
    if (pos < head_count) {
      groups[static_cast<std::size_t>(cls)] = ClassGroup::kHead;
    } else if (pos >= num_classes - tail_count) {
      groups[static_cast<std::size_t>(cls)] = ClassGroup::kTail;
    }
  }
  return groups;
}

std::vector<std::int64_t> imbalanced_counts(int num_classes, int n_max, double mu) {
  if (num_classes < 1) throw ArgumentError("imbalanced_counts: need at least one class");
  if (n_max < 1) throw ArgumentError("imbalanced_counts: n_max must be positive");
  if (!(mu > 0.0) || mu > 1.0) throw ArgumentError("imbalanced_counts: mu must be in (0, 1]");
  std::vector<std::int64_t> counts(static_cast<std::size_t>(num_classes));
  for (int i = 0; i < num_classes; ++i) {
    const double exponent =
        num_classes == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(num_classes - 1);
    const double scaled = static_cast<double>(n_max) * std::pow(mu, exponent);
    counts[static_cast<std::size_t>(i)] =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(scaled)));
  }
  return counts;
}

namespace {

void validate_config(const SyntheticConfig& c) {
  if (c.num_classes < 2) throw ArgumentError("synthetic: need at least two classes");
  if (c.n_max < 1) throw ArgumentError("synthetic: n_max must be positive");
  if (!(c.mu > 0.0) || c.mu > 1.0) throw ArgumentError("synthetic: mu must be in (0, 1]");
  if (c.frames < 1) throw ArgumentError("synthetic: frames must be positive");
  if (c.feat_dim < 2) throw ArgumentError("synthetic: feat_dim must be at least 2");
  if (!(c.separation >= 0.0)) throw ArgumentError("synthetic: separation must be non-negative");
  if (c.background_frac < 0.0 || c.background_frac >= 1.0) {
    throw ArgumentError("synthetic: background fraction must be in [0, 1)");
  }
}

std::vector<Vec> draw_class_means(const SyntheticConfig& c, Rng& rng) {
  std::vector<Vec> means;
  means.reserve(static_cast<std::size_t>(c.num_classes));
  for (int i = 0; i < c.num_classes; ++i) {
    Vec dir(c.feat_dim);
    double norm2 = 0.0;
    do {
      for (Eigen::Index d = 0; d < dir.size(); ++d) dir[d] = normal(rng);
      norm2 = dir.squaredNorm();
    } while (norm2 == 0.0);
    means.push_back(dir * (c.separation / std::sqrt(norm2)));
  }
  return means;
}

FeatureSequence draw_video(const SyntheticConfig& c, const Vec& mean, int cls, Rng& rng) {
  FeatureSequence video;
  video.frames.resize(c.frames, c.feat_dim);
  const int background =
      static_cast<int>(std::floor(c.background_frac * static_cast<double>(c.frames)));
  std::vector<int> bg_positions = random_subset(c.frames, background, rng);
  std::vector<bool> is_background(static_cast<std::size_t>(c.frames), false);
  for (int t : bg_positions) is_background[static_cast<std::size_t>(t)] = true;
  for (int t = 0; t < c.frames; ++t) {
    for (int d = 0; d < c.feat_dim; ++d) {
      const double center = is_background[static_cast<std::size_t>(t)] ? 0.0 : mean[d];
      video.frames(t, d) = static_cast<float>(center + normal(rng));
    }
  }
  video.labels = VecF::Zero(c.num_classes);
  video.labels[cls] = 1.0f;
  return video;
}

std::string make_video_id(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "v%06zu", index);
  return buf;
}

DatasetManifest make_manifest(const SyntheticConfig& c, const std::vector<std::int64_t>& counts) {
  DatasetManifest m;
  m.num_videos = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  m.num_classes = c.num_classes;
  m.frames = c.frames;
  m.feat_dim = c.feat_dim;
  m.counts = counts;
  m.groups = group_split(counts, c.head_frac, c.tail_frac);
  m.seed = c.seed;
  m.mu = c.mu;
  m.profile = "geometric";
  return m;
}

}  // namespace

std::pair<std::vector<FeatureSequence>, DatasetManifest> generate_imbalanced_synthetic(
    const SyntheticConfig& config) {
  SyntheticSplit split = generate_split(config, 0);
  return {std::move(split.train), std::move(split.manifest)};
}

SyntheticSplit generate_split(const SyntheticConfig& config, int test_per_class) {
  validate_config(config);
  if (test_per_class < 0) throw ArgumentError("synthetic: test_per_class must be non-negative");
  Rng rng(config.seed);
  const std::vector<std::int64_t> counts =
      imbalanced_counts(config.num_classes, config.n_max, config.mu);
  const std::vector<Vec> means = draw_class_means(config, rng);

  SyntheticSplit split;
  for (int cls = 0; cls < config.num_classes; ++cls) {
    for (std::int64_t j = 0; j < counts[static_cast<std::size_t>(cls)]; ++j) {
      split.train.push_back(draw_video(config, means[static_cast<std::size_t>(cls)], cls, rng));
      split.train.back().video_id = make_video_id(split.train.size() - 1);
    }
  }
  for (int cls = 0; cls < config.num_classes; ++cls) {
    for (int j = 0; j < test_per_class; ++j) {
      split.test.push_back(draw_video(config, means[static_cast<std::size_t>(cls)], cls, rng));
      split.test.back().video_id = make_video_id(split.test.size() - 1);
    }
  }
  split.manifest = make_manifest(config, counts);
  return split;
}

KvList manifest_to_kv(const DatasetManifest& m) {
  KvList kv;
  kv.emplace_back("N", std::to_string(m.num_videos));
  kv.emplace_back("S", std::to_string(m.num_classes));
  kv.emplace_back("T", std::to_string(m.frames));
  kv.emplace_back("C", std::to_string(m.feat_dim));
  kv.emplace_back("seed", std::to_string(m.seed));
  kv.emplace_back("mu", fmt_double(m.mu));
  kv.emplace_back("profile", m.profile);
  std::string counts;
  for (std::size_t i = 0; i < m.counts.size(); ++i) {
    if (i > 0) counts += ',';
    counts += std::to_string(m.counts[i]);
  }
  kv.emplace_back("counts", counts);
  std::string groups;
  for (std::size_t i = 0; i < m.groups.size(); ++i) {
    if (i > 0) groups += ',';
    groups += to_string(m.groups[i]);
  }
  kv.emplace_back("groups", groups);
  return kv;
}

namespace {

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    if (comma == std::string::npos) {
      if (!text.empty()) parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, comma - start));
    start = comma + 1;
  }
  return parts;
}

const std::string& require_kv(const KvList& kv, const std::string& key) {
  const std::string* v = find_kv(kv, key);
  if (v == nullptr) throw FormatError("manifest: missing key '" + key + "'", 0);
  return *v;
}

}  // namespace

DatasetManifest manifest_from_kv(const KvList& kv) {
  DatasetManifest m;
  m.num_videos = parse_int(require_kv(kv, "N"));
  m.num_classes = parse_int(require_kv(kv, "S"));
  m.frames = parse_int(require_kv(kv, "T"));
  m.feat_dim = parse_int(require_kv(kv, "C"));
  m.seed = static_cast<std::uint64_t>(parse_int(require_kv(kv, "seed")));
  m.mu = parse_double(require_kv(kv, "mu"));
  m.profile = require_kv(kv, "profile");
  for (const std::string& c : split_commas(require_kv(kv, "counts"))) {
    m.counts.push_back(parse_int(c));
  }
  for (const std::string& g : split_commas(require_kv(kv, "groups"))) {
    m.groups.push_back(class_group_from_string(g));
  }
  if (m.counts.size() != static_cast<std::size_t>(m.num_classes) ||
      m.groups.size() != static_cast<std::size_t>(m.num_classes)) {
    throw FormatError("manifest: counts/groups length disagrees with S", 0);
  }
  return m;
}

namespace {

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::istream& in, std::uint64_t& offset, const char* what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw FormatError(std::string("features: truncated ") + what, offset);
  offset += sizeof(T);
  return v;
}

}  // namespace

void write_features(const std::string& path, const std::vector<FeatureSequence>& videos) {
  std::uint32_t frames = 0, feat_dim = 0, num_classes = 0;
  if (!videos.empty()) {
    frames = static_cast<std::uint32_t>(videos[0].frames.rows());
    feat_dim = static_cast<std::uint32_t>(videos[0].frames.cols());
    num_classes = static_cast<std::uint32_t>(videos[0].labels.size());
    for (const FeatureSequence& v : videos) {
      if (v.frames.rows() != static_cast<Eigen::Index>(frames) ||
          v.frames.cols() != static_cast<Eigen::Index>(feat_dim) ||
          v.labels.size() != static_cast<Eigen::Index>(num_classes)) {
        throw ArgumentError("features: all videos in one file must share T, C, S");
      }
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("features: cannot open for writing: " + path);
  out.write("MVFT", 4);
  put<std::uint32_t>(out, kFeatureFileVersion);
  put<std::uint64_t>(out, videos.size());
  put<std::uint32_t>(out, frames);
  put<std::uint32_t>(out, feat_dim);
  put<std::uint32_t>(out, num_classes);
  for (const FeatureSequence& v : videos) {
    out.write(reinterpret_cast<const char*>(v.frames.data()),
              static_cast<std::streamsize>(sizeof(float) * frames * feat_dim));
    out.write(reinterpret_cast<const char*>(v.labels.data()),
              static_cast<std::streamsize>(sizeof(float) * num_classes));
  }
  if (!out) throw IoError("features: write failed: " + path);
}

std::vector<FeatureSequence> read_features(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("features: cannot open for reading: " + path);
  std::uint64_t offset = 0;
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "MVFT", 4) != 0) throw FormatError("features: bad magic", offset);
  offset += 4;
  const auto version = take<std::uint32_t>(in, offset, "version");
  if (version != kFeatureFileVersion) {
    throw FormatError("features: unsupported version " + std::to_string(version), offset - 4);
  }
  const auto count = take<std::uint64_t>(in, offset, "video count");
  const auto frames = take<std::uint32_t>(in, offset, "frame count");
  const auto feat_dim = take<std::uint32_t>(in, offset, "feature dim");
  const auto num_classes = take<std::uint32_t>(in, offset, "class count");
  std::vector<FeatureSequence> videos;
  videos.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    FeatureSequence v;
    v.frames.resize(frames, feat_dim);
    in.read(reinterpret_cast<char*>(v.frames.data()),
            static_cast<std::streamsize>(sizeof(float) * frames * feat_dim));
    if (!in) throw FormatError("features: truncated frames for video " + std::to_string(i), offset);
    offset += sizeof(float) * frames * feat_dim;
    v.labels.resize(num_classes);
    in.read(reinterpret_cast<char*>(v.labels.data()),
            static_cast<std::streamsize>(sizeof(float) * num_classes));
    if (!in) throw FormatError("features: truncated labels for video " + std::to_string(i), offset);
    offset += sizeof(float) * num_classes;
    v.video_id = make_video_id(static_cast<std::size_t>(i));
    videos.push_back(std::move(v));
  }
  return videos;
}

std::vector<std::int64_t> label_counts(const std::vector<FeatureSequence>& videos,
                                       int num_classes) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(num_classes), 0);
  for (const FeatureSequence& v : videos) {
    if (v.labels.size() != num_classes) throw DimensionError("label_counts: label size mismatch");
    for (int s = 0; s < num_classes; ++s) {
      if (v.labels[s] > 0.5f) ++counts[static_cast<std::size_t>(s)];
    }
  }
  return counts;
}

}  // namespace move
