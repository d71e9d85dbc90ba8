#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "move/manifest.hpp"
#include "move/rng.hpp"
#include "move/types.hpp"

namespace move {

// One video as pre-extracted frame features plus its multi-hot labels.
// Storage is float32 to match the on-disk feature format bit for bit.
struct FeatureSequence {
  MatF frames;         // T x C
  VecF labels;         // S, entries in {0, 1}, at least one positive
  std::string video_id;
};

enum class CountStrategy { kCount, kLog, kSqrt, kLogSqrt, kLinear };

std::string to_string(CountStrategy s);
CountStrategy count_strategy_from_string(const std::string& name);

// Per-class transformed counts q and the min-max normalized tail criterion
// tau in [0, 1]; tau = 1 marks the most frequent class. When all counts are
// equal tau is all-zeros.
struct ClassStats {
  Vec q;
  Vec tau;
  CountStrategy strategy = CountStrategy::kCount;
};

ClassStats compute_tail_criterion(const std::vector<std::int64_t>& counts, CountStrategy strategy);

// Smallest tau among the positive classes of a label vector; the rarest
// positive governs augmentation strength for multi-label videos.
double instance_tau(const VecF& labels, const Vec& tau);

enum class ClassGroup : std::uint8_t { kHead = 0, kMedium = 1, kTail = 2 };

std::string to_string(ClassGroup g);
ClassGroup class_group_from_string(const std::string& name);

// Classes ranked by count descending (ties by index ascending); the top
// head_frac go to Head, the bottom tail_frac to Tail, the rest to Medium.
std::vector<ClassGroup> group_split(const std::vector<std::int64_t>& counts, double head_frac,
                                    double tail_frac);

struct DatasetManifest {
  std::int64_t num_videos = 0;
  std::int64_t num_classes = 0;
  std::int64_t frames = 0;
  std::int64_t feat_dim = 0;
  std::vector<std::int64_t> counts;
  std::vector<ClassGroup> groups;
  std::uint64_t seed = 0;
  double mu = 1.0;
  std::string profile = "geometric";
};

KvList manifest_to_kv(const DatasetManifest& m);
DatasetManifest manifest_from_kv(const KvList& entries);

// Geometric imbalance profile: n_i = max(1, floor(n_max * mu^(i/(S-1)))).
std::vector<std::int64_t> imbalanced_counts(int num_classes, int n_max, double mu);

struct SyntheticConfig {
  int num_classes = 20;
  int n_max = 60;
  double mu = 0.01;
  int frames = 8;
  int feat_dim = 16;
  double separation = 1.0;
  double background_frac = 0.3;  // fraction of frames per video drawn class-free
  std::uint64_t seed = 0;
  double head_frac = 0.2;
  double tail_frac = 0.5;
};

std::pair<std::vector<FeatureSequence>, DatasetManifest> generate_imbalanced_synthetic(
    const SyntheticConfig& config);

// Same generator, but with a balanced held-out split drawn from the same
// class directions. Test gets test_per_class videos for every class.
struct SyntheticSplit {
  std::vector<FeatureSequence> train;
  std::vector<FeatureSequence> test;
  DatasetManifest manifest;  // describes the training split
};

SyntheticSplit generate_split(const SyntheticConfig& config, int test_per_class);

// Feature file, magic "MVFT": version u32, N u64, T u32, C u32, S u32, then
// N records of T*C little-endian float32 (row-major) and S float32 labels.
inline constexpr std::uint32_t kFeatureFileVersion = 1;

void write_features(const std::string& path, const std::vector<FeatureSequence>& videos);
std::vector<FeatureSequence> read_features(const std::string& path);

// Positive-label counts per class, for recomputing stats from a split.
std::vector<std::int64_t> label_counts(const std::vector<FeatureSequence>& videos, int num_classes);

}  // namespace move
