// Copyright 2026 The buol Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Panoptic reconstruction quality.
//
// Per category k, with TP the matched (pred, gt) segment pairs:
//   RSQ_k = sum_TP IoU / |TP|                         (0 without TP)
//   RRQ_k = 2|TP| / (2|TP| + |FP| + |FN|)
//   PRQ_k = sum_TP 2 IoU / (2|TP| + |FP| + |FN|)       (= RSQ_k * RRQ_k)
// A pair may match when its voxel IoU is >= the threshold (0.25 by default).
// Aggregates are unweighted means over the categories that have at least one
// predicted or ground-truth segment; void is never evaluated.

#ifndef BUOL_METRICS_HPP_
#define BUOL_METRICS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "buol/volume.hpp"

namespace buol {

struct Segment {
  int category = 0;
  bool thing = false;
  std::uint32_t instance = 0;     // 0 for stuff
  std::vector<std::int64_t> cells;  // sorted linear cell indices

  friend bool operator==(const Segment&, const Segment&) = default;
};

// One segment per (thing category, instance id) and one per stuff category,
// ordered by (category, instance).
std::vector<Segment> extract_segments(const PanopticVolume& volume);

// |a n b| / |a u b| over sorted index sets. Throws DomainError when both are
// empty.
double iou(std::span<const std::int64_t> a, std::span<const std::int64_t> b);

// How one-to-one matches are chosen among pairs with IoU >= threshold.
//   kOptimal: maximum number of matches, then maximum IoU sum.
//   kGreedy:  repeatedly take the highest-IoU pair, ties broken by
//             (gt size desc, pred size desc, gt index, pred index).
// Both coincide whenever every segment has at most one candidate, which is
// always the case for thresholds above 0.5.
enum class MatchPolicy { kOptimal, kGreedy };

struct MatchedPair {
  int pred = 0;
  int gt = 0;
  double iou = 0.0;
};

struct Matching {
  std::vector<MatchedPair> matches;  // ordered by gt index
  std::vector<int> false_positives;  // unmatched pred indices, ascending
  std::vector<int> false_negatives;  // unmatched gt indices, ascending
};

// Matches segments of one category.
Matching match_segments(std::span<const Segment> pred,
                        std::span<const Segment> gt, double threshold = 0.25,
                        MatchPolicy policy = MatchPolicy::kOptimal);

// Matching from precomputed sizes and a row-major |pred| x |gt| table of
// intersection counts.
Matching match_by_overlap(std::span<const std::int64_t> pred_sizes,
                          std::span<const std::int64_t> gt_sizes,
                          std::span<const std::int64_t> intersections,
                          double threshold, MatchPolicy policy);

struct CategoryQuality {
  int category = 0;
  bool thing = false;
  double prq = 0.0;
  double rsq = 0.0;
  double rrq = 0.0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
};

struct QualityTriple {
  double prq = 0.0;
  double rsq = 0.0;
  double rrq = 0.0;
  int categories = 0;  // number of categories averaged
};

struct PrqReport {
  std::vector<CategoryQuality> per_category;  // evaluated categories only
  QualityTriple all;
  QualityTriple things;
  QualityTriple stuff;
};

// Throws ShapeError when the volumes use different grids or category tables
// with different thing/stuff flags.
PrqReport prq(const PanopticVolume& pred, const PanopticVolume& gt,
              double threshold = 0.25,
              MatchPolicy policy = MatchPolicy::kOptimal);

// Percent table with the columns PRQ RSQ RRQ PRQ_th RSQ_th RRQ_th PRQ_st
// RSQ_st RRQ_st, followed by one row per evaluated category.
std::string format_prq_table(const PrqReport& report);

// "key = value" lines with stable keys (prq, rsq, rrq, prq_th, ...,
// category.<k>.prq, ...).
std::string format_prq_record(const PrqReport& report);

}  // namespace buol

#endif  // BUOL_METRICS_HPP_
