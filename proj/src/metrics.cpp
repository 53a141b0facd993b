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

#include "buol/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

#include "buol/errors.hpp"

namespace buol {

namespace {

std::uint64_t segment_key(int category, std::uint32_t instance) {
  return (static_cast<std::uint64_t>(category) << 32) | instance;
}

// Segment index of every cell (-1 for void) plus the ordered segment keys.
struct SegmentLabels {
  std::vector<std::int32_t> of_cell;
  std::vector<std::uint64_t> keys;
  std::vector<std::int64_t> sizes;
};

SegmentLabels label_segments(const PanopticVolume& v) {
  const CategoryTable& table = v.categories;
  std::map<std::uint64_t, std::int32_t> index;
  const std::size_t n = v.semantic.size();
  for (std::size_t i = 0; i < n; ++i) {
    const int k = v.semantic[i];
    if (k == 0) continue;
    index.emplace(segment_key(k, table.is_thing(k) ? v.instance[i] : 0), 0);
  }
  SegmentLabels labels;
  labels.keys.reserve(index.size());
  for (auto& [key, idx] : index) {
    idx = static_cast<std::int32_t>(labels.keys.size());
    labels.keys.push_back(key);
  }
  std::unordered_map<std::uint64_t, std::int32_t> lookup(index.begin(),
                                                         index.end());
  labels.of_cell.assign(n, -1);
  labels.sizes.assign(labels.keys.size(), 0);
  std::uint64_t last_key = std::numeric_limits<std::uint64_t>::max();
  std::int32_t last_idx = -1;
  for (std::size_t i = 0; i < n; ++i) {
    const int k = v.semantic[i];
    if (k == 0) continue;
    const std::uint64_t key =
        segment_key(k, table.is_thing(k) ? v.instance[i] : 0);
    if (key != last_key) {
      last_key = key;
      last_idx = lookup.at(key);
    }
    labels.of_cell[i] = last_idx;
    ++labels.sizes[last_idx];
  }
  return labels;
}

int category_of_key(std::uint64_t key) { return static_cast<int>(key >> 32); }

double ratio(std::int64_t inter, std::int64_t pred, std::int64_t gt) {
  return static_cast<double>(inter) / static_cast<double>(pred + gt - inter);
}

// Minimum-cost perfect assignment on a square n x n matrix (Hungarian
// algorithm with potentials). Returns the column assigned to each row.
std::vector<int> hungarian(const std::vector<double>& cost, int n) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

std::vector<Segment> extract_segments(const PanopticVolume& volume) {
  const SegmentLabels labels = label_segments(volume);
  std::vector<Segment> segments(labels.keys.size());
  for (std::size_t s = 0; s < labels.keys.size(); ++s) {
    const int k = category_of_key(labels.keys[s]);
    segments[s].category = k;
    segments[s].thing = volume.categories.is_thing(k);
    segments[s].instance = static_cast<std::uint32_t>(labels.keys[s]);
    segments[s].cells.reserve(labels.sizes[s]);
  }
  for (std::size_t i = 0; i < labels.of_cell.size(); ++i) {
    if (labels.of_cell[i] >= 0) {
      segments[labels.of_cell[i]].cells.push_back(static_cast<std::int64_t>(i));
    }
  }
  return segments;
}

double iou(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
  if (a.empty() && b.empty()) throw DomainError("iou: both sets are empty");
  std::int64_t inter = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++inter;
      ++ia;
      ++ib;
    }
  }
  return ratio(inter, static_cast<std::int64_t>(a.size()),
               static_cast<std::int64_t>(b.size()));
}

Matching match_by_overlap(std::span<const std::int64_t> pred_sizes,
                          std::span<const std::int64_t> gt_sizes,
                          std::span<const std::int64_t> intersections,
                          double threshold, MatchPolicy policy) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw DomainError("match: IoU threshold must lie in (0, 1]");
  }
  const int np = static_cast<int>(pred_sizes.size());
  const int ng = static_cast<int>(gt_sizes.size());
  if (intersections.size() != static_cast<std::size_t>(np) * ng) {
    throw ShapeError("match: intersection table has the wrong size");
  }
  struct Candidate {
    int pred, gt;
    double iou;
  };
  std::vector<Candidate> candidates;
  for (int p = 0; p < np; ++p) {
    for (int g = 0; g < ng; ++g) {
      const std::int64_t inter = intersections[p * ng + g];
      if (inter == 0) continue;
      const double value = ratio(inter, pred_sizes[p], gt_sizes[g]);
      if (value >= threshold) candidates.push_back({p, g, value});
    }
  }

  std::vector<int> pred_match(np, -1), gt_match(ng, -1);
  std::vector<double> gt_iou(ng, 0.0);
  if (policy == MatchPolicy::kGreedy) {
    std::sort(candidates.begin(), candidates.end(),
              [&](const Candidate& a, const Candidate& b) {
                if (a.iou != b.iou) return a.iou > b.iou;
                if (gt_sizes[a.gt] != gt_sizes[b.gt]) {
                  return gt_sizes[a.gt] > gt_sizes[b.gt];
                }
                if (pred_sizes[a.pred] != pred_sizes[b.pred]) {
                  return pred_sizes[a.pred] > pred_sizes[b.pred];
                }
                if (a.gt != b.gt) return a.gt < b.gt;
                return a.pred < b.pred;
              });
    for (const Candidate& c : candidates) {
      if (pred_match[c.pred] >= 0 || gt_match[c.gt] >= 0) continue;
      pred_match[c.pred] = c.gt;
      gt_match[c.gt] = c.pred;
      gt_iou[c.gt] = c.iou;
    }
  } else if (!candidates.empty()) {
    // Maximum-weight assignment with weight K + IoU on admissible pairs and 0
    // elsewhere; K exceeds any attainable IoU sum, so cardinality dominates.
    const int n = std::max(np, ng);
    const double big = static_cast<double>(std::min(np, ng)) + 1.0;
    std::vector<double> cost(static_cast<std::size_t>(n) * n, 0.0);
    for (const Candidate& c : candidates) cost[c.pred * n + c.gt] = -(big + c.iou);
    const std::vector<int> assigned = hungarian(cost, n);
    for (const Candidate& c : candidates) {
      if (assigned[c.pred] == c.gt) {
        pred_match[c.pred] = c.gt;
        gt_match[c.gt] = c.pred;
        gt_iou[c.gt] = c.iou;
      }
    }
  }

  Matching matching;
  for (int g = 0; g < ng; ++g) {
    if (gt_match[g] >= 0) {
      matching.matches.push_back({gt_match[g], g, gt_iou[g]});
    } else {
      matching.false_negatives.push_back(g);
    }
  }
  for (int p = 0; p < np; ++p) {
    if (pred_match[p] < 0) matching.false_positives.push_back(p);
  }
  return matching;
}

Matching match_segments(std::span<const Segment> pred,
                        std::span<const Segment> gt, double threshold,
                        MatchPolicy policy) {
  std::vector<std::int64_t> pred_sizes, gt_sizes;
  for (const Segment& s : pred) pred_sizes.push_back(s.cells.size());
  for (const Segment& s : gt) gt_sizes.push_back(s.cells.size());
  std::vector<std::int64_t> inter(pred.size() * gt.size(), 0);
  for (std::size_t p = 0; p < pred.size(); ++p) {
    for (std::size_t g = 0; g < gt.size(); ++g) {
      std::vector<std::int64_t> common;
      std::set_intersection(pred[p].cells.begin(), pred[p].cells.end(),
                            gt[g].cells.begin(), gt[g].cells.end(),
                            std::back_inserter(common));
      inter[p * gt.size() + g] = static_cast<std::int64_t>(common.size());
    }
  }
  return match_by_overlap(pred_sizes, gt_sizes, inter, threshold, policy);
}

PrqReport prq(const PanopticVolume& pred, const PanopticVolume& gt,
              double threshold, MatchPolicy policy) {
  if (pred.grid != gt.grid) {
    throw ShapeError("prq: prediction and ground truth use different grids "
                     "(resample first)");
  }
  const CategoryTable& table = gt.categories;
  if (pred.categories.size() != table.size()) {
    throw ShapeError("prq: category tables differ in size");
  }
  for (int k = 0; k < table.size(); ++k) {
    if (pred.categories.is_thing(k) != table.is_thing(k)) {
      throw ShapeError("prq: category " + std::to_string(k) +
                       " is a thing in one table and stuff in the other");
    }
  }
  if (pred.semantic.size() != gt.semantic.size()) {
    throw ShapeError("prq: label arrays differ in size");
  }

  const SegmentLabels p = label_segments(pred);
  const SegmentLabels g = label_segments(gt);

  // Segments per category, as indices into the label tables.
  std::vector<std::vector<int>> pred_of(table.size()), gt_of(table.size());
  std::vector<int> pred_local(p.keys.size()), gt_local(g.keys.size());
  for (std::size_t s = 0; s < p.keys.size(); ++s) {
    auto& list = pred_of[category_of_key(p.keys[s])];
    pred_local[s] = static_cast<int>(list.size());
    list.push_back(static_cast<int>(s));
  }
  for (std::size_t s = 0; s < g.keys.size(); ++s) {
    auto& list = gt_of[category_of_key(g.keys[s])];
    gt_local[s] = static_cast<int>(list.size());
    list.push_back(static_cast<int>(s));
  }

  // Intersections only arise between segments of the same category.
  std::vector<std::vector<std::int64_t>> inter(table.size());
  for (int k = 0; k < table.size(); ++k) {
    inter[k].assign(pred_of[k].size() * gt_of[k].size(), 0);
  }
  for (std::size_t i = 0; i < p.of_cell.size(); ++i) {
    const int sp = p.of_cell[i];
    const int sg = g.of_cell[i];
    if (sp < 0 || sg < 0) continue;
    const int k = pred.semantic[i];
    if (k != gt.semantic[i]) continue;
    ++inter[k][pred_local[sp] * gt_of[k].size() + gt_local[sg]];
  }

  PrqReport report;
  for (int k = 1; k < table.size(); ++k) {
    if (pred_of[k].empty() && gt_of[k].empty()) continue;
    std::vector<std::int64_t> ps, gs;
    for (int s : pred_of[k]) ps.push_back(p.sizes[s]);
    for (int s : gt_of[k]) gs.push_back(g.sizes[s]);
    const Matching m = match_by_overlap(ps, gs, inter[k], threshold, policy);
    CategoryQuality q;
    q.category = k;
    q.thing = table.is_thing(k);
    q.tp = static_cast<int>(m.matches.size());
    q.fp = static_cast<int>(m.false_positives.size());
    q.fn = static_cast<int>(m.false_negatives.size());
    double iou_sum = 0.0;
    for (const MatchedPair& pair : m.matches) iou_sum += pair.iou;
    const double denom = 2.0 * q.tp + q.fp + q.fn;
    q.rsq = q.tp > 0 ? iou_sum / q.tp : 0.0;
    q.rrq = denom > 0 ? 2.0 * q.tp / denom : 0.0;
    q.prq = denom > 0 ? 2.0 * iou_sum / denom : 0.0;
    report.per_category.push_back(q);
  }

  const auto average = [&](auto&& include) {
    QualityTriple t;
    for (const CategoryQuality& q : report.per_category) {
      if (!include(q)) continue;
      t.prq += q.prq;
      t.rsq += q.rsq;
      t.rrq += q.rrq;
      ++t.categories;
    }
    if (t.categories > 0) {
      t.prq /= t.categories;
      t.rsq /= t.categories;
      t.rrq /= t.categories;
    }
    return t;
  };
  report.all = average([](const CategoryQuality&) { return true; });
  report.things = average([](const CategoryQuality& q) { return q.thing; });
  report.stuff = average([](const CategoryQuality& q) { return !q.thing; });
  return report;
}

std::string format_prq_table(const PrqReport& r) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%8s %8s %8s %8s %8s %8s %8s %8s %8s\n",
                "PRQ", "RSQ", "RRQ", "PRQ_th", "RSQ_th", "RRQ_th", "PRQ_st",
                "RSQ_st", "RRQ_st");
  out += line;
  std::snprintf(line, sizeof(line),
                "%8.2f %8.2f %8.2f %8.2f %8.2f %8.2f %8.2f %8.2f %8.2f\n",
                100 * r.all.prq, 100 * r.all.rsq, 100 * r.all.rrq,
                100 * r.things.prq, 100 * r.things.rsq, 100 * r.things.rrq,
                100 * r.stuff.prq, 100 * r.stuff.rsq, 100 * r.stuff.rrq);
  out += line;
  out += "\n";
  std::snprintf(line, sizeof(line), "%8s %6s %8s %8s %8s %5s %5s %5s\n",
                "category", "kind", "PRQ", "RSQ", "RRQ", "TP", "FP", "FN");
  out += line;
  for (const CategoryQuality& q : r.per_category) {
    std::snprintf(line, sizeof(line),
                  "%8d %6s %8.2f %8.2f %8.2f %5d %5d %5d\n", q.category,
                  q.thing ? "thing" : "stuff", 100 * q.prq, 100 * q.rsq,
                  100 * q.rrq, q.tp, q.fp, q.fn);
    out += line;
  }
  return out;
}

std::string format_prq_record(const PrqReport& r) {
  std::string out;
  char line[256];
  const auto put = [&](const std::string& key, double value) {
    std::snprintf(line, sizeof(line), "%s = %.17g\n", key.c_str(), value);
    out += line;
  };
  const auto put_triple = [&](const std::string& suffix, const QualityTriple& t) {
    put("prq" + suffix, t.prq);
    put("rsq" + suffix, t.rsq);
    put("rrq" + suffix, t.rrq);
    put("categories" + suffix, t.categories);
  };
  put_triple("", r.all);
  put_triple("_th", r.things);
  put_triple("_st", r.stuff);
  for (const CategoryQuality& q : r.per_category) {
    const std::string base = "category." + std::to_string(q.category) + ".";
    put(base + "thing", q.thing ? 1 : 0);
    put(base + "prq", q.prq);
    put(base + "rsq", q.rsq);
    put(base + "rrq", q.rrq);
    put(base + "tp", q.tp);
    put(base + "fp", q.fp);
    put(base + "fn", q.fn);
  }
  return out;
}

}  // namespace buol
