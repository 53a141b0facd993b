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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "buol/errors.hpp"
#include "buol/metrics.hpp"
#include "buol/rng.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace buol;
using namespace buol::testing;

namespace {

Segment seg(std::vector<std::int64_t> cells) {
  Segment s;
  s.category = 3;
  s.thing = true;
  s.cells = std::move(cells);
  return s;
}

PanopticVolume relabel(const PanopticVolume& v, std::uint32_t salt) {
  PanopticVolume out = v;
  for (auto& id : out.instance) {
    if (id != 0) id = id * 7919u + salt;
  }
  return out;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("extract_segments examples") {
  const Grid g = small_grid();
  const CategoryTable table = CategoryTable::standard(5);
  PanopticVolume v(g, table);
  CHECK(extract_segments(v).empty());
  for (int z = 0; z < 3; ++z) {
    v.semantic[g.extent().index(1, 1, z)] = 3;
    v.instance[g.extent().index(1, 1, z)] = 9;
  }
  v.semantic[g.extent().index(5, 5, 5)] = 1;
  v.semantic[g.extent().index(7, 7, 7)] = 1;
  const std::vector<Segment> s = extract_segments(v);
  REQUIRE(s.size() == 2);
  CHECK(s[0].category == 1);
  CHECK_FALSE(s[0].thing);
  CHECK(s[0].cells.size() == 2);
  CHECK(s[1].category == 3);
  CHECK(s[1].instance == 9);
  CHECK(s[1].cells.size() == 3);
}

TEST_CASE("segments partition the occupied cells") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed, 30);
    const PanopticVolume v = random_volume(rng, small_grid(), 7, 0.3, 3);
    std::int64_t total = 0;
    std::set<std::int64_t> seen;
    for (const Segment& s : extract_segments(v)) {
      CHECK_FALSE(s.cells.empty());
      CHECK(std::is_sorted(s.cells.begin(), s.cells.end()));
      total += static_cast<std::int64_t>(s.cells.size());
      seen.insert(s.cells.begin(), s.cells.end());
    }
    CHECK(total == v.occupied_count());
    CHECK(static_cast<std::int64_t>(seen.size()) == total);
  }
}

TEST_CASE("iou examples") {
  const std::vector<std::int64_t> a{1, 2}, b{2, 3}, c{7, 8};
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(a, c) == 0.0);
  CHECK(iou(a, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(iou(a, {}) == 0.0);
  CHECK_THROWS_AS(iou({}, {}), DomainError);
}

TEST_CASE("match_segments examples") {
  const std::vector<Segment> same{seg({1, 2, 3}), seg({10, 11})};
  const Matching m = match_segments(same, same);
  CHECK(m.matches.size() == 2);
  CHECK(m.false_positives.empty());
  CHECK(m.false_negatives.empty());
  for (const MatchedPair& p : m.matches) CHECK(p.iou == 1.0);

  // One pred against two gts at IoU 4/13 and 3/14.
  const std::vector<Segment> pred{seg({0, 1, 2, 3, 4, 5, 6})};
  const std::vector<Segment> gt{seg({0, 1, 2, 3, 20, 21, 22, 23, 24, 25}),
                                seg({4, 5, 6, 30, 31, 32, 33, 34, 35, 36})};
  CHECK(iou(pred[0].cells, gt[0].cells) == doctest::Approx(4.0 / 13.0));
  CHECK(iou(pred[0].cells, gt[1].cells) == doctest::Approx(3.0 / 14.0));
  for (MatchPolicy policy : {MatchPolicy::kOptimal, MatchPolicy::kGreedy}) {
    const Matching r = match_segments(pred, gt, 0.25, policy);
    REQUIRE(r.matches.size() == 1);
    CHECK(r.matches[0].gt == 0);
    CHECK(r.false_negatives == std::vector<int>{1});
  }
  CHECK_THROWS_AS(match_segments(pred, gt, 0.0), DomainError);
  CHECK_THROWS_AS(match_segments(pred, gt, 1.5), DomainError);
}

TEST_CASE("greedy can lose a match that optimal keeps") {
  // Intersection counts on segments of six cells each give IoU i / (12 - i).
  const std::vector<std::int64_t> pred_sizes{6, 6}, gt_sizes{6, 6};
  // p0-g0 = 4 -> 0.5, p0-g1 = 2 -> 0.2, p1-g0 = 3 -> 1/3, p1-g1 = 0.
  const std::vector<std::int64_t> table{4, 2, 3, 0};
  const Matching greedy = match_by_overlap(pred_sizes, gt_sizes, table, 0.2,
                                           MatchPolicy::kGreedy);
  const Matching optimal = match_by_overlap(pred_sizes, gt_sizes, table, 0.2,
                                            MatchPolicy::kOptimal);
  CHECK(greedy.matches.size() == 1);
  CHECK(optimal.matches.size() == 2);
}

TEST_CASE("optimal matching equals exhaustive search on random volumes") {
  const Grid g(small_camera(8, 8), small_planes(8));
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng(seed, 31);
    const PanopticVolume a = oracles::blob_volume(rng, g, 4);
    const PanopticVolume b = oracles::blob_volume(rng, g, 4);
    const std::vector<Segment> sa = extract_segments(a), sb = extract_segments(b);
    const Matching m = match_segments(sa, sb, 0.25, MatchPolicy::kOptimal);
    const oracles::BestMatching best = oracles::brute_force_matching(sa, sb, 0.25);
    double sum = 0;
    for (const MatchedPair& p : m.matches) sum += p.iou;
    CHECK(static_cast<int>(m.matches.size()) == best.count);
    CHECK(sum == doctest::Approx(best.iou_sum).epsilon(1e-12));
    CHECK(m.false_positives.size() + m.matches.size() == sa.size());
    CHECK(m.false_negatives.size() + m.matches.size() == sb.size());
    ++checked;
  }
  CHECK(checked == 300);
}

TEST_CASE("above IoU 0.5 greedy and optimal agree") {
  const Grid g(small_camera(8, 8), small_planes(8));
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed, 32);
    const PanopticVolume a = oracles::blob_volume(rng, g, 4);
    const PanopticVolume b = oracles::perturb_volume(rng, a, 0.1);
    const auto sa = extract_segments(a), sb = extract_segments(b);
    const Matching x = match_segments(sa, sb, 0.51, MatchPolicy::kGreedy);
    const Matching y = match_segments(sa, sb, 0.51, MatchPolicy::kOptimal);
    REQUIRE(x.matches.size() == y.matches.size());
    for (std::size_t i = 0; i < x.matches.size(); ++i) {
      CHECK(x.matches[i].pred == y.matches[i].pred);
      CHECK(x.matches[i].gt == y.matches[i].gt);
    }
  }
}

TEST_CASE("prq examples") {
  const Grid g = small_grid();
  const CategoryTable table = CategoryTable::standard(5);
  PanopticVolume gt(g, table);
  for (int z = 0; z < 4; ++z) {
    gt.semantic[g.extent().index(2, 2, z)] = 3;
    gt.instance[g.extent().index(2, 2, z)] = 1;
  }
  PanopticVolume pred(g, table);
  // Shares 2 of 4 cells and adds 0 -> IoU 0.5.
  for (int z = 2; z < 4; ++z) {
    pred.semantic[g.extent().index(2, 2, z)] = 3;
    pred.instance[g.extent().index(2, 2, z)] = 5;
  }
  const PrqReport r = prq(pred, gt);
  REQUIRE(r.per_category.size() == 1);
  CHECK(r.per_category[0].rsq == 0.5);
  CHECK(r.per_category[0].rrq == 1.0);
  CHECK(r.per_category[0].prq == 0.5);
  CHECK(r.things.prq == 0.5);
  CHECK(r.stuff.categories == 0);
  CHECK(r.stuff.prq == 0.0);

  // A disjoint prediction: zero-TP branch.
  PanopticVolume miss(g, table);
  miss.semantic[g.extent().index(9, 9, 9)] = 3;
  miss.instance[g.extent().index(9, 9, 9)] = 2;
  const PrqReport z = prq(miss, gt);
  CHECK(z.per_category[0].tp == 0);
  CHECK(z.per_category[0].fp == 1);
  CHECK(z.per_category[0].fn == 1);
  CHECK(z.all.prq == 0.0);
  CHECK(z.all.rsq == 0.0);
  CHECK(z.all.rrq == 0.0);

  const PanopticVolume other(small_grid(12, 10, 8), table);
  CHECK_THROWS_AS(prq(other, gt), ShapeError);
  const PanopticVolume fewer(g, CategoryTable::standard(4));
  CHECK_THROWS_AS(prq(fewer, gt), ShapeError);
}

TEST_CASE("prq of a volume with itself is one") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed, 33);
    const PanopticVolume v = random_volume(rng, small_grid(), 7, 0.2, 4);
    REQUIRE(v.occupied_count() > 0);
    const PrqReport r = prq(v, v);
    CHECK(r.all.prq == 1.0);
    CHECK(r.all.rsq == 1.0);
    CHECK(r.all.rrq == 1.0);
    for (const CategoryQuality& q : r.per_category) CHECK(q.prq == 1.0);
  }
}

TEST_CASE("prq properties on random pairs") {
  const Grid g(small_camera(8, 8), small_planes(8));
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed, 34);
    const PanopticVolume gt = oracles::blob_volume(rng, g, 4);
    const PanopticVolume pred = oracles::perturb_volume(rng, gt, 0.3);
    const PrqReport r = prq(pred, gt);
    for (const CategoryQuality& q : r.per_category) {
      CHECK(std::abs(q.prq - q.rsq * q.rrq) <= 1e-12);
      CHECK((q.prq >= 0 && q.prq <= 1));
      CHECK((q.rsq >= 0 && q.rsq <= 1));
      CHECK((q.rrq >= 0 && q.rrq <= 1));
    }
    // Instance relabeling in either volume changes nothing.
    const PrqReport s = prq(relabel(pred, 3), relabel(gt, 11));
    CHECK(s.all.prq == r.all.prq);
    CHECK(s.things.rsq == r.things.rsq);
    CHECK(s.stuff.rrq == r.stuff.rrq);
  }
}

TEST_CASE("removing a false positive never lowers PRQ") {
  const Grid g(small_camera(8, 8), small_planes(8));
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed, 35);
    const PanopticVolume gt = oracles::blob_volume(rng, g, 4);
    const PanopticVolume pred = oracles::perturb_volume(rng, gt, 0.4);
    const std::vector<Segment> ps = extract_segments(pred);
    const PrqReport before = prq(pred, gt);
    for (const CategoryQuality& q : before.per_category) {
      if (q.fp == 0) continue;
      // Find an unmatched predicted segment of this category and erase it.
      std::vector<Segment> pk, gk;
      for (const Segment& s : ps) if (s.category == q.category) pk.push_back(s);
      for (const Segment& s : extract_segments(gt)) if (s.category == q.category) gk.push_back(s);
      const Matching m = match_segments(pk, gk);
      REQUIRE_FALSE(m.false_positives.empty());
      PanopticVolume fewer = pred;
      for (std::int64_t i : pk[m.false_positives[0]].cells) {
        fewer.semantic[i] = 0;
        fewer.instance[i] = 0;
      }
      const PrqReport after = prq(fewer, gt);
      for (const CategoryQuality& a : after.per_category) {
        if (a.category == q.category) CHECK(a.prq >= q.prq);
      }
    }
  }
}

TEST_CASE("record output has the documented keys") {
  Rng rng(1, 36);
  const PanopticVolume v = random_volume(rng, small_grid(), 5, 0.2, 2);
  const std::string rec = format_prq_record(prq(v, v));
  for (const char* key : {"prq = 1\n", "rsq = ", "rrq = ", "prq_th = ", "prq_st = ",
                          "categories = ", "category.1.prq = 1\n", "category.3.tp = "}) {
    CHECK(rec.find(key) != std::string::npos);
  }
  const std::string table = format_prq_table(prq(v, v));
  CHECK(table.find("100.00") != std::string::npos);
}

}  // TEST_SUITE
