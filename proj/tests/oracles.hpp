#pragma once

// Test-only reference implementations. Everything here is a plain batch
// formula over materialized vectors, deliberately independent of the
// library's streaming code paths.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace oracle {

inline double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / double(v.size());
}

// two-pass sample variance, sum((x-mu)^2)/(n-1)
inline double two_pass_variance(const std::vector<double>& v) {
  const double mu = mean(v);
  double s = 0;
  for (double x : v) s += (x - mu) * (x - mu);
  return s / double(v.size() - 1);
}

// sum of squared successive differences over the sample count
inline double batch_mssd(const std::vector<double>& v) {
  double s = 0;
  for (std::size_t i = 1; i < v.size(); ++i) s += (v[i] - v[i - 1]) * (v[i] - v[i - 1]);
  return s / double(v.size());
}

inline double batch_rms2(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return s / double(v.size());
}

inline double batch_peak_to_peak(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

// literal correlation formula over 100 flat bins
inline double pearson_100(const std::array<double, 100>& a, const std::array<double, 100>& b) {
  double ma = 0, mb = 0;
  for (int p = 0; p < 100; ++p) {
    ma += a[std::size_t(p)];
    mb += b[std::size_t(p)];
  }
  ma /= 100.0;
  mb /= 100.0;
  double num = 0, sa = 0, sb = 0;
  for (int p = 0; p < 100; ++p) {
    const double da = a[std::size_t(p)] - ma;
    const double db = b[std::size_t(p)] - mb;
    num += da * db;
    sa += da * da;
    sb += db * db;
  }
  return num / (std::sqrt(sa) * std::sqrt(sb));
}

// ---------------------------------------------------------------------------
// threshold sweep
// ---------------------------------------------------------------------------

struct SweepResult {
  double threshold{0};
  double tpr{0};
  double tnr{0};
  double objective{-1};
};

// The objective is piecewise constant in the threshold with breakpoints at
// the observed values, so thresholds at each observed value, plus one above
// the maximum, realize every achievable classification.
inline SweepResult exhaustive_threshold_sweep(const std::vector<std::pair<double, int>>& points,
                                              double weight) {
  std::vector<double> candidates;
  for (const auto& [v, c] : points) candidates.push_back(v);
  candidates.push_back(*std::max_element(candidates.begin(), candidates.end()) + 1.0);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  long long n1 = 0, n0 = 0;
  for (const auto& [v, c] : points) (c == 1 ? n1 : n0)++;

  SweepResult best;
  for (const double th : candidates) {
    long long tp = 0, tn = 0;
    for (const auto& [v, c] : points) {
      if (c == 1 && v < th) ++tp;
      if (c == 0 && v >= th) ++tn;
    }
    const double tpr = double(tp) / double(n1);
    const double tnr = double(tn) / double(n0);
    const double obj = weight * tpr + (1.0 - weight) * tnr;
    if (obj > best.objective) best = {th, tpr, tnr, obj};
  }
  return best;
}

// ---------------------------------------------------------------------------
// relaxed-matching reference
// ---------------------------------------------------------------------------

struct Zone {
  long long begin{0};
  long long end{0};  // inclusive
  bool covers(long long w) const { return w >= begin && w <= end; }
};

struct MatchCounts {
  long long tp{0}, fp{0}, tn{0}, fn{0};
};

namespace detail {
inline long long max_matching(const std::vector<Zone>& zones,
                              const std::vector<long long>& hits, std::size_t zi,
                              std::vector<bool>& used) {
  if (zi == zones.size()) return 0;
  long long best = max_matching(zones, hits, zi + 1, used);  // leave this zone unmatched
  for (std::size_t h = 0; h < hits.size(); ++h) {
    if (used[h] || !zones[zi].covers(hits[h])) continue;
    used[h] = true;
    best = std::max(best, 1 + max_matching(zones, hits, zi + 1, used));
    used[h] = false;
  }
  return best;
}
}  // namespace detail

// TP by exhaustive maximum matching between zones and transition verdicts;
// FP/TN from out-of-zone verdicts; FN the unmatched zones.
inline MatchCounts brute_match(const std::vector<Zone>& zones,
                               const std::vector<std::pair<long long, bool>>& verdicts) {
  std::vector<long long> hits;
  MatchCounts c;
  for (const auto& [w, transition] : verdicts) {
    const bool in_zone =
        std::any_of(zones.begin(), zones.end(), [&](const Zone& z) { return z.covers(w); });
    if (transition) {
      if (in_zone)
        hits.push_back(w);
      else
        ++c.fp;
    } else if (!in_zone) {
      ++c.tn;
    }
  }
  std::vector<bool> used(hits.size(), false);
  c.tp = detail::max_matching(zones, hits, 0, used);
  c.fn = (long long)zones.size() - c.tp;
  return c;
}

}  // namespace oracle
