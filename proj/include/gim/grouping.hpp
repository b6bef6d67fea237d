#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "gim/core.hpp"

namespace gim {

enum class GroupLabel {
  Strided1D,
  Contiguous1D,
  VLines2D,
  HLines2D,
  Rect2D,
  Spiral2D,
  CyclicSpiral2D,
  MaxManhattan2D,
  RandomGroups,
  Singletons,
};

inline std::string to_string(GroupLabel l) {
  switch (l) {
    case GroupLabel::Strided1D: return "strided1d";
    case GroupLabel::Contiguous1D: return "contiguous1d";
    case GroupLabel::VLines2D: return "vlines2d";
    case GroupLabel::HLines2D: return "hlines2d";
    case GroupLabel::Rect2D: return "rect2d";
    case GroupLabel::Spiral2D: return "spiral2d";
    case GroupLabel::CyclicSpiral2D: return "cyclic_spiral2d";
    case GroupLabel::MaxManhattan2D: return "max_manhattan2d";
    case GroupLabel::RandomGroups: return "random";
    case GroupLabel::Singletons: return "singletons";
  }
  return "?";
}

inline GroupLabel group_label_from_string(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(GroupLabel::Singletons); ++i) {
    const auto l = static_cast<GroupLabel>(i);
    if (to_string(l) == s) return l;
  }
  throw Error("unknown group structure: " + s);
}

/// A partition of the measurement rows {0..n-1} into n/g groups of size g.
class GroupStructure {
 public:
  GroupStructure(Index n, Index g, std::vector<std::vector<Index>> groups, GroupLabel label,
                 std::uint64_t seed = 0)
      : n_(n), g_(g), groups_(std::move(groups)), label_(label), seed_(seed) {
    validate();
  }

  Index n() const { return n_; }
  Index g() const { return g_; }
  std::size_t count() const { return groups_.size(); }
  const std::vector<std::vector<Index>>& groups() const { return groups_; }
  const std::vector<Index>& group(std::size_t i) const { return groups_.at(i); }
  GroupLabel label() const { return label_; }
  std::uint64_t seed() const { return seed_; }

  /// Display name; random structures carry their seed.
  std::string name() const {
    return label_ == GroupLabel::RandomGroups ? to_string(label_) + "(" + std::to_string(seed_) + ")"
                                              : to_string(label_);
  }

 private:
  void validate() const {
    require(n_ >= 1 && g_ >= 1, "group structure: n and g must be positive");
    require(n_ % g_ == 0, "group size " + std::to_string(g_) + " does not divide " + std::to_string(n_));
    require(static_cast<Index>(groups_.size()) == n_ / g_, "group structure: wrong group count");
    std::vector<char> seen(static_cast<std::size_t>(n_), 0);
    for (const auto& grp : groups_) {
      require(static_cast<Index>(grp.size()) == g_, "group structure: unequal group sizes");
      for (Index i : grp) {
        require(i >= 0 && i < n_, "group structure: index out of range");
        require(!seen[i], "group structure: groups overlap at index " + std::to_string(i));
        seen[i] = 1;
      }
    }
  }

  Index n_;
  Index g_;
  std::vector<std::vector<Index>> groups_;
  GroupLabel label_;
  std::uint64_t seed_;
};

namespace detail {

inline void require_divides(Index g, Index n, const char* what) {
  require(g >= 1 && n >= 1 && n % g == 0,
          std::string(what) + ": group size " + std::to_string(g) + " does not divide " + std::to_string(n));
}

inline std::vector<std::vector<Index>> chunk(const std::vector<Index>& order, Index g) {
  std::vector<std::vector<Index>> groups;
  for (std::size_t k = 0; k < order.size(); k += static_cast<std::size_t>(g))
    groups.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(k),
                        order.begin() + static_cast<std::ptrdiff_t>(k + g));
  return groups;
}

}  // namespace detail

/// Group i = {i, i + n/g, i + 2n/g, ...}.
inline GroupStructure strided_1d(Index n, Index g) {
  detail::require_divides(g, n, "strided_1d");
  const Index count = n / g;
  std::vector<std::vector<Index>> groups(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i)
    for (Index j = 0; j < g; ++j) groups[i].push_back(i + j * count);
  return {n, g, std::move(groups), g == 1 ? GroupLabel::Singletons : GroupLabel::Strided1D};
}

/// Group i = {i*g, ..., i*g + g - 1}.
inline GroupStructure contiguous_1d(Index n, Index g) {
  detail::require_divides(g, n, "contiguous_1d");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  return {n, g, detail::chunk(order, g), g == 1 ? GroupLabel::Singletons : GroupLabel::Contiguous1D};
}

inline GroupStructure singletons(Index n) {
  auto s = contiguous_1d(n, 1);
  return s;
}

enum class Orientation { Vertical, Horizontal };

/// Straight line segments of g pixels; vertical groups run down a column,
/// horizontal groups along a row. Pixel (r, c) has index r*cols + c.
inline GroupStructure lines_2d(Index rows, Index cols, Index g, Orientation o) {
  require(rows >= 1 && cols >= 1, "lines_2d: empty image");
  std::vector<std::vector<Index>> groups;
  if (o == Orientation::Vertical) {
    detail::require_divides(g, rows, "lines_2d(vertical)");
    for (Index c = 0; c < cols; ++c)
      for (Index b = 0; b < rows / g; ++b) {
        std::vector<Index> grp;
        for (Index j = 0; j < g; ++j) grp.push_back((b * g + j) * cols + c);
        groups.push_back(std::move(grp));
      }
  } else {
    detail::require_divides(g, cols, "lines_2d(horizontal)");
    for (Index r = 0; r < rows; ++r)
      for (Index b = 0; b < cols / g; ++b) {
        std::vector<Index> grp;
        for (Index j = 0; j < g; ++j) grp.push_back(r * cols + b * g + j);
        groups.push_back(std::move(grp));
      }
  }
  return {rows * cols, g, std::move(groups),
          o == Orientation::Vertical ? GroupLabel::VLines2D : GroupLabel::HLines2D};
}

/// Tiling by (g/2)-tall, 2-wide rectangles in row-major tile order.
inline GroupStructure rect_2d(Index rows, Index cols, Index g) {
  require(g >= 2 && g % 2 == 0, "rect_2d: group size must be even");
  const Index th = g / 2;
  detail::require_divides(th, rows, "rect_2d(rows)");
  detail::require_divides(2, cols, "rect_2d(cols)");
  std::vector<std::vector<Index>> groups;
  for (Index tr = 0; tr < rows / th; ++tr)
    for (Index tc = 0; tc < cols / 2; ++tc) {
      std::vector<Index> grp;
      for (Index r = 0; r < th; ++r)
        for (Index c = 0; c < 2; ++c) grp.push_back((tr * th + r) * cols + tc * 2 + c);
      groups.push_back(std::move(grp));
    }
  return {rows * cols, g, std::move(groups), GroupLabel::Rect2D};
}

/// Inward clockwise spiral from the top-left pixel, first leg along the top row.
inline std::vector<Index> spiral_order(Index rows, Index cols) {
  std::vector<Index> order;
  order.reserve(static_cast<std::size_t>(rows * cols));
  Index top = 0, bottom = rows - 1, left = 0, right = cols - 1;
  while (top <= bottom && left <= right) {
    for (Index c = left; c <= right; ++c) order.push_back(top * cols + c);
    for (Index r = top + 1; r <= bottom; ++r) order.push_back(r * cols + right);
    if (top < bottom)
      for (Index c = right - 1; c >= left; --c) order.push_back(bottom * cols + c);
    if (left < right)
      for (Index r = bottom - 1; r > top; --r) order.push_back(r * cols + left);
    ++top;
    --bottom;
    ++left;
    --right;
  }
  return order;
}

/// cyclic = false: consecutive spiral runs of g pixels.
/// cyclic = true: spiral position k joins group k mod (n/g).
inline GroupStructure spiral_2d(Index rows, Index cols, Index g, bool cyclic) {
  require(rows >= 1 && cols >= 1, "spiral_2d: empty image");
  const Index n = rows * cols;
  detail::require_divides(g, n, "spiral_2d");
  const auto order = spiral_order(rows, cols);
  if (!cyclic) return {n, g, detail::chunk(order, g), GroupLabel::Spiral2D};
  const Index count = n / g;
  std::vector<std::vector<Index>> groups(static_cast<std::size_t>(count));
  for (Index k = 0; k < n; ++k) groups[k % count].push_back(order[k]);
  return {n, g, std::move(groups), GroupLabel::CyclicSpiral2D};
}

/// Greedy farthest-point grouping. Each group is seeded with the remaining
/// pixel nearest the top-left corner (Manhattan, row-major tie-break), then
/// grown by the remaining pixel with the largest summed Manhattan distance to
/// the group so far (smallest index wins ties).
inline GroupStructure max_manhattan_2d(Index rows, Index cols, Index g) {
  require(rows >= 1 && cols >= 1, "max_manhattan_2d: empty image");
  const Index n = rows * cols;
  detail::require_divides(g, n, "max_manhattan_2d");
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  std::vector<Index> score(static_cast<std::size_t>(n));
  std::vector<std::vector<Index>> groups;
  auto dist = [cols](Index a, Index b) {
    return std::abs(a / cols - b / cols) + std::abs(a % cols - b % cols);
  };
  for (Index gi = 0; gi < n / g; ++gi) {
    Index seed = -1;
    for (Index p = 0; p < n; ++p)
      if (!used[p] && (seed < 0 || p / cols + p % cols < seed / cols + seed % cols)) seed = p;
    std::vector<Index> grp{seed};
    used[seed] = 1;
    std::fill(score.begin(), score.end(), 0);
    for (Index p = 0; p < n; ++p) score[p] = dist(p, seed);
    while (static_cast<Index>(grp.size()) < g) {
      Index best = -1;
      for (Index p = 0; p < n; ++p)
        if (!used[p] && (best < 0 || score[p] > score[best])) best = p;
      grp.push_back(best);
      used[best] = 1;
      for (Index p = 0; p < n; ++p) score[p] += dist(p, best);
    }
    groups.push_back(std::move(grp));
  }
  return {n, g, std::move(groups), GroupLabel::MaxManhattan2D};
}

/// Seeded Fisher-Yates permutation of {0..n-1} cut into groups of g.
inline GroupStructure random_groups(Index n, Index g, std::uint64_t seed) {
  detail::require_divides(g, n, "random_groups");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(seed);
  for (Index i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(static_cast<std::uint64_t>(i + 1))]);
  return {n, g, detail::chunk(order, g), GroupLabel::RandomGroups, seed};
}

/// A set of measurement rows assembled from whole groups.
struct SampleSet {
  std::vector<Index> omega;            // sorted
  std::vector<std::size_t> selected;   // group indices, sorted
  Index m() const { return static_cast<Index>(omega.size()); }
};

inline SampleSet sample_from_groups(const GroupStructure& gs, std::vector<std::size_t> selected) {
  std::sort(selected.begin(), selected.end());
  SampleSet s;
  s.selected = std::move(selected);
  for (auto i : s.selected) {
    const auto& grp = gs.group(i);
    s.omega.insert(s.omega.end(), grp.begin(), grp.end());
  }
  std::sort(s.omega.begin(), s.omega.end());
  return s;
}

/// Exactly m/g distinct groups, uniformly without replacement.
inline SampleSet draw_uniform(const GroupStructure& gs, Index m, Rng& rng) {
  require(m >= 0 && m <= gs.n(), "draw_uniform: m out of range: " + std::to_string(m));
  require(m % gs.g() == 0, "draw_uniform: group size does not divide m = " + std::to_string(m));
  const std::size_t count = gs.count();
  const auto k = static_cast<std::size_t>(m / gs.g());
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(count - i)]);
  idx.resize(k);
  return sample_from_groups(gs, std::move(idx));
}

/// Each group independently with probability m/n.
inline SampleSet draw_bernoulli(const GroupStructure& gs, double m, Rng& rng) {
  require(m >= 0 && m <= static_cast<double>(gs.n()), "draw_bernoulli: m out of range");
  const double p = m / static_cast<double>(gs.n());
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < gs.count(); ++i)
    if (rng.bernoulli(p)) idx.push_back(i);
  return sample_from_groups(gs, std::move(idx));
}

}  // namespace gim
