#include "adf/geometry.hpp"

#include <algorithm>
#include <limits>

#include "adf/error.hpp"

namespace adf {

namespace {

template <typename Get>
Aabb box_of(std::size_t n, Get get, const Schema& schema) {
  if (n == 0) throw DataError("bounding box of an empty record set");
  Aabb box;
  box.attrs = schema.numeric_indices();
  box.lower.assign(box.attrs.size(), std::numeric_limits<double>::infinity());
  box.upper.assign(box.attrs.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    const Record& r = get(i);
    for (std::size_t j = 0; j < box.attrs.size(); ++j) {
      const double v = r.values[box.attrs[j]];
      if (is_missing(v)) continue;
      box.lower[j] = std::min(box.lower[j], v);
      box.upper[j] = std::max(box.upper[j], v);
    }
  }
  for (std::size_t j = 0; j < box.attrs.size(); ++j) {
    if (box.lower[j] > box.upper[j]) {
      throw DataError("degenerate attribute '" + schema.attribute(box.attrs[j]).name + "': every value is missing");
    }
  }
  return box;
}

// Midpoint of lo < hi that stays strictly below hi, so "x <= split" keeps
// every x <= lo on one side and every x >= hi on the other.
double separating_midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid < hi ? std::max(mid, lo) : lo;
}

void require_same_axes(const Aabb& a, const Aabb& b) {
  if (a.attrs != b.attrs) throw InvalidInput("bounding boxes span different attribute sets");
}

}  // namespace

Aabb aabb_of_records(std::span<const Record> records, const Schema& schema) {
  return box_of(records.size(), [&](std::size_t i) -> const Record& { return records[i]; }, schema);
}

Aabb aabb_of_records(std::span<const Record* const> records, const Schema& schema) {
  return box_of(records.size(), [&](std::size_t i) -> const Record& { return *records[i]; }, schema);
}

Aabb Aabb::united(const Aabb& other) const {
  require_same_axes(*this, other);
  Aabb out = *this;
  for (std::size_t j = 0; j < attrs.size(); ++j) {
    out.lower[j] = std::min(lower[j], other.lower[j]);
    out.upper[j] = std::max(upper[j], other.upper[j]);
  }
  return out;
}

bool Aabb::overlaps(const Aabb& other) const {
  require_same_axes(*this, other);
  for (std::size_t j = 0; j < attrs.size(); ++j) {
    if (other.lower[j] > upper[j] || lower[j] > other.upper[j]) return false;
  }
  return true;
}

bool Aabb::contains(const Record& r) const {
  for (std::size_t j = 0; j < attrs.size(); ++j) {
    const double v = r.values[attrs[j]];
    if (is_missing(v)) continue;
    if (v < lower[j] || v > upper[j]) return false;
  }
  return true;
}

std::optional<SatSplit> sat_split(const Aabb& old_box, const Aabb& new_box) {
  require_same_axes(old_box, new_box);
  if (old_box.dims() == 0) return std::nullopt;
  // above: new box lies above the old one on the axis; below: beneath it.
  std::size_t above_attr = 0, below_attr = 0;
  double above_gap = -std::numeric_limits<double>::infinity();
  double below_gap = above_gap;
  for (std::size_t j = 0; j < old_box.dims(); ++j) {
    const double up = new_box.lower[j] - old_box.upper[j];
    const double down = old_box.lower[j] - new_box.upper[j];
    if (up > above_gap) {
      above_gap = up;
      above_attr = j;
    }
    if (down > below_gap) {
      below_gap = down;
      below_attr = j;
    }
  }
  if (above_gap > 0 && above_gap >= below_gap) {
    return SatSplit{old_box.attrs[above_attr], separating_midpoint(old_box.upper[above_attr], new_box.lower[above_attr]),
                    Side::Right};
  }
  if (below_gap > 0 && below_gap >= above_gap) {
    return SatSplit{old_box.attrs[below_attr], separating_midpoint(new_box.upper[below_attr], old_box.lower[below_attr]),
                    Side::Left};
  }
  return std::nullopt;
}

}  // namespace adf
