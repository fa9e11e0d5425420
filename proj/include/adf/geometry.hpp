#pragma once

#include <optional>
#include <span>
#include <vector>

#include "adf/dataset.hpp"

namespace adf {

/// Axis-aligned minimum bounding box over the numeric attributes of a record
/// set. Position j of `lower`/`upper` refers to schema attribute `attrs[j]`.
struct Aabb {
  std::vector<std::size_t> attrs;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dims() const { return attrs.size(); }
  /// Componentwise union; both boxes must span the same attributes.
  Aabb united(const Aabb& other) const;
  /// Closed-interval intersection test on every axis.
  bool overlaps(const Aabb& other) const;
  bool contains(const Record& r) const;

  friend bool operator==(const Aabb&, const Aabb&) = default;
};

/// Box of the non-missing numeric values of `records`. Throws DataError naming
/// the attribute when some numeric attribute has no value at all, and when
/// the record set is empty.
Aabb aabb_of_records(std::span<const Record> records, const Schema& schema);
Aabb aabb_of_records(std::span<const Record* const> records, const Schema& schema);

enum class Side { Left, Right };

/// A separating split between an old region and a new one.
struct SatSplit {
  std::size_t attr = 0;
  double value = 0.0;
  Side new_side = Side::Right;  // child that receives the new region
};

/// Finds the axis with the largest positive gap between the two boxes and
/// splits at the midpoint of the facing bounds. None when the boxes overlap
/// (touch included) on every axis.
std::optional<SatSplit> sat_split(const Aabb& old_box, const Aabb& new_box);

}  // namespace adf
