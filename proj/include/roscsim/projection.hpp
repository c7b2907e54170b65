#pragma once

// Euclidean projections onto the simplex {y >= 0, sum y = c} and onto the
// bounded simplex D = {y in [0,1]^N : sum y <= M}.

#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "roscsim/model.hpp"

namespace roscsim {

// Sorting routine used by the bounded-simplex projection. Recorded in
// benchmark metadata.
inline constexpr std::string_view kProjectionSortName = "std::sort (introsort, O(N log N) worst case)";

// Threshold tau of the simplex projection for a vector sorted in descending
// order: tau = (sum_{j<=I} a_j - c) / I with I the largest index such that
// a_I > (sum_{j<=I} a_j - c) / I.
double simplex_threshold(std::span<const double> sorted_desc, double c);

// y_i = max(a_i - tau, 0). Input must be sorted in descending order; c > 0.
Vec project_simplex(std::span<const double> sorted_desc, double c);

// Exact projection onto D. Reuses its scratch buffers across calls, so one
// instance per thread.
class BoundedSimplexProjector {
 public:
  explicit BoundedSimplexProjector(int capacity);

  int capacity() const { return capacity_; }

  // Writes Pi_D(z) into `out` (resized to z.size()).
  void project(std::span<const double> z, Vec& out);
  Vec operator()(std::span<const double> z);

  // Binary-search iterations used by the most recent call (0 on the clamp path).
  int last_search_iterations() const { return last_iterations_; }
  bool last_used_clamp() const { return last_clamp_; }

 private:
  bool tail_hits_one(std::size_t head) const;
  void write_solution(std::size_t head, Vec& out) const;

  int capacity_;
  std::vector<std::pair<double, std::size_t>> order_;
  Vec sorted_;
  int last_iterations_ = 0;
  bool last_clamp_ = false;
};

Vec project_bounded_simplex(std::span<const double> z, int capacity);

// Reference projection: enumerates every KKT active-set partition that is
// consistent with the sorted order and keeps the one whose multipliers check
// out. Restricted to N <= 20.
Vec project_bounded_simplex_oracle(std::span<const double> z, int capacity);

}  // namespace roscsim
