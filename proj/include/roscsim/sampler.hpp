#pragma once

// K synchronized sample paths that realize fractional caching probabilities
// as integer decisions. Each path carries mass 1/K; service n is cached on
// exactly K * p^Q_n paths, and the policy follows one path k* for the run.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "roscsim/model.hpp"
#include "roscsim/rng.hpp"

namespace roscsim {

// floor(p_n * K) with a 1e-9 allowance for values that sit on a grid point
// up to rounding. The result never exceeds K, and sum <= K*M whenever p is in D.
std::vector<int> quantize_counts(std::span<const double> p, int paths);

// p^Q_n = floor(p_n K) / K.
Vec quantize_probs(std::span<const double> p, int paths);

struct EnsembleUpdateStats {
  std::size_t insertions = 0;       // net 0 -> 1 cells across all paths
  std::size_t evictions = 0;        // net 1 -> 0 cells across all paths
  std::size_t rebalance_moves = 0;
};

class SamplePathEnsemble {
 public:
  // All paths start empty; k* is drawn uniformly from `rng`.
  SamplePathEnsemble(int paths, std::size_t services, int capacity, RngStream& rng);
  SamplePathEnsemble(int paths, std::size_t services, int capacity, int k_star);
  // rows[k][n] in {0,1}.
  static SamplePathEnsemble from_rows(const std::vector<std::vector<int>>& rows, int capacity,
                                      int k_star = 0);

  int paths() const { return paths_; }
  std::size_t services() const { return services_; }
  int capacity() const { return capacity_; }
  int k_star() const { return k_star_; }

  bool cached(int path, std::size_t service) const {
    return cells_[static_cast<std::size_t>(path) * services_ + service] != 0;
  }
  int load(int path) const { return loads_[static_cast<std::size_t>(path)]; }

  // Paths caching each service, recomputed from the cells.
  std::vector<int> column_counts() const;
  Vec marginals() const;
  Vec row(int path) const;

  const std::vector<std::uint8_t>& cells() const { return cells_; }

  // Moves the ensemble to new per-service path counts (Algorithm "randomized
  // caching"): add/remove the count difference on uniformly drawn paths, then
  // move services off overloaded paths, visiting them in ascending order.
  EnsembleUpdateStats update(std::span<const int> counts, RngStream& rng);

 private:
  std::uint8_t& cell(int path, std::size_t service) {
    return cells_[static_cast<std::size_t>(path) * services_ + service];
  }
  void rebalance(int path, RngStream& rng, EnsembleUpdateStats& stats);

  int paths_;
  std::size_t services_;
  int capacity_;
  int k_star_;
  std::vector<std::uint8_t> cells_;
  std::vector<int> loads_;
  std::vector<int> last_counts_;
  std::vector<std::uint8_t> previous_;
  std::vector<int> scratch_;
};

// Convenience wrapper over SamplePathEnsemble::update for a quantized vector.
EnsembleUpdateStats update_ensemble(SamplePathEnsemble& ensemble, std::span<const double> p_quantized,
                                    RngStream& rng);

// X_t = S_{k*}.
Vec decision_at(const SamplePathEnsemble& ensemble);

// (1/K) sum over consecutive pairs of sum_k sum_n |s_{k,n,t} - s_{k,n,t-1}|_+.
// The first element is the state before the first slot.
double expected_switching(std::span<const SamplePathEnsemble> sequence);

// Row-major K x N bits, bit j of byte b holding cell 8b + j.
std::vector<std::uint8_t> pack_ensemble_bits(const SamplePathEnsemble& ensemble);
void write_ensemble_bits(std::ostream& out, const SamplePathEnsemble& ensemble);
std::vector<std::vector<int>> unpack_ensemble_bits(std::span<const std::uint8_t> bytes, int paths,
                                                   std::size_t services);

}  // namespace roscsim
