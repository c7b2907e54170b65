#include "roscsim/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "roscsim/errors.hpp"

namespace roscsim {

namespace {

constexpr double kGridSlack = 1e-9;

// Picks `count` entries of `pool` uniformly without replacement; they end up
// in pool[0..count).
void choose_prefix(std::vector<int>& pool, std::size_t count, RngStream& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.uniform_index(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
}

}  // namespace

std::vector<int> quantize_counts(std::span<const double> p, int paths) {
  if (paths < 1) throw ArgumentError("quantize: K must be positive");
  std::vector<int> counts(p.size());
  for (std::size_t n = 0; n < p.size(); ++n) {
    const double scaled = std::floor(p[n] * paths + kGridSlack);
    counts[n] = static_cast<int>(std::clamp(scaled, 0.0, static_cast<double>(paths)));
  }
  return counts;
}

Vec quantize_probs(std::span<const double> p, int paths) {
  const auto counts = quantize_counts(p, paths);
  Vec q(counts.size());
  for (std::size_t n = 0; n < q.size(); ++n) q[n] = static_cast<double>(counts[n]) / paths;
  return q;
}

SamplePathEnsemble::SamplePathEnsemble(int paths, std::size_t services, int capacity, int k_star)
    : paths_(paths), services_(services), capacity_(capacity), k_star_(k_star) {
  if (paths < 1) throw ArgumentError("ensemble: K must be positive");
  if (services == 0) throw ArgumentError("ensemble: no services");
  if (capacity < 0) throw ArgumentError("ensemble: negative capacity");
  if (k_star < 0 || k_star >= paths) throw ArgumentError("ensemble: k* outside [0, K)");
  cells_.assign(static_cast<std::size_t>(paths) * services, 0);
  loads_.assign(static_cast<std::size_t>(paths), 0);
}

SamplePathEnsemble::SamplePathEnsemble(int paths, std::size_t services, int capacity, RngStream& rng)
    : SamplePathEnsemble(paths, services, capacity,
                         static_cast<int>(rng.uniform_index(static_cast<std::size_t>(std::max(paths, 1))))) {}

SamplePathEnsemble SamplePathEnsemble::from_rows(const std::vector<std::vector<int>>& rows,
                                                 int capacity, int k_star) {
  if (rows.empty()) throw ArgumentError("ensemble: no rows");
  SamplePathEnsemble e(static_cast<int>(rows.size()), rows.front().size(), capacity, k_star);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].size() != e.services_) throw DimensionError("ensemble: ragged rows");
    for (std::size_t n = 0; n < e.services_; ++n) {
      if (rows[k][n] != 0 && rows[k][n] != 1) throw ArgumentError("ensemble: cells must be 0/1");
      e.cell(static_cast<int>(k), n) = static_cast<std::uint8_t>(rows[k][n]);
      e.loads_[k] += rows[k][n];
    }
  }
  return e;
}

std::vector<int> SamplePathEnsemble::column_counts() const {
  std::vector<int> counts(services_, 0);
  for (int k = 0; k < paths_; ++k) {
    const std::uint8_t* row = cells_.data() + static_cast<std::size_t>(k) * services_;
    for (std::size_t n = 0; n < services_; ++n) counts[n] += row[n];
  }
  return counts;
}

Vec SamplePathEnsemble::marginals() const {
  const auto counts = column_counts();
  Vec m(services_);
  for (std::size_t n = 0; n < services_; ++n) m[n] = static_cast<double>(counts[n]) / paths_;
  return m;
}

Vec SamplePathEnsemble::row(int path) const {
  if (path < 0 || path >= paths_) throw ArgumentError("ensemble: path index out of range");
  Vec x(services_);
  for (std::size_t n = 0; n < services_; ++n) x[n] = cached(path, n) ? 1.0 : 0.0;
  return x;
}

EnsembleUpdateStats SamplePathEnsemble::update(std::span<const int> counts, RngStream& rng) {
  if (counts.size() != services_) throw DimensionError("ensemble update: length mismatch");
  long total = 0;
  for (int c : counts) {
    if (c < 0 || c > paths_) throw ArgumentError("ensemble update: path count outside [0, K]");
    total += c;
  }
  if (total > static_cast<long>(paths_) * capacity_) {
    throw ArgumentError("ensemble update: quantized probabilities exceed capacity M");
  }

  // Previous marginals are read back from the paths; they must match what the
  // last update installed.
  const auto prev_counts = column_counts();
  if (!last_counts_.empty() && prev_counts != last_counts_) {
    throw InternalError("ensemble update: column sums drifted from the last installed marginals");
  }
  previous_ = cells_;

  EnsembleUpdateStats stats;
  std::vector<int>& pool = scratch_;
  for (std::size_t n = 0; n < services_; ++n) {
    const int delta = counts[n] - prev_counts[n];
    if (delta == 0) continue;
    const std::uint8_t wanted = delta > 0 ? 0 : 1;
    pool.clear();
    for (int k = 0; k < paths_; ++k) {
      if (cell(k, n) == wanted) pool.push_back(k);
    }
    const auto need = static_cast<std::size_t>(std::abs(delta));
    if (pool.size() < need) {
      throw InternalError("ensemble update: not enough paths to move service " + std::to_string(n));
    }
    choose_prefix(pool, need, rng);
    for (std::size_t i = 0; i < need; ++i) {
      const int k = pool[i];
      cell(k, n) = static_cast<std::uint8_t>(1 - wanted);
      loads_[static_cast<std::size_t>(k)] += delta > 0 ? 1 : -1;
    }
  }

  for (int k = 0; k < paths_; ++k) {
    if (loads_[static_cast<std::size_t>(k)] > capacity_) rebalance(k, rng, stats);
  }

  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i] > previous_[i]) ++stats.insertions;
    if (cells_[i] < previous_[i]) ++stats.evictions;
  }
  last_counts_.assign(counts.begin(), counts.end());
  return stats;
}

void SamplePathEnsemble::rebalance(int path, RngStream& rng, EnsembleUpdateStats& stats) {
  std::vector<int> deficit;
  std::vector<std::size_t> eligible;
  while (loads_[static_cast<std::size_t>(path)] > capacity_) {
    deficit.clear();
    for (int k = 0; k < paths_; ++k) {
      if (loads_[static_cast<std::size_t>(k)] < capacity_) deficit.push_back(k);
    }
    if (deficit.empty()) throw InternalError("ensemble rebalance: no path below capacity");
    const int target = deficit[rng.uniform_index(deficit.size())];
    eligible.clear();
    for (std::size_t n = 0; n < services_; ++n) {
      if (cell(path, n) == 1 && cell(target, n) == 0) eligible.push_back(n);
    }
    if (eligible.empty()) throw InternalError("ensemble rebalance: no movable service");
    const std::size_t moved = eligible[rng.uniform_index(eligible.size())];
    cell(path, moved) = 0;
    cell(target, moved) = 1;
    --loads_[static_cast<std::size_t>(path)];
    ++loads_[static_cast<std::size_t>(target)];
    ++stats.rebalance_moves;
  }
}

EnsembleUpdateStats update_ensemble(SamplePathEnsemble& ensemble, std::span<const double> p_quantized,
                                    RngStream& rng) {
  std::vector<int> counts(p_quantized.size());
  const double k = ensemble.paths();
  for (std::size_t n = 0; n < counts.size(); ++n) {
    const double scaled = p_quantized[n] * k;
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > 1e-9) {
      throw ArgumentError("update_ensemble: probabilities must be multiples of 1/K");
    }
    counts[n] = static_cast<int>(rounded);
  }
  return ensemble.update(counts, rng);
}

Vec decision_at(const SamplePathEnsemble& ensemble) { return ensemble.row(ensemble.k_star()); }

double expected_switching(std::span<const SamplePathEnsemble> sequence) {
  if (sequence.empty()) return 0.0;
  const int paths = sequence.front().paths();
  std::size_t inserted = 0;
  for (std::size_t t = 1; t < sequence.size(); ++t) {
    const auto& prev = sequence[t - 1].cells();
    const auto& cur = sequence[t].cells();
    if (prev.size() != cur.size()) throw DimensionError("expected_switching: shape changed");
    for (std::size_t i = 0; i < cur.size(); ++i) inserted += cur[i] > prev[i] ? 1 : 0;
  }
  return static_cast<double>(inserted) / paths;
}

std::vector<std::uint8_t> pack_ensemble_bits(const SamplePathEnsemble& ensemble) {
  const auto& cells = ensemble.cells();
  std::vector<std::uint8_t> bytes((cells.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i]) bytes[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  return bytes;
}

void write_ensemble_bits(std::ostream& out, const SamplePathEnsemble& ensemble) {
  const auto bytes = pack_ensemble_bits(ensemble);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::vector<int>> unpack_ensemble_bits(std::span<const std::uint8_t> bytes, int paths,
                                                   std::size_t services) {
  const std::size_t cells = static_cast<std::size_t>(paths) * services;
  if (bytes.size() != (cells + 7) / 8) throw DimensionError("unpack_ensemble_bits: wrong byte count");
  std::vector<std::vector<int>> rows(static_cast<std::size_t>(paths), std::vector<int>(services));
  for (std::size_t i = 0; i < cells; ++i) {
    rows[i / services][i % services] = (bytes[i / 8] >> (i % 8)) & 1u;
  }
  return rows;
}

}  // namespace roscsim
