#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mogvqe/ansatz.hpp"

namespace mogvqe {

/// Bi-objective value, both minimized.
struct Fitness {
  double energy = 0.0;
  int n_cnot = 0;

  friend bool operator==(const Fitness& a, const Fitness& b) {
    return a.energy == b.energy && a.n_cnot == b.n_cnot;
  }
};

/// true iff a is no worse in both objectives and strictly better in one.
inline bool dominates(const Fitness& a, const Fitness& b) {
  if (a.energy > b.energy || a.n_cnot > b.n_cnot) return false;
  return a.energy < b.energy || a.n_cnot < b.n_cnot;
}

struct Individual {
  Circuit circuit;
  Fitness fitness;
  std::vector<double> best_angles;
  std::uint64_t id = 0;
  int rank = -1;
  double crowding = 0.0;
};

struct ParetoEntry {
  Fitness fitness;
  std::uint64_t circuit_id;
  Circuit circuit;
  std::vector<double> angles;
};

/// First-front snapshot for one generation.
struct ParetoArchive {
  int generation = 0;
  std::vector<ParetoEntry> entries;
};

/// Fast non-dominated sorting (Deb et al.); front k is dominated only by
/// members of fronts < k.
inline std::vector<std::vector<std::size_t>> non_dominated_sort(
    const std::vector<Fitness>& pop) {
  const std::size_t n = pop.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<int> domination_count(n, 0);
  std::vector<std::vector<std::size_t>> fronts;

  std::vector<std::size_t> current;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (dominates(pop[p], pop[q]))
        dominated[p].push_back(q);
      else if (dominates(pop[q], pop[p]))
        ++domination_count[p];
    }
    if (domination_count[p] == 0) current.push_back(p);
  }
  while (!current.empty()) {
    fronts.push_back(current);
    std::vector<std::size_t> next;
    for (std::size_t p : fronts.back()) {
      for (std::size_t q : dominated[p]) {
        if (--domination_count[q] == 0) next.push_back(q);
      }
    }
    std::sort(next.begin(), next.end());
    current = std::move(next);
  }
  return fronts;
}

/// NSGA-II crowding distance: boundary points per objective get infinity,
/// interior points sum (neighbour spread)/(objective range) over objectives;
/// a zero objective range contributes nothing.
inline std::vector<double> crowding_distance(const std::vector<Fitness>& front) {
  if (front.empty()) throw std::invalid_argument("crowding_distance: empty front");
  const std::size_t n = front.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, 0.0);

  auto accumulate = [&](auto key) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const double ka = key(front[a]), kb = key(front[b]);
      return ka != kb ? ka < kb : a < b;
    });
    dist[idx.front()] = inf;
    dist[idx.back()] = inf;
    const double range = key(front[idx.back()]) - key(front[idx.front()]);
    if (range <= 0.0) return;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (dist[idx[i]] == inf) continue;
      dist[idx[i]] += (key(front[idx[i + 1]]) - key(front[idx[i - 1]])) / range;
    }
  };
  accumulate([](const Fitness& f) { return f.energy; });
  accumulate([](const Fitness& f) { return static_cast<double>(f.n_cnot); });
  return dist;
}

/// Elitist (mu + lambda) selection over parents and offspring: rank ascending,
/// crowding descending within the partially admitted front, lower id breaking
/// remaining ties. Duplicate ids (unmutated clones) are collapsed first.
inline std::vector<Individual> environmental_select(const std::vector<Individual>& parents,
                                                    const std::vector<Individual>& offspring,
                                                    std::size_t n) {
  std::vector<Individual> pool;
  pool.reserve(parents.size() + offspring.size());
  for (const Individual& p : parents) pool.push_back(p);
  for (const Individual& o : offspring) {
    const bool duplicate =
        std::any_of(pool.begin(), pool.end(), [&](const Individual& p) { return p.id == o.id; });
    if (!duplicate) pool.push_back(o);
  }
  if (pool.size() < n)
    throw std::invalid_argument("environmental_select: fewer candidates than slots");

  std::vector<Fitness> fitness(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) fitness[i] = pool[i].fitness;
  const auto fronts = non_dominated_sort(fitness);

  for (std::size_t r = 0; r < fronts.size(); ++r) {
    std::vector<Fitness> front_fitness;
    front_fitness.reserve(fronts[r].size());
    for (std::size_t i : fronts[r]) front_fitness.push_back(fitness[i]);
    const std::vector<double> crowd = crowding_distance(front_fitness);
    for (std::size_t j = 0; j < fronts[r].size(); ++j) {
      pool[fronts[r][j]].rank = static_cast<int>(r);
      pool[fronts[r][j]].crowding = crowd[j];
    }
  }

  std::vector<std::size_t> idx(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (pool[a].rank != pool[b].rank) return pool[a].rank < pool[b].rank;
    if (pool[a].crowding != pool[b].crowding) return pool[a].crowding > pool[b].crowding;
    return pool[a].id < pool[b].id;
  });

  std::vector<Individual> selected;
  selected.reserve(n);
  for (std::size_t i = 0; i < n; ++i) selected.push_back(std::move(pool[idx[i]]));
  return selected;
}

/// First front of a population as an archive snapshot, deterministically
/// ordered by (n_cnot, energy, id).
inline ParetoArchive archive_front(const std::vector<Individual>& pop, int generation) {
  ParetoArchive archive;
  archive.generation = generation;
  std::vector<Fitness> fitness(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) fitness[i] = pop[i].fitness;
  const auto fronts = non_dominated_sort(fitness);
  if (fronts.empty()) return archive;
  std::vector<std::size_t> first = fronts.front();
  std::sort(first.begin(), first.end(), [&](std::size_t a, std::size_t b) {
    if (pop[a].fitness.n_cnot != pop[b].fitness.n_cnot)
      return pop[a].fitness.n_cnot < pop[b].fitness.n_cnot;
    if (pop[a].fitness.energy != pop[b].fitness.energy)
      return pop[a].fitness.energy < pop[b].fitness.energy;
    return pop[a].id < pop[b].id;
  });
  for (std::size_t i : first)
    archive.entries.push_back(ParetoEntry{pop[i].fitness, pop[i].id, pop[i].circuit,
                                          pop[i].best_angles});
  return archive;
}

}  // namespace mogvqe
