#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "eat/errors.hpp"
#include "eat/rng.hpp"

namespace eat::evo {

using Individual = std::vector<double>;

struct Population {
  std::vector<Individual> individuals;  // l rows of d features

  int size() const { return static_cast<int>(individuals.size()); }
  int dim() const { return individuals.empty() ? 0 : static_cast<int>(individuals[0].size()); }

  static Population random(int count, int dim, double lo, double hi, Rng& rng);
};

struct CrossoverConfig {
  double cr = 0.9;  // crossover constant in [0, 1]
};

struct MutationConfig {
  double mu = 0.1;            // mutation constant in [0, 1]
  std::vector<double> v_lo;   // per-feature lower scale bound
  std::vector<double> v_hi;   // per-feature upper scale bound

  static MutationConfig uniform_bounds(int dim, double mu, double lo, double hi);
};

struct CrossoverResult {
  Individual child;
  std::vector<double> mask;  // realized selection, 1 = feature taken from donor
};

struct MutationResult {
  Individual child;
  std::vector<double> weights;  // realized per-feature scales, 1 where untouched
};

// Feature j comes from the donor iff the j-th uniform draw in [0,1) is <= CR.
// Draws are consumed in feature order, one per feature.
CrossoverResult crossover_elementwise(const Population& pop, int target, int donor,
                                      const CrossoverConfig& cfg, Rng& rng);

// Diag(1-mask)*target + Diag(mask)*donor. The diagonals are kept as plain
// vectors; with a 0/1 mask this reproduces crossover_elementwise bit-exactly.
Individual crossover_matrix_form(const Individual& target, const Individual& donor,
                                 const std::vector<double>& mask);

// Feature j is scaled by a uniform draw in [v_lo[j], v_hi[j]) iff the j-th
// gate draw is <= MU; the scale draw is consumed only when the gate fires.
MutationResult mutation_elementwise(const Individual& ind, const MutationConfig& cfg,
                                    Rng& rng);

// Elementwise product with the realized weight vector.
Individual mutation_matrix_form(const Individual& ind, const std::vector<double>& weights);

using Fitness = std::function<double(const Individual&)>;

struct EvolveResult {
  Population population;
  // best_trace[0] is the initial population's best fitness; one more entry
  // per generation after selection. Non-increasing under elitism.
  std::vector<double> best_trace;
};

// Synchronous generational loop: every individual produces one offspring
// (crossover with a uniformly chosen distinct donor, then mutation) built
// against the current generation; one-to-one elitist replacement keeps the
// parent unless the offspring is strictly fitter (minimization).
EvolveResult evolve(Population pop, const Fitness& fitness, int generations,
                    const CrossoverConfig& ccfg, const MutationConfig& mcfg, Rng& rng);

// Argmin of fitness; lowest index on ties.
std::pair<int, Individual> best_individual(const Population& pop, const Fitness& fitness);

}  // namespace eat::evo
