#include "eat/evolution.hpp"

#include <algorithm>
#include <string>

namespace eat::evo {

namespace {

void check_config(const CrossoverConfig& cfg) {
  if (cfg.cr < 0.0 || cfg.cr > 1.0) {
    throw InvalidConfig("crossover constant must be in [0, 1], got " +
                        std::to_string(cfg.cr));
  }
}

void check_config(const MutationConfig& cfg, int dim) {
  if (cfg.mu < 0.0 || cfg.mu > 1.0) {
    throw InvalidConfig("mutation constant must be in [0, 1], got " +
                        std::to_string(cfg.mu));
  }
  if (static_cast<int>(cfg.v_lo.size()) != dim ||
      static_cast<int>(cfg.v_hi.size()) != dim) {
    throw LengthMismatch("mutation bounds must have one entry per feature");
  }
  for (int j = 0; j < dim; ++j) {
    if (cfg.v_lo[j] > cfg.v_hi[j]) {
      throw InvalidConfig("mutation bound v_lo > v_hi at feature " + std::to_string(j));
    }
  }
}

}  // namespace

Population Population::random(int count, int dim, double lo, double hi, Rng& rng) {
  Population pop;
  pop.individuals.resize(count);
  for (auto& ind : pop.individuals) {
    ind.resize(dim);
    for (auto& v : ind) v = rng.uniform(lo, hi);
  }
  return pop;
}

MutationConfig MutationConfig::uniform_bounds(int dim, double mu, double lo, double hi) {
  MutationConfig cfg;
  cfg.mu = mu;
  cfg.v_lo.assign(dim, lo);
  cfg.v_hi.assign(dim, hi);
  return cfg;
}

CrossoverResult crossover_elementwise(const Population& pop, int target, int donor,
                                      const CrossoverConfig& cfg, Rng& rng) {
  check_config(cfg);
  const int l = pop.size();
  if (target < 0 || target >= l || donor < 0 || donor >= l) {
    throw IndexOutOfRange("crossover indices (" + std::to_string(target) + ", " +
                          std::to_string(donor) + ") outside population of " +
                          std::to_string(l));
  }
  if (target == donor) {
    throw SameIndividual("crossover target and donor must differ");
  }
  const Individual& t = pop.individuals[target];
  const Individual& d = pop.individuals[donor];
  const int dim = static_cast<int>(t.size());
  CrossoverResult r;
  r.child.resize(dim);
  r.mask.resize(dim);
  for (int j = 0; j < dim; ++j) {
    const bool take = rng.uniform() <= cfg.cr;
    r.mask[j] = take ? 1.0 : 0.0;
    r.child[j] = take ? d[j] : t[j];
  }
  return r;
}

Individual crossover_matrix_form(const Individual& target, const Individual& donor,
                                 const std::vector<double>& mask) {
  if (target.size() != donor.size() || target.size() != mask.size()) {
    throw LengthMismatch("crossover_matrix_form: lengths " +
                         std::to_string(target.size()) + ", " +
                         std::to_string(donor.size()) + ", " +
                         std::to_string(mask.size()) + " differ");
  }
  Individual out(target.size());
  for (size_t j = 0; j < out.size(); ++j) {
    out[j] = (1.0 - mask[j]) * target[j] + mask[j] * donor[j];
  }
  return out;
}

MutationResult mutation_elementwise(const Individual& ind, const MutationConfig& cfg,
                                    Rng& rng) {
  const int dim = static_cast<int>(ind.size());
  check_config(cfg, dim);
  MutationResult r;
  r.child.resize(dim);
  r.weights.resize(dim);
  for (int j = 0; j < dim; ++j) {
    if (rng.uniform() <= cfg.mu) {
      const double w = rng.uniform(cfg.v_lo[j], cfg.v_hi[j]);
      r.weights[j] = w;
      r.child[j] = w * ind[j];
    } else {
      r.weights[j] = 1.0;
      r.child[j] = ind[j];
    }
  }
  return r;
}

Individual mutation_matrix_form(const Individual& ind, const std::vector<double>& weights) {
  if (ind.size() != weights.size()) {
    throw LengthMismatch("mutation_matrix_form: lengths " + std::to_string(ind.size()) +
                         " and " + std::to_string(weights.size()) + " differ");
  }
  Individual out(ind.size());
  for (size_t j = 0; j < out.size(); ++j) out[j] = weights[j] * ind[j];
  return out;
}

EvolveResult evolve(Population pop, const Fitness& fitness, int generations,
                    const CrossoverConfig& ccfg, const MutationConfig& mcfg, Rng& rng) {
  if (pop.size() == 0) throw EmptyPopulation("evolve needs a non-empty population");
  if (pop.size() < 2) throw EmptyPopulation("evolve needs at least two individuals");
  check_config(ccfg);
  check_config(mcfg, pop.dim());

  const int l = pop.size();
  std::vector<double> fit(l);
  for (int i = 0; i < l; ++i) fit[i] = fitness(pop.individuals[i]);

  EvolveResult result;
  result.best_trace.push_back(*std::min_element(fit.begin(), fit.end()));

  for (int g = 0; g < generations; ++g) {
    Population next = pop;
    for (int i = 0; i < l; ++i) {
      // donor uniform over the other l-1 individuals
      int donor = static_cast<int>(rng.below(static_cast<uint64_t>(l - 1)));
      if (donor >= i) ++donor;
      CrossoverResult crossed = crossover_elementwise(pop, i, donor, ccfg, rng);
      MutationResult mutated = mutation_elementwise(crossed.child, mcfg, rng);
      const double f = fitness(mutated.child);
      if (f < fit[i]) {  // ties keep the parent
        next.individuals[i] = std::move(mutated.child);
        fit[i] = f;
      }
    }
    pop = std::move(next);
    result.best_trace.push_back(*std::min_element(fit.begin(), fit.end()));
  }
  result.population = std::move(pop);
  return result;
}

std::pair<int, Individual> best_individual(const Population& pop, const Fitness& fitness) {
  if (pop.size() == 0) throw EmptyPopulation("best_individual needs a non-empty population");
  int best = 0;
  double best_fit = fitness(pop.individuals[0]);
  for (int i = 1; i < pop.size(); ++i) {
    const double f = fitness(pop.individuals[i]);
    if (f < best_fit) {
      best_fit = f;
      best = i;
    }
  }
  return {best, pop.individuals[best]};
}

}  // namespace eat::evo
