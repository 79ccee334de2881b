#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "shuffleval/rng.hpp"

namespace shuffleval {

// A finite learning problem with exact population losses: translators are
// rows of a loss matrix over a finite cell space (source/observation
// outcomes) drawn with known probabilities.
struct SyntheticTask {
  std::string name;
  std::size_t family_size = 0;
  std::size_t cell_count = 0;
  std::vector<double> losses;      // row-major family_size x cell_count, each in [0, 1]
  std::vector<double> cell_probs;  // sums to 1
  std::vector<double> population_loss;
  std::size_t optimal_index = 0;   // lowest index attaining opt
  double opt = 0.0;

  // Validates shapes and ranges (ArgumentError) and computes the exact
  // population losses.
  static SyntheticTask build(std::string name, std::size_t family_size, std::size_t cell_count,
                             std::vector<double> losses, std::vector<double> cell_probs);

  double loss(std::size_t f, std::size_t cell) const { return losses[f * cell_count + cell]; }
  bool uniform_cells() const noexcept { return uniform_; }

 private:
  bool uniform_ = false;
  std::vector<double> cumulative_;
  friend std::size_t draw_cell(const SyntheticTask&, Rng&);
};

std::size_t draw_cell(const SyntheticTask& task, Rng& rng);
std::vector<std::size_t> draw_samples(const SyntheticTask& task, std::size_t m, Rng& rng);

// Index minimizing the empirical mean loss; ties go to the lowest index.
std::size_t erm(const SyntheticTask& task, std::span<const std::size_t> samples);
// Same, from per-cell sample counts.
std::size_t erm_from_counts(const SyntheticTask& task, std::span<const std::size_t> counts);

// Excess-loss bound for ERM over a finite family: sqrt(2 ln(|F|/delta) / m).
double occam_bound(std::size_t family_size, std::size_t m, double delta);
// The delta = 0.01 shorthand sqrt((10 + 2 ln|F|) / m); dominates occam_bound
// whenever delta >= e^-5.
double occam_bound_simplified(std::size_t family_size, std::size_t m);
// Largest violation rate consistent with probability delta at 3 binomial sigma.
double occam_gate(double delta, std::size_t n_trials);

struct TheoryTrialRecord {
  std::size_t m = 0;
  double delta = 0.0;
  std::size_t empirical_minimizer_index = 0;
  double population_loss_of_minimizer = 0.0;
  double opt = 0.0;
  double bound_value = 0.0;
  bool violated = false;  // population_loss_of_minimizer > opt + bound_value
};

struct OccamCheck {
  double violation_rate = 0.0;
  double bound_value = 0.0;
  std::size_t violations = 0;
  std::size_t n_trials = 0;
  std::vector<TheoryTrialRecord> records;  // filled when requested
};

// n_trials independent m-sample draws, ERM on each, counting trials whose
// minimizer exceeds opt + occam_bound. Trial t uses derive_seed(seed, t).
OccamCheck verify_occam_bound(const SyntheticTask& task, std::size_t m, double delta, std::size_t n_trials,
                              std::uint64_t seed, std::size_t threads = 1, bool keep_records = false);

// Built-in stress tasks for (|F|, m, delta): identical rows, a two-point
// family one grid step past the bound, and Bernoulli(1/2) rows spread over
// [1/2, 1/2 + 2 bound].
std::vector<SyntheticTask> adversarial_suite(std::size_t family_size, std::size_t m, double delta,
                                             std::uint64_t seed);

// Random 0/1 row over cell_count cells with exactly `ones` ones.
std::vector<double> balanced_row(std::size_t cell_count, std::size_t ones, Rng& rng);

struct WhalebreakScenario {
  std::size_t n = 0;     // interactive experiments
  double b = 1.0;        // bits per experiment, log2|F_n| / n
  double epsilon = 0.0;  // observation / experiment cost ratio, in (0, 1)
  double c = 4.0;        // budget reduction factor, > 1

  void validate() const;                  // ArgumentError
  std::size_t family_size() const;        // round(2^(b n)), capped at 2^20
  std::size_t observations() const;       // ceil(n / (epsilon c))
};

// sqrt(epsilon c (3b/2 + 10/n)).
double whalebreak_gap(const WhalebreakScenario& s);
// n -> infinity limit, sqrt(epsilon c 3b/2).
double whalebreak_gap_limit(double b, double epsilon, double c);

using TaskGenerator = std::function<SyntheticTask(std::size_t family_size, Rng& rng)>;

// Default generator: 256 uniform cells, Bernoulli(1/2)-variance rows whose
// population losses are spread densely over [1/2, 0.65].
SyntheticTask dense_near_optimal_task(std::size_t family_size, Rng& rng);

struct WhalebreakReport {
  WhalebreakScenario scenario;
  std::size_t family_size = 0;
  std::size_t m = 0;
  double gap_bound = 0.0;
  std::size_t n_trials = 0;
  std::size_t exceedances = 0;
  double exceedance_fraction = 0.0;
  double mean_gap = 0.0;
  double max_gap = 0.0;
};

// The interactive learner is modeled as oracle access to the population
// optimum; each trial measures loss(ERM on m observations) - opt.
WhalebreakReport simulate_whalebreak(const WhalebreakScenario& scenario, const TaskGenerator& generator,
                                     std::size_t n_trials, std::uint64_t seed, std::size_t threads = 1);

// 0.01 + 3 sqrt(0.01 / n_trials).
double whalebreak_gate(std::size_t n_trials);

}  // namespace shuffleval
