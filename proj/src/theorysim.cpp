#include "shuffleval/theorysim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shuffleval/errors.hpp"
#include "shuffleval/parallel.hpp"

namespace shuffleval {

SyntheticTask SyntheticTask::build(std::string name, std::size_t family_size, std::size_t cell_count,
                                   std::vector<double> losses, std::vector<double> cell_probs) {
  if (family_size == 0 || cell_count == 0) throw ArgumentError("synthetic task needs |F| >= 1 and >= 1 cell");
  if (losses.size() != family_size * cell_count) throw ArgumentError("loss matrix has the wrong shape");
  if (cell_probs.size() != cell_count) throw ArgumentError("cell distribution has the wrong size");
  for (double l : losses)
    if (!(l >= 0.0 && l <= 1.0)) throw ArgumentError("losses must lie in [0, 1]");
  double total = 0;
  for (double p : cell_probs) {
    if (!(p >= 0.0)) throw ArgumentError("cell probabilities must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ArgumentError("cell probabilities must sum to 1");

  SyntheticTask t;
  t.name = std::move(name);
  t.family_size = family_size;
  t.cell_count = cell_count;
  t.losses = std::move(losses);
  t.cell_probs = std::move(cell_probs);
  t.uniform_ = std::all_of(t.cell_probs.begin(), t.cell_probs.end(),
                           [&](double p) { return p == t.cell_probs.front(); });
  t.cumulative_.resize(cell_count);
  std::partial_sum(t.cell_probs.begin(), t.cell_probs.end(), t.cumulative_.begin());
  t.population_loss.resize(family_size);
  for (std::size_t f = 0; f < family_size; ++f) {
    double s = 0;
    for (std::size_t c = 0; c < cell_count; ++c) s += t.cell_probs[c] * t.loss(f, c);
    t.population_loss[f] = s;
  }
  t.optimal_index = static_cast<std::size_t>(
      std::min_element(t.population_loss.begin(), t.population_loss.end()) - t.population_loss.begin());
  t.opt = t.population_loss[t.optimal_index];
  return t;
}

std::size_t draw_cell(const SyntheticTask& task, Rng& rng) {
  if (task.uniform_) return uniform_index(rng, task.cell_count);
  const double u = uniform01(rng) * task.cumulative_.back();
  auto it = std::upper_bound(task.cumulative_.begin(), task.cumulative_.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - task.cumulative_.begin()), task.cell_count - 1);
}

std::vector<std::size_t> draw_samples(const SyntheticTask& task, std::size_t m, Rng& rng) {
  std::vector<std::size_t> out(m);
  for (auto& s : out) s = draw_cell(task, rng);
  return out;
}

std::size_t erm_from_counts(const SyntheticTask& task, std::span<const std::size_t> counts) {
  if (counts.size() != task.cell_count) throw ArgumentError("erm: counts do not match the cell space");
  std::vector<double> w(counts.begin(), counts.end());
  std::size_t best = 0;
  double best_sum = 0;
  for (std::size_t f = 0; f < task.family_size; ++f) {
    const double* row = task.losses.data() + f * task.cell_count;
    double s = 0;
    for (std::size_t c = 0; c < task.cell_count; ++c) s += w[c] * row[c];
    if (f == 0 || s < best_sum) {
      best = f;
      best_sum = s;
    }
  }
  return best;
}

std::size_t erm(const SyntheticTask& task, std::span<const std::size_t> samples) {
  if (samples.empty()) throw ArgumentError("erm: need at least one sample");
  std::vector<std::size_t> counts(task.cell_count, 0);
  for (auto s : samples) {
    if (s >= task.cell_count) throw ArgumentError("erm: sample outside the cell space");
    ++counts[s];
  }
  return erm_from_counts(task, counts);
}

double occam_bound(std::size_t family_size, std::size_t m, double delta) {
  if (family_size == 0 || m == 0) throw ArgumentError("occam_bound: |F| and m must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("occam_bound: delta must lie in (0, 1)");
  return std::sqrt(2.0 * std::log(static_cast<double>(family_size) / delta) / static_cast<double>(m));
}

double occam_bound_simplified(std::size_t family_size, std::size_t m) {
  if (family_size == 0 || m == 0) throw ArgumentError("occam_bound: |F| and m must be >= 1");
  return std::sqrt((10.0 + 2.0 * std::log(static_cast<double>(family_size))) / static_cast<double>(m));
}

double occam_gate(double delta, std::size_t n_trials) {
  return delta + 3.0 * std::sqrt(delta / static_cast<double>(n_trials));
}

OccamCheck verify_occam_bound(const SyntheticTask& task, std::size_t m, double delta, std::size_t n_trials,
                              std::uint64_t seed, std::size_t threads, bool keep_records) {
  if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("verify_occam_bound: delta must lie in (0, 1)");
  if (n_trials < 100) throw ArgumentError("verify_occam_bound: n_trials must be >= 100");
  if (m == 0) throw ArgumentError("verify_occam_bound: m must be >= 1");
  OccamCheck out;
  out.bound_value = occam_bound(task.family_size, m, delta);
  out.n_trials = n_trials;
  std::vector<TheoryTrialRecord> records(n_trials);
  parallel_for(n_trials, threads, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    std::vector<std::size_t> counts(task.cell_count, 0);
    for (std::size_t i = 0; i < m; ++i) ++counts[draw_cell(task, rng)];
    const auto f_hat = erm_from_counts(task, counts);
    auto& r = records[t];
    r.m = m;
    r.delta = delta;
    r.empirical_minimizer_index = f_hat;
    r.population_loss_of_minimizer = task.population_loss[f_hat];
    r.opt = task.opt;
    r.bound_value = out.bound_value;
    r.violated = r.population_loss_of_minimizer > r.opt + r.bound_value;
  });
  for (const auto& r : records) out.violations += r.violated ? 1 : 0;
  out.violation_rate = static_cast<double>(out.violations) / static_cast<double>(n_trials);
  if (keep_records) out.records = std::move(records);
  return out;
}

std::vector<double> balanced_row(std::size_t cell_count, std::size_t ones, Rng& rng) {
  ones = std::min(ones, cell_count);
  std::vector<double> row(cell_count, 0.0);
  std::fill(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(ones), 1.0);
  for (std::size_t i = cell_count - 1; i > 0; --i) std::swap(row[i], row[uniform_index(rng, i + 1)]);
  return row;
}

namespace {

constexpr std::size_t kCells = 256;

SyntheticTask from_ones(std::string name, const std::vector<std::size_t>& ones_per_row, Rng& rng) {
  std::vector<double> losses;
  losses.reserve(ones_per_row.size() * kCells);
  for (auto ones : ones_per_row) {
    auto row = balanced_row(kCells, ones, rng);
    losses.insert(losses.end(), row.begin(), row.end());
  }
  return SyntheticTask::build(std::move(name), ones_per_row.size(), kCells, std::move(losses),
                              std::vector<double>(kCells, 1.0 / kCells));
}

}  // namespace

std::vector<SyntheticTask> adversarial_suite(std::size_t family_size, std::size_t m, double delta,
                                             std::uint64_t seed) {
  const double bound = occam_bound(family_size, m, delta);
  std::vector<SyntheticTask> suite;

  {
    Rng rng(derive_seed(seed, 0));
    const auto row = balanced_row(kCells, kCells / 2, rng);
    std::vector<double> losses;
    for (std::size_t f = 0; f < family_size; ++f) losses.insert(losses.end(), row.begin(), row.end());
    suite.push_back(SyntheticTask::build("all_equal", family_size, kCells, std::move(losses),
                                         std::vector<double>(kCells, 1.0 / kCells)));
  }
  {
    Rng rng(derive_seed(seed, 1));
    // Smallest grid gap strictly larger than the bound.
    const auto gap = static_cast<std::size_t>(std::floor(bound * kCells)) + 1;
    std::vector<std::size_t> ones(family_size, std::min(kCells, kCells / 2 + gap));
    ones[0] = kCells / 2;
    suite.push_back(from_ones("two_point_above_bound", ones, rng));
  }
  {
    Rng rng(derive_seed(seed, 2));
    const auto spread = static_cast<std::size_t>(std::ceil(2.0 * bound * kCells));
    std::vector<std::size_t> ones(family_size);
    for (std::size_t f = 0; f < family_size; ++f)
      ones[f] = f % 2 == 0 ? kCells / 2 : std::min(kCells, kCells / 2 + 1 + uniform_index(rng, spread));
    suite.push_back(from_ones("bernoulli_half_spread", ones, rng));
  }
  return suite;
}

void WhalebreakScenario::validate() const {
  if (n == 0) throw ArgumentError("whalebreak: n must be >= 1");
  if (!(b >= 0.0)) throw ArgumentError("whalebreak: b must be >= 0");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ArgumentError("whalebreak: epsilon must lie in (0, 1)");
  if (!(c > 1.0)) throw ArgumentError("whalebreak: c must be > 1");
}

std::size_t WhalebreakScenario::family_size() const {
  const double bits = b * static_cast<double>(n);
  if (bits > 20.0) throw ArgumentError("whalebreak: |F_n| = 2^" + std::to_string(bits) + " is too large to simulate");
  return static_cast<std::size_t>(std::llround(std::exp2(bits)));
}

std::size_t WhalebreakScenario::observations() const {
  const double m = static_cast<double>(n) / (epsilon * c);
  return static_cast<std::size_t>(std::ceil(m - 1e-9 * m));
}

double whalebreak_gap(const WhalebreakScenario& s) {
  s.validate();
  return std::sqrt(s.epsilon * s.c * (1.5 * s.b + 10.0 / static_cast<double>(s.n)));
}

double whalebreak_gap_limit(double b, double epsilon, double c) { return std::sqrt(epsilon * c * 1.5 * b); }

SyntheticTask dense_near_optimal_task(std::size_t family_size, Rng& rng) {
  constexpr std::size_t spread = 38;  // ~0.15 of the cell space
  std::vector<std::size_t> ones(family_size);
  for (auto& o : ones) o = kCells / 2 + uniform_index(rng, spread + 1);
  return from_ones("dense_near_optimal", ones, rng);
}

WhalebreakReport simulate_whalebreak(const WhalebreakScenario& scenario, const TaskGenerator& generator,
                                     std::size_t n_trials, std::uint64_t seed, std::size_t threads) {
  scenario.validate();
  if (n_trials == 0) throw ArgumentError("simulate_whalebreak: n_trials must be >= 1");
  WhalebreakReport rep;
  rep.scenario = scenario;
  rep.family_size = scenario.family_size();
  rep.m = scenario.observations();
  rep.gap_bound = whalebreak_gap(scenario);
  rep.n_trials = n_trials;

  Rng task_rng(derive_seed(seed, ~std::uint64_t{0}));
  const auto task = generator(rep.family_size, task_rng);
  if (task.family_size != rep.family_size) throw ArgumentError("task generator returned the wrong family size");

  std::vector<double> gaps(n_trials);
  parallel_for(n_trials, threads, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    std::vector<std::size_t> counts(task.cell_count, 0);
    for (std::size_t i = 0; i < rep.m; ++i) ++counts[draw_cell(task, rng)];
    gaps[t] = task.population_loss[erm_from_counts(task, counts)] - task.opt;
  });
  double sum = 0;
  for (double g : gaps) {
    sum += g;
    rep.max_gap = std::max(rep.max_gap, g);
    if (g > rep.gap_bound) ++rep.exceedances;
  }
  rep.mean_gap = sum / static_cast<double>(n_trials);
  rep.exceedance_fraction = static_cast<double>(rep.exceedances) / static_cast<double>(n_trials);
  return rep;
}

double whalebreak_gate(std::size_t n_trials) { return 0.01 + 3.0 * std::sqrt(0.01 / static_cast<double>(n_trials)); }

}  // namespace shuffleval
