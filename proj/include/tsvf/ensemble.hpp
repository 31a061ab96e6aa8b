#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "tsvf/abl.hpp"
#include "tsvf/hilbert.hpp"
#include "tsvf/tsv.hpp"

// Seeded Monte Carlo over pre-selection -> intermediate measurement ->
// post-selection chains, the unitary measuring-device counterexample where
// the closed-form rule breaks, and the ancilla-preparation equivalence that
// backs the generalized two-state formulas.

namespace tsvf {

// Reproducibility contract: identical (master_seed, trials) produce identical
// tallies under any execution order or thread count.
struct RngPolicy {
  std::uint64_t master_seed = 0;
};

// Per-trial stream derived from (master_seed, trial_index) by splitmix64-style
// mixing; trials never share state, so the schedule cannot matter.
class TrialRng {
 public:
  TrialRng(std::uint64_t master_seed, std::uint64_t trial_index)
      : state_(mix(master_seed + kGamma * (trial_index + 1))) {}

  std::uint64_t next() {
    state_ += kGamma;
    return mix(state_);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

template <class Scalar>
std::string format_eigenvalue(Scalar value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", static_cast<double>(value));
  return std::string(buf);
}

// A unitary measuring device: `unitary` acts on system (x) device, the device
// starting in its ready state and ending in one of its pointer basis states.
template <class Scalar>
class UnitaryDevice {
 public:
  UnitaryDevice(Operator<Scalar> unitary, HilbertSpace system_space,
                HilbertSpace device_space, int ready_index,
                std::vector<std::string> outcome_labels)
      : unitary_(std::move(unitary)),
        system_space_(std::move(system_space)),
        device_space_(std::move(device_space)),
        ready_index_(ready_index),
        outcome_labels_(std::move(outcome_labels)) {
    if (unitary_.space().dimension() != system_space_.dimension() * device_space_.dimension())
      throw DimensionMismatch("device unitary does not act on system ⊗ device");
    if (!is_unitary(unitary_))
      throw ValidationError("device operator is not unitary");
    if (ready_index_ < 0 || ready_index_ >= device_space_.dimension())
      throw ValidationError("device ready index out of range");
    if (static_cast<int>(outcome_labels_.size()) != device_space_.dimension())
      throw ValidationError("need one outcome label per device basis state");
  }

  const Operator<Scalar>& unitary() const { return unitary_; }
  const HilbertSpace& system_space() const { return system_space_; }
  const HilbertSpace& device_space() const { return device_space_; }
  int ready_index() const { return ready_index_; }
  const std::vector<std::string>& outcome_labels() const { return outcome_labels_; }

 private:
  Operator<Scalar> unitary_;
  HilbertSpace system_space_;
  HilbertSpace device_space_;
  int ready_index_;
  std::vector<std::string> outcome_labels_;
};

// Declarative experiment: prepare `pre`, run the intermediate measurement if
// any, then keep the trial when the post-selection succeeds.
template <class Scalar>
struct Scenario {
  using Intermediate =
      std::variant<std::monostate, SpectralDecomposition<Scalar>, UnitaryDevice<Scalar>>;
  using Post = std::variant<std::monostate, Bra<Scalar>, Operator<Scalar>>;

  HilbertSpace space;
  Ket<Scalar> pre;
  Intermediate intermediate;
  Post post;
};

template <class Scalar>
struct EnsembleStats {
  std::uint64_t trials = 0;
  std::uint64_t selected = 0;
  std::vector<std::string> outcome_labels;  // scenario order
  std::map<std::string, std::uint64_t> outcome_counts;
  Scalar selection_rate = 0;
  std::map<std::string, Scalar> conditional_freq;
  std::map<std::string, Scalar> standard_error;

  bool no_selected_trials() const { return selected == 0; }

  Scalar freq(const std::string& label) const {
    auto it = conditional_freq.find(label);
    return it == conditional_freq.end() ? Scalar(0) : it->second;
  }
  std::uint64_t count(const std::string& label) const {
    auto it = outcome_counts.find(label);
    return it == outcome_counts.end() ? 0 : it->second;
  }

  friend bool operator==(const EnsembleStats& a, const EnsembleStats& b) {
    return a.trials == b.trials && a.selected == b.selected &&
           a.outcome_labels == b.outcome_labels && a.outcome_counts == b.outcome_counts &&
           a.selection_rate == b.selection_rate && a.conditional_freq == b.conditional_freq &&
           a.standard_error == b.standard_error;
  }
};

namespace detail {

// Acceptance probability of the post-selection applied to a unit collapsed state.
template <class Scalar>
Scalar acceptance_probability(const typename Scenario<Scalar>::Post& post,
                              const VectorX<Scalar>& collapsed) {
  if (std::holds_alternative<std::monostate>(post)) return Scalar(1);
  if (const auto* bra = std::get_if<Bra<Scalar>>(&post))
    return std::norm(bra->components().cwiseProduct(collapsed).sum());
  const auto& proj = std::get<Operator<Scalar>>(post);
  return (proj.matrix() * collapsed).squaredNorm();
}

// Every chain reduces to: sample an outcome from fixed weights, then accept
// with a fixed outcome-conditional probability. Trials are independent, so
// tallies are integer sums and threads only partition the index range.
template <class Scalar>
EnsembleStats<Scalar> run_selection_chain(std::uint64_t trials, RngPolicy rng, int threads,
                                          const std::vector<Scalar>& outcome_weights,
                                          const std::vector<Scalar>& acceptance,
                                          std::vector<std::string> labels) {
  const std::size_t k = outcome_weights.size();
  Scalar total_weight = 0;
  for (Scalar w : outcome_weights) total_weight += w;
  std::vector<double> cumulative(k);
  double acc = 0;
  std::size_t last_supported = 0;
  for (std::size_t n = 0; n < k; ++n) {
    acc += static_cast<double>(outcome_weights[n] / total_weight);
    cumulative[n] = acc;
    if (outcome_weights[n] > Scalar(0)) last_supported = n;
  }

  auto worker = [&](std::uint64_t begin, std::uint64_t end,
                    std::vector<std::uint64_t>& accepted) {
    for (std::uint64_t t = begin; t < end; ++t) {
      TrialRng r(rng.master_seed, t);
      const double u_outcome = r.uniform();
      std::size_t n = last_supported;
      for (std::size_t i = 0; i < k; ++i) {
        if (u_outcome < cumulative[i]) {
          n = i;
          break;
        }
      }
      if (r.uniform() < static_cast<double>(acceptance[n])) ++accepted[n];
    }
  };

  const int used_threads = std::max(1, std::min(threads, 64));
  std::vector<std::vector<std::uint64_t>> buckets(
      static_cast<std::size_t>(used_threads), std::vector<std::uint64_t>(k, 0));
  if (used_threads == 1) {
    worker(0, trials, buckets[0]);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (trials + used_threads - 1) / used_threads;
    for (int i = 0; i < used_threads; ++i) {
      const std::uint64_t begin = chunk * static_cast<std::uint64_t>(i);
      const std::uint64_t end = std::min(trials, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(worker, begin, end, std::ref(buckets[static_cast<std::size_t>(i)]));
    }
    for (auto& th : pool) th.join();
  }

  std::vector<std::uint64_t> accepted(k, 0);
  for (const auto& bucket : buckets)
    for (std::size_t n = 0; n < k; ++n) accepted[n] += bucket[n];

  EnsembleStats<Scalar> stats;
  stats.trials = trials;
  stats.outcome_labels = std::move(labels);
  for (std::size_t n = 0; n < k; ++n) stats.selected += accepted[n];
  stats.selection_rate =
      trials == 0 ? Scalar(0) : Scalar(static_cast<double>(stats.selected) / trials);
  for (std::size_t n = 0; n < k; ++n) {
    const std::string& label = stats.outcome_labels[n];
    stats.outcome_counts[label] = accepted[n];
    if (stats.selected > 0) {
      const Scalar f = Scalar(static_cast<double>(accepted[n]) / stats.selected);
      stats.conditional_freq[label] = f;
      stats.standard_error[label] =
          std::sqrt(f * (Scalar(1) - f) / Scalar(static_cast<double>(stats.selected)));
    }
  }
  return stats;
}

}  // namespace detail

// Projective chain: sample the outcome with Born weights |P_n|Psi>|^2,
// collapse onto P_n|Psi>/|..|, and accept with the post-selection overlap.
// With no post-selection every trial is kept and the tallies are plain Born
// frequencies. selected == 0 is reported through the stats, not thrown.
template <class Scalar>
EnsembleStats<Scalar> run_projective(const Scenario<Scalar>& s, std::uint64_t trials,
                                     RngPolicy rng, int threads = 1) {
  const auto* c = std::get_if<SpectralDecomposition<Scalar>>(&s.intermediate);
  if (c == nullptr)
    throw ValidationError("run_projective needs a projective intermediate measurement");
  require_compatible(s.space, s.pre.space(), "run_projective");
  require_compatible(s.space, c->space(), "run_projective");
  if (const auto* proj = std::get_if<Operator<Scalar>>(&s.post))
    if (!is_projector(*proj))
      throw NotAProjector("subspace post-selection operator is not a projector");

  const std::size_t k = static_cast<std::size_t>(c->size());
  std::vector<Scalar> weights(k), acceptance(k, Scalar(0));
  std::vector<std::string> labels;
  labels.reserve(k);
  for (int n = 0; n < c->size(); ++n) {
    const VectorX<Scalar> branch = c->projector(n).matrix() * s.pre.amplitudes();
    const Scalar w = branch.squaredNorm();
    weights[static_cast<std::size_t>(n)] = w;
    if (w > Scalar(kNullEventTol)) {
      const VectorX<Scalar> collapsed = branch / std::sqrt(w);
      acceptance[static_cast<std::size_t>(n)] =
          detail::acceptance_probability<Scalar>(s.post, collapsed);
    }
    labels.push_back(format_eigenvalue(c->eigenvalue(n)));
  }
  return detail::run_selection_chain<Scalar>(trials, rng, threads, weights, acceptance,
                                             std::move(labels));
}

// Unitary-device chain: entangle system and ready device, read the device
// pointer basis, collapse the system accordingly, then post-select on the
// system alone.
template <class Scalar>
EnsembleStats<Scalar> run_device(const Scenario<Scalar>& s, std::uint64_t trials,
                                 RngPolicy rng, int threads = 1) {
  const auto* dev = std::get_if<UnitaryDevice<Scalar>>(&s.intermediate);
  if (dev == nullptr) throw ValidationError("run_device needs a unitary-device intermediate");
  require_compatible(s.space, s.pre.space(), "run_device");
  require_compatible(s.space, dev->system_space(), "run_device");
  if (const auto* proj = std::get_if<Operator<Scalar>>(&s.post))
    if (!is_projector(*proj))
      throw NotAProjector("subspace post-selection operator is not a projector");

  const int sys_dim = dev->system_space().dimension();
  const int dev_dim = dev->device_space().dimension();
  VectorX<Scalar> ready = VectorX<Scalar>::Zero(dev_dim);
  ready[dev->ready_index()] = Complex<Scalar>(1, 0);
  const VectorX<Scalar> entangled =
      dev->unitary().matrix() * detail::kron(s.pre.amplitudes(), ready);

  std::vector<Scalar> weights(static_cast<std::size_t>(dev_dim), Scalar(0));
  std::vector<Scalar> acceptance(static_cast<std::size_t>(dev_dim), Scalar(0));
  for (int d = 0; d < dev_dim; ++d) {
    VectorX<Scalar> branch(sys_dim);
    for (int i = 0; i < sys_dim; ++i) branch[i] = entangled[i * dev_dim + d];
    const Scalar w = branch.squaredNorm();
    weights[static_cast<std::size_t>(d)] = w;
    if (w > Scalar(kNullEventTol))
      acceptance[static_cast<std::size_t>(d)] =
          detail::acceptance_probability<Scalar>(s.post, (branch / std::sqrt(w)).eval());
  }
  return detail::run_selection_chain<Scalar>(trials, rng, threads, weights, acceptance,
                                             dev->outcome_labels());
}

// The total-spin measuring device that records the measured value faithfully
// but cycles the z component inside the triplet subspace. System basis
// {|0,0>, |1,-1>, |1,0>, |1,1>}, device basis {ready, "0", "1"}.
template <class Scalar>
UnitaryDevice<Scalar> shimony_unitary() {
  HilbertSpace system(4, {"0,0", "1,-1", "1,0", "1,1"});
  HilbertSpace device(3, {"R", "0", "1"});
  const int dim = 12;
  auto at = [](int sys, int dev) { return sys * 3 + dev; };

  MatrixX<Scalar> u = MatrixX<Scalar>::Zero(dim, dim);
  u(at(0, 1), at(0, 0)) = Complex<Scalar>(1, 0);  // |0,0>|R> -> |0,0>|0>
  u(at(2, 2), at(1, 0)) = Complex<Scalar>(1, 0);  // |1,-1>|R> -> |1,0>|1>
  u(at(3, 2), at(2, 0)) = Complex<Scalar>(1, 0);  // |1,0>|R> -> |1,1>|1>
  u(at(1, 2), at(3, 0)) = Complex<Scalar>(1, 0);  // |1,1>|R> -> |1,-1>|1>

  // Complete the remaining columns deterministically; simulation starts from
  // the ready state and never reaches them.
  for (int col = 0; col < dim; ++col) {
    if (u.col(col).cwiseAbs().maxCoeff() > Scalar(0)) continue;
    for (int candidate = 0; candidate < dim; ++candidate) {
      VectorX<Scalar> residual = VectorX<Scalar>::Zero(dim);
      residual[candidate] = Complex<Scalar>(1, 0);
      for (int other = 0; other < dim; ++other) {
        if (other == col || u.col(other).cwiseAbs().maxCoeff() == Scalar(0)) continue;
        residual -= u.col(other).dot(residual) * u.col(other);
      }
      const Scalar norm = residual.norm();
      if (norm > Scalar(0.5)) {
        u.col(col) = residual / norm;
        break;
      }
    }
  }
  return UnitaryDevice<Scalar>(Operator<Scalar>(tensor(system, device), std::move(u)),
                               system, device, 0, {"R", "0", "1"});
}

template <class Scalar>
struct PrepareCompareResult {
  OutcomeDistribution<Scalar> formula;            // generalized closed form
  OutcomeDistribution<Scalar> composite_formula;  // plain closed form on system ⊗ ancilla
  EnsembleStats<Scalar> freq;                     // Monte Carlo on the composite chain
};

// Realizes a generalized two-state vector operationally: prepare
// sum_i a_i |Psi_i>|i> against an ancilla, post-select the correlated state
// (1/sqrt N) sum_i <Phi_i|<i|, and measure C (x) I in between. The generalized
// closed form, the composite closed form, and the simulated frequencies must
// agree.
template <class Scalar>
PrepareCompareResult<Scalar> prepare_and_compare(const GeneralizedTSV<Scalar>& g,
                                                 const SpectralDecomposition<Scalar>& c,
                                                 std::uint64_t trials, RngPolicy rng,
                                                 int threads = 1) {
  require_compatible(g.space(), c.space(), "prepare_and_compare");
  const int n_terms = g.size();
  const HilbertSpace ancilla(n_terms);
  const HilbertSpace composite_space = tensor(g.space(), ancilla);

  VectorX<Scalar> pre_raw = VectorX<Scalar>::Zero(composite_space.dimension());
  VectorX<Scalar> post_raw = VectorX<Scalar>::Zero(composite_space.dimension());
  const Scalar post_scale = Scalar(1) / std::sqrt(Scalar(n_terms));
  for (int i = 0; i < n_terms; ++i) {
    VectorX<Scalar> marker = VectorX<Scalar>::Zero(n_terms);
    marker[i] = Complex<Scalar>(1, 0);
    const auto& term = g.terms()[static_cast<std::size_t>(i)];
    pre_raw += term.coeff * detail::kron(term.ket.amplitudes(), marker);
    post_raw += post_scale * detail::kron(term.bra.components(), marker);
  }
  const Ket<Scalar> composite_pre = Ket<Scalar>::normalized(composite_space, pre_raw);
  const Bra<Scalar> composite_post(composite_space, post_raw);

  std::vector<Operator<Scalar>> lifted;
  lifted.reserve(static_cast<std::size_t>(c.size()));
  const Operator<Scalar> ancilla_identity = Operator<Scalar>::identity(ancilla);
  for (int n = 0; n < c.size(); ++n) lifted.push_back(tensor(c.projector(n), ancilla_identity));
  const SpectralDecomposition<Scalar> composite_c(composite_space, c.eigenvalues(),
                                                  std::move(lifted));

  OutcomeDistribution<Scalar> formula = abl_generalized(g, c);
  OutcomeDistribution<Scalar> composite_formula =
      abl_probability(TwoStateVector<Scalar>(composite_post, composite_pre), composite_c);

  Scenario<Scalar> scenario{composite_space, composite_pre, composite_c, composite_post};
  EnsembleStats<Scalar> freq = run_projective(scenario, trials, rng, threads);
  return PrepareCompareResult<Scalar>{std::move(formula), std::move(composite_formula),
                                      std::move(freq)};
}

}  // namespace tsvf
