#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "tsvf/hilbert.hpp"
#include "tsvf/tsv.hpp"

// Exact outcome probabilities of an ideal intermediate measurement for every
// description kind: the ABL rule, its generalized and degenerate-post-selection
// variants, the Born rule they collapse to, elements of reality, and the
// total-probability consistency identity.

namespace tsvf {

// Raw selection weights below this are treated as exact null events rather
// than round-off; far below any physical probability at desk-scale dimensions.
inline constexpr double kNullEventTol = 1e-14;

// Eigenvalue -> conditional probability, one entry per spectral projector of
// the measured observable, in increasing eigenvalue order.
template <class Scalar>
class OutcomeDistribution {
 public:
  OutcomeDistribution(SpectralDecomposition<Scalar> observable,
                      std::vector<Scalar> probabilities)
      : observable_(std::move(observable)), probabilities_(std::move(probabilities)) {
    if (static_cast<int>(probabilities_.size()) != observable_.size())
      throw ValidationError("need exactly one probability per spectral projector");
    Scalar total = 0;
    for (auto& p : probabilities_) {
      if (p < Scalar(0)) {
        if (p < Scalar(-1e-12)) throw ValidationError("negative outcome probability");
        p = 0;  // clamp arithmetic dust
      }
      total += p;
    }
    if (std::abs(total - Scalar(1)) > Scalar(kStructureTol))
      throw ValidationError("outcome probabilities do not sum to 1");
  }

  const SpectralDecomposition<Scalar>& observable() const { return observable_; }
  int size() const { return static_cast<int>(probabilities_.size()); }
  Scalar eigenvalue(int n) const { return observable_.eigenvalue(n); }
  Scalar probability(int n) const { return probabilities_[static_cast<std::size_t>(n)]; }
  const std::vector<Scalar>& probabilities() const { return probabilities_; }

  std::vector<std::pair<Scalar, Scalar>> entries() const {
    std::vector<std::pair<Scalar, Scalar>> out;
    out.reserve(probabilities_.size());
    for (int n = 0; n < size(); ++n) out.emplace_back(eigenvalue(n), probability(n));
    return out;
  }

 private:
  SpectralDecomposition<Scalar> observable_;
  std::vector<Scalar> probabilities_;
};

namespace detail {

// Normalizes raw weights into a distribution; the raw total is the null gate.
template <class Scalar>
OutcomeDistribution<Scalar> weights_to_distribution(
    const SpectralDecomposition<Scalar>& observable, std::vector<Scalar> weights,
    const char* what) {
  Scalar total = 0;
  for (Scalar w : weights) total += w;
  if (total < Scalar(kNullEventTol))
    throw NullEvent(std::string(what) +
                    ": every selection path is blocked (total weight " +
                    std::to_string(static_cast<double>(total)) + ")");
  for (Scalar& w : weights) w /= total;
  return OutcomeDistribution<Scalar>(observable, std::move(weights));
}

}  // namespace detail

// Prob(c_n) = |<Phi|P_n|Psi>|^2 / sum_j |<Phi|P_j|Psi>|^2
template <class Scalar>
OutcomeDistribution<Scalar> abl_probability(const TwoStateVector<Scalar>& t,
                                            const SpectralDecomposition<Scalar>& c) {
  require_compatible(t.space(), c.space(), "abl_probability");
  std::vector<Scalar> weights(static_cast<std::size_t>(c.size()));
  for (int n = 0; n < c.size(); ++n)
    weights[static_cast<std::size_t>(n)] = std::norm(sandwich(t.bra(), c.projector(n), t.ket()));
  return detail::weights_to_distribution(c, std::move(weights), "abl_probability");
}

// Prob(c_n) = |sum_i a_i <Phi_i|P_n|Psi_i>|^2 / (same summed over j)
template <class Scalar>
OutcomeDistribution<Scalar> abl_generalized(const GeneralizedTSV<Scalar>& g,
                                            const SpectralDecomposition<Scalar>& c) {
  require_compatible(g.space(), c.space(), "abl_generalized");
  std::vector<Scalar> weights(static_cast<std::size_t>(c.size()));
  for (int n = 0; n < c.size(); ++n) {
    Complex<Scalar> amplitude = 0;
    for (const auto& term : g.terms())
      amplitude += term.coeff * sandwich(term.bra, c.projector(n), term.ket);
    weights[static_cast<std::size_t>(n)] = std::norm(amplitude);
  }
  return detail::weights_to_distribution(c, std::move(weights), "abl_generalized");
}

// Post-selection on a degenerate outcome, i.e. on a subspace:
// Prob(c_n) = |P_B P_n |Psi>|^2 / sum_j |P_B P_j |Psi>|^2
template <class Scalar>
OutcomeDistribution<Scalar> abl_degenerate(const Ket<Scalar>& pre,
                                           const Operator<Scalar>& post_proj,
                                           const SpectralDecomposition<Scalar>& c) {
  require_compatible(pre.space(), c.space(), "abl_degenerate");
  require_compatible(pre.space(), post_proj.space(), "abl_degenerate");
  if (!is_projector(post_proj))
    throw NotAProjector("post-selection operator is not a projector");
  std::vector<Scalar> weights(static_cast<std::size_t>(c.size()));
  for (int n = 0; n < c.size(); ++n) {
    const VectorX<Scalar> filtered =
        post_proj.matrix() * (c.projector(n).matrix() * pre.amplitudes());
    weights[static_cast<std::size_t>(n)] = filtered.squaredNorm();
  }
  return detail::weights_to_distribution(c, std::move(weights), "abl_degenerate");
}

// Prob(c_n) = |P_n |Psi>|^2, the no-post-selection limit.
template <class Scalar>
OutcomeDistribution<Scalar> born_probability(const Ket<Scalar>& pre,
                                             const SpectralDecomposition<Scalar>& c) {
  require_compatible(pre.space(), c.space(), "born_probability");
  std::vector<Scalar> weights(static_cast<std::size_t>(c.size()));
  for (int n = 0; n < c.size(); ++n)
    weights[static_cast<std::size_t>(n)] =
        (c.projector(n).matrix() * pre.amplitudes()).squaredNorm();
  // Completeness keeps the total at 1; the shared path only removes dust.
  return detail::weights_to_distribution(c, std::move(weights), "born_probability");
}

// The eigenvalue that can be inferred with certainty from both selections,
// when one exists: the applicable distribution puts weight >= 1 - tol on it.
template <class Scalar>
std::optional<Scalar> element_of_reality(const Description<Scalar>& d,
                                         const SpectralDecomposition<Scalar>& c,
                                         Scalar tol = Scalar(1e-10)) {
  OutcomeDistribution<Scalar> dist = [&] {
    if (const auto* pre = std::get_if<Ket<Scalar>>(&d)) return born_probability(*pre, c);
    if (const auto* t = std::get_if<TwoStateVector<Scalar>>(&d))
      return abl_probability(*t, c);
    return abl_generalized(std::get<GeneralizedTSV<Scalar>>(d), c);
  }();
  for (int n = 0; n < dist.size(); ++n)
    if (dist.probability(n) >= Scalar(1) - tol) return dist.eigenvalue(n);
  return std::nullopt;
}

template <class Scalar>
struct TotalProbabilityReport {
  OutcomeDistribution<Scalar> lhs;  // Born rule, no final measurement mentioned
  OutcomeDistribution<Scalar> rhs;  // decomposition over final outcomes
  Scalar max_abs_gap;
};

// Decomposes Prob(c_n) over the outcomes of a later complete measurement,
// with the final-outcome weights computed on the condition that the
// intermediate measurement was in fact performed. The weight of final outcome
// f is then sum_n |P_f P_n |Psi>|^2, and reassembling the conditional
// distributions against those weights must reproduce the Born probabilities.
template <class Scalar>
TotalProbabilityReport<Scalar> total_probability_check(
    const Ket<Scalar>& pre, const SpectralDecomposition<Scalar>& c,
    const SpectralDecomposition<Scalar>& final_measurement) {
  require_compatible(pre.space(), c.space(), "total_probability_check");
  require_compatible(pre.space(), final_measurement.space(), "total_probability_check");

  OutcomeDistribution<Scalar> lhs = born_probability(pre, c);

  std::vector<Scalar> rhs_weights(static_cast<std::size_t>(c.size()), Scalar(0));
  for (int f = 0; f < final_measurement.size(); ++f) {
    const Operator<Scalar>& post = final_measurement.projector(f);
    Scalar branch_weight = 0;
    for (int n = 0; n < c.size(); ++n)
      branch_weight +=
          (post.matrix() * (c.projector(n).matrix() * pre.amplitudes())).squaredNorm();
    if (branch_weight < Scalar(kNullEventTol)) continue;  // unreachable branch
    const OutcomeDistribution<Scalar> conditional = abl_degenerate(pre, post, c);
    for (int n = 0; n < c.size(); ++n)
      rhs_weights[static_cast<std::size_t>(n)] += branch_weight * conditional.probability(n);
  }
  OutcomeDistribution<Scalar> rhs =
      detail::weights_to_distribution(c, std::move(rhs_weights), "total_probability_check");

  Scalar gap = 0;
  for (int n = 0; n < c.size(); ++n)
    gap = std::max(gap, std::abs(lhs.probability(n) - rhs.probability(n)));
  return TotalProbabilityReport<Scalar>{std::move(lhs), std::move(rhs), gap};
}

}  // namespace tsvf
