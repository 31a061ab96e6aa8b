#pragma once

#include <cmath>
#include <complex>

#include "tsvf/abl.hpp"
#include "tsvf/hilbert.hpp"
#include "tsvf/tsv.hpp"

// Weak values for all three description kinds. A weak value may be complex
// and may lie far outside the spectrum; everything interesting happens when
// the selection denominator is small, so its magnitude travels with the value
// as a numerical-reliability witness.

namespace tsvf {

template <class Scalar>
struct WeakValue {
  Complex<Scalar> value;
  Scalar condition;  // |denominator|; large weak values come from small ones
};

// C_w = <Phi|C|Psi> / <Phi|Psi>
template <class Scalar>
WeakValue<Scalar> weak_value(const TwoStateVector<Scalar>& t, const Operator<Scalar>& c) {
  require_compatible(t.space(), c.space(), "weak_value");
  if (!is_hermitian(c)) throw NonHermitian("weak_value requires a Hermitian observable");
  const Complex<Scalar> den = inner(t.bra(), t.ket());
  if (std::abs(den) < Scalar(kNullEventTol))
    throw OrthogonalSelection("pre- and post-selected states are orthogonal");
  return WeakValue<Scalar>{sandwich(t.bra(), c, t.ket()) / den, std::abs(den)};
}

// C_w = sum_i a_i <Phi_i|C|Psi_i> / sum_i a_i <Phi_i|Psi_i>
template <class Scalar>
WeakValue<Scalar> weak_value_generalized(const GeneralizedTSV<Scalar>& g,
                                         const Operator<Scalar>& c) {
  require_compatible(g.space(), c.space(), "weak_value_generalized");
  if (!is_hermitian(c))
    throw NonHermitian("weak_value_generalized requires a Hermitian observable");
  Complex<Scalar> num = 0;
  Complex<Scalar> den = 0;
  for (const auto& term : g.terms()) {
    num += term.coeff * sandwich(term.bra, c, term.ket);
    den += term.coeff * inner(term.bra, term.ket);
  }
  if (std::abs(den) < Scalar(kNullEventTol))
    throw OrthogonalSelection("generalized selection denominator vanishes");
  return WeakValue<Scalar>{num / den, std::abs(den)};
}

// Partial post-selection on a subspace projector:
// C_w = <Psi|P_B C|Psi> / <Psi|P_B|Psi>. With P_B = I this is the plain
// expectation value, the weak value of a pre-selected-only system.
template <class Scalar>
WeakValue<Scalar> weak_value_degenerate(const Ket<Scalar>& pre,
                                        const Operator<Scalar>& post_proj,
                                        const Operator<Scalar>& c) {
  require_compatible(pre.space(), c.space(), "weak_value_degenerate");
  require_compatible(pre.space(), post_proj.space(), "weak_value_degenerate");
  if (!is_projector(post_proj))
    throw NotAProjector("post-selection operator is not a projector");
  if (!is_hermitian(c))
    throw NonHermitian("weak_value_degenerate requires a Hermitian observable");
  const VectorX<Scalar>& psi = pre.amplitudes();
  const Complex<Scalar> num = psi.dot(post_proj.matrix() * (c.matrix() * psi));
  const Complex<Scalar> den = psi.dot(post_proj.matrix() * psi);
  if (std::abs(den) < Scalar(kNullEventTol))
    throw OrthogonalSelection("pre-selected state is orthogonal to the post subspace");
  return WeakValue<Scalar>{num / den, std::abs(den)};
}

}  // namespace tsvf
