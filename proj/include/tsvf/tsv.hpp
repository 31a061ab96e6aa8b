#pragma once

#include <complex>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tsvf/hilbert.hpp"

// State descriptions for systems selected by their past, their future, or
// both: two-state vectors <Phi| |Psi>, generalized two-state vectors
// sum_i alpha_i <Phi_i| |Psi_i>, and the time-reversal involution on each.

namespace tsvf {

// <Phi| |Psi>: post-selected bra and pre-selected ket over one space.
// The overlap <Phi|Psi> may be any complex number, including zero.
template <class Scalar>
class TwoStateVector {
 public:
  TwoStateVector(Bra<Scalar> bra, Ket<Scalar> ket)
      : bra_(std::move(bra)), ket_(std::move(ket)) {
    require_compatible(bra_.space(), ket_.space(), "two-state vector");
  }

  const Bra<Scalar>& bra() const { return bra_; }
  const Ket<Scalar>& ket() const { return ket_; }
  const HilbertSpace& space() const { return ket_.space(); }

 private:
  Bra<Scalar> bra_;
  Ket<Scalar> ket_;
};

template <class Scalar>
struct GtsvTerm {
  Complex<Scalar> coeff;
  Bra<Scalar> bra;
  Ket<Scalar> ket;
};

// sum_i alpha_i <Phi_i| |Psi_i> with the Phi family and the Psi family each
// orthonormal, matching the guarded-ancilla preparation where every term
// pairs with a distinct orthonormal ancilla state. No constraint is placed on
// the coefficient vector itself: all downstream formulas are homogeneous in it.
template <class Scalar>
class GeneralizedTSV {
 public:
  explicit GeneralizedTSV(std::vector<GtsvTerm<Scalar>> terms) : terms_(std::move(terms)) {
    if (terms_.empty())
      throw ValidationError("generalized two-state vector needs at least one term");
    const HilbertSpace& space = terms_.front().ket.space();
    bool any_nonzero = false;
    for (const auto& t : terms_) {
      require_compatible(space, t.ket.space(), "generalized two-state vector");
      require_compatible(space, t.bra.space(), "generalized two-state vector");
      if (std::abs(t.coeff) > Scalar(0)) any_nonzero = true;
    }
    if (!any_nonzero)
      throw ValidationError("all coefficients vanish");
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      for (std::size_t j = i + 1; j < terms_.size(); ++j) {
        const Complex<Scalar> ket_overlap =
            terms_[i].ket.amplitudes().dot(terms_[j].ket.amplitudes());
        const Complex<Scalar> bra_overlap =
            terms_[i].bra.components().dot(terms_[j].bra.components());
        if (std::abs(ket_overlap) > Scalar(kStructureTol))
          throw ValidationError("pre-selected states are not mutually orthonormal");
        if (std::abs(bra_overlap) > Scalar(kStructureTol))
          throw ValidationError("post-selected states are not mutually orthonormal");
      }
    }
  }

  const std::vector<GtsvTerm<Scalar>>& terms() const { return terms_; }
  int size() const { return static_cast<int>(terms_.size()); }
  const HilbertSpace& space() const { return terms_.front().ket.space(); }

 private:
  std::vector<GtsvTerm<Scalar>> terms_;
};

// What is known about the system between the selections. A purely
// post-selected state is deliberately not representable here.
template <class Scalar>
using Description =
    std::variant<Ket<Scalar>, TwoStateVector<Scalar>, GeneralizedTSV<Scalar>>;

// Reversal of the arrow of time: <Phi| |Psi>  ->  <Psi| |Phi>.
// Dual components swap with componentwise conjugation, so applying it twice
// restores the original bit for bit.
template <class Scalar>
TwoStateVector<Scalar> reverse(const TwoStateVector<Scalar>& t) {
  return TwoStateVector<Scalar>(
      Bra<Scalar>(t.space(), t.ket().amplitudes().conjugate()),
      Ket<Scalar>(t.space(), t.bra().components().conjugate()));
}

// sum_i alpha_i <Phi_i| |Psi_i>  ->  sum_i conj(alpha_i) <Psi_i| |Phi_i>.
template <class Scalar>
GeneralizedTSV<Scalar> reverse_generalized(const GeneralizedTSV<Scalar>& g) {
  std::vector<GtsvTerm<Scalar>> reversed;
  reversed.reserve(g.terms().size());
  for (const auto& t : g.terms()) {
    reversed.push_back(GtsvTerm<Scalar>{
        std::conj(t.coeff),
        Bra<Scalar>(t.ket.space(), t.ket.amplitudes().conjugate()),
        Ket<Scalar>(t.bra.space(), t.bra.components().conjugate())});
  }
  return GeneralizedTSV<Scalar>(std::move(reversed));
}

// Lifts a pre/post description into the one-term generalized form so a single
// evaluator can serve both. Pre-only descriptions have no exact generalized
// form and take the dedicated Born-rule path instead.
template <class Scalar>
GeneralizedTSV<Scalar> as_generalized(const Description<Scalar>& d) {
  if (std::holds_alternative<Ket<Scalar>>(d))
    throw UnsupportedDescription(
        "a pre-selected-only description has no generalized two-state form");
  if (const auto* t = std::get_if<TwoStateVector<Scalar>>(&d)) {
    return GeneralizedTSV<Scalar>(
        {GtsvTerm<Scalar>{Complex<Scalar>(1, 0), t->bra(), t->ket()}});
  }
  return std::get<GeneralizedTSV<Scalar>>(d);
}

}  // namespace tsvf
