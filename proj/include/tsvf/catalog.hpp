#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tsvf/abl.hpp"
#include "tsvf/ensemble.hpp"
#include "tsvf/hilbert.hpp"
#include "tsvf/pointer.hpp"
#include "tsvf/tsv.hpp"
#include "tsvf/weak.hpp"

// Named, self-verifying worked examples. Each example packages a scenario
// with every quantitative claim it is supposed to satisfy; running it checks
// the closed forms, the Monte Carlo engine, and the pointer model against
// each other.

namespace tsvf {

template <class Scalar>
struct ClaimOutcome {
  Complex<Scalar> measured;
  Complex<Scalar> expected;
  Scalar tolerance;

  bool passed() const { return std::abs(measured - expected) <= tolerance; }
};

template <class Scalar>
struct Claim {
  std::string label;
  std::function<ClaimOutcome<Scalar>()> run;
};

template <class Scalar>
struct NamedExample {
  std::string name;
  std::string summary;
  std::vector<Claim<Scalar>> claims;
};

template <class Scalar>
struct ClaimReport {
  std::string label;
  ClaimOutcome<Scalar> outcome;
};

template <class Scalar>
std::vector<ClaimReport<Scalar>> run_example(const NamedExample<Scalar>& example) {
  std::vector<ClaimReport<Scalar>> reports;
  reports.reserve(example.claims.size());
  for (const auto& claim : example.claims)
    reports.push_back(ClaimReport<Scalar>{claim.label, claim.run()});
  return reports;
}

namespace detail {

template <class Scalar>
Scalar probability_at(const OutcomeDistribution<Scalar>& dist, Scalar eigenvalue) {
  int best = 0;
  for (int n = 1; n < dist.size(); ++n)
    if (std::abs(dist.eigenvalue(n) - eigenvalue) < std::abs(dist.eigenvalue(best) - eigenvalue))
      best = n;
  return dist.probability(best);
}

template <class Scalar>
ClaimOutcome<Scalar> check(Complex<Scalar> measured, Complex<Scalar> expected, Scalar tol) {
  return ClaimOutcome<Scalar>{measured, expected, tol};
}

}  // namespace detail

// A single particle in three boxes, selected so that it is certainly in box A
// if box A is opened, certainly in box B if box B is opened instead, and
// carries weak occupation -1 in box C.
template <class Scalar>
NamedExample<Scalar> three_box(std::uint64_t trials = 100000, std::uint64_t seed = 42) {
  using Cx = Complex<Scalar>;
  const HilbertSpace space(3, {"A", "B", "C"});
  const Scalar r = Scalar(1) / std::sqrt(Scalar(3));
  VectorX<Scalar> pre_amps(3), post_comps(3);
  pre_amps << Cx(r, 0), Cx(r, 0), Cx(r, 0);
  post_comps << Cx(r, 0), Cx(r, 0), Cx(-r, 0);
  const Ket<Scalar> pre(space, pre_amps);
  const Bra<Scalar> post(space, post_comps);
  const TwoStateVector<Scalar> tsv(post, pre);

  const Operator<Scalar> box_a = projector_onto<Scalar>({Ket<Scalar>::basis_state(space, 0)});
  const Operator<Scalar> box_b = projector_onto<Scalar>({Ket<Scalar>::basis_state(space, 1)});
  const Operator<Scalar> box_c = projector_onto<Scalar>({Ket<Scalar>::basis_state(space, 2)});
  const Operator<Scalar> any_box = box_a + box_b + box_c;

  NamedExample<Scalar> example;
  example.name = "three-box";
  example.summary =
      "particle in three boxes, certainly found in A or in B, weak occupation -1 in C";

  auto abl_claim = [=](std::string label, Operator<Scalar> observable,
                       const TwoStateVector<Scalar>& t) {
    return Claim<Scalar>{std::move(label), [=]() {
                           const auto dist = abl_probability(t, eigendecompose(observable));
                           return detail::check<Scalar>(
                               Cx(detail::probability_at(dist, Scalar(1)), 0), Cx(1, 0),
                               Scalar(1e-10));
                         }};
  };
  example.claims.push_back(abl_claim("opening box A finds the particle with certainty",
                                     box_a, tsv));
  example.claims.push_back(abl_claim("opening box B finds the particle with certainty",
                                     box_b, tsv));
  example.claims.push_back(abl_claim("opening all boxes finds the particle with certainty",
                                     any_box, tsv));
  example.claims.push_back(abl_claim("box A certainty survives time reversal", box_a,
                                     reverse(tsv)));
  example.claims.push_back(abl_claim("box B certainty survives time reversal", box_b,
                                     reverse(tsv)));

  auto weak_claim = [=](std::string label, Operator<Scalar> observable, Cx expected) {
    return Claim<Scalar>{std::move(label), [=]() {
                           return detail::check<Scalar>(weak_value(tsv, observable).value,
                                                        expected, Scalar(1e-12));
                         }};
  };
  example.claims.push_back(weak_claim("weak occupation of box A", box_a, Cx(1, 0)));
  example.claims.push_back(weak_claim("weak occupation of box B", box_b, Cx(1, 0)));
  example.claims.push_back(weak_claim("weak occupation of box C", box_c, Cx(-1, 0)));
  example.claims.push_back(weak_claim("weak occupations sum to one", any_box, Cx(1, 0)));

  example.claims.push_back(Claim<Scalar>{
      "simulated box-A frequency is exactly 1 over accepted trials", [=]() {
        Scenario<Scalar> scenario{space, pre, eigendecompose(box_a), post};
        const auto stats = run_projective(scenario, trials, RngPolicy{seed});
        return detail::check<Scalar>(Cx(stats.freq(format_eigenvalue(Scalar(1))), 0), Cx(1, 0),
                                     Scalar(0));
      }});
  example.claims.push_back(Claim<Scalar>{
      "no accepted trial ever misses box A", [=]() {
        Scenario<Scalar> scenario{space, pre, eigendecompose(box_a), post};
        const auto stats = run_projective(scenario, trials, RngPolicy{seed});
        return detail::check<Scalar>(
            Cx(static_cast<Scalar>(stats.count(format_eigenvalue(Scalar(0)))), 0), Cx(0, 0),
            Scalar(0));
      }});

  auto pointer_claim = [=](std::string label, Operator<Scalar> observable, Scalar expected) {
    return Claim<Scalar>{std::move(label), [=]() {
                           const Coupling<Scalar> weak_coupling(Scalar(0.1), Scalar(10));
                           const auto wave = evolve_pointer(pre, eigendecompose(observable),
                                                            weak_coupling, {post});
                           return detail::check<Scalar>(Cx(stats(wave).mean_q, 0),
                                                        Cx(expected, 0), Scalar(0.01));
                         }};
  };
  example.claims.push_back(pointer_claim(
      "weak pointer reading on box C sits near -0.1 at coupling 0.1", box_c, Scalar(-0.1)));
  example.claims.push_back(pointer_claim(
      "weak pointer reading on box A sits near +0.1 at coupling 0.1", box_a, Scalar(0.1)));
  return example;
}

// Total-spin measurement by a device that cycles the triplet z component.
// Forward selection sees outcome "1" half of the time; the time-reversed
// selection never sees it; the closed-form rule gives 0 for both, so the
// device chain disagrees with it by construction.
template <class Scalar>
NamedExample<Scalar> shimony_pair(std::uint64_t trials = 100000, std::uint64_t seed = 42) {
  using Cx = Complex<Scalar>;
  const UnitaryDevice<Scalar> device = shimony_unitary<Scalar>();
  const HilbertSpace space = device.system_space();
  const Scalar r = Scalar(1) / std::sqrt(Scalar(2));

  VectorX<Scalar> fwd_pre = VectorX<Scalar>::Zero(4), fwd_post = VectorX<Scalar>::Zero(4);
  fwd_pre[0] = Cx(r, 0);   // |0,0>
  fwd_pre[2] = Cx(r, 0);   // |1,0>
  fwd_post[0] = Cx(r, 0);  // <0,0|
  fwd_post[3] = Cx(r, 0);  // <1,1|
  const Ket<Scalar> forward_pre(space, fwd_pre);
  const Bra<Scalar> forward_post(space, fwd_post);

  VectorX<Scalar> rev_pre = VectorX<Scalar>::Zero(4), rev_post = VectorX<Scalar>::Zero(4);
  rev_pre[0] = Cx(r, 0);
  rev_pre[3] = Cx(r, 0);
  rev_post[0] = Cx(r, 0);
  rev_post[2] = Cx(r, 0);
  const Ket<Scalar> reversed_pre(space, rev_pre);
  const Bra<Scalar> reversed_post(space, rev_post);

  // Total spin in the coupled basis: singlet eigenvalue 0, triplet eigenvalue 2.
  MatrixX<Scalar> singlet = MatrixX<Scalar>::Zero(4, 4);
  singlet(0, 0) = Cx(1, 0);
  MatrixX<Scalar> triplet = MatrixX<Scalar>::Identity(4, 4);
  triplet(0, 0) = Cx(0, 0);
  const SpectralDecomposition<Scalar> total_spin(
      space, {Scalar(0), Scalar(2)},
      {Operator<Scalar>(space, singlet), Operator<Scalar>(space, triplet)});

  NamedExample<Scalar> example;
  example.name = "shimony-pair";
  example.summary =
      "triplet-cycling total-spin device: forward outcome-1 rate 1/2, reversed rate 0, "
      "closed-form rule 0 for both";

  example.claims.push_back(Claim<Scalar>{
      "forward device outcome-1 frequency is 1/2", [=]() {
        Scenario<Scalar> s{space, forward_pre, device, forward_post};
        const auto stats = run_device(s, trials, RngPolicy{seed});
        const Scalar bound =
            Scalar(4) * std::sqrt(Scalar(0.25) / Scalar(static_cast<double>(stats.selected)));
        return detail::check<Scalar>(Cx(stats.freq("1"), 0), Cx(0.5, 0), bound);
      }});
  example.claims.push_back(Claim<Scalar>{
      "forward selection keeps half the trials", [=]() {
        Scenario<Scalar> s{space, forward_pre, device, forward_post};
        const auto stats = run_device(s, trials, RngPolicy{seed});
        return detail::check<Scalar>(Cx(stats.selection_rate, 0), Cx(0.5, 0), Scalar(0.02));
      }});
  example.claims.push_back(Claim<Scalar>{
      "reversed device never accepts outcome 1", [=]() {
        Scenario<Scalar> s{space, reversed_pre, device, reversed_post};
        const auto stats = run_device(s, trials, RngPolicy{seed});
        return detail::check<Scalar>(Cx(static_cast<Scalar>(stats.count("1")), 0), Cx(0, 0),
                                     Scalar(0));
      }});
  example.claims.push_back(Claim<Scalar>{
      "reversed selection still keeps a quarter of the trials", [=]() {
        Scenario<Scalar> s{space, reversed_pre, device, reversed_post};
        const auto stats = run_device(s, trials, RngPolicy{seed});
        return detail::check<Scalar>(Cx(stats.selection_rate, 0), Cx(0.25, 0), Scalar(0.02));
      }});
  example.claims.push_back(Claim<Scalar>{
      "closed-form rule assigns probability 0 to spin 1, forward", [=]() {
        const auto dist =
            abl_probability(TwoStateVector<Scalar>(forward_post, forward_pre), total_spin);
        return detail::check<Scalar>(Cx(detail::probability_at(dist, Scalar(2)), 0), Cx(0, 0),
                                     Scalar(1e-14));
      }});
  example.claims.push_back(Claim<Scalar>{
      "closed-form rule assigns probability 0 to spin 1, reversed", [=]() {
        const auto dist =
            abl_probability(TwoStateVector<Scalar>(reversed_post, reversed_pre), total_spin);
        return detail::check<Scalar>(Cx(detail::probability_at(dist, Scalar(2)), 0), Cx(0, 0),
                                     Scalar(1e-14));
      }});
  example.claims.push_back(Claim<Scalar>{
      "device frequency exceeds the closed-form value by 1/2, forward", [=]() {
        Scenario<Scalar> s{space, forward_pre, device, forward_post};
        const auto stats = run_device(s, trials, RngPolicy{seed});
        const auto dist =
            abl_probability(TwoStateVector<Scalar>(forward_post, forward_pre), total_spin);
        const Scalar gap = stats.freq("1") - detail::probability_at(dist, Scalar(2));
        return detail::check<Scalar>(Cx(gap, 0), Cx(0.5, 0), Scalar(0.02));
      }});
  return example;
}

// Spin-1/2 selected along z then x: real weak values for sigma_z and sigma_x,
// a purely imaginary one for sigma_y, and an even split for an ideal sigma_y
// measurement.
template <class Scalar>
NamedExample<Scalar> spin_xy(std::uint64_t trials = 100000, std::uint64_t seed = 42) {
  using Cx = Complex<Scalar>;
  const HilbertSpace space(2, {"+z", "-z"});
  const Scalar r = Scalar(1) / std::sqrt(Scalar(2));
  VectorX<Scalar> pre_amps(2), post_comps(2);
  pre_amps << Cx(1, 0), Cx(0, 0);
  post_comps << Cx(r, 0), Cx(r, 0);
  const Ket<Scalar> pre(space, pre_amps);
  const Bra<Scalar> post(space, post_comps);
  const TwoStateVector<Scalar> tsv(post, pre);

  NamedExample<Scalar> example;
  example.name = "spin-xy";
  example.summary = "spin-1/2 pre-selected along +z, post-selected along +x";

  auto weak_claim = [=](std::string label, Operator<Scalar> observable, Cx expected) {
    return Claim<Scalar>{std::move(label), [=]() {
                           return detail::check<Scalar>(weak_value(tsv, observable).value,
                                                        expected, Scalar(1e-12));
                         }};
  };
  example.claims.push_back(weak_claim("weak value of sigma_z", pauli_z<Scalar>(space), Cx(1, 0)));
  example.claims.push_back(weak_claim("weak value of sigma_x", pauli_x<Scalar>(space), Cx(1, 0)));
  example.claims.push_back(weak_claim("weak value of sigma_y", pauli_y<Scalar>(space), Cx(0, 1)));

  example.claims.push_back(Claim<Scalar>{
      "ideal sigma_y measurement splits evenly", [=]() {
        const auto dist = abl_probability(tsv, eigendecompose(pauli_y<Scalar>(space)));
        return detail::check<Scalar>(Cx(detail::probability_at(dist, Scalar(1)), 0), Cx(0.5, 0),
                                     Scalar(1e-12));
      }});
  example.claims.push_back(Claim<Scalar>{
      "simulated sigma_y frequency matches the even split", [=]() {
        Scenario<Scalar> s{space, pre, eigendecompose(pauli_y<Scalar>(space)), post};
        const auto stats = run_projective(s, trials, RngPolicy{seed});
        const Scalar bound =
            Scalar(4) * std::sqrt(Scalar(0.25) / Scalar(static_cast<double>(stats.selected)));
        return detail::check<Scalar>(Cx(stats.freq(format_eigenvalue(Scalar(1))), 0),
                                     Cx(0.5, 0), bound);
      }});
  example.claims.push_back(Claim<Scalar>{
      "pointer momentum shift is positive for weak-value i", [=]() {
        const Coupling<Scalar> weak_coupling(Scalar(0.05), Scalar(40));
        const auto wave =
            evolve_pointer(pre, eigendecompose(pauli_y<Scalar>(space)), weak_coupling, {post});
        const Scalar shift = stats(wave).mean_p;
        return detail::check<Scalar>(Cx(shift > Scalar(0) ? Scalar(1) : Scalar(-1), 0),
                                     Cx(1, 0), Scalar(0.5));
      }});
  return example;
}

template <class Scalar>
std::vector<NamedExample<Scalar>> all_examples(std::uint64_t trials = 100000,
                                               std::uint64_t seed = 42) {
  return {three_box<Scalar>(trials, seed), shimony_pair<Scalar>(trials, seed),
          spin_xy<Scalar>(trials, seed)};
}

}  // namespace tsvf
