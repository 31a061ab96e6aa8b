#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "tsvf/abl.hpp"
#include "tsvf/hilbert.hpp"
#include "tsvf/tsv.hpp"

// Explicit von Neumann measurement model. The interaction H = g(t) p C shifts
// a Gaussian pointer by strength * c_n on each eigenspace branch, so the
// pointer state after the coupling is a superposition (post-selected) or
// mixture (unselected) of displaced Gaussians. Keeping that component list in
// closed form gives exact moments through Gaussian overlap integrals; grids
// appear only as test-side cross-checks.

namespace tsvf {

// strength is the time integral of the coupling g(t) (hbar = 1); pointer_width
// is the initial position spread of the Gaussian pointer. Small width reads
// out sharply (strong regime), large width disturbs weakly (weak regime).
template <class Scalar>
struct Coupling {
  Scalar strength;
  Scalar pointer_width;

  Coupling(Scalar strength_, Scalar pointer_width_)
      : strength(strength_), pointer_width(pointer_width_) {
    if (!(std::isfinite(strength) && strength > Scalar(0)))
      throw ValidationError("coupling strength must be finite and positive");
    if (!(std::isfinite(pointer_width) && pointer_width > Scalar(0)))
      throw ValidationError("pointer width must be finite and positive");
  }
};

template <class Scalar>
struct PointerStats {
  Scalar mean_q;
  Scalar var_q;
  Scalar mean_p;
  Scalar survival;
};

// Superposition (or incoherent mixture) of equal-width Gaussian components
// G(q - center), G(q) = (2 pi w^2)^(-1/4) exp(-q^2 / (4 w^2)); |G|^2 has
// standard deviation w. Stored unit-normalized; `normalization` remembers the
// squared norm before rescaling, i.e. the post-selection survival probability.
template <class Scalar>
class PointerWavefunction {
 public:
  struct Component {
    Complex<Scalar> amplitude;
    Scalar center;
  };

  PointerWavefunction(std::vector<Component> components, Scalar width,
                      Scalar normalization, bool incoherent)
      : components_(std::move(components)),
        width_(width),
        normalization_(normalization),
        incoherent_(incoherent) {
    if (components_.empty())
      throw ValidationError("pointer wavefunction needs at least one component");
    if (!(width_ > Scalar(0))) throw ValidationError("pointer width must be positive");
    if (!(normalization_ >= Scalar(0) && normalization_ <= Scalar(1)))
      throw ValidationError("pointer normalization must lie in [0, 1]");
  }

  const std::vector<Component>& components() const { return components_; }
  Scalar width() const { return width_; }
  Scalar normalization() const { return normalization_; }
  bool incoherent() const { return incoherent_; }

 private:
  std::vector<Component> components_;
  Scalar width_;
  Scalar normalization_;
  bool incoherent_;
};

namespace detail {

// integral G(q-a) G(q-b) dq for the width-w Gaussian above.
template <class Scalar>
Scalar gaussian_overlap(Scalar a, Scalar b, Scalar w) {
  const Scalar d = a - b;
  return std::exp(-d * d / (Scalar(8) * w * w));
}

// Standard normal CDF, stable at +/- infinity.
template <class Scalar>
Scalar normal_cdf(Scalar t) {
  return Scalar(0.5) * std::erfc(-t / std::sqrt(Scalar(2)));
}

}  // namespace detail

// Couples the pointer to the observable and, when a post-selection bra is
// given, projects the system out. Post-selected: coherent components
// <Phi|P_n|Psi> at centers strength * c_n with the squared norm of the raw
// component sum recorded as survival. Unselected: the reduced pointer state,
// an incoherent mixture with Born weights |P_n|Psi>|^2.
template <class Scalar>
PointerWavefunction<Scalar> evolve_pointer(const Ket<Scalar>& pre,
                                           const SpectralDecomposition<Scalar>& c,
                                           const Coupling<Scalar>& k,
                                           const std::optional<Bra<Scalar>>& post) {
  require_compatible(pre.space(), c.space(), "evolve_pointer");
  using Component = typename PointerWavefunction<Scalar>::Component;
  std::vector<Component> components;
  components.reserve(static_cast<std::size_t>(c.size()));

  if (post.has_value()) {
    require_compatible(pre.space(), post->space(), "evolve_pointer");
    for (int n = 0; n < c.size(); ++n)
      components.push_back(Component{sandwich(*post, c.projector(n), pre),
                                     k.strength * c.eigenvalue(n)});
    Complex<Scalar> norm2 = 0;
    for (const auto& a : components)
      for (const auto& b : components)
        norm2 += a.amplitude * std::conj(b.amplitude) *
                 detail::gaussian_overlap(a.center, b.center, k.pointer_width);
    Scalar survival = std::real(norm2);
    if (survival < Scalar(kNullEventTol))
      throw NullSelection("post-selected pointer state has vanishing norm");
    survival = std::min(survival, Scalar(1));
    const Scalar scale = Scalar(1) / std::sqrt(survival);
    for (auto& comp : components) comp.amplitude *= scale;
    return PointerWavefunction<Scalar>(std::move(components), k.pointer_width, survival,
                                       /*incoherent=*/false);
  }

  // No post-selection: tracing out the system leaves no cross terms.
  Scalar total = 0;
  std::vector<Scalar> weights(static_cast<std::size_t>(c.size()));
  for (int n = 0; n < c.size(); ++n) {
    weights[static_cast<std::size_t>(n)] =
        (c.projector(n).matrix() * pre.amplitudes()).squaredNorm();
    total += weights[static_cast<std::size_t>(n)];
  }
  for (int n = 0; n < c.size(); ++n)
    components.push_back(
        Component{Complex<Scalar>(std::sqrt(weights[static_cast<std::size_t>(n)] / total), 0),
                  k.strength * c.eigenvalue(n)});
  return PointerWavefunction<Scalar>(std::move(components), k.pointer_width, Scalar(1),
                                     /*incoherent=*/true);
}

// Closed-form pointer moments. Position moments come from the pairwise
// Gaussian products; the momentum mean comes from the analytic Fourier
// transform of the component sum, which for pair separation d contributes
// -i * var_p * d * overlap with var_p = 1/(4 width^2). In the weak-coupling
// limit this reduces to mean_p = 2 * strength * var_p * Im(C_w), so the
// momentum shift carries the imaginary part of the weak value while mean_q
// tracks strength * Re(C_w).
template <class Scalar>
PointerStats<Scalar> stats(const PointerWavefunction<Scalar>& w) {
  const Scalar width = w.width();
  Scalar mean_q = 0;
  Scalar mean_q2 = 0;
  Scalar mean_p = 0;

  if (w.incoherent()) {
    for (const auto& comp : w.components()) {
      const Scalar weight = std::norm(comp.amplitude);
      mean_q += weight * comp.center;
      mean_q2 += weight * (width * width + comp.center * comp.center);
    }
  } else {
    const Scalar var_p = Scalar(1) / (Scalar(4) * width * width);
    Complex<Scalar> total(0, 0), q1(0, 0), q2(0, 0), p1(0, 0);
    for (const auto& a : w.components()) {
      for (const auto& b : w.components()) {
        const Complex<Scalar> z = a.amplitude * std::conj(b.amplitude) *
                                  detail::gaussian_overlap(a.center, b.center, width);
        const Scalar mid = (a.center + b.center) / Scalar(2);
        total += z;
        q1 += z * mid;
        q2 += z * (width * width + mid * mid);
        p1 += z * Complex<Scalar>(0, -1) * var_p * (a.center - b.center);
      }
    }
    const Scalar norm = std::real(total);  // 1 up to arithmetic dust
    mean_q = std::real(q1) / norm;
    mean_q2 = std::real(q2) / norm;
    mean_p = std::real(p1) / norm;
  }

  return PointerStats<Scalar>{mean_q, mean_q2 - mean_q * mean_q, mean_p,
                              w.normalization()};
}

// Reads the pointer as an ideal outcome record: integrates |psi(q)|^2 over
// bins whose boundaries sit midway between adjacent shifted centers. Only
// meaningful when the Gaussians are well separated, so the strong regime
// width <= strength * min_gap / 10 is enforced.
template <class Scalar>
OutcomeDistribution<Scalar> strong_readout(const PointerWavefunction<Scalar>& w,
                                           const SpectralDecomposition<Scalar>& c,
                                           const Coupling<Scalar>& k) {
  const int outcomes = c.size();
  if (outcomes > 1) {
    const Scalar limit = k.strength * c.min_gap() / Scalar(10);
    if (w.width() > limit)
      throw RegimeViolation("pointer width " + std::to_string(static_cast<double>(w.width())) +
                            " exceeds the strong-regime limit " +
                            std::to_string(static_cast<double>(limit)));
  }

  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  std::vector<Scalar> probabilities(static_cast<std::size_t>(outcomes), Scalar(0));
  for (int n = 0; n < outcomes; ++n) {
    const Scalar center_n = k.strength * c.eigenvalue(n);
    const Scalar lo =
        (n == 0) ? -inf : (center_n + k.strength * c.eigenvalue(n - 1)) / Scalar(2);
    const Scalar hi = (n == outcomes - 1)
                          ? inf
                          : (center_n + k.strength * c.eigenvalue(n + 1)) / Scalar(2);

    Scalar mass = 0;
    if (w.incoherent()) {
      for (const auto& comp : w.components())
        mass += std::norm(comp.amplitude) *
                (detail::normal_cdf((hi - comp.center) / w.width()) -
                 detail::normal_cdf((lo - comp.center) / w.width()));
    } else {
      Complex<Scalar> acc(0, 0);
      for (const auto& a : w.components()) {
        for (const auto& b : w.components()) {
          const Scalar mid = (a.center + b.center) / Scalar(2);
          acc += a.amplitude * std::conj(b.amplitude) *
                 detail::gaussian_overlap(a.center, b.center, w.width()) *
                 (detail::normal_cdf((hi - mid) / w.width()) -
                  detail::normal_cdf((lo - mid) / w.width()));
        }
      }
      mass = std::real(acc);
    }
    probabilities[static_cast<std::size_t>(n)] = std::max(mass, Scalar(0));
  }

  Scalar total = 0;
  for (Scalar p : probabilities) total += p;
  for (Scalar& p : probabilities) p /= total;
  return OutcomeDistribution<Scalar>(c, std::move(probabilities));
}

}  // namespace tsvf
