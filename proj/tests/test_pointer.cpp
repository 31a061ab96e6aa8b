#include <doctest.h>

#include <cmath>
#include <complex>

#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "tsvf/pointer.hpp"
#include "tsvf/weak.hpp"

using namespace tsvf;
using Cx = std::complex<double>;

namespace {

struct ThreeBox {
  HilbertSpace space{3, {"A", "B", "C"}};
  Ket<double> pre;
  Bra<double> post;

  ThreeBox() : pre(make_pre(space)), post(make_post(space)) {}
  static Ket<double> make_pre(const HilbertSpace& s) {
    const double r = 1.0 / std::sqrt(3.0);
    VectorX<double> v(3);
    v << Cx(r, 0), Cx(r, 0), Cx(r, 0);
    return Ket<double>(s, v);
  }
  static Bra<double> make_post(const HilbertSpace& s) {
    const double r = 1.0 / std::sqrt(3.0);
    VectorX<double> v(3);
    v << Cx(r, 0), Cx(r, 0), Cx(-r, 0);
    return Bra<double>(s, v);
  }
  SpectralDecomposition<double> box(int index) const {
    return eigendecompose(projector_onto<double>({Ket<double>::basis_state(space, index)}));
  }
};

TwoStateVector<double> spin_xz() {
  HilbertSpace space(2);
  const double r = 1.0 / std::sqrt(2.0);
  VectorX<double> pre(2), post(2);
  pre << Cx(1, 0), Cx(0, 0);
  post << Cx(r, 0), Cx(r, 0);
  return TwoStateVector<double>(Bra<double>(space, post), Ket<double>(space, pre));
}

double spread_of(const SpectralDecomposition<double>& c) {
  return c.eigenvalues().back() - c.eigenvalues().front();
}

}  // namespace

TEST_CASE("eigenstate input leaves a single shifted component") {
  HilbertSpace space(2);
  const auto up = Ket<double>::basis_state(space, 0);
  const double r = 1.0 / std::sqrt(2.0);
  VectorX<double> post(2);
  post << Cx(r, 0), Cx(r, 0);
  const Coupling<double> k(0.7, 0.3);
  const auto wave =
      evolve_pointer(up, eigendecompose(pauli_z<double>(space)), k, {Bra<double>(space, post)});
  CHECK(wave.normalization() == doctest::Approx(0.5));  // |<Phi|Psi>|^2
  // the eigenvalue -1 branch carries no amplitude
  CHECK(std::abs(wave.components()[0].amplitude) < 1e-15);
  CHECK(std::abs(wave.components()[1].amplitude) == doctest::Approx(1.0));
  const auto s = stats(wave);
  CHECK(s.mean_q == doctest::Approx(0.7));
  CHECK(s.var_q == doctest::Approx(0.09));
  CHECK(s.mean_p == doctest::Approx(0.0));
}

TEST_CASE("three-box box-C pointer amplitudes before normalization") {
  ThreeBox tb;
  const Coupling<double> k(1.0, 0.5);
  const auto wave = evolve_pointer(tb.pre, tb.box(2), k, {tb.post});
  const double scale = std::sqrt(wave.normalization());
  // raw amplitudes <Phi|(I-P_C)|Psi> = 2/3 at center 0 and <Phi|P_C|Psi> = -1/3 at center 1
  CHECK(wave.components()[0].center == doctest::Approx(0.0));
  CHECK(std::abs(wave.components()[0].amplitude * scale - Cx(2.0 / 3.0, 0)) < 1e-12);
  CHECK(wave.components()[1].center == doctest::Approx(1.0));
  CHECK(std::abs(wave.components()[1].amplitude * scale - Cx(-1.0 / 3.0, 0)) < 1e-12);
}

TEST_CASE("no post-selection gives the Born mixture") {
  HilbertSpace space(2);
  const auto up = Ket<double>::basis_state(space, 0);
  const Coupling<double> k(2.0, 0.4);
  const auto wave = evolve_pointer(up, eigendecompose(pauli_x<double>(space)), k, {});
  CHECK(wave.incoherent());
  CHECK(wave.normalization() == 1.0);
  CHECK(std::norm(wave.components()[0].amplitude) == doctest::Approx(0.5));
  CHECK(std::norm(wave.components()[1].amplitude) == doctest::Approx(0.5));
  const auto s = stats(wave);
  CHECK(s.mean_q == doctest::Approx(0.0));
  CHECK(s.var_q == doctest::Approx(0.16 + 4.0));  // width^2 + lambda^2
  CHECK(s.mean_p == 0.0);
}

TEST_CASE("orthogonal selections leave no pointer state") {
  HilbertSpace space(2);
  const auto up = Ket<double>::basis_state(space, 0);
  const auto down = Ket<double>::basis_state(space, 1);
  const Coupling<double> k(1e-9, 1.0);
  CHECK_THROWS_AS(
      evolve_pointer(up, eigendecompose(pauli_z<double>(space)), k, {dagger(down)}),
      NullSelection);
}

TEST_CASE("coupling parameters must be positive and finite") {
  CHECK_THROWS_AS(Coupling<double>(0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(Coupling<double>(1.0, -2.0), ValidationError);
}

TEST_CASE("weak three-box pointer mean tracks the weak value and the grid oracle") {
  ThreeBox tb;
  const Coupling<double> k(0.1, 10.0);
  const auto wave = evolve_pointer(tb.pre, tb.box(2), k, {tb.post});
  const auto s = stats(wave);
  CHECK(std::abs(s.mean_q - (-0.1)) < 0.01);  // within 10% of strength * (P_C)_w

  const auto grid = oracle::grid_pointer_moments(wave, -80.0, 80.0, 0.2);
  CHECK(std::abs(grid.norm - 1.0) < 1e-9);
  CHECK(std::abs(s.mean_q - grid.mean_q) < 1e-8);
  CHECK(std::abs(s.var_q - grid.var_q) < 1e-6);
  CHECK(std::abs(s.mean_p - grid.mean_p) < 1e-8);
}

TEST_CASE("grid oracle confirms the momentum shift for complex weak values") {
  const auto t = spin_xz();
  const auto c = eigendecompose(pauli_y<double>(t.space()));
  const Coupling<double> k(0.25, 3.0);
  const auto wave = evolve_pointer(t.ket(), c, k, {t.bra()});
  const auto s = stats(wave);
  const auto grid = oracle::grid_pointer_moments(wave, -40.0, 40.0, 0.01);
  CHECK(std::abs(s.mean_q - grid.mean_q) < 1e-7);
  CHECK(std::abs(s.mean_p - grid.mean_p) < 1e-7);
  CHECK(s.mean_p > 0);  // Im(C_w) = 1
}

TEST_CASE("strong readout reproduces the certainty of the three-box example") {
  ThreeBox tb;
  const Coupling<double> k(1.0, 0.02);
  const auto wave = evolve_pointer(tb.pre, tb.box(0), k, {tb.post});
  const auto dist = strong_readout(wave, tb.box(0), k);
  CHECK(std::abs(dist.probability(1) - 1.0) < 1e-6);
}

TEST_CASE("strong readout recovers Born statistics without post-selection") {
  HilbertSpace space(2);
  const auto up = Ket<double>::basis_state(space, 0);
  const auto c = eigendecompose(pauli_x<double>(space));
  const Coupling<double> k(1.0, 0.05);
  const auto dist = strong_readout(evolve_pointer(up, c, k, {}), c, k);
  CHECK(std::abs(dist.probability(0) - 0.5) < 1e-6);
  CHECK(std::abs(dist.probability(1) - 0.5) < 1e-6);
}

TEST_CASE("strong readout of an eigenstate is a point mass") {
  HilbertSpace space(2);
  const auto up = Ket<double>::basis_state(space, 0);
  const auto c = eigendecompose(pauli_z<double>(space));
  const Coupling<double> k(1.0, 0.01);
  const auto dist = strong_readout(evolve_pointer(up, c, k, {}), c, k);
  CHECK(std::abs(dist.probability(1) - 1.0) < 1e-12);

  // a single-outcome observable needs no regime at all
  const auto id = eigendecompose(Operator<double>::identity(space));
  const Coupling<double> wide(1.0, 50.0);
  const auto trivial = strong_readout(evolve_pointer(up, id, wide, {}), id, wide);
  REQUIRE(trivial.size() == 1);
  CHECK(trivial.probability(0) == doctest::Approx(1.0));
}

TEST_CASE("strong readout rejects wide pointers") {
  HilbertSpace space(2);
  const auto up = Ket<double>::basis_state(space, 0);
  const auto c = eigendecompose(pauli_z<double>(space));  // gap 2
  const Coupling<double> k(1.0, 0.5);                     // limit is 0.2
  CHECK_THROWS_AS(strong_readout(evolve_pointer(up, c, k, {}), c, k), RegimeViolation);
}

TEST_CASE("strong readout agrees with the conditional rule on random selections") {
  auto rng = gen::engine(103);
  for (int dim : {2, 3, 4}) {
    HilbertSpace space(dim);
    for (int rep = 0; rep < 15; ++rep) {
      const auto t = gen::random_tsv(space, rng, 0.2);
      const auto c = eigendecompose(gen::random_hermitian(space, rng));
      if (c.size() < 2) continue;
      const Coupling<double> k(1.0, c.min_gap() / 20.0);
      const auto readout = strong_readout(evolve_pointer(t.ket(), c, k, {t.bra()}), c, k);
      const auto exact = abl_probability(t, c);
      for (int n = 0; n < exact.size(); ++n)
        CHECK(std::abs(readout.probability(n) - exact.probability(n)) < 1e-6);
    }
  }
}

TEST_CASE("weak readings converge to strength times Re(C_w)") {
  auto rng = gen::engine(107);
  HilbertSpace space(3);
  for (int rep = 0; rep < 15; ++rep) {
    const auto t = gen::random_tsv(space, rng, 0.3);
    const auto c = eigendecompose(gen::random_hermitian(space, rng));
    const double spread = spread_of(c);
    if (spread < 1e-3) continue;
    const double target = weak_value(t, c.reconstruct()).value.real();

    auto error_at = [&](double width_factor) {
      const Coupling<double> k(1.0, width_factor * spread);
      const auto s = stats(evolve_pointer(t.ket(), c, k, {t.bra()}));
      return std::abs(s.mean_q - target);
    };
    const double err_wide = error_at(20.0);
    const double err_narrow = error_at(2.0);
    CHECK(err_wide <= 0.05 * spread);
    CHECK(err_wide < err_narrow);
  }
}

TEST_CASE("without post-selection the weak reading is the expectation value exactly") {
  auto rng = gen::engine(109);
  HilbertSpace space(4);
  for (int rep = 0; rep < 15; ++rep) {
    const auto psi = gen::random_ket(space, rng);
    const auto c = eigendecompose(gen::random_hermitian(space, rng));
    const double lambda = 0.37;
    for (double width : {0.1, 5.0, 80.0}) {
      const auto s = stats(evolve_pointer(psi, c, Coupling<double>(lambda, width), {}));
      const Cx expectation =
          psi.amplitudes().dot(c.reconstruct().matrix() * psi.amplitudes());
      CHECK(std::abs(s.mean_q - lambda * expectation.real()) < 1e-12);
    }
  }
}

TEST_CASE("momentum shift vanishes for real amplitudes and follows Im(C_w) otherwise") {
  auto rng = gen::engine(113);
  HilbertSpace space(3);
  for (int rep = 0; rep < 15; ++rep) {
    const auto t = gen::random_real_tsv(space, rng, 0.2);
    const auto c = eigendecompose(gen::random_hermitian(space, rng));
    // real selections with a real-spectrum coupling: components stay real
    const auto real_c = eigendecompose(
        Operator<double>(space, (c.reconstruct().matrix().real()).template cast<Cx>()));
    const auto s = stats(evolve_pointer(t.ket(), real_c, Coupling<double>(0.5, 4.0), {t.bra()}));
    CHECK(std::abs(s.mean_p) < 1e-12);
  }

  // sign follows Im(C_w), both orientations
  const auto t = spin_xz();
  const auto c = eigendecompose(pauli_y<double>(t.space()));
  const Coupling<double> k(0.05, 40.0);
  CHECK(stats(evolve_pointer(t.ket(), c, k, {t.bra()})).mean_p > 0);   // (sigma_y)_w = i
  const auto r = reverse(t);
  CHECK(stats(evolve_pointer(r.ket(), c, k, {r.bra()})).mean_p < 0);  // conjugated
}

TEST_CASE("weak-regime momentum shift matches 2 strength var_p Im(C_w)") {
  const auto t = spin_xz();
  const auto c = eigendecompose(pauli_y<double>(t.space()));
  const double lambda = 0.01;
  const double width = 40.0;
  const auto s = stats(evolve_pointer(t.ket(), c, Coupling<double>(lambda, width), {t.bra()}));
  const double var_p = 1.0 / (4.0 * width * width);
  const double predicted = 2.0 * lambda * var_p * 1.0;  // Im((sigma_y)_w) = 1
  CHECK(std::abs(s.mean_p - predicted) < 0.05 * predicted);
}

TEST_CASE("survival approaches the selection probability as the coupling vanishes") {
  auto rng = gen::engine(127);
  HilbertSpace space(3);
  for (int rep = 0; rep < 15; ++rep) {
    const auto t = gen::random_tsv(space, rng, 0.1);
    const auto c = eigendecompose(gen::random_hermitian(space, rng));
    const auto wave = evolve_pointer(t.ket(), c, Coupling<double>(1e-6, 1.0), {t.bra()});
    const double overlap2 = std::norm(inner(t.bra(), t.ket()));
    CHECK(std::abs(wave.normalization() - overlap2) < 1e-8);
    CHECK(wave.normalization() <= 1.0);
  }
}
