#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "tsvf/hilbert.hpp"
#include "tsvf/tsv.hpp"

// Seeded random instances for property tests. Everything is deterministic in
// the seed so failures replay exactly.

namespace gen {

using tsvf::Bra;
using tsvf::Complex;
using tsvf::GeneralizedTSV;
using tsvf::GtsvTerm;
using tsvf::HilbertSpace;
using tsvf::Ket;
using tsvf::MatrixX;
using tsvf::Operator;
using tsvf::SpectralDecomposition;
using tsvf::TwoStateVector;
using tsvf::VectorX;

inline std::mt19937_64 engine(std::uint64_t seed) { return std::mt19937_64(seed); }

inline VectorX<double> random_vector(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorX<double> v(dim);
  for (int i = 0; i < dim; ++i) v[i] = Complex<double>(normal(rng), normal(rng));
  return v;
}

inline MatrixX<double> random_matrix(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixX<double> m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = Complex<double>(normal(rng), normal(rng));
  return m;
}

inline Ket<double> random_ket(const HilbertSpace& space, std::mt19937_64& rng) {
  return Ket<double>::normalized(space, random_vector(space.dimension(), rng));
}

inline Bra<double> random_bra(const HilbertSpace& space, std::mt19937_64& rng) {
  return Bra<double>::normalized(space, random_vector(space.dimension(), rng));
}

inline Operator<double> random_hermitian(const HilbertSpace& space, std::mt19937_64& rng) {
  const MatrixX<double> m = random_matrix(space.dimension(), rng);
  return Operator<double>(space, (m + m.adjoint()) / 2.0);
}

// TSV with |<Phi|Psi>| >= min_overlap, resampling the post state as needed.
inline TwoStateVector<double> random_tsv(const HilbertSpace& space, std::mt19937_64& rng,
                                         double min_overlap = 0.0) {
  const Ket<double> ket = random_ket(space, rng);
  for (;;) {
    const Bra<double> bra = random_bra(space, rng);
    TwoStateVector<double> t(bra, ket);
    if (std::abs(tsvf::inner(t.bra(), t.ket())) >= min_overlap) return t;
  }
}

// Real-amplitude TSV: its weak values are real, so pointer momentum shifts
// must vanish identically.
inline TwoStateVector<double> random_real_tsv(const HilbertSpace& space,
                                              std::mt19937_64& rng,
                                              double min_overlap = 0.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  auto real_vector = [&] {
    VectorX<double> v(space.dimension());
    for (int i = 0; i < space.dimension(); ++i) v[i] = Complex<double>(normal(rng), 0.0);
    return v;
  };
  const Ket<double> ket = Ket<double>::normalized(space, real_vector());
  for (;;) {
    const Bra<double> bra = Bra<double>::normalized(space, real_vector());
    TwoStateVector<double> t(bra, ket);
    if (std::abs(tsvf::inner(t.bra(), t.ket())) >= min_overlap) return t;
  }
}

// Generalized TSV whose Phi and Psi families are orthonormal (QR of random
// matrices) with unit-norm coefficient vector; resamples until the selection
// denominator proxy |sum_i a_i <Phi_i|Psi_i>| clears min_overlap.
inline GeneralizedTSV<double> random_generalized(const HilbertSpace& space, int n_terms,
                                                 std::mt19937_64& rng,
                                                 double min_overlap = 0.0) {
  const int dim = space.dimension();
  for (;;) {
    Eigen::HouseholderQR<MatrixX<double>> ket_qr(random_matrix(dim, rng));
    Eigen::HouseholderQR<MatrixX<double>> bra_qr(random_matrix(dim, rng));
    const MatrixX<double> ket_basis =
        ket_qr.householderQ() * MatrixX<double>::Identity(dim, n_terms);
    const MatrixX<double> bra_basis =
        bra_qr.householderQ() * MatrixX<double>::Identity(dim, n_terms);

    VectorX<double> coeffs = random_vector(n_terms, rng);
    coeffs /= coeffs.norm();

    std::vector<GtsvTerm<double>> terms;
    Complex<double> denominator = 0;
    for (int i = 0; i < n_terms; ++i) {
      Bra<double> bra(space, bra_basis.col(i).eval());
      Ket<double> ket(space, ket_basis.col(i).eval());
      denominator += coeffs[i] * tsvf::inner(bra, ket);
      terms.push_back(GtsvTerm<double>{coeffs[i], std::move(bra), std::move(ket)});
    }
    if (std::abs(denominator) < min_overlap) continue;
    return GeneralizedTSV<double>(std::move(terms));
  }
}

}  // namespace gen
