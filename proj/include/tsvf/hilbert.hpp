#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsvf/errors.hpp"

// Dense complex linear algebra over small finite-dimensional Hilbert spaces:
// normalized state vectors, operators, tensor products, and Hermitian
// eigendecomposition with degeneracy grouping. Everything is an immutable
// value; every function is pure.

namespace tsvf {

template <class Scalar>
using Complex = std::complex<Scalar>;
template <class Scalar>
using VectorX = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;
template <class Scalar>
using MatrixX = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

// Brute-force oracles stay cheap as long as dimensions stay desk-scale.
inline constexpr int kMaxDimension = 64;

// Constructors renormalize inputs whose norm deviates from 1 by at most this
// and reject anything further off as malformed.
inline constexpr double kNormSlack = 1e-6;

// Hermiticity / idempotency / orthogonality / completeness gate.
inline constexpr double kStructureTol = 1e-10;

class HilbertSpace {
 public:
  HilbertSpace() = default;

  explicit HilbertSpace(int dimension, std::vector<std::string> basis_labels = {})
      : dimension_(dimension), basis_labels_(std::move(basis_labels)) {
    if (dimension_ < 1)
      throw ValidationError("space dimension must be at least 1");
    if (dimension_ > kMaxDimension)
      throw ValidationError("space dimension " + std::to_string(dimension_) +
                            " exceeds the cap of " + std::to_string(kMaxDimension));
    if (!basis_labels_.empty()) {
      if (static_cast<int>(basis_labels_.size()) != dimension_)
        throw ValidationError("expected " + std::to_string(dimension_) +
                              " basis labels, got " + std::to_string(basis_labels_.size()));
      auto sorted = basis_labels_;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ValidationError("basis labels must be unique");
    }
  }

  int dimension() const { return dimension_; }
  bool labeled() const { return !basis_labels_.empty(); }
  const std::vector<std::string>& basis_labels() const { return basis_labels_; }

  std::optional<int> index_of(const std::string& label) const {
    for (int i = 0; i < static_cast<int>(basis_labels_.size()); ++i)
      if (basis_labels_[i] == label) return i;
    return std::nullopt;
  }

  // Label of basis vector i, falling back to its index.
  std::string label(int i) const {
    return labeled() ? basis_labels_[static_cast<std::size_t>(i)] : std::to_string(i);
  }

  friend bool operator==(const HilbertSpace& a, const HilbertSpace& b) {
    return a.dimension_ == b.dimension_ && a.basis_labels_ == b.basis_labels_;
  }

 private:
  int dimension_ = 0;
  std::vector<std::string> basis_labels_;
};

inline bool compatible(const HilbertSpace& a, const HilbertSpace& b) {
  return a.dimension() == b.dimension();
}

inline void require_compatible(const HilbertSpace& a, const HilbertSpace& b,
                               const char* where) {
  if (!compatible(a, b))
    throw DimensionMismatch(std::string(where) + ": dimensions " +
                            std::to_string(a.dimension()) + " and " +
                            std::to_string(b.dimension()) + " differ");
}

namespace detail {

template <class Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!m.allFinite())
    throw ValidationError(std::string(what) + " contains NaN or Inf");
}

}  // namespace detail

// Forward-evolving state |Psi>. Unit norm by construction.
template <class Scalar>
class Ket {
 public:
  Ket(HilbertSpace space, VectorX<Scalar> amplitudes)
      : space_(std::move(space)), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != space_.dimension())
      throw DimensionMismatch("ket has " + std::to_string(amplitudes_.size()) +
                              " amplitudes for a dimension-" +
                              std::to_string(space_.dimension()) + " space");
    detail::require_finite(amplitudes_, "ket");
    const Scalar n = amplitudes_.norm();
    if (std::abs(n - Scalar(1)) > Scalar(kNormSlack))
      throw ValidationError("ket norm " + std::to_string(static_cast<double>(n)) +
                            " deviates from 1 by more than " + std::to_string(kNormSlack));
    // Already-unit vectors pass through untouched so that conjugation round
    // trips stay bit-exact.
    if (std::abs(n - Scalar(1)) > Scalar(1e-12)) amplitudes_ /= n;
  }

  // Rescales an arbitrary nonnull vector to a unit ket.
  static Ket normalized(HilbertSpace space, VectorX<Scalar> amplitudes) {
    detail::require_finite(amplitudes, "ket");
    const Scalar n = amplitudes.norm();
    if (!(n > Scalar(1e-12)))
      throw ValidationError("cannot normalize a near-null vector (norm " +
                            std::to_string(static_cast<double>(n)) + ")");
    return Ket(std::move(space), amplitudes / n);
  }

  static Ket basis_state(const HilbertSpace& space, int index) {
    if (index < 0 || index >= space.dimension())
      throw ValidationError("basis index " + std::to_string(index) + " out of range");
    VectorX<Scalar> v = VectorX<Scalar>::Zero(space.dimension());
    v[index] = Complex<Scalar>(1, 0);
    return Ket(space, std::move(v));
  }

  const HilbertSpace& space() const { return space_; }
  const VectorX<Scalar>& amplitudes() const { return amplitudes_; }

 private:
  HilbertSpace space_;
  VectorX<Scalar> amplitudes_;
};

// Backward-evolving state <Phi|, stored through its dual components: the
// stored vector c satisfies <Phi|Psi> = sum_i c_i psi_i, i.e. c = conj(Phi).
template <class Scalar>
class Bra {
 public:
  Bra(HilbertSpace space, VectorX<Scalar> components)
      : space_(std::move(space)), components_(std::move(components)) {
    if (components_.size() != space_.dimension())
      throw DimensionMismatch("bra has " + std::to_string(components_.size()) +
                              " components for a dimension-" +
                              std::to_string(space_.dimension()) + " space");
    detail::require_finite(components_, "bra");
    const Scalar n = components_.norm();
    if (std::abs(n - Scalar(1)) > Scalar(kNormSlack))
      throw ValidationError("bra norm " + std::to_string(static_cast<double>(n)) +
                            " deviates from 1 by more than " + std::to_string(kNormSlack));
    if (std::abs(n - Scalar(1)) > Scalar(1e-12)) components_ /= n;
  }

  static Bra normalized(HilbertSpace space, VectorX<Scalar> components) {
    detail::require_finite(components, "bra");
    const Scalar n = components.norm();
    if (!(n > Scalar(1e-12)))
      throw ValidationError("cannot normalize a near-null dual vector (norm " +
                            std::to_string(static_cast<double>(n)) + ")");
    return Bra(std::move(space), components / n);
  }

  const HilbertSpace& space() const { return space_; }
  const VectorX<Scalar>& components() const { return components_; }

 private:
  HilbertSpace space_;
  VectorX<Scalar> components_;
};

template <class Scalar>
Bra<Scalar> dagger(const Ket<Scalar>& k) {
  return Bra<Scalar>(k.space(), k.amplitudes().conjugate());
}

template <class Scalar>
Ket<Scalar> dagger(const Bra<Scalar>& b) {
  return Ket<Scalar>(b.space(), b.components().conjugate());
}

// A linear operator on a space. No intrinsic structure is assumed;
// Hermiticity, unitarity and idempotency are checked where an operation
// requires them.
template <class Scalar>
class Operator {
 public:
  Operator(HilbertSpace space, MatrixX<Scalar> matrix)
      : space_(std::move(space)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != space_.dimension() || matrix_.cols() != space_.dimension())
      throw DimensionMismatch("operator is " + std::to_string(matrix_.rows()) + "x" +
                              std::to_string(matrix_.cols()) + " on a dimension-" +
                              std::to_string(space_.dimension()) + " space");
    detail::require_finite(matrix_, "operator");
  }

  static Operator identity(const HilbertSpace& space) {
    return Operator(space, MatrixX<Scalar>::Identity(space.dimension(), space.dimension()));
  }

  const HilbertSpace& space() const { return space_; }
  const MatrixX<Scalar>& matrix() const { return matrix_; }

 private:
  HilbertSpace space_;
  MatrixX<Scalar> matrix_;
};

template <class Scalar>
Operator<Scalar> dagger(const Operator<Scalar>& op) {
  return Operator<Scalar>(op.space(), op.matrix().adjoint());
}

template <class Scalar>
Operator<Scalar> operator+(const Operator<Scalar>& a, const Operator<Scalar>& b) {
  require_compatible(a.space(), b.space(), "operator sum");
  return Operator<Scalar>(a.space(), a.matrix() + b.matrix());
}

template <class Scalar>
Operator<Scalar> operator-(const Operator<Scalar>& a, const Operator<Scalar>& b) {
  require_compatible(a.space(), b.space(), "operator difference");
  return Operator<Scalar>(a.space(), a.matrix() - b.matrix());
}

template <class Scalar>
Operator<Scalar> operator*(const Operator<Scalar>& a, const Operator<Scalar>& b) {
  require_compatible(a.space(), b.space(), "operator product");
  return Operator<Scalar>(a.space(), a.matrix() * b.matrix());
}

template <class Scalar>
Operator<Scalar> operator*(Complex<Scalar> c, const Operator<Scalar>& a) {
  return Operator<Scalar>(a.space(), c * a.matrix());
}

template <class Scalar>
Operator<Scalar> operator*(Scalar c, const Operator<Scalar>& a) {
  return Complex<Scalar>(c, 0) * a;
}

// max(1, largest |entry|): scale factor for relative structure tolerances.
template <class Scalar>
Scalar operator_scale(const Operator<Scalar>& op) {
  return std::max(Scalar(1), op.matrix().cwiseAbs().maxCoeff());
}

template <class Scalar>
bool is_hermitian(const Operator<Scalar>& op, Scalar tol = Scalar(kStructureTol)) {
  const Scalar gap = (op.matrix() - op.matrix().adjoint()).cwiseAbs().maxCoeff();
  return gap <= tol * operator_scale(op);
}

template <class Scalar>
bool is_projector(const Operator<Scalar>& op, Scalar tol = Scalar(kStructureTol)) {
  if ((op.matrix() - op.matrix().adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  return (op.matrix() * op.matrix() - op.matrix()).cwiseAbs().maxCoeff() <= tol;
}

template <class Scalar>
bool is_unitary(const Operator<Scalar>& op, Scalar tol = Scalar(kStructureTol)) {
  const auto& m = op.matrix();
  MatrixX<Scalar> gram = m.adjoint() * m;
  return (gram - MatrixX<Scalar>::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

// <Phi|Psi>
template <class Scalar>
Complex<Scalar> inner(const Bra<Scalar>& bra, const Ket<Scalar>& ket) {
  require_compatible(bra.space(), ket.space(), "inner");
  return bra.components().cwiseProduct(ket.amplitudes()).sum();
}

// <Phi|C|Psi>
template <class Scalar>
Complex<Scalar> sandwich(const Bra<Scalar>& bra, const Operator<Scalar>& op,
                         const Ket<Scalar>& ket) {
  require_compatible(bra.space(), op.space(), "sandwich");
  require_compatible(op.space(), ket.space(), "sandwich");
  const VectorX<Scalar> applied = op.matrix() * ket.amplitudes();
  return bra.components().cwiseProduct(applied).sum();
}

namespace detail {

template <class Scalar>
MatrixX<Scalar> kron(const MatrixX<Scalar>& a, const MatrixX<Scalar>& b) {
  MatrixX<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

template <class Scalar>
VectorX<Scalar> kron(const VectorX<Scalar>& a, const VectorX<Scalar>& b) {
  VectorX<Scalar> out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

}  // namespace detail

// Composite space; labels concatenate componentwise when both factors carry them.
inline HilbertSpace tensor(const HilbertSpace& a, const HilbertSpace& b) {
  std::vector<std::string> labels;
  if (a.labeled() && b.labeled()) {
    labels.reserve(static_cast<std::size_t>(a.dimension()) * b.dimension());
    for (const auto& la : a.basis_labels())
      for (const auto& lb : b.basis_labels()) labels.push_back(la + "⊗" + lb);
  }
  return HilbertSpace(a.dimension() * b.dimension(), std::move(labels));
}

template <class Scalar>
Ket<Scalar> tensor(const Ket<Scalar>& a, const Ket<Scalar>& b) {
  return Ket<Scalar>(tensor(a.space(), b.space()),
                     detail::kron(a.amplitudes(), b.amplitudes()));
}

template <class Scalar>
Bra<Scalar> tensor(const Bra<Scalar>& a, const Bra<Scalar>& b) {
  return Bra<Scalar>(tensor(a.space(), b.space()),
                     detail::kron(a.components(), b.components()));
}

template <class Scalar>
Operator<Scalar> tensor(const Operator<Scalar>& a, const Operator<Scalar>& b) {
  return Operator<Scalar>(tensor(a.space(), b.space()),
                          detail::kron(a.matrix(), b.matrix()));
}

// Hermitian observable resolved into strictly increasing eigenvalues and the
// orthogonal projectors onto their (possibly degenerate) eigenspaces.
template <class Scalar>
class SpectralDecomposition {
 public:
  SpectralDecomposition(HilbertSpace space, std::vector<Scalar> eigenvalues,
                        std::vector<Operator<Scalar>> projectors)
      : space_(std::move(space)),
        eigenvalues_(std::move(eigenvalues)),
        projectors_(std::move(projectors)) {
    if (eigenvalues_.empty() || eigenvalues_.size() != projectors_.size())
      throw ValidationError("spectral decomposition needs one projector per eigenvalue");
    for (std::size_t i = 1; i < eigenvalues_.size(); ++i)
      if (!(eigenvalues_[i] > eigenvalues_[i - 1]))
        throw ValidationError("eigenvalues must be strictly increasing");
    const int d = space_.dimension();
    MatrixX<Scalar> sum = MatrixX<Scalar>::Zero(d, d);
    for (const auto& p : projectors_) {
      require_compatible(space_, p.space(), "spectral decomposition");
      if (!is_projector(p)) throw NotAProjector("spectral projector fails the projector gate");
      sum += p.matrix();
    }
    if ((sum - MatrixX<Scalar>::Identity(d, d)).cwiseAbs().maxCoeff() > Scalar(kStructureTol))
      throw ValidationError("spectral projectors do not resolve the identity");
    for (std::size_t i = 0; i < projectors_.size(); ++i)
      for (std::size_t j = i + 1; j < projectors_.size(); ++j)
        if ((projectors_[i].matrix() * projectors_[j].matrix()).cwiseAbs().maxCoeff() >
            Scalar(kStructureTol))
          throw ValidationError("spectral projectors are not mutually orthogonal");
  }

  const HilbertSpace& space() const { return space_; }
  int size() const { return static_cast<int>(eigenvalues_.size()); }
  Scalar eigenvalue(int n) const { return eigenvalues_[static_cast<std::size_t>(n)]; }
  const Operator<Scalar>& projector(int n) const {
    return projectors_[static_cast<std::size_t>(n)];
  }
  const std::vector<Scalar>& eigenvalues() const { return eigenvalues_; }
  const std::vector<Operator<Scalar>>& projectors() const { return projectors_; }

  // sum_n c_n P_n
  Operator<Scalar> reconstruct() const {
    MatrixX<Scalar> m = MatrixX<Scalar>::Zero(space_.dimension(), space_.dimension());
    for (int n = 0; n < size(); ++n)
      m += Complex<Scalar>(eigenvalue(n), 0) * projector(n).matrix();
    return Operator<Scalar>(space_, std::move(m));
  }

  // Smallest gap between adjacent eigenvalues; meaningful only for size >= 2.
  Scalar min_gap() const {
    Scalar g = std::numeric_limits<Scalar>::infinity();
    for (std::size_t i = 1; i < eigenvalues_.size(); ++i)
      g = std::min(g, eigenvalues_[i] - eigenvalues_[i - 1]);
    return g;
  }

 private:
  HilbertSpace space_;
  std::vector<Scalar> eigenvalues_;
  std::vector<Operator<Scalar>> projectors_;
};

// Eigendecomposition of a Hermitian operator. Eigenvalues whose pairwise gap
// is at most degeneracy_tol * max(1, |op|) merge into a single eigenspace
// projector; the selection formulas are stated per outcome, so degenerate
// outcomes must arrive grouped.
template <class Scalar>
SpectralDecomposition<Scalar> eigendecompose(const Operator<Scalar>& op,
                                             Scalar degeneracy_tol = Scalar(1e-8)) {
  if (!(degeneracy_tol > Scalar(0)))
    throw ValidationError("degeneracy tolerance must be positive");
  if (!is_hermitian(op))
    throw NonHermitian("eigendecompose requires a Hermitian operator");

  const int d = op.space().dimension();
  const MatrixX<Scalar> symmetrized = (op.matrix() + op.matrix().adjoint()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(symmetrized);
  if (solver.info() != Eigen::Success)
    throw ValidationError("eigendecomposition failed to converge");

  const Scalar merge_gap = degeneracy_tol * operator_scale(op);
  std::vector<Scalar> eigenvalues;
  std::vector<Operator<Scalar>> projectors;
  int begin = 0;
  while (begin < d) {
    int end = begin + 1;
    while (end < d && solver.eigenvalues()[end] - solver.eigenvalues()[end - 1] <= merge_gap)
      ++end;
    Scalar value = 0;
    MatrixX<Scalar> p = MatrixX<Scalar>::Zero(d, d);
    for (int k = begin; k < end; ++k) {
      value += solver.eigenvalues()[k];
      const VectorX<Scalar> v = solver.eigenvectors().col(k);
      p += v * v.adjoint();
    }
    value /= Scalar(end - begin);
    p = ((p + p.adjoint()) / Scalar(2)).eval();
    eigenvalues.push_back(value);
    projectors.emplace_back(op.space(), std::move(p));
    begin = end;
  }
  return SpectralDecomposition<Scalar>(op.space(), std::move(eigenvalues),
                                       std::move(projectors));
}

// Orthogonal projector onto the span of the given kets.
template <class Scalar>
Operator<Scalar> projector_onto(const std::vector<Ket<Scalar>>& kets) {
  if (kets.empty()) throw ValidationError("projector_onto needs at least one ket");
  const HilbertSpace& space = kets.front().space();
  const int d = space.dimension();
  const int k = static_cast<int>(kets.size());
  MatrixX<Scalar> columns(d, k);
  for (int j = 0; j < k; ++j) {
    require_compatible(space, kets[static_cast<std::size_t>(j)].space(), "projector_onto");
    columns.col(j) = kets[static_cast<std::size_t>(j)].amplitudes();
  }

  // Gram gate: reject spans that are dependent to working precision.
  MatrixX<Scalar> gram = columns.adjoint() * columns;
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> gram_eigs(gram);
  if (!(gram_eigs.eigenvalues().minCoeff() > Scalar(1e-10)))
    throw DependentSpan("kets are linearly dependent (Gram eigenvalue <= 1e-10)");

  Eigen::HouseholderQR<MatrixX<Scalar>> qr(columns);
  const MatrixX<Scalar> q = qr.householderQ() * MatrixX<Scalar>::Identity(d, k);
  MatrixX<Scalar> p = q * q.adjoint();
  p = ((p + p.adjoint()) / Scalar(2)).eval();
  return Operator<Scalar>(space, std::move(p));
}

// Spin-1/2 staples on an explicit two-dimensional space.

template <class Scalar>
Operator<Scalar> pauli_x(const HilbertSpace& space) {
  if (space.dimension() != 2) throw ValidationError("pauli_x needs dimension 2");
  MatrixX<Scalar> m(2, 2);
  m << Complex<Scalar>(0, 0), Complex<Scalar>(1, 0), Complex<Scalar>(1, 0),
      Complex<Scalar>(0, 0);
  return Operator<Scalar>(space, std::move(m));
}

template <class Scalar>
Operator<Scalar> pauli_y(const HilbertSpace& space) {
  if (space.dimension() != 2) throw ValidationError("pauli_y needs dimension 2");
  MatrixX<Scalar> m(2, 2);
  m << Complex<Scalar>(0, 0), Complex<Scalar>(0, -1), Complex<Scalar>(0, 1),
      Complex<Scalar>(0, 0);
  return Operator<Scalar>(space, std::move(m));
}

template <class Scalar>
Operator<Scalar> pauli_z(const HilbertSpace& space) {
  if (space.dimension() != 2) throw ValidationError("pauli_z needs dimension 2");
  MatrixX<Scalar> m(2, 2);
  m << Complex<Scalar>(1, 0), Complex<Scalar>(0, 0), Complex<Scalar>(0, 0),
      Complex<Scalar>(-1, 0);
  return Operator<Scalar>(space, std::move(m));
}

// (S1 + S2)^2 for two spin-1/2 particles in the product basis
// {up-up, up-down, down-up, down-down}; eigenvalues 0 (singlet) and 2 (triplet).
template <class Scalar>
Operator<Scalar> total_spin_squared(const HilbertSpace& space) {
  if (space.dimension() != 4) throw ValidationError("total_spin_squared needs dimension 4");
  MatrixX<Scalar> m = MatrixX<Scalar>::Zero(4, 4);
  m(0, 0) = Complex<Scalar>(2, 0);
  m(3, 3) = Complex<Scalar>(2, 0);
  m(1, 1) = Complex<Scalar>(1, 0);
  m(2, 2) = Complex<Scalar>(1, 0);
  m(1, 2) = Complex<Scalar>(1, 0);
  m(2, 1) = Complex<Scalar>(1, 0);
  return Operator<Scalar>(space, std::move(m));
}

}  // namespace tsvf
