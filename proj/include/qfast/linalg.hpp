#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace qfast {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Structural tolerance for unitarity / hermiticity checks.
inline constexpr double kStructuralTol = 1e-10;

/// Kronecker product; the left operand is the most significant factor.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> tensor_product(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Result = Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Result out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Largest absolute entry of a - b.
template <typename DerivedA, typename DerivedB>
double max_abs_diff(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

/// ||u^dagger u - I||_max.
template <typename Derived>
double unitarity_error(const Eigen::MatrixBase<Derived>& u) {
  using Scalar = typename Derived::Scalar;
  const auto n = u.rows();
  if (u.cols() != n) return std::numeric_limits<double>::infinity();
  const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> id =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Identity(n, n);
  return max_abs_diff(u.adjoint() * u, id);
}

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& u, double tol = kStructuralTol) {
  return unitarity_error(u) <= tol;
}

/// ||h - h^dagger||_max.
template <typename Derived>
double hermiticity_error(const Eigen::MatrixBase<Derived>& h) {
  if (h.rows() != h.cols()) return std::numeric_limits<double>::infinity();
  return max_abs_diff(h, h.adjoint());
}

/// Hilbert-Schmidt inner product Tr(a^dagger b). Throws DimMismatch.
Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);

struct HermEig {
  RealVector eigenvalues;      // ascending
  ComplexMatrix eigenvectors;  // columns
};

/// Eigendecomposition of a Hermitian matrix. Throws NotHermitian.
HermEig herm_eig(const ComplexMatrix& h);

/// e^{iH} for Hermitian H, evaluated in the eigenbasis.
ComplexMatrix expi_herm(const ComplexMatrix& h);
ComplexMatrix expi_from_eig(const HermEig& eig);

/// Divided differences of f(x) = e^{ix} over the spectrum:
/// F(a,b) = (e^{i l_a} - e^{i l_b}) / (l_a - l_b), and i e^{i l_a} when l_a ~ l_b.
/// The Frechet derivative of e^{iH} along dH is V ((V^dagger dH V) o F) V^dagger.
ComplexMatrix expi_divided_differences(const RealVector& eigenvalues);

/// Threshold under which two eigenvalues are treated as degenerate.
inline constexpr double kDegenerateGap = 1e-9;

struct ExpiGrad {
  ComplexMatrix value;
  std::vector<ComplexMatrix> derivatives;
};

/// e^{iH} and its derivatives along the Hermitian directions dh.
ExpiGrad expi_herm_grad(const ComplexMatrix& h, std::span<const ComplexMatrix> dh);

/// Lift u (acting on qubits q, ascending) into an n-qubit operator.
/// Qubit 0 is the most significant tensor factor. Throws BadQubitSet.
ComplexMatrix lift(const ComplexMatrix& u, std::span<const int> qubits, int n);

/// Haar-random 2^n x 2^n unitary, deterministic in seed.
ComplexMatrix random_unitary(int n, std::uint64_t seed);

/// Haar-random unit state vector of dimension dim.
template <typename Rng>
ComplexVector random_state(Eigen::Index dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v(i) = Complex(re, im);
  }
  return v / v.norm();
}

/// Phase e^{i phi} maximizing Re Tr((e^{i phi} a)^dagger b), i.e. the best
/// global-phase alignment of a onto b.
double best_phase(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace qfast
