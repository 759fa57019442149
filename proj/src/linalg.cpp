#include "qfast/linalg.hpp"

#include "qfast/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <string>

namespace qfast {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::BadQubitSet: return "BadQubitSet";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorKind::NoPlacements: return "NoPlacements";
    case ErrorKind::LayerBudgetExceeded: return "LayerBudgetExceeded";
    case ErrorKind::DecompositionFailed: return "DecompositionFailed";
    case ErrorKind::OptimizationFailed: return "OptimizationFailed";
    case ErrorKind::MalformedFile: return "MalformedFile";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != a.cols() || a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimMismatch, "hs_inner needs equal square operands");
  }
  // Tr(a^dagger b) = sum_ij conj(a_ij) b_ij
  return a.conjugate().cwiseProduct(b).sum();
}

HermEig herm_eig(const ComplexMatrix& h) {
  if (h.rows() != h.cols()) throw Error(ErrorKind::NotHermitian, "matrix is not square");
  if (hermiticity_error(h) > kStructuralTol) {
    throw Error(ErrorKind::NotHermitian, "||h - h^dagger||_max exceeds tolerance");
  }
  // Symmetrize so roundoff in the lower triangle does not leak in.
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  return HermEig{solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix expi_from_eig(const HermEig& eig) {
  const auto& v = eig.eigenvectors;
  ComplexVector phases(eig.eigenvalues.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) {
    phases(k) = std::polar(1.0, eig.eigenvalues(k));
  }
  return v * phases.asDiagonal() * v.adjoint();
}

ComplexMatrix expi_herm(const ComplexMatrix& h) { return expi_from_eig(herm_eig(h)); }

ComplexMatrix expi_divided_differences(const RealVector& lambda) {
  const auto dim = lambda.size();
  ComplexMatrix f(dim, dim);
  const Complex i1(0.0, 1.0);
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (Eigen::Index b = 0; b < dim; ++b) {
      const double gap = lambda(a) - lambda(b);
      if (std::abs(gap) < kDegenerateGap) {
        f(a, b) = i1 * std::polar(1.0, 0.5 * (lambda(a) + lambda(b)));
      } else {
        f(a, b) = (std::polar(1.0, lambda(a)) - std::polar(1.0, lambda(b))) / gap;
      }
    }
  }
  return f;
}

ExpiGrad expi_herm_grad(const ComplexMatrix& h, std::span<const ComplexMatrix> dh) {
  const HermEig eig = herm_eig(h);
  const auto& v = eig.eigenvectors;
  const ComplexMatrix f = expi_divided_differences(eig.eigenvalues);
  ExpiGrad out;
  out.value = expi_from_eig(eig);
  out.derivatives.reserve(dh.size());
  for (const auto& d : dh) {
    if (d.rows() != h.rows() || d.cols() != h.cols()) {
      throw Error(ErrorKind::DimMismatch, "direction shape differs from h");
    }
    if (hermiticity_error(d) > kStructuralTol) {
      throw Error(ErrorKind::NotHermitian, "direction is not Hermitian");
    }
    const ComplexMatrix in_basis = v.adjoint() * d * v;
    out.derivatives.emplace_back(v * in_basis.cwiseProduct(f) * v.adjoint());
  }
  return out;
}

ComplexMatrix lift(const ComplexMatrix& u, std::span<const int> qubits, int n) {
  const auto m = static_cast<int>(qubits.size());
  if (n < 1 || n > 30) throw Error(ErrorKind::BadQubitSet, "unsupported register width");
  for (int k = 0; k < m; ++k) {
    if (qubits[k] < 0 || qubits[k] >= n || (k > 0 && qubits[k] <= qubits[k - 1])) {
      throw Error(ErrorKind::BadQubitSet, "qubits must be ascending and below n");
    }
  }
  if (u.rows() != (Eigen::Index{1} << m) || u.cols() != u.rows()) {
    throw Error(ErrorKind::BadQubitSet, "operator size does not match qubit set");
  }

  const Eigen::Index dim = Eigen::Index{1} << n;
  std::uint64_t mask = 0;
  for (const int q : qubits) mask |= std::uint64_t{1} << (n - 1 - q);

  // Sub-index of a full basis index: bits of the selected qubits, qubit
  // order preserved (first selected qubit most significant).
  auto sub_index = [&](std::uint64_t idx) {
    Eigen::Index s = 0;
    for (const int q : qubits) s = (s << 1) | static_cast<Eigen::Index>((idx >> (n - 1 - q)) & 1U);
    return s;
  };
  auto scatter = [&](std::uint64_t rest, Eigen::Index s) {
    std::uint64_t idx = rest;
    for (int k = m - 1; k >= 0; --k) {
      idx |= static_cast<std::uint64_t>(s & 1) << (n - 1 - qubits[k]);
      s >>= 1;
    }
    return idx;
  };

  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  const Eigen::Index sub_dim = u.rows();
  for (std::uint64_t r = 0; r < static_cast<std::uint64_t>(dim); ++r) {
    const std::uint64_t rest = r & ~mask;
    const Eigen::Index sr = sub_index(r);
    for (Eigen::Index sc = 0; sc < sub_dim; ++sc) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(scatter(rest, sc))) = u(sr, sc);
    }
  }
  return out;
}

ComplexMatrix random_unitary(int n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::DimMismatch, "random_unitary needs n >= 1");
  const Eigen::Index dim = Eigen::Index{1} << n;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix z(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(r, c) = Complex(re, im) / std::sqrt(2.0);
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double mag = std::abs(r(k, k));
    const Complex phase = mag > 0.0 ? r(k, k) / mag : Complex(1.0, 0.0);
    q.col(k) *= phase;
  }
  return q;
}

double best_phase(const ComplexMatrix& a, const ComplexMatrix& b) {
  return std::arg(hs_inner(a, b));
}

}  // namespace qfast
