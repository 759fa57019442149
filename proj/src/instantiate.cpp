#include "qfast/instantiate.hpp"

#include "qfast/ansatz.hpp"
#include "qfast/error.hpp"
#include "qfast/optimizer.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <utility>

namespace qfast {

namespace {

using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

Mat2 pauli2(int k) {
  Mat2 m;
  switch (k) {
    case 0: m << 0.0, 1.0, 1.0, 0.0; break;     // X
    case 1: m << 0.0, -kI, kI, 0.0; break;      // Y
    default: m << 1.0, 0.0, 0.0, -1.0; break;  // Z
  }
  return m;
}

Mat2 rot(int axis, double t) {
  return std::cos(t / 2.0) * Mat2::Identity() - kI * std::sin(t / 2.0) * pauli2(axis);
}
Mat2 rx(double t) { return rot(0, t); }
Mat2 ry(double t) { return rot(1, t); }
Mat2 rz(double t) { return rot(2, t); }

Mat2 hadamard() {
  Mat2 h;
  h << 1.0, 1.0, 1.0, -1.0;
  return h / std::sqrt(2.0);
}

Mat2 s_dagger() {
  Mat2 s;
  s << 1.0, 0.0, 0.0, -kI;
  return s;
}

Mat4 kron2(const Mat2& a, const Mat2& b) { return tensor_product(a, b); }

template <typename M>
M nearest_unitary(const M& u) {
  Eigen::JacobiSVD<M> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

// Columns are the magic (Bell-like) basis; local SU(2)xSU(2) conjugates into SO(4).
Mat4 magic_basis() {
  Mat4 b;
  b << 1.0, 0.0, 0.0, kI,
       0.0, kI, 1.0, 0.0,
       0.0, kI, -1.0, 0.0,
       1.0, 0.0, 0.0, -kI;
  return b / std::sqrt(2.0);
}

// Splits K = a (x) b; a is normalized to det 1.
std::pair<Mat2, Mat2> factor_tensor(const Mat4& k) {
  Eigen::Index r = 0;
  Eigen::Index c = 0;
  k.cwiseAbs().maxCoeff(&r, &c);
  const Eigen::Index r0 = r / 2, r1 = r % 2, c0 = c / 2, c1 = c % 2;
  Mat2 a;
  Mat2 b;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      a(i, j) = k(2 * i + r1, 2 * j + c1);
      b(i, j) = k(2 * r0 + i, 2 * c0 + j);
    }
  }
  b /= k(r, c);
  const Complex scale = std::sqrt(a.determinant());
  a /= scale;
  b *= scale;
  return {a, b};
}

// u = phase * (left0 (x) left1) * Can(c) * (right0 (x) right1)
struct CanonicalForm {
  Complex phase{1.0, 0.0};
  Mat2 left0 = Mat2::Identity(), left1 = Mat2::Identity();
  std::array<double, 3> c{};
  Mat2 right0 = Mat2::Identity(), right1 = Mat2::Identity();

  // c_k -= s * pi/2 ; exp(i s pi/2 PP) = i s PP moves into the right locals.
  void shift(int k, int s) {
    c[static_cast<std::size_t>(k)] -= s * kPi / 2.0;
    right0 = pauli2(k) * right0;
    right1 = pauli2(k) * right1;
    phase *= Complex(0.0, s);
  }
  // Conjugation by P_k (x) I negates the two other coefficients.
  void flip(int k) {
    for (int j = 0; j < 3; ++j) {
      if (j != k) c[static_cast<std::size_t>(j)] = -c[static_cast<std::size_t>(j)];
    }
    left0 = left0 * pauli2(k);
    right0 = pauli2(k) * right0;
  }
  // W (x) W with W P_j W = P_k exchanges two coefficients.
  void swap(int j, int k) {
    const Mat2 w = (pauli2(j) + pauli2(k)) / std::sqrt(2.0);
    std::swap(c[static_cast<std::size_t>(j)], c[static_cast<std::size_t>(k)]);
    left0 = left0 * w;
    left1 = left1 * w;
    right0 = w * right0;
    right1 = w * right1;
  }

  void fold() {
    for (int k = 0; k < 3; ++k) {
      while (c[static_cast<std::size_t>(k)] > kPi / 4.0) shift(k, +1);
      while (c[static_cast<std::size_t>(k)] <= -kPi / 4.0) shift(k, -1);
    }
    auto mag = [&](int k) { return std::abs(c[static_cast<std::size_t>(k)]); };
    if (mag(0) < mag(1)) swap(0, 1);
    if (mag(1) < mag(2)) swap(1, 2);
    if (mag(0) < mag(1)) swap(0, 1);
    if (c[0] < 0.0 && c[1] < 0.0) {
      flip(2);
    } else if (c[0] < 0.0) {
      flip(1);
    } else if (c[1] < 0.0) {
      flip(0);
    }
  }
};

// Raw magic-basis decomposition into CanonicalForm (unfolded coefficients).
// Returns false if the simultaneous diagonalization did not converge.
bool canonical_form(const Mat4& u, std::mt19937_64& rng, CanonicalForm& out) {
  const Mat4 b = magic_basis();
  const Complex det_u = u.determinant();
  const Complex root = std::polar(1.0, std::arg(det_u) / 4.0);
  const Mat4 su = u / root;
  const Mat4 up = b.adjoint() * su * b;
  const Mat4 m = up.transpose() * up;

  const Eigen::Matrix4d mr = m.real();
  const Eigen::Matrix4d mi = m.imag();
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::Matrix4d p;
  bool ok = false;
  for (int attempt = 0; attempt < 8 && !ok; ++attempt) {
    const double x = attempt == 0 ? 1.0 : uni(rng);
    const double y = attempt == 0 ? 0.5772156649 : uni(rng);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(x * mr + y * mi);
    p = solver.eigenvectors();
    const Mat4 d = p.transpose().cast<Complex>() * m * p.cast<Complex>();
    const Mat4 off = d - Mat4(d.diagonal().asDiagonal());
    ok = off.cwiseAbs().maxCoeff() < 1e-10;
  }
  if (!ok) return false;
  if (p.determinant() < 0.0) p.col(0) = -p.col(0);

  const Eigen::Vector4cd diag = (p.transpose().cast<Complex>() * m * p.cast<Complex>()).diagonal();
  Eigen::Vector4d theta;
  for (int k = 0; k < 4; ++k) theta(k) = std::arg(diag(k)) / 2.0;

  Eigen::Vector4cd d_half;
  for (int k = 0; k < 4; ++k) d_half(k) = std::polar(1.0, theta(k));
  Mat4 k1 = up * p.cast<Complex>() * d_half.conjugate().asDiagonal();
  if (k1.determinant().real() < 0.0) {
    theta(0) += kPi;
    k1.col(0) = -k1.col(0);
  }
  // k1 is real orthogonal up to roundoff.
  Eigen::Matrix4d k1r = k1.real();
  {
    Eigen::JacobiSVD<Eigen::Matrix4d> svd(k1r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    k1r = svd.matrixU() * svd.matrixV().transpose();
  }

  // In the magic basis XX, YY, ZZ are diagonal with +-1 patterns.
  const Mat2 x = pauli2(0), y = pauli2(1), z = pauli2(2);
  const Eigen::Vector4d xx = (b.adjoint() * kron2(x, x) * b).diagonal().real();
  const Eigen::Vector4d yy = (b.adjoint() * kron2(y, y) * b).diagonal().real();
  const Eigen::Vector4d zz = (b.adjoint() * kron2(z, z) * b).diagonal().real();
  const double g = theta.sum() / 4.0;

  const auto [a0, a1] = factor_tensor(b * k1r.cast<Complex>() * b.adjoint());
  const auto [c0, c1] = factor_tensor(b * p.transpose().cast<Complex>() * b.adjoint());
  out = CanonicalForm{};
  out.phase = root * std::polar(1.0, g);
  out.left0 = nearest_unitary(a0);
  out.left1 = nearest_unitary(a1);
  out.right0 = nearest_unitary(c0);
  out.right1 = nearest_unitary(c1);
  out.c = {xx.dot(theta) / 4.0, yy.dot(theta) / 4.0, zz.dot(theta) / 4.0};
  return true;
}

// Gate stream with single-qubit operators kept as matrices until the end.
struct LocalStream {
  struct Item {
    bool is_cnot = false;
    int q0 = 0;
    int q1 = 0;
    Mat2 u = Mat2::Identity();
  };
  std::vector<Item> items;

  void local(int q, const Mat2& u) { items.push_back({false, q, 0, u}); }
  void locals(const Mat2& u0, const Mat2& u1) {
    local(0, u0);
    local(1, u1);
  }
  void cnot(int c, int t) { items.push_back({true, c, t, Mat2::Identity()}); }
};

bool is_identity_up_to_phase(const Mat2& u) {
  return std::abs(u(0, 1)) < 1e-14 && std::abs(u(1, 0)) < 1e-14 && std::abs(u(0, 0) - u(1, 1)) < 1e-14;
}

// Merges runs of single-qubit operators and lowers them to U3.
Program lower(const LocalStream& s, KakResult* kak) {
  Program p;
  p.n = 2;
  std::array<Mat2, 2> pending = {Mat2::Identity(), Mat2::Identity()};
  bool seen_cnot = false;
  auto flush = [&](int q) {
    const Mat2 u = nearest_unitary(pending[static_cast<std::size_t>(q)]);
    const U3Params params = u3_params(u);
    if (kak && !seen_cnot) kak->pre[static_cast<std::size_t>(q)] = params;
    if (is_identity_up_to_phase(u)) {
      p.accumulated_phase += std::arg(u(0, 0));
    } else {
      p.add_u3(q, params);
    }
    pending[static_cast<std::size_t>(q)] = Mat2::Identity();
  };
  for (const auto& item : s.items) {
    if (item.is_cnot) {
      flush(item.q0);
      flush(item.q1);
      seen_cnot = true;
      p.add_cnot(item.q0, item.q1);
    } else {
      pending[static_cast<std::size_t>(item.q0)] = item.u * pending[static_cast<std::size_t>(item.q0)];
    }
  }
  if (kak && seen_cnot) {
    for (int q = 0; q < 2; ++q) {
      kak->post[static_cast<std::size_t>(q)] = u3_params(nearest_unitary(pending[static_cast<std::size_t>(q)]));
    }
  }
  flush(0);
  flush(1);
  return p;
}

// Time-ordered circuit for Can(c) in the folded chamber.
void emit_canonical(LocalStream& s, const std::array<double, 3>& c, int cnots) {
  const auto [cx, cy, cz] = c;
  switch (cnots) {
    case 0:
      break;
    case 1: {
      // exp(i pi/4 XX) ~ (H (x) I) CX (S^dagger H (x) H S^dagger H)
      const Mat2 h = hadamard();
      s.locals(s_dagger() * h, h * s_dagger() * h);
      s.cnot(0, 1);
      s.local(0, h);
      break;
    }
    case 2: {
      // CX (e^{i cx X} (x) e^{i cy Z}) CX = exp(i(cx XX + cy ZZ)); V maps ZZ to YY.
      const Mat2 v = rx(kPi / 2.0);
      s.locals(v.adjoint(), v.adjoint());
      s.cnot(0, 1);
      s.locals(rx(-2.0 * cx), rz(-2.0 * cy));
      s.cnot(0, 1);
      s.locals(v, v);
      break;
    }
    default:
      s.local(1, rz(-kPi / 2.0));
      s.cnot(1, 0);
      s.locals(rz(kPi / 2.0 - 2.0 * cz), ry(2.0 * cx - kPi / 2.0));
      s.cnot(0, 1);
      s.local(1, ry(kPi / 2.0 - 2.0 * cy));
      s.cnot(1, 0);
      s.local(0, rz(kPi / 2.0));
      break;
  }
}

int cnots_for(const std::array<double, 3>& c) {
  const double tol = kKakCoefficientTol;
  if (std::abs(c[0]) <= tol && std::abs(c[1]) <= tol && std::abs(c[2]) <= tol) return 0;
  if (std::abs(c[0] - kPi / 4.0) <= tol && std::abs(c[1]) <= tol && std::abs(c[2]) <= tol) return 1;
  if (std::abs(c[2]) <= tol) return 2;
  return 3;
}

void fix_global_phase(Program& p, const ComplexMatrix& target) {
  p.accumulated_phase = 0.0;
  p.accumulated_phase = wrap_angle(best_phase(compose_program(p), target));
}

}  // namespace

void SynthesisConfig::validate() const {
  if (!(0.0 < refinement_distance && refinement_distance < exploration_distance && exploration_distance < 1.0)) {
    throw Error(ErrorKind::Unsupported, "need 0 < refinement_distance < exploration_distance < 1");
  }
  if (native_block_size != 2) throw Error(ErrorKind::Unsupported, "native block size must be 2");
  if (lr_explore <= 0.0 || lr_refine <= 0.0) throw Error(ErrorKind::Unsupported, "learning rates must be positive");
  if (record_every < 1 || plateau_window < 1) throw Error(ErrorKind::Unsupported, "bad plateau constants");
  if (max_steps < 1 || max_layers < 1) throw Error(ErrorKind::Unsupported, "budgets must be positive");
}

U3Params u3_params(const ComplexMatrix& u) {
  if (u.rows() != 2 || u.cols() != 2 || unitarity_error(u) > kStructuralTol) {
    throw Error(ErrorKind::NotUnitary, "u3_params needs a 2x2 unitary");
  }
  U3Params p;
  const double c = std::abs(u(0, 0));
  const double s = std::abs(u(1, 0));
  p.theta = 2.0 * std::atan2(s, c);
  if (c >= s) {
    p.global_phase = std::arg(u(0, 0));
    p.phi = s > 1e-15 ? std::arg(u(1, 0)) - p.global_phase : 0.0;
    p.lambda = std::arg(u(1, 1)) - p.global_phase - p.phi;
  } else {
    p.global_phase = c > 1e-15 ? std::arg(u(0, 0)) : 0.0;
    if (c > 1e-15) {
      p.phi = std::arg(u(1, 0)) - p.global_phase;
      p.lambda = std::arg(-u(0, 1)) - p.global_phase;
    } else {
      p.global_phase = std::arg(u(1, 0));
      p.phi = 0.0;
      p.lambda = std::arg(-u(0, 1)) - p.global_phase;
    }
  }
  p.phi = wrap_angle(p.phi);
  p.lambda = wrap_angle(p.lambda);
  p.global_phase = wrap_angle(p.global_phase);
  return p;
}

std::array<double, 3> canonical_coefficients(const ComplexMatrix& u) {
  if (u.rows() != 4 || u.cols() != 4 || unitarity_error(u) > kKakReconstructionTol) {
    throw Error(ErrorKind::NotUnitary, "expected a 4x4 unitary");
  }
  std::mt19937_64 rng(0);
  CanonicalForm form;
  if (!canonical_form(nearest_unitary(Mat4(u)), rng, form)) {
    throw Error(ErrorKind::DecompositionFailed, "magic-basis diagonalization failed");
  }
  form.fold();
  return form.c;
}

KakResult kak_decompose(const ComplexMatrix& u, std::uint64_t seed) {
  if (u.rows() != 4 || u.cols() != 4 || unitarity_error(u) > kKakReconstructionTol) {
    throw Error(ErrorKind::NotUnitary, "kak_decompose needs a 4x4 unitary");
  }
  const Mat4 target = nearest_unitary(Mat4(u));
  std::mt19937_64 rng(seed);
  constexpr int kAttempts = 5;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    // Later attempts decompose target * (R0 (x) R1) and undo the rotation first.
    Mat2 r0 = Mat2::Identity();
    Mat2 r1 = Mat2::Identity();
    if (attempt > 0) {
      r0 = random_unitary(1, rng());
      r1 = random_unitary(1, rng());
    }
    CanonicalForm form;
    if (!canonical_form(target * kron2(r0, r1), rng, form)) continue;
    form.fold();

    KakResult res;
    res.coefficients = form.c;
    res.cnot_count = cnots_for(form.c);

    LocalStream stream;
    stream.locals(r0.adjoint(), r1.adjoint());
    stream.locals(form.right0, form.right1);
    emit_canonical(stream, form.c, res.cnot_count);
    stream.locals(form.left0, form.left1);
    res.program = lower(stream, &res);
    fix_global_phase(res.program, u);
    res.distance = loss(compose_program(res.program), u);
    if (res.distance <= kKakReconstructionTol) return res;
  }
  throw Error(ErrorKind::DecompositionFailed, "KAK reconstruction exceeded tolerance after retries");
}

Program instantiate_block(const ComplexMatrix& u, std::uint64_t seed) {
  if (u.rows() == 2) {
    Program p;
    p.n = 1;
    const U3Params params = u3_params(nearest_unitary(Mat2(u)));
    p.add_u3(0, params);
    return p;
  }
  if (u.rows() == 4) return kak_decompose(u, seed).program;
  throw Error(ErrorKind::Unsupported, "native instantiation handles 1- and 2-qubit blocks only");
}

namespace {

// d/dtheta, d/dphi, d/dlambda of the U3 matrix.
std::array<Mat2, 3> u3_partials(double t, double ph, double la) {
  const double c = std::cos(t / 2.0);
  const double s = std::sin(t / 2.0);
  const Complex el = std::polar(1.0, la), ep = std::polar(1.0, ph), epl = std::polar(1.0, ph + la);
  std::array<Mat2, 3> d;
  d[0] << -s / 2.0, -el * c / 2.0, ep * c / 2.0, -epl * s / 2.0;
  d[1] << 0.0, 0.0, kI * ep * s, kI * epl * c;
  d[2] << 0.0, -kI * el * s, 0.0, kI * epl * c;
  return d;
}

Mat2 u3_of(const double* a) { return u3_matrix(U3Params{a[0], a[1], a[2], 0.0}); }

constexpr int kTemplateLayers = 4;
constexpr int kTemplateParams = kTemplateLayers * 6;

// Layer i: U3(params[6i..6i+2]) on qubit 0, U3(params[6i+3..6i+5]) on qubit 1;
// a CX(0,1) sits between consecutive layers.
ValueAndGradient template_objective(const RealVector& x, const Mat4& target) {
  Mat4 cx;
  cx << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0;
  std::array<Mat4, kTemplateLayers> locals;
  for (int i = 0; i < kTemplateLayers; ++i) {
    locals[static_cast<std::size_t>(i)] = kron2(u3_of(x.data() + 6 * i), u3_of(x.data() + 6 * i + 3));
  }
  // prefix[i]: everything applied before layer i.
  std::array<Mat4, kTemplateLayers + 1> prefix;
  prefix[0] = Mat4::Identity();
  for (int i = 0; i < kTemplateLayers; ++i) {
    const Mat4 step = locals[static_cast<std::size_t>(i)] * prefix[static_cast<std::size_t>(i)];
    prefix[static_cast<std::size_t>(i + 1)] = i + 1 < kTemplateLayers ? Mat4(cx * step) : step;
  }
  const Mat4& total = prefix[kTemplateLayers];
  const Complex trace = (total.conjugate().cwiseProduct(target)).sum();
  ValueAndGradient out;
  out.value = std::sqrt(std::max(0.0, 1.0 - std::norm(trace) / 16.0));
  out.gradient = RealVector::Zero(kTemplateParams);
  const double scale = -1.0 / (16.0 * std::max(out.value, kLossGradFloor));

  Mat4 suffix = Mat4::Identity();  // applied after layer i
  for (int i = kTemplateLayers - 1; i >= 0; --i) {
    const Mat4 m = suffix.adjoint() * target * prefix[static_cast<std::size_t>(i)].adjoint();
    const double* a = x.data() + 6 * i;
    const Mat2 u0 = u3_of(a);
    const Mat2 u1 = u3_of(a + 3);
    const auto d0 = u3_partials(a[0], a[1], a[2]);
    const auto d1 = u3_partials(a[3], a[4], a[5]);
    for (int k = 0; k < 3; ++k) {
      const Mat4 f0 = kron2(d0[static_cast<std::size_t>(k)], u1);
      const Mat4 f1 = kron2(u0, d1[static_cast<std::size_t>(k)]);
      out.gradient(6 * i + k) = scale * (std::conj(trace) * f0.conjugate().cwiseProduct(m).sum()).real();
      out.gradient(6 * i + 3 + k) = scale * (std::conj(trace) * f1.conjugate().cwiseProduct(m).sum()).real();
    }
    suffix = suffix * locals[static_cast<std::size_t>(i)];
    if (i > 0) suffix = suffix * cx;
  }
  return out;
}

}  // namespace

Program template_instantiate(const ComplexMatrix& u, const SynthesisConfig& cfg) {
  if (u.rows() != 4 || u.cols() != 4 || unitarity_error(u) > kKakReconstructionTol) {
    throw Error(ErrorKind::NotUnitary, "template_instantiate needs a 4x4 unitary");
  }
  const Mat4 target = u;
  const Objective objective = [&](const RealVector& x) { return template_objective(x, target); };
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> angle(-kPi, kPi);

  // Adam with a stepped learning-rate schedule; restart from a fresh random
  // point when a cascade stalls above the failure band.
  const std::array<double, 5> schedule = {0.1, 0.01, 1e-3, 1e-4, 1e-5};
  RealVector best;
  double best_loss = std::numeric_limits<double>::infinity();
  constexpr int kRestarts = 8;
  for (int restart = 0; restart < kRestarts && best_loss > kTemplateTarget; ++restart) {
    RealVector x(kTemplateParams);
    for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = angle(rng);
    double current = std::numeric_limits<double>::infinity();
    for (const double lr : schedule) {
      PlateauDetector plateau{cfg.record_every, cfg.plateau_window, 1e-3 * lr, {}};
      MinimizeOptions opts;
      opts.lr = lr;
      opts.threshold = kTemplateTarget;
      opts.max_steps = cfg.max_steps;
      const MinimizeOutcome out = minimize(objective, x, opts, plateau);
      x = out.params;
      current = out.final_loss;
      if (out.status == MinimizeStatus::ThresholdMet) break;
    }
    if (current < best_loss) {
      best_loss = current;
      best = x;
    }
  }
  if (best_loss > kTemplateFailure) {
    throw Error(ErrorKind::OptimizationFailed, "template fit plateaued at " + std::to_string(best_loss));
  }
  Program p;
  p.n = 2;
  for (int i = 0; i < kTemplateLayers; ++i) {
    if (i > 0) p.add_cnot(0, 1);
    p.gates.push_back(Gate::u3(0, best(6 * i), best(6 * i + 1), best(6 * i + 2)));
    p.gates.push_back(Gate::u3(1, best(6 * i + 3), best(6 * i + 4), best(6 * i + 5)));
  }
  fix_global_phase(p, u);
  return p;
}

}  // namespace qfast
