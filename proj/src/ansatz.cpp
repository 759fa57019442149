#include "qfast/ansatz.hpp"

#include "qfast/error.hpp"

#include <algorithm>
#include <cmath>

namespace qfast {

namespace {

Eigen::Index function_size(int m) { return Eigen::Index{1} << (2 * m); }

template <typename... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <typename... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

}  // namespace

bool CircuitEncoding::all_generic() const {
  return std::all_of(layers.begin(), layers.end(),
                     [](const Layer& l) { return std::holds_alternative<GenericLayer>(l); });
}

bool CircuitEncoding::all_fixed() const {
  return std::all_of(layers.begin(), layers.end(),
                     [](const Layer& l) { return std::holds_alternative<FixedLayer>(l); });
}

Eigen::Index CircuitEncoding::parameter_count() const {
  Eigen::Index count = 0;
  for (const auto& layer : layers) {
    std::visit(Overloaded{
                   [&](const GenericLayer& g) { count += g.alpha.size() + g.logits.size(); },
                   [&](const FixedLayer& f) { count += f.alpha.size(); },
               },
               layer);
  }
  return count;
}

void CircuitEncoding::validate() const {
  if (n < 1 || m < 1 || m > n) throw Error(ErrorKind::BadQubitSet, "encoding needs 1 <= m <= n");
  if (!all_generic() && !all_fixed()) {
    throw Error(ErrorKind::LengthMismatch, "encoding mixes generic and fixed layers");
  }
  for (const auto& layer : layers) {
    std::visit(Overloaded{
                   [&](const GenericLayer& g) {
                     if (g.alpha.size() != function_size(m)) {
                       throw Error(ErrorKind::LengthMismatch, "alpha must have 4^m entries");
                     }
                     if (g.placements.empty() ||
                         g.logits.size() != static_cast<Eigen::Index>(g.placements.size())) {
                       throw Error(ErrorKind::LengthMismatch, "one logit per placement required");
                     }
                     for (const auto& q : g.placements) {
                       if (q.size() != m || !q.valid_for(n)) {
                         throw Error(ErrorKind::BadQubitSet, "bad placement " + q.str());
                       }
                     }
                   },
                   [&](const FixedLayer& f) {
                     if (f.q.size() != m || !f.q.valid_for(n)) {
                       throw Error(ErrorKind::BadQubitSet, "bad placement " + f.q.str());
                     }
                     if (f.alpha.size() != function_size(m)) {
                       throw Error(ErrorKind::LengthMismatch, "alpha must have 4^|q| entries");
                     }
                   },
               },
               layer);
  }
}

RealVector pack_parameters(const CircuitEncoding& enc) {
  RealVector out(enc.parameter_count());
  Eigen::Index at = 0;
  auto put = [&](const RealVector& v) {
    out.segment(at, v.size()) = v;
    at += v.size();
  };
  for (const auto& layer : enc.layers) {
    std::visit(Overloaded{
                   [&](const GenericLayer& g) { put(g.alpha); put(g.logits); },
                   [&](const FixedLayer& f) { put(f.alpha); },
               },
               layer);
  }
  return out;
}

void unpack_parameters(CircuitEncoding& enc, const RealVector& params) {
  if (params.size() != enc.parameter_count()) {
    throw Error(ErrorKind::LengthMismatch, "parameter vector does not match encoding");
  }
  Eigen::Index at = 0;
  auto take = [&](RealVector& v) {
    v = params.segment(at, v.size());
    at += v.size();
  };
  for (auto& layer : enc.layers) {
    std::visit(Overloaded{
                   [&](GenericLayer& g) { take(g.alpha); take(g.logits); },
                   [&](FixedLayer& f) { take(f.alpha); },
               },
               layer);
  }
}

RealVector softmax_weights(const RealVector& logits) {
  if (logits.size() == 0) return logits;
  const double top = logits.maxCoeff();
  RealVector w = (logits.array() - top).exp().matrix();
  return w / w.sum();
}

ComplexMatrix generic_generator(const GenericLayer& layer, int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  const RealVector w = softmax_weights(layer.logits);
  for (std::size_t p = 0; p < layer.placements.size(); ++p) {
    const auto sigma = restricted_masks(n, layer.placements[p]);
    const double weight = w(static_cast<Eigen::Index>(p));
    for (Eigen::Index k = 0; k < layer.alpha.size(); ++k) {
      const double c = weight * layer.alpha(k);
      if (c != 0.0) accumulate_pauli(h, sigma[static_cast<std::size_t>(k)], c);
    }
  }
  return h;
}

ComplexMatrix fixed_generator(const FixedLayer& layer, int n) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  const auto sigma = restricted_masks(n, layer.q);
  if (static_cast<std::size_t>(layer.alpha.size()) != sigma.size()) {
    throw Error(ErrorKind::LengthMismatch, "alpha must have 4^|q| entries");
  }
  for (Eigen::Index k = 0; k < layer.alpha.size(); ++k) {
    if (layer.alpha(k) != 0.0) accumulate_pauli(h, sigma[static_cast<std::size_t>(k)], layer.alpha(k));
  }
  return h;
}

ComplexMatrix generic_gate_unitary(const GenericLayer& layer, int n) {
  return expi_herm(generic_generator(layer, n));
}

ComplexMatrix fixed_gate_unitary(const FixedLayer& layer, int n) {
  return expi_herm(fixed_generator(layer, n));
}

ComplexMatrix layer_unitary(const Layer& layer, int n) {
  return std::visit(Overloaded{
                        [&](const GenericLayer& g) { return generic_gate_unitary(g, n); },
                        [&](const FixedLayer& f) { return fixed_gate_unitary(f, n); },
                    },
                    layer);
}

ComplexMatrix circuit_unitary(const CircuitEncoding& enc) {
  const Eigen::Index dim = Eigen::Index{1} << enc.n;
  ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
  for (const auto& layer : enc.layers) u = layer_unitary(layer, enc.n) * u;
  return u;
}

double loss(const ComplexMatrix& u_c, const ComplexMatrix& u_t) {
  const Complex t = hs_inner(u_c, u_t);
  const double d = static_cast<double>(u_c.rows());
  const double radicand = 1.0 - std::norm(t) / (d * d);
  if (radicand > kLossCancellationBand) return std::sqrt(radicand);
  // Near zero 1 - |t|^2/d^2 loses every digit to cancellation. For unitary
  // operands 1 - |t|/d = ||e^{i arg t} u_c - u_t||_F^2 / (2d) exactly.
  const Complex phase = std::abs(t) > 0.0 ? t / std::abs(t) : Complex(1.0, 0.0);
  const double gap = (phase * u_c - u_t).squaredNorm() / (2.0 * d);
  return std::sqrt(std::max(0.0, gap * (2.0 - gap)));
}

RealVector LossGradient::flat() const {
  Eigen::Index count = 0;
  for (const auto& l : layers) count += l.alpha.size() + l.logits.size();
  RealVector out(count);
  Eigen::Index at = 0;
  for (const auto& l : layers) {
    out.segment(at, l.alpha.size()) = l.alpha;
    at += l.alpha.size();
    out.segment(at, l.logits.size()) = l.logits;
    at += l.logits.size();
  }
  return out;
}

namespace {

// Per-layer state shared between the forward product and the gradient pass.
struct LayerEval {
  HermEig eig;
  ComplexMatrix unitary;
  std::vector<std::vector<PauliMasks>> sigma;  // per placement
  RealVector weights;                          // empty for fixed layers
};

}  // namespace

LossGradient loss_and_grad(const CircuitEncoding& enc, const ComplexMatrix& u_t) {
  const int n = enc.n;
  const Eigen::Index dim = Eigen::Index{1} << n;
  if (u_t.rows() != dim || u_t.cols() != dim) {
    throw Error(ErrorKind::DimMismatch, "target dimension does not match encoding");
  }
  const auto depth = enc.layers.size();

  std::vector<LayerEval> evals(depth);
  for (std::size_t i = 0; i < depth; ++i) {
    LayerEval& e = evals[i];
    std::visit(Overloaded{
                   [&](const GenericLayer& g) {
                     e.weights = softmax_weights(g.logits);
                     for (const auto& q : g.placements) e.sigma.push_back(restricted_masks(n, q));
                     e.eig = herm_eig(generic_generator(g, n));
                   },
                   [&](const FixedLayer& f) {
                     e.sigma.push_back(restricted_masks(n, f.q));
                     e.eig = herm_eig(fixed_generator(f, n));
                   },
               },
               enc.layers[i]);
    e.unitary = expi_from_eig(e.eig);
  }

  // prefix[i] = U_{i-1} ... U_0 (applied before layer i)
  std::vector<ComplexMatrix> prefix(depth + 1);
  prefix[0] = ComplexMatrix::Identity(dim, dim);
  for (std::size_t i = 0; i < depth; ++i) prefix[i + 1] = evals[i].unitary * prefix[i];
  const ComplexMatrix& u_c = prefix[depth];

  const Complex trace = hs_inner(u_c, u_t);
  const double d2 = static_cast<double>(dim) * static_cast<double>(dim);
  LossGradient out;
  out.loss = loss(u_c, u_t);
  out.layers.resize(depth);
  // dLoss = -Re(conj(T) dT) / (d^2 loss). With T = |T| e^{i phi} and
  // Re<dU_C, U_C> = 0 this equals -|T| Re<dU_C, e^{-i phi} U_T - U_C> / (d^2 loss),
  // whose roundoff shrinks with the residual instead of staying at machine epsilon.
  const double scale = -std::abs(trace) / (d2 * std::max(out.loss, kLossGradFloor));
  const Complex unphase = std::abs(trace) > 0.0 ? std::conj(trace) / std::abs(trace) : Complex(1.0, 0.0);
  const ComplexMatrix residual = unphase * u_t - u_c;
  auto partial = [&](Complex dtrace) { return scale * dtrace.real(); };

  ComplexMatrix suffix = ComplexMatrix::Identity(dim, dim);  // U_{d-1} ... U_{i+1}
  for (std::size_t ii = depth; ii-- > 0;) {
    const LayerEval& e = evals[ii];
    const auto& v = e.eig.eigenvectors;
    // dT = <dU_i, M> with M = suffix^dagger R prefix^dagger; in the eigenbasis
    // <dU, M> = Tr(dH Y), Y = V (conj(F) o V^dagger M V) V^dagger.
    const ComplexMatrix m = suffix.adjoint() * residual * prefix[ii].adjoint();
    const ComplexMatrix f = expi_divided_differences(e.eig.eigenvalues);
    const ComplexMatrix y = v * (v.adjoint() * m * v).cwiseProduct(f.conjugate()) * v.adjoint();

    LayerGradient& lg = out.layers[ii];
    std::visit(Overloaded{
                   [&](const GenericLayer& g) {
                     const auto num_q = g.placements.size();
                     const Eigen::Index num_k = g.alpha.size();
                     std::vector<Complex> per_placement(num_q);
                     ComplexVector dalpha = ComplexVector::Zero(num_k);
                     for (std::size_t p = 0; p < num_q; ++p) {
                       const double w = e.weights(static_cast<Eigen::Index>(p));
                       Complex s{};
                       for (Eigen::Index k = 0; k < num_k; ++k) {
                         const Complex tr = trace_with_pauli(e.sigma[p][static_cast<std::size_t>(k)], y);
                         dalpha(k) += w * tr;
                         s += g.alpha(k) * tr;
                       }
                       per_placement[p] = s;
                     }
                     lg.alpha.resize(num_k);
                     for (Eigen::Index k = 0; k < num_k; ++k) lg.alpha(k) = partial(dalpha(k));
                     // dw_p/dl_j = w_p (delta_pj - w_j)
                     Complex mean{};
                     for (std::size_t p = 0; p < num_q; ++p) {
                       mean += e.weights(static_cast<Eigen::Index>(p)) * per_placement[p];
                     }
                     lg.logits.resize(static_cast<Eigen::Index>(num_q));
                     for (std::size_t j = 0; j < num_q; ++j) {
                       const double wj = e.weights(static_cast<Eigen::Index>(j));
                       lg.logits(static_cast<Eigen::Index>(j)) = partial(wj * (per_placement[j] - mean));
                     }
                   },
                   [&](const FixedLayer& fl) {
                     lg.alpha.resize(fl.alpha.size());
                     for (Eigen::Index k = 0; k < fl.alpha.size(); ++k) {
                       lg.alpha(k) = partial(trace_with_pauli(e.sigma[0][static_cast<std::size_t>(k)], y));
                     }
                   },
               },
               enc.layers[ii]);
    suffix = suffix * e.unitary;
  }
  return out;
}

Placement dominant_placement(const GenericLayer& layer) {
  if (layer.placements.empty()) throw Error(ErrorKind::NoPlacements, "layer has no placements");
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < layer.logits.size(); ++k) {
    if (layer.logits(k) > layer.logits(best)) best = k;
  }
  return layer.placements[static_cast<std::size_t>(best)];
}

}  // namespace qfast
