#include "qfast/pauli.hpp"

#include "qfast/error.hpp"

#include <algorithm>
#include <bit>
#include <queue>

namespace qfast {

namespace {

constexpr char kLabels[] = {'I', 'X', 'Y', 'Z'};

ComplexMatrix single_pauli(Pauli p) {
  ComplexMatrix m(2, 2);
  const Complex i1(0.0, 1.0);
  switch (p) {
    case Pauli::I: m << 1.0, 0.0, 0.0, 1.0; break;
    case Pauli::X: m << 0.0, 1.0, 1.0, 0.0; break;
    case Pauli::Y: m << 0.0, -i1, i1, 0.0; break;
    case Pauli::Z: m << 1.0, 0.0, 0.0, -1.0; break;
  }
  return m;
}

}  // namespace

std::uint64_t PauliString::index() const {
  std::uint64_t idx = 0;
  for (const Pauli p : labels) idx = idx * 4 + static_cast<std::uint64_t>(p);
  return idx;
}

std::string PauliString::str() const {
  std::string s;
  s.reserve(labels.size());
  for (const Pauli p : labels) s.push_back(kLabels[static_cast<int>(p)]);
  return s;
}

PauliString PauliString::from_index(int n, std::uint64_t index) {
  PauliString p;
  p.labels.assign(static_cast<std::size_t>(n), Pauli::I);
  for (int k = n - 1; k >= 0; --k) {
    p.labels[static_cast<std::size_t>(k)] = static_cast<Pauli>(index & 3U);
    index >>= 2;
  }
  return p;
}

PauliString PauliString::parse(const std::string& text) {
  PauliString p;
  for (const char c : text) {
    switch (c) {
      case 'I': case 'i': p.labels.push_back(Pauli::I); break;
      case 'X': case 'x': p.labels.push_back(Pauli::X); break;
      case 'Y': case 'y': p.labels.push_back(Pauli::Y); break;
      case 'Z': case 'z': p.labels.push_back(Pauli::Z); break;
      default: throw Error(ErrorKind::MalformedFile, "bad Pauli label in '" + text + "'");
    }
  }
  return p;
}

PauliMasks masks_of(const PauliString& p) {
  PauliMasks m;
  const int n = p.size();
  int num_y = 0;
  for (int q = 0; q < n; ++q) {
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
    switch (p.labels[static_cast<std::size_t>(q)]) {
      case Pauli::I: break;
      case Pauli::X: m.x |= bit; break;
      case Pauli::Y: m.x |= bit; m.z |= bit; ++num_y; break;
      case Pauli::Z: m.z |= bit; break;
    }
  }
  // (-i)^{#Y}
  static const Complex kPowers[] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  m.phase = kPowers[num_y % 4];
  return m;
}

ComplexMatrix pauli_matrix(const PauliString& p) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (const Pauli label : p.labels) out = tensor_product(out, single_pauli(label));
  return out;
}

void accumulate_pauli(ComplexMatrix& h, const PauliMasks& sigma, double coeff) {
  const auto dim = static_cast<std::uint64_t>(h.rows());
  const Complex c = coeff * sigma.phase;
  for (std::uint64_t r = 0; r < dim; ++r) {
    const double sign = (std::popcount(r & sigma.z) & 1) ? -1.0 : 1.0;
    h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r ^ sigma.x)) += sign * c;
  }
}

Complex trace_with_pauli(const PauliMasks& sigma, const ComplexMatrix& y) {
  const auto dim = static_cast<std::uint64_t>(y.rows());
  Complex acc{};
  for (std::uint64_t r = 0; r < dim; ++r) {
    const Complex v = y(static_cast<Eigen::Index>(r ^ sigma.x), static_cast<Eigen::Index>(r));
    acc += (std::popcount(r & sigma.z) & 1) ? -v : v;
  }
  return sigma.phase * acc;
}

std::string Placement::str() const {
  std::string s = "{";
  for (std::size_t k = 0; k < qubits.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(qubits[k]);
  }
  return s + "}";
}

bool Placement::valid_for(int n) const {
  for (std::size_t k = 0; k < qubits.size(); ++k) {
    if (qubits[k] < 0 || qubits[k] >= n) return false;
    if (k > 0 && qubits[k] <= qubits[k - 1]) return false;
  }
  return true;
}

Topology::Topology(int n, std::vector<std::pair<int, int>> edges)
    : n_(n), adjacency_(static_cast<std::size_t>(std::max(n, 0)), 0) {
  if (n < 1 || n > 63) throw Error(ErrorKind::BadQubitSet, "topology size out of range");
  for (auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw Error(ErrorKind::BadQubitSet, "edge endpoint outside the register");
    }
    if (u == v) throw Error(ErrorKind::BadQubitSet, "self-loop in topology");
    if (u > v) std::swap(u, v);
    adjacency_[static_cast<std::size_t>(u)] |= std::uint64_t{1} << v;
    adjacency_[static_cast<std::size_t>(v)] |= std::uint64_t{1} << u;
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);
  all_to_all_ = edges_.size() == static_cast<std::size_t>(n) * (n - 1) / 2;
}

Topology Topology::all_to_all(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  }
  return Topology(n, std::move(edges));
}

bool Topology::adjacent(int u, int v) const {
  if (u < 0 || v < 0 || u >= n_ || v >= n_) return false;
  return (adjacency_[static_cast<std::size_t>(u)] >> v) & 1U;
}

Topology Topology::induced(const Placement& q) const {
  if (!q.valid_for(n_)) throw Error(ErrorKind::BadQubitSet, "placement outside topology");
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < q.size(); ++a) {
    for (int b = a + 1; b < q.size(); ++b) {
      if (adjacent(q.qubits[static_cast<std::size_t>(a)], q.qubits[static_cast<std::size_t>(b)])) {
        edges.emplace_back(a, b);
      }
    }
  }
  return Topology(q.size(), std::move(edges));
}

std::vector<PauliString> pauli_basis(int n) {
  if (n < 1 || n > 15) throw Error(ErrorKind::BadQubitSet, "pauli_basis order out of range");
  const std::uint64_t count = std::uint64_t{1} << (2 * n);
  std::vector<PauliString> out;
  out.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) out.push_back(PauliString::from_index(n, k));
  return out;
}

std::vector<PauliString> restricted_basis(int n, const Placement& q) {
  if (q.size() < 1 || !q.valid_for(n)) {
    throw Error(ErrorKind::BadQubitSet, "placement " + q.str() + " invalid for n=" + std::to_string(n));
  }
  const auto local = pauli_basis(q.size());
  std::vector<PauliString> out;
  out.reserve(local.size());
  for (const auto& p : local) {
    PauliString full;
    full.labels.assign(static_cast<std::size_t>(n), Pauli::I);
    for (int k = 0; k < q.size(); ++k) {
      full.labels[static_cast<std::size_t>(q.qubits[static_cast<std::size_t>(k)])] =
          p.labels[static_cast<std::size_t>(k)];
    }
    out.push_back(std::move(full));
  }
  return out;
}

std::vector<PauliMasks> restricted_masks(int n, const Placement& q) {
  if (q.size() < 1 || !q.valid_for(n)) {
    throw Error(ErrorKind::BadQubitSet, "placement " + q.str() + " invalid for n=" + std::to_string(n));
  }
  static const Complex kPowers[] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  const int m = q.size();
  const std::uint64_t count = std::uint64_t{1} << (2 * m);
  std::vector<PauliMasks> out(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    PauliMasks& pm = out[k];
    int num_y = 0;
    for (int j = 0; j < m; ++j) {
      const auto label = static_cast<Pauli>((k >> (2 * (m - 1 - j))) & 3U);
      const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q.qubits[static_cast<std::size_t>(j)]);
      if (label == Pauli::X || label == Pauli::Y) pm.x |= bit;
      if (label == Pauli::Y || label == Pauli::Z) pm.z |= bit;
      if (label == Pauli::Y) ++num_y;
    }
    pm.phase = kPowers[num_y % 4];
  }
  return out;
}

namespace {

bool induced_connected(const Topology& topo, const std::vector<int>& qubits) {
  if (qubits.size() <= 1) return true;
  std::vector<bool> seen(qubits.size(), false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t a = frontier.front();
    frontier.pop();
    for (std::size_t b = 0; b < qubits.size(); ++b) {
      if (!seen[b] && topo.adjacent(qubits[a], qubits[b])) {
        seen[b] = true;
        ++reached;
        frontier.push(b);
      }
    }
  }
  return reached == qubits.size();
}

}  // namespace

std::vector<Placement> enumerate_placements(int n, int m, const Topology& topo) {
  std::vector<Placement> out;
  if (m < 1 || m > n || topo.num_qubits() != n) return out;
  // Lexicographic combinations of {0..n-1} of size m.
  std::vector<int> combo(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) combo[static_cast<std::size_t>(k)] = k;
  while (true) {
    if (induced_connected(topo, combo)) out.push_back(Placement{combo});
    int k = m - 1;
    while (k >= 0 && combo[static_cast<std::size_t>(k)] == n - m + k) --k;
    if (k < 0) break;
    ++combo[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < m; ++j) {
      combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

ComplexMatrix local_generator(const RealVector& alpha, int m) {
  const Eigen::Index dim = Eigen::Index{1} << m;
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    if (alpha(k) == 0.0) continue;
    accumulate_pauli(h, masks_of(PauliString::from_index(m, static_cast<std::uint64_t>(k))), alpha(k));
  }
  return h;
}

ComplexMatrix extract_local(const RealVector& alpha, const Placement& q) {
  const int m = q.size();
  if (m < 1 || alpha.size() != (Eigen::Index{1} << (2 * m))) {
    throw Error(ErrorKind::LengthMismatch, "alpha must have 4^|q| entries");
  }
  return expi_herm(local_generator(alpha, m));
}

}  // namespace qfast
