#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "hmlab/common.hpp"
#include "hmlab/relations.hpp"

namespace hmlab {

// Single numeric tolerance for all "exact" claims: amplitudes with magnitude
// below this are treated as zero, and norms/probability sums must close to 1
// within it.
inline constexpr double kAmplitudeEps = 1e-9;

// Register dimension cap: two 8-qubit registers give a 65536-entry vector.
inline constexpr int kStateDimensionCap = 256;

// Pure state of two log2(m)-qubit registers. amp[i*m + j] is the amplitude
// of Alice register value i and Bob register value j.
class StateVector {
 public:
  StateVector(int m, std::vector<std::complex<double>> amplitudes) : m_(m), amp_(std::move(amplitudes)) {
    if (!is_power_of_two(m_) || m_ < 2) throw std::invalid_argument("StateVector: m must be a power of two >= 2");
    if (m_ > kStateDimensionCap)
      throw std::invalid_argument("StateVector: m exceeds dimension cap " + std::to_string(kStateDimensionCap));
    if (amp_.size() != static_cast<std::size_t>(m_) * m_)
      throw std::invalid_argument("StateVector: amplitude vector must have length m^2");
    if (std::abs(norm_squared() - 1.0) > kAmplitudeEps)
      throw std::invalid_argument("StateVector: squared-amplitude sum must be 1");
  }

  static StateVector basis(int m, int i, int j) {
    std::vector<std::complex<double>> amp(static_cast<std::size_t>(m) * m, 0.0);
    amp[static_cast<std::size_t>(i) * m + j] = 1.0;
    return StateVector(m, std::move(amp));
  }

  int m() const { return m_; }
  std::complex<double> at(int i, int j) const { return amp_[static_cast<std::size_t>(i) * m_ + j]; }
  const std::vector<std::complex<double>>& amplitudes() const { return amp_; }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amp_) s += std::norm(a);
    return s;
  }

  friend bool operator==(const StateVector&, const StateVector&) = default;

 private:
  int m_;
  std::vector<std::complex<double>> amp_;
};

// Mixture of pure states; weights sum to 1.
class Ensemble {
 public:
  explicit Ensemble(std::vector<std::pair<double, StateVector>> components) : components_(std::move(components)) {
    if (components_.empty()) throw std::invalid_argument("Ensemble: empty component list");
    double total = 0.0;
    const int m = components_.front().second.m();
    for (const auto& [w, s] : components_) {
      if (w < 0.0) throw std::invalid_argument("Ensemble: negative weight");
      if (s.m() != m) throw std::invalid_argument("Ensemble: components must share m");
      total += w;
    }
    if (std::abs(total - 1.0) > kAmplitudeEps) throw std::invalid_argument("Ensemble: weights must sum to 1");
  }

  const std::vector<std::pair<double, StateVector>>& components() const { return components_; }
  int m() const { return components_.front().second.m(); }

 private:
  std::vector<std::pair<double, StateVector>> components_;
};

// One deterministic outcome of a measurement: label, its probability, and
// the renormalized post-measurement state.
struct BranchOutcome {
  int label = 0;
  double probability = 0.0;
  StateVector post;
};

// (1/sqrt(m)) sum_i |i>|i>, i.e. log2(m) shared EPR pairs.
inline StateVector prepare_epr(int m) {
  if (!is_power_of_two(m) || m < 2) throw std::invalid_argument("prepare_epr: m must be a power of two >= 2");
  std::vector<std::complex<double>> amp(static_cast<std::size_t>(m) * m, 0.0);
  const double a = 1.0 / std::sqrt(static_cast<double>(m));
  for (int i = 0; i < m; ++i) amp[static_cast<std::size_t>(i) * m + i] = a;
  return StateVector(m, std::move(amp));
}

// Alice's phase encoding: amplitude of (i, j) picks up (-1)^{x_i}.
inline StateVector apply_phase(const StateVector& s, const Coloring& x) {
  if (x.size() != s.m()) throw std::invalid_argument("apply_phase: coloring length != register dimension");
  std::vector<std::complex<double>> amp = s.amplitudes();
  const int m = s.m();
  for (int i = 0; i < m; ++i) {
    if (!x.bit(i)) continue;
    for (int j = 0; j < m; ++j) amp[static_cast<std::size_t>(i) * m + j] = -amp[static_cast<std::size_t>(i) * m + j];
  }
  return StateVector(m, std::move(amp));
}

// All outcomes of Bob's projective measurement E_{i,j} = |i><i| + |j><j|
// on his register, one projector per matching edge. Branches with zero
// probability (below kAmplitudeEps^2) are omitted; the rest sum to 1.
inline std::vector<BranchOutcome> branch_matching(const StateVector& s, const Matching& y) {
  if (y.size() != s.m()) throw std::invalid_argument("branch_matching: matching dimension != register dimension");
  const int m = s.m();
  std::vector<BranchOutcome> out;
  for (int a = 0; a < y.edge_count(); ++a) {
    auto [u, v] = y.edge(a);
    double p = 0.0;
    for (int i = 0; i < m; ++i) p += std::norm(s.at(i, u)) + std::norm(s.at(i, v));
    if (p <= kAmplitudeEps * kAmplitudeEps) continue;
    std::vector<std::complex<double>> amp(static_cast<std::size_t>(m) * m, 0.0);
    const double scale = 1.0 / std::sqrt(p);
    for (int i = 0; i < m; ++i) {
      amp[static_cast<std::size_t>(i) * m + u] = s.at(i, u) * scale;
      amp[static_cast<std::size_t>(i) * m + v] = s.at(i, v) * scale;
    }
    out.push_back(BranchOutcome{a, p, StateVector(m, std::move(amp))});
  }
  return out;
}

// Samples one edge according to the projector probabilities.
// Returns (edge index, post state).
inline std::pair<int, StateVector> measure_matching(const StateVector& s, const Matching& y, std::mt19937_64& rng) {
  std::vector<BranchOutcome> branches = branch_matching(s, y);
  if (branches.empty()) throw std::runtime_error("measure_matching: all projector probabilities are zero");
  const double r = unit_real(rng);
  double cum = 0.0;
  for (auto& b : branches) {
    cum += b.probability;
    if (r < cum) return {b.label, std::move(b.post)};
  }
  return {branches.back().label, std::move(branches.back().post)};
}

// H^{ox log m} (x) H^{ox log m}: a Hadamard on every qubit of both registers.
inline StateVector hadamard_all(const StateVector& s) {
  const int qubits = 2 * log2_exact(s.m());
  std::vector<std::complex<double>> amp = s.amplitudes();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int q = 0; q < qubits; ++q) {
    const std::size_t step = std::size_t{1} << q;
    for (std::size_t base = 0; base < amp.size(); base += 2 * step) {
      for (std::size_t off = 0; off < step; ++off) {
        const auto u = amp[base + off];
        const auto v = amp[base + off + step];
        amp[base + off] = (u + v) * inv_sqrt2;
        amp[base + off + step] = (u - v) * inv_sqrt2;
      }
    }
  }
  return StateVector(s.m(), std::move(amp));
}

// All computational-basis outcomes (k, l) with nonzero amplitude, labelled
// k*m + l. Probabilities sum to 1.
inline std::vector<BranchOutcome> branch_computational(const StateVector& s) {
  const int m = s.m();
  std::vector<BranchOutcome> out;
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l) {
      if (std::abs(s.at(k, l)) <= kAmplitudeEps) continue;
      out.push_back(BranchOutcome{k * m + l, std::norm(s.at(k, l)), StateVector::basis(m, k, l)});
    }
  return out;
}

inline std::pair<int, int> measure_computational(const StateVector& s, std::mt19937_64& rng) {
  const int m = s.m();
  const double r = unit_real(rng);
  double cum = 0.0;
  int last_k = 0, last_l = 0;
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l) {
      const double p = std::norm(s.at(k, l));
      if (p == 0.0) continue;
      cum += p;
      last_k = k;
      last_l = l;
      if (r < cum) return {k, l};
    }
  return {last_k, last_l};
}

// The maximally mixed state over 2*log2(m) qubits, realized as the uniform
// mixture of the m^2 computational basis states.
inline Ensemble maximally_mixed_ensemble(int m) {
  if (!is_power_of_two(m) || m < 2)
    throw std::invalid_argument("maximally_mixed_ensemble: m must be a power of two >= 2");
  std::vector<std::pair<double, StateVector>> comps;
  comps.reserve(static_cast<std::size_t>(m) * m);
  const double w = 1.0 / (static_cast<double>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) comps.emplace_back(w, StateVector::basis(m, i, j));
  return Ensemble(std::move(comps));
}

// Debug dump: one "i,j re im" line per basis label with magnitude above
// kAmplitudeEps, 12 significant digits.
inline std::string dump_state(const StateVector& s) {
  std::string out;
  char line[96];
  for (int i = 0; i < s.m(); ++i)
    for (int j = 0; j < s.m(); ++j) {
      const auto a = s.at(i, j);
      if (std::abs(a) <= kAmplitudeEps) continue;
      // + 0.0 folds negative zero into "0"
      std::snprintf(line, sizeof line, "%d,%d %.12g %.12g\n", i, j, a.real() + 0.0, a.imag() + 0.0);
      out += line;
    }
  return out;
}

}  // namespace hmlab
