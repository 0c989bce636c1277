#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "hmlab/common.hpp"
#include "hmlab/relations.hpp"

namespace hmlab {

inline constexpr int kDistributionBitsCap = 16;   // dense weight vectors over 2^m colorings
inline constexpr double kBiasDelta = 1.0 / 1024.0;
inline constexpr double kBiasThreshold = 2.0 / 3.0;

inline double sigma_bound(double m) { return std::sqrt(m - 1.0) / 576.0; }

// Distribution over all 2^m colorings, dense, indexed like Coloring::index().
struct ColoringDistribution {
  int m = 0;
  std::vector<double> weights;

  ColoringDistribution(int m_in, std::vector<double> w) : m(m_in), weights(std::move(w)) {
    if (!is_power_of_two(m) || m < 2) throw std::invalid_argument("ColoringDistribution: m must be a power of two >= 2");
    if (m > kDistributionBitsCap)
      throw std::invalid_argument("ColoringDistribution: m exceeds cap " + std::to_string(kDistributionBitsCap));
    if (weights.size() != (std::size_t{1} << m))
      throw std::invalid_argument("ColoringDistribution: weight vector must have length 2^m");
    double sum = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("ColoringDistribution: negative weight");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("ColoringDistribution: weights must sum to 1");
  }

  static ColoringDistribution uniform(int m) {
    return ColoringDistribution(m, std::vector<double>(std::size_t{1} << m, 1.0 / (std::size_t{1} << m)));
  }

  // Uniform over the colorings satisfying x_i = x_j for each given pair.
  static ColoringDistribution planted_pairs(int m, const std::vector<std::pair<int, int>>& pairs) {
    std::vector<double> w(std::size_t{1} << m, 0.0);
    std::size_t count = 0;
    for (std::uint32_t x = 0; x < (std::uint32_t{1} << m); ++x) {
      bool ok = true;
      for (auto [i, j] : pairs)
        if (coloring_bit(x, i, m) != coloring_bit(x, j, m)) {
          ok = false;
          break;
        }
      if (ok) {
        w[x] = 1.0;
        ++count;
      }
    }
    for (double& v : w) v /= static_cast<double>(count);
    return ColoringDistribution(m, std::move(w));
  }
};

inline double shannon_entropy(const ColoringDistribution& d) {
  double h = 0.0;
  for (double w : d.weights)
    if (w > 0.0) h -= w * std::log2(w);
  return h;
}

inline double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("binary_entropy: p must be in [0,1]");
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

// P[x_i xor x_j = 1] for every node pair, by one pass over the support.
inline std::vector<std::vector<double>> pair_parity_marginals(const ColoringDistribution& d) {
  std::vector<std::vector<double>> odd(d.m, std::vector<double>(d.m, 0.0));
  for (std::uint32_t x = 0; x < d.weights.size(); ++x) {
    const double w = d.weights[x];
    if (w == 0.0) continue;
    for (int i = 0; i < d.m; ++i)
      for (int j = i + 1; j < d.m; ++j)
        if (coloring_bit(x, i, d.m) ^ coloring_bit(x, j, d.m)) odd[i][j] += w;
  }
  return odd;
}

// Node pairs whose color parity is predictable with probability >= threshold.
struct BiasedPairSet {
  int nodes = 0;
  double threshold = kBiasThreshold;
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> likely_parities;  // the parity bit reaching the threshold
  std::vector<double> biases;        // its probability
};

inline BiasedPairSet biased_pairs(const ColoringDistribution& d, double threshold = kBiasThreshold) {
  BiasedPairSet c;
  c.nodes = d.m;
  c.threshold = threshold;
  const auto odd = pair_parity_marginals(d);
  for (int i = 0; i < d.m; ++i)
    for (int j = i + 1; j < d.m; ++j) {
      const int parity = odd[i][j] >= 0.5 ? 1 : 0;
      const double bias = parity ? odd[i][j] : 1.0 - odd[i][j];
      if (bias >= threshold) {
        c.pairs.emplace_back(i, j);
        c.likely_parities.push_back(parity);
        c.biases.push_back(bias);
      }
    }
  return c;
}

// Plain edge set wrapped as a BiasedPairSet, for the graph-only machinery.
inline BiasedPairSet pair_set_from_edges(int nodes, std::vector<std::pair<int, int>> edges) {
  BiasedPairSet c;
  c.nodes = nodes;
  c.pairs = std::move(edges);
  for (auto& e : c.pairs) {
    if (e.first > e.second) std::swap(e.first, e.second);
    if (e.first < 0 || e.second >= nodes || e.first == e.second)
      throw std::invalid_argument("pair_set_from_edges: bad edge");
  }
  return c;
}

struct PairForest {
  int nodes = 0;
  std::vector<std::pair<int, int>> edges;
};

// One spanning tree per connected component of the graph on C. The returned
// forest always satisfies |C'| >= sqrt(|C|/2): a graph with |C| edges has at
// least sqrt(2|C|) non-isolated vertices, and each component loses one.
inline PairForest spanning_forest(const BiasedPairSet& c) {
  std::vector<int> parent(c.nodes);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  PairForest f;
  f.nodes = c.nodes;
  for (auto [u, v] : c.pairs) {
    const int ru = find(u), rv = find(v);
    if (ru == rv) continue;
    parent[ru] = rv;
    f.edges.emplace_back(u, v);
  }
  if (static_cast<double>(f.edges.size()) + 1e-12 < std::sqrt(c.pairs.size() / 2.0))
    throw std::logic_error("spanning_forest: forest bound violated");
  return f;
}

// Certified lower bound on m - H(D): the forest parities are independent
// uniform bits under the uniform distribution, and each one is predictable
// with probability >= 2/3 under D.
inline double entropy_loss_bound(const PairForest& f) {
  return static_cast<double>(f.edges.size()) * (1.0 - binary_entropy(kBiasThreshold));
}

// Drawing a uniform matching and then a uniform edge index induces the
// uniform distribution over unordered node pairs; verified by counting.
inline bool rephrase_check(int m) {
  if (m > 8) throw std::invalid_argument("rephrase_check: m exceeds matching-enumeration budget (8)");
  const std::vector<Matching> matchings = enumerate_matchings(m);
  std::vector<std::vector<long long>> count(m, std::vector<long long>(m, 0));
  for (const Matching& y : matchings)
    for (int a = 0; a < y.edge_count(); ++a) {
      auto [i, j] = y.edge(a);
      ++count[i][j];
    }
  const long long expected = static_cast<long long>(matchings.size()) * (m / 2) / (static_cast<long long>(m) * (m - 1) / 2);
  if (static_cast<long long>(matchings.size()) * (m / 2) % (static_cast<long long>(m) * (m - 1) / 2) != 0) return false;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (count[i][j] != expected) return false;
  return true;
}

struct BiasImplicationReport {
  int m = 0;
  double entropy = 0.0;
  double sigma = 0.0;
  bool premise_met = false;   // H(D) >= m - sigma(m)
  double biased_mass = 0.0;   // P over uniform (y,z) of P_D[(x,y,z) in HM] >= 2/3
  double delta_over_m = 0.0;
  bool implication_ok = false;

  std::string csv_row() const {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%d,%.12g,%.12g,%d", m, entropy, sigma, premise_met ? 1 : 0,
                  biased_mass, delta_over_m, implication_ok ? 1 : 0);
    return buf;
  }
};

// High-entropy distributions must make biased (y, z) pairs rare: if
// H(D) >= m - sigma(m) then the biased mass is at most delta/m. Checked as
// an implication on the given distribution by exact enumeration.
inline BiasImplicationReport check_bias_implication(const ColoringDistribution& d) {
  if (d.m > 8) throw std::invalid_argument("check_bias_implication: m exceeds matching-enumeration budget (8)");
  BiasImplicationReport rep;
  rep.m = d.m;
  rep.entropy = shannon_entropy(d);
  rep.sigma = sigma_bound(d.m);
  rep.premise_met = rep.entropy >= d.m - rep.sigma;
  rep.delta_over_m = kBiasDelta / d.m;

  const auto odd = pair_parity_marginals(d);
  const std::vector<Matching> matchings = enumerate_matchings(d.m);
  long long biased = 0;
  long long total = 0;
  for (const Matching& y : matchings)
    for (int a = 0; a < y.edge_count(); ++a) {
      auto [i, j] = y.edge(a);
      for (int b = 0; b < 2; ++b) {
        const double p = b ? odd[i][j] : 1.0 - odd[i][j];
        if (p >= kBiasThreshold) ++biased;
        ++total;
      }
    }
  rep.biased_mass = static_cast<double>(biased) / static_cast<double>(total);
  rep.implication_ok = !rep.premise_met || rep.biased_mass <= rep.delta_over_m;
  return rep;
}

// ----- Set-evolution experiment -----

// |B_{|y,z}| maximized over z in Z^k for one y-tuple, by counting how many
// elements of B each of the m^k answer tuples keeps. Every element
// contributes to exactly (m/2)^k tuples (its per-coordinate good answers).
inline std::uint64_t max_restriction_size(int m, int k, const std::vector<std::uint32_t>& B,
                                          const std::vector<Matching>& ys) {
  const std::uint32_t z_tuples = answer_tuple_count(m, k);
  std::vector<std::uint64_t> count(z_tuples, 0);
  std::vector<std::uint32_t> goods, next;
  for (std::uint32_t x : B) {
    goods.assign(1, 0);
    for (int c = 0; c < k; ++c) {
      const std::uint32_t xc = input_coordinate(x, c, m, k);
      next.clear();
      next.reserve(goods.size() * (m / 2));
      for (std::uint32_t prefix : goods)
        for (int edge = 0; edge < m / 2; ++edge) {
          auto [i, j] = ys[c].edge(edge);
          const std::uint32_t parity =
              static_cast<std::uint32_t>(coloring_bit(xc, i, m) ^ coloring_bit(xc, j, m));
          next.push_back(prefix * m + static_cast<std::uint32_t>(edge) * 2 + parity);
        }
      goods.swap(next);
    }
    for (std::uint32_t z : goods) ++count[z];
  }
  std::uint64_t best = 0;
  for (std::uint64_t v : count) best = std::max(best, v);
  return best;
}

// Concentration event for one y-tuple: some answer tuple keeps at least a
// (2/3)^{k/log m} fraction of B. Compared in exact integer arithmetic when
// the exponent is an integer.
inline bool set_evolution_event(int m, int k, const std::vector<std::uint32_t>& B, const std::vector<Matching>& ys) {
  const std::uint64_t kept = max_restriction_size(m, k, B, ys);
  const int logm = log2_exact(m);
  if (k % logm == 0) {
    const int e = k / logm;
    std::uint64_t lhs = kept, rhs = B.size();
    for (int i = 0; i < e; ++i) {
      lhs *= 3;
      rhs *= 2;
    }
    return lhs >= rhs;
  }
  return static_cast<double>(kept) >= std::pow(2.0 / 3.0, static_cast<double>(k) / logm) * B.size();
}

struct SetEvolutionReport {
  bool exact = false;
  double probability = 0.0;
  double stderr_est = 0.0;   // Monte Carlo only
  long long trials = 0;
  double threshold = 0.0;    // (2/3)^{k/log m}
  double sigma = 0.0;
  // Trace of the adaptive coordinate selection: the entropy of each
  // coordinate under uniform x ~ B, and the coordinates with e_j >= m - sigma.
  std::vector<double> coordinate_entropies;
  std::vector<int> high_entropy_coordinates;
};

inline std::vector<double> coordinate_entropies(int m, int k, const std::vector<std::uint32_t>& B) {
  std::vector<double> out(k, 0.0);
  for (int c = 0; c < k; ++c) {
    std::vector<double> freq(std::size_t{1} << m, 0.0);
    for (std::uint32_t x : B) freq[input_coordinate(x, c, m, k)] += 1.0 / B.size();
    double h = 0.0;
    for (double f : freq)
      if (f > 0.0) h -= f * std::log2(f);
    out[c] = h;
  }
  return out;
}

enum class SetEvolutionMode { exact, monte_carlo };

// Estimates (or enumerates) the probability over y ~ U[Y^k] of the concentration
// event for the given set B of input tuples.
inline SetEvolutionReport set_evolution_experiment(int m, int k, const std::vector<std::uint32_t>& B,
                                                   SetEvolutionMode mode, long long trials, std::mt19937_64* rng) {
  if (k < 1 || m * k > kTupleBitsCap)
    throw std::invalid_argument("set_evolution_experiment: need k >= 1 and k*m <= " + std::to_string(kTupleBitsCap));
  if (B.empty()) throw std::invalid_argument("set_evolution_experiment: B must be nonempty");
  SetEvolutionReport rep;
  rep.threshold = std::pow(2.0 / 3.0, static_cast<double>(k) / log2_exact(m));
  rep.sigma = sigma_bound(m);
  rep.coordinate_entropies = coordinate_entropies(m, k, B);
  for (int c = 0; c < k; ++c)
    if (rep.coordinate_entropies[c] >= m - rep.sigma) rep.high_entropy_coordinates.push_back(c);

  if (mode == SetEvolutionMode::exact) {
    const std::vector<Matching> matchings = enumerate_matchings(m);
    std::uint64_t y_tuples = 1;
    for (int c = 0; c < k; ++c) {
      y_tuples *= matchings.size();
      if (y_tuples > 200000) throw std::invalid_argument("set_evolution_experiment: |Y|^k exceeds exact-mode cap 200000");
    }
    std::uint64_t hits = 0;
    std::vector<Matching> ys;
    for (std::uint64_t y = 0; y < y_tuples; ++y) {
      ys.clear();
      for (int c = 0; c < k; ++c) ys.push_back(matchings[tuple_digit(y, c, k, matchings.size())]);
      if (set_evolution_event(m, k, B, ys)) ++hits;
    }
    rep.exact = true;
    rep.trials = static_cast<long long>(y_tuples);
    rep.probability = static_cast<double>(hits) / static_cast<double>(y_tuples);
    return rep;
  }

  if (trials < 1) throw std::invalid_argument("set_evolution_experiment: monte_carlo needs trials >= 1");
  if (rng == nullptr) throw std::invalid_argument("set_evolution_experiment: monte_carlo needs an rng");
  long long hits = 0;
  std::vector<Matching> ys;
  for (long long t = 0; t < trials; ++t) {
    ys.clear();
    for (int c = 0; c < k; ++c) ys.push_back(random_matching(m, *rng));
    if (set_evolution_event(m, k, B, ys)) ++hits;
  }
  rep.exact = false;
  rep.trials = trials;
  rep.probability = static_cast<double>(hits) / trials;
  rep.stderr_est = std::sqrt(rep.probability * (1.0 - rep.probability) / trials);
  return rep;
}

// ----- Parameter premise of the direct-product argument -----

// The argument asks for log m <= sigma(m) <= m and
// log(1/delta) >= 4 + 6 log|Z_m| / log m. For HM, |Z_m| = m, so the delta
// condition holds with equality for every m; the sigma condition is what
// needs m to be large.
struct DirectProductPremise {
  long long m = 0;
  double sigma = 0.0;
  bool sigma_lower_ok = false;  // sigma(m) >= log m
  bool sigma_upper_ok = false;  // sigma(m) <= m
  bool delta_ok = false;

  bool holds() const { return sigma_lower_ok && sigma_upper_ok && delta_ok; }
};

inline DirectProductPremise direct_product_premise(long long m) {
  DirectProductPremise p;
  p.m = m;
  const double logm = std::log2(static_cast<double>(m));
  p.sigma = sigma_bound(static_cast<double>(m));
  p.sigma_lower_ok = p.sigma >= logm;
  p.sigma_upper_ok = p.sigma <= static_cast<double>(m);
  p.delta_ok = std::log2(1.0 / kBiasDelta) >= 4.0 + 6.0 * logm / logm;
  return p;
}

// Smallest power of two where the full premise holds.
inline long long direct_product_premise_first_m() {
  for (long long m = 2; m <= (1LL << 50); m *= 2)
    if (direct_product_premise(m).holds()) return m;
  return -1;
}

// ----- Distribution file format -----

// "m=<int>" header, then one "bitstring weight" line per coloring. Missing
// colorings carry weight zero; weights are normalized on load.
struct LoadedDistribution {
  ColoringDistribution dist;
  double raw_sum = 0.0;
  bool renormalized = false;  // true when the raw sum was off by more than 1e-9
};

inline LoadedDistribution load_distribution(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("m=", 0) != 0)
    throw std::invalid_argument("load_distribution: expected m=<int> header");
  const int m = std::stoi(line.substr(2));
  std::vector<double> w(std::size_t{1} << m, 0.0);
  std::string bits;
  double weight;
  while (in >> bits >> weight) {
    const Coloring x = Coloring::from_string(bits);
    if (x.size() != m) throw std::invalid_argument("load_distribution: bitstring length != m");
    if (weight < 0.0) throw std::invalid_argument("load_distribution: negative weight");
    w[x.index()] += weight;
  }
  double sum = 0.0;
  for (double v : w) sum += v;
  if (sum <= 0.0) throw std::invalid_argument("load_distribution: empty distribution");
  for (double& v : w) v /= sum;
  LoadedDistribution out{ColoringDistribution(m, std::move(w)), sum, std::abs(sum - 1.0) > 1e-9};
  return out;
}

inline void save_distribution(std::ostream& out, const ColoringDistribution& d) {
  out << "m=" << d.m << "\n";
  char buf[64];
  for (std::uint32_t x = 0; x < d.weights.size(); ++x) {
    if (d.weights[x] == 0.0) continue;
    std::snprintf(buf, sizeof buf, " %.12g\n", d.weights[x]);
    out << Coloring::from_index(d.m, x).to_string() << buf;
  }
}

}  // namespace hmlab
