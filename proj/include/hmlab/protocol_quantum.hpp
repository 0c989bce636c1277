#pragma once

#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "hmlab/common.hpp"
#include "hmlab/qsim.hpp"
#include "hmlab/relations.hpp"

namespace hmlab {

// Test hook: flip_parity corrupts the referee's output bit.
enum class RefereeRule { standard, flip_parity };

inline int alice_message_bits(int m) { return log2_exact(m); }
// Bob sends (a, i, j, l): the edge index plus two endpoints and his basis
// outcome, log2(m/2) + 3*log2(m) bits. (i, j) is redundant given a and y,
// but that is the message the cost model charges for.
inline int bob_message_bits(int m) { return log2_exact(m / 2) + 3 * log2_exact(m); }
inline int epr_pairs_per_instance(int m) { return log2_exact(m); }

// The referee sees only the two messages: k from Alice, (a, i, j, l) from Bob.
inline HMAnswer referee_answer(int a, int i, int j, int k, int l, RefereeRule rule = RefereeRule::standard) {
  int bit = parity_dot(static_cast<unsigned>(k ^ l), static_cast<unsigned>(i ^ j));
  if (rule == RefereeRule::flip_parity) bit ^= 1;
  return HMAnswer{a, bit};
}

struct Transcript {
  int m = 0;
  int k = 1;
  int alice_bits = 0;
  int bob_bits = 0;
  int epr_pairs_used = 0;
  std::vector<HMAnswer> answers;
  bool correct = false;

  const HMAnswer& answer() const { return answers.front(); }

  std::string csv_row() const {
    return std::to_string(m) + ',' + std::to_string(k) + ',' + std::to_string(alice_bits) + ',' +
           std::to_string(bob_bits) + ',' + std::to_string(epr_pairs_used) + ',' + (correct ? "1" : "0");
  }
};

// One run of the SMP protocol: phase encoding, Bob's matching measurement,
// Hadamards on every qubit, computational measurement, referee output.
inline Transcript run_hm_smp(const Coloring& x, const Matching& y, const StateVector& shared, std::mt19937_64& rng,
                             RefereeRule rule = RefereeRule::standard) {
  if (x.size() != shared.m() || y.size() != shared.m())
    throw std::invalid_argument("run_hm_smp: input dimension != shared state dimension");
  const int m = shared.m();
  const StateVector encoded = apply_phase(shared, x);
  auto [a, post] = measure_matching(encoded, y, rng);
  const StateVector rotated = hadamard_all(post);
  auto [k_out, l_out] = measure_computational(rotated, rng);
  auto [i, j] = y.edge(a);
  const HMAnswer z = referee_answer(a, i, j, k_out, l_out, rule);
  Transcript t;
  t.m = m;
  t.k = 1;
  t.alice_bits = alice_message_bits(m);
  t.bob_bits = bob_message_bits(m);
  t.epr_pairs_used = epr_pairs_per_instance(m);
  t.answers = {z};
  t.correct = hm_member(x, y, z);
  return t;
}

// k parallel copies, each on fresh EPR pairs; no entanglement crosses
// coordinates. Aggregate costs are k times the single-instance values.
inline Transcript run_hmk_smp(const std::vector<Coloring>& xs, const std::vector<Matching>& ys, std::mt19937_64& rng,
                              RefereeRule rule = RefereeRule::standard) {
  if (xs.empty() || xs.size() != ys.size()) throw std::invalid_argument("run_hmk_smp: xs/ys length mismatch");
  const int m = xs.front().size();
  Transcript t;
  t.m = m;
  t.k = static_cast<int>(xs.size());
  t.correct = true;
  for (std::size_t c = 0; c < xs.size(); ++c) {
    Transcript one = run_hm_smp(xs[c], ys[c], prepare_epr(m), rng, rule);
    t.alice_bits += one.alice_bits;
    t.bob_bits += one.bob_bits;
    t.epr_pairs_used += one.epr_pairs_used;
    t.answers.push_back(one.answers.front());
    t.correct = t.correct && one.correct;
  }
  return t;
}

struct ExhaustiveReport {
  int m = 0;
  long long inputs = 0;                     // (x, y) pairs visited
  long long leaves = 0;                     // measurement branches with nonzero probability
  long long wrong_answers = 0;              // leaves whose referee answer is not in the relation
  long long amplitude_law_violations = 0;   // (k,l) where nonzero amplitude <-> parity condition fails

  bool all_correct() const { return wrong_answers == 0; }
  bool amplitude_law_holds() const { return amplitude_law_violations == 0; }
};

using ExhaustiveCallback = std::function<void(const Coloring&, const Matching&, int leaves, bool ok)>;

// Walks every (x, y), every matching branch, and every computational branch,
// checking the referee answer on each leaf and the nonzero-amplitude law
// (k xor l) . (i xor j) = x_i xor x_j on every basis pair.
inline ExhaustiveReport exactness_exhaustive(int m, RefereeRule rule = RefereeRule::standard,
                                             const ExhaustiveCallback& on_input = {}) {
  if (m != 4 && m != 8)
    throw std::invalid_argument("exactness_exhaustive: supported m are 4 and 8 (branch tree cap)");
  ExhaustiveReport rep;
  rep.m = m;
  const std::vector<Matching> matchings = enumerate_matchings(m);
  const StateVector epr = prepare_epr(m);
  for (std::uint32_t xi = 0; xi < (std::uint32_t{1} << m); ++xi) {
    const Coloring x = Coloring::from_index(m, xi);
    const StateVector encoded = apply_phase(epr, x);
    for (const Matching& y : matchings) {
      ++rep.inputs;
      int input_leaves = 0;
      bool input_ok = true;
      for (const BranchOutcome& mb : branch_matching(encoded, y)) {
        auto [i, j] = y.edge(mb.label);
        const int target = x.bit(i) ^ x.bit(j);
        const StateVector rotated = hadamard_all(mb.post);
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l) {
            const bool nonzero = std::abs(rotated.at(k, l)) > kAmplitudeEps;
            const bool condition = parity_dot(static_cast<unsigned>(k ^ l), static_cast<unsigned>(i ^ j)) == target;
            if (nonzero != condition) ++rep.amplitude_law_violations;
            if (!nonzero) continue;
            ++rep.leaves;
            ++input_leaves;
            if (!hm_member(x, y, referee_answer(mb.label, i, j, k, l, rule))) {
              ++rep.wrong_answers;
              input_ok = false;
            }
          }
      }
      if (on_input) on_input(x, y, input_leaves, input_ok);
    }
  }
  return rep;
}

// Exact success probability of one protocol run on the given shared state:
// sums branch probabilities over both measurements.
inline double hm_exact_success(const Coloring& x, const Matching& y, const StateVector& shared,
                               RefereeRule rule = RefereeRule::standard) {
  const StateVector encoded = apply_phase(shared, x);
  const int m = shared.m();
  double success = 0.0;
  for (const BranchOutcome& mb : branch_matching(encoded, y)) {
    auto [i, j] = y.edge(mb.label);
    const int target = x.bit(i) ^ x.bit(j);
    const StateVector rotated = hadamard_all(mb.post);
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) {
        const double p = std::norm(rotated.at(k, l));
        if (p <= kAmplitudeEps * kAmplitudeEps) continue;
        if (referee_answer(mb.label, i, j, k, l, rule).parity == target) success += mb.probability * p;
      }
  }
  return success;
}

// Integer form of the depolarized run for one input pair: the number of
// ((i0,j0),(k,l)) combinations that produce a correct answer, out of m^4.
// A basis component |i0>|j0> makes Bob's measurement deterministic (the edge
// holding j0) and the Hadamards spread (k,l) uniformly, so every combination
// has probability exactly 1/m^4.
inline std::uint64_t depolarized_correct_pairs(const Coloring& x, const Matching& y) {
  const int m = x.size();
  if (y.size() != m) throw std::invalid_argument("depolarized_correct_pairs: dimension mismatch");
  std::uint64_t count = 0;
  for (int j0 = 0; j0 < m; ++j0) {
    const int a = y.edge_containing(j0);
    auto [i, j] = y.edge(a);
    std::uint64_t per_component = 0;
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l)
        if (hm_member(x, y, referee_answer(a, i, j, k, l))) ++per_component;
    count += static_cast<std::uint64_t>(m) * per_component;  // i0 never affects correctness
  }
  return count;
}

struct DepolarizationReport {
  int m = 0;
  int e_qubits = 0;        // qubits replaced by the maximally mixed state, per instance
  double success_exact = 0.0;
  double lower_bound = 0.0;  // delta / 2^e with delta = 1 (the EPR protocol is exact)

  bool bound_satisfied() const { return success_exact >= lower_bound; }
};

// Full average over every coloring, every matching, every mixed-state
// component, and every measurement branch. Feasible for m in {4, 8}.
inline double depolarized_success_exact_full(int m) {
  if (m != 4 && m != 8) throw std::invalid_argument("depolarized_success_exact_full: supported m are 4 and 8");
  const std::vector<Matching> matchings = enumerate_matchings(m);
  const Ensemble mixed = maximally_mixed_ensemble(m);
  double total = 0.0;
  for (std::uint32_t xi = 0; xi < (std::uint32_t{1} << m); ++xi) {
    const Coloring x = Coloring::from_index(m, xi);
    for (const Matching& y : matchings) {
      double s = 0.0;
      for (const auto& [w, component] : mixed.components()) s += w * hm_exact_success(x, y, component);
      total += s;
    }
  }
  return total / (static_cast<double>(std::uint32_t{1} << m) * matchings.size());
}

// Same expectation, collapsed through two exact reductions that make m = 16
// feasible: a uniform matching pairs j0 with each other node equally often
// ((m-3)!! of (m-1)!! matchings), and the summand depends on the coloring
// only through the measured edge's parity, which is 0 or 1 for exactly half
// of all colorings. Each reduced term still runs the full branch pipeline.
inline double depolarized_success_exact_reduced(int m) {
  double total = 0.0;
  for (int j0 = 0; j0 < m; ++j0) {
    for (int partner = 0; partner < m; ++partner) {
      if (partner == j0) continue;
      // Any matching containing {j0, partner}; remaining nodes paired in order.
      std::vector<std::pair<int, int>> edges{{j0, partner}};
      std::vector<int> rest;
      for (int v = 0; v < m; ++v)
        if (v != j0 && v != partner) rest.push_back(v);
      for (std::size_t r = 0; r < rest.size(); r += 2) edges.emplace_back(rest[r], rest[r + 1]);
      const Matching y(m, std::move(edges));
      for (int target = 0; target < 2; ++target) {
        // Representative coloring with the measured edge's parity = target.
        std::vector<std::uint8_t> bits(m, 0);
        bits[std::min(j0, partner)] = static_cast<std::uint8_t>(target);
        const Coloring x(m, std::move(bits));
        double s = 0.0;
        for (int i0 = 0; i0 < m; ++i0) s += hm_exact_success(x, y, StateVector::basis(m, i0, j0));
        total += s / m;
      }
    }
  }
  return total / (static_cast<double>(m) * (m - 1) * 2);
}

inline DepolarizationReport depolarized_success_exact(int m) {
  if (m != 4 && m != 8 && m != 16)
    throw std::invalid_argument("depolarized_success_exact: supported m are 4, 8 and 16");
  DepolarizationReport rep;
  rep.m = m;
  rep.e_qubits = 2 * log2_exact(m);
  rep.success_exact = (m <= 8) ? depolarized_success_exact_full(m) : depolarized_success_exact_reduced(m);
  rep.lower_bound = 1.0 / (static_cast<double>(m) * m);
  return rep;
}

struct McEstimate {
  double estimate = 0.0;
  double stderr_est = 0.0;
  long long runs = 0;
};

// Monte Carlo probability that all k depolarized copies answer correctly,
// with uniform inputs and an independent maximally mixed state per copy.
inline McEstimate depolarized_success_product(int m, int k, long long runs, std::mt19937_64& rng) {
  if (k < 1) throw std::invalid_argument("depolarized_success_product: k must be >= 1");
  if (runs < 1) throw std::invalid_argument("depolarized_success_product: runs must be >= 1");
  long long hits = 0;
  for (long long r = 0; r < runs; ++r) {
    bool all_ok = true;
    for (int c = 0; c < k && all_ok; ++c) {
      const Coloring x = random_coloring(m, rng);
      const Matching y = random_matching(m, rng);
      const int i0 = static_cast<int>(bounded_u64(rng, m));
      const int j0 = static_cast<int>(bounded_u64(rng, m));
      all_ok = run_hm_smp(x, y, StateVector::basis(m, i0, j0), rng).correct;
    }
    if (all_ok) ++hits;
  }
  McEstimate e;
  e.runs = runs;
  e.estimate = static_cast<double>(hits) / runs;
  e.stderr_est = std::sqrt(e.estimate * (1.0 - e.estimate) / runs);
  return e;
}

}  // namespace hmlab
