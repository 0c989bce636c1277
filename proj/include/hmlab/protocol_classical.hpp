#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hmlab/common.hpp"
#include "hmlab/relations.hpp"

namespace hmlab {

// Exact evaluation enumerates all y tuples; |M_m|^k must stay below this.
inline constexpr std::uint64_t kYTupleCap = 200000;

inline std::uint32_t protocol_input_count(int m, int k) { return coloring_tuple_count(m, k); }

// A deterministic one-way protocol: Alice's partition of the input tuples
// into at most 2^budget_c message labels, plus Bob's answer table indexed by
// (label, y-tuple) in the enumerate_matchings order.
struct OneWayProtocol {
  int m = 0;
  int k = 1;
  int budget_c = 0;
  std::uint32_t n_labels = 1;
  std::vector<std::uint32_t> labels;             // size 2^{km}, input index -> label
  std::vector<std::vector<std::uint32_t>> bob;   // [label][y tuple index] -> z tuple index

  void validate() const {
    if (budget_c < 0) throw std::invalid_argument("OneWayProtocol: negative budget");
    const std::uint64_t label_cap = budget_c >= 32 ? ~std::uint64_t{0} : (std::uint64_t{1} << budget_c);
    if (static_cast<std::uint64_t>(n_labels) > label_cap)
      throw std::invalid_argument("OneWayProtocol: more labels than the budget allows");
    if (labels.size() != protocol_input_count(m, k))
      throw std::invalid_argument("OneWayProtocol: partition does not cover the input space");
    for (std::uint32_t l : labels)
      if (l >= n_labels) throw std::invalid_argument("OneWayProtocol: label out of range");
  }
};

struct SuccessReport {
  enum class Method { exact, monte_carlo };
  Method method = Method::exact;
  double success = 0.0;
  double stderr_est = 0.0;                       // monte_carlo only
  std::uint64_t numerator = 0, denominator = 0;  // exact only
  // Per-label pigeonhole quantities (exact mode): weight is the probability
  // the label is sent, label_success the success conditioned on it.
  std::vector<double> label_weight;
  std::vector<double> label_success;
  std::vector<std::uint64_t> label_inputs;
  std::vector<std::uint64_t> label_correct;
};

namespace detail {

struct InstanceTables {
  int m = 0;
  int k = 1;
  std::vector<Matching> matchings;
  std::uint64_t y_tuples = 0;

  InstanceTables(int m_in, int k_in) : m(m_in), k(k_in), matchings(enumerate_matchings(m_in)) {
    y_tuples = 1;
    for (int c = 0; c < k; ++c) {
      y_tuples *= matchings.size();
      if (y_tuples > kYTupleCap)
        throw std::invalid_argument("protocol evaluation: |Y|^k exceeds cap " + std::to_string(kYTupleCap));
    }
  }

  // Per-instance answer index: edge index * 2 + parity.
  std::uint32_t good_answer(std::uint32_t coloring_index, int matching_index, int edge) const {
    auto [i, j] = matchings[matching_index].edge(edge);
    const int parity = coloring_bit(coloring_index, i, m) ^ coloring_bit(coloring_index, j, m);
    return static_cast<std::uint32_t>(edge * 2 + parity);
  }

  bool answer_good(std::uint32_t coloring_index, int matching_index, std::uint32_t z) const {
    return good_answer(coloring_index, matching_index, static_cast<int>(z / 2)) == z;
  }

  bool tuple_correct(std::uint32_t input, std::uint64_t y_tuple, std::uint32_t z_tuple) const {
    for (int c = 0; c < k; ++c) {
      const std::uint32_t xc = input_coordinate(input, c, m, k);
      const std::uint32_t yc = tuple_digit(y_tuple, c, k, matchings.size());
      const std::uint32_t zc = tuple_digit(z_tuple, c, k, static_cast<std::uint64_t>(m));
      if (!answer_good(xc, static_cast<int>(yc), zc)) return false;
    }
    return true;
  }

  // Writes the (m/2)^k answer tuples that are correct for this input under y
  // into out (capacity kMaxGoodTuples suffices within the tuple cap).
  // Returns the count.
  int fill_good_tuples(std::uint32_t input, std::uint64_t y_tuple, std::uint32_t* out) const {
    const int half = m / 2;
    std::uint32_t per_coord[kTupleBitsCap / 2][kTupleBitsCap / 2];
    for (int c = 0; c < k; ++c) {
      const std::uint32_t xc = input_coordinate(input, c, m, k);
      const int yc = static_cast<int>(tuple_digit(y_tuple, c, k, matchings.size()));
      for (int edge = 0; edge < half; ++edge) per_coord[c][edge] = good_answer(xc, yc, edge);
    }
    int total = 1;
    for (int c = 0; c < k; ++c) total *= half;
    for (int combo = 0; combo < total; ++combo) {
      std::uint32_t z = 0;
      int rest = combo;
      for (int c = 0; c < k; ++c) {
        z = z * m + per_coord[c][rest % half];
        rest /= half;
      }
      out[combo] = z;
    }
    return total;
  }
};

// (m/2)^k never exceeds 16 while k*m <= kTupleBitsCap.
inline constexpr int kMaxGoodTuples = 16;

}  // namespace detail

// Fills Bob's table with the answer maximizing the number of consistent
// inputs in each (label, y) cell, ties to the smallest answer index, and
// returns the exact optimum this partition can reach.
inline SuccessReport optimal_bob(OneWayProtocol& p) {
  p.validate();
  const std::uint32_t inputs = protocol_input_count(p.m, p.k);
  const detail::InstanceTables t(p.m, p.k);
  const std::uint32_t z_tuples = answer_tuple_count(p.m, p.k);

  p.bob.assign(p.n_labels, std::vector<std::uint32_t>(t.y_tuples, 0));
  std::uint64_t num = 0;
  std::vector<std::uint64_t> cell(static_cast<std::size_t>(p.n_labels) * z_tuples);
  std::uint32_t goods[detail::kMaxGoodTuples];
  for (std::uint64_t y = 0; y < t.y_tuples; ++y) {
    std::fill(cell.begin(), cell.end(), 0);
    for (std::uint32_t x = 0; x < inputs; ++x) {
      const int n_good = t.fill_good_tuples(x, y, goods);
      const std::size_t base = static_cast<std::size_t>(p.labels[x]) * z_tuples;
      for (int g = 0; g < n_good; ++g) ++cell[base + goods[g]];
    }
    for (std::uint32_t label = 0; label < p.n_labels; ++label) {
      const std::size_t base = static_cast<std::size_t>(label) * z_tuples;
      std::uint64_t best = 0;
      std::uint32_t best_z = 0;
      for (std::uint32_t z = 0; z < z_tuples; ++z)
        if (cell[base + z] > best) {
          best = cell[base + z];
          best_z = z;
        }
      p.bob[label][y] = best_z;
      num += best;
    }
  }

  SuccessReport rep;
  rep.method = SuccessReport::Method::exact;
  rep.numerator = num;
  rep.denominator = static_cast<std::uint64_t>(inputs) * t.y_tuples;
  rep.success = static_cast<double>(num) / static_cast<double>(rep.denominator);
  return rep;
}

// Exact evaluation sums over every (x, y); Monte Carlo samples them.
inline SuccessReport evaluate_success(const OneWayProtocol& p, SuccessReport::Method mode, long long runs,
                                      std::mt19937_64* rng) {
  p.validate();
  const std::uint32_t inputs = protocol_input_count(p.m, p.k);
  const detail::InstanceTables t(p.m, p.k);
  if (p.bob.size() != p.n_labels)
    throw std::invalid_argument("evaluate_success: Bob table missing (run optimal_bob first)");
  for (const auto& row : p.bob)
    if (row.size() != t.y_tuples) throw std::invalid_argument("evaluate_success: Bob table y-dimension mismatch");
  SuccessReport rep;
  rep.method = mode;

  if (mode == SuccessReport::Method::exact) {
    rep.label_inputs.assign(p.n_labels, 0);
    rep.label_correct.assign(p.n_labels, 0);
    for (std::uint32_t x = 0; x < inputs; ++x) {
      const std::uint32_t label = p.labels[x];
      ++rep.label_inputs[label];
      for (std::uint64_t y = 0; y < t.y_tuples; ++y)
        if (t.tuple_correct(x, y, p.bob[label][y])) ++rep.label_correct[label];
    }
    rep.numerator = 0;
    for (std::uint32_t label = 0; label < p.n_labels; ++label) rep.numerator += rep.label_correct[label];
    rep.denominator = static_cast<std::uint64_t>(inputs) * t.y_tuples;
    rep.success = static_cast<double>(rep.numerator) / static_cast<double>(rep.denominator);
    rep.label_weight.assign(p.n_labels, 0.0);
    rep.label_success.assign(p.n_labels, 0.0);
    for (std::uint32_t label = 0; label < p.n_labels; ++label) {
      rep.label_weight[label] = static_cast<double>(rep.label_inputs[label]) / inputs;
      if (rep.label_inputs[label] > 0)
        rep.label_success[label] = static_cast<double>(rep.label_correct[label]) /
                                   (static_cast<double>(rep.label_inputs[label]) * t.y_tuples);
    }
    return rep;
  }

  if (runs < 1) throw std::invalid_argument("evaluate_success: monte_carlo needs runs >= 1");
  if (rng == nullptr) throw std::invalid_argument("evaluate_success: monte_carlo needs an rng");
  long long hits = 0;
  rep.label_inputs.assign(p.n_labels, 0);
  rep.label_correct.assign(p.n_labels, 0);
  for (long long r = 0; r < runs; ++r) {
    const std::uint32_t x = static_cast<std::uint32_t>(bounded_u64(*rng, inputs));
    std::uint64_t y = 0;
    for (int c = 0; c < p.k; ++c) y = y * t.matchings.size() + bounded_u64(*rng, t.matchings.size());
    const std::uint32_t label = p.labels[x];
    ++rep.label_inputs[label];
    if (t.tuple_correct(x, y, p.bob[label][y])) {
      ++hits;
      ++rep.label_correct[label];
    }
  }
  rep.success = static_cast<double>(hits) / runs;
  rep.stderr_est = std::sqrt(rep.success * (1.0 - rep.success) / runs);
  rep.label_weight.assign(p.n_labels, 0.0);
  rep.label_success.assign(p.n_labels, 0.0);
  for (std::uint32_t label = 0; label < p.n_labels; ++label) {
    rep.label_weight[label] = static_cast<double>(rep.label_inputs[label]) / runs;
    if (rep.label_inputs[label] > 0)
      rep.label_success[label] =
          static_cast<double>(rep.label_correct[label]) / static_cast<double>(rep.label_inputs[label]);
  }
  return rep;
}

// The two pigeonhole quantities: some label must carry at least an average
// share of the weight, and some label at least the average success.
struct PigeonholeCheck {
  int used_labels = 0;
  double max_weight = 0.0;
  double max_success = 0.0;
  bool weight_ok = false;
  bool success_ok = false;
};

inline PigeonholeCheck pigeonhole_decomposition(const SuccessReport& rep) {
  PigeonholeCheck c;
  double total = rep.success;
  for (std::size_t l = 0; l < rep.label_weight.size(); ++l) {
    if (rep.label_weight[l] <= 0.0) continue;
    ++c.used_labels;
    c.max_weight = std::max(c.max_weight, rep.label_weight[l]);
    c.max_success = std::max(c.max_success, rep.label_success[l]);
  }
  c.weight_ok = c.used_labels > 0 && c.max_weight >= 0.25 / c.used_labels;
  c.success_ok = c.max_success >= (2.0 / 3.0) * total;
  return c;
}

// Exhaustive search over all partitions. Supported regimes: c = 0 (trivial
// partition), (m = 4, c = 1) full sweep of the 2^16 bipartitions, and
// c >= m where the identity partition is available and already optimal.
inline std::pair<OneWayProtocol, SuccessReport> exact_best_protocol(int m, int c, int k = 1) {
  if (k != 1) throw std::invalid_argument("exact_best_protocol: only k = 1 is enumerable");
  const std::uint32_t inputs = protocol_input_count(m, k);
  OneWayProtocol p;
  p.m = m;
  p.k = k;
  p.budget_c = c;

  if (c == 0) {
    p.n_labels = 1;
    p.labels.assign(inputs, 0);
    SuccessReport rep = optimal_bob(p);
    return {std::move(p), std::move(rep)};
  }
  if (c >= m) {
    // Bob learns x itself; any partition refining this one cannot do better.
    p.n_labels = inputs;
    p.labels.resize(inputs);
    for (std::uint32_t x = 0; x < inputs; ++x) p.labels[x] = x;
    SuccessReport rep = optimal_bob(p);
    return {std::move(p), std::move(rep)};
  }
  if (m != 4 || c != 1)
    throw std::invalid_argument(
        "exact_best_protocol: partition enumeration is only feasible for c=0, c>=m, or (m=4, c=1)");

  OneWayProtocol candidate;
  candidate.m = m;
  candidate.k = k;
  candidate.budget_c = c;
  candidate.n_labels = 2;
  candidate.labels.assign(inputs, 0);
  std::uint64_t best_num = 0;
  std::uint32_t best_assignment = 0;
  for (std::uint32_t u = 0; u < (std::uint32_t{1} << inputs); ++u) {
    for (std::uint32_t x = 0; x < inputs; ++x) candidate.labels[x] = (u >> x) & 1u;
    const SuccessReport rep = optimal_bob(candidate);
    if (rep.numerator > best_num) {
      best_num = rep.numerator;
      best_assignment = u;
    }
  }
  p.n_labels = 2;
  p.labels.resize(inputs);
  for (std::uint32_t x = 0; x < inputs; ++x) p.labels[x] = (best_assignment >> x) & 1u;
  SuccessReport rep = optimal_bob(p);
  return {std::move(p), std::move(rep)};
}

// One optimal_bob pass touches inputs * |Y|^k * (m/2)^k counters; hill
// climbing rescoring per move is only workable below this budget.
inline constexpr std::uint64_t kLocalSearchScoreOpsCap = 100'000'000;

inline std::uint64_t search_score_cost(int m, int k) {
  const detail::InstanceTables t(m, k);
  std::uint64_t per_input = 1;
  for (int c = 0; c < k; ++c) per_input *= static_cast<std::uint64_t>(m / 2);
  return static_cast<std::uint64_t>(protocol_input_count(m, k)) * t.y_tuples * per_input;
}

// Hill climbing over label assignments: move one input to another label,
// keep the move when the exact optimum does not decrease. The reported value
// is an achieved protocol's exact success, so it lower-bounds the optimum.
inline std::pair<OneWayProtocol, SuccessReport> local_search_protocol(int m, int c, int k, int iterations,
                                                                      int restarts, std::mt19937_64& rng) {
  if (search_score_cost(m, k) > kLocalSearchScoreOpsCap)
    throw std::invalid_argument("local_search_protocol: scoring cost at (m=" + std::to_string(m) +
                                ", k=" + std::to_string(k) + ") exceeds the search cap of " +
                                std::to_string(kLocalSearchScoreOpsCap) + " counter updates per move");
  if (c < 0) throw std::invalid_argument("local_search_protocol: negative budget");
  const std::uint32_t inputs = protocol_input_count(m, k);
  const std::uint32_t n_labels = (c >= 30) ? inputs : std::min<std::uint32_t>(inputs, std::uint32_t{1} << c);
  OneWayProtocol best;
  std::uint64_t best_num = 0;
  bool have_best = false;

  for (int r = 0; r < restarts; ++r) {
    OneWayProtocol cur;
    cur.m = m;
    cur.k = k;
    cur.budget_c = c;
    cur.n_labels = n_labels;
    cur.labels.resize(inputs);
    for (std::uint32_t x = 0; x < inputs; ++x) cur.labels[x] = static_cast<std::uint32_t>(bounded_u64(rng, n_labels));
    std::uint64_t cur_num = optimal_bob(cur).numerator;
    for (int it = 0; it < iterations; ++it) {
      const std::uint32_t x = static_cast<std::uint32_t>(bounded_u64(rng, inputs));
      const std::uint32_t old_label = cur.labels[x];
      std::uint32_t new_label = static_cast<std::uint32_t>(bounded_u64(rng, n_labels));
      if (new_label == old_label) continue;
      cur.labels[x] = new_label;
      const std::uint64_t moved = optimal_bob(cur).numerator;
      if (moved >= cur_num)
        cur_num = moved;
      else
        cur.labels[x] = old_label;
    }
    if (!have_best || cur_num > best_num) {
      best = cur;
      best_num = cur_num;
      have_best = true;
    }
  }
  SuccessReport rep = optimal_bob(best);
  return {std::move(best), std::move(rep)};
}

// Runs the single-instance protocol independently on each coordinate.
inline OneWayProtocol product_protocol(const OneWayProtocol& single, int k) {
  if (single.k != 1) throw std::invalid_argument("product_protocol: base protocol must have k = 1");
  if (single.bob.size() != single.n_labels || single.bob.empty())
    throw std::invalid_argument("product_protocol: base protocol needs a filled Bob table");
  if (k == 1) return single;
  const std::uint32_t inputs = protocol_input_count(single.m, k);
  const std::uint64_t y_single = single.bob.front().size();

  OneWayProtocol p;
  p.m = single.m;
  p.k = k;
  p.budget_c = k * single.budget_c;
  p.n_labels = 1;
  for (int c = 0; c < k; ++c) p.n_labels *= single.n_labels;
  p.labels.resize(inputs);
  for (std::uint32_t x = 0; x < inputs; ++x) {
    std::uint32_t label = 0;
    for (int c = 0; c < k; ++c) label = label * single.n_labels + single.labels[input_coordinate(x, c, single.m, k)];
    p.labels[x] = label;
  }
  std::uint64_t y_tuples = 1;
  for (int c = 0; c < k; ++c) y_tuples *= y_single;
  p.bob.assign(p.n_labels, std::vector<std::uint32_t>(y_tuples, 0));
  for (std::uint32_t label = 0; label < p.n_labels; ++label)
    for (std::uint64_t y = 0; y < y_tuples; ++y) {
      std::uint32_t z = 0;
      for (int c = 0; c < k; ++c) {
        const std::uint32_t lc = tuple_digit(label, c, k, single.n_labels);
        const std::uint32_t yc = tuple_digit(y, c, k, y_single);
        z = z * single.m + single.bob[lc][yc];
      }
      p.bob[label][y] = z;
    }
  return p;
}

// Text round-trip format: header, the label of every input in index order,
// then one line per (label, y-tuple) cell of Bob's table.
inline std::string serialize_protocol(const OneWayProtocol& p) {
  const detail::InstanceTables t(p.m, p.k);
  std::ostringstream out;
  out << "hm-protocol v1\n";
  out << "m=" << p.m << " k=" << p.k << " c=" << p.budget_c << " labels=" << p.n_labels << "\n";
  out << "partition";
  for (std::uint32_t l : p.labels) out << ' ' << l;
  out << "\n";
  for (std::uint32_t label = 0; label < p.n_labels; ++label)
    for (std::uint64_t y = 0; y < t.y_tuples; ++y) {
      out << "bob " << label;
      std::string ys, zs;
      for (int c = 0; c < p.k; ++c) {
        if (c) {
          ys += ';';
          zs += ';';
        }
        const std::uint32_t yc = tuple_digit(y, c, p.k, t.matchings.size());
        const std::uint32_t zc = tuple_digit(p.bob[label][y], c, p.k, static_cast<std::uint64_t>(p.m));
        ys += t.matchings[yc].to_string();
        zs += HMAnswer{static_cast<int>(zc / 2), static_cast<int>(zc % 2)}.to_string();
      }
      out << ' ' << ys << ' ' << zs << "\n";
    }
  out << "end\n";
  return out.str();
}

inline OneWayProtocol parse_protocol(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "hm-protocol v1")
    throw std::invalid_argument("parse_protocol: bad header");
  OneWayProtocol p;
  if (!std::getline(in, line)) throw std::invalid_argument("parse_protocol: missing dimensions");
  if (std::sscanf(line.c_str(), "m=%d k=%d c=%d labels=%u", &p.m, &p.k, &p.budget_c, &p.n_labels) != 4)
    throw std::invalid_argument("parse_protocol: bad dimension line");
  const std::uint32_t inputs = protocol_input_count(p.m, p.k);
  const detail::InstanceTables t(p.m, p.k);
  std::map<std::string, std::uint32_t> matching_index;
  for (std::uint32_t i = 0; i < t.matchings.size(); ++i) matching_index[t.matchings[i].to_string()] = i;

  if (!std::getline(in, line)) throw std::invalid_argument("parse_protocol: missing partition");
  {
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word != "partition") throw std::invalid_argument("parse_protocol: expected partition line");
    p.labels.reserve(inputs);
    std::uint32_t v;
    while (ls >> v) p.labels.push_back(v);
    if (p.labels.size() != inputs) throw std::invalid_argument("parse_protocol: partition entry count mismatch");
  }
  p.bob.assign(p.n_labels, std::vector<std::uint32_t>(t.y_tuples, 0));
  while (std::getline(in, line)) {
    if (line == "end") break;
    std::istringstream ls(line);
    std::string word, ys, zs;
    std::uint32_t label;
    ls >> word >> label >> ys >> zs;
    if (word != "bob") throw std::invalid_argument("parse_protocol: expected bob line");
    std::uint64_t y = 0;
    std::uint32_t z = 0;
    std::istringstream ystream(ys), zstream(zs);
    std::string part;
    while (std::getline(ystream, part, ';')) y = y * t.matchings.size() + matching_index.at(part);
    while (std::getline(zstream, part, ';')) {
      const HMAnswer a = HMAnswer::from_string(part);
      z = z * p.m + static_cast<std::uint32_t>(a.edge_index * 2 + a.parity);
    }
    p.bob.at(label).at(y) = z;
  }
  p.validate();
  return p;
}

}  // namespace hmlab
