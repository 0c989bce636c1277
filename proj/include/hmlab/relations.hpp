#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hmlab/common.hpp"

namespace hmlab {

// Largest m for which an explicit set over all 2^m colorings is supported.
inline constexpr int kColoringSetCapBits = 24;
// Largest m for which perfect matchings are enumerated ((m-1)!! grows fast;
// m = 12 already gives 10395 matchings and covers every experiment here).
inline constexpr int kMatchingEnumerationCap = 12;

// Binary coloring of m nodes, m a power of two. Node i carries bit(i).
class Coloring {
 public:
  Coloring(int m, std::vector<std::uint8_t> bits) : m_(m), bits_(std::move(bits)) {
    if (!is_power_of_two(m_) || m_ < 2) throw std::invalid_argument("Coloring: m must be a power of two >= 2");
    if (static_cast<int>(bits_.size()) != m_) throw std::invalid_argument("Coloring: bit vector length != m");
    for (auto b : bits_)
      if (b > 1) throw std::invalid_argument("Coloring: bits must be 0 or 1");
  }

  static Coloring zeros(int m) { return Coloring(m, std::vector<std::uint8_t>(m, 0)); }

  // Index convention: the bit string read left to right as a binary number,
  // so ascending index order equals lexicographic order of to_string().
  static Coloring from_index(int m, std::uint32_t index) {
    if (m > 31) throw std::invalid_argument("Coloring::from_index: m > 31 not indexable");
    std::vector<std::uint8_t> bits(m);
    for (int i = 0; i < m; ++i) bits[i] = (index >> (m - 1 - i)) & 1u;
    return Coloring(m, std::move(bits));
  }

  static Coloring from_string(std::string_view s) {
    std::vector<std::uint8_t> bits;
    bits.reserve(s.size());
    for (char c : s) {
      if (c != '0' && c != '1') throw std::invalid_argument("Coloring::from_string: expected only 0/1");
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    const int m = static_cast<int>(bits.size());
    return Coloring(m, std::move(bits));
  }

  int size() const { return m_; }
  int bit(int i) const {
    if (i < 0 || i >= m_) throw std::out_of_range("Coloring::bit: node index out of range");
    return bits_[i];
  }

  std::uint32_t index() const {
    if (m_ > 31) throw std::invalid_argument("Coloring::index: m > 31 not indexable");
    std::uint32_t v = 0;
    for (int i = 0; i < m_; ++i) v = (v << 1) | bits_[i];
    return v;
  }

  std::string to_string() const {
    std::string s(m_, '0');
    for (int i = 0; i < m_; ++i) s[i] += bits_[i];
    return s;
  }

  friend bool operator==(const Coloring& a, const Coloring& b) = default;

 private:
  int m_;
  std::vector<std::uint8_t> bits_;
};

// Bit i of a coloring identified by its index (same big-endian convention).
inline int coloring_bit(std::uint32_t index, int i, int m) { return (index >> (m - 1 - i)) & 1u; }

// Perfect matching on m nodes, stored canonically: each edge as (lo, hi),
// edges sorted by lo. edge_index refers to this order.
class Matching {
 public:
  Matching(int m, std::vector<std::pair<int, int>> edges) : m_(m), edges_(std::move(edges)) {
    if (m_ < 2 || m_ % 2 != 0) throw std::invalid_argument("Matching: m must be even and >= 2");
    if (static_cast<int>(edges_.size()) != m_ / 2) throw std::invalid_argument("Matching: need exactly m/2 edges");
    std::vector<std::uint8_t> seen(m_, 0);
    for (auto& e : edges_) {
      if (e.first > e.second) std::swap(e.first, e.second);
      if (e.first < 0 || e.second >= m_ || e.first == e.second)
        throw std::invalid_argument("Matching: edge endpoints out of range");
      if (seen[e.first]++ || seen[e.second]++) throw std::invalid_argument("Matching: node covered twice");
    }
    std::sort(edges_.begin(), edges_.end());
  }

  int size() const { return m_; }
  int edge_count() const { return m_ / 2; }
  const std::pair<int, int>& edge(int a) const {
    if (a < 0 || a >= edge_count()) throw std::out_of_range("Matching::edge: edge index out of range");
    return edges_[a];
  }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  int edge_containing(int node) const {
    for (int a = 0; a < edge_count(); ++a)
      if (edges_[a].first == node || edges_[a].second == node) return a;
    throw std::out_of_range("Matching::edge_containing: node out of range");
  }

  std::string to_string() const {
    std::string s;
    for (int a = 0; a < edge_count(); ++a) {
      if (a) s += ',';
      s += std::to_string(edges_[a].first) + '-' + std::to_string(edges_[a].second);
    }
    return s;
  }

  static Matching from_string(std::string_view s) {
    std::vector<std::pair<int, int>> edges;
    std::size_t pos = 0;
    while (pos < s.size()) {
      std::size_t comma = s.find(',', pos);
      std::string_view part = s.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
      std::size_t dash = part.find('-');
      if (dash == std::string_view::npos) throw std::invalid_argument("Matching::from_string: expected i-j pairs");
      int i = std::stoi(std::string(part.substr(0, dash)));
      int j = std::stoi(std::string(part.substr(dash + 1)));
      edges.emplace_back(i, j);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    const int m = static_cast<int>(edges.size()) * 2;
    return Matching(m, std::move(edges));
  }

  friend bool operator==(const Matching& a, const Matching& b) = default;

 private:
  int m_;
  std::vector<std::pair<int, int>> edges_;
};

struct HMAnswer {
  int edge_index = 0;
  int parity = 0;

  std::string to_string() const { return std::to_string(edge_index) + ':' + std::to_string(parity); }

  static HMAnswer from_string(std::string_view s) {
    std::size_t colon = s.find(':');
    if (colon == std::string_view::npos) throw std::invalid_argument("HMAnswer::from_string: expected a:b");
    return HMAnswer{std::stoi(std::string(s.substr(0, colon))), std::stoi(std::string(s.substr(colon + 1)))};
  }

  friend bool operator==(const HMAnswer&, const HMAnswer&) = default;
  friend auto operator<=>(const HMAnswer&, const HMAnswer&) = default;
};

inline bool hm_member(const Coloring& x, const Matching& y, const HMAnswer& z) {
  if (x.size() != y.size()) throw std::invalid_argument("hm_member: coloring and matching dimension mismatch");
  if (z.edge_index < 0 || z.edge_index >= y.edge_count()) throw std::out_of_range("hm_member: edge index out of range");
  auto [i, j] = y.edge(z.edge_index);
  return z.parity == (x.bit(i) ^ x.bit(j));
}

struct ProductInstance {
  std::vector<Coloring> xs;
  std::vector<Matching> ys;
  std::vector<HMAnswer> zs;
};

inline bool hmk_member(const ProductInstance& p) {
  if (p.xs.empty() || p.xs.size() != p.ys.size() || p.xs.size() != p.zs.size())
    throw std::invalid_argument("hmk_member: coordinate lists must be nonempty and of equal length");
  for (std::size_t c = 0; c < p.xs.size(); ++c)
    if (!hm_member(p.xs[c], p.ys[c], p.zs[c])) return false;
  return true;
}

// The relation's section at (x, y): one correct parity per edge, so exactly
// m/2 answers, ordered by edge index.
inline std::vector<HMAnswer> good_answers(const Coloring& x, const Matching& y) {
  if (x.size() != y.size()) throw std::invalid_argument("good_answers: dimension mismatch");
  std::vector<HMAnswer> out;
  out.reserve(y.edge_count());
  for (int a = 0; a < y.edge_count(); ++a) {
    auto [i, j] = y.edge(a);
    out.push_back(HMAnswer{a, x.bit(i) ^ x.bit(j)});
  }
  return out;
}

namespace detail {
inline void enumerate_matchings_rec(int m, std::vector<std::uint8_t>& used, std::vector<std::pair<int, int>>& acc,
                                    std::vector<Matching>& out) {
  int lo = 0;
  while (lo < m && used[lo]) ++lo;
  if (lo == m) {
    out.emplace_back(m, acc);
    return;
  }
  used[lo] = 1;
  for (int hi = lo + 1; hi < m; ++hi) {
    if (used[hi]) continue;
    used[hi] = 1;
    acc.emplace_back(lo, hi);
    enumerate_matchings_rec(m, used, acc, out);
    acc.pop_back();
    used[hi] = 0;
  }
  used[lo] = 0;
}
}  // namespace detail

// All (m-1)!! perfect matchings, in a fixed order: the lowest unmatched node
// is paired with each larger free node in ascending order, recursively.
inline std::vector<Matching> enumerate_matchings(int m) {
  if (m < 2 || m % 2 != 0) throw std::invalid_argument("enumerate_matchings: m must be even and >= 2");
  if (m > kMatchingEnumerationCap)
    throw std::invalid_argument("enumerate_matchings: m exceeds enumeration cap " +
                                std::to_string(kMatchingEnumerationCap));
  std::vector<Matching> out;
  std::vector<std::uint8_t> used(m, 0);
  std::vector<std::pair<int, int>> acc;
  detail::enumerate_matchings_rec(m, used, acc, out);
  return out;
}

// Uniform over all perfect matchings: pair the lowest free node with a
// partner chosen uniformly among the remaining free nodes. Each matching is
// produced by exactly one choice sequence of sizes (m-1), (m-3), ...
inline Matching random_matching(int m, std::mt19937_64& rng) {
  if (m < 2 || m % 2 != 0) throw std::invalid_argument("random_matching: m must be even and >= 2");
  std::vector<int> free_nodes(m);
  for (int i = 0; i < m; ++i) free_nodes[i] = i;
  std::vector<std::pair<int, int>> edges;
  while (!free_nodes.empty()) {
    int lo = free_nodes.front();
    free_nodes.erase(free_nodes.begin());
    std::size_t pick = bounded_u64(rng, free_nodes.size());
    int hi = free_nodes[pick];
    free_nodes.erase(free_nodes.begin() + pick);
    edges.emplace_back(lo, hi);
  }
  return Matching(m, std::move(edges));
}

inline Coloring random_coloring(int m, std::mt19937_64& rng) {
  std::vector<std::uint8_t> bits(m);
  for (int i = 0; i < m; ++i) bits[i] = static_cast<std::uint8_t>(random_bit(rng));
  return Coloring(m, std::move(bits));
}

// Explicit subset of {0,1}^m, one membership bit per coloring index.
class ColoringSet {
 public:
  explicit ColoringSet(int m) : m_(m), member_(std::size_t{1} << m, false) {
    if (!is_power_of_two(m) || m < 2) throw std::invalid_argument("ColoringSet: m must be a power of two >= 2");
    if (m > kColoringSetCapBits)
      throw std::invalid_argument("ColoringSet: m exceeds set cap " + std::to_string(kColoringSetCapBits));
  }

  static ColoringSet full(int m) {
    ColoringSet s(m);
    std::fill(s.member_.begin(), s.member_.end(), true);
    s.count_ = s.member_.size();
    return s;
  }

  int m() const { return m_; }
  std::size_t universe_size() const { return member_.size(); }
  std::size_t count() const { return count_; }
  bool contains(std::uint32_t index) const { return member_[index]; }

  void insert(std::uint32_t index) {
    if (!member_[index]) {
      member_[index] = true;
      ++count_;
    }
  }

  void insert(const Coloring& x) {
    if (x.size() != m_) throw std::invalid_argument("ColoringSet::insert: dimension mismatch");
    insert(x.index());
  }

 private:
  int m_;
  std::vector<bool> member_;
  std::size_t count_ = 0;
};

// Tuples over k coordinates (inputs to the k-fold relation) are enumerable
// only while k*m stays within this many bits.
inline constexpr int kTupleBitsCap = 16;

inline std::uint32_t coloring_tuple_count(int m, int k) {
  if (k < 1 || m * k > kTupleBitsCap)
    throw std::invalid_argument("coloring_tuple_count: k*m exceeds cap " + std::to_string(kTupleBitsCap));
  return std::uint32_t{1} << (m * k);
}

// Number of answer tuples: m per instance ((m/2 edges) x (2 parities)).
inline std::uint32_t answer_tuple_count(int m, int k) {
  std::uint32_t n = 1;
  for (int c = 0; c < k; ++c) n *= static_cast<std::uint32_t>(m);
  return n;
}

// Tuple indices over k coordinates are mixed-radix with coordinate 0 most
// significant, so ascending index order is lexicographic coordinate order.
inline std::uint32_t tuple_digit(std::uint64_t tuple, int c, int k, std::uint64_t radix) {
  for (int d = 0; d < k - 1 - c; ++d) tuple /= radix;
  return static_cast<std::uint32_t>(tuple % radix);
}

// Coordinate c of a coloring-tuple index (m bits per coordinate).
inline std::uint32_t input_coordinate(std::uint32_t input, int c, int m, int k) {
  return (input >> (m * (k - 1 - c))) & ((std::uint32_t{1} << m) - 1);
}

// A_{|y,z}: the members of A for which z is a correct answer under y.
inline ColoringSet restrict_set(const ColoringSet& A, const Matching& y, const HMAnswer& z) {
  if (A.m() != y.size()) throw std::invalid_argument("restrict_set: dimension mismatch");
  if (z.edge_index < 0 || z.edge_index >= y.edge_count())
    throw std::out_of_range("restrict_set: edge index out of range");
  auto [i, j] = y.edge(z.edge_index);
  ColoringSet out(A.m());
  for (std::uint32_t idx = 0; idx < A.universe_size(); ++idx) {
    if (!A.contains(idx)) continue;
    if ((coloring_bit(idx, i, A.m()) ^ coloring_bit(idx, j, A.m())) == z.parity) out.insert(idx);
  }
  return out;
}

}  // namespace hmlab
