#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "hmlab/dpt.hpp"

using namespace hmlab;

namespace {

ColoringDistribution random_distribution(int m, std::mt19937_64& rng) {
  std::vector<double> w(std::size_t{1} << m);
  double sum = 0.0;
  for (double& v : w) {
    v = -std::log(1.0 - unit_real(rng));  // exponential, so the simplex point is uniform
    sum += v;
  }
  for (double& v : w) v /= sum;
  // renormalize once more to land within the constructor's 1e-12 budget
  sum = 0.0;
  for (double v : w) sum += v;
  for (double& v : w) v /= sum;
  return ColoringDistribution(m, std::move(w));
}

ColoringDistribution near_uniform(int m, std::mt19937_64& rng) {
  const double eps = std::pow(2.0, -20);
  std::vector<double> w(std::size_t{1} << m);
  double sum = 0.0;
  for (double& v : w) {
    v = 1.0 + eps * (unit_real(rng) - 0.5);
    sum += v;
  }
  for (double& v : w) v /= sum;
  double sum2 = 0.0;
  for (double v : w) sum2 += v;
  for (double& v : w) v /= sum2;
  return ColoringDistribution(m, std::move(w));
}

// Direct set-evolution oracle: enumerate every (y, z) pair and count the
// restriction with hm_member on real objects, no shared code with the
// implementation's counter kernel.
double set_evolution_probability_oracle(int m, int k, const std::vector<std::uint32_t>& B) {
  const std::vector<Matching> matchings = enumerate_matchings(m);
  std::uint64_t y_tuples = 1, z_tuples = 1;
  for (int c = 0; c < k; ++c) {
    y_tuples *= matchings.size();
    z_tuples *= static_cast<std::uint64_t>(m);
  }
  const double threshold = std::pow(2.0 / 3.0, static_cast<double>(k) / log2_exact(m)) * B.size();
  std::uint64_t hits = 0;
  for (std::uint64_t y = 0; y < y_tuples; ++y) {
    std::uint64_t best = 0;
    for (std::uint64_t z = 0; z < z_tuples; ++z) {
      std::uint64_t kept = 0;
      for (std::uint32_t x : B) {
        bool ok = true;
        for (int c = 0; c < k && ok; ++c) {
          const Coloring xc = Coloring::from_index(m, input_coordinate(x, c, m, k));
          const Matching& yc = matchings[tuple_digit(y, c, k, matchings.size())];
          const std::uint32_t zc = tuple_digit(z, c, k, static_cast<std::uint64_t>(m));
          ok = hm_member(xc, yc, HMAnswer{static_cast<int>(zc / 2), static_cast<int>(zc % 2)});
        }
        if (ok) ++kept;
      }
      best = std::max(best, kept);
    }
    if (static_cast<double>(best) >= threshold - 1e-9) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(y_tuples);
}

}  // namespace

TEST_CASE("entropies") {
  REQUIRE(std::abs(shannon_entropy(ColoringDistribution::uniform(4)) - 4.0) < 1e-12);

  std::vector<double> point(16, 0.0);
  point[5] = 1.0;
  REQUIRE(shannon_entropy(ColoringDistribution(4, point)) == 0.0);

  const auto planted = ColoringDistribution::planted_pairs(4, {{0, 1}});
  REQUIRE(std::abs(shannon_entropy(planted) - 3.0) < 1e-12);

  REQUIRE(binary_entropy(0.5) == 1.0);
  REQUIRE(binary_entropy(0.0) == 0.0);
  REQUIRE(binary_entropy(1.0) == 0.0);
  const double h_star = binary_entropy(2.0 / 3.0);
  REQUIRE(std::abs(h_star - (std::log2(3.0) - 2.0 / 3.0)) < 1e-12);
  REQUIRE(1.0 - h_star > std::sqrt(2.0) / 18.0);  // the slack the entropy-loss step relies on
  REQUIRE_THROWS_AS(binary_entropy(1.5), std::invalid_argument);

  SECTION("subadditivity against bit marginals") {
    std::mt19937_64 rng = seeded_rng(19);
    for (int trial = 0; trial < 100; ++trial) {
      const ColoringDistribution d = random_distribution(4, rng);
      double marginal_sum = 0.0;
      for (int i = 0; i < 4; ++i) {
        double p1 = 0.0;
        for (std::uint32_t x = 0; x < 16; ++x)
          if (coloring_bit(x, i, 4)) p1 += d.weights[x];
        marginal_sum += binary_entropy(p1);
      }
      REQUIRE(shannon_entropy(d) <= marginal_sum + 1e-12);
    }
  }
}

TEST_CASE("biased_pairs finds exactly the predictable pairs") {
  REQUIRE(biased_pairs(ColoringDistribution::uniform(4)).pairs.empty());

  const auto planted = ColoringDistribution::planted_pairs(4, {{0, 1}});
  const BiasedPairSet c = biased_pairs(planted);
  REQUIRE(c.pairs == std::vector<std::pair<int, int>>{{0, 1}});
  REQUIRE(c.likely_parities == std::vector<int>{0});
  REQUIRE(c.biases == std::vector<double>{1.0});

  const BiasedPairSet strict = biased_pairs(planted, 1.0);
  REQUIRE(strict.pairs == std::vector<std::pair<int, int>>{{0, 1}});
}

TEST_CASE("spanning forest and the entropy-loss certificate") {
  const auto single = pair_set_from_edges(4, {{0, 1}});
  REQUIRE(spanning_forest(single).edges == std::vector<std::pair<int, int>>{{0, 1}});

  const auto triangle = pair_set_from_edges(4, {{0, 1}, {1, 2}, {0, 2}});
  const PairForest tf = spanning_forest(triangle);
  REQUIRE(tf.edges.size() == 2);
  REQUIRE(static_cast<double>(tf.edges.size()) >= std::sqrt(3.0 / 2.0) - 1e-12);

  SECTION("forest bound on random graphs") {
    std::mt19937_64 rng = seeded_rng(23);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<std::pair<int, int>> edges;
      for (int i = 0; i < 12; ++i)
        for (int j = i + 1; j < 12; ++j)
          if (unit_real(rng) < 0.25) edges.emplace_back(i, j);
      if (edges.empty()) continue;
      const auto c = pair_set_from_edges(12, edges);
      const PairForest f = spanning_forest(c);
      REQUIRE(static_cast<double>(f.edges.size()) >= std::sqrt(edges.size() / 2.0) - 1e-12);
    }
  }

  SECTION("certified loss on planted families") {
    const auto planted = ColoringDistribution::planted_pairs(4, {{0, 1}});
    const PairForest f = spanning_forest(biased_pairs(planted));
    const double bound = entropy_loss_bound(f);
    REQUIRE(std::abs(bound - (1.0 - binary_entropy(2.0 / 3.0))) < 1e-12);
    REQUIRE(bound <= 4.0 - shannon_entropy(planted) + 1e-12);

    REQUIRE(entropy_loss_bound(PairForest{4, {}}) == 0.0);

    const auto five = ColoringDistribution::planted_pairs(16, {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {8, 9}});
    REQUIRE(std::abs(shannon_entropy(five) - 11.0) < 1e-9);
    const PairForest f5 = spanning_forest(biased_pairs(five));
    REQUIRE(f5.edges.size() == 5);
    REQUIRE(std::abs(entropy_loss_bound(f5) - 5.0 * (1.0 - binary_entropy(2.0 / 3.0))) < 1e-12);
    REQUIRE(entropy_loss_bound(f5) <= 16.0 - shannon_entropy(five) + 1e-9);
  }

  SECTION("certified loss on random distributions") {
    std::mt19937_64 rng = seeded_rng(29);
    for (int m : {4, 8})
      for (int trial = 0; trial < 300; ++trial) {
        const ColoringDistribution d = random_distribution(m, rng);
        const double bound = entropy_loss_bound(spanning_forest(biased_pairs(d)));
        REQUIRE(m - shannon_entropy(d) >= bound - 1e-9);
      }
  }
}

TEST_CASE("rephrase_check: uniform matching edge = uniform pair") {
  for (int m : {2, 4, 6, 8}) REQUIRE(rephrase_check(m));
  REQUIRE_THROWS_AS(rephrase_check(10), std::invalid_argument);
}

TEST_CASE("check_bias_implication") {
  const BiasImplicationReport uniform = check_bias_implication(ColoringDistribution::uniform(4));
  REQUIRE(uniform.premise_met);
  REQUIRE(uniform.biased_mass == 0.0);
  REQUIRE(uniform.implication_ok);
  REQUIRE(std::abs(uniform.sigma - std::sqrt(3.0) / 576.0) < 1e-15);

  const BiasImplicationReport planted = check_bias_implication(ColoringDistribution::planted_pairs(4, {{0, 1}}));
  REQUIRE_FALSE(planted.premise_met);  // entropy 3 < 4 - sigma(4)
  REQUIRE(planted.biased_mass > 0.0);  // the planted pair is fully biased
  REQUIRE(planted.implication_ok);     // vacuously

  std::mt19937_64 rng = seeded_rng(37);
  for (int trial = 0; trial < 1000; ++trial) {
    const BiasImplicationReport rep = check_bias_implication(near_uniform(8, rng));
    REQUIRE(rep.premise_met);
    REQUIRE(rep.implication_ok);
    REQUIRE(rep.biased_mass == 0.0);
  }

  const std::string row = uniform.csv_row();
  REQUIRE(row.substr(0, 2) == "4,");
  REQUIRE(row.find(",1") != std::string::npos);
}

TEST_CASE("set_evolution_experiment") {
  SECTION("full input set never concentrates") {
    std::vector<std::uint32_t> full(16);
    for (std::uint32_t x = 0; x < 16; ++x) full[x] = x;
    const SetEvolutionReport rep = set_evolution_experiment(4, 1, full, SetEvolutionMode::exact, 0, nullptr);
    REQUIRE(rep.exact);
    REQUIRE(rep.probability == 0.0);  // 8 kept < (2/3)^{1/2} * 16
    REQUIRE(rep.coordinate_entropies.size() == 1);
    REQUIRE(std::abs(rep.coordinate_entropies[0] - 4.0) < 1e-12);
    REQUIRE(rep.high_entropy_coordinates == std::vector<int>{0});
  }

  SECTION("singletons always survive") {
    const SetEvolutionReport rep = set_evolution_experiment(4, 2, {0x5a}, SetEvolutionMode::exact, 0, nullptr);
    REQUIRE(rep.probability == 1.0);
  }

  SECTION("exact mode equals the direct (y,z) brute force") {
    std::mt19937_64 rng = seeded_rng(43);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<std::uint32_t> B;
      for (std::uint32_t x = 0; x < 256; ++x)
        if (unit_real(rng) < 0.2) B.push_back(x);
      if (B.empty()) B.push_back(7);
      const SetEvolutionReport rep = set_evolution_experiment(4, 2, B, SetEvolutionMode::exact, 0, nullptr);
      REQUIRE(std::abs(rep.probability - set_evolution_probability_oracle(4, 2, B)) < 1e-12);
    }
  }

  SECTION("correlated sets need the full z maximization") {
    // Coordinate-wise greedy undercounts here: the big classes disagree on
    // which joint answer keeps them.
    std::vector<std::uint32_t> B;
    auto type_members = [](int p, int q) {
      std::vector<std::uint32_t> out;
      for (std::uint32_t x = 0; x < 16; ++x)
        if ((coloring_bit(x, 0, 4) ^ coloring_bit(x, 1, 4)) == p && (coloring_bit(x, 2, 4) ^ coloring_bit(x, 3, 4)) == q)
          out.push_back(x);
      return out;
    };
    const auto t00 = type_members(0, 0), t11 = type_members(1, 1);
    for (std::uint32_t a : t00)
      for (std::uint32_t b : t00) B.push_back((a << 4) | b);  // (T00, T00) block
    for (std::uint32_t a : t11)
      for (std::uint32_t b : t11) B.push_back((a << 4) | b);  // (T11, T11) block
    const SetEvolutionReport rep = set_evolution_experiment(4, 2, B, SetEvolutionMode::exact, 0, nullptr);
    REQUIRE(std::abs(rep.probability - set_evolution_probability_oracle(4, 2, B)) < 1e-12);
  }

  SECTION("Monte Carlo agrees with exact") {
    std::mt19937_64 rng = seeded_rng(47);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<std::uint32_t> B;
      for (std::uint32_t x = 0; x < 256; ++x)
        if (unit_real(rng) < 0.15) B.push_back(x);
      if (B.empty()) B.push_back(3);
      const SetEvolutionReport exact = set_evolution_experiment(4, 2, B, SetEvolutionMode::exact, 0, nullptr);
      const SetEvolutionReport mc = set_evolution_experiment(4, 2, B, SetEvolutionMode::monte_carlo, 4000, &rng);
      const double sigma = std::sqrt(std::max(exact.probability * (1.0 - exact.probability) / 4000.0, 1e-12));
      REQUIRE(std::abs(mc.probability - exact.probability) <= 3 * std::max(sigma, 1e-6));
    }
  }

  REQUIRE_THROWS_AS(set_evolution_experiment(4, 5, {0}, SetEvolutionMode::exact, 0, nullptr), std::invalid_argument);
  REQUIRE_THROWS_AS(set_evolution_experiment(4, 1, {}, SetEvolutionMode::exact, 0, nullptr), std::invalid_argument);
}

TEST_CASE("direct-product parameter premise") {
  // the delta condition is tight for every m because |Z_m| = m
  for (long long m : {4LL, 64LL, 1024LL}) REQUIRE(direct_product_premise(m).delta_ok);
  REQUIRE_FALSE(direct_product_premise(4).sigma_lower_ok);
  REQUIRE_FALSE(direct_product_premise(1 << 20).sigma_lower_ok);
  REQUIRE(direct_product_premise_first_m() == (1LL << 28));
  REQUIRE(direct_product_premise(1LL << 28).holds());
}

TEST_CASE("distribution file format") {
  const auto planted = ColoringDistribution::planted_pairs(4, {{0, 1}});
  std::ostringstream out;
  save_distribution(out, planted);
  std::istringstream in(out.str());
  const LoadedDistribution back = load_distribution(in);
  REQUIRE_FALSE(back.renormalized);
  REQUIRE(back.dist.m == 4);
  for (std::uint32_t x = 0; x < 16; ++x) REQUIRE(std::abs(back.dist.weights[x] - planted.weights[x]) < 1e-12);

  std::istringstream off("m=2\n00 1.0\n11 1.0\n");
  const LoadedDistribution renorm = load_distribution(off);
  REQUIRE(renorm.renormalized);
  REQUIRE(std::abs(renorm.raw_sum - 2.0) < 1e-12);
  REQUIRE(std::abs(renorm.dist.weights[0] - 0.5) < 1e-12);

  std::istringstream bad("weights first\n");
  REQUIRE_THROWS_AS(load_distribution(bad), std::invalid_argument);
}
