#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "graphconc/instances.hpp"
#include "graphconc/quasirandom.hpp"

using namespace graphconc;

namespace {

std::int64_t brute_c4(const Graph& g) {
  const auto a = adjacency(g).dense();
  const auto n = a.rows();
  std::int64_t count = 0;
  for (Eigen::Index v0 = 0; v0 < n; ++v0)
    for (Eigen::Index v1 = 0; v1 < n; ++v1)
      for (Eigen::Index v2 = 0; v2 < n; ++v2)
        for (Eigen::Index v3 = 0; v3 < n; ++v3) {
          if (v0 == v1 || v0 == v2 || v0 == v3 || v1 == v2 || v1 == v3 || v2 == v3) continue;
          if (a(v0, v1) > 0 && a(v1, v2) > 0 && a(v2, v3) > 0 && a(v3, v0) > 0) ++count;
        }
  return count;
}

}  // namespace

TEST(LabeledC4, SmallClosedForms) {
  EXPECT_EQ(labeled_c4_count(complete_graph(4)), 24);
  EXPECT_EQ(labeled_c4_count(cycle_graph(4)), 8);
  EXPECT_EQ(labeled_c4_count(cycle_graph(5)), 0);
  EXPECT_EQ(labeled_c4_count(path_graph(6)), 0);
  // K_n: n(n-1)(n-2)(n-3) ordered tuples, all cycles
  EXPECT_EQ(labeled_c4_count(complete_graph(7)), 7 * 6 * 5 * 4);
  EXPECT_THROW(labeled_c4_count(Graph(2, {{0, 0}})), Error);
}

TEST(LabeledC4, MatchesBruteForce) {
  Xoshiro256 rng(21);
  for (int rep = 0; rep < 40; ++rep) {
    const auto g = random_simple_graph(2 + rng() % 8, 0.2 + 0.6 * rng.uniform(), rng);
    EXPECT_EQ(labeled_c4_count(g), brute_c4(g));
  }
}

TEST(Q4, SmallValues) {
  EXPECT_DOUBLE_EQ(q4_discrepancy(complete_graph(4), 1.0), 2.0);
  EXPECT_DOUBLE_EQ(q4_discrepancy(Graph(1), 0.5), 0.25);
  EXPECT_DOUBLE_EQ(q4_discrepancy(Graph(2, {{0, 1}}), 0.5), 0.25);
  EXPECT_THROW(q4_discrepancy(Graph(21), 0.5), Error);
}

TEST(Q4, LoopsCountInsideS) {
  // S = {0}: e(S) = 1 (the loop), p/2 = 0.25.
  EXPECT_DOUBLE_EQ(q4_discrepancy(Graph(1, {{0, 0}}), 0.5), 0.75);
}

TEST(P1, CompleteGraphDeviation) {
  EXPECT_NEAR(p1_deviation(complete_graph(10), 0.3), 0.7 * 9.0, 1e-12);
  EXPECT_NEAR(p1_deviation(Graph(10), 0.3), 0.3 * 9.0, 1e-12);
}

TEST(Q3, CompleteGraphIsNearlyPseudorandomAtHighP) {
  const auto r = q3_check(complete_graph(20), 0.999, 0.06);
  EXPECT_TRUE(r.edges_ok);
  EXPECT_TRUE(r.top_eigen_ok);
  EXPECT_TRUE(r.bulk_ok);
  EXPECT_FALSE(q3_check(Graph(20), 0.5, 0.1).edges_ok);
}

TEST(P1ImpliesQ3, ForwardImplicationHoldsOnRandomGraphs) {
  Xoshiro256 rng(22);
  for (int rep = 0; rep < 60; ++rep) {
    const double p = 0.1 + 0.8 * rng.uniform();
    const auto g = random_simple_graph(5 + rng() % 40, p, rng);
    for (double slack : {0.05, 0.2, 0.5, 1.0}) EXPECT_TRUE(p1_implies_q3_check(g, p, slack));
  }
}

TEST(QuasirandomReport, FieldsAgree) {
  Xoshiro256 rng(23);
  const auto g = random_simple_graph(15, 0.5, rng);
  const auto r = quasirandom_report(g, 0.5, 0.2);
  EXPECT_EQ(r.n, 15u);
  EXPECT_EQ(r.edge_count, g.size());
  EXPECT_EQ(r.labeled_c4_count, labeled_c4_count(g));
  EXPECT_DOUBLE_EQ(r.p1_deviation, p1_deviation(g, 0.5));
  ASSERT_TRUE(r.q4_discrepancy.has_value());
  EXPECT_DOUBLE_EQ(*r.q4_discrepancy, q4_discrepancy(g, 0.5));
  EXPECT_FALSE(quasirandom_report(random_simple_graph(25, 0.5, rng), 0.5, 0.2).q4_discrepancy.has_value());
}

TEST(P1, MedianDeviationFollowsAdjacencyScaling) {
  const std::size_t n = 500;
  const double p = 0.5;
  Xoshiro256 rng(24);
  std::vector<double> dev;
  for (int rep = 0; rep < 50; ++rep) dev.push_back(p1_deviation(random_simple_graph(n, p, rng), p) / n);
  std::nth_element(dev.begin(), dev.begin() + 25, dev.end());
  const double nd = static_cast<double>(n);
  EXPECT_LE(dev[25], 4.0 * std::sqrt(p * std::log(2.0 * nd * nd) / nd));
}
