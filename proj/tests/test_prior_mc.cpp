#include <catch2/catch_amalgamated.hpp>

#include "lsbvar/prior_mc.hpp"
#include "lsbvar/simulate.hpp"

using namespace lsbvar;

TEST_CASE("single component always yields one cluster of everything") {
  RngStream zr(1);
  const Eigen::MatrixXd z = gusto_like_design(50, zr);
  const auto draws = prior_cluster_monte_carlo(z, 1, 5.0, 200, 11);
  for (const auto& d : draws) {
    REQUIRE(d.n_clusters == 1);
    REQUIRE(d.max_fraction == 1.0);
  }
}

TEST_CASE("draws are deterministic under a fixed seed") {
  RngStream zr(2);
  const Eigen::MatrixXd z = gusto_like_design(80, zr);
  const auto a = prior_cluster_monte_carlo(z, 20, 2.0, 100, 7);
  const auto b = prior_cluster_monte_carlo(z, 20, 2.0, 100, 7);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].n_clusters == b[i].n_clusters);
    REQUIRE(a[i].max_fraction == b[i].max_fraction);
  }
}

TEST_CASE("invalid arguments are rejected") {
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(5, 2);
  REQUIRE_THROWS_AS(prior_cluster_monte_carlo(z, 0, 1.0, 10, 1), ConfigError);
  REQUIRE_THROWS_AS(prior_cluster_monte_carlo(z, 5, -1.0, 10, 1), ConfigError);
  REQUIRE_THROWS_AS(prior_cluster_monte_carlo(z, 5, 1.0, 0, 1), ConfigError);
}

TEST_CASE("median cluster count is non-increasing across the variance grid") {
  RngStream zr(3);
  const Eigen::MatrixXd z = gusto_like_design(766, zr);
  const std::vector<double> grid = {0.1, 1.0, 5.0, 25.0, 1e6};
  std::vector<double> medians;
  for (double s2 : grid) {
    const auto draws = prior_cluster_monte_carlo(
        z, 50, s2, 10000, derive_seed(5, 0, static_cast<std::uint64_t>(s2)));
    medians.push_back(median_cluster_count(draws));
  }
  int inversions = 0;
  for (std::size_t i = 1; i < medians.size(); ++i)
    if (medians[i] > medians[i - 1] + 1e-12) ++inversions;
  REQUIRE(inversions <= 1);  // one grid inversion allowed as Monte Carlo noise
}

TEST_CASE("large stick variance collapses the prior partition") {
  // the cluster count shrinks toward one and the largest cluster dominates
  RngStream zr(4);
  const Eigen::MatrixXd z = gusto_like_design(766, zr);
  const auto tight = prior_cluster_monte_carlo(z, 50, 1e6, 4000, 21);
  const auto loose = prior_cluster_monte_carlo(z, 50, 0.1, 4000, 22);
  const double m_tight = median_cluster_count(tight);
  const double m_loose = median_cluster_count(loose);
  REQUIRE(m_tight <= 5.0);
  REQUIRE(m_loose >= m_tight + 3.0);
  double f_tight = 0, f_loose = 0;
  for (const auto& d : tight) f_tight += d.max_fraction;
  for (const auto& d : loose) f_loose += d.max_fraction;
  REQUIRE(f_tight / tight.size() > f_loose / loose.size() + 0.1);
}

TEST_CASE("moderate variance keeps a handful of clusters on the cohort design") {
  RngStream zr(5);
  const Eigen::MatrixXd z = gusto_like_design(766, zr);
  const auto draws = prior_cluster_monte_carlo(z, 50, 5.0, 10000, 31);
  const double median = median_cluster_count(draws);
  REQUIRE(median >= 3.0);
  REQUIRE(median <= 9.0);
}
