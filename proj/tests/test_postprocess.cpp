#include <catch2/catch_amalgamated.hpp>

#include "lsbvar/postprocess.hpp"
#include "support/oracles.hpp"

using namespace lsbvar;

namespace {

// hand-built store with one scalar response, controllable atoms
SampleStore scalar_store(PriorKind prior, int n_subjects = 1) {
  SampleStore store;
  store.n_subjects = n_subjects;
  store.resp_dim = 1;
  store.tv_cov_dim = 1;
  store.base_cov_dim = 1;
  store.truncation = 2;
  store.config.prior = prior;
  store.config.n_iter = 1;
  store.config.burn_in = 0;
  store.config.thin = 1;
  for (int i = 0; i < n_subjects; ++i) {
    store.horizons.push_back(2);
    store.observed_counts.push_back(2);
    store.missing_counts.push_back(0);
  }
  return store;
}

PosteriorSample scalar_sample(double phi0, double phi1, double b, double g,
                              double sigma, int alloc, PriorKind prior,
                              int n_subjects = 1) {
  PosteriorSample s;
  s.b = Eigen::VectorXd::Constant(1, b);
  s.gamma = Eigen::VectorXd::Constant(1, g);
  s.sigma = Eigen::MatrixXd::Constant(1, 1, sigma);
  s.atoms = {Eigen::MatrixXd::Constant(1, 1, phi0),
             Eigen::MatrixXd::Constant(1, 1, phi1)};
  if (prior == PriorKind::LSB) {
    s.alphas = {Eigen::VectorXd::Constant(1, 50.0)};  // all mass on atom 1
  } else {
    s.dp_sticks = Eigen::VectorXd::Ones(2);
  }
  s.allocations.assign(n_subjects, alloc);
  s.phi00 = Eigen::VectorXd::Zero(1);
  s.v0 = Eigen::MatrixXd::Identity(1, 1);
  return s;
}

}  // namespace

TEST_CASE("co-clustering matrix is symmetric with unit diagonal") {
  const std::vector<std::vector<int>> allocs = {{0, 0, 1}, {0, 1, 1}};
  const Eigen::MatrixXd c = co_clustering_matrix(allocs);
  REQUIRE(c(0, 0) == 1.0);
  REQUIRE(c(1, 1) == 1.0);
  REQUIRE(c(0, 1) == Catch::Approx(0.5));
  REQUIRE(c(1, 0) == Catch::Approx(0.5));
  REQUIRE(c(0, 2) == Catch::Approx(0.0));
  REQUIRE(c(1, 2) == Catch::Approx(0.5));
}

TEST_CASE("identical samples return that partition") {
  const std::vector<std::vector<int>> allocs(5, {0, 0, 1, 2});
  const Partition est = binder_point_estimate(allocs);
  REQUIRE(est == Partition({0, 0, 1, 2}));
}

TEST_CASE("three-item estimate matches the exhaustive lattice minimizer") {
  const std::vector<std::vector<int>> allocs = {{0, 0, 1}, {0, 0, 1}, {0, 1, 1}};
  const Eigen::MatrixXd coclust = co_clustering_matrix(allocs);

  double best_loss = 1e18;
  std::vector<int> best;
  for (const auto& cand : oracles::all_partitions(3)) {
    const double loss = oracles::binder_loss_vs_samples(cand, allocs);
    // the co-clustering form must agree with the direct average
    REQUIRE(binder_expected_loss(Partition(cand), coclust) ==
            Catch::Approx(loss).margin(1e-12));
    if (loss < best_loss - 1e-12) {
      best_loss = loss;
      best = cand;
    }
  }
  const Partition est = binder_point_estimate(allocs);
  REQUIRE(est == Partition(best));
  REQUIRE(binder_expected_loss(est, coclust) ==
          Catch::Approx(best_loss).margin(1e-12));
}

TEST_CASE("visiting the whole lattice reproduces the exhaustive minimizer") {
  RngStream rng(3);
  for (int n : {5, 8}) {
    // random co-clustering target plus the full lattice as visited samples
    std::vector<std::vector<int>> allocs;
    for (int s = 0; s < 40; ++s) {
      std::vector<int> a(n);
      for (int i = 0; i < n; ++i)
        a[i] = static_cast<int>(rng.uniform_index(3));
      allocs.push_back(a);
    }
    const auto lattice = oracles::all_partitions(n);
    std::vector<std::vector<int>> visited = allocs;
    visited.insert(visited.end(), lattice.begin(), lattice.end());
    // score against the co-clustering of `visited` (what the estimator sees)
    const Eigen::MatrixXd coclust = co_clustering_matrix(visited);
    double best_loss = 1e18;
    for (const auto& cand : lattice)
      best_loss = std::min(best_loss,
                           binder_expected_loss(Partition(cand), coclust));
    const Partition est = binder_point_estimate(visited);
    REQUIRE(binder_expected_loss(est, coclust) ==
            Catch::Approx(best_loss).margin(1e-9));
  }
}

TEST_CASE("estimate is invariant under relabeling of the input samples") {
  RngStream rng(9);
  std::vector<std::vector<int>> allocs;
  for (int s = 0; s < 25; ++s) {
    std::vector<int> a(6);
    for (int i = 0; i < 6; ++i) a[i] = static_cast<int>(rng.uniform_index(3));
    allocs.push_back(a);
  }
  const Partition base = binder_point_estimate(allocs);
  std::vector<std::vector<int>> relabeled = allocs;
  const int perm[3] = {2, 0, 1};
  for (auto& a : relabeled)
    for (auto& l : a) l = perm[l];
  REQUIRE(binder_point_estimate(relabeled) == base);
}

TEST_CASE("label permutations of one partition are equivalent minimizers") {
  const std::vector<std::vector<int>> allocs = {{0, 0, 1, 1}, {1, 1, 0, 0}};
  const Partition est = binder_point_estimate(allocs);
  REQUIRE(est == Partition({0, 0, 1, 1}));
  const Eigen::MatrixXd coclust = co_clustering_matrix(allocs);
  REQUIRE(binder_expected_loss(est, coclust) == Catch::Approx(0.0));
}

TEST_CASE("adjusted Rand index basics") {
  REQUIRE(adjusted_rand_index(Partition({0, 0, 1, 2}), Partition({5, 5, 7, 9})) ==
          Catch::Approx(1.0));
  REQUIRE(adjusted_rand_index(Partition({0, 0, 1, 1}), Partition({0, 1, 0, 1})) ==
          Catch::Approx(-0.5));
  REQUIRE_THROWS_AS(adjusted_rand_index(Partition({0, 1}), Partition({0})),
                    DataError);
}

TEST_CASE("adjusted Rand index equals brute-force pair counting for n <= 6") {
  RngStream rng(17);
  for (int rep = 0; rep < 300; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform_index(5));
    std::vector<int> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng.uniform_index(3));
      b[i] = static_cast<int>(rng.uniform_index(3));
    }
    const double lib = adjusted_rand_index(Partition(a), Partition(b));
    const double oracle = oracles::ari_pair_counting(a, b);
    REQUIRE(lib == Catch::Approx(oracle).margin(1e-12));
    // symmetry and label-permutation invariance
    REQUIRE(adjusted_rand_index(Partition(b), Partition(a)) ==
            Catch::Approx(lib).margin(1e-12));
    std::vector<int> a_perm(a);
    for (auto& l : a_perm) l = 7 - l;
    REQUIRE(adjusted_rand_index(Partition(a_perm), Partition(b)) ==
            Catch::Approx(lib).margin(1e-12));
  }
}

TEST_CASE("cluster-count posterior counts occupied components") {
  const std::vector<std::vector<int>> allocs = {{0, 0, 4}, {0, 1, 2}, {1, 1, 1}};
  const auto hist = cluster_count_posterior(allocs);
  REQUIRE(hist.at(2) == 1);
  REQUIRE(hist.at(3) == 1);
  REQUIRE(hist.at(1) == 1);
  int total = 0;
  for (const auto& [count, freq] : hist) total += freq;
  REQUIRE(total == 3);
  REQUIRE(cluster_count_posterior({{0, 1, 2, 3}}).at(4) == 1);
}

TEST_CASE("waic hand arithmetic on two samples and one point") {
  std::vector<Eigen::VectorXd> ll = {Eigen::VectorXd::Constant(1, -1.0),
                                     Eigen::VectorXd::Constant(1, -3.0)};
  const WaicReport rep = waic(ll);
  REQUIRE(rep.lppd ==
          Catch::Approx(std::log((std::exp(-1.0) + std::exp(-3.0)) / 2.0)));
  REQUIRE(rep.p_waic == Catch::Approx(2.0));
  REQUIRE(rep.waic == Catch::Approx(rep.lppd - 2.0));
  REQUIRE(rep.minus_two_waic == Catch::Approx(-2.0 * rep.waic));
}

TEST_CASE("single sample has zero penalty") {
  std::vector<Eigen::VectorXd> ll = {
      (Eigen::VectorXd(3) << -1.0, -2.0, -0.5).finished()};
  const WaicReport rep = waic(ll);
  REQUIRE(rep.p_waic == 0.0);
  REQUIRE(rep.waic == Catch::Approx(-3.5));
}

TEST_CASE("noisier records worsen the criterion") {
  RngStream rng(23);
  const int s_count = 200, points = 50;
  std::vector<Eigen::VectorXd> clean(s_count), noisy(s_count);
  for (int s = 0; s < s_count; ++s) {
    clean[s] = Eigen::VectorXd::Constant(points, -1.0);
    noisy[s] = clean[s];
    for (int p = 0; p < points; ++p) noisy[s][p] += rng.normal();
  }
  REQUIRE(waic(noisy).p_waic > waic(clean).p_waic);
  REQUIRE(waic(noisy).waic < waic(clean).waic);
}

TEST_CASE("non-finite records are rejected") {
  std::vector<Eigen::VectorXd> ll = {Eigen::VectorXd::Constant(
      1, -std::numeric_limits<double>::infinity())};
  REQUIRE_THROWS_AS(waic(ll), NumericalError);
}

TEST_CASE("single-step prediction returns the conditioning value") {
  SampleStore store = scalar_store(PriorKind::LSB);
  store.samples.push_back(scalar_sample(0.9, -0.5, 0.0, 0.0, 1.0, 0,
                                        PriorKind::LSB));
  RngStream rng(1);
  const auto draws =
      predict_oos(store, Eigen::VectorXd::Constant(1, 1.0),
                  Eigen::VectorXd::Constant(1, 2.5),
                  Eigen::MatrixXd::Zero(1, 1), rng);
  REQUIRE(draws.size() == 1);
  REQUIRE(draws[0].rows() == 1);
  REQUIRE(draws[0](0, 0) == 2.5);
}

TEST_CASE("noise-free single-sample prediction is the forward recursion") {
  SampleStore store = scalar_store(PriorKind::LSB);
  const double phi = 0.8, b = 0.3, g = -0.2, y1 = 1.5, z = 2.0;
  store.samples.push_back(scalar_sample(phi, 0.0, b, g, 1.0, 0,
                                        PriorKind::LSB));
  Eigen::MatrixXd x(4, 1);
  x << 1.0, 1.4, 1.7, 2.0;
  RngStream rng(2);
  const auto draws = predict_oos(store, Eigen::VectorXd::Constant(1, z),
                                 Eigen::VectorXd::Constant(1, y1), x, rng,
                                 /*include_noise=*/false);
  REQUIRE(draws.size() == 1);
  double expect = y1;
  for (int t = 1; t < 4; ++t) {
    expect = phi * expect + b * x(t, 0) + g * z;
    REQUIRE(draws[0](t, 0) == Catch::Approx(expect).margin(1e-12));
  }
  // the mean path of a one-sample store is that same path
  const Eigen::MatrixXd mean = mean_path(draws);
  REQUIRE(mean(3, 0) == Catch::Approx(expect).margin(1e-12));
}

TEST_CASE("in-sample prediction conditions on the sampled membership") {
  SampleStore store = scalar_store(PriorKind::LSB, /*n_subjects=*/2);
  const double phi1 = -0.4;
  store.samples.push_back(scalar_sample(0.9, phi1, 0.0, 0.0, 1.0,
                                        /*alloc=*/1, PriorKind::LSB, 2));
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 1);
  RngStream rng(3);
  const auto draws =
      predict_ins(store, 1, Eigen::VectorXd::Constant(1, 2.0), x,
                  Eigen::VectorXd::Zero(1), rng, /*include_noise=*/false);
  REQUIRE(draws.size() == 1);
  double expect = 2.0;
  for (int t = 0; t < 3; ++t) {
    expect = phi1 * expect;  // subject 1 sits in component 2
    REQUIRE(draws[0](t, 0) == Catch::Approx(expect).margin(1e-12));
  }

  // zero future steps give empty paths
  const auto empty =
      predict_ins(store, 0, Eigen::VectorXd::Constant(1, 2.0),
                  Eigen::MatrixXd::Zero(0, 1), Eigen::VectorXd::Zero(1), rng);
  REQUIRE(empty[0].rows() == 0);

  REQUIRE_THROWS_AS(
      predict_ins(store, 7, Eigen::VectorXd::Constant(1, 2.0), x,
                  Eigen::VectorXd::Zero(1), rng),
      DataError);
}

TEST_CASE("mse of the predictive mean matches a direct accumulation") {
  SampleStore store = scalar_store(PriorKind::LSB);
  store.samples.push_back(scalar_sample(0.5, 0.0, 0.0, 0.0, 1.0, 0,
                                        PriorKind::LSB));
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 1);
  RngStream rng(4);
  const auto draws =
      predict_ins(store, 0, Eigen::VectorXd::Constant(1, 2.0), x,
                  Eigen::VectorXd::Zero(1), rng, /*include_noise=*/false);
  Eigen::MatrixXd truth(2, 1);
  truth << 0.9, 0.55;
  // predictive path: 1.0, 0.5
  const double direct =
      ((1.0 - 0.9) * (1.0 - 0.9) + (0.5 - 0.55) * (0.5 - 0.55)) / 2.0;
  REQUIRE(mse_against(mean_path(draws), truth) ==
          Catch::Approx(direct).margin(1e-12));
}

TEST_CASE("predictive atom draws from a single-atom store are constant") {
  SampleStore store = scalar_store(PriorKind::LSB);
  for (int s = 0; s < 5; ++s)
    store.samples.push_back(scalar_sample(0.7, 0.7, 0.0, 0.0, 1.0, 0,
                                          PriorKind::LSB));
  RngStream rng(5);
  const auto draws =
      predictive_phi(store, Eigen::VectorXd::Constant(1, 0.3), rng);
  REQUIRE(draws.size() == 5);
  for (const auto& d : draws) REQUIRE(d(0, 0) == 0.7);

  SampleStore dp_store = scalar_store(PriorKind::DP);
  dp_store.samples.push_back(scalar_sample(0.7, 0.7, 0.0, 0.0, 1.0, 0,
                                           PriorKind::DP));
  REQUIRE_THROWS_AS(
      predictive_phi(dp_store, Eigen::VectorXd::Constant(1, 0.3), rng),
      ConfigError);
}

TEST_CASE("predictive quantiles are ordered") {
  RngStream rng(6);
  std::vector<Eigen::MatrixXd> draws;
  for (int s = 0; s < 500; ++s) {
    Eigen::MatrixXd d(3, 2);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 2; ++c) d(r, c) = rng.normal();
    draws.push_back(d);
  }
  const auto q = predictive_quantiles(draws);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 2; ++c) {
      REQUIRE(q.q05(r, c) <= q.q50(r, c));
      REQUIRE(q.q50(r, c) <= q.q95(r, c));
      REQUIRE(q.q50(r, c) == Catch::Approx(0.0).margin(0.2));
    }
}
