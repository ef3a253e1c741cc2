#include <catch2/catch_amalgamated.hpp>

#include "lsbvar/distributions.hpp"
#include "lsbvar/rng.hpp"

using namespace lsbvar;

TEST_CASE("streams replay bit-identically and serialize") {
  RngStream a(123), b(123);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.raw() == b.raw());

  RngStream c(99);
  for (int i = 0; i < 17; ++i) c.normal();
  const std::string snap = c.serialize();
  RngStream d = RngStream::deserialize(snap);
  for (int i = 0; i < 1000; ++i) REQUIRE(c.raw() == d.raw());
}

TEST_CASE("derived seeds differ per stream and purpose") {
  REQUIRE(derive_seed(1, 0, 0) != derive_seed(1, 1, 0));
  REQUIRE(derive_seed(1, 0, 0) != derive_seed(1, 0, 1));
  REQUIRE(derive_seed(1, 0, 0) != derive_seed(2, 0, 0));
  REQUIRE(derive_seed(7, 3, 2) == derive_seed(7, 3, 2));
}

TEST_CASE("scalar samplers match their first two moments") {
  RngStream rng(2024);
  const int n = 200000;

  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum2 += x * x;
  }
  REQUIRE(std::fabs(sum / n) < 4.0 / std::sqrt(double(n)));
  REQUIRE(sum2 / n == Catch::Approx(1.0).margin(0.02));

  // gamma(3.7): mean 3.7, var 3.7
  sum = sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.gamma(3.7);
    sum += x;
    sum2 += x * x;
  }
  REQUIRE(sum / n == Catch::Approx(3.7).margin(0.03));
  REQUIRE(sum2 / n - (sum / n) * (sum / n) == Catch::Approx(3.7).margin(0.08));

  // gamma below 1 goes through the boost branch
  sum = 0;
  for (int i = 0; i < n; ++i) sum += rng.gamma(0.3);
  REQUIRE(sum / n == Catch::Approx(0.3).margin(0.01));

  // beta(2, 5): mean 2/7
  sum = 0;
  for (int i = 0; i < n; ++i) sum += rng.beta(2.0, 5.0);
  REQUIRE(sum / n == Catch::Approx(2.0 / 7.0).margin(0.005));

  // t(5): mean 0, var 5/3
  sum = sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.student_t(5.0);
    sum += x;
    sum2 += x * x;
  }
  REQUIRE(std::fabs(sum / n) < 0.02);
  REQUIRE(sum2 / n == Catch::Approx(5.0 / 3.0).margin(0.1));
}

TEST_CASE("multivariate normal draws in covariance and precision form agree") {
  RngStream rng(11);
  Eigen::MatrixXd cov(2, 2);
  cov << 2.0, 0.7, 0.7, 1.0;
  const Eigen::VectorXd mean = Eigen::Vector2d(1.0, -2.0);
  const Eigen::MatrixXd prec = cov.inverse();
  const Eigen::VectorXd lin = prec * mean;

  const int n = 100000;
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(2), m2 = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd s1 = Eigen::MatrixXd::Zero(2, 2),
                  s2 = Eigen::MatrixXd::Zero(2, 2);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd a = draw_mvn(mean, cov, rng);
    const Eigen::VectorXd b = draw_mvn_precision(lin, prec, rng);
    m1 += a;
    m2 += b;
    s1 += a * a.transpose();
    s2 += b * b.transpose();
  }
  m1 /= n;
  m2 /= n;
  s1 = s1 / n - m1 * m1.transpose();
  s2 = s2 / n - m2 * m2.transpose();
  REQUIRE((m1 - mean).cwiseAbs().maxCoeff() < 0.03);
  REQUIRE((m2 - mean).cwiseAbs().maxCoeff() < 0.03);
  REQUIRE((s1 - cov).cwiseAbs().maxCoeff() < 0.06);
  REQUIRE((s2 - cov).cwiseAbs().maxCoeff() < 0.06);
}

TEST_CASE("wishart and inverse-wishart match their means") {
  RngStream rng(5);
  Eigen::MatrixXd scale(2, 2);
  scale << 1.5, 0.4, 0.4, 0.8;
  const int n = 100000;

  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(2, 2);
  for (int i = 0; i < n; ++i) acc += draw_wishart(6.0, scale, rng);
  REQUIRE((acc / n - 6.0 * scale).cwiseAbs().maxCoeff() < 0.1);

  acc.setZero();
  for (int i = 0; i < n; ++i) acc += draw_inverse_wishart(9.0, scale, rng);
  REQUIRE((acc / n - scale / (9.0 - 2.0 - 1.0)).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("polya-gamma draws match the analytic mean across the c grid") {
  RngStream rng(77);
  for (double c : {0.0, 0.5, 1.0, 2.0, 5.0, 20.0, -3.0}) {
    const int n = 200000;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < n; ++i) {
      const double x = sample_polya_gamma(c, rng);
      REQUIRE(x > 0.0);
      sum += x;
      sum2 += x * x;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    REQUIRE(std::fabs(mean - polya_gamma_mean(c)) < 4.0 * se);
  }
}

TEST_CASE("polya-gamma mean limit at zero tilt") {
  REQUIRE(polya_gamma_mean(0.0) == Catch::Approx(0.25));
  REQUIRE(polya_gamma_mean(1.0) == Catch::Approx(std::tanh(0.5) / 2.0));
  REQUIRE(polya_gamma_mean(20.0) == Catch::Approx(std::tanh(10.0) / 40.0));
}
