#ifndef LSBVAR_SIMULATE_HPP
#define LSBVAR_SIMULATE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "lsbvar/distributions.hpp"
#include "lsbvar/types.hpp"

namespace lsbvar {

struct CovariateLaw {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Synthetic-data generator: subject-level autoregression matrices drawn from
// a three-point mixture, baseline covariates drawn per component, responses
// rolled forward from a zero baseline with B = 0 and Gamma = 0. The single
// time-varying covariate sqrt(t) is emitted so fitted models share the
// structure of the real-data analysis.
struct ScenarioSpec {
  int scenario = 1;  // 1, 2 or 3
  int n_subjects = 300;
  int horizon = 10;
  Eigen::Vector3d mixture_weights;
  std::vector<Eigen::Matrix3d> component_matrices;  // 3 of 3x3
  bool student_t_errors = false;                    // scenario 3
  double student_t_dof = 5.0;
  double noise_sd = 0.5;  // Sigma = 0.25 I in scenarios 1 and 2
  // Scale of the heavy-tailed errors. Matches the Gaussian scale so the
  // misspecified scenario differs in tail weight, not in noise level; at
  // unit scale the comparator prior merges the generating clusters outright.
  double student_t_scale = 0.5;
  // One law per component; scenario 2's table is a documented stand-in for
  // an unpublished design and can be replaced by the caller.
  std::vector<CovariateLaw> covariate_laws;
  // variant with the second component matrix zeroed out
  bool zero_phi2 = false;
};

inline std::vector<Eigen::Matrix3d> default_component_matrices() {
  Eigen::Matrix3d m1, m2, m3;
  m1 << 1.1, 0.0, 0.0,
        0.0, 1.1, 0.0,
        0.0, 0.0, 1.0;
  m2 << 1.1, -0.1, 0.0,
        -0.1, 1.1, -0.1,
        0.0, 0.0, 0.9;
  m3 << 0.9, -0.1, 0.0,
        -0.1, 1.1, -0.1,
        -0.1, 0.0, 1.5;
  return {m1, m2, m3};
}

inline ScenarioSpec make_scenario_spec(int scenario) {
  if (scenario < 1 || scenario > 3)
    throw ConfigError("scenario must be 1, 2 or 3");
  ScenarioSpec spec;
  spec.scenario = scenario;
  spec.component_matrices = default_component_matrices();
  const Eigen::MatrixXd eye2 = Eigen::MatrixXd::Identity(2, 2);
  if (scenario == 2) {
    spec.mixture_weights << 0.25, 0.25, 0.5;
    // stand-in table: three overlapping unit-covariance clouds with means
    // on a line
    spec.covariate_laws = {
        {Eigen::Vector2d(-2.0, 0.0), eye2},
        {Eigen::Vector2d(0.0, 0.0), eye2},
        {Eigen::Vector2d(2.0, 0.0), eye2},
    };
  } else {
    spec.mixture_weights << 0.5, 0.5, 0.0;
    spec.covariate_laws = {
        {Eigen::Vector2d(-3.0, -3.0), eye2},
        {Eigen::Vector2d(3.0, 3.0), eye2},
        {Eigen::Vector2d(0.0, 0.0), eye2},  // unreachable, weight 0
    };
    spec.student_t_errors = (scenario == 3);
  }
  return spec;
}

struct SimulatedDataset {
  LongitudinalDataset data;
  Partition true_partition;
};

inline SimulatedDataset generate_scenario(const ScenarioSpec& spec,
                                          RngStream& rng,
                                          const std::string& id_prefix = "s") {
  if (spec.covariate_laws.size() < 3) {
    if (spec.scenario == 2)
      throw ConfigError(
          "scenario 2 has no published covariate law; supply a covariate-law "
          "table (one mean/covariance pair per component) in the spec");
    throw ConfigError("generate_scenario: covariate_laws must have 3 entries");
  }
  if (std::fabs(spec.mixture_weights.sum() - 1.0) > 1e-12)
    throw ConfigError("generate_scenario: mixture weights must sum to 1");

  const int k = 3;
  std::vector<Eigen::Matrix3d> comps = spec.component_matrices;
  if (spec.zero_phi2) comps[1].setZero();

  SimulatedDataset out;
  out.data.resp_dim = k;
  out.data.tv_cov_dim = 1;
  out.data.base_cov_dim = 2;
  out.data.subjects.reserve(spec.n_subjects);
  out.true_partition.labels.reserve(spec.n_subjects);

  for (int i = 0; i < spec.n_subjects; ++i) {
    const int comp = rng.categorical(spec.mixture_weights);
    out.true_partition.labels.push_back(comp);

    Subject s;
    s.id = id_prefix + std::to_string(i + 1);
    const auto& law = spec.covariate_laws[comp];
    s.baseline = draw_mvn(law.mean, law.cov, rng);
    s.tv_covariates.resize(spec.horizon, 1);
    for (int t = 0; t < spec.horizon; ++t)
      s.tv_covariates(t, 0) = std::sqrt(static_cast<double>(t + 1));
    s.responses.resize(spec.horizon, k);
    s.observed = BoolArray::Constant(spec.horizon, k, true);
    Eigen::Vector3d prev = Eigen::Vector3d::Zero();
    for (int t = 0; t < spec.horizon; ++t) {
      Eigen::Vector3d eps;
      for (int j = 0; j < k; ++j)
        eps[j] = spec.student_t_errors
                     ? spec.student_t_scale * rng.student_t(spec.student_t_dof)
                     : spec.noise_sd * rng.normal();
      prev = comps[comp] * prev + eps;
      s.responses.row(t) = prev;
    }
    out.data.subjects.push_back(std::move(s));
  }
  return out;
}

struct OosSplit {
  SimulatedDataset train;
  SimulatedDataset test;
};

// Independent test set of the same generative process; the prediction task
// is the full trajectory given baseline covariates and the first response.
inline OosSplit make_oos_split(const ScenarioSpec& spec, RngStream& rng,
                               int test_size = 300) {
  OosSplit split;
  split.train = generate_scenario(spec, rng, "train");
  ScenarioSpec test_spec = spec;
  test_spec.n_subjects = test_size;
  split.test = generate_scenario(test_spec, rng, "test");
  return split;
}

struct InsSplit {
  SimulatedDataset truncated;       // training data, picked subjects cut at t_cut
  std::vector<int> truncated_idx;   // which subjects were truncated
  // held-out tails, rows t_cut+1..T of the original responses and covariates
  std::map<int, Eigen::MatrixXd> tails;
  std::map<int, Eigen::MatrixXd> tails_x;
  int t_cut = 0;
};

inline InsSplit make_ins_split(const SimulatedDataset& full, int n_truncate,
                               int t_cut, RngStream& rng) {
  InsSplit split;
  split.t_cut = t_cut;
  split.truncated = full;
  if (n_truncate == 0) return split;

  std::vector<int> eligible;
  for (int i = 0; i < full.data.n_subjects(); ++i)
    if (full.data.subjects[i].horizon() > t_cut) eligible.push_back(i);
  if (static_cast<int>(eligible.size()) < n_truncate)
    throw DataError("make_ins_split: only " + std::to_string(eligible.size()) +
                    " subjects have horizon > " + std::to_string(t_cut));

  // partial Fisher-Yates for a uniform subset
  for (int j = 0; j < n_truncate; ++j) {
    const int swap =
        j + static_cast<int>(rng.uniform_index(eligible.size() - j));
    std::swap(eligible[j], eligible[swap]);
  }
  split.truncated_idx.assign(eligible.begin(), eligible.begin() + n_truncate);
  std::sort(split.truncated_idx.begin(), split.truncated_idx.end());

  for (int idx : split.truncated_idx) {
    Subject& s = split.truncated.data.subjects[idx];
    const int horizon = s.horizon();
    split.tails[idx] = s.responses.bottomRows(horizon - t_cut);
    split.tails_x[idx] = s.tv_covariates.bottomRows(horizon - t_cut);
    s.responses.conservativeResize(t_cut, Eigen::NoChange);
    s.tv_covariates.conservativeResize(t_cut, Eigen::NoChange);
    s.observed.conservativeResize(t_cut, Eigen::NoChange);
  }
  return split;
}

// Synthetic baseline design emulating the scale and mix of a birth-cohort
// covariate matrix: intercept, six positive-leaning numeric columns,
// ethnicity and sex-by-ethnicity dummies with Singapore-like frequencies,
// and two interaction columns. A stand-in for unavailable real covariates;
// used by the prior-predictive cluster diagnostics.
inline Eigen::MatrixXd gusto_like_design(int n, RngStream& rng) {
  const int q = 14;
  const double numeric_mean = 1.0;
  const double numeric_sd = 0.5;
  Eigen::MatrixXd z(n, q);
  for (int i = 0; i < n; ++i) {
    z(i, 0) = 1.0;
    for (int j = 1; j <= 6; ++j)
      z(i, j) = numeric_mean + numeric_sd * rng.normal();
    const double u_eth = rng.uniform();
    const bool malay = u_eth < 0.26;
    const bool indian = !malay && u_eth < 0.44;
    const bool male = rng.uniform() < 0.5;
    z(i, 7) = malay ? 1.0 : 0.0;
    z(i, 8) = indian ? 1.0 : 0.0;
    z(i, 9) = (male && !malay && !indian) ? 1.0 : 0.0;
    z(i, 10) = (male && malay) ? 1.0 : 0.0;
    z(i, 11) = (male && indian) ? 1.0 : 0.0;
    z(i, 12) = z(i, 1) * z(i, 2);  // age x parity style interaction
    z(i, 13) = (rng.uniform() < 0.4 ? 1.0 : 0.0) * z(i, 1);  // education x age
  }
  return z;
}

}  // namespace lsbvar

#endif
