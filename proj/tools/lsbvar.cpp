// Command-line front end: simulate / fit / predict / postprocess /
// prior-check / elicit / experiment.
//
// Exit codes: 0 success, 1 usage or config error, 2 data error,
// 3 sampler or numerical failure.

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <thread>

#include "lsbvar/config.hpp"
#include "lsbvar/dataset.hpp"
#include "lsbvar/elicit.hpp"
#include "lsbvar/experiment.hpp"
#include "lsbvar/gibbs.hpp"
#include "lsbvar/postprocess.hpp"
#include "lsbvar/prior_mc.hpp"
#include "lsbvar/simulate.hpp"
#include "lsbvar/store.hpp"

namespace fsys = std::filesystem;
using nlohmann::json;

namespace {

struct SimulateArgs {
  int scenario = 1;
  std::uint64_t seed = 0;
  std::string out;
  int n_subjects = 300;
  int horizon = 10;
  bool zero_phi2 = false;
  bool with_test = false;
  int test_size = 300;
  int ins_truncate = 0;
  int ins_t_cut = 5;
};

void write_truth_csv(const lsbvar::SimulatedDataset& sim,
                     const fsys::path& path) {
  std::ofstream os(path);
  os << "subject_id,cluster\n";
  for (int i = 0; i < sim.data.n_subjects(); ++i)
    os << sim.data.subjects[i].id << "," << (sim.true_partition.labels[i] + 1)
       << "\n";
}

void write_tails_csv(const lsbvar::LongitudinalDataset& truncated,
                     const lsbvar::InsSplit& split, const fsys::path& path) {
  std::ofstream os(path);
  os << "subject_id,t";
  for (int j = 0; j < truncated.resp_dim; ++j) os << ",y_" << (j + 1);
  for (int j = 0; j < truncated.tv_cov_dim; ++j) os << ",x_" << (j + 1);
  os << "\n";
  for (const auto& [idx, tail] : split.tails) {
    const auto& s = truncated.subjects[idx];
    const auto& tail_x = split.tails_x.at(idx);
    for (int r = 0; r < tail.rows(); ++r) {
      os << s.id << "," << (split.t_cut + r + 1);
      for (int j = 0; j < tail.cols(); ++j) os << "," << tail(r, j);
      for (int j = 0; j < tail_x.cols(); ++j) os << "," << tail_x(r, j);
      os << "\n";
    }
  }
}

int run_simulate(const SimulateArgs& args) {
  lsbvar::ScenarioSpec spec = lsbvar::make_scenario_spec(args.scenario);
  spec.n_subjects = args.n_subjects;
  spec.horizon = args.horizon;
  spec.zero_phi2 = args.zero_phi2;

  fsys::create_directories(args.out);
  lsbvar::RngStream rng(lsbvar::derive_seed(args.seed, 100, 0));
  lsbvar::SimulatedDataset train = lsbvar::generate_scenario(spec, rng, "train");

  if (args.ins_truncate > 0) {
    lsbvar::RngStream ins_rng(lsbvar::derive_seed(args.seed, 101, 0));
    lsbvar::InsSplit split = lsbvar::make_ins_split(
        train, args.ins_truncate, args.ins_t_cut, ins_rng);
    lsbvar::write_long_csv_file(split.truncated.data,
                                fsys::path(args.out) / "data.csv");
    write_tails_csv(split.truncated.data, split,
                    fsys::path(args.out) / "tails.csv");
    write_truth_csv(train, fsys::path(args.out) / "truth.csv");
  } else {
    lsbvar::write_long_csv_file(train.data, fsys::path(args.out) / "data.csv");
    write_truth_csv(train, fsys::path(args.out) / "truth.csv");
  }
  if (args.with_test) {
    lsbvar::ScenarioSpec test_spec = spec;
    test_spec.n_subjects = args.test_size;
    lsbvar::SimulatedDataset test =
        lsbvar::generate_scenario(test_spec, rng, "test");
    lsbvar::write_long_csv_file(test.data, fsys::path(args.out) / "test.csv");
  }

  json manifest;
  manifest["lsbvar_version"] = lsbvar::kVersion;
  manifest["command"] = "simulate";
  manifest["scenario"] = args.scenario;
  manifest["seed"] = args.seed;
  manifest["n_subjects"] = args.n_subjects;
  manifest["horizon"] = args.horizon;
  manifest["zero_phi2"] = args.zero_phi2;
  manifest["ins_truncate"] = args.ins_truncate;
  manifest["ins_t_cut"] = args.ins_t_cut;
  manifest["data_fingerprint"] =
      lsbvar::file_fingerprint(fsys::path(args.out) / "data.csv");
  std::ofstream os(fsys::path(args.out) / "run_manifest.json");
  os << manifest.dump(2) << "\n";
  std::cout << "wrote " << args.out << "/data.csv ("
            << train.data.n_subjects() << " subjects)\n";
  return 0;
}

struct FitArgs {
  std::string data;
  std::string config;
  std::string prior;  // empty: take from config
  int chains = 0;  // 0: take from config
  std::string out;
  bool resume = false;
  bool has_seed = false;
  std::uint64_t seed = 0;
};

int run_fit(const FitArgs& args) {
  const auto t0 = std::chrono::steady_clock::now();
  lsbvar::FlatConfig cfg = lsbvar::parse_flat_config_file(args.config);
  {
    std::set<std::string> allowed = lsbvar::hyperparam_config_keys();
    allowed.insert(lsbvar::sampler_config_keys().begin(),
                   lsbvar::sampler_config_keys().end());
    cfg.check_allowed(allowed);
  }

  lsbvar::ValidatedDataset loaded = lsbvar::load_dataset(args.data);
  for (const auto& drop : loaded.dropped)
    std::cerr << "dropped subject " << drop.subject_id << ": " << drop.reason
              << "\n";
  const lsbvar::LongitudinalDataset& ds = loaded.data;
  if (ds.n_subjects() == 0) throw lsbvar::DataError("no usable subjects");

  lsbvar::ModelHyperparams hp = lsbvar::hyperparams_from_config(
      cfg, ds.resp_dim, ds.tv_cov_dim, ds.base_cov_dim);
  lsbvar::SamplerConfig sc = lsbvar::sampler_config_from_config(cfg);
  if (!args.prior.empty()) {
    if (args.prior == "lsb")
      sc.prior = lsbvar::PriorKind::LSB;
    else if (args.prior == "dp")
      sc.prior = lsbvar::PriorKind::DP;
    else
      throw lsbvar::ConfigError("--prior must be lsb or dp");
  }
  if (args.has_seed) sc.seed = args.seed;
  const int chains =
      args.chains > 0 ? args.chains : static_cast<int>(cfg.scalar("chains", 1));
  const int checkpoint_every =
      static_cast<int>(cfg.scalar("checkpoint_every", 1000));

  fsys::create_directories(args.out);

  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(chains);
  for (int c = 0; c < chains; ++c) {
    workers.emplace_back([&, c]() {
      try {
        lsbvar::SamplerConfig chain_cfg = sc;
        chain_cfg.seed = lsbvar::derive_seed(sc.seed, c, 0);
        char name[32];
        std::snprintf(name, sizeof(name), "chain_%02d", c);
        lsbvar::run_chain_to_dir(ds, hp, chain_cfg,
                                 fsys::path(args.out) / name, checkpoint_every,
                                 args.resume);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  json manifest;
  manifest["lsbvar_version"] = lsbvar::kVersion;
  manifest["command"] = "fit";
  manifest["data"] = args.data;
  manifest["data_fingerprint"] = lsbvar::file_fingerprint(args.data);
  manifest["config_snapshot"] = cfg.source_text;
  manifest["prior"] = lsbvar::prior_kind_name(sc.prior);
  manifest["seed"] = sc.seed;
  manifest["chains"] = chains;
  manifest["n_iter"] = sc.n_iter;
  manifest["burn_in"] = sc.burn_in;
  manifest["thin"] = sc.thin;
  manifest["wall_clock_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - t0)
          .count();
  std::ofstream os(fsys::path(args.out) / "run_manifest.json");
  os << manifest.dump(2) << "\n";
  std::cout << "fit complete: " << chains << " chain(s), "
            << sc.n_samples() << " samples each, at " << args.out << "\n";
  return 0;
}

struct PredictArgs {
  std::string run;
  std::string mode;  // oos | ins
  std::string data;  // oos: test csv; ins: training data override
  std::string tails;
  std::string subject;  // quantile dump target; default first
  int chain = 0;
  std::uint64_t seed = 0;
  std::string out;  // default <run>/predict_<mode>
};

fsys::path chain_dir(const std::string& run, int chain) {
  char name[32];
  std::snprintf(name, sizeof(name), "chain_%02d", chain);
  return fsys::path(run) / name;
}

int run_predict_oos(const PredictArgs& args) {
  const lsbvar::SampleStore store =
      lsbvar::load_store(chain_dir(args.run, args.chain));
  lsbvar::ValidatedDataset test = lsbvar::load_dataset(args.data);
  const fsys::path out =
      args.out.empty() ? fsys::path(args.run) / "predict_oos" : fsys::path(args.out);
  fsys::create_directories(out);

  lsbvar::RngStream rng(lsbvar::derive_seed(args.seed, 300, 0));
  std::ofstream mse_csv(out / "oos_mse.csv");
  mse_csv << "subject_id,mse\n";
  std::vector<double> per_subject;
  for (const auto& s : test.data.subjects) {
    const auto mean_draws =
        lsbvar::predict_oos(store, s.baseline, s.responses.row(0),
                            s.tv_covariates, rng, /*include_noise=*/false);
    const Eigen::MatrixXd mean = lsbvar::mean_path(mean_draws);
    const double mse = lsbvar::mse_against(
        mean.bottomRows(mean.rows() - 1),
        s.responses.bottomRows(s.horizon() - 1));
    per_subject.push_back(mse);
    mse_csv << s.id << "," << mse << "\n";
  }
  const auto summary = lsbvar::summarize_mse(per_subject);

  // credible bands for one subject
  const lsbvar::Subject* target = nullptr;
  for (const auto& s : test.data.subjects)
    if (args.subject.empty() || s.id == args.subject) {
      target = &s;
      break;
    }
  if (target == nullptr)
    throw lsbvar::DataError("subject '" + args.subject + "' not in test data");
  const auto draws =
      lsbvar::predict_oos(store, target->baseline, target->responses.row(0),
                          target->tv_covariates, rng, /*include_noise=*/true);
  lsbvar::write_quantiles_csv(lsbvar::predictive_quantiles(draws), 1,
                              out / ("oos_quantiles_" + target->id + ".csv"));

  json rep;
  rep["mode"] = "oos";
  rep["n_subjects"] = per_subject.size();
  rep["mse_mean"] = summary.mean;
  rep["mse_sd"] = summary.sd;
  std::ofstream os(out / "oos_summary.json");
  os << rep.dump(2) << "\n";
  std::cout << "oos mse " << summary.mean << " +/- " << summary.sd << "\n";
  return 0;
}

int run_predict_ins(const PredictArgs& args) {
  const lsbvar::SampleStore store =
      lsbvar::load_store(chain_dir(args.run, args.chain));

  std::string data_path = args.data;
  if (data_path.empty()) {
    std::ifstream mf(fsys::path(args.run) / "run_manifest.json");
    if (mf) {
      json manifest;
      mf >> manifest;
      if (manifest.contains("data")) data_path = manifest["data"];
    }
  }
  if (data_path.empty())
    throw lsbvar::ConfigError(
        "predict --mode ins: supply --data (training csv)");
  lsbvar::ValidatedDataset train = lsbvar::load_dataset(data_path);
  if (args.tails.empty())
    throw lsbvar::ConfigError("predict --mode ins: supply --tails csv");
  lsbvar::LongTable tails_table = lsbvar::read_long_csv_file(args.tails);

  // group tail rows per subject, sorted by t
  std::map<std::string, std::vector<const lsbvar::LongRecord*>> tail_groups;
  for (const auto& rec : tails_table.records)
    tail_groups[rec.subject_id].push_back(&rec);

  std::map<std::string, int> index_of;
  for (int i = 0; i < train.data.n_subjects(); ++i)
    index_of[train.data.subjects[i].id] = i;

  const fsys::path out =
      args.out.empty() ? fsys::path(args.run) / "predict_ins" : fsys::path(args.out);
  fsys::create_directories(out);
  lsbvar::RngStream rng(lsbvar::derive_seed(args.seed, 301, 0));

  std::ofstream mse_csv(out / "ins_mse.csv");
  mse_csv << "subject_id,mse\n";
  std::vector<double> per_subject;
  const int k = train.data.resp_dim;
  for (auto& [id, rows] : tail_groups) {
    auto it = index_of.find(id);
    if (it == index_of.end())
      throw lsbvar::DataError("tails subject '" + id + "' not in training data");
    const lsbvar::Subject& s = train.data.subjects[it->second];
    if (!s.observed.row(s.horizon() - 1).all())
      throw lsbvar::DataError("subject '" + id +
                              "': last training visit has missing entries");
    std::sort(rows.begin(), rows.end(),
              [](auto* a, auto* b) { return a->t < b->t; });
    const int l_steps = static_cast<int>(rows.size());
    Eigen::MatrixXd truth(l_steps, k);
    Eigen::MatrixXd x_future(l_steps, train.data.tv_cov_dim);
    for (int r = 0; r < l_steps; ++r) {
      if (rows[r]->t != s.horizon() + r + 1)
        throw lsbvar::DataError("subject '" + id +
                                "': tail rows must continue the training grid");
      for (int j = 0; j < k; ++j) {
        if (!rows[r]->y[j].has_value())
          throw lsbvar::DataError("subject '" + id + "': tail entry missing");
        truth(r, j) = *rows[r]->y[j];
      }
      for (int j = 0; j < train.data.tv_cov_dim; ++j)
        x_future(r, j) = rows[r]->x[j];
    }
    const auto mean_draws = lsbvar::predict_ins(
        store, it->second, s.responses.row(s.horizon() - 1), x_future,
        s.baseline, rng, /*include_noise=*/false);
    const double mse =
        lsbvar::mse_against(lsbvar::mean_path(mean_draws), truth);
    per_subject.push_back(mse);
    mse_csv << id << "," << mse << "\n";

    if ((args.subject.empty() && per_subject.size() == 1) ||
        id == args.subject) {
      const auto draws = lsbvar::predict_ins(
          store, it->second, s.responses.row(s.horizon() - 1), x_future,
          s.baseline, rng, /*include_noise=*/true);
      lsbvar::write_quantiles_csv(lsbvar::predictive_quantiles(draws),
                                  s.horizon() + 1,
                                  out / ("ins_quantiles_" + id + ".csv"));
    }
  }
  const auto summary = lsbvar::summarize_mse(per_subject);
  json rep;
  rep["mode"] = "ins";
  rep["n_subjects"] = per_subject.size();
  rep["mse_mean"] = summary.mean;
  rep["mse_sd"] = summary.sd;
  std::ofstream os(out / "ins_summary.json");
  os << rep.dump(2) << "\n";
  std::cout << "ins mse " << summary.mean << " +/- " << summary.sd << "\n";
  return 0;
}

struct PostprocessArgs {
  std::string run;
  std::string truth;
  int chain = 0;
  bool imputed_summary = false;
};

// Posterior mean and sd of every imputed entry, for imputation diagnostics.
void write_imputed_summary(const lsbvar::SampleStore& store,
                           const lsbvar::LongitudinalDataset* train,
                           const fsys::path& path) {
  std::ofstream os(path);
  os << "subject,t,response,mean,sd\n";
  const int s_count = store.size();
  if (s_count == 0) return;
  int offset = 0;
  for (int i = 0; i < store.n_subjects; ++i) {
    const int n_miss = store.missing_counts[i];
    for (int m = 0; m < n_miss; ++m) {
      double mean = 0.0, second = 0.0;
      for (const auto& s : store.samples) {
        const double v = s.imputed[offset + m];
        mean += v;
        second += v * v;
      }
      mean /= s_count;
      const double var = std::max(0.0, second / s_count - mean * mean);
      // map the entry back to (t, response) through the data mask when the
      // training data is available
      std::string subject = "subject" + std::to_string(i + 1);
      int t_out = -1, j_out = -1;
      if (train != nullptr) {
        subject = train->subjects[i].id;
        int seen = 0;
        const auto& subj = train->subjects[i];
        for (int t = 0; t < subj.horizon() && t_out < 0; ++t)
          for (int j = 0; j < train->resp_dim; ++j)
            if (!subj.observed(t, j) && seen++ == m) {
              t_out = t + 1;
              j_out = j + 1;
              break;
            }
      }
      os << subject << "," << t_out << "," << j_out << "," << mean << ","
         << std::sqrt(var) << "\n";
    }
    offset += n_miss;
  }
}

int run_postprocess(const PostprocessArgs& args) {
  const lsbvar::SampleStore store =
      lsbvar::load_store(chain_dir(args.run, args.chain));
  const auto allocs = lsbvar::allocation_samples(store);
  const lsbvar::Partition binder = lsbvar::binder_point_estimate(allocs);
  const auto hist = lsbvar::cluster_count_posterior(allocs);
  const auto waic_rep = lsbvar::waic(store);

  const fsys::path out = fsys::path(args.run) / "postprocess";
  fsys::create_directories(out);
  std::vector<std::string> ids;
  for (int i = 0; i < store.n_subjects; ++i)
    ids.push_back("subject" + std::to_string(i + 1));
  // prefer real ids from the training data if the manifest points to it
  std::optional<lsbvar::LongitudinalDataset> train;
  {
    std::ifstream mf(fsys::path(args.run) / "run_manifest.json");
    if (mf) {
      json manifest;
      mf >> manifest;
      if (manifest.contains("data")) {
        try {
          auto loaded =
              lsbvar::load_dataset(manifest["data"].get<std::string>());
          if (loaded.data.n_subjects() == store.n_subjects) {
            ids.clear();
            for (const auto& s : loaded.data.subjects) ids.push_back(s.id);
            train = std::move(loaded.data);
          }
        } catch (const std::exception&) {
          // fall back to generated ids
        }
      }
    }
  }
  lsbvar::write_partition_csv(binder, ids, out / "partition.csv");
  lsbvar::write_cluster_counts_csv(hist, out / "cluster_counts.csv");
  if (args.imputed_summary)
    write_imputed_summary(store, train ? &*train : nullptr,
                          out / "imputed_summary.csv");

  json rep;
  rep["n_samples"] = store.size();
  rep["binder_clusters"] = binder.n_clusters();
  rep["waic"] = waic_rep.waic;
  rep["lppd"] = waic_rep.lppd;
  rep["p_waic"] = waic_rep.p_waic;
  rep["minus_two_waic"] = waic_rep.minus_two_waic;
  if (!args.truth.empty()) {
    std::ifstream is(args.truth);
    if (!is) throw lsbvar::DataError("cannot open truth file: " + args.truth);
    std::string line;
    std::getline(is, line);  // header
    std::map<std::string, int> truth_of;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const auto comma = line.find(',');
      truth_of[line.substr(0, comma)] = std::stoi(line.substr(comma + 1));
    }
    lsbvar::Partition truth;
    for (const auto& id : ids) {
      auto it = truth_of.find(id);
      if (it == truth_of.end())
        throw lsbvar::DataError("truth file misses subject '" + id + "'");
      truth.labels.push_back(it->second);
    }
    rep["ari"] = lsbvar::adjusted_rand_index(binder, truth);
  }
  std::ofstream os(out / "report.json");
  os << rep.dump(2) << "\n";
  std::cout << rep.dump(2) << "\n";
  return 0;
}

struct PriorCheckArgs {
  std::string data;
  int synthetic_n = 0;
  std::vector<double> grid;
  int truncation = 50;
  int draws = 10000;
  std::uint64_t seed = 0;
  std::string out;
};

int run_prior_check(const PriorCheckArgs& args) {
  Eigen::MatrixXd z;
  if (!args.data.empty()) {
    auto loaded = lsbvar::load_dataset(args.data);
    const auto& ds = loaded.data;
    if (ds.n_subjects() == 0) throw lsbvar::DataError("no usable subjects");
    z.resize(ds.n_subjects(), ds.base_cov_dim);
    for (int i = 0; i < ds.n_subjects(); ++i)
      z.row(i) = ds.subjects[i].baseline;
  } else if (args.synthetic_n > 0) {
    lsbvar::RngStream rng(lsbvar::derive_seed(args.seed, 400, 0));
    z = lsbvar::gusto_like_design(args.synthetic_n, rng);
  } else {
    throw lsbvar::ConfigError("prior-check: supply --data or --synthetic N");
  }

  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!args.out.empty()) {
    file.open(args.out);
    if (!file) throw lsbvar::DataError("cannot write " + args.out);
    os = &file;
  }
  (*os) << "sigma_alpha_sq,draw,n_clusters,max_fraction\n";
  for (double s2 : args.grid) {
    const auto draws = lsbvar::prior_cluster_monte_carlo(
        z, args.truncation, s2, args.draws,
        lsbvar::derive_seed(args.seed, 401,
                            static_cast<std::uint64_t>(s2 * 1e6)));
    for (std::size_t d = 0; d < draws.size(); ++d)
      (*os) << s2 << "," << (d + 1) << "," << draws[d].n_clusters << ","
            << draws[d].max_fraction << "\n";
  }
  return 0;
}

int run_elicit(const std::string& data, const std::string& out) {
  auto loaded = lsbvar::load_dataset(data);
  const auto res = lsbvar::elicit_hyperparams(loaded.data);

  std::ostringstream cfg;
  cfg << "# elicited hyperparameters (" << data << ")\n";
  auto emit_matrix = [&](const std::string& key, const Eigen::MatrixXd& m) {
    cfg << key << " =";
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c) cfg << " " << m(r, c);
    cfg << "\n";
  };
  auto emit_vector = [&](const std::string& key, const Eigen::VectorXd& v) {
    cfg << key << " =";
    for (int i = 0; i < v.size(); ++i) cfg << " " << v[i];
    cfg << "\n";
  };
  cfg << "# VAR point estimates: phi_hat rows";
  for (int r = 0; r < res.phi_hat.rows(); ++r) {
    cfg << " [";
    for (int c = 0; c < res.phi_hat.cols(); ++c)
      cfg << res.phi_hat(r, c) << (c + 1 < res.phi_hat.cols() ? " " : "");
    cfg << "]";
  }
  cfg << "\n";
  emit_vector("phi000", res.phi000);
  cfg << "lambda = " << res.lambda << "\n";
  emit_matrix("v00", res.v00);
  cfg << "tau0 = " << res.tau0 << "\n";
  emit_matrix("sigma0", res.sigma0);
  cfg << "nu = " << res.nu << "\n";

  if (!out.empty()) {
    std::ofstream os(out);
    if (!os) throw lsbvar::DataError("cannot write " + out);
    os << cfg.str();
  }
  std::cout << cfg.str();
  return 0;
}

int run_experiment_cmd(const std::string& config, const std::string& out) {
  lsbvar::FlatConfig cfg = lsbvar::parse_flat_config_file(config);
  const auto result = lsbvar::run_experiment(cfg, out, &std::cerr);
  std::ifstream table(fsys::path(out) / "comparator_table.csv");
  std::cout << table.rdbuf();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian mixture-of-VAR clustering with covariate-dependent "
               "stick-breaking weights"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic dataset");
  sim_cmd->add_option("--scenario", sim.scenario, "scenario 1, 2 or 3")
      ->required()
      ->check(CLI::Range(1, 3));
  sim_cmd->add_option("--seed", sim.seed, "root seed");
  sim_cmd->add_option("--out", sim.out, "output directory")->required();
  sim_cmd->add_option("--n", sim.n_subjects, "number of subjects");
  sim_cmd->add_option("--horizon", sim.horizon, "visits per subject");
  sim_cmd->add_flag("--zero-phi2", sim.zero_phi2,
                    "zero out the second component matrix");
  sim_cmd->add_flag("--with-test", sim.with_test, "also write test.csv");
  sim_cmd->add_option("--test-size", sim.test_size, "test set size");
  sim_cmd->add_option("--ins-truncate", sim.ins_truncate,
                      "truncate this many subjects for in-sample prediction");
  sim_cmd->add_option("--ins-t-cut", sim.ins_t_cut, "truncation time");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "run the Gibbs sampler");
  fit_cmd->add_option("--data", fit.data, "long-format csv")->required();
  fit_cmd->add_option("--config", fit.config, "key-value config file")
      ->required();
  fit_cmd->add_option("--prior", fit.prior, "lsb or dp (overrides config)");
  fit_cmd->add_option("--chains", fit.chains, "parallel chains (default: config value or 1)");
  fit_cmd->add_option("--out", fit.out, "output directory")->required();
  fit_cmd->add_flag("--resume", fit.resume, "resume from checkpoints");
  auto* seed_opt = fit_cmd->add_option("--seed", fit.seed,
                                       "root seed (overrides config)");

  PredictArgs pred;
  auto* pred_cmd = app.add_subcommand("predict", "posterior predictive draws");
  pred_cmd->add_option("--run", pred.run, "fit output directory")->required();
  pred_cmd->add_option("--mode", pred.mode, "oos or ins")
      ->required()
      ->check(CLI::IsMember({"oos", "ins"}));
  pred_cmd->add_option("--data", pred.data,
                       "oos: test csv; ins: training csv override");
  pred_cmd->add_option("--tails", pred.tails, "held-out tail csv (ins)");
  pred_cmd->add_option("--subject", pred.subject,
                       "subject id for the quantile dump");
  pred_cmd->add_option("--chain", pred.chain, "chain index");
  pred_cmd->add_option("--seed", pred.seed, "prediction seed");
  pred_cmd->add_option("--out", pred.out, "output directory");

  PostprocessArgs post;
  auto* post_cmd =
      app.add_subcommand("postprocess", "partition, cluster counts, WAIC");
  post_cmd->add_option("--run", post.run, "fit output directory")->required();
  post_cmd->add_option("--truth", post.truth, "true-partition csv (adds ARI)");
  post_cmd->add_option("--chain", post.chain, "chain index");
  post_cmd->add_flag("--imputed-summary", post.imputed_summary,
                     "write posterior mean/sd of every imputed entry");

  PriorCheckArgs prior_check;
  auto* prior_cmd = app.add_subcommand(
      "prior-check", "prior-predictive cluster-count diagnostics");
  prior_cmd->add_option("--data", prior_check.data, "long-format csv");
  prior_cmd->add_option("--synthetic", prior_check.synthetic_n,
                        "use a synthetic cohort-like design of this size");
  prior_cmd
      ->add_option("--sigma-alpha-grid", prior_check.grid,
                   "grid of sigma_alpha^2 values")
      ->required()
      ->delimiter(',');
  prior_cmd->add_option("--components", prior_check.truncation, "number of mixture components");
  prior_cmd->add_option("--draws", prior_check.draws, "Monte Carlo draws");
  prior_cmd->add_option("--seed", prior_check.seed, "seed");
  prior_cmd->add_option("--out", prior_check.out, "output csv (default stdout)");

  std::string elicit_data, elicit_out;
  auto* elicit_cmd =
      app.add_subcommand("elicit", "data-driven hyperparameters");
  elicit_cmd->add_option("--data", elicit_data, "long-format csv")->required();
  elicit_cmd->add_option("--out", elicit_out, "config fragment output path");

  std::string exp_config, exp_out;
  auto* exp_cmd = app.add_subcommand(
      "experiment", "comparator pipeline (simulate, fit both priors, score)");
  exp_cmd->add_option("--config", exp_config, "experiment config")->required();
  exp_cmd->add_option("--out", exp_out, "artifact directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim_cmd->parsed()) return run_simulate(sim);
    if (fit_cmd->parsed()) {
      fit.has_seed = seed_opt->count() > 0;
      return run_fit(fit);
    }
    if (pred_cmd->parsed())
      return pred.mode == "oos" ? run_predict_oos(pred) : run_predict_ins(pred);
    if (post_cmd->parsed()) return run_postprocess(post);
    if (prior_cmd->parsed()) return run_prior_check(prior_check);
    if (elicit_cmd->parsed()) return run_elicit(elicit_data, elicit_out);
    if (exp_cmd->parsed()) return run_experiment_cmd(exp_config, exp_out);
  } catch (const lsbvar::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const lsbvar::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
