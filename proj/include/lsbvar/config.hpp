#ifndef LSBVAR_CONFIG_HPP
#define LSBVAR_CONFIG_HPP

#include <Eigen/Dense>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lsbvar/gibbs.hpp"
#include "lsbvar/types.hpp"

namespace lsbvar {

// Flat key-value configuration:
//   key = value [value ...]     # comment
// Numeric lists fill matrices row-major; a single number for a matrix-valued
// key means that multiple of the identity, and for a vector-valued key a
// constant vector. Non-numeric values are kept as strings.
struct FlatConfig {
  std::map<std::string, std::vector<double>> numbers;
  std::map<std::string, std::string> strings;
  std::string source_text;

  bool has(const std::string& key) const {
    return numbers.count(key) > 0 || strings.count(key) > 0;
  }

  double scalar(const std::string& key, double fallback) const {
    auto it = numbers.find(key);
    if (it == numbers.end()) return fallback;
    if (it->second.size() != 1)
      throw ConfigError("config field '" + key + "': expected a single number");
    return it->second[0];
  }

  double required_scalar(const std::string& key) const {
    auto it = numbers.find(key);
    if (it == numbers.end())
      throw ConfigError("config field '" + key + "' is required (number)");
    if (it->second.size() != 1)
      throw ConfigError("config field '" + key + "': expected a single number");
    return it->second[0];
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    auto it = strings.find(key);
    if (it != strings.end()) return it->second;
    return fallback;
  }

  Eigen::MatrixXd matrix(const std::string& key, int dim,
                         double default_scale) const {
    auto it = numbers.find(key);
    if (it == numbers.end())
      return default_scale * Eigen::MatrixXd::Identity(dim, dim);
    const auto& v = it->second;
    if (v.size() == 1) return v[0] * Eigen::MatrixXd::Identity(dim, dim);
    if (static_cast<int>(v.size()) != dim * dim)
      throw ConfigError("config field '" + key + "': expected 1 or " +
                        std::to_string(dim * dim) + " numbers (row-major " +
                        std::to_string(dim) + "x" + std::to_string(dim) +
                        "), got " + std::to_string(v.size()));
    Eigen::MatrixXd m(dim, dim);
    int idx = 0;
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) m(r, c) = v[idx++];
    return m;
  }

  Eigen::VectorXd vector(const std::string& key, int dim,
                         double default_value) const {
    auto it = numbers.find(key);
    if (it == numbers.end())
      return Eigen::VectorXd::Constant(dim, default_value);
    const auto& v = it->second;
    if (v.size() == 1) return Eigen::VectorXd::Constant(dim, v[0]);
    if (static_cast<int>(v.size()) != dim)
      throw ConfigError("config field '" + key + "': expected 1 or " +
                        std::to_string(dim) + " numbers, got " +
                        std::to_string(v.size()));
    Eigen::VectorXd out(dim);
    for (int i = 0; i < dim; ++i) out[i] = v[i];
    return out;
  }

  void check_allowed(const std::set<std::string>& allowed) const {
    for (const auto& [key, unused] : numbers)
      if (!allowed.count(key))
        throw ConfigError("unknown config field '" + key + "'");
    for (const auto& [key, unused] : strings)
      if (!allowed.count(key))
        throw ConfigError("unknown config field '" + key + "'");
  }
};

inline FlatConfig parse_flat_config(std::istream& in) {
  FlatConfig cfg;
  std::ostringstream snapshot;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    snapshot << line << "\n";
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::istringstream check(line);
      std::string token;
      if (check >> token)
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": expected 'key = value'");
      continue;
    }
    std::istringstream key_stream(line.substr(0, eq));
    std::string key;
    key_stream >> key;
    std::string extra;
    if (key.empty() || (key_stream >> extra))
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": malformed key");
    std::istringstream value_stream(line.substr(eq + 1));
    std::vector<double> values;
    std::vector<std::string> tokens;
    std::string token;
    bool all_numeric = true;
    while (value_stream >> token) {
      tokens.push_back(token);
      try {
        std::size_t pos = 0;
        values.push_back(std::stod(token, &pos));
        if (pos != token.size()) all_numeric = false;
      } catch (const std::exception&) {
        all_numeric = false;
      }
    }
    if (tokens.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": field '" +
                        key + "' has no value");
    if (cfg.has(key))
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": duplicate field '" + key + "'");
    if (all_numeric) {
      cfg.numbers[key] = values;
    } else {
      if (tokens.size() != 1)
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": field '" + key +
                          "' mixes text and numbers");
      cfg.strings[key] = tokens[0];
    }
  }
  cfg.source_text = snapshot.str();
  return cfg;
}

inline FlatConfig parse_flat_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_flat_config(in);
}

inline const std::set<std::string>& hyperparam_config_keys() {
  static const std::set<std::string> keys = {
      "h",      "nu",        "lambda",      "tau0",        "mu_alpha",
      "sigma_alpha", "sigma_b", "sigma_gamma", "sigma0",     "phi000",
      "v00"};
  return keys;
}

inline const std::set<std::string>& sampler_config_keys() {
  static const std::set<std::string> keys = {
      "prior", "dp_mass", "n_iter", "burn_in",
      "thin",  "seed",    "chains", "checkpoint_every"};
  return keys;
}

// Defaults reproduce the simulation-study settings for any response
// dimension: unit-variance coefficient priors, prior precision mean I
// (sigma0 = I/nu with nu = k+2), and an atom hierarchy centered at zero with
// tau0 = k^2+2 and V_00 = I.
inline ModelHyperparams hyperparams_from_config(const FlatConfig& cfg, int k,
                                                int p, int q) {
  ModelHyperparams hp;
  hp.truncation = static_cast<int>(cfg.scalar("h", 25));
  hp.nu = cfg.scalar("nu", k + 2.0);
  hp.sigma0 = cfg.matrix("sigma0", k, 1.0 / hp.nu);
  hp.lambda = cfg.scalar("lambda", 0.1);
  hp.tau0 = cfg.scalar("tau0", k * k + 2.0);
  hp.v00 = cfg.matrix("v00", k * k, 1.0);
  hp.phi000 = cfg.vector("phi000", k * k, 0.0);
  hp.mu_alpha = cfg.vector("mu_alpha", q, 0.0);
  hp.sigma_alpha = cfg.matrix("sigma_alpha", q, 1.0);
  hp.sigma_b = cfg.matrix("sigma_b", k * p, 1.0);
  hp.sigma_gamma = cfg.matrix("sigma_gamma", k * q, 1.0);
  hp.validate(k, p, q);
  return hp;
}

inline SamplerConfig sampler_config_from_config(const FlatConfig& cfg) {
  SamplerConfig sc;
  sc.n_iter = static_cast<int>(cfg.required_scalar("n_iter"));
  sc.burn_in = static_cast<int>(cfg.scalar("burn_in", sc.n_iter / 2));
  sc.thin = static_cast<int>(cfg.scalar("thin", 1));
  sc.seed = static_cast<std::uint64_t>(cfg.scalar("seed", 0));
  const std::string prior = cfg.text("prior", "lsb");
  if (prior == "lsb")
    sc.prior = PriorKind::LSB;
  else if (prior == "dp")
    sc.prior = PriorKind::DP;
  else
    throw ConfigError("config field 'prior': expected 'lsb' or 'dp', got '" +
                      prior + "'");
  sc.dp_mass = cfg.scalar("dp_mass", 1.0);
  sc.validate();
  return sc;
}

}  // namespace lsbvar

#endif
