#ifndef LSBVAR_STORE_HPP
#define LSBVAR_STORE_HPP

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "lsbvar/gibbs.hpp"
#include "lsbvar/version.hpp"

namespace lsbvar {

namespace fsys = std::filesystem;

// On-disk layout of a chain: a manifest plus one flat native-endian binary
// array per parameter, sample-major. Matrices are flattened row-major;
// atoms/alphas are flattened component-major. Allocations are written as
// 1-based int32 component ids.
//
//   manifest.json   dimensions, sampler settings, sample count
//   b.f64 gamma.f64 sigma.f64 atoms.f64 phi00.f64 v0.f64 loglik.f64
//   imputed.f64 allocations.i32 and alphas.f64 or dp_sticks.f64

namespace detail {

inline void write_doubles(std::ofstream& os, const double* data, std::size_t n) {
  os.write(reinterpret_cast<const char*>(data),
           static_cast<std::streamsize>(n * sizeof(double)));
}

inline void write_vec(std::ofstream& os, const Eigen::VectorXd& v) {
  write_doubles(os, v.data(), v.size());
}

inline void write_mat_rowmajor(std::ofstream& os, const Eigen::MatrixXd& m) {
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      os.write(reinterpret_cast<const char*>(&v), sizeof(double));
    }
}

inline std::vector<double> read_doubles(const fsys::path& path,
                                        std::size_t expect) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open " + path.string());
  std::vector<double> out(expect);
  is.read(reinterpret_cast<char*>(out.data()),
          static_cast<std::streamsize>(expect * sizeof(double)));
  if (static_cast<std::size_t>(is.gcount()) != expect * sizeof(double))
    throw DataError("short read from " + path.string());
  return out;
}

inline std::vector<std::int32_t> read_ints(const fsys::path& path,
                                           std::size_t expect) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open " + path.string());
  std::vector<std::int32_t> out(expect);
  is.read(reinterpret_cast<char*>(out.data()),
          static_cast<std::streamsize>(expect * sizeof(std::int32_t)));
  if (static_cast<std::size_t>(is.gcount()) != expect * sizeof(std::int32_t))
    throw DataError("short read from " + path.string());
  return out;
}

}  // namespace detail

inline nlohmann::json store_manifest_json(const SampleStore& store,
                                          int n_samples, bool complete) {
  nlohmann::json j;
  j["format_version"] = kStoreFormatVersion;
  j["lsbvar_version"] = kVersion;
  j["prior"] = prior_kind_name(store.config.prior);
  j["dp_mass"] = store.config.dp_mass;
  j["n_subjects"] = store.n_subjects;
  j["resp_dim"] = store.resp_dim;
  j["tv_cov_dim"] = store.tv_cov_dim;
  j["base_cov_dim"] = store.base_cov_dim;
  j["truncation"] = store.truncation;
  j["horizons"] = store.horizons;
  j["observed_counts"] = store.observed_counts;
  j["missing_counts"] = store.missing_counts;
  j["n_iter"] = store.config.n_iter;
  j["burn_in"] = store.config.burn_in;
  j["thin"] = store.config.thin;
  j["seed"] = store.config.seed;
  j["n_samples"] = n_samples;
  j["complete"] = complete;
  return j;
}

// Incremental writer; append() streams one snapshot to the binary arrays,
// flush() makes everything on disk consistent with a refreshed manifest.
class StoreWriter {
 public:
  StoreWriter(const fsys::path& dir, const SampleStore& meta, bool append)
      : dir_(dir), meta_(meta) {
    fsys::create_directories(dir);
    const std::string weights_name =
        meta.config.prior == PriorKind::LSB ? "alphas.f64" : "dp_sticks.f64";
    if (append) {
      auto manifest = load_manifest(dir_);
      n_written_ = manifest.at("n_samples").get<int>();
      // an interrupted run may have flushed bytes past the last durable
      // manifest; cut every array back to exactly n_samples records
      const int k = meta.resp_dim;
      const int h = meta.truncation;
      int n_obs = 0, n_miss = 0;
      for (int c : meta.observed_counts) n_obs += c;
      for (int c : meta.missing_counts) n_miss += c;
      auto resize = [&](const std::string& name, std::size_t record_bytes) {
        const fsys::path p = dir_ / name;
        const std::size_t expect = n_written_ * record_bytes;
        if (!fsys::exists(p) || fsys::file_size(p) < expect)
          throw DataError("store " + p.string() +
                          " is shorter than its manifest");
        fsys::resize_file(p, expect);
      };
      resize("b.f64", sizeof(double) * k * meta.tv_cov_dim);
      resize("gamma.f64", sizeof(double) * k * meta.base_cov_dim);
      resize("sigma.f64", sizeof(double) * k * k);
      resize("atoms.f64", sizeof(double) * h * k * k);
      resize("phi00.f64", sizeof(double) * k * k);
      resize("v0.f64", sizeof(double) * k * k * k * k);
      resize("loglik.f64", sizeof(double) * n_obs);
      resize("imputed.f64", sizeof(double) * n_miss);
      resize("allocations.i32", sizeof(std::int32_t) * meta.n_subjects);
      resize(weights_name,
             meta.config.prior == PriorKind::LSB
                 ? sizeof(double) * (h - 1) * meta.base_cov_dim
                 : sizeof(double) * h);
    }
    const auto mode = std::ios::binary | (append ? std::ios::app : std::ios::trunc);
    auto open = [&](std::ofstream& os, const std::string& name) {
      os.open(dir_ / name, mode);
      if (!os) throw DataError("cannot open " + (dir_ / name).string());
    };
    open(b_, "b.f64");
    open(gamma_, "gamma.f64");
    open(sigma_, "sigma.f64");
    open(atoms_, "atoms.f64");
    open(phi00_, "phi00.f64");
    open(v0_, "v0.f64");
    open(loglik_, "loglik.f64");
    open(imputed_, "imputed.f64");
    open(alloc_, "allocations.i32");
    open(weights_, weights_name);
  }

  void append(const PosteriorSample& s) {
    detail::write_vec(b_, s.b);
    detail::write_vec(gamma_, s.gamma);
    detail::write_mat_rowmajor(sigma_, s.sigma);
    for (const auto& a : s.atoms) detail::write_mat_rowmajor(atoms_, a);
    detail::write_vec(phi00_, s.phi00);
    detail::write_mat_rowmajor(v0_, s.v0);
    detail::write_vec(loglik_, s.loglik);
    detail::write_vec(imputed_, s.imputed);
    for (int g : s.allocations) {
      const std::int32_t id = g + 1;
      alloc_.write(reinterpret_cast<const char*>(&id), sizeof(id));
    }
    if (meta_.config.prior == PriorKind::LSB) {
      for (const auto& a : s.alphas) detail::write_vec(weights_, a);
    } else {
      detail::write_vec(weights_, s.dp_sticks);
    }
    ++n_written_;
  }

  void flush(bool complete) {
    for (auto* os : {&b_, &gamma_, &sigma_, &atoms_, &phi00_, &v0_, &loglik_,
                     &imputed_, &weights_})
      os->flush();
    alloc_.flush();
    std::ofstream m(dir_ / "manifest.json", std::ios::trunc);
    m << store_manifest_json(meta_, n_written_, complete).dump(2) << "\n";
  }

  int n_written() const { return n_written_; }

  static nlohmann::json load_manifest(const fsys::path& dir) {
    std::ifstream is(dir / "manifest.json");
    if (!is) throw DataError("cannot open " + (dir / "manifest.json").string());
    nlohmann::json j;
    is >> j;
    return j;
  }

 private:
  fsys::path dir_;
  SampleStore meta_;
  int n_written_ = 0;
  std::ofstream b_, gamma_, sigma_, atoms_, phi00_, v0_, loglik_, imputed_,
      alloc_, weights_;
};

inline void save_store(const SampleStore& store, const fsys::path& dir) {
  StoreWriter writer(dir, store, /*append=*/false);
  for (const auto& s : store.samples) writer.append(s);
  writer.flush(/*complete=*/true);
}

inline SampleStore load_store(const fsys::path& dir) {
  const auto manifest = StoreWriter::load_manifest(dir);
  if (manifest.at("format_version").get<int>() != kStoreFormatVersion)
    throw DataError("store " + dir.string() + ": unsupported format version");
  SampleStore store;
  store.n_subjects = manifest.at("n_subjects").get<int>();
  store.resp_dim = manifest.at("resp_dim").get<int>();
  store.tv_cov_dim = manifest.at("tv_cov_dim").get<int>();
  store.base_cov_dim = manifest.at("base_cov_dim").get<int>();
  store.truncation = manifest.at("truncation").get<int>();
  store.horizons = manifest.at("horizons").get<std::vector<int>>();
  store.observed_counts =
      manifest.at("observed_counts").get<std::vector<int>>();
  store.missing_counts = manifest.at("missing_counts").get<std::vector<int>>();
  store.config.n_iter = manifest.at("n_iter").get<int>();
  store.config.burn_in = manifest.at("burn_in").get<int>();
  store.config.thin = manifest.at("thin").get<int>();
  store.config.seed = manifest.at("seed").get<std::uint64_t>();
  store.config.dp_mass = manifest.at("dp_mass").get<double>();
  store.config.prior = manifest.at("prior").get<std::string>() == "lsb"
                           ? PriorKind::LSB
                           : PriorKind::DP;
  const int s_count = manifest.at("n_samples").get<int>();
  const int k = store.resp_dim;
  const int kp = k * store.tv_cov_dim;
  const int kq = k * store.base_cov_dim;
  const int h = store.truncation;
  const int n = store.n_subjects;
  int n_obs = 0, n_miss = 0;
  for (int c : store.observed_counts) n_obs += c;
  for (int c : store.missing_counts) n_miss += c;

  const auto b = detail::read_doubles(dir / "b.f64", std::size_t(s_count) * kp);
  const auto gamma =
      detail::read_doubles(dir / "gamma.f64", std::size_t(s_count) * kq);
  const auto sigma =
      detail::read_doubles(dir / "sigma.f64", std::size_t(s_count) * k * k);
  const auto atoms = detail::read_doubles(dir / "atoms.f64",
                                          std::size_t(s_count) * h * k * k);
  const auto phi00 =
      detail::read_doubles(dir / "phi00.f64", std::size_t(s_count) * k * k);
  const auto v0 = detail::read_doubles(
      dir / "v0.f64", std::size_t(s_count) * k * k * k * k);
  const auto loglik =
      detail::read_doubles(dir / "loglik.f64", std::size_t(s_count) * n_obs);
  const auto imputed =
      detail::read_doubles(dir / "imputed.f64", std::size_t(s_count) * n_miss);
  const auto alloc =
      detail::read_ints(dir / "allocations.i32", std::size_t(s_count) * n);
  std::vector<double> weights;
  if (store.config.prior == PriorKind::LSB)
    weights = detail::read_doubles(
        dir / "alphas.f64",
        std::size_t(s_count) * (h - 1) * store.base_cov_dim);
  else
    weights = detail::read_doubles(dir / "dp_sticks.f64",
                                   std::size_t(s_count) * h);

  auto take_mat = [](const std::vector<double>& src, std::size_t off, int rows,
                     int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) m(r, c) = src[off + r * cols + c];
    return m;
  };
  auto take_vec = [](const std::vector<double>& src, std::size_t off, int len) {
    Eigen::VectorXd v(len);
    for (int i = 0; i < len; ++i) v[i] = src[off + i];
    return v;
  };

  store.samples.resize(s_count);
  for (int s = 0; s < s_count; ++s) {
    auto& sm = store.samples[s];
    sm.b = take_vec(b, std::size_t(s) * kp, kp);
    sm.gamma = take_vec(gamma, std::size_t(s) * kq, kq);
    sm.sigma = take_mat(sigma, std::size_t(s) * k * k, k, k);
    sm.atoms.resize(h);
    for (int hh = 0; hh < h; ++hh)
      sm.atoms[hh] =
          take_mat(atoms, (std::size_t(s) * h + hh) * k * k, k, k);
    sm.phi00 = take_vec(phi00, std::size_t(s) * k * k, k * k);
    sm.v0 = take_mat(v0, std::size_t(s) * k * k * k * k, k * k, k * k);
    sm.loglik = take_vec(loglik, std::size_t(s) * n_obs, n_obs);
    sm.imputed = take_vec(imputed, std::size_t(s) * n_miss, n_miss);
    sm.allocations.resize(n);
    for (int i = 0; i < n; ++i)
      sm.allocations[i] = alloc[std::size_t(s) * n + i] - 1;
    if (store.config.prior == PriorKind::LSB) {
      sm.alphas.resize(h - 1);
      const int q = store.base_cov_dim;
      for (int hh = 0; hh + 1 < h; ++hh)
        sm.alphas[hh] =
            take_vec(weights, (std::size_t(s) * (h - 1) + hh) * q, q);
    } else {
      sm.dp_sticks = take_vec(weights, std::size_t(s) * h, h);
    }
  }
  return store;
}

// --- chain-state serialization for checkpoints ---

namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
inline std::uint64_t get_u64(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
inline void put_vec(std::ostream& os, const Eigen::VectorXd& v) {
  put_u64(os, v.size());
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
}
inline Eigen::VectorXd get_vec(std::istream& is) {
  const auto n = get_u64(is);
  Eigen::VectorXd v(static_cast<int>(n));
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  return v;
}
inline void put_mat(std::ostream& os, const Eigen::MatrixXd& m) {
  put_u64(os, m.rows());
  put_u64(os, m.cols());
  os.write(reinterpret_cast<const char*>(m.data()),
           static_cast<std::streamsize>(m.size() * sizeof(double)));
}
inline Eigen::MatrixXd get_mat(std::istream& is) {
  const auto r = get_u64(is);
  const auto c = get_u64(is);
  Eigen::MatrixXd m(static_cast<int>(r), static_cast<int>(c));
  is.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(m.size() * sizeof(double)));
  return m;
}

}  // namespace detail

inline void write_chain_state(std::ostream& os, const ChainState& st) {
  detail::put_vec(os, st.b);
  detail::put_vec(os, st.gamma);
  detail::put_mat(os, st.sigma);
  detail::put_u64(os, st.atoms.size());
  for (const auto& a : st.atoms) detail::put_mat(os, a);
  detail::put_u64(os, st.allocations.size());
  for (int g : st.allocations) detail::put_u64(os, static_cast<std::uint64_t>(g));
  detail::put_u64(os, st.alphas.size());
  for (const auto& a : st.alphas) detail::put_vec(os, a);
  detail::put_vec(os, st.dp_sticks);
  detail::put_vec(os, st.phi00);
  detail::put_mat(os, st.v0);
  detail::put_u64(os, st.filled.size());
  for (const auto& f : st.filled) detail::put_mat(os, f);
}

inline ChainState read_chain_state(std::istream& is) {
  ChainState st;
  st.b = detail::get_vec(is);
  st.gamma = detail::get_vec(is);
  st.sigma = detail::get_mat(is);
  st.atoms.resize(detail::get_u64(is));
  for (auto& a : st.atoms) a = detail::get_mat(is);
  st.allocations.resize(detail::get_u64(is));
  for (auto& g : st.allocations) g = static_cast<int>(detail::get_u64(is));
  st.alphas.resize(detail::get_u64(is));
  for (auto& a : st.alphas) a = detail::get_vec(is);
  st.dp_sticks = detail::get_vec(is);
  st.phi00 = detail::get_vec(is);
  st.v0 = detail::get_mat(is);
  st.filled.resize(detail::get_u64(is));
  for (auto& f : st.filled) f = detail::get_mat(is);
  if (!is) throw DataError("truncated chain-state checkpoint");
  return st;
}

struct Checkpoint {
  int iteration = 0;
  std::string rng_state;
  ChainState state;
};

inline void write_checkpoint(const fsys::path& path, const Checkpoint& cp) {
  // write-then-rename so an interrupt never leaves a torn checkpoint
  const fsys::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot write checkpoint " + tmp.string());
    detail::put_u64(os, static_cast<std::uint64_t>(cp.iteration));
    detail::put_u64(os, cp.rng_state.size());
    os.write(cp.rng_state.data(),
             static_cast<std::streamsize>(cp.rng_state.size()));
    write_chain_state(os, cp.state);
  }
  fsys::rename(tmp, path);
}

inline Checkpoint read_checkpoint(const fsys::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open checkpoint " + path.string());
  Checkpoint cp;
  cp.iteration = static_cast<int>(detail::get_u64(is));
  cp.rng_state.resize(detail::get_u64(is));
  is.read(cp.rng_state.data(),
          static_cast<std::streamsize>(cp.rng_state.size()));
  cp.state = read_chain_state(is);
  return cp;
}

// Runs one chain while streaming samples to `dir`, leaving a resumable
// checkpoint every `checkpoint_every` iterations. If `resume` is set and a
// checkpoint exists the chain continues from it and the replayed run is
// bit-identical to an uninterrupted one. A nonzero `stop_after_iteration`
// caps this invocation at that absolute iteration (checkpoint kept), so long
// runs can be split across process lifetimes.
inline SampleStore run_chain_to_dir(const LongitudinalDataset& ds,
                                    const ModelHyperparams& hp,
                                    const SamplerConfig& cfg,
                                    const fsys::path& dir,
                                    int checkpoint_every = 1000,
                                    bool resume = false,
                                    int stop_after_iteration = 0) {
  GibbsSampler sampler(ds, hp, cfg);
  RngStream rng(cfg.seed);

  SampleStore meta;
  meta.n_subjects = ds.n_subjects();
  meta.resp_dim = ds.resp_dim;
  meta.tv_cov_dim = ds.tv_cov_dim;
  meta.base_cov_dim = ds.base_cov_dim;
  meta.truncation = hp.truncation;
  meta.config = cfg;
  for (const auto& s : ds.subjects) {
    meta.horizons.push_back(s.horizon());
    meta.observed_counts.push_back(s.n_observed());
    meta.missing_counts.push_back(s.n_missing());
  }

  const fsys::path cp_path = dir / "checkpoint.bin";
  int start_iter = 0;
  const bool resuming = resume && fsys::exists(cp_path);
  if (resuming) {
    Checkpoint cp = read_checkpoint(cp_path);
    start_iter = cp.iteration;
    rng = RngStream::deserialize(cp.rng_state);
    sampler.state() = std::move(cp.state);
  } else {
    sampler.init_state(rng);
  }

  StoreWriter writer(dir, meta, /*append=*/resuming);

  for (int it = start_iter + 1; it <= cfg.n_iter; ++it) {
    try {
      sampler.sweep(rng);
    } catch (const std::exception& e) {
      // dump the failing state next to the store for post-mortem inspection
      const fsys::path dump = dir / "failed_state.bin";
      std::ofstream os(dump, std::ios::binary | std::ios::trunc);
      write_chain_state(os, sampler.state());
      throw SamplerError("iteration " + std::to_string(it) + ": " + e.what() +
                         " (state dumped to " + dump.string() + ")");
    }
    if (it > cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0)
      writer.append(sampler.snapshot());
    const bool stopping = stop_after_iteration > 0 &&
                          it >= stop_after_iteration && it < cfg.n_iter;
    if (stopping ||
        (checkpoint_every > 0 && it % checkpoint_every == 0 && it < cfg.n_iter)) {
      writer.flush(/*complete=*/false);
      write_checkpoint(cp_path, {it, rng.serialize(), sampler.state()});
    }
    if (stopping) return load_store(dir);
  }
  writer.flush(/*complete=*/true);
  if (fsys::exists(cp_path)) fsys::remove(cp_path);
  return load_store(dir);
}

}  // namespace lsbvar

#endif
