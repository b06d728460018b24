// Command-line front end: fit / summarize / refit / simulate / validate-data.
// Exit codes: 0 ok, 2 usage or validation problem, 3 runtime failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "dcsbm/chains.hpp"
#include "dcsbm/model.hpp"
#include "dcsbm/network.hpp"
#include "dcsbm/posterior.hpp"
#include "dcsbm/report.hpp"

namespace fs = std::filesystem;
using namespace dcsbm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

// Flags land here as raw strings so that "set at all" is knowable; they are
// replayed over the config file in order, giving flags precedence.
struct Overrides {
  std::vector<std::pair<std::string, std::string>> kv;
  void add(const std::string& key, const std::string& value) {
    kv.emplace_back(key, value);
  }
};

void add_fit_flags(CLI::App* cmd, std::shared_ptr<Overrides> ov) {
  static const char* keys[] = {
      "model", "labels", "n", "index-base", "chains", "iterations",
      "burn-in", "thin", "seed", "jobs", "community-shape", "community-rate",
      "popularity-shape", "popularity-rate", "var-beta", "var-theta",
      "var-eta", "output-dir"};
  for (const char* key : keys) {
    const std::string k = key;
    cmd->add_option_function<std::string>(
        "--" + k, [ov, k](const std::string& v) { ov->add(k, v); });
  }
  cmd->add_option_function<std::vector<std::string>>(
      "--data", [ov](const std::vector<std::string>& paths) {
        std::string joined;
        for (std::size_t i = 0; i < paths.size(); ++i)
          joined += (i ? "," : "") + paths[i];
        ov->add("data", joined);
      });
}

RunConfig assemble_config(const std::string& config_path, const Overrides& ov) {
  RunConfig cfg;
  if (!config_path.empty()) {
    if (!fs::exists(config_path))
      throw Usage("missing config file: " + config_path);
    cfg = parse_config_file(config_path);
  }
  for (const auto& [k, v] : ov.kv) apply_config_entry(cfg, k, v);
  if (cfg.output_dir.empty()) {
    if (const char* env = std::getenv("DCSBM_OUTPUT_DIR")) cfg.output_dir = env;
    if (cfg.output_dir.empty()) cfg.output_dir = ".";
  }
  return cfg;
}

void check_data_presence(const RunConfig& cfg) {
  if (cfg.data.empty()) throw Usage("no data files given");
  for (const auto& p : cfg.data)
    if (!fs::exists(p)) throw Usage("missing data file: " + p);
  if (cfg.model == ModelKind::Static && cfg.data.size() != 1)
    throw Usage("static model takes exactly one snapshot, got " +
                std::to_string(cfg.data.size()));
  if (cfg.model != ModelKind::Static && cfg.data.size() < 2)
    throw Usage("dynamic models need at least two snapshots, got " +
                std::to_string(cfg.data.size()));
}

struct LoadedData {
  StaticNetwork snap;   // static model only
  DynamicNetwork dyn;   // dynamic models only
  std::vector<std::string> names;
  int n = 0, T = 1;
};

LoadedData load_data(const RunConfig& cfg) {
  LoadedData d;
  try {
    if (cfg.model == ModelKind::Static) {
      d.snap = load_edge_list(cfg.data[0], cfg.n_hint, cfg.base);
      d.n = d.snap.n();
      d.T = 1;
    } else {
      d.dyn = load_snapshots(cfg.data, cfg.n_hint, cfg.base);
      d.n = d.dyn.n;
      d.T = d.dyn.T;
    }
  } catch (const std::exception& e) {
    throw Usage(e.what());  // malformed data is a validation failure
  }
  if (!cfg.labels_path.empty()) {
    if (!fs::exists(cfg.labels_path))
      throw Usage("missing label file: " + cfg.labels_path);
    for (const auto& line : load_labels(cfg.labels_path))
      d.names.push_back(split_csv(line)[0]);
    if (static_cast<int>(d.names.size()) != d.n)
      throw Usage("label file has " + std::to_string(d.names.size()) +
                  " entries for " + std::to_string(d.n) + " actors");
  }
  return d;
}

NetView make_view(const LoadedData& d, ModelKind model) {
  return model == ModelKind::Static ? NetView(d.snap) : NetView(d.dyn);
}

int cmd_fit(const std::string& config_path, const Overrides& ov) {
  const RunConfig cfg = assemble_config(config_path, ov);
  check_data_presence(cfg);
  cfg.mcmc.validate();
  cfg.hyper.validate();
  const LoadedData data = load_data(cfg);
  const NetView view = make_view(data, cfg.model);

  fs::create_directories(cfg.output_dir);
  const std::vector<ChainOutput> chains =
      run_chains(view, cfg.model, cfg.hyper, cfg.mcmc);

  RunMeta meta;
  meta.cfg = cfg;
  meta.n = data.n;
  meta.T = data.T;
  meta.c_units = (cfg.model == ModelKind::DynamicPopularity) ? data.n * data.T : data.n;
  for (const auto& co : chains) meta.chain_seconds.push_back(co.wall_seconds);
  write_run_meta(cfg.output_dir, meta);
  for (const auto& co : chains) write_chain_output(cfg.output_dir, co);

  const FitSummary fsum =
      summarize_scalars(chains, cfg.model == ModelKind::DynamicLag);
  std::cout << "fit complete: " << chains.size() << " chains, "
            << fsum.total_draws << " retained draws\n";
  for (const auto& co : chains)
    std::cout << "  chain " << co.chain_index << ": " << co.wall_seconds
              << " s\n";
  std::cout << "pooled mode K = " << fsum.K.mode << ", mode L = " << fsum.L.mode
            << "\n"
            << "outputs in " << cfg.output_dir << "\n";
  return kExitOk;
}

std::vector<std::string> run_dir_names(const RunMeta& meta, const std::string& run_dir) {
  std::vector<std::string> names;
  if (meta.cfg.labels_path.empty()) return names;
  std::string p = meta.cfg.labels_path;
  if (!fs::exists(p)) {
    const fs::path alt = fs::path(run_dir) / p;
    if (!fs::exists(alt)) return names;
    p = alt.string();
  }
  for (const auto& line : load_labels(p)) names.push_back(split_csv(line)[0]);
  return names;
}

int cmd_summarize(const std::string& run_dir, int exhaustive_max_n) {
  if (!fs::exists(fs::path(run_dir) / "run_meta.txt"))
    throw Usage("not a run directory (no run_meta.txt): " + run_dir);
  const RunMeta meta = read_run_meta(run_dir);
  const std::vector<ChainOutput> chains = read_chain_outputs(run_dir);
  const bool has_eta = (meta.cfg.model == ModelKind::DynamicLag);

  const FitSummary fsum = summarize_scalars(chains, has_eta);
  const auto zs = collect_z(chains);
  const auto cs = collect_c(chains);
  const SimilarityMatrix Sz = similarity_matrix(zs);
  const SimilarityMatrix Sc = similarity_matrix(cs);
  const HardClustering hz = minimize_binder(Sz, zs, exhaustive_max_n);
  const HardClustering hc = minimize_binder(Sc, cs, exhaustive_max_n);

  const std::vector<std::string> names = run_dir_names(meta, run_dir);
  const fs::path dir(run_dir);
  write_count_csv((dir / "K_hist.csv").string(), fsum.K);
  write_count_csv((dir / "L_hist.csv").string(), fsum.L);
  write_hist_svg((dir / "K_hist.svg").string(), fsum.K, "communities (K)");
  write_hist_svg((dir / "L_hist.svg").string(), fsum.L, "popularity clusters (L)");
  write_scalar_csv((dir / "scalar_summary.csv").string(), fsum);
  write_similarity_csv((dir / "psm_community.csv").string(), Sz);
  write_similarity_csv((dir / "psm_popularity.csv").string(), Sc);
  write_heatmap_svg((dir / "psm_community.svg").string(), Sz, hz.labels,
                    "community co-clustering");
  write_heatmap_svg((dir / "psm_popularity.svg").string(), Sc, hc.labels,
                    "popularity co-clustering");
  write_labels_csv((dir / "binder_community.csv").string(), hz.labels, names);
  write_labels_csv((dir / "binder_popularity.csv").string(), hc.labels, names);

  // Posterior mean popularity per unit: useful for ranking actors.
  {
    std::ofstream out(dir / "popularity_mean.csv");
    if (!out) throw std::runtime_error("cannot write popularity_mean.csv");
    const std::size_t U = cs.empty() ? 0 : cs[0].size();
    std::vector<double> mean(U, 0.0);
    long count = 0;
    for (const auto& ch : chains)
      for (const auto& d : ch.draws) {
        for (std::size_t u = 0; u < U; ++u) mean[u] += d.theta_star[d.c[u] - 1];
        ++count;
      }
    out << "unit,theta_mean\n";
    for (std::size_t u = 0; u < U; ++u) {
      out << (u + 1) << "," << (mean[u] / count) << "\n";
    }
  }

  write_summary_text((dir / "summary.txt").string(), fsum, hz, hc, names);
  std::ifstream echo(dir / "summary.txt");
  std::cout << echo.rdbuf();
  return kExitOk;
}

std::vector<int> read_label_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<int> labels;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cols = split_csv(line);
    if (cols.size() < 2) throw std::runtime_error(path + ": malformed row");
    labels.push_back(std::stoi(cols[1]));
  }
  return labels;
}

int cmd_refit(const std::string& run_dir, long iterations, long burn_in,
              long thin, int chains_n) {
  if (!fs::exists(fs::path(run_dir) / "run_meta.txt"))
    throw Usage("not a run directory (no run_meta.txt): " + run_dir);
  const RunMeta meta = read_run_meta(run_dir);

  // Resolve data paths as stored, then relative to the run directory.
  RunConfig cfg = meta.cfg;
  for (auto& p : cfg.data)
    if (!fs::exists(p) && fs::exists(fs::path(run_dir) / p))
      p = (fs::path(run_dir) / p).string();
  check_data_presence(cfg);
  const LoadedData data = load_data(cfg);
  const NetView view = make_view(data, cfg.model);

  // Partitions come from the summarize artifacts, or are derived now.
  std::vector<int> z_labels, c_labels;
  const fs::path bz = fs::path(run_dir) / "binder_community.csv";
  const fs::path bc = fs::path(run_dir) / "binder_popularity.csv";
  if (fs::exists(bz) && fs::exists(bc)) {
    z_labels = read_label_csv(bz.string());
    c_labels = read_label_csv(bc.string());
  } else {
    const auto chain_data = read_chain_outputs(run_dir);
    const auto zs = collect_z(chain_data);
    const auto cs = collect_c(chain_data);
    z_labels = minimize_binder(similarity_matrix(zs), zs).labels;
    c_labels = minimize_binder(similarity_matrix(cs), cs).labels;
  }

  McmcConfig mcfg;
  mcfg.iterations = iterations;
  mcfg.burn_in = burn_in;
  mcfg.thin = thin;
  mcfg.chains = chains_n;
  mcfg.seed = meta.cfg.mcmc.seed + 1;  // decouple from the fit stream
  mcfg.validate();

  const RefitResult r =
      conditional_refit(view, cfg.model, cfg.hyper, z_labels, c_labels, mcfg);

  std::ofstream out(fs::path(run_dir) / "refit.csv");
  if (!out) throw std::runtime_error("cannot write refit.csv");
  out << "kind,cluster,mean,sd\n";
  std::cout << "conditional refit (" << r.kept << " draws)\n";
  for (std::size_t k = 0; k < r.beta_mean.size(); ++k) {
    out << "beta," << (k + 1) << "," << r.beta_mean[k] << "," << r.beta_sd[k] << "\n";
    std::cout << "  beta[" << (k + 1) << "] = " << r.beta_mean[k] << " +- "
              << r.beta_sd[k] << "\n";
  }
  for (std::size_t l = 0; l < r.theta_mean.size(); ++l) {
    out << "theta," << (l + 1) << "," << r.theta_mean[l] << "," << r.theta_sd[l] << "\n";
    std::cout << "  theta[" << (l + 1) << "] = " << r.theta_mean[l] << " +- "
              << r.theta_sd[l] << "\n";
  }
  if (cfg.model == ModelKind::DynamicLag) {
    out << "eta,1," << r.eta_mean << "," << r.eta_sd << "\n";
    std::cout << "  eta = " << r.eta_mean << " +- " << r.eta_sd << "\n";
  }
  return kExitOk;
}

// Params file for simulate: model, n, snapshots, seed, output, and the
// planted structure (z/beta, c/theta, eta).  "communities = k" splits the
// actors evenly instead of listing z outright.
int cmd_simulate(const std::string& params_path, const std::string& output_override,
                 std::optional<std::uint64_t> seed_override) {
  if (!fs::exists(params_path)) throw Usage("missing params file: " + params_path);
  std::ifstream in(params_path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string t = line;
    while (!t.empty() && (t.back() == ' ' || t.back() == '\r' || t.back() == '\t'))
      t.pop_back();
    while (!t.empty() && (t.front() == ' ' || t.front() == '\t')) t.erase(0, 1);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Usage(params_path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = t.substr(0, eq);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    std::string val = t.substr(eq + 1);
    while (!val.empty() && (val.front() == ' ' || val.front() == '\t')) val.erase(0, 1);
    kv[key] = val;
  }

  auto get = [&](const std::string& k) -> std::optional<std::string> {
    auto it = kv.find(k);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  auto int_list = [&](const std::string& s) {
    std::vector<int> out;
    for (const auto& tok : split_csv(s))
      if (!tok.empty()) out.push_back(std::stoi(tok));
    return out;
  };
  auto dbl_list = [&](const std::string& s) {
    std::vector<double> out;
    for (const auto& tok : split_csv(s))
      if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
  };

  const ModelKind model = model_from_string(get("model").value_or("static"));
  const int n = std::stoi(get("n").value_or("0"));
  if (n < 2) throw Usage("simulate: need n >= 2");
  int T = std::stoi(get("snapshots").value_or(model == ModelKind::Static ? "1" : "2"));
  if (model == ModelKind::Static) T = 1;
  if (model != ModelKind::Static && T < 2)
    throw Usage("simulate: dynamic models need snapshots >= 2");

  std::vector<int> z_labels;
  if (auto z = get("z")) {
    z_labels = int_list(*z);
  } else {
    const int k = std::stoi(get("communities").value_or("1"));
    if (k < 1 || k > n) throw Usage("simulate: communities out of range");
    z_labels.resize(n);
    for (int i = 0; i < n; ++i) z_labels[i] = 1 + (i * k) / n;
  }
  if (static_cast<int>(z_labels.size()) != n)
    throw Usage("simulate: z needs one entry per actor");

  const int c_units = (model == ModelKind::DynamicPopularity) ? n * T : n;
  std::vector<int> c_labels(c_units, 1);
  if (auto c = get("c")) c_labels = int_list(*c);
  if (static_cast<int>(c_labels.size()) != c_units)
    throw Usage("simulate: c needs " + std::to_string(c_units) + " entries");

  auto expand = [](std::vector<double> vals, int k, const char* what) {
    if (static_cast<int>(vals.size()) == 1) vals.assign(k, vals[0]);
    if (static_cast<int>(vals.size()) != k)
      throw Usage(std::string("simulate: ") + what + " needs " +
                  std::to_string(k) + " values");
    return vals;
  };
  auto count_distinct = [](const std::vector<int>& v) {
    std::vector<int> seen;
    for (int x : v) {
      bool found = false;
      for (int s : seen)
        if (s == x) { found = true; break; }
      if (!found) seen.push_back(x);
    }
    return static_cast<int>(seen.size());
  };
  const int K = count_distinct(z_labels);
  const int L = count_distinct(c_labels);
  const std::vector<double> beta = expand(dbl_list(get("beta").value_or("0")), K, "beta");
  const std::vector<double> theta = expand(dbl_list(get("theta").value_or("0")), L, "theta");

  SamplerState s;
  s.model = model;
  s.n = n;
  s.T = T;
  s.z = CrpState::from_assignments(z_labels, beta);
  s.c = CrpState::from_assignments(c_labels, theta);
  s.eta = std::stod(get("eta").value_or("0"));

  std::uint64_t seed = std::stoull(get("seed").value_or("1"));
  if (seed_override) seed = *seed_override;
  std::string output = output_override.empty() ? get("output").value_or("sim") : output_override;

  RandomSource rng(seed, 0);
  const DynamicNetwork net = generate_network(rng, s);

  std::vector<std::string> written;
  if (model == ModelKind::Static) {
    save_edge_list(net.snapshots[0], output + ".txt");
    written.push_back(output + ".txt");
  } else {
    for (int t = 0; t < T; ++t) {
      const std::string p = output + "_t" + std::to_string(t + 1) + ".txt";
      save_edge_list(net.snapshots[t], p);
      written.push_back(p);
    }
  }
  {
    std::ofstream tz(output + "_truth_z.csv");
    tz << "unit,cluster\n";
    for (int i = 0; i < n; ++i) tz << (i + 1) << "," << z_labels[i] << "\n";
    std::ofstream tc(output + "_truth_c.csv");
    tc << "unit,cluster\n";
    for (int u = 0; u < c_units; ++u) tc << (u + 1) << "," << c_labels[u] << "\n";
  }
  std::cout << "simulated " << to_string(model) << " network, n=" << n;
  for (int t = 0; t < T; ++t)
    std::cout << (t ? "," : ", edges=") << net.snapshots[t].edge_count();
  std::cout << "\nwrote";
  for (const auto& p : written) std::cout << " " << p;
  std::cout << " " << output << "_truth_z.csv " << output << "_truth_c.csv\n";
  return kExitOk;
}

int cmd_validate(const std::vector<std::string>& paths, int n_hint,
                 const std::string& base_str) {
  if (paths.empty()) throw Usage("no data files given");
  IndexBase base = IndexBase::Auto;
  if (base_str == "zero") base = IndexBase::Zero;
  else if (base_str == "one") base = IndexBase::One;
  else if (base_str != "auto") throw Usage("index-base must be auto, zero or one");
  for (const auto& p : paths)
    if (!fs::exists(p)) throw Usage("missing data file: " + p);
  for (const auto& p : paths) {
    StaticNetwork net;
    try {
      net = load_edge_list(p, n_hint, base);
    } catch (const std::exception& e) {
      throw Usage(e.what());
    }
    long degsum = 0;
    int dmin = net.n() ? net.degree(1) : 0, dmax = 0;
    int isolated = 0;
    for (int i = 1; i <= net.n(); ++i) {
      const int d = net.degree(i);
      degsum += d;
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
      if (d == 0) ++isolated;
    }
    std::cout << p << ": n=" << net.n() << " edges=" << net.edge_count()
              << " degree min/mean/max = " << dmin << "/"
              << (net.n() ? static_cast<double>(degsum) / net.n() : 0.0) << "/"
              << dmax << " isolated=" << isolated << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonparametric degree-corrected blockmodels for static and dynamic networks"};
  app.require_subcommand(1);

  auto fit_ov = std::make_shared<Overrides>();
  std::string fit_config;
  CLI::App* fit = app.add_subcommand("fit", "run the Gibbs sampler on a network");
  fit->add_option("--config", fit_config, "key = value config file");
  add_fit_flags(fit, fit_ov);

  std::string sum_run;
  int sum_exhaustive = 0;
  CLI::App* summ = app.add_subcommand("summarize", "post-process a fit directory");
  summ->add_option("--run", sum_run, "fit output directory")->required();
  summ->add_option("--exhaustive-max-n", sum_exhaustive,
                   "exact Binder search when units <= this (small n only)");

  std::string refit_run;
  long refit_iters = 4000, refit_burn = 1000, refit_thin = 1;
  int refit_chains = 3;
  CLI::App* refit = app.add_subcommand(
      "refit", "rerun coefficients with the Binder partitions frozen");
  refit->add_option("--run", refit_run, "fit output directory")->required();
  refit->add_option("--iterations", refit_iters, "sweeps per chain");
  refit->add_option("--burn-in", refit_burn, "discarded sweeps");
  refit->add_option("--thin", refit_thin, "keep every thin-th sweep");
  refit->add_option("--chains", refit_chains, "chain count");

  std::string sim_params, sim_output;
  std::uint64_t sim_seed = 0;
  bool sim_seed_set = false;
  CLI::App* sim = app.add_subcommand("simulate", "generate a network from given parameters");
  sim->add_option("--params", sim_params, "params file")->required();
  sim->add_option("--output", sim_output, "output path prefix");
  sim->add_option_function<std::uint64_t>(
      "--seed", [&](std::uint64_t v) { sim_seed = v; sim_seed_set = true; });

  std::vector<std::string> val_paths;
  int val_n = 0;
  std::string val_base = "auto";
  CLI::App* val = app.add_subcommand("validate-data", "load and describe edge lists");
  val->add_option("--data", val_paths, "edge list files")->required();
  val->add_option("--n", val_n, "minimum actor count");
  val->add_option("--index-base", val_base, "auto, zero or one");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*fit) return cmd_fit(fit_config, *fit_ov);
    if (*summ) return cmd_summarize(sum_run, sum_exhaustive);
    if (*refit)
      return cmd_refit(refit_run, refit_iters, refit_burn, refit_thin, refit_chains);
    if (*sim)
      return cmd_simulate(sim_params, sim_output,
                          sim_seed_set ? std::optional<std::uint64_t>(sim_seed)
                                       : std::nullopt);
    if (*val) return cmd_validate(val_paths, val_n, val_base);
  } catch (const Usage& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
