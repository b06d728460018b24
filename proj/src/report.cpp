#include "dcsbm/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace dcsbm {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long out = std::stol(trim(v), &used);
    if (used != trim(v).size()) throw std::invalid_argument(v);
    return out;
  } catch (...) {
    throw std::invalid_argument("config: '" + key + "' needs an integer, got '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double out = std::stod(trim(v), &used);
    if (used != trim(v).size()) throw std::invalid_argument(v);
    return out;
  } catch (...) {
    throw std::invalid_argument("config: '" + key + "' needs a number, got '" + v + "'");
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(ModelKind m) {
  switch (m) {
    case ModelKind::Static: return "static";
    case ModelKind::DynamicPopularity: return "dynamic1";
    case ModelKind::DynamicLag: return "dynamic2";
  }
  return "static";
}

ModelKind model_from_string(const std::string& s) {
  const std::string v = trim(s);
  if (v == "static") return ModelKind::Static;
  if (v == "dynamic1" || v == "dynamic-popularity") return ModelKind::DynamicPopularity;
  if (v == "dynamic2" || v == "dynamic-lag") return ModelKind::DynamicLag;
  throw std::invalid_argument("config: unknown model '" + s + "'");
}

void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value) {
  const std::string v = trim(value);
  if (key == "model") {
    cfg.model = model_from_string(v);
  } else if (key == "data") {
    cfg.data.clear();
    for (const auto& p : split(v, ','))
      if (!trim(p).empty()) cfg.data.push_back(trim(p));
  } else if (key == "labels") {
    cfg.labels_path = v;
  } else if (key == "n") {
    cfg.n_hint = static_cast<int>(to_long(key, v));
  } else if (key == "index-base") {
    if (v == "auto") cfg.base = IndexBase::Auto;
    else if (v == "zero") cfg.base = IndexBase::Zero;
    else if (v == "one") cfg.base = IndexBase::One;
    else throw std::invalid_argument("config: index-base must be auto, zero or one");
  } else if (key == "chains") {
    cfg.mcmc.chains = static_cast<int>(to_long(key, v));
  } else if (key == "iterations") {
    cfg.mcmc.iterations = to_long(key, v);
  } else if (key == "burn-in") {
    cfg.mcmc.burn_in = to_long(key, v);
  } else if (key == "thin") {
    cfg.mcmc.thin = to_long(key, v);
  } else if (key == "seed") {
    cfg.mcmc.seed = static_cast<std::uint64_t>(to_long(key, v));
  } else if (key == "jobs") {
    cfg.mcmc.jobs = static_cast<int>(to_long(key, v));
  } else if (key == "community-shape") {
    cfg.hyper.community_shape = to_double(key, v);
  } else if (key == "community-rate") {
    cfg.hyper.community_rate = to_double(key, v);
  } else if (key == "popularity-shape") {
    cfg.hyper.popularity_shape = to_double(key, v);
  } else if (key == "popularity-rate") {
    cfg.hyper.popularity_rate = to_double(key, v);
  } else if (key == "var-beta") {
    cfg.hyper.var_beta = to_double(key, v);
  } else if (key == "var-theta") {
    cfg.hyper.var_theta = to_double(key, v);
  } else if (key == "var-eta") {
    cfg.hyper.var_eta = to_double(key, v);
  } else if (key == "output-dir") {
    cfg.output_dir = v;
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected key = value");
    try {
      apply_config_entry(cfg, trim(t.substr(0, eq)), t.substr(eq + 1));
    } catch (const std::exception& e) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

void write_run_meta(const std::string& dir, const RunMeta& meta) {
  std::ofstream out(fs::path(dir) / "run_meta.txt");
  if (!out) throw std::runtime_error("cannot write run_meta.txt in " + dir);
  out << "model = " << to_string(meta.cfg.model) << "\n";
  std::string data;
  for (std::size_t i = 0; i < meta.cfg.data.size(); ++i)
    data += (i ? "," : "") + meta.cfg.data[i];
  out << "data = " << data << "\n";
  if (!meta.cfg.labels_path.empty()) out << "labels = " << meta.cfg.labels_path << "\n";
  if (meta.cfg.n_hint > 0) out << "n = " << meta.cfg.n_hint << "\n";
  out << "chains = " << meta.cfg.mcmc.chains << "\n";
  out << "iterations = " << meta.cfg.mcmc.iterations << "\n";
  out << "burn-in = " << meta.cfg.mcmc.burn_in << "\n";
  out << "thin = " << meta.cfg.mcmc.thin << "\n";
  out << "seed = " << meta.cfg.mcmc.seed << "\n";
  out << "jobs = " << meta.cfg.mcmc.jobs << "\n";
  out << "community-shape = " << fmt(meta.cfg.hyper.community_shape) << "\n";
  out << "community-rate = " << fmt(meta.cfg.hyper.community_rate) << "\n";
  out << "popularity-shape = " << fmt(meta.cfg.hyper.popularity_shape) << "\n";
  out << "popularity-rate = " << fmt(meta.cfg.hyper.popularity_rate) << "\n";
  out << "var-beta = " << fmt(meta.cfg.hyper.var_beta) << "\n";
  out << "var-theta = " << fmt(meta.cfg.hyper.var_theta) << "\n";
  out << "var-eta = " << fmt(meta.cfg.hyper.var_eta) << "\n";
  out << "actors = " << meta.n << "\n";
  out << "snapshots = " << meta.T << "\n";
  out << "popularity-units = " << meta.c_units << "\n";
  for (std::size_t k = 0; k < meta.chain_seconds.size(); ++k)
    out << "chain-" << k << "-seconds = " << fmt(meta.chain_seconds[k]) << "\n";
}

RunMeta read_run_meta(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "run_meta.txt");
  if (!in) throw std::runtime_error("no run_meta.txt in " + dir);
  RunMeta meta;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key == "actors") {
      meta.n = static_cast<int>(to_long(key, value));
    } else if (key == "snapshots") {
      meta.T = static_cast<int>(to_long(key, value));
    } else if (key == "popularity-units") {
      meta.c_units = static_cast<int>(to_long(key, value));
    } else if (key.rfind("chain-", 0) == 0) {
      meta.chain_seconds.push_back(to_double(key, value));
    } else {
      apply_config_entry(meta.cfg, key, value);
    }
  }
  return meta;
}

void write_chain_output(const std::string& dir, const ChainOutput& co) {
  const fs::path base = fs::path(dir) / ("chain_" + std::to_string(co.chain_index));
  std::ofstream out(base.string() + ".csv");
  if (!out) throw std::runtime_error("cannot write chain csv in " + dir);
  out << "# seed=" << co.seed << " stream=" << co.stream
      << " wall=" << fmt(co.wall_seconds) << "\n";
  const std::size_t n = co.draws.empty() ? 0 : co.draws[0].z.size();
  const std::size_t U = co.draws.empty() ? 0 : co.draws[0].c.size();
  out << "draw,K,L,alpha,nu,eta";
  for (std::size_t i = 1; i <= n; ++i) out << ",z." << i;
  for (std::size_t u = 1; u <= U; ++u) out << ",c." << u;
  out << "\n";
  std::ofstream cl(base.string() + "_clusters.csv");
  cl << "draw,kind,values\n";
  for (std::size_t d = 0; d < co.draws.size(); ++d) {
    const Draw& dr = co.draws[d];
    out << (d + 1) << "," << dr.K << "," << dr.L << "," << fmt(dr.alpha) << ","
        << fmt(dr.nu) << "," << fmt(dr.eta);
    for (int v : dr.z) out << "," << v;
    for (int v : dr.c) out << "," << v;
    out << "\n";
    cl << (d + 1) << ",beta";
    for (double v : dr.beta_star) cl << "," << fmt(v);
    cl << "\n" << (d + 1) << ",theta";
    for (double v : dr.theta_star) cl << "," << fmt(v);
    cl << "\n";
  }
  if (!out || !cl) throw std::runtime_error("short write of chain output in " + dir);
}

std::vector<ChainOutput> read_chain_outputs(const std::string& dir) {
  std::vector<std::pair<int, fs::path>> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("chain_", 0) != 0 || name.find("_clusters") != std::string::npos)
      continue;
    if (e.path().extension() != ".csv") continue;
    files.emplace_back(std::stoi(name.substr(6)), e.path());
  }
  if (files.empty()) throw std::runtime_error("no chain csv files in " + dir);
  std::sort(files.begin(), files.end());

  std::vector<ChainOutput> out;
  for (const auto& [index, path] : files) {
    ChainOutput co;
    co.chain_index = index;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::getline(in, line);  // "# seed=... stream=... wall=..."
    {
      std::istringstream hs(line);
      std::string tok;
      while (hs >> tok) {
        if (tok.rfind("seed=", 0) == 0) co.seed = std::stoull(tok.substr(5));
        if (tok.rfind("stream=", 0) == 0) co.stream = std::stoull(tok.substr(7));
        if (tok.rfind("wall=", 0) == 0) co.wall_seconds = std::stod(tok.substr(5));
      }
    }
    std::getline(in, line);  // header
    std::size_t n = 0, U = 0;
    for (const auto& col : split(line, ',')) {
      if (col.rfind("z.", 0) == 0) ++n;
      if (col.rfind("c.", 0) == 0) ++U;
    }
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      const auto cols = split(line, ',');
      if (cols.size() != 6 + n + U)
        throw std::runtime_error(path.string() + ": malformed row");
      Draw d;
      d.K = std::stoi(cols[1]);
      d.L = std::stoi(cols[2]);
      d.alpha = std::stod(cols[3]);
      d.nu = std::stod(cols[4]);
      d.eta = std::stod(cols[5]);
      for (std::size_t i = 0; i < n; ++i) d.z.push_back(std::stoi(cols[6 + i]));
      for (std::size_t u = 0; u < U; ++u) d.c.push_back(std::stoi(cols[6 + n + u]));
      co.draws.push_back(std::move(d));
    }
    // Ragged coefficient rows live next to the trace.
    fs::path clpath = path;
    clpath.replace_filename(path.stem().string() + "_clusters.csv");
    std::ifstream cl(clpath);
    if (!cl) throw std::runtime_error("missing " + clpath.string());
    std::getline(cl, line);  // header
    while (std::getline(cl, line)) {
      if (trim(line).empty()) continue;
      const auto cols = split(line, ',');
      if (cols.size() < 2) throw std::runtime_error(clpath.string() + ": malformed row");
      const std::size_t draw = std::stoul(cols[0]);
      if (draw < 1 || draw > co.draws.size())
        throw std::runtime_error(clpath.string() + ": draw index out of range");
      std::vector<double> vals;
      for (std::size_t k = 2; k < cols.size(); ++k) vals.push_back(std::stod(cols[k]));
      if (cols[1] == "beta")
        co.draws[draw - 1].beta_star = std::move(vals);
      else if (cols[1] == "theta")
        co.draws[draw - 1].theta_star = std::move(vals);
      else
        throw std::runtime_error(clpath.string() + ": unknown kind " + cols[1]);
    }
    out.push_back(std::move(co));
  }
  return out;
}

void write_count_csv(const std::string& path, const CountSummary& cs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  long total = 0;
  for (const auto& [v, c] : cs.histogram) total += c;
  out << "value,count,proportion\n";
  for (const auto& [v, c] : cs.histogram)
    out << v << "," << c << "," << fmt(static_cast<double>(c) / total) << "\n";
}

void write_scalar_csv(const std::string& path, const FitSummary& fs_) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "param,mean,sd,psrf,prob_positive\n";
  auto row = [&](const char* name, const RealSummary& r) {
    out << name << "," << fmt(r.mean) << "," << fmt(r.sd) << "," << fmt(r.psrf)
        << "," << fmt(r.prob_positive) << "\n";
  };
  row("alpha", fs_.alpha);
  row("nu", fs_.nu);
  if (fs_.has_eta) row("eta", fs_.eta);
}

void write_similarity_csv(const std::string& path, const SimilarityMatrix& S) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "unit";
  for (int j = 0; j < S.n(); ++j) out << "," << (j + 1);
  out << "\n";
  for (int i = 0; i < S.n(); ++i) {
    out << (i + 1);
    for (int j = 0; j < S.n(); ++j) out << "," << fmt(S.at(i, j));
    out << "\n";
  }
}

void write_labels_csv(const std::string& path, const std::vector<int>& labels,
                      const std::vector<std::string>& names) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "unit,cluster,name\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << (i + 1) << "," << labels[i] << ",";
    if (i < names.size()) out << names[i];
    out << "\n";
  }
}

void write_hist_svg(const std::string& path, const CountSummary& cs,
                    const std::string& title) {
  long maxc = 1;
  for (const auto& [v, c] : cs.histogram) maxc = std::max(maxc, c);
  const int W = 480, H = 320, ml = 50, mb = 40, mt = 30, mr = 12;
  const int plot_w = W - ml - mr, plot_h = H - mt - mb;
  const int bars = static_cast<int>(cs.histogram.size());
  const double bw = static_cast<double>(plot_w) / std::max(1, bars);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"13\">" << title << "</text>\n";
  int b = 0;
  for (const auto& [v, c] : cs.histogram) {
    const double h = plot_h * static_cast<double>(c) / maxc;
    const double x = ml + b * bw + 2;
    out << "<rect x=\"" << x << "\" y=\"" << (mt + plot_h - h) << "\" width=\""
        << std::max(1.0, bw - 4) << "\" height=\"" << h
        << "\" fill=\"#4878a8\"/>\n";
    out << "<text x=\"" << (x + (bw - 4) / 2) << "\" y=\"" << (H - mb + 16)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">" << v << "</text>\n";
    out << "<text x=\"" << (x + (bw - 4) / 2) << "\" y=\""
        << (mt + plot_h - h - 4)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"10\">" << c << "</text>\n";
    ++b;
  }
  out << "<line x1=\"" << ml << "\" y1=\"" << (mt + plot_h) << "\" x2=\""
      << (W - mr) << "\" y2=\"" << (mt + plot_h)
      << "\" stroke=\"black\"/>\n</svg>\n";
}

void write_heatmap_svg(const std::string& path, const SimilarityMatrix& S,
                       const std::vector<int>& order_labels,
                       const std::string& title) {
  const int n = S.n();
  if (static_cast<int>(order_labels.size()) != n)
    throw std::invalid_argument("heatmap: ordering labels do not match matrix");
  // Units grouped by cluster label, ascending unit id inside a cluster.
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
    return order_labels[a] < order_labels[b];
  });
  const int cell = std::max(3, std::min(14, 640 / std::max(1, n)));
  const int m = 60, mt = 34;
  const int W = m + n * cell + 12, H = mt + n * cell + 12;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"16\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"13\">" << title << "</text>\n";
  for (int a = 0; a < n; ++a)
    for (int bidx = 0; bidx < n; ++bidx) {
      const double s = S.at(perm[a], perm[bidx]);
      const int r = static_cast<int>(255 + s * (8 - 255));
      const int g = static_cast<int>(255 + s * (48 - 255));
      const int bch = static_cast<int>(255 + s * (107 - 255));
      out << "<rect x=\"" << (m + bidx * cell) << "\" y=\"" << (mt + a * cell)
          << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb("
          << r << "," << g << "," << bch << ")\"/>\n";
    }
  // Cluster block boundaries.
  for (int a = 1; a < n; ++a)
    if (order_labels[perm[a]] != order_labels[perm[a - 1]]) {
      const int off = a * cell;
      out << "<line x1=\"" << m << "\" y1=\"" << (mt + off) << "\" x2=\""
          << (m + n * cell) << "\" y2=\"" << (mt + off)
          << "\" stroke=\"#c44\" stroke-width=\"1.5\"/>\n";
      out << "<line x1=\"" << (m + off) << "\" y1=\"" << mt << "\" x2=\""
          << (m + off) << "\" y2=\"" << (mt + n * cell)
          << "\" stroke=\"#c44\" stroke-width=\"1.5\"/>\n";
    }
  if (cell >= 8)
    for (int a = 0; a < n; ++a)
      out << "<text x=\"" << (m - 4) << "\" y=\"" << (mt + a * cell + cell - 2)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\""
          << (cell - 2) << "\">" << (perm[a] + 1) << "</text>\n";
  out << "</svg>\n";
}

void write_summary_text(const std::string& path, const FitSummary& fs_,
                        const HardClustering& community,
                        const HardClustering& popularity,
                        const std::vector<std::string>& names) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "retained draws: " << fs_.total_draws << "\n\n";
  auto hist = [&](const char* what, const CountSummary& cs) {
    out << what << ": mode " << cs.mode << ", mean " << cs.mean << "\n  ";
    for (const auto& [v, c] : cs.histogram) out << v << ":" << c << "  ";
    out << "\n";
  };
  hist("communities (K)", fs_.K);
  hist("popularity clusters (L)", fs_.L);
  auto scalar = [&](const char* what, const RealSummary& r) {
    out << what << ": mean " << r.mean << ", sd " << r.sd << ", psrf " << r.psrf
        << ", P(>0) " << r.prob_positive << "\n";
  };
  out << "\n";
  scalar("alpha", fs_.alpha);
  scalar("nu", fs_.nu);
  if (fs_.has_eta) scalar("eta", fs_.eta);

  out << "\nper chain:\n";
  for (std::size_t ci = 0; ci < fs_.K_chain.size(); ++ci) {
    out << "  chain " << ci << ": mode K " << fs_.K_chain[ci].mode << " (mean "
        << fs_.K_chain[ci].mean << "), mode L " << fs_.L_chain[ci].mode
        << " (mean " << fs_.L_chain[ci].mean << "), alpha "
        << fs_.alpha_chain[ci].mean << ", nu " << fs_.nu_chain[ci].mean;
    if (fs_.has_eta && ci < fs_.eta_chain.size())
      out << ", eta " << fs_.eta_chain[ci].mean;
    out << "\n";
  }

  auto partition = [&](const char* what, const HardClustering& hc) {
    out << "\n" << what << " (expected loss " << hc.loss << "):\n";
    const int k = hc.labels.empty()
                      ? 0
                      : *std::max_element(hc.labels.begin(), hc.labels.end());
    for (int cl = 1; cl <= k; ++cl) {
      out << "  cluster " << cl << ":";
      for (std::size_t i = 0; i < hc.labels.size(); ++i)
        if (hc.labels[i] == cl) {
          out << " " << (i + 1);
          if (i < names.size() && !names[i].empty()) out << "(" << names[i] << ")";
        }
      out << "\n";
    }
  };
  partition("community partition", community);
  partition("popularity partition", popularity);
}

}  // namespace dcsbm
