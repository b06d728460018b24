#include "dcsbm/network.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dcsbm {

StaticNetwork::StaticNetwork(int n, std::vector<std::pair<int, int>> edges,
                             std::vector<std::string> labels)
    : n_(n), labels_(std::move(labels)) {
  if (n < 1) throw std::invalid_argument("network: need at least one actor");
  if (!labels_.empty() && static_cast<int>(labels_.size()) != n)
    throw std::invalid_argument("network: label count does not match n");
  std::set<std::pair<int, int>> dedup;
  for (auto [i, j] : edges) {
    if (i == j) throw std::invalid_argument("network: self loop on actor " + std::to_string(i));
    if (i < 1 || j < 1 || i > n || j > n)
      throw std::invalid_argument("network: edge endpoint out of range");
    if (i > j) std::swap(i, j);
    dedup.emplace(i, j);
  }
  edges_.assign(dedup.begin(), dedup.end());
  adj_.assign(pair_count(n), 0);
  for (auto [i, j] : edges_) adj_[pair_index(n, i - 1, j - 1)] = 1;
}

bool StaticNetwork::has_edge(int i, int j) const {
  if (i == j) return false;
  if (i < 1 || j < 1 || i > n_ || j > n_)
    throw std::out_of_range("has_edge: actor index out of range");
  if (i > j) std::swap(i, j);
  return adj_[pair_index(n_, i - 1, j - 1)] != 0;
}

void StaticNetwork::set_attribute(int i, const std::string& tag) {
  if (i < 1 || i > n_) throw std::out_of_range("set_attribute: actor index out of range");
  attributes_[i] = tag;
}

int StaticNetwork::degree(int i) const {
  if (i < 1 || i > n_) throw std::out_of_range("degree: actor index out of range");
  int d = 0;
  for (int j = 1; j <= n_; ++j)
    if (j != i && has_edge(i, j)) ++d;
  return d;
}

namespace {

// Parses one token as a nonnegative integer index; returns -1 on junk.
int parse_index(const std::string& tok) {
  if (tok.empty()) return -1;
  for (char ch : tok)
    if (!std::isdigit(static_cast<unsigned char>(ch))) return -1;
  try {
    return std::stoi(tok);
  } catch (...) {
    return -1;
  }
}

}  // namespace

StaticNetwork load_edge_list(const std::string& path, int n_hint, IndexBase base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);

  std::vector<std::pair<int, int>> raw;
  std::vector<int> raw_line;  // source line of each pair, for messages
  int n_comment = 0;
  bool saw_zero = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Strip a trailing comment; "# n=N" anywhere sets the actor count.
    if (auto hash = line.find('#'); hash != std::string::npos) {
      std::string comment = line.substr(hash + 1);
      if (auto eq = comment.find("n="); eq != std::string::npos) {
        int v = parse_index(comment.substr(eq + 2,
            comment.find_first_of(" \t\r", eq + 2) - (eq + 2)));
        if (v > 0) n_comment = std::max(n_comment, v);
      }
      line.erase(hash);
    }
    for (char& ch : line)
      if (ch == ',' || ch == '\t' || ch == '\r') ch = ' ';
    std::istringstream ls(line);
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    if (toks.empty()) continue;
    if (toks.size() != 2)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected two endpoints, got " +
                               std::to_string(toks.size()) + " tokens");
    const int i = parse_index(toks[0]);
    const int j = parse_index(toks[1]);
    if (i < 0 || j < 0)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": endpoints must be nonnegative integers");
    if (i == j)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": self loop on actor " + toks[0]);
    if (i == 0 || j == 0) saw_zero = true;
    raw.emplace_back(i, j);
    raw_line.push_back(lineno);
  }

  const bool zero_based =
      (base == IndexBase::Zero) || (base == IndexBase::Auto && saw_zero);
  if (base == IndexBase::One && saw_zero)
    throw std::runtime_error(path + ": actor index 0 in a 1-based file");

  int n = std::max(n_hint, n_comment);
  std::vector<std::pair<int, int>> edges;
  edges.reserve(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    int i = raw[k].first + (zero_based ? 1 : 0);
    int j = raw[k].second + (zero_based ? 1 : 0);
    n = std::max({n, i, j});
    edges.emplace_back(i, j);
  }
  if (n == 0)
    throw std::runtime_error(path + ": no edges and no actor count hint");
  return StaticNetwork(n, std::move(edges));
}

void save_edge_list(const StaticNetwork& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write edge list: " + path);
  out << "# n=" << net.n() << "\n";
  for (auto [i, j] : net.edges()) out << i << " " << j << "\n";
  if (!out) throw std::runtime_error("short write: " + path);
}

DynamicNetwork load_snapshots(const std::vector<std::string>& paths, int n_hint,
                              IndexBase base) {
  if (paths.size() < 2)
    throw std::runtime_error("dynamic model needs at least two snapshots");
  std::vector<StaticNetwork> loaded;
  int n = n_hint;
  for (std::size_t t = 0; t < paths.size(); ++t) {
    try {
      loaded.push_back(load_edge_list(paths[t], n_hint, base));
    } catch (const std::exception& e) {
      throw std::runtime_error("snapshot " + std::to_string(t + 1) + ": " + e.what());
    }
    n = std::max(n, loaded.back().n());
  }
  DynamicNetwork dyn;
  dyn.n = n;
  dyn.T = static_cast<int>(loaded.size());
  for (auto& snap : loaded) {
    if (snap.n() == n)
      dyn.snapshots.push_back(std::move(snap));
    else
      dyn.snapshots.emplace_back(n, snap.edges());  // pad to the common actor set
  }
  return dyn;
}

std::vector<std::string> load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open label file: " + path);
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    labels.push_back(line);
  }
  return labels;
}

}  // namespace dcsbm
