#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace dcsbm {

enum class IndexBase { Auto, Zero, One };

// Undirected simple graph on actors 1..n with O(1) adjacency lookup.
// Isolated actors are legal; they matter for the popularity terms.
class StaticNetwork {
 public:
  StaticNetwork() = default;
  // Edges are 1-based pairs; duplicates and (j,i) mirrors collapse silently,
  // self loops are rejected.
  StaticNetwork(int n, std::vector<std::pair<int, int>> edges,
                std::vector<std::string> labels = {});

  int n() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<std::string>& labels() const { return labels_; }

  // Free-form per-actor tags (faction, job, ...); report decoration only.
  const std::map<int, std::string>& attributes() const { return attributes_; }
  void set_attribute(int i, const std::string& tag);

  bool has_edge(int i, int j) const;  // 1-based
  int degree(int i) const;            // 1-based

  // Flat upper-triangle adjacency, row-major over pairs i<j (0-based), for
  // the sampler's inner loops.
  const std::uint8_t* adjacency() const { return adj_.data(); }

 private:
  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::string> labels_;
  std::map<int, std::string> attributes_;
  std::vector<std::uint8_t> adj_;
};

// Snapshot sequence sharing one actor set.  Snapshots loaded from files of
// differing maxima are padded to the common n.
struct DynamicNetwork {
  int n = 0;
  int T = 0;
  std::vector<StaticNetwork> snapshots;
};

// Index of pair (i,j), 0-based actors i<j, in the flat upper triangle.
inline std::size_t pair_index(int n, int i, int j) {
  return static_cast<std::size_t>(i) * (2 * n - i - 1) / 2 + (j - i - 1);
}
inline std::size_t pair_count(int n) {
  return static_cast<std::size_t>(n) * (n - 1) / 2;
}

// Whitespace- or comma-separated "i j" lines; '#' starts a comment; a
// comment of the form "# n=N" fixes the actor count.  Indices may be 0- or
// 1-based; under Auto any zero index marks the file 0-based.  n_hint forces
// at least that many actors.
StaticNetwork load_edge_list(const std::string& path, int n_hint = 0,
                             IndexBase base = IndexBase::Auto);

// Writes "# n=N" followed by one sorted 1-based edge per line, so isolated
// actors survive a round trip.
void save_edge_list(const StaticNetwork& net, const std::string& path);

DynamicNetwork load_snapshots(const std::vector<std::string>& paths,
                              int n_hint = 0, IndexBase base = IndexBase::Auto);

// One label per line, aligned with actors 1..n.
std::vector<std::string> load_labels(const std::string& path);

}  // namespace dcsbm
