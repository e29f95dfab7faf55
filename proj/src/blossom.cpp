#include "rmatch/blossom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>

#include "rmatch/error.hpp"

namespace rmatch {
namespace {

// Maximum-weight matching over maximum-cardinality matchings, after
// Galil's presentation of Edmonds' algorithm.
//
// Edge k has endpoints 2k and 2k+1; endpoint(p) is the vertex at p, and the
// edge leaves vertex endpoint(p ^ 1) towards endpoint(p). Vertex and
// blossom ids share 0..2n-1; ids >= n are non-trivial blossoms. Duals are
// stored doubled for vertices so that slack(k) = dual[i] + dual[j] - 2 w.
class MaxWeightMatcher {
 public:
  struct Edge {
    int i, j;
    double w;
  };

  MaxWeightMatcher(int n, std::vector<Edge> edges)
      : n_(n), edges_(std::move(edges)) {
    const int m = static_cast<int>(edges_.size());
    endpoint_.resize(2 * m);
    neighbend_.assign(n_, {});
    for (int k = 0; k < m; ++k) {
      endpoint_[2 * k] = edges_[k].i;
      endpoint_[2 * k + 1] = edges_[k].j;
      neighbend_[edges_[k].i].push_back(2 * k + 1);
      neighbend_[edges_[k].j].push_back(2 * k);
    }
    double maxweight = 0.0;
    for (const auto& e : edges_) maxweight = std::max(maxweight, e.w);

    mate_.assign(n_, -1);
    label_.assign(2 * n_, 0);
    labelend_.assign(2 * n_, -1);
    inblossom_.resize(n_);
    std::iota(inblossom_.begin(), inblossom_.end(), 0);
    blossomparent_.assign(2 * n_, -1);
    blossomchilds_.assign(2 * n_, {});
    blossombase_.assign(2 * n_, -1);
    for (int v = 0; v < n_; ++v) blossombase_[v] = v;
    blossomendps_.assign(2 * n_, {});
    bestedge_.assign(2 * n_, -1);
    blossombestedges_.assign(2 * n_, std::nullopt);
    for (int b = 2 * n_ - 1; b >= n_; --b) unusedblossoms_.push_back(b);
    dualvar_.assign(2 * n_, 0.0);
    for (int v = 0; v < n_; ++v) dualvar_[v] = maxweight;
    allowedge_.assign(m, 0);
  }

  void run();

  // Partner vertex of v or -1.
  int mate_vertex(int v) const { return mate_[v] < 0 ? -1 : endpoint_[mate_[v]]; }
  double vertex_dual(int v) const { return dualvar_[v]; }
  // Live non-trivial blossoms as (leaves, dual).
  std::vector<std::pair<std::vector<int>, double>> blossoms() const {
    std::vector<std::pair<std::vector<int>, double>> out;
    for (int b = n_; b < 2 * n_; ++b) {
      if (blossombase_[b] < 0) continue;
      std::vector<int> leaves;
      collect_leaves(b, leaves);
      out.emplace_back(std::move(leaves), dualvar_[b]);
    }
    return out;
  }

 private:
  double slack(int k) const {
    const auto& e = edges_[k];
    return dualvar_[e.i] + dualvar_[e.j] - 2.0 * e.w;
  }

  void collect_leaves(int b, std::vector<int>& out) const {
    if (b < n_) {
      out.push_back(b);
      return;
    }
    for (int t : blossomchilds_[b]) collect_leaves(t, out);
  }

  std::vector<int> leaves(int b) const {
    std::vector<int> out;
    collect_leaves(b, out);
    return out;
  }

  static int wrap(int j, int len) { return ((j % len) + len) % len; }

  void assign_label(int w, int t, int p);
  int scan_blossom(int v, int w);
  void add_blossom(int base, int k);
  void expand_blossom(int b, bool endstage);
  void augment_blossom(int b, int v);
  void augment_matching(int k);

  int n_;
  std::vector<Edge> edges_;
  std::vector<int> endpoint_;
  std::vector<std::vector<int>> neighbend_;
  std::vector<int> mate_;
  std::vector<int> label_;
  std::vector<int> labelend_;
  std::vector<int> inblossom_;
  std::vector<int> blossomparent_;
  std::vector<std::vector<int>> blossomchilds_;
  std::vector<int> blossombase_;
  std::vector<std::vector<int>> blossomendps_;
  std::vector<int> bestedge_;
  std::vector<std::optional<std::vector<int>>> blossombestedges_;
  std::vector<int> unusedblossoms_;
  std::vector<double> dualvar_;
  std::vector<char> allowedge_;
  std::vector<int> queue_;
};

void MaxWeightMatcher::assign_label(int w, int t, int p) {
  const int b = inblossom_[w];
  label_[w] = label_[b] = t;
  labelend_[w] = labelend_[b] = p;
  bestedge_[w] = bestedge_[b] = -1;
  if (t == 1) {
    collect_leaves(b, queue_);
  } else if (t == 2) {
    const int base = blossombase_[b];
    assign_label(endpoint_[mate_[base]], 1, mate_[base] ^ 1);
  }
}

// Walks back from v and w along the alternating tree; returns the base of
// the new blossom, or -1 if the trees are disjoint (augmenting path found).
int MaxWeightMatcher::scan_blossom(int v, int w) {
  std::vector<int> path;
  int base = -1;
  while (v != -1 || w != -1) {
    int b = inblossom_[v];
    if (label_[b] & 4) {
      base = blossombase_[b];
      break;
    }
    path.push_back(b);
    label_[b] = 5;
    if (labelend_[b] == -1) {
      v = -1;
    } else {
      v = endpoint_[labelend_[b]];
      b = inblossom_[v];
      v = endpoint_[labelend_[b]];
    }
    if (w != -1) std::swap(v, w);
  }
  for (int b : path) label_[b] = 1;
  return base;
}

void MaxWeightMatcher::add_blossom(int base, int k) {
  int v = edges_[k].i;
  int w = edges_[k].j;
  const int bb = inblossom_[base];
  int bv = inblossom_[v];
  int bw = inblossom_[w];
  const int b = unusedblossoms_.back();
  unusedblossoms_.pop_back();
  blossombase_[b] = base;
  blossomparent_[b] = -1;
  blossomparent_[bb] = b;
  auto& path = blossomchilds_[b];
  auto& endps = blossomendps_[b];
  path.clear();
  endps.clear();
  while (bv != bb) {
    blossomparent_[bv] = b;
    path.push_back(bv);
    endps.push_back(labelend_[bv]);
    v = endpoint_[labelend_[bv]];
    bv = inblossom_[v];
  }
  path.push_back(bb);
  std::reverse(path.begin(), path.end());
  std::reverse(endps.begin(), endps.end());
  endps.push_back(2 * k);
  while (bw != bb) {
    blossomparent_[bw] = b;
    path.push_back(bw);
    endps.push_back(labelend_[bw] ^ 1);
    w = endpoint_[labelend_[bw]];
    bw = inblossom_[w];
  }
  label_[b] = 1;
  labelend_[b] = labelend_[bb];
  dualvar_[b] = 0.0;
  for (int leaf : leaves(b)) {
    if (label_[inblossom_[leaf]] == 2) queue_.push_back(leaf);
    inblossom_[leaf] = b;
  }

  std::vector<int> bestedgeto(2 * n_, -1);
  for (int sub : path) {
    std::vector<int> candidates;
    if (!blossombestedges_[sub]) {
      for (int leaf : leaves(sub)) {
        for (int p : neighbend_[leaf]) candidates.push_back(p / 2);
      }
    } else {
      candidates = *blossombestedges_[sub];
    }
    for (int kk : candidates) {
      int j = edges_[kk].j;
      if (inblossom_[j] == b) j = edges_[kk].i;
      const int bj = inblossom_[j];
      if (bj != b && label_[bj] == 1 &&
          (bestedgeto[bj] == -1 || slack(kk) < slack(bestedgeto[bj]))) {
        bestedgeto[bj] = kk;
      }
    }
    blossombestedges_[sub].reset();
    bestedge_[sub] = -1;
  }
  std::vector<int> best;
  for (int kk : bestedgeto) {
    if (kk != -1) best.push_back(kk);
  }
  bestedge_[b] = -1;
  for (int kk : best) {
    if (bestedge_[b] == -1 || slack(kk) < slack(bestedge_[b])) bestedge_[b] = kk;
  }
  blossombestedges_[b] = std::move(best);
}

void MaxWeightMatcher::expand_blossom(int b, bool endstage) {
  for (int s : blossomchilds_[b]) {
    blossomparent_[s] = -1;
    if (s < n_) {
      inblossom_[s] = s;
    } else if (endstage && dualvar_[s] == 0.0) {
      expand_blossom(s, endstage);
    } else {
      for (int leaf : leaves(s)) inblossom_[leaf] = s;
    }
  }
  if (!endstage && label_[b] == 2) {
    auto& childs = blossomchilds_[b];
    auto& endps = blossomendps_[b];
    const int len = static_cast<int>(childs.size());
    const int entrychild = inblossom_[endpoint_[labelend_[b] ^ 1]];
    int j = static_cast<int>(std::find(childs.begin(), childs.end(), entrychild) -
                             childs.begin());
    int jstep, endptrick;
    if (j & 1) {
      j -= len;
      jstep = 1;
      endptrick = 0;
    } else {
      jstep = -1;
      endptrick = 1;
    }
    int p = labelend_[b];
    while (j != 0) {
      label_[endpoint_[p ^ 1]] = 0;
      label_[endpoint_[endps[wrap(j - endptrick, len)] ^ endptrick ^ 1]] = 0;
      assign_label(endpoint_[p ^ 1], 2, p);
      allowedge_[endps[wrap(j - endptrick, len)] / 2] = 1;
      j += jstep;
      p = endps[wrap(j - endptrick, len)] ^ endptrick;
      allowedge_[p / 2] = 1;
      j += jstep;
    }
    int bv = childs[wrap(j, len)];
    label_[endpoint_[p ^ 1]] = label_[bv] = 2;
    labelend_[endpoint_[p ^ 1]] = labelend_[bv] = p;
    bestedge_[bv] = -1;
    j += jstep;
    while (childs[wrap(j, len)] != entrychild) {
      bv = childs[wrap(j, len)];
      if (label_[bv] == 1) {
        j += jstep;
        continue;
      }
      int reached = -1;
      for (int leaf : leaves(bv)) {
        if (label_[leaf] != 0) {
          reached = leaf;
          break;
        }
      }
      if (reached >= 0) {
        label_[reached] = 0;
        label_[endpoint_[mate_[blossombase_[bv]]]] = 0;
        assign_label(reached, 2, labelend_[reached]);
      }
      j += jstep;
    }
  }
  label_[b] = labelend_[b] = -1;
  blossomchilds_[b].clear();
  blossomendps_[b].clear();
  blossombase_[b] = -1;
  blossombestedges_[b].reset();
  bestedge_[b] = -1;
  unusedblossoms_.push_back(b);
}

// Flips the matching inside blossom b so that its base becomes v.
void MaxWeightMatcher::augment_blossom(int b, int v) {
  int t = v;
  while (blossomparent_[t] != b) t = blossomparent_[t];
  if (t >= n_) augment_blossom(t, v);
  auto& childs = blossomchilds_[b];
  auto& endps = blossomendps_[b];
  const int len = static_cast<int>(childs.size());
  const int i = static_cast<int>(std::find(childs.begin(), childs.end(), t) - childs.begin());
  int j = i;
  int jstep, endptrick;
  if (i & 1) {
    j -= len;
    jstep = 1;
    endptrick = 0;
  } else {
    jstep = -1;
    endptrick = 1;
  }
  while (j != 0) {
    j += jstep;
    t = childs[wrap(j, len)];
    const int p = endps[wrap(j - endptrick, len)] ^ endptrick;
    if (t >= n_) augment_blossom(t, endpoint_[p]);
    j += jstep;
    t = childs[wrap(j, len)];
    if (t >= n_) augment_blossom(t, endpoint_[p ^ 1]);
    mate_[endpoint_[p]] = p ^ 1;
    mate_[endpoint_[p ^ 1]] = p;
  }
  std::rotate(childs.begin(), childs.begin() + i, childs.end());
  std::rotate(endps.begin(), endps.begin() + i, endps.end());
  blossombase_[b] = blossombase_[childs[0]];
}

void MaxWeightMatcher::augment_matching(int k) {
  const int v = edges_[k].i;
  const int w = edges_[k].j;
  for (auto [s, p] : {std::pair{v, 2 * k + 1}, std::pair{w, 2 * k}}) {
    while (true) {
      const int bs = inblossom_[s];
      if (bs >= n_) augment_blossom(bs, s);
      mate_[s] = p;
      if (labelend_[bs] == -1) break;
      const int t = endpoint_[labelend_[bs]];
      const int bt = inblossom_[t];
      s = endpoint_[labelend_[bt]];
      const int j = endpoint_[labelend_[bt] ^ 1];
      if (bt >= n_) augment_blossom(bt, j);
      mate_[j] = labelend_[bt];
      p = labelend_[bt] ^ 1;
    }
  }
}

void MaxWeightMatcher::run() {
  for (int stage = 0; stage < n_; ++stage) {
    std::fill(label_.begin(), label_.end(), 0);
    std::fill(bestedge_.begin(), bestedge_.end(), -1);
    for (int b = n_; b < 2 * n_; ++b) blossombestedges_[b].reset();
    std::fill(allowedge_.begin(), allowedge_.end(), 0);
    queue_.clear();
    for (int v = 0; v < n_; ++v) {
      if (mate_[v] == -1 && label_[inblossom_[v]] == 0) assign_label(v, 1, -1);
    }

    bool augmented = false;
    while (true) {
      while (!queue_.empty() && !augmented) {
        const int v = queue_.back();
        queue_.pop_back();
        for (int p : neighbend_[v]) {
          const int k = p / 2;
          const int w = endpoint_[p];
          if (inblossom_[v] == inblossom_[w]) continue;
          double kslack = 0.0;
          if (!allowedge_[k]) {
            kslack = slack(k);
            if (kslack <= 0.0) allowedge_[k] = 1;
          }
          if (allowedge_[k]) {
            if (label_[inblossom_[w]] == 0) {
              assign_label(w, 2, p ^ 1);
            } else if (label_[inblossom_[w]] == 1) {
              const int base = scan_blossom(v, w);
              if (base >= 0) {
                add_blossom(base, k);
              } else {
                augment_matching(k);
                augmented = true;
                break;
              }
            } else if (label_[w] == 0) {
              label_[w] = 2;
              labelend_[w] = p ^ 1;
            }
          } else if (label_[inblossom_[w]] == 1) {
            const int b = inblossom_[v];
            if (bestedge_[b] == -1 || kslack < slack(bestedge_[b])) bestedge_[b] = k;
          } else if (label_[w] == 0) {
            if (bestedge_[w] == -1 || kslack < slack(bestedge_[w])) bestedge_[w] = k;
          }
        }
      }
      if (augmented) break;

      // Maximum cardinality: vertex duals are unconstrained, so the
      // "vertex dual reaches zero" event is not used.
      int deltatype = -1;
      double delta = 0.0;
      int deltaedge = -1;
      int deltablossom = -1;
      for (int v = 0; v < n_; ++v) {
        if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
          const double d = slack(bestedge_[v]);
          if (deltatype == -1 || d < delta) {
            delta = d;
            deltatype = 2;
            deltaedge = bestedge_[v];
          }
        }
      }
      for (int b = 0; b < 2 * n_; ++b) {
        if (blossomparent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
          const double d = slack(bestedge_[b]) / 2.0;
          if (deltatype == -1 || d < delta) {
            delta = d;
            deltatype = 3;
            deltaedge = bestedge_[b];
          }
        }
      }
      for (int b = n_; b < 2 * n_; ++b) {
        if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 2 &&
            (deltatype == -1 || dualvar_[b] < delta)) {
          delta = dualvar_[b];
          deltatype = 4;
          deltablossom = b;
        }
      }
      if (deltatype == -1) break;  // no augmenting path can appear any more

      for (int v = 0; v < n_; ++v) {
        const int l = label_[inblossom_[v]];
        if (l == 1) {
          dualvar_[v] -= delta;
        } else if (l == 2) {
          dualvar_[v] += delta;
        }
      }
      for (int b = n_; b < 2 * n_; ++b) {
        if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
          if (label_[b] == 1) {
            dualvar_[b] += delta;
          } else if (label_[b] == 2) {
            dualvar_[b] -= delta;
          }
        }
      }

      if (deltatype == 2) {
        allowedge_[deltaedge] = 1;
        int i = edges_[deltaedge].i;
        if (label_[inblossom_[i]] == 0) i = edges_[deltaedge].j;
        queue_.push_back(i);
      } else if (deltatype == 3) {
        allowedge_[deltaedge] = 1;
        queue_.push_back(edges_[deltaedge].i);
      } else {
        expand_blossom(deltablossom, false);
      }
    }
    if (!augmented) break;

    for (int b = n_; b < 2 * n_; ++b) {
      if (blossomparent_[b] == -1 && blossombase_[b] >= 0 && label_[b] == 1 &&
          dualvar_[b] == 0.0) {
        expand_blossom(b, true);
      }
    }
  }
}

}  // namespace

PerfectMatchingResult solve_perfect_matching(const WeightedGraph& g) {
  const int n = g.n();
  if (n % 2 != 0) throw OddVertexCount(static_cast<std::size_t>(n));
  PerfectMatchingResult result;
  if (n == 0) return result;

  // Maximizing -w over maximum-cardinality matchings gives the cheapest
  // perfect matching whenever one exists.
  std::vector<MaxWeightMatcher::Edge> edges;
  edges.reserve(g.num_edges());
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v, -e.w});
  MaxWeightMatcher matcher(n, std::move(edges));
  matcher.run();

  std::vector<EdgeId> edge_of(n, -1);
  for (Vertex v = 0; v < n; ++v) {
    const int partner = matcher.mate_vertex(v);
    if (partner < 0) throw NoPerfectMatching();
    if (v < partner) {
      for (EdgeId id : g.adjacency(v)) {
        const auto& e = g.edge(id);
        if (e.u + e.v - v == partner) edge_of[v] = id;
      }
      result.matching.pairs.push_back({v, partner, edge_of[v]});
    }
  }
  result.matching.cost = matching_weight(g.edges(), result.matching);

  auto& cert = result.certificate;
  cert.vertex_duals.resize(n);
  for (Vertex v = 0; v < n; ++v) cert.vertex_duals[v] = -matcher.vertex_dual(v) / 2.0;
  for (auto& [leaves, dual] : matcher.blossoms()) {
    Blossom b;
    b.members.assign(leaves.begin(), leaves.end());
    std::sort(b.members.begin(), b.members.end());
    b.dual = -dual;
    cert.blossoms.push_back(std::move(b));
  }
  return result;
}

Matching brute_force_general(const WeightedGraph& g) {
  const Vertex n = g.n();
  if (n > 12) throw InvalidArgument("general brute force limited to n <= 12");
  if (n % 2 != 0) throw OddVertexCount(static_cast<std::size_t>(n));

  std::vector<char> used(n, 0);
  std::vector<EdgeId> current, best;
  double best_cost = std::numeric_limits<double>::infinity();
  bool found = false;

  auto recurse = [&](auto&& self, double partial) -> void {
    Vertex v = 0;
    while (v < n && used[v]) ++v;
    if (v == n) {
      if (!found || partial < best_cost) {
        found = true;
        best_cost = partial;
        best = current;
      }
      return;
    }
    used[v] = 1;
    for (EdgeId id : g.adjacency(v)) {
      const auto& e = g.edge(id);
      const Vertex other = e.u == v ? e.v : e.u;
      if (used[other]) continue;
      used[other] = 1;
      current.push_back(id);
      self(self, partial + e.w);
      current.pop_back();
      used[other] = 0;
    }
    used[v] = 0;
  };
  recurse(recurse, 0.0);
  if (!found) throw NoPerfectMatching();

  Matching m;
  for (EdgeId id : best) m.pairs.push_back({g.edge(id).u, g.edge(id).v, id});
  std::sort(m.pairs.begin(), m.pairs.end(),
            [](const auto& a, const auto& b) { return a.u < b.u; });
  m.cost = matching_weight(g.edges(), m);
  return m;
}

CertificateReport verify_certificate(const WeightedGraph& g, const Matching& m,
                                     const BlossomState& state, double tol) {
  CertificateReport report;
  auto violation = [&](std::string msg) {
    report.ok = false;
    if (report.violations.size() < 32) report.violations.push_back(std::move(msg));
  };
  const Vertex n = g.n();
  if (state.vertex_duals.size() != static_cast<std::size_t>(n)) {
    violation("vertex dual vector has wrong size");
    return report;
  }

  // Primal: perfect matching made of graph edges.
  std::vector<Vertex> mate(n, -1);
  for (const auto& p : m.pairs) {
    if (p.edge < 0 || static_cast<std::size_t>(p.edge) >= g.num_edges()) {
      violation("matched pair is not an edge");
      continue;
    }
    const auto& e = g.edge(p.edge);
    if (!((e.u == p.u && e.v == p.v) || (e.u == p.v && e.v == p.u))) {
      violation("matched pair does not match its edge id");
      continue;
    }
    if (mate[e.u] >= 0 || mate[e.v] >= 0) violation("matching is not vertex-disjoint");
    mate[e.u] = e.v;
    mate[e.v] = e.u;
  }
  for (Vertex v = 0; v < n; ++v) {
    if (mate[v] < 0) violation("vertex " + std::to_string(v) + " is unmatched");
  }

  // Blossom family: odd, within range, laminar, nonpositive duals.
  const auto& bl = state.blossoms;
  std::vector<std::vector<std::size_t>> containing(n);
  std::vector<std::vector<char>> member(bl.size());
  for (std::size_t b = 0; b < bl.size(); ++b) {
    const auto& mem = bl[b].members;
    if (mem.size() < 3 || mem.size() % 2 == 0) {
      violation("blossom " + std::to_string(b) + " is not an odd set of size >= 3");
    }
    if (bl[b].dual > tol) violation("blossom " + std::to_string(b) + " has positive dual");
    member[b].assign(n, 0);
    for (Vertex v : mem) {
      if (v < 0 || v >= n || member[b][v]) {
        violation("blossom " + std::to_string(b) + " has a bad member list");
        continue;
      }
      member[b][v] = 1;
      containing[v].push_back(b);
    }
  }
  for (std::size_t a = 0; a < bl.size(); ++a) {
    for (std::size_t b = a + 1; b < bl.size(); ++b) {
      std::size_t common = 0;
      for (Vertex v : bl[a].members) {
        if (v >= 0 && v < n && member[b][v]) ++common;
      }
      if (common != 0 && common != bl[a].members.size() && common != bl[b].members.size()) {
        violation("blossoms " + std::to_string(a) + " and " + std::to_string(b) +
                  " are not laminar");
      }
    }
  }

  auto shared_dual = [&](Vertex u, Vertex v) {
    double z = 0.0;
    for (std::size_t b : containing[u]) {
      if (member[b][v]) z += bl[b].dual;
    }
    return z;
  };

  // Dual feasibility on every edge, tightness on matched edges.
  for (std::size_t id = 0; id < g.num_edges(); ++id) {
    const auto& e = g.edge(static_cast<EdgeId>(id));
    const double lhs = state.vertex_duals[e.u] + state.vertex_duals[e.v] + shared_dual(e.u, e.v);
    if (lhs > e.w + tol) {
      violation("edge {" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                "} violates dual feasibility by " + std::to_string(lhs - e.w));
    }
    if (mate[e.u] == e.v && std::abs(lhs - e.w) > tol) {
      violation("matched edge {" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                "} is not tight");
    }
  }

  // Complementary slackness for blossom duals.
  for (std::size_t b = 0; b < bl.size(); ++b) {
    if (std::abs(bl[b].dual) <= tol) continue;
    std::size_t inside = 0;
    for (Vertex v : bl[b].members) {
      if (v >= 0 && v < n && mate[v] >= 0 && member[b][mate[v]]) ++inside;
    }
    if (inside / 2 != (bl[b].members.size() - 1) / 2) {
      violation("blossom " + std::to_string(b) + " with nonzero dual is not full");
    }
  }
  return report;
}

}  // namespace rmatch
