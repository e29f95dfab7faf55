#include "rmatch/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>
#include <unordered_set>

#include "rmatch/error.hpp"

namespace rmatch {
namespace {

void check_weight(double w) {
  if (!std::isfinite(w) || w < 0.0) {
    throw InvalidArgument("edge weight must be finite and nonnegative");
  }
}

std::uint64_t pair_key(Vertex u, Vertex v) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

// CSR incidence lists; edge ids come out in increasing order per vertex.
void build_csr(std::size_t n, std::span<const WeightedEdge> edges, bool use_u,
               bool use_v, std::vector<std::size_t>& start, std::vector<EdgeId>& adj) {
  start.assign(n + 1, 0);
  for (const auto& e : edges) {
    if (use_u) ++start[e.u + 1];
    if (use_v) ++start[e.v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) start[i + 1] += start[i];
  adj.assign(start[n], 0);
  std::vector<std::size_t> fill(start.begin(), start.end() - 1);
  for (std::size_t id = 0; id < edges.size(); ++id) {
    if (use_u) adj[fill[edges[id].u]++] = static_cast<EdgeId>(id);
    if (use_v) adj[fill[edges[id].v]++] = static_cast<EdgeId>(id);
  }
}

bool csr_consistent(std::size_t n, std::span<const WeightedEdge> edges,
                    const std::vector<std::size_t>& start,
                    const std::vector<EdgeId>& adj, bool by_u, bool by_v) {
  if (start.size() != n + 1 || start[n] != adj.size()) return false;
  std::size_t expected = 0;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t i = start[x]; i < start[x + 1]; ++i) {
      const EdgeId id = adj[i];
      if (id < 0 || static_cast<std::size_t>(id) >= edges.size()) return false;
      const auto& e = edges[id];
      const bool hit = (by_u && static_cast<std::size_t>(e.u) == x) ||
                       (by_v && static_cast<std::size_t>(e.v) == x);
      if (!hit) return false;
      if (i > start[x] && adj[i - 1] >= id) return false;
      ++expected;
    }
  }
  const std::size_t per_edge = (by_u ? 1 : 0) + (by_v ? 1 : 0);
  return expected == edges.size() * per_edge;
}

void format_weight(std::ostream& out, double w) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", w);
  out << buf;
}

}  // namespace

// ---------------------------------------------------------------------------

BipartiteWeightedGraph::BipartiteWeightedGraph(Vertex n_left, Vertex n_right,
                                               std::vector<WeightedEdge> edges)
    : n_left_(n_left), n_right_(n_right), edges_(std::move(edges)) {
  if (n_left < 0 || n_right < 0) throw InvalidArgument("negative side size");
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges_.size() * 2);
  for (const auto& e : edges_) {
    if (e.u < 0 || e.u >= n_left || e.v < 0 || e.v >= n_right) {
      throw InvalidArgument("bipartite edge index out of range");
    }
    check_weight(e.w);
    if (!seen.insert(pair_key(e.u, e.v)).second) {
      throw InvalidArgument("duplicate bipartite edge (" + std::to_string(e.u) + ", " +
                            std::to_string(e.v) + ")");
    }
  }
  build_csr(n_left_, edges_, true, false, left_start_, left_adj_);
  build_csr(n_right_, edges_, false, true, right_start_, right_adj_);
}

BipartiteWeightedGraph BipartiteWeightedGraph::canonical() const {
  auto sorted = edges_;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return std::tie(a.u, a.v) < std::tie(b.u, b.v);
  });
  return {n_left_, n_right_, std::move(sorted)};
}

BipartiteWeightedGraph BipartiteWeightedGraph::truncated(double cap) const {
  auto capped = edges_;
  for (auto& e : capped) e.w = std::min(e.w, cap);
  return {n_left_, n_right_, std::move(capped)};
}

std::vector<double> BipartiteWeightedGraph::dense_costs() const {
  const auto cells = static_cast<std::size_t>(n_left_) * static_cast<std::size_t>(n_right_);
  if (cells > 1'000'000) throw InvalidArgument("dense cost view limited to 10^6 cells");
  std::vector<double> costs(cells, INFINITY);
  for (const auto& e : edges_) costs[static_cast<std::size_t>(e.u) * n_right_ + e.v] = e.w;
  return costs;
}

bool BipartiteWeightedGraph::well_formed() const {
  return csr_consistent(n_left_, edges_, left_start_, left_adj_, true, false) &&
         csr_consistent(n_right_, edges_, right_start_, right_adj_, false, true);
}

// ---------------------------------------------------------------------------

WeightedGraph::WeightedGraph(Vertex n, std::vector<WeightedEdge> edges)
    : n_(n), edges_(std::move(edges)) {
  if (n < 0) throw InvalidArgument("negative vertex count");
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges_.size() * 2);
  for (auto& e : edges_) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
      throw InvalidArgument("edge index out of range");
    }
    if (e.u == e.v) throw InvalidArgument("self-loop at vertex " + std::to_string(e.u));
    if (e.u > e.v) std::swap(e.u, e.v);
    check_weight(e.w);
    if (!seen.insert(pair_key(e.u, e.v)).second) {
      throw InvalidArgument("duplicate edge {" + std::to_string(e.u) + ", " +
                            std::to_string(e.v) + "}");
    }
  }
  build_csr(n_, edges_, true, true, start_, adj_);
}

WeightedGraph WeightedGraph::canonical() const {
  auto sorted = edges_;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return std::tie(a.u, a.v) < std::tie(b.u, b.v);
  });
  return {n_, std::move(sorted)};
}

WeightedGraph WeightedGraph::truncated(double cap) const {
  auto capped = edges_;
  for (auto& e : capped) e.w = std::min(e.w, cap);
  return {n_, std::move(capped)};
}

WeightedGraph WeightedGraph::relabeled(std::span<const Vertex> perm) const {
  if (perm.size() != static_cast<std::size_t>(n_)) {
    throw InvalidArgument("permutation size mismatch");
  }
  std::vector<char> hit(n_, 0);
  for (Vertex x : perm) {
    if (x < 0 || x >= n_ || hit[x]) throw InvalidArgument("not a permutation");
    hit[x] = 1;
  }
  auto moved = edges_;
  for (auto& e : moved) {
    e.u = perm[e.u];
    e.v = perm[e.v];
  }
  return {n_, std::move(moved)};
}

bool WeightedGraph::well_formed() const {
  for (const auto& e : edges_) {
    if (!(e.u < e.v)) return false;
  }
  return csr_consistent(n_, edges_, start_, adj_, true, true);
}

// ---------------------------------------------------------------------------

std::string_view to_string(Model m) {
  switch (m) {
    case Model::complete_bipartite: return "complete_bipartite";
    case Model::gnnp: return "gnnp";
    case Model::complete: return "complete";
    case Model::gnp: return "gnp";
  }
  return "?";
}

Model parse_model(std::string_view name) {
  for (Model m : {Model::complete_bipartite, Model::gnnp, Model::complete, Model::gnp}) {
    if (name == to_string(m)) return m;
  }
  throw InvalidArgument("unknown model '" + std::string(name) + "'");
}

void ModelSpec::validate() const {
  if (n < 1) throw InvalidArgument("model n must be at least 1");
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("model p must lie in (0, 1]");
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw InvalidArgument("model rate must be positive and finite");
  }
  if (is_complete(model) && p != 1.0) {
    throw InvalidArgument("complete models require p = 1");
  }
}

ModelSpec ModelSpec::normalized() const {
  ModelSpec s = *this;
  if (is_complete(s.model)) s.p = 1.0;
  return s;
}

BipartiteWeightedGraph generate_bipartite(const ModelSpec& requested, RngStream& rng) {
  const ModelSpec spec = requested.normalized();
  spec.validate();
  if (!is_bipartite(spec.model)) throw InvalidArgument("model is not bipartite");
  const bool sparse = spec.model == Model::gnnp && spec.p < 1.0;
  std::vector<WeightedEdge> edges;
  const auto pairs = static_cast<std::size_t>(spec.n) * spec.n;
  edges.reserve(sparse ? static_cast<std::size_t>(pairs * spec.p * 1.1) + 16 : pairs);
  for (Vertex u = 0; u < spec.n; ++u) {
    for (Vertex v = 0; v < spec.n; ++v) {
      if (sparse && !(rng.next_unit() < spec.p)) continue;
      edges.push_back({u, v, sample_exponential(spec.rate, rng)});
    }
  }
  return {spec.n, spec.n, std::move(edges)};
}

WeightedGraph generate_general(const ModelSpec& requested, RngStream& rng) {
  const ModelSpec spec = requested.normalized();
  spec.validate();
  if (is_bipartite(spec.model)) throw InvalidArgument("model is bipartite");
  const bool sparse = spec.model == Model::gnp && spec.p < 1.0;
  std::vector<WeightedEdge> edges;
  const auto pairs = static_cast<std::size_t>(spec.n) * (spec.n - 1) / 2;
  edges.reserve(sparse ? static_cast<std::size_t>(pairs * spec.p * 1.1) + 16 : pairs);
  for (Vertex u = 0; u < spec.n; ++u) {
    for (Vertex v = u + 1; v < spec.n; ++v) {
      if (sparse && !(rng.next_unit() < spec.p)) continue;
      edges.push_back({u, v, sample_exponential(spec.rate, rng)});
    }
  }
  return {spec.n, std::move(edges)};
}

Graph generate(const ModelSpec& spec, RngStream& rng) {
  if (is_bipartite(spec.model)) return generate_bipartite(spec, rng);
  return generate_general(spec, rng);
}

BipartiteWeightedGraph augment_special_vertex(const BipartiteWeightedGraph& g,
                                              const SpecialVertexConfig& cfg,
                                              RngStream& rng) {
  if (g.n_left() != g.n_right()) {
    throw InvalidArgument("special vertex needs n_left == n_right");
  }
  if (!(cfg.lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  const Vertex n = g.n_left();
  std::vector<WeightedEdge> edges(g.edges().begin(), g.edges().end());
  edges.reserve(edges.size() + n);
  for (Vertex u = 0; u < n; ++u) {
    edges.push_back({u, n, sample_exponential(cfg.lambda, rng)});
  }
  return {n, n + 1, std::move(edges)};
}

// ---------------------------------------------------------------------------

Graph parse_graph(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  bool bipartite = false;
  long long n_left = 0, n_right = 0;
  std::vector<WeightedEdge> edges;
  std::unordered_set<std::uint64_t> seen;

  auto parse_int = [&](std::string_view tok) -> long long {
    long long x = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw ParseError(lineno, "expected integer, got '" + std::string(tok) + "'");
    }
    return x;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);

    if (!have_header) {
      if (tok[0] == "bipartite" && tok.size() == 3) {
        bipartite = true;
        n_left = parse_int(tok[1]);
        n_right = parse_int(tok[2]);
      } else if (tok[0] == "general" && tok.size() == 2) {
        n_left = n_right = parse_int(tok[1]);
      } else {
        throw ParseError(lineno, "expected header 'bipartite <nl> <nr>' or 'general <n>'");
      }
      if (n_left < 0 || n_right < 0 || n_left > INT32_MAX || n_right > INT32_MAX) {
        throw ParseError(lineno, "vertex count out of range");
      }
      have_header = true;
      continue;
    }

    if (tok.size() != 3) throw ParseError(lineno, "expected '<u> <v> <w>'");
    const long long u = parse_int(tok[0]);
    const long long v = parse_int(tok[1]);
    double w = 0.0;
    {
      const auto& t = tok[2];
      auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), w);
      if (ec != std::errc{} || ptr != t.data() + t.size()) {
        throw ParseError(lineno, "expected decimal weight, got '" + t + "'");
      }
    }
    if (u < 0 || u >= n_left) {
      throw ParseError(lineno, "index " + std::to_string(u) + " out of range (>= " +
                                   std::to_string(n_left) + ")");
    }
    if (v < 0 || v >= n_right) {
      throw ParseError(lineno, "index " + std::to_string(v) + " out of range (>= " +
                                   std::to_string(n_right) + ")");
    }
    if (!std::isfinite(w) || w < 0.0) throw ParseError(lineno, "weight must be finite and >= 0");
    Vertex a = static_cast<Vertex>(u), b = static_cast<Vertex>(v);
    if (!bipartite) {
      if (a == b) throw ParseError(lineno, "self-loop");
      if (a > b) std::swap(a, b);
    }
    if (!seen.insert(pair_key(a, b)).second) throw ParseError(lineno, "duplicate edge");
    edges.push_back({a, b, w});
  }
  if (!have_header) throw ParseError(lineno, "missing header line");
  if (bipartite) {
    return BipartiteWeightedGraph(static_cast<Vertex>(n_left), static_cast<Vertex>(n_right),
                                  std::move(edges));
  }
  return WeightedGraph(static_cast<Vertex>(n_left), std::move(edges));
}

Graph read_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_graph(in);
}

void write_graph(const Graph& g, std::ostream& out) {
  std::visit(
      [&](const auto& graph) {
        using G = std::decay_t<decltype(graph)>;
        const auto c = graph.canonical();
        if constexpr (std::is_same_v<G, BipartiteWeightedGraph>) {
          out << "bipartite " << c.n_left() << ' ' << c.n_right() << '\n';
        } else {
          out << "general " << c.n() << '\n';
        }
        for (const auto& e : c.edges()) {
          out << e.u << ' ' << e.v << ' ';
          format_weight(out, e.w);
          out << '\n';
        }
      },
      g);
}

void write_graph(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_graph(g, out);
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace rmatch
