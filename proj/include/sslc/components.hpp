#pragma once

// Connected components of grid sets, merging of components closer than a
// threshold into homogeneous regions, thickness/separation diagnostics and
// the matching between true and estimated components.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "sslc/grid.hpp"
#include "sslc/rng.hpp"

namespace sslc {

struct RegionLabeling {
  GridSet source;
  std::vector<int> component_of;                 // per cell, -1 outside source
  std::vector<std::vector<CellIndex>> components;  // ascending cell lists
  std::vector<std::vector<int>> regions;           // component ids per region
  std::vector<int> region_of_component;
  double tau = 0.0;  // merge threshold, 0 when unmerged

  const GridDomain& domain() const { return source.domain(); }
  std::size_t num_components() const { return components.size(); }
  std::size_t num_regions() const { return regions.size(); }

  int region_of_cell(CellIndex c) const {
    const int l = component_of[c];
    return l < 0 ? -1 : region_of_component[l];
  }

  GridSet component_set(std::size_t l) const {
    return GridSet::from_cells(domain(), components[l]);
  }

  GridSet region_set(std::size_t k) const {
    GridSet s(domain());
    for (int l : regions[k])
      for (CellIndex c : components[l]) s.insert(c);
    return s;
  }
};

// Components under orthogonal (2d-neighbour) adjacency. Ids follow the
// smallest member cell index.
inline RegionLabeling connected_components(const GridSet& s) {
  const GridDomain& dom = s.domain();
  RegionLabeling out;
  out.source = s;
  out.component_of.assign(dom.num_cells(), -1);
  std::vector<CellIndex> stack;
  for (CellIndex start = 0; start < dom.num_cells(); ++start) {
    if (!s.contains(start) || out.component_of[start] >= 0) continue;
    const int id = static_cast<int>(out.components.size());
    std::vector<CellIndex> members;
    out.component_of[start] = id;
    stack.assign(1, start);
    while (!stack.empty()) {
      const CellIndex c = stack.back();
      stack.pop_back();
      members.push_back(c);
      const MultiIndex m = dom.multi_index(c);
      for (int k = 0; k < dom.dim(); ++k) {
        if (m[k] > 0) {
          const CellIndex n = c - dom.stride(k);
          if (s.contains(n) && out.component_of[n] < 0) {
            out.component_of[n] = id;
            stack.push_back(n);
          }
        }
        if (m[k] + 1 < dom.resolution(k)) {
          const CellIndex n = c + dom.stride(k);
          if (s.contains(n) && out.component_of[n] < 0) {
            out.component_of[n] = id;
            stack.push_back(n);
          }
        }
      }
    }
    std::sort(members.begin(), members.end());
    out.components.push_back(std::move(members));
  }
  out.regions.resize(out.components.size());
  out.region_of_component.resize(out.components.size());
  for (std::size_t l = 0; l < out.components.size(); ++l) {
    out.regions[l] = {static_cast<int>(l)};
    out.region_of_component[l] = static_cast<int>(l);
  }
  return out;
}

namespace detail {

struct ComponentGeometry {
  std::vector<CellIndex> boundary;
  MultiIndex lo{}, hi{};
};

inline std::vector<ComponentGeometry> component_geometry(const RegionLabeling& lab) {
  const GridDomain& dom = lab.domain();
  std::vector<ComponentGeometry> geo(lab.num_components());
  for (std::size_t l = 0; l < lab.num_components(); ++l) {
    auto& g = geo[l];
    for (int k = 0; k < kMaxDim; ++k) {
      g.lo[k] = std::numeric_limits<long>::max();
      g.hi[k] = std::numeric_limits<long>::min();
    }
    for (CellIndex c : lab.components[l]) {
      const MultiIndex m = dom.multi_index(c);
      bool edge = false;
      for (int k = 0; k < dom.dim(); ++k) {
        g.lo[k] = std::min(g.lo[k], m[k]);
        g.hi[k] = std::max(g.hi[k], m[k]);
        if (m[k] == 0 || m[k] + 1 == dom.resolution(k) ||
            lab.component_of[c - dom.stride(k)] != static_cast<int>(l) ||
            lab.component_of[c + dom.stride(k)] != static_cast<int>(l))
          edge = true;
      }
      if (edge) g.boundary.push_back(c);
    }
  }
  return geo;
}

inline double bbox_gap(const GridDomain& dom, const ComponentGeometry& a,
                       const ComponentGeometry& b) {
  double s = 0.0;
  for (int k = 0; k < dom.dim(); ++k) {
    const long gap = std::max({0L, b.lo[k] - a.hi[k], a.lo[k] - b.hi[k]});
    const double d = gap * dom.width(k);
    s += d * d;
  }
  return std::sqrt(s);
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace detail

// Distance between two components of a labeling (cell centers).
inline double component_distance(const RegionLabeling& lab, std::size_t a, std::size_t b) {
  return d_infinity(lab.component_set(a), lab.component_set(b));
}

// Transitive closure of {d_inf(T_l, T_l') <= tau}. The result is unique and
// distinct regions are separated by more than tau.
inline RegionLabeling merge_regions(const RegionLabeling& lab, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("merge_regions: tau must be positive");
  const GridDomain& dom = lab.domain();
  const auto geo = detail::component_geometry(lab);
  const std::size_t n = lab.num_components();
  detail::UnionFind uf(n);
  const double tau_tol = tau * (1.0 + 1e-12);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      if (uf.find(static_cast<int>(a)) == uf.find(static_cast<int>(b))) continue;
      if (detail::bbox_gap(dom, geo[a], geo[b]) > tau_tol) continue;
      if (detail::min_center_distance(dom, geo[a].boundary, geo[b].boundary) <= tau_tol)
        uf.unite(static_cast<int>(a), static_cast<int>(b));
    }
  RegionLabeling out = lab;
  out.tau = tau;
  out.regions.clear();
  std::map<int, int> root_to_region;
  for (std::size_t l = 0; l < n; ++l) {
    const int root = uf.find(static_cast<int>(l));
    auto [it, inserted] = root_to_region.try_emplace(root, static_cast<int>(out.regions.size()));
    if (inserted) out.regions.emplace_back();
    out.regions[it->second].push_back(static_cast<int>(l));
    out.region_of_component[l] = it->second;
  }
  return out;
}

// ---------------------------------------------------------------------------
// r0-connectedness
// ---------------------------------------------------------------------------

struct ThicknessResult {
  bool pass = true;
  std::optional<CellIndex> witness_cell;
  double witness_radius = 0.0;
  double witness_measure = 0.0;   // Leb(B(y, r) ∩ C)
  double required_measure = 0.0;  // c0 r^d
  std::size_t cells_checked = 0;
};

struct ThicknessOptions {
  std::size_t path_samples = 32;
  std::vector<double> radius_fractions{0.25, 0.5, 0.75, 1.0};
  std::uint64_t seed = 0x7230;
};

namespace detail {

// Shortest orthogonal cell path from a to b inside s (BFS).
inline std::vector<CellIndex> shortest_cell_path(const GridSet& s, CellIndex a, CellIndex b) {
  const GridDomain& dom = s.domain();
  std::vector<std::int64_t> parent(dom.num_cells(), -1);
  std::deque<CellIndex> queue{a};
  parent[a] = static_cast<std::int64_t>(a);
  while (!queue.empty()) {
    const CellIndex c = queue.front();
    queue.pop_front();
    if (c == b) break;
    const MultiIndex m = dom.multi_index(c);
    for (int k = 0; k < dom.dim(); ++k) {
      for (int dir = -1; dir <= 1; dir += 2) {
        const long q = m[k] + dir;
        if (q < 0 || q >= dom.resolution(k)) continue;
        const CellIndex n = dir < 0 ? c - dom.stride(k) : c + dom.stride(k);
        if (!s.contains(n) || parent[n] >= 0) continue;
        parent[n] = static_cast<std::int64_t>(c);
        queue.push_back(n);
      }
    }
  }
  if (parent[b] < 0) return {};
  std::vector<CellIndex> path{b};
  while (path.back() != a) path.push_back(static_cast<CellIndex>(parent[path.back()]));
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace detail

// Checks Leb(B(y, r) ∩ s) >= c0 r^d for r in a grid of radii up to r0 at
// every cell y on shortest cell paths between random pairs of cells. This
// is sound on the grid and approximate for the continuum definition, which
// quantifies over every path.
inline ThicknessResult r0_connectedness_check(const GridSet& s, double r0, double c0,
                                              const ThicknessOptions& opt = {}) {
  if (!(r0 > 0.0)) throw std::invalid_argument("r0_connectedness_check: r0 must be positive");
  const RegionLabeling lab = connected_components(s);
  if (lab.num_components() != 1)
    throw std::invalid_argument("r0_connectedness_check: set has " +
                                std::to_string(lab.num_components()) +
                                " components, expected exactly one");
  const GridDomain& dom = s.domain();
  const auto& cells = lab.components[0];

  std::vector<std::pair<double, std::vector<MultiIndex>>> balls;
  for (double f : opt.radius_fractions) {
    const double r = f * r0;
    balls.emplace_back(r, ball_offsets(dom, r));
  }

  ThicknessResult res;
  std::vector<std::uint8_t> seen(dom.num_cells(), 0);
  auto check_cell = [&](CellIndex y) {
    if (seen[y]) return true;
    seen[y] = 1;
    ++res.cells_checked;
    const MultiIndex my = dom.multi_index(y);
    for (const auto& [r, offsets] : balls) {
      std::size_t hits = 0;
      for (const auto& o : offsets) {
        MultiIndex q{};
        for (int k = 0; k < dom.dim(); ++k) q[k] = my[k] + o[k];
        if (dom.in_range(q) && s.contains(dom.linear_index(q))) ++hits;
      }
      const double got = static_cast<double>(hits) * dom.cell_volume();
      const double need = c0 * std::pow(r, dom.dim());
      if (got < need) {
        res.pass = false;
        res.witness_cell = y;
        res.witness_radius = r;
        res.witness_measure = got;
        res.required_measure = need;
        return false;
      }
    }
    return true;
  };

  Rng rng(opt.seed);
  for (std::size_t t = 0; t < opt.path_samples; ++t) {
    const CellIndex a = cells[rng.next() % cells.size()];
    const CellIndex b = cells[rng.next() % cells.size()];
    for (CellIndex y : detail::shortest_cell_path(s, a, b))
      if (!check_cell(y)) return res;
  }
  return res;
}

// ---------------------------------------------------------------------------
// s0-separation
// ---------------------------------------------------------------------------

struct SeparationResult {
  bool pass = true;
  double min_distance = std::numeric_limits<double>::infinity();
};

// Fewer than two sets pass trivially with min_distance = +inf.
inline SeparationResult separation_check(const std::vector<GridSet>& sets, double s0) {
  SeparationResult r;
  for (std::size_t a = 0; a < sets.size(); ++a)
    for (std::size_t b = a + 1; b < sets.size(); ++b)
      r.min_distance = std::min(r.min_distance, d_infinity(sets[a], sets[b]));
  r.pass = sets.size() < 2 || r.min_distance >= s0;
  return r;
}

inline SeparationResult separation_check(const RegionLabeling& lab, double s0) {
  std::vector<GridSet> sets;
  for (std::size_t k = 0; k < lab.num_regions(); ++k) sets.push_back(lab.region_set(k));
  return separation_check(sets, s0);
}

// ---------------------------------------------------------------------------
// Matching true components to estimated regions
// ---------------------------------------------------------------------------

struct MatchIssue {
  enum class Kind { unmatched, split, shared } kind;
  int true_region = -1;
  int other = -1;  // competing true region for `shared`
};

struct MatchReport {
  std::vector<std::vector<int>> kappa;  // per true region j: estimated regions hitting it
  bool event_d = false;
  std::vector<MatchIssue> issues;
  std::vector<int> assignment;  // k(j), filled only when event_d holds
};

inline MatchReport match_components(const RegionLabeling& truth, const RegionLabeling& est) {
  truth.source.require_same_domain(est.source);
  MatchReport rep;
  const std::size_t J = truth.num_regions();
  rep.kappa.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    std::set<int> ks;
    for (int l : truth.regions[j])
      for (CellIndex c : truth.components[l]) {
        const int k = est.region_of_cell(c);
        if (k >= 0) ks.insert(k);
      }
    rep.kappa[j].assign(ks.begin(), ks.end());
  }
  std::map<int, int> owner;
  for (std::size_t j = 0; j < J; ++j) {
    const auto& kj = rep.kappa[j];
    if (kj.empty()) {
      rep.issues.push_back({MatchIssue::Kind::unmatched, static_cast<int>(j), -1});
    } else if (kj.size() > 1) {
      rep.issues.push_back({MatchIssue::Kind::split, static_cast<int>(j), -1});
    }
    for (int k : kj) {
      auto [it, inserted] = owner.try_emplace(k, static_cast<int>(j));
      if (!inserted)
        rep.issues.push_back({MatchIssue::Kind::shared, it->second, static_cast<int>(j)});
    }
  }
  rep.event_d = rep.issues.empty();
  if (rep.event_d)
    for (const auto& kj : rep.kappa) rep.assignment.push_back(kj.front());
  return rep;
}

inline nlohmann::json to_json(const MatchReport& r) {
  nlohmann::json j;
  j["event_d"] = r.event_d;
  j["kappa"] = r.kappa;
  j["assignment"] = r.assignment;
  auto issues = nlohmann::json::array();
  for (const auto& i : r.issues) {
    const char* kind = i.kind == MatchIssue::Kind::unmatched ? "unmatched"
                       : i.kind == MatchIssue::Kind::split   ? "split"
                                                             : "shared";
    nlohmann::json e{{"kind", kind}, {"true_region", i.true_region}};
    if (i.other >= 0) e["other_true_region"] = i.other;
    issues.push_back(e);
  }
  j["issues"] = issues;
  return j;
}

// CSV rows: cell,component,region for every member cell.
inline void write_labeling_csv(std::ostream& os, const RegionLabeling& lab) {
  os << "cell,component,region\n";
  for (CellIndex c = 0; c < lab.component_of.size(); ++c) {
    const int l = lab.component_of[c];
    if (l < 0) continue;
    os << c << ',' << l << ',' << lab.region_of_component[l] << '\n';
  }
}

}  // namespace sslc
