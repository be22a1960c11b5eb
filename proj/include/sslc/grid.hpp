#pragma once

// Regular-grid geometry. Every set is a mask over the cells of a bounded
// hyper-rectangle and every Lebesgue measure is a cell-volume sum. A cell
// belongs to a geometric set iff its center does.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sslc {

inline constexpr int kMaxDim = 3;

using Point = std::array<double, kMaxDim>;
using CellIndex = std::size_t;
using MultiIndex = std::array<long, kMaxDim>;

class GridDomain {
 public:
  GridDomain() = default;

  GridDomain(int dim, std::vector<double> lower, std::vector<double> upper,
             std::vector<int> resolution)
      : dim_(dim) {
    if (dim < 1 || dim > kMaxDim)
      throw std::invalid_argument("GridDomain: dimension must be in [1, 3]");
    if (static_cast<int>(lower.size()) != dim ||
        static_cast<int>(upper.size()) != dim ||
        static_cast<int>(resolution.size()) != dim)
      throw std::invalid_argument("GridDomain: bounds/resolution size != dimension");
    cell_volume_ = 1.0;
    num_cells_ = 1;
    for (int k = 0; k < dim; ++k) {
      if (!(upper[k] > lower[k]))
        throw std::invalid_argument("GridDomain: axis " + std::to_string(k) +
                                    " has nonpositive length");
      if (resolution[k] < 2)
        throw std::invalid_argument("GridDomain: resolution must be >= 2");
      lo_[k] = lower[k];
      hi_[k] = upper[k];
      res_[k] = resolution[k];
      width_[k] = (upper[k] - lower[k]) / resolution[k];
      cell_volume_ *= width_[k];
      num_cells_ *= static_cast<std::size_t>(resolution[k]);
    }
    std::size_t stride = 1;
    for (int k = dim - 1; k >= 0; --k) {
      stride_[k] = stride;
      stride *= static_cast<std::size_t>(res_[k]);
    }
  }

  // [0,1]^dim with `res` cells per axis.
  static GridDomain unit(int dim, int res) {
    return GridDomain(dim, std::vector<double>(dim, 0.0),
                      std::vector<double>(dim, 1.0), std::vector<int>(dim, res));
  }

  int dim() const noexcept { return dim_; }
  double lower(int k) const { return lo_[k]; }
  double upper(int k) const { return hi_[k]; }
  int resolution(int k) const { return res_[k]; }
  double width(int k) const { return width_[k]; }
  std::size_t stride(int k) const { return stride_[k]; }
  double cell_volume() const noexcept { return cell_volume_; }
  std::size_t num_cells() const noexcept { return num_cells_; }

  double min_width() const {
    return *std::min_element(width_.begin(), width_.begin() + dim_);
  }

  double total_measure() const {
    double v = 1.0;
    for (int k = 0; k < dim_; ++k) v *= hi_[k] - lo_[k];
    return v;
  }

  double diameter() const {
    double s = 0.0;
    for (int k = 0; k < dim_; ++k) s += (hi_[k] - lo_[k]) * (hi_[k] - lo_[k]);
    return std::sqrt(s);
  }

  double cell_diagonal() const {
    double s = 0.0;
    for (int k = 0; k < dim_; ++k) s += width_[k] * width_[k];
    return std::sqrt(s);
  }

  MultiIndex multi_index(CellIndex c) const {
    MultiIndex m{};
    for (int k = 0; k < dim_; ++k) {
      m[k] = static_cast<long>(c / stride_[k]);
      c %= stride_[k];
    }
    return m;
  }

  CellIndex linear_index(const MultiIndex& m) const {
    CellIndex c = 0;
    for (int k = 0; k < dim_; ++k) c += static_cast<CellIndex>(m[k]) * stride_[k];
    return c;
  }

  bool in_range(const MultiIndex& m) const {
    for (int k = 0; k < dim_; ++k)
      if (m[k] < 0 || m[k] >= res_[k]) return false;
    return true;
  }

  Point cell_center(CellIndex c) const {
    const MultiIndex m = multi_index(c);
    Point p{};
    for (int k = 0; k < dim_; ++k) p[k] = lo_[k] + (m[k] + 0.5) * width_[k];
    return p;
  }

  bool contains(const Point& x) const {
    for (int k = 0; k < dim_; ++k)
      if (!(x[k] >= lo_[k] && x[k] <= hi_[k])) return false;
    return true;
  }

  // Cell holding x; points on the upper face map to the last cell.
  std::optional<CellIndex> cell_of(const Point& x) const {
    if (!contains(x)) return std::nullopt;
    MultiIndex m{};
    for (int k = 0; k < dim_; ++k) {
      long i = static_cast<long>(std::floor((x[k] - lo_[k]) / width_[k]));
      m[k] = std::clamp(i, 0L, static_cast<long>(res_[k] - 1));
    }
    return linear_index(m);
  }

  double center_distance(CellIndex a, CellIndex b) const {
    const MultiIndex ma = multi_index(a), mb = multi_index(b);
    double s = 0.0;
    for (int k = 0; k < dim_; ++k) {
      const double d = (ma[k] - mb[k]) * width_[k];
      s += d * d;
    }
    return std::sqrt(s);
  }

  friend bool operator==(const GridDomain& a, const GridDomain& b) {
    if (a.dim_ != b.dim_) return false;
    for (int k = 0; k < a.dim_; ++k)
      if (a.lo_[k] != b.lo_[k] || a.hi_[k] != b.hi_[k] || a.res_[k] != b.res_[k])
        return false;
    return true;
  }

 private:
  int dim_ = 0;
  std::array<double, kMaxDim> lo_{}, hi_{}, width_{};
  std::array<int, kMaxDim> res_{};
  std::array<std::size_t, kMaxDim> stride_{};
  double cell_volume_ = 0.0;
  std::size_t num_cells_ = 0;
};

class GridSet {
 public:
  GridSet() = default;
  explicit GridSet(const GridDomain& domain, bool filled = false)
      : domain_(domain), mask_(domain.num_cells(), filled ? 1 : 0) {}

  static GridSet from_cells(const GridDomain& domain,
                            const std::vector<CellIndex>& cells) {
    GridSet s(domain);
    for (CellIndex c : cells) s.insert(c);
    return s;
  }

  template <class Pred>
  static GridSet from_predicate(const GridDomain& domain, Pred&& pred) {
    GridSet s(domain);
    for (CellIndex c = 0; c < domain.num_cells(); ++c)
      if (pred(domain.cell_center(c))) s.mask_[c] = 1;
    return s;
  }

  const GridDomain& domain() const noexcept { return domain_; }
  const std::vector<std::uint8_t>& mask() const noexcept { return mask_; }

  bool contains(CellIndex c) const { return mask_[c] != 0; }
  void insert(CellIndex c) { mask_.at(c) = 1; }
  void erase(CellIndex c) { mask_.at(c) = 0; }

  std::size_t count() const {
    return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), 1));
  }
  bool empty() const {
    return std::find(mask_.begin(), mask_.end(), 1) == mask_.end();
  }

  std::vector<CellIndex> cells() const {
    std::vector<CellIndex> out;
    for (CellIndex c = 0; c < mask_.size(); ++c)
      if (mask_[c]) out.push_back(c);
    return out;
  }

  GridSet complement() const {
    GridSet r(*this);
    for (auto& b : r.mask_) b = b ? 0 : 1;
    return r;
  }

  bool subset_of(const GridSet& other) const {
    require_same_domain(other);
    for (std::size_t i = 0; i < mask_.size(); ++i)
      if (mask_[i] && !other.mask_[i]) return false;
    return true;
  }

  bool intersects(const GridSet& other) const {
    require_same_domain(other);
    for (std::size_t i = 0; i < mask_.size(); ++i)
      if (mask_[i] && other.mask_[i]) return true;
    return false;
  }

  GridSet operator|(const GridSet& o) const { return combine(o, [](int a, int b) { return a | b; }); }
  GridSet operator&(const GridSet& o) const { return combine(o, [](int a, int b) { return a & b; }); }
  GridSet operator^(const GridSet& o) const { return combine(o, [](int a, int b) { return a ^ b; }); }
  GridSet operator-(const GridSet& o) const { return combine(o, [](int a, int b) { return a & (b ^ 1); }); }

  friend bool operator==(const GridSet& a, const GridSet& b) {
    return a.domain_ == b.domain_ && a.mask_ == b.mask_;
  }

  void require_same_domain(const GridSet& other) const {
    if (!(domain_ == other.domain_))
      throw std::invalid_argument("GridSet: operands live on different domains");
  }

 private:
  template <class Op>
  GridSet combine(const GridSet& o, Op op) const {
    require_same_domain(o);
    GridSet r(domain_);
    for (std::size_t i = 0; i < mask_.size(); ++i)
      r.mask_[i] = static_cast<std::uint8_t>(op(mask_[i], o.mask_[i]));
    return r;
  }

  GridDomain domain_;
  std::vector<std::uint8_t> mask_;
};

inline double measure(const GridSet& s) {
  return static_cast<double>(s.count()) * s.domain().cell_volume();
}

inline GridSet sym_diff(const GridSet& a, const GridSet& b) { return a ^ b; }

// Offsets (in cells) of every cell whose center is within r of a reference
// cell center. Shared by ball queries, clipping and thickness checks.
inline std::vector<MultiIndex> ball_offsets(const GridDomain& dom, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("ball radius must be positive");
  MultiIndex reach{};
  for (int k = 0; k < dom.dim(); ++k)
    reach[k] = static_cast<long>(std::floor(r / dom.width(k) + 1e-12));
  std::vector<MultiIndex> out;
  const double r2 = r * r * (1.0 + 1e-12);
  MultiIndex o{};
  for (o[0] = -reach[0]; o[0] <= reach[0]; ++o[0]) {
    for (o[1] = -reach[1]; o[1] <= reach[1]; ++o[1]) {
      for (o[2] = -reach[2]; o[2] <= reach[2]; ++o[2]) {
        double s = 0.0;
        for (int k = 0; k < dom.dim(); ++k) {
          const double d = o[k] * dom.width(k);
          s += d * d;
        }
        if (s <= r2) out.push_back(o);
      }
    }
  }
  return out;
}

inline GridSet ball_cells(const GridDomain& dom, CellIndex center, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("ball_cells: radius must be positive");
  GridSet s(dom);
  const MultiIndex c = dom.multi_index(center);
  for (const auto& o : ball_offsets(dom, r)) {
    MultiIndex m{};
    for (int k = 0; k < dom.dim(); ++k) m[k] = c[k] + o[k];
    if (dom.in_range(m)) s.insert(dom.linear_index(m));
  }
  return s;
}

// Cells of s with at least one orthogonal neighbour outside s (or on the
// domain edge).
inline std::vector<CellIndex> boundary_cells(const GridSet& s) {
  const GridDomain& dom = s.domain();
  std::vector<CellIndex> out;
  for (CellIndex c = 0; c < dom.num_cells(); ++c) {
    if (!s.contains(c)) continue;
    const MultiIndex m = dom.multi_index(c);
    bool edge = false;
    for (int k = 0; k < dom.dim() && !edge; ++k) {
      if (m[k] == 0 || m[k] == dom.resolution(k) - 1) {
        edge = true;
        break;
      }
      if (!s.contains(c - dom.stride(k)) || !s.contains(c + dom.stride(k))) edge = true;
    }
    if (edge) out.push_back(c);
  }
  return out;
}

namespace detail {

inline double min_center_distance(const GridDomain& dom,
                                  const std::vector<CellIndex>& a,
                                  const std::vector<CellIndex>& b) {
  double best2 = std::numeric_limits<double>::infinity();
  std::vector<MultiIndex> mb;
  mb.reserve(b.size());
  for (CellIndex c : b) mb.push_back(dom.multi_index(c));
  for (CellIndex ca : a) {
    const MultiIndex ma = dom.multi_index(ca);
    for (const auto& m : mb) {
      double s = 0.0;
      for (int k = 0; k < dom.dim(); ++k) {
        const double d = (ma[k] - m[k]) * dom.width(k);
        s += d * d;
      }
      best2 = std::min(best2, s);
    }
  }
  return std::sqrt(best2);
}

}  // namespace detail

// Minimum Euclidean distance between cell centers of a and b. For disjoint
// sets the minimum is attained on boundary cells (an interior cell always
// has a neighbour strictly closer to any outside cell), so only those are
// scanned.
inline double d_infinity(const GridSet& a, const GridSet& b) {
  a.require_same_domain(b);
  if (a.empty() || b.empty())
    throw std::invalid_argument("d_infinity: empty operand");
  if (a.intersects(b)) return 0.0;
  return detail::min_center_distance(a.domain(), boundary_cells(a), boundary_cells(b));
}

// ---------------------------------------------------------------------------
// Serialization
//
//   sslc-gridset 1
//   dim <d>
//   lower <l_0> ... <l_{d-1}>
//   upper <u_0> ... <u_{d-1}>
//   resolution <r_0> ... <r_{d-1}>
//   <mask rows: '0'/'1' characters, row-major, one line per run of
//    resolution(d-1) cells>
// ---------------------------------------------------------------------------

inline void write_domain_header(std::ostream& os, const GridDomain& dom) {
  os.precision(17);
  os << "dim " << dom.dim() << '\n' << "lower";
  for (int k = 0; k < dom.dim(); ++k) os << ' ' << dom.lower(k);
  os << '\n' << "upper";
  for (int k = 0; k < dom.dim(); ++k) os << ' ' << dom.upper(k);
  os << '\n' << "resolution";
  for (int k = 0; k < dom.dim(); ++k) os << ' ' << dom.resolution(k);
  os << '\n';
}

inline GridDomain read_domain_header(std::istream& is) {
  auto expect = [&](const char* key) {
    std::string tok;
    if (!(is >> tok) || tok != key)
      throw std::runtime_error(std::string("gridset: expected '") + key + "'");
  };
  int d = 0;
  expect("dim");
  if (!(is >> d) || d < 1 || d > kMaxDim) throw std::runtime_error("gridset: bad dim");
  std::vector<double> lo(d), hi(d);
  std::vector<int> res(d);
  expect("lower");
  for (auto& v : lo) is >> v;
  expect("upper");
  for (auto& v : hi) is >> v;
  expect("resolution");
  for (auto& v : res) is >> v;
  if (!is) throw std::runtime_error("gridset: truncated header");
  return GridDomain(d, lo, hi, res);
}

inline void write_gridset(std::ostream& os, const GridSet& s) {
  const GridDomain& dom = s.domain();
  os << "sslc-gridset 1\n";
  write_domain_header(os, dom);
  const auto row = static_cast<std::size_t>(dom.resolution(dom.dim() - 1));
  std::string line;
  for (CellIndex c = 0; c < dom.num_cells(); ++c) {
    line.push_back(s.contains(c) ? '1' : '0');
    if (line.size() == row) {
      os << line << '\n';
      line.clear();
    }
  }
}

inline GridSet read_gridset(std::istream& is) {
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "sslc-gridset" || version != 1)
    throw std::runtime_error("gridset: bad magic");
  GridDomain dom = read_domain_header(is);
  GridSet s(dom);
  CellIndex c = 0;
  char ch;
  while (c < dom.num_cells() && is.get(ch)) {
    if (ch == '1') s.insert(c++);
    else if (ch == '0') ++c;
    else if (ch != '\n' && ch != '\r' && ch != ' ')
      throw std::runtime_error("gridset: unexpected character in mask");
  }
  if (c != dom.num_cells()) throw std::runtime_error("gridset: truncated mask");
  return s;
}

// CSV of member cell centers (x0[,x1[,x2]]) for plotting.
inline void write_cell_centers_csv(std::ostream& os, const GridSet& s) {
  const GridDomain& dom = s.domain();
  os.precision(10);
  for (int k = 0; k < dom.dim(); ++k) os << (k ? ",x" : "x") << k;
  os << '\n';
  for (CellIndex c : s.cells()) {
    const Point p = dom.cell_center(c);
    for (int k = 0; k < dom.dim(); ++k) os << (k ? "," : "") << p[k];
    os << '\n';
  }
}

}  // namespace sslc
