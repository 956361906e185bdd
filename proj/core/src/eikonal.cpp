#include "seistomo/eikonal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace seistomo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct AxisGeom {
  std::int64_t stride;
  double h;
};

/// Binary min-heap over (tau, node) with position tracking so updates
/// decrease keys in place. Ties break by node index for determinism.
class FrontHeap {
public:
  explicit FrontHeap(std::int64_t n) : pos_(n, -1), key_(n, 0.0) {}

  bool empty() const { return heap_.empty(); }
  bool contains(std::int64_t node) const { return pos_[node] >= 0; }

  void push_or_decrease(std::int64_t node, double tau) {
    if (pos_[node] < 0) {
      heap_.push_back(node);
      pos_[node] = static_cast<std::int64_t>(heap_.size()) - 1;
      tau_of(node) = tau;
      sift_up(pos_[node]);
    } else if (tau < tau_of(node)) {
      tau_of(node) = tau;
      sift_up(pos_[node]);
    }
  }

  std::pair<std::int64_t, double> pop_min() {
    const std::int64_t node = heap_[0];
    const double tau = tau_of(node);
    swap_nodes(0, static_cast<std::int64_t>(heap_.size()) - 1);
    pos_[node] = -1;
    heap_.pop_back();
    if (!heap_.empty()) sift_down(0);
    return {node, tau};
  }

private:
  double& tau_of(std::int64_t node) { return key_[node]; }
  bool less(std::int64_t a, std::int64_t b) {
    const double ta = key_[heap_[a]], tb = key_[heap_[b]];
    if (ta != tb) return ta < tb;
    return heap_[a] < heap_[b];
  }
  void swap_nodes(std::int64_t a, std::int64_t b) {
    std::swap(heap_[a], heap_[b]);
    pos_[heap_[a]] = a;
    pos_[heap_[b]] = b;
  }
  void sift_up(std::int64_t i) {
    while (i > 0) {
      const std::int64_t p = (i - 1) / 2;
      if (!less(i, p)) break;
      swap_nodes(i, p);
      i = p;
    }
  }
  void sift_down(std::int64_t i) {
    const std::int64_t n = static_cast<std::int64_t>(heap_.size());
    while (true) {
      std::int64_t best = i;
      const std::int64_t l = 2 * i + 1, r = 2 * i + 2;
      if (l < n && less(l, best)) best = l;
      if (r < n && less(r, best)) best = r;
      if (best == i) break;
      swap_nodes(i, best);
      i = best;
    }
  }

  std::vector<std::int64_t> heap_;
  std::vector<std::int64_t> pos_;
  std::vector<double> key_;
};

int axis_digit(std::uint8_t code, int axis) {
  int c = code;
  for (int a = 0; a < axis; ++a) c /= 5;
  return c % 5;
}

/// One candidate upwind term (alpha * t - beta) on an axis.
struct Term {
  double alpha;
  double beta;
  int digit;  // 1 backward, 2 forward
};

struct LocalSolve {
  double t = kInf;
  std::uint8_t code = 0;
};

/// Solve the per-node Godunov quadratic over all admissible direction
/// combinations (including inactive axes) and return the smallest
/// self-consistent root: each chosen term must be the nonnegative maximum
/// among its axis's alternatives at the root, and unchosen axes must have
/// no positive alternative.
LocalSolve solve_local(const double m_i, const std::array<std::vector<Term>, 3>& opts, int ndim) {
  LocalSolve best;
  LocalSolve fallback;
  const double tol = 1e-9 * (std::sqrt(m_i) + 1.0);
  std::array<int, 3> choice{0, 0, 0};  // index into opts[a] + 1, 0 = inactive
  const std::array<int, 3> counts{static_cast<int>(opts[0].size()),
                                  static_cast<int>(opts[1].size()),
                                  static_cast<int>(opts[2].size())};
  const std::int64_t combos = static_cast<std::int64_t>(counts[0] + 1) * (counts[1] + 1) *
                              (counts[2] + 1);
  for (std::int64_t c = 1; c < combos; ++c) {
    std::int64_t rem = c;
    for (int a = 0; a < 3; ++a) {
      choice[a] = static_cast<int>(rem % (counts[a] + 1));
      rem /= counts[a] + 1;
    }
    double a2 = 0.0, b1 = 0.0, c0 = -m_i;
    for (int a = 0; a < ndim; ++a)
      if (choice[a] > 0) {
        const Term& t = opts[a][choice[a] - 1];
        a2 += t.alpha * t.alpha;
        b1 += t.alpha * t.beta;
        c0 += t.beta * t.beta;
      }
    if (a2 == 0.0) continue;
    const double disc = b1 * b1 - a2 * c0;
    if (disc < 0.0) continue;
    const double t = (b1 + std::sqrt(disc)) / a2;
    if (!(t >= 0.0)) continue;
    bool admissible = true;   // all chosen terms nonnegative at t
    bool consistent = true;   // chosen terms are the axis maxima; unchosen axes have none positive
    for (int a = 0; a < ndim && admissible; ++a) {
      if (choice[a] > 0) {
        const Term& ch = opts[a][choice[a] - 1];
        const double val = ch.alpha * t - ch.beta;
        if (val < -tol) {
          admissible = false;
          break;
        }
        for (int o = 0; o < counts[a]; ++o) {
          if (o == choice[a] - 1) continue;
          const double other = opts[a][o].alpha * t - opts[a][o].beta;
          if (other > val + tol) consistent = false;
        }
      } else {
        for (int o = 0; o < counts[a]; ++o)
          if (opts[a][o].alpha * t - opts[a][o].beta > tol) consistent = false;
      }
    }
    if (!admissible) continue;
    std::uint8_t code = 0;
    int mul = 1;
    for (int a = 0; a < 3; ++a) {
      if (choice[a] > 0) code = static_cast<std::uint8_t>(code + mul * opts[a][choice[a] - 1].digit);
      mul *= 5;
    }
    if (consistent && t < best.t) best = {t, code};
    if (t < fallback.t) fallback = {t, code};
  }
  return best.t < kInf ? best : fallback;
}

}  // namespace

Field FactoredEikonalSolution::tau0() const {
  Field t0(grid.num_nodes());
  for (std::int64_t i = 0; i < grid.num_nodes(); ++i) {
    const auto x = grid.position(i);
    double d2 = 0.0;
    for (int k = 0; k < grid.ndim; ++k) d2 += (x[k] - source[k]) * (x[k] - source[k]);
    t0[i] = std::sqrt(d2);
  }
  return t0;
}

Field FactoredEikonalSolution::travel_time() const {
  Field tau = tau0();
  for (std::size_t i = 0; i < tau.size(); ++i) tau[i] *= tau1[i];
  return tau;
}

std::pair<FactoredEikonalSolution, SensitivityRecord> fm_solve(const SlownessSquaredModel& m,
                                                               const std::array<double, 3>& x_s) {
  const RegularGrid& g = m.grid;
  if (!g.contains(x_s)) throw ValidationError("fm_solve: source outside grid");
  if (g.num_nodes() >= (std::int64_t{1} << 32))
    throw ValidationError("fm_solve: more than 2^32 nodes; sensitivity records hold u32 indices");
  const std::int64_t n = g.num_nodes();
  const std::int64_t src = g.nearest_node(x_s);
  const auto src_pos = g.position(src);

  FactoredEikonalSolution sol;
  sol.grid = g;
  sol.source = src_pos;
  sol.source_node = src;
  sol.tau1.assign(n, kInf);

  SensitivityRecord rec;
  rec.grid = g;
  rec.source = src_pos;
  rec.fm_order.reserve(n);
  rec.direction_codes.assign(n, 0);

  // analytic tau0 and p0 = grad tau0 per node
  Field tau0(n), p0(3 * n);
  for (std::int64_t i = 0; i < n; ++i) {
    const auto x = g.position(i);
    double d2 = 0.0;
    for (int k = 0; k < g.ndim; ++k) d2 += (x[k] - src_pos[k]) * (x[k] - src_pos[k]);
    const double d = std::sqrt(d2);
    tau0[i] = d;
    for (int k = 0; k < 3; ++k) p0[3 * i + k] = d > 0.0 ? (x[k] - src_pos[k]) / d : 0.0;
  }

  const std::array<AxisGeom, 3> ax{AxisGeom{1, g.h[0]}, AxisGeom{g.n[0], g.h[1]},
                                   AxisGeom{g.n[0] * g.n[1], g.h[2]}};
  std::vector<std::uint8_t> known(n, 0);
  std::vector<std::uint8_t> work_code(n, 0);
  FrontHeap front(n);

  auto update_neighbor = [&](std::int64_t j) {
    // candidate terms from known neighbors along each axis
    std::array<std::vector<Term>, 3> opts;
    const auto cj = g.unpack(j);
    const double t0h = tau0[j];
    for (int a = 0; a < g.ndim; ++a) {
      if (g.n[a] <= 1) continue;
      const double pa = p0[3 * j + a];
      const double th = t0h / ax[a].h;
      if (cj[a] > 0 && known[j - ax[a].stride]) {
        const double alpha = th + pa;
        if (alpha > 0.0)
          opts[a].push_back({alpha, th * sol.tau1[j - ax[a].stride], 1});
      }
      if (cj[a] + 1 < g.n[a] && known[j + ax[a].stride]) {
        const double alpha = th - pa;
        if (alpha > 0.0)
          opts[a].push_back({alpha, th * sol.tau1[j + ax[a].stride], 2});
      }
    }
    const LocalSolve ls = solve_local(m.values[j], opts, g.ndim);
    if (ls.t < sol.tau1[j]) {
      sol.tau1[j] = ls.t;
      work_code[j] = ls.code;
      front.push_or_decrease(j, tau0[j] * ls.t);
    }
  };

  // source is known with tau1 = sqrt(m) (the factored equation's limit)
  sol.tau1[src] = std::sqrt(m.values[src]);
  known[src] = 1;
  rec.fm_order.push_back(static_cast<std::uint32_t>(src));
  {
    const auto cs = g.unpack(src);
    for (int a = 0; a < g.ndim; ++a) {
      if (cs[a] > 0) update_neighbor(src - ax[a].stride);
      if (cs[a] + 1 < g.n[a]) update_neighbor(src + ax[a].stride);
    }
  }

  while (!front.empty()) {
    const auto [node, tau] = front.pop_min();
    (void)tau;
    known[node] = 1;
    rec.fm_order.push_back(static_cast<std::uint32_t>(node));
    rec.direction_codes[node] = work_code[node];
    const auto c = g.unpack(node);
    for (int a = 0; a < g.ndim; ++a) {
      if (c[a] > 0 && !known[node - ax[a].stride]) update_neighbor(node - ax[a].stride);
      if (c[a] + 1 < g.n[a] && !known[node + ax[a].stride]) update_neighbor(node + ax[a].stride);
    }
  }

  if (rec.fm_order.size() != static_cast<std::size_t>(n))
    throw StateError("fm_solve: front exhausted before covering the grid");
  rec.tau1.resize(n);
  for (std::int64_t i = 0; i < n; ++i) rec.tau1[i] = static_cast<float>(sol.tau1[i]);
  return {std::move(sol), std::move(rec)};
}

namespace {

/// Re-derives the row data (diagonal, per-axis off entries) for one node
/// from the record. Returns the number of active axes.
struct RowData {
  double diag = 0.0;
  int naxes = 0;
  std::array<std::int64_t, 3> nbr{};
  std::array<double, 3> off{};  // coefficient on z[nbr] moved to the rhs (positive)
};

RowData row_from_record(const SensitivityRecord& rec, std::int64_t i, const Field& tau1,
                        const Field& tau0, const Field& p0) {
  const RegularGrid& g = rec.grid;
  RowData row;
  const std::uint8_t code = rec.direction_codes[i];
  if (code == 0) return row;
  const std::array<std::int64_t, 3> stride{1, g.n[0], g.n[0] * g.n[1]};
  for (int a = 0; a < g.ndim; ++a) {
    const int d = axis_digit(code, a);
    if (d == 0) continue;
    const double th = tau0[i] / g.h[a];
    const double pa = p0[3 * i + a];
    const std::int64_t nbr = d == 1 ? i - stride[a] : i + stride[a];
    const double alpha = d == 1 ? th + pa : th - pa;
    const double gval = alpha * tau1[i] - th * tau1[nbr];
    row.diag += 2.0 * gval * alpha;
    row.nbr[row.naxes] = nbr;
    row.off[row.naxes] = 2.0 * gval * th;
    ++row.naxes;
  }
  return row;
}

void record_geometry(const SensitivityRecord& rec, Field& tau0, Field& p0, Field& tau1) {
  const RegularGrid& g = rec.grid;
  const std::int64_t n = g.num_nodes();
  tau0.resize(n);
  p0.resize(3 * n);
  tau1.assign(rec.tau1.begin(), rec.tau1.end());
  for (std::int64_t i = 0; i < n; ++i) {
    const auto x = g.position(i);
    double d2 = 0.0;
    for (int k = 0; k < g.ndim; ++k) d2 += (x[k] - rec.source[k]) * (x[k] - rec.source[k]);
    const double d = std::sqrt(d2);
    tau0[i] = d;
    for (int k = 0; k < 3; ++k) p0[3 * i + k] = d > 0.0 ? (x[k] - rec.source[k]) / d : 0.0;
  }
}

}  // namespace

Field eik_jacobian_vec(const SensitivityRecord& rec, const Field& v) {
  const std::int64_t n = rec.grid.num_nodes();
  if (static_cast<std::int64_t>(v.size()) != n)
    throw ValidationError("eik_jacobian_vec: vector does not match record grid");
  Field tau0, p0, tau1;
  record_geometry(rec, tau0, p0, tau1);
  Field z(n, 0.0);
  for (std::uint32_t ord : rec.fm_order) {
    const std::int64_t i = ord;
    const RowData row = row_from_record(rec, i, tau1, tau0, p0);
    if (row.naxes == 0) {
      z[i] = 0.0;  // zero row (source or clamped node)
      continue;
    }
    double rhs = v[i];
    for (int a = 0; a < row.naxes; ++a) rhs += row.off[a] * z[row.nbr[a]];
    z[i] = rhs / row.diag;
  }
  for (std::int64_t i = 0; i < n; ++i) z[i] *= tau0[i];
  return z;
}

Field eik_jacobian_transpose_vec(const SensitivityRecord& rec, const Field& w) {
  const std::int64_t n = rec.grid.num_nodes();
  if (static_cast<std::int64_t>(w.size()) != n)
    throw ValidationError("eik_jacobian_transpose_vec: vector does not match record grid");
  Field tau0, p0, tau1;
  record_geometry(rec, tau0, p0, tau1);
  Field acc(n);
  for (std::int64_t i = 0; i < n; ++i) acc[i] = tau0[i] * w[i];
  Field z(n, 0.0);
  for (auto it = rec.fm_order.rbegin(); it != rec.fm_order.rend(); ++it) {
    const std::int64_t i = *it;
    const RowData row = row_from_record(rec, i, tau1, tau0, p0);
    if (row.naxes == 0) {
      z[i] = 0.0;
      continue;
    }
    z[i] = acc[i] / row.diag;
    for (int a = 0; a < row.naxes; ++a) acc[row.nbr[a]] += row.off[a] * z[i];
  }
  return z;
}

double gudonov_residual(const SensitivityRecord& rec, const Field& tau1_full,
                        const SlownessSquaredModel& m) {
  const RegularGrid& g = rec.grid;
  Field tau0, p0, tau1_unused;
  record_geometry(rec, tau0, p0, tau1_unused);
  const std::array<std::int64_t, 3> stride{1, g.n[0], g.n[0] * g.n[1]};
  double worst = 0.0;
  for (std::int64_t i = 0; i < g.num_nodes(); ++i) {
    const std::uint8_t code = rec.direction_codes[i];
    if (code == 0) continue;
    double lhs = 0.0;
    for (int a = 0; a < g.ndim; ++a) {
      const int d = axis_digit(code, a);
      if (d == 0) continue;
      const double th = tau0[i] / g.h[a];
      const double pa = p0[3 * i + a];
      const std::int64_t nbr = d == 1 ? i - stride[a] : i + stride[a];
      const double alpha = d == 1 ? th + pa : th - pa;
      const double gval = alpha * tau1_full[i] - th * tau1_full[nbr];
      lhs += gval * gval;
    }
    worst = std::max(worst, std::abs(lhs - m.values[i]) / std::abs(m.values[i]));
  }
  return worst;
}

void SensitivityRecord::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for write: " + path);
  char head[64];
  const int len = std::snprintf(head, sizeof head, "JSER1 %zu\n", fm_order.size());
  f.write(head, len);
  f.write(reinterpret_cast<const char*>(fm_order.data()),
          static_cast<std::streamsize>(fm_order.size() * sizeof(std::uint32_t)));
  f.write(reinterpret_cast<const char*>(direction_codes.data()),
          static_cast<std::streamsize>(direction_codes.size()));
  f.write(reinterpret_cast<const char*>(tau1.data()),
          static_cast<std::streamsize>(tau1.size() * sizeof(float)));
  if (!f) throw IoError("short write: " + path);
}

SensitivityRecord SensitivityRecord::load(const std::string& path, RegularGrid grid,
                                          std::array<double, 3> source) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path);
  std::string header;
  std::getline(f, header);
  std::istringstream hs(header);
  std::string magic;
  std::size_t nn = 0;
  hs >> magic >> nn;
  if (magic != "JSER1" || !hs) throw IoError("bad JSER1 header: " + path);
  if (nn != static_cast<std::size_t>(grid.num_nodes()))
    throw IoError("JSER1 node count does not match grid: " + path);
  SensitivityRecord rec;
  rec.grid = std::move(grid);
  rec.source = source;
  rec.fm_order.resize(nn);
  rec.direction_codes.resize(nn);
  rec.tau1.resize(nn);
  f.read(reinterpret_cast<char*>(rec.fm_order.data()),
         static_cast<std::streamsize>(nn * sizeof(std::uint32_t)));
  f.read(reinterpret_cast<char*>(rec.direction_codes.data()), static_cast<std::streamsize>(nn));
  f.read(reinterpret_cast<char*>(rec.tau1.data()),
         static_cast<std::streamsize>(nn * sizeof(float)));
  if (!f) throw IoError("truncated JSER1 payload: " + path);
  return rec;
}

}  // namespace seistomo
