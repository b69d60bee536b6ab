#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <numeric>
#include <string>

#include "xbar/crossbar/vmm.hpp"
#include "xbar/simd/kernels.hpp"

namespace xbar::crossbar {

std::vector<double> vmm_ideal(std::span<const double> g, std::size_t rows, std::size_t cols,
                              std::span<const double> v, double v_max) {
  if (g.size() != rows * cols || v.size() != rows) {
    throw SolverError("vmm_ideal: shape mismatch");
  }
  for (double x : v) {
    if (!(std::abs(x) <= v_max * (1.0 + 1e-12))) {
      throw SolverError("vmm_ideal: drive voltage " + std::to_string(x) + " exceeds v_max");
    }
  }
  std::vector<double> out(cols);
  simd::vmm(g, rows, cols, v, out);
  return out;
}

std::vector<double> vmm_ideal(const CrossbarTile& tile, std::span<const double> v, double v_max) {
  return vmm_ideal(tile.g, CrossbarTile::rows, CrossbarTile::cols, v, v_max);
}

namespace {

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

constexpr std::ptrdiff_t kGround = -1;

}  // namespace

struct NodalSolver::Impl {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t n_unknown = 0;
  Eigen::SparseMatrix<double> lap;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;

  // b[unknown] += G * v[source]
  struct Drive {
    std::size_t unknown;
    double g;
    std::size_t source;
  };
  // I[col] += G * potential(node); node is an unknown index or a source.
  struct Sense {
    std::size_t col;
    double g;
    bool from_source;
    std::size_t index;
  };
  std::vector<Drive> drives;
  std::vector<Sense> senses;
};

NodalSolver::NodalSolver(std::span<const double> g, std::size_t rows, std::size_t cols,
                         double r_line, double r_source, NodalOptions options)
    : impl_(std::make_unique<Impl>()) {
  if (g.size() != rows * cols || rows == 0 || cols == 0) {
    throw SolverError("nodal: shape mismatch");
  }
  if (!(r_line >= 0.0) || !(r_source >= 0.0)) throw SolverError("nodal: negative resistance");
  impl_->rows = rows;
  impl_->cols = cols;

  const std::size_t rc = rows * cols;
  auto row_node = [&](std::size_t i, std::size_t j) { return i * cols + j; };
  auto col_node = [&](std::size_t i, std::size_t j) { return rc + i * cols + j; };
  auto src_node = [&](std::size_t i) { return 2 * rc + i; };
  auto gnd_node = [&](std::size_t j) { return 2 * rc + rows + j; };
  const std::size_t n_nodes = 2 * rc + rows + cols;

  struct Edge {
    std::size_t a, b;
    double r;  // resistance for wires, < 0 marks a device given by conductance
    double g;
  };
  std::vector<Edge> edges;
  edges.reserve(4 * rc + 2 * rows);
  auto wire = [&](std::size_t a, std::size_t b, double r) { edges.push_back({a, b, r, 0.0}); };
  for (std::size_t i = 0; i < rows; ++i) {
    wire(src_node(i), row_node(i, 0), r_source);
    if (options.both_ends) wire(src_node(i), row_node(i, cols - 1), r_source);
    for (std::size_t j = 0; j + 1 < cols; ++j) wire(row_node(i, j), row_node(i, j + 1), r_line);
  }
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t i = 0; i + 1 < rows; ++i) wire(col_node(i, j), col_node(i + 1, j), r_line);
    wire(col_node(rows - 1, j), gnd_node(j), r_line);
  }
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double gij = g[i * cols + j];
      if (!(gij >= 0.0) || !std::isfinite(gij)) throw SolverError("nodal: invalid conductance");
      if (gij > 0.0) edges.push_back({row_node(i, j), col_node(i, j), -1.0, gij});
    }
  }

  DisjointSet ds(n_nodes);
  for (const auto& e : edges) {
    if (e.r == 0.0) ds.unite(e.a, e.b);
  }

  // Per group: the fixed potential it carries, if any.
  std::vector<std::ptrdiff_t> fixed(n_nodes, -2);  // -2 free, kGround, or source index
  for (std::size_t i = 0; i < rows; ++i) fixed[ds.find(src_node(i))] = static_cast<std::ptrdiff_t>(i);
  for (std::size_t j = 0; j < cols; ++j) {
    auto& f = fixed[ds.find(gnd_node(j))];
    if (f >= 0) throw SolverError("nodal: driver shorted to virtual ground");
    f = kGround;
  }
  std::vector<std::ptrdiff_t> unknown(n_nodes, -1);
  std::size_t n_unknown = 0;
  for (std::size_t v = 0; v < n_nodes; ++v) {
    const std::size_t root = ds.find(v);
    if (root == v && fixed[root] == -2) unknown[root] = static_cast<std::ptrdiff_t>(n_unknown++);
  }
  impl_->n_unknown = n_unknown;

  // Column owning a node on the sense side.
  auto column_of = [&](std::size_t node) -> std::size_t {
    if (node >= 2 * rc + rows) return node - (2 * rc + rows);
    return (node - rc) % cols;
  };

  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& e : edges) {
    if (e.r == 0.0) continue;
    const double ge = e.r < 0.0 ? e.g : 1.0 / e.r;
    std::size_t a = e.a, b = e.b;
    std::size_t ga = ds.find(a), gb = ds.find(b);
    if (ga == gb) continue;
    // Orient so that b is the sense side when one end is grounded.
    if (fixed[ga] == kGround) {
      std::swap(a, b);
      std::swap(ga, gb);
    }
    const bool a_unknown = fixed[ga] == -2;
    const bool b_unknown = fixed[gb] == -2;
    if (a_unknown && b_unknown) {
      const auto ua = unknown[ga], ub = unknown[gb];
      trip.emplace_back(ua, ua, ge);
      trip.emplace_back(ub, ub, ge);
      trip.emplace_back(ua, ub, -ge);
      trip.emplace_back(ub, ua, -ge);
      continue;
    }
    if (a_unknown || b_unknown) {
      const std::size_t uf = a_unknown ? ga : gb;
      const std::size_t ff = a_unknown ? gb : ga;
      const auto u = unknown[uf];
      trip.emplace_back(u, u, ge);
      if (fixed[ff] >= 0) {
        impl_->drives.push_back({static_cast<std::size_t>(u), ge, static_cast<std::size_t>(fixed[ff])});
      }
    }
    if (fixed[gb] == kGround && fixed[ga] != kGround) {
      if (fixed[ga] >= 0) {
        impl_->senses.push_back({column_of(b), ge, true, static_cast<std::size_t>(fixed[ga])});
      } else {
        impl_->senses.push_back({column_of(b), ge, false, static_cast<std::size_t>(unknown[ga])});
      }
    }
  }

  if (n_unknown > 0) {
    impl_->lap.resize(static_cast<Eigen::Index>(n_unknown), static_cast<Eigen::Index>(n_unknown));
    impl_->lap.setFromTriplets(trip.begin(), trip.end());
    impl_->ldlt.compute(impl_->lap);
    if (impl_->ldlt.info() != Eigen::Success || impl_->ldlt.vectorD().minCoeff() <= 0.0) {
      throw SolverError("nodal: singular system (floating node or zero-conductance network)");
    }
  }
}

NodalSolver::NodalSolver(const CrossbarTile& tile, double r_line, double r_source,
                         NodalOptions options)
    : NodalSolver(tile.g, CrossbarTile::rows, CrossbarTile::cols, r_line, r_source, options) {}

NodalSolver::~NodalSolver() = default;
NodalSolver::NodalSolver(NodalSolver&&) noexcept = default;
NodalSolver& NodalSolver::operator=(NodalSolver&&) noexcept = default;

std::size_t NodalSolver::rows() const { return impl_->rows; }
std::size_t NodalSolver::cols() const { return impl_->cols; }
std::size_t NodalSolver::unknowns() const { return impl_->n_unknown; }

std::vector<double> NodalSolver::solve(std::span<const double> v) const {
  if (v.size() != impl_->rows) throw SolverError("nodal: drive vector length mismatch");
  Eigen::VectorXd x;
  if (impl_->n_unknown > 0) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(impl_->n_unknown));
    for (const auto& d : impl_->drives) b[static_cast<Eigen::Index>(d.unknown)] += d.g * v[d.source];
    x = impl_->ldlt.solve(b);
    const double bn = b.norm();
    for (int it = 0; it < 3 && bn > 0.0; ++it) {
      const Eigen::VectorXd r = b - impl_->lap * x;
      if (r.norm() <= 1e-10 * bn) break;
      x += impl_->ldlt.solve(r);
    }
    if (impl_->ldlt.info() != Eigen::Success) throw SolverError("nodal: solve failed");
  }
  std::vector<double> out(impl_->cols, 0.0);
  for (const auto& s : impl_->senses) {
    const double pot = s.from_source ? v[s.index] : x[static_cast<Eigen::Index>(s.index)];
    out[s.col] += s.g * pot;
  }
  return out;
}

std::vector<double> vmm_nonideal(std::span<const double> g, std::size_t rows, std::size_t cols,
                                 std::span<const double> v, double r_line, double r_source,
                                 NodalOptions options) {
  return NodalSolver(g, rows, cols, r_line, r_source, options).solve(v);
}

std::vector<double> vmm_nonideal(const CrossbarTile& tile, std::span<const double> v,
                                 double r_line, double r_source, NodalOptions options) {
  return vmm_nonideal(tile.g, CrossbarTile::rows, CrossbarTile::cols, v, r_line, r_source, options);
}

}  // namespace xbar::crossbar
