#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "xbar/crossbar/device.hpp"

namespace xbar::crossbar {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// I_j = sum_i g[i * cols + j] * v_i. Throws when some |v_i| > v_max.
std::vector<double> vmm_ideal(std::span<const double> g, std::size_t rows, std::size_t cols,
                              std::span<const double> v,
                              double v_max = std::numeric_limits<double>::infinity());
std::vector<double> vmm_ideal(const CrossbarTile& tile, std::span<const double> v,
                              double v_max = std::numeric_limits<double>::infinity());

struct NodalOptions {
  bool both_ends = false;  // rows also driven through r_source at the far end
};

// Resistive network of a crossbar: row i is fed from its driver through
// r_source into the row wire, a chain of r_line segments between adjacent
// cells; each device joins row node (i, j) to column node (i, j); column j is
// a chain of r_line segments ending, after one more segment below the last
// row, in a virtual-ground sense node. Zero resistances are treated as
// shorts. Factorized once; solve() may be called for many drive vectors.
class NodalSolver {
 public:
  NodalSolver(std::span<const double> g, std::size_t rows, std::size_t cols, double r_line,
              double r_source, NodalOptions options = {});
  NodalSolver(const CrossbarTile& tile, double r_line, double r_source, NodalOptions options = {});
  ~NodalSolver();
  NodalSolver(NodalSolver&&) noexcept;
  NodalSolver& operator=(NodalSolver&&) noexcept;

  // Sense currents into the virtual grounds, one per column.
  std::vector<double> solve(std::span<const double> v) const;
  std::size_t rows() const;
  std::size_t cols() const;
  std::size_t unknowns() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<double> vmm_nonideal(std::span<const double> g, std::size_t rows, std::size_t cols,
                                 std::span<const double> v, double r_line, double r_source,
                                 NodalOptions options = {});
std::vector<double> vmm_nonideal(const CrossbarTile& tile, std::span<const double> v,
                                 double r_line, double r_source, NodalOptions options = {});

}  // namespace xbar::crossbar
