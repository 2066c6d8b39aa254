#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace cdice::opt {

/// f(x) with its gradient written into the second argument.
using Objective = std::function<double(std::span<const double>, std::span<double>)>;

struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  void project(std::span<double> x) const;
  void validate(std::size_t n) const;
};

struct LbfgsOptions {
  int memory = 20;
  int max_iterations = 20000;
  /// Stop when max_i |P(x_i - d_i g_i) - x_i| falls below this value,
  /// with d the diagonal scaling.
  double tolerance = 1e-7;
  double armijo = 1e-4;
  int max_backtracks = 50;
  /// Positive diagonal preconditioner; empty means identity.
  std::vector<double> scaling;
};

struct LbfgsResult {
  std::vector<double> x;
  double f = 0.0;
  double residual = 0.0;  // scaled projected-gradient norm at x
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string message;
};

/// Scaled projected-gradient residual used as the stopping measure.
double projected_residual(std::span<const double> x, std::span<const double> g, const Box& box,
                          std::span<const double> scaling);

/// Projected limited-memory BFGS for min f(x) subject to lower <= x <= upper.
/// Deterministic; the initial point is projected into the box.
LbfgsResult minimize_box(const Objective& f, std::vector<double> x0, const Box& box,
                         const LbfgsOptions& options = {});

}  // namespace cdice::opt
