#include "cdice/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "cdice/errors.hpp"

namespace cdice::opt {

void Box::project(std::span<double> x) const {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
}

void Box::validate(std::size_t n) const {
  if (lower.size() != n || upper.size() != n) throw ValidationError("optimizer: bounds have the wrong size");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lower[i] <= upper[i])) throw ValidationError("optimizer: infeasible bounds");
  }
}

double projected_residual(std::span<const double> x, std::span<const double> g, const Box& box,
                          std::span<const double> scaling) {
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = scaling.empty() ? 1.0 : scaling[i];
    const double p = std::clamp(x[i] - d * g[i], box.lower[i], box.upper[i]);
    r = std::max(r, std::abs(p - x[i]));
  }
  return r;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct Pair {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

}  // namespace

LbfgsResult minimize_box(const Objective& f, std::vector<double> x0, const Box& box,
                         const LbfgsOptions& options) {
  const std::size_t n = x0.size();
  box.validate(n);
  if (!options.scaling.empty()) {
    if (options.scaling.size() != n) throw ValidationError("optimizer: scaling has the wrong size");
    for (double d : options.scaling) {
      if (!(d > 0.0)) throw ValidationError("optimizer: scaling must be positive");
    }
  }
  auto scale = [&](std::size_t i) { return options.scaling.empty() ? 1.0 : options.scaling[i]; };

  LbfgsResult res;
  std::vector<double> x = std::move(x0);
  box.project(x);
  std::vector<double> g(n), g_new(n), x_new(n), d(n), q(n);
  double fx = f(x, g);
  res.evaluations = 1;
  if (!std::isfinite(fx)) throw ValidationError("optimizer: objective not finite at the initial point");

  std::deque<Pair> mem;
  std::vector<char> active(n);
  const double eps = std::numeric_limits<double>::epsilon();

  while (true) {
    res.residual = projected_residual(x, g, box, options.scaling);
    if (res.residual <= options.tolerance) {
      res.converged = true;
      res.message = "projected gradient below tolerance";
      break;
    }
    if (res.iterations >= options.max_iterations) {
      res.message = "iteration cap reached";
      break;
    }
    ++res.iterations;

    for (std::size_t i = 0; i < n; ++i) {
      active[i] = box.lower[i] == box.upper[i] || (x[i] <= box.lower[i] && g[i] > 0.0) ||
                  (x[i] >= box.upper[i] && g[i] < 0.0);
    }

    bool steepest = mem.empty();
    for (int attempt = 0; attempt < 2; ++attempt) {
      for (std::size_t i = 0; i < n; ++i) q[i] = active[i] ? 0.0 : g[i];
      std::vector<double> alpha(mem.size());
      if (!steepest) {
        for (std::size_t k = mem.size(); k-- > 0;) {
          alpha[k] = mem[k].rho * dot(mem[k].s, q);
          for (std::size_t i = 0; i < n; ++i) q[i] -= alpha[k] * mem[k].y[i];
        }
        const auto& last = mem.back();
        double ydy = 0.0;
        for (std::size_t i = 0; i < n; ++i) ydy += last.y[i] * scale(i) * last.y[i];
        const double gamma = 1.0 / (last.rho * ydy);
        for (std::size_t i = 0; i < n; ++i) q[i] *= gamma * scale(i);
        for (std::size_t k = 0; k < mem.size(); ++k) {
          const double beta = mem[k].rho * dot(mem[k].y, q);
          for (std::size_t i = 0; i < n; ++i) q[i] += mem[k].s[i] * (alpha[k] - beta);
        }
      } else {
        for (std::size_t i = 0; i < n; ++i) q[i] *= scale(i);
      }
      double slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        d[i] = active[i] ? 0.0 : -q[i];
        slope += d[i] * g[i];
      }
      if (slope < 0.0) break;
      // Curvature pairs no longer describe the free subspace.
      mem.clear();
      steepest = true;
    }

    double step = 1.0;
    if (steepest) {
      double dmax = 0.0;
      for (double v : d) dmax = std::max(dmax, std::abs(v));
      if (dmax > 0.0) step = std::min(1.0, 0.1 / dmax);
    }

    bool accepted = false;
    double f_new = fx;
    for (int bt = 0; bt < options.max_backtracks; ++bt) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * d[i];
      box.project(x_new);
      double decrease = 0.0;
      for (std::size_t i = 0; i < n; ++i) decrease += g[i] * (x_new[i] - x[i]);
      f_new = f(x_new, g_new);
      ++res.evaluations;
      // Allow for rounding in f when the predicted decrease is tiny.
      const double slack = 16.0 * eps * std::abs(fx);
      if (std::isfinite(f_new) && f_new <= fx + options.armijo * decrease + slack &&
          decrease < 0.0) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!mem.empty()) {
        mem.clear();
        continue;
      }
      res.message = "line search failed";
      break;
    }

    Pair p{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      p.s[i] = x_new[i] - x[i];
      p.y[i] = g_new[i] - g[i];
    }
    const double sy = dot(p.s, p.y);
    if (sy > eps * std::sqrt(dot(p.s, p.s) * dot(p.y, p.y))) {
      p.rho = 1.0 / sy;
      mem.push_back(std::move(p));
      if (static_cast<int>(mem.size()) > options.memory) mem.pop_front();
    }
    x.swap(x_new);
    g.swap(g_new);
    fx = f_new;
  }
  res.x = std::move(x);
  res.f = fx;
  return res;
}

}  // namespace cdice::opt
