// Copyright 2026 The cacp Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "cacp/netopt.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "cacp/error.h"

namespace cacp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void CheckWeights(const DelayModel& model, const ImportanceWeights& weights) {
  if (weights.w.size() != model.size()) {
    throw InputError("importance weights and delay model differ in size");
  }
  for (double w : weights.w) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw DomainError("importance weights must be positive");
    }
  }
}

// Per-helper objective coefficients V_i tau_i / N.
std::vector<double> DelayCoefficients(const DelayModel& model) {
  const size_t n = model.size();
  std::vector<double> c(n);
  for (size_t i = 0; i < n; ++i) {
    c[i] = model.volumes[i] * model.path_delay_per_bit[i] /
           static_cast<double>(n);
  }
  return c;
}

void CheckFeasible(const DelayModel& model, const ImportanceWeights& weights) {
  const double min_budget =
      std::accumulate(weights.w.begin(), weights.w.end(), 0.0);
  if (model.d_max < min_budget * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "distortion budget " << model.d_max
       << " is infeasible; the minimum feasible budget is " << min_budget;
    throw InfeasibleError(os.str(), min_budget);
  }
}

// Root of x - nu*gamma*w*x^(-gamma-1) = y clipped to [lo, 1]. The left side is
// increasing and concave, so Newton from the left converges monotonically.
double SolveProjectedCoordinate(double y, double nu, double gamma, double w,
                                double lo) {
  auto phi = [&](double x) {
    return x - nu * gamma * w * std::pow(x, -gamma - 1.0) - y;
  };
  if (phi(lo) >= 0.0) return lo;
  if (phi(1.0) <= 0.0) return 1.0;
  double x = std::max(lo, std::min(y, 1.0));
  for (int it = 0; it < 100; ++it) {
    const double f = phi(x);
    const double df =
        1.0 + nu * gamma * (gamma + 1.0) * w * std::pow(x, -gamma - 2.0);
    const double next = std::min(1.0, x - f / df);
    if (!(next > x)) break;
    const bool done = next - x <= 1e-16 * x;
    x = next;
    if (done) break;
  }
  return x;
}

}  // namespace

void CommGraph::Validate() const {
  if (n < 2) throw InputError("graph needs at least two vehicles");
  if (ego_index >= n) throw InputError("ego index out of range");
  if (adjacency.rows() != n || adjacency.cols() != n || capacity.rows() != n ||
      capacity.cols() != n) {
    throw InputError("graph matrices must be n x n");
  }
  for (size_t i = 0; i < n; ++i) {
    if (adjacency(i, i) != 0) throw InputError("adjacency diagonal must be 0");
    for (size_t j = 0; j < n; ++j) {
      const uint8_t a = adjacency(i, j);
      if (a > 1) throw InputError("adjacency must be binary");
      if ((a == 1) != (capacity(i, j) > 0.0)) {
        throw InputError("capacity must be positive exactly on edges");
      }
    }
  }
}

std::vector<size_t> CommGraph::Helpers() const {
  std::vector<size_t> out;
  for (size_t i = 0; i < n; ++i) {
    if (i != ego_index) out.push_back(i);
  }
  return out;
}

Matrix<ChannelState> SampleLinkStates(std::span<const Vec2> positions,
                                      const RadioParams& radio,
                                      const CsiTrace& trace, double t) {
  const size_t n = positions.size();
  Matrix<ChannelState> states(n, n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const double d = Distance(positions[i], positions[j]);
      const ChannelState s = SampleCsi(trace, LinkId(i, j), d, radio, t);
      states(i, j) = s;
      states(j, i) = s;
    }
  }
  return states;
}

CommGraph BuildGraph(std::span<const Vec2> positions,
                     const Matrix<ChannelState>& csi, double max_range,
                     size_t ego_index) {
  const size_t n = positions.size();
  if (n < 2) throw ConfigError("communication graph needs at least 2 vehicles");
  if (ego_index >= n) throw ConfigError("ego index out of range");
  if (csi.rows() != n || csi.cols() != n) {
    throw InputError("CSI matrix does not match the vehicle count");
  }
  if (!(max_range > 0.0)) throw DomainError("max_range must be positive");

  CommGraph g;
  g.n = n;
  g.ego_index = ego_index;
  g.adjacency = Matrix<uint8_t>(n, n, 0);
  g.capacity = Matrix<double>(n, n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = Distance(positions[i], positions[j]);
      if (!(d > 0.0)) throw InputError("vehicle positions must be distinct");
      if (d <= max_range && csi(i, j).capacity > 0.0) {
        g.adjacency(i, j) = 1;
        g.capacity(i, j) = csi(i, j).capacity;
      }
    }
  }
  return g;
}

LinkSelection SelectLinks(const CommGraph& graph) {
  graph.Validate();
  const size_t n = graph.n;
  const size_t ego = graph.ego_index;

  LinkSelection sel;
  sel.link_matrix = Matrix<uint8_t>(n, n, 0);
  sel.path_delay_per_bit.assign(n, kInf);
  sel.reachable.assign(n, false);
  sel.hops.assign(n, 0);
  sel.next_hop.assign(n, n);

  std::vector<bool> settled(n, false);
  sel.path_delay_per_bit[ego] = 0.0;
  for (size_t round = 0; round < n; ++round) {
    size_t u = n;
    for (size_t i = 0; i < n; ++i) {
      if (settled[i] || !std::isfinite(sel.path_delay_per_bit[i])) continue;
      if (u == n || sel.path_delay_per_bit[i] < sel.path_delay_per_bit[u]) {
        u = i;
      }
    }
    if (u == n) break;
    settled[u] = true;
    // Relax every edge v -> u (v transmits toward the ego through u).
    for (size_t v = 0; v < n; ++v) {
      if (settled[v] || graph.adjacency(v, u) == 0) continue;
      const double cand =
          sel.path_delay_per_bit[u] + 1.0 / graph.capacity(v, u);
      if (cand < sel.path_delay_per_bit[v]) {
        sel.path_delay_per_bit[v] = cand;
        sel.next_hop[v] = u;
        sel.hops[v] = sel.hops[u] + 1;
      }
    }
  }

  for (size_t v = 0; v < n; ++v) {
    sel.reachable[v] = std::isfinite(sel.path_delay_per_bit[v]);
    if (!sel.reachable[v] || v == ego) continue;
    for (size_t cur = v; cur != ego; cur = sel.next_hop[cur]) {
      sel.link_matrix(cur, sel.next_hop[cur]) = 1;
    }
  }
  return sel;
}

LinkSelection DirectLinks(const CommGraph& graph) {
  graph.Validate();
  const size_t n = graph.n;
  const size_t ego = graph.ego_index;
  LinkSelection sel;
  sel.link_matrix = Matrix<uint8_t>(n, n, 0);
  sel.path_delay_per_bit.assign(n, kInf);
  sel.reachable.assign(n, false);
  sel.hops.assign(n, 0);
  sel.next_hop.assign(n, n);
  sel.path_delay_per_bit[ego] = 0.0;
  sel.reachable[ego] = true;
  for (size_t v = 0; v < n; ++v) {
    if (v == ego || graph.adjacency(v, ego) == 0) continue;
    sel.path_delay_per_bit[v] = 1.0 / graph.capacity(v, ego);
    sel.reachable[v] = true;
    sel.hops[v] = 1;
    sel.next_hop[v] = ego;
    sel.link_matrix(v, ego) = 1;
  }
  return sel;
}

ImportanceWeights DistanceWeights(std::span<const double> distances,
                                  double floor) {
  if (!(floor > 0.0)) throw DomainError("distance floor must be positive");
  ImportanceWeights out;
  out.w.reserve(distances.size());
  for (double d : distances) {
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw DomainError("helper distances must be non-negative");
    }
    out.w.push_back(1.0 / std::max(d, floor));
  }
  const double total = std::accumulate(out.w.begin(), out.w.end(), 0.0);
  for (double& w : out.w) w /= total;
  return out;
}

void DelayModel::Validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw DomainError("gamma must be positive");
  }
  if (!(d_max > 0.0) || !std::isfinite(d_max)) {
    throw DomainError("D_max must be positive");
  }
  if (!(rho_min > 0.0 && rho_min < 1.0)) {
    throw DomainError("rho_min must lie in (0, 1)");
  }
  if (volumes.size() != path_delay_per_bit.size()) {
    throw InputError("volumes and path delays differ in size");
  }
  for (size_t i = 0; i < volumes.size(); ++i) {
    if (!(volumes[i] > 0.0) || !std::isfinite(volumes[i])) {
      throw DomainError("volumes must be positive");
    }
    if (!(path_delay_per_bit[i] > 0.0) ||
        !std::isfinite(path_delay_per_bit[i])) {
      throw DomainError("path delay per bit must be positive (reachable)");
    }
  }
}

double MeanDelay(std::span<const double> rho, const DelayModel& model) {
  if (rho.size() != model.size()) {
    throw InputError("plan and delay model differ in size");
  }
  if (rho.empty()) return 0.0;
  double total = 0.0;
  for (size_t i = 0; i < rho.size(); ++i) {
    total += rho[i] * model.volumes[i] * model.path_delay_per_bit[i];
  }
  return total / static_cast<double>(rho.size());
}

double MeanDelay(const CompressionPlan& plan, const DelayModel& model) {
  return MeanDelay(plan.rho, model);
}

double Distortion(std::span<const double> rho, const ImportanceWeights& weights,
                  double gamma) {
  if (rho.size() != weights.w.size()) {
    throw InputError("plan and weights differ in size");
  }
  double total = 0.0;
  for (size_t i = 0; i < rho.size(); ++i) {
    total += weights.w[i] * std::pow(rho[i], -gamma);
  }
  return total;
}

void FinalizePlan(CompressionPlan& plan, const DelayModel& model,
                  const ImportanceWeights& weights) {
  const size_t n = plan.rho.size();
  plan.per_helper_delay.resize(n);
  for (size_t i = 0; i < n; ++i) {
    plan.per_helper_delay[i] =
        plan.rho[i] * model.volumes[i] * model.path_delay_per_bit[i];
  }
  plan.mean_delay = MeanDelay(plan.rho, model);
  plan.total_distortion = Distortion(plan.rho, weights, model.gamma);
}

CompressionPlan OptimalRatiosAnalytic(const DelayModel& model,
                                      const ImportanceWeights& weights) {
  model.Validate();
  CheckWeights(model, weights);
  CompressionPlan plan;
  const size_t n = model.size();
  if (n == 0) return plan;
  CheckFeasible(model, weights);

  const double gamma = model.gamma;
  const double lo_bound = model.rho_min;
  const std::vector<double> c = DelayCoefficients(model);

  if (Distortion(std::vector<double>(n, lo_bound), weights, gamma) <=
      model.d_max) {
    plan.rho.assign(n, lo_bound);
    plan.multiplier = 0.0;
    FinalizePlan(plan, model, weights);
    return plan;
  }

  // Unclipped stationary point rho_i = K a_i with K = mu^(1/(gamma+1)).
  std::vector<double> a(n);
  for (size_t i = 0; i < n; ++i) {
    a[i] = std::pow(gamma * weights.w[i] / c[i], 1.0 / (gamma + 1.0));
  }
  auto ratios_at = [&](double k) {
    std::vector<double> rho(n);
    for (size_t i = 0; i < n; ++i) {
      rho[i] = std::clamp(k * a[i], lo_bound, 1.0);
    }
    return rho;
  };

  double k_lo = kInf;
  double k_hi = 0.0;
  for (size_t i = 0; i < n; ++i) {
    k_lo = std::min(k_lo, lo_bound / a[i]);
    k_hi = std::max(k_hi, 1.0 / a[i]);
  }
  for (int it = 0; it < 200 && k_hi > k_lo * (1.0 + 1e-15); ++it) {
    const double mid = std::sqrt(k_lo * k_hi);
    if (Distortion(ratios_at(mid), weights, gamma) > model.d_max) {
      k_lo = mid;
    } else {
      k_hi = mid;
    }
  }

  // Clip-and-resolve: with the active set fixed, the budget equation has a
  // closed-form solution for K on the free coordinates.
  std::vector<double> rho = ratios_at(k_hi);
  double k = k_hi;
  double clipped = 0.0;
  double free_sum = 0.0;
  std::vector<bool> is_free(n, false);
  for (size_t i = 0; i < n; ++i) {
    const double raw = k_hi * a[i];
    if (raw > lo_bound && raw < 1.0) {
      is_free[i] = true;
      free_sum += weights.w[i] * std::pow(a[i], -gamma);
    } else {
      clipped += weights.w[i] * std::pow(rho[i], -gamma);
    }
  }
  if (free_sum > 0.0 && model.d_max > clipped) {
    const double k_exact =
        std::pow((model.d_max - clipped) / free_sum, -1.0 / gamma);
    bool consistent = true;
    for (size_t i = 0; i < n && consistent; ++i) {
      if (is_free[i]) {
        const double r = k_exact * a[i];
        consistent = r >= lo_bound && r <= 1.0;
      }
    }
    if (consistent) {
      k = k_exact;
      for (size_t i = 0; i < n; ++i) {
        if (is_free[i]) rho[i] = k * a[i];
      }
    }
  }

  plan.rho = std::move(rho);
  plan.multiplier = std::pow(k, gamma + 1.0);
  FinalizePlan(plan, model, weights);
  return plan;
}

double KktResidual(const CompressionPlan& plan, const DelayModel& model,
                   const ImportanceWeights& weights) {
  CheckWeights(model, weights);
  if (plan.rho.size() != model.size()) {
    throw InputError("plan and delay model differ in size");
  }
  const double gamma = model.gamma;
  const double mu = plan.multiplier;
  const std::vector<double> c = DelayCoefficients(model);
  double residual = 0.0;
  for (size_t i = 0; i < plan.rho.size(); ++i) {
    const double r = plan.rho[i];
    if (r < model.rho_min || r > 1.0) return kInf;
    const double grad =
        (c[i] - mu * gamma * weights.w[i] * std::pow(r, -gamma - 1.0)) / c[i];
    const bool at_lo = r <= model.rho_min * (1.0 + 1e-12);
    const bool at_hi = r >= 1.0 - 1e-12;
    double v;
    if (at_lo && at_hi) {
      v = 0.0;
    } else if (at_lo) {
      v = std::max(0.0, -grad);
    } else if (at_hi) {
      v = std::max(0.0, grad);
    } else {
      v = std::abs(grad);
    }
    residual = std::max(residual, v);
  }
  const double d = Distortion(plan.rho, weights, gamma);
  residual = std::max(residual, std::max(0.0, d - model.d_max) / model.d_max);
  if (mu > 0.0) {
    residual = std::max(residual, std::abs(d - model.d_max) / model.d_max);
  }
  return residual;
}

std::vector<double> ProjectOntoBudget(std::span<const double> y,
                                      const DelayModel& model,
                                      const ImportanceWeights& weights) {
  const size_t n = y.size();
  if (n != weights.w.size()) throw InputError("point and weights differ in size");
  const double gamma = model.gamma;
  const double lo_bound = model.rho_min;

  std::vector<double> x(n);
  for (size_t i = 0; i < n; ++i) x[i] = std::clamp(y[i], lo_bound, 1.0);
  if (Distortion(x, weights, gamma) <= model.d_max) return x;

  auto solve = [&](double nu) {
    for (size_t i = 0; i < n; ++i) {
      x[i] = SolveProjectedCoordinate(y[i], nu, gamma, weights.w[i], lo_bound);
    }
    return Distortion(x, weights, gamma);
  };

  // At nu_hi every coordinate sits at 1, which is feasible.
  double nu_hi = 0.0;
  for (size_t i = 0; i < n; ++i) {
    nu_hi = std::max(nu_hi, (1.0 - y[i]) / (gamma * weights.w[i]));
  }
  nu_hi = std::max(nu_hi, std::numeric_limits<double>::min());
  double nu_lo = 0.0;
  for (int it = 0; it < 200 && nu_hi - nu_lo > 1e-15 * nu_hi; ++it) {
    const double mid = 0.5 * (nu_lo + nu_hi);
    if (solve(mid) > model.d_max) {
      nu_lo = mid;
    } else {
      nu_hi = mid;
    }
  }
  solve(nu_hi);
  return x;
}

CompressionPlan OptimizeDelay(const DelayModel& model,
                              const ImportanceWeights& weights,
                              const GradientOptions& options) {
  model.Validate();
  CheckWeights(model, weights);
  if (!(options.step > 0.0) || options.iters < 0 || !(options.tol >= 0.0)) {
    throw DomainError("invalid gradient options");
  }
  CompressionPlan plan;
  const size_t n = model.size();
  if (n == 0) return plan;
  CheckFeasible(model, weights);

  std::vector<double> grad = DelayCoefficients(model);
  const double scale = *std::max_element(grad.begin(), grad.end());
  for (double& g : grad) g /= scale;

  // rho = 1 satisfies the budget whenever the problem is feasible.
  std::vector<double> x(n, 1.0);
  std::vector<double> best = x;
  double best_obj = MeanDelay(x, model);
  std::vector<double> y(n);
  plan.converged = false;
  int it = 0;
  for (; it < options.iters; ++it) {
    for (size_t i = 0; i < n; ++i) y[i] = x[i] - options.step * grad[i];
    std::vector<double> next = ProjectOntoBudget(y, model, weights);
    double move = 0.0;
    for (size_t i = 0; i < n; ++i) move = std::max(move, std::abs(next[i] - x[i]));
    x = std::move(next);
    const double obj = MeanDelay(x, model);
    if (obj < best_obj) {
      best_obj = obj;
      best = x;
    }
    if (move <= options.tol) {
      plan.converged = true;
      ++it;
      break;
    }
  }
  plan.iterations = it;
  plan.rho = std::move(best);
  FinalizePlan(plan, model, weights);

  // Recover the multiplier from the free coordinates for diagnostics.
  const std::vector<double> c = DelayCoefficients(model);
  double mu_sum = 0.0;
  int free_count = 0;
  for (size_t i = 0; i < n; ++i) {
    const double r = plan.rho[i];
    if (r > model.rho_min * (1.0 + 1e-9) && r < 1.0 - 1e-9) {
      mu_sum += c[i] / (model.gamma * weights.w[i] *
                        std::pow(r, -model.gamma - 1.0));
      ++free_count;
    }
  }
  plan.multiplier = free_count > 0 ? mu_sum / free_count : 0.0;
  return plan;
}

}  // namespace cacp
