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
#ifndef CACP_NETOPT_H_
#define CACP_NETOPT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cacp/channel.h"
#include "cacp/geometry.h"
#include "cacp/matrix.h"

namespace cacp {

// V2V communication graph. adjacency is binary with a zero diagonal and
// capacity(i, j) > 0 exactly where adjacency(i, j) == 1.
struct CommGraph {
  size_t n = 0;
  size_t ego_index = 0;
  Matrix<uint8_t> adjacency;
  Matrix<double> capacity;  // bit/s

  // Throws InputError if the invariants above do not hold.
  void Validate() const;
  // Node indices of every vehicle other than the ego, ascending.
  std::vector<size_t> Helpers() const;
};

// Samples the CSI of every unordered vehicle pair at time t. The diagonal is
// left default-constructed.
Matrix<ChannelState> SampleLinkStates(std::span<const Vec2> positions,
                                      const RadioParams& radio,
                                      const CsiTrace& trace, double t);

// Links every pair within max_range whose sampled capacity is positive.
// Throws ConfigError for fewer than two vehicles and InputError for
// coincident positions.
CommGraph BuildGraph(std::span<const Vec2> positions,
                     const Matrix<ChannelState>& csi, double max_range,
                     size_t ego_index);

// Result of pruning the graph down to one min-delay path per helper. All
// vectors are indexed by node; the ego's own entry is reachable with zero
// hops and zero delay.
struct LinkSelection {
  Matrix<uint8_t> link_matrix;
  std::vector<double> path_delay_per_bit;  // s/bit, sum of 1/C per hop
  std::vector<bool> reachable;
  std::vector<int> hops;
  std::vector<size_t> next_hop;  // toward the ego; n for unreachable nodes
};

// Dijkstra toward the ego with edge cost 1/capacity (store-and-forward per-bit
// delay). Ties resolve to the lowest node index. The link matrix is the union
// of the selected paths.
LinkSelection SelectLinks(const CommGraph& graph);

// Baseline without relaying: each helper uses its direct edge to the ego or
// is unreachable.
LinkSelection DirectLinks(const CommGraph& graph);

// Per-helper priority, normalized to sum 1.
struct ImportanceWeights {
  std::vector<double> w;
};

inline constexpr double kDefaultDistanceFloor = 5.0;

// w_i proportional to 1 / max(distance_i, floor).
ImportanceWeights DistanceWeights(std::span<const double> distances,
                                  double floor = kDefaultDistanceFloor);

// Minimize (1/N) sum_i rho_i V_i tau_i subject to
// sum_i w_i rho_i^-gamma <= d_max and rho_i in [rho_min, 1].
struct DelayModel {
  double gamma = 1.0;
  double d_max = 4.0;
  double rho_min = 0.01;
  std::vector<double> volumes;             // bits
  std::vector<double> path_delay_per_bit;  // s/bit

  size_t size() const { return volumes.size(); }
  void Validate() const;
};

struct CompressionPlan {
  std::vector<double> rho;
  std::vector<double> per_helper_delay;  // s
  double mean_delay = 0.0;               // s
  double total_distortion = 0.0;
  // Lagrange multiplier of the distortion budget (0 when inactive).
  double multiplier = 0.0;
  bool converged = true;
  int iterations = 0;
};

double MeanDelay(std::span<const double> rho, const DelayModel& model);
double MeanDelay(const CompressionPlan& plan, const DelayModel& model);
double Distortion(std::span<const double> rho, const ImportanceWeights& weights,
                  double gamma);

// Closed-form KKT solution: rho_i proportional to (w_i / (V_i tau_i))^(1/(gamma+1))
// on the free set, multiplier located by bisection with clip-and-resolve.
// Throws InfeasibleError when d_max < sum_i w_i.
CompressionPlan OptimalRatiosAnalytic(const DelayModel& model,
                                      const ImportanceWeights& weights);

// Max normalized violation of stationarity, primal feasibility and
// complementary slackness, using plan.multiplier.
double KktResidual(const CompressionPlan& plan, const DelayModel& model,
                   const ImportanceWeights& weights);

// Euclidean projection of y onto {rho in box : sum w rho^-gamma <= d_max}.
std::vector<double> ProjectOntoBudget(std::span<const double> y,
                                      const DelayModel& model,
                                      const ImportanceWeights& weights);

struct GradientOptions {
  // Step length in rho units; the gradient is scaled to unit max-norm.
  double step = 1.0;
  int iters = 5000;
  // Stop once no coordinate moves by more than tol.
  double tol = 1e-13;
};

// Projected gradient descent from rho = 1. Returns the best feasible iterate;
// converged is false when iters ran out before the tolerance was met.
CompressionPlan OptimizeDelay(const DelayModel& model,
                              const ImportanceWeights& weights,
                              const GradientOptions& options = {});

// Fills per_helper_delay, mean_delay and total_distortion from plan.rho.
void FinalizePlan(CompressionPlan& plan, const DelayModel& model,
                  const ImportanceWeights& weights);

}  // namespace cacp

#endif  // CACP_NETOPT_H_
