// Copyright 2026 The revmatch Authors.
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

#ifndef REVMATCH_ASSIGN_H_
#define REVMATCH_ASSIGN_H_

// Affinity matrix construction and the capacity-constrained assignment
//
//   max_R  sum_u sum_j P_uj R_uj
//   s.t.   sum_j R_uj <= c_r  for every reviewer u
//          sum_u R_uj  = c_p  for every paper j   (<= in relaxed mode)
//          R_uj in {0, 1}
//
// solved as a min-cost flow source -> reviewer -> paper -> sink. The
// constraint matrix is a bipartite incidence matrix, hence totally
// unimodular, so the integral flow optimum is also optimal for the
// continuous relaxation 0 <= R_uj <= 1. The node potentials left by the
// solver give a feasible dual solution whose value is reported as a
// certificate of that.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "revmatch/csv.h"
#include "revmatch/dataset.h"
#include "revmatch/error.h"
#include "revmatch/matrix.h"
#include "revmatch/min_cost_flow.h"

namespace revmatch {

using AffinityMatrix = DenseMatrix<double>;

enum class Strategy { kBaseline, kResid, kNorm };

inline std::string ToString(Strategy s) {
  switch (s) {
    case Strategy::kBaseline: return "baseline";
    case Strategy::kResid: return "resid";
    case Strategy::kNorm: return "norm";
  }
  return "?";
}

inline Strategy ParseStrategy(const std::string& text) {
  if (text == "baseline") return Strategy::kBaseline;
  if (text == "resid") return Strategy::kResid;
  if (text == "norm") return Strategy::kNorm;
  throw UsageError("strategy must be baseline, resid or norm, got '" + text +
                   "'");
}

// Value used for pairs without a bid: midway between Low and OK.
inline constexpr double kUnknownRating = 2.5;

// Subtracts each reviewer's mean predicted rating from the row.
inline AffinityMatrix NormalizeResid(const AffinityMatrix& predicted) {
  if (predicted.cols() == 0) {
    throw DataError("cannot normalize rows without entries");
  }
  AffinityMatrix out = predicted;
  for (std::size_t u = 0; u < out.rows(); ++u) {
    auto row = out.row(u);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(row.size());
    for (double& v : row) v -= mean;
  }
  return out;
}

// Scales each reviewer's row to sum to one.
inline AffinityMatrix NormalizeNorm(const AffinityMatrix& predicted) {
  if (predicted.cols() == 0) {
    throw DataError("cannot normalize rows without entries");
  }
  AffinityMatrix out = predicted;
  for (std::size_t u = 0; u < out.rows(); ++u) {
    auto row = out.row(u);
    double sum = 0.0;
    for (double v : row) sum += v;
    if (!(sum > 0.0)) {
      throw NumericalError("norm normalization needs a positive row sum; "
                           "reviewer row " + std::to_string(u) + " sums to " +
                           FormatDouble(sum));
    }
    for (double& v : row) v /= sum;
  }
  return out;
}

// P_uj = (bid if present else 2.5) [+ normalized prediction].
inline AffinityMatrix BuildAffinity(const BidSet& original_bids,
                                    const AffinityMatrix& predicted,
                                    Strategy strategy) {
  AffinityMatrix out(predicted.rows(), predicted.cols(), kUnknownRating);
  for (const Bid& bid : original_bids) {
    out(bid.reviewer.index(), bid.paper.index()) = bid.rating;
  }
  if (strategy == Strategy::kBaseline) return out;
  const AffinityMatrix normalized = strategy == Strategy::kResid
                                        ? NormalizeResid(predicted)
                                        : NormalizeNorm(predicted);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out.data()[k] += normalized.data()[k];
  }
  return out;
}

struct Capacities {
  int per_paper = 3;     // c_p: reviews each paper receives
  int per_reviewer = 8;  // c_r: maximum reviews per reviewer
  bool relaxed_paper_coverage = false;

  bool operator==(const Capacities&) const = default;
};

class Assignment {
 public:
  Assignment() = default;
  Assignment(std::size_t reviewers, std::size_t papers)
      : cells_(reviewers, papers, 0) {}

  std::size_t reviewers() const { return cells_.rows(); }
  std::size_t papers() const { return cells_.cols(); }

  bool operator()(std::size_t u, std::size_t j) const {
    return cells_(u, j) != 0;
  }
  void Set(std::size_t u, std::size_t j, bool on) { cells_(u, j) = on ? 1 : 0; }

  std::size_t size() const {
    return static_cast<std::size_t>(
        std::count(cells_.data().begin(), cells_.data().end(), 1));
  }

  int ReviewerLoad(std::size_t u) const {
    const auto row = cells_.row(u);
    return static_cast<int>(std::count(row.begin(), row.end(), 1));
  }

  int PaperLoad(std::size_t j) const {
    int load = 0;
    for (std::size_t u = 0; u < reviewers(); ++u) load += cells_(u, j);
    return load;
  }

  std::vector<std::pair<ReviewerId, PaperId>> Pairs() const {
    std::vector<std::pair<ReviewerId, PaperId>> out;
    for (std::size_t u = 0; u < reviewers(); ++u) {
      for (std::size_t j = 0; j < papers(); ++j) {
        if (cells_(u, j)) {
          out.emplace_back(ReviewerId(static_cast<int>(u)),
                           PaperId(static_cast<int>(j)));
        }
      }
    }
    return out;
  }

  // True if every row and column respects `caps`.
  bool Satisfies(const Capacities& caps) const {
    for (std::size_t u = 0; u < reviewers(); ++u) {
      if (ReviewerLoad(u) > caps.per_reviewer) return false;
    }
    for (std::size_t j = 0; j < papers(); ++j) {
      const int load = PaperLoad(j);
      if (load > caps.per_paper) return false;
      if (!caps.relaxed_paper_coverage && load != caps.per_paper) return false;
    }
    return true;
  }

  bool operator==(const Assignment&) const = default;

 private:
  DenseMatrix<std::uint8_t> cells_;
};

inline double AssignmentObjective(const AffinityMatrix& affinity,
                                  const Assignment& assignment) {
  if (affinity.rows() != assignment.reviewers() ||
      affinity.cols() != assignment.papers()) {
    throw UsageError("affinity and assignment dimensions differ");
  }
  double total = 0.0;
  for (std::size_t u = 0; u < affinity.rows(); ++u) {
    for (std::size_t j = 0; j < affinity.cols(); ++j) {
      if (assignment(u, j)) total += affinity(u, j);
    }
  }
  return total;
}

struct SolverOptions {
  double cost_scale = 1e6;  // affinities are rounded to integer multiples
  // Optional m x n mask; non-zero entries are forbidden pairs.
  const DenseMatrix<std::uint8_t>* forbidden = nullptr;
};

struct SolveResult {
  Assignment assignment;
  double objective = 0.0;            // sum of P over assigned pairs
  std::int64_t scaled_objective = 0;  // same, in rounded integer units
  // Value of the dual solution read off the flow potentials; equals
  // scaled_objective when the relaxation optimum is integral.
  std::int64_t scaled_dual_bound = 0;
};

// Pairs where the reviewer declared a conflict with the paper's primary
// category.
inline DenseMatrix<std::uint8_t> PrimaryConflictMask(const Dataset& data) {
  DenseMatrix<std::uint8_t> mask(data.num_reviewers(), data.num_papers(), 0);
  for (std::size_t u = 0; u < data.num_reviewers(); ++u) {
    for (std::size_t j = 0; j < data.num_papers(); ++j) {
      const CategoryId primary = data.annotations.primary[j];
      if (data.annotations.RelationOf(ReviewerId(static_cast<int>(u)),
                                      primary) == Relation::kConflict) {
        mask(u, j) = 1;
      }
    }
  }
  return mask;
}

inline std::int64_t ScaledCost(double value, double scale) {
  if (!std::isfinite(value)) {
    throw NumericalError("affinity matrix has a non-finite entry");
  }
  const double scaled = std::round(value * scale);
  if (std::fabs(scaled) > 1e15) {
    throw NumericalError("affinity " + FormatDouble(value) +
                         " too large for the integer cost scale");
  }
  return static_cast<std::int64_t>(scaled);
}

inline SolveResult SolveAssignment(const AffinityMatrix& affinity,
                                   const Capacities& caps,
                                   const SolverOptions& options = {}) {
  const std::int64_t m = static_cast<std::int64_t>(affinity.rows());
  const std::int64_t n = static_cast<std::int64_t>(affinity.cols());
  if (caps.per_paper < 1 || caps.per_reviewer < 1) {
    throw UsageError("capacities c_p and c_r must be >= 1");
  }
  if (options.forbidden != nullptr &&
      (options.forbidden->rows() != affinity.rows() ||
       options.forbidden->cols() != affinity.cols())) {
    throw UsageError("forbidden mask dimensions differ from the affinity");
  }
  const std::int64_t demand = n * caps.per_paper;
  if (!caps.relaxed_paper_coverage) {
    const std::int64_t supply =
        m * std::min<std::int64_t>(caps.per_reviewer, n);
    const std::int64_t per_paper_short =
        n * std::max<std::int64_t>(0, caps.per_paper - m);
    const std::int64_t deficit =
        std::max(demand - supply, per_paper_short);
    if (deficit > 0) {
      throw InfeasibleError(
          "infeasible capacities: " + std::to_string(n) + " papers x c_p=" +
              std::to_string(caps.per_paper) + " need " +
              std::to_string(demand) + " reviews but " + std::to_string(m) +
              " reviewers x c_r=" + std::to_string(caps.per_reviewer) +
              " can supply at most " + std::to_string(demand - deficit) +
              " (deficit " + std::to_string(deficit) + ")",
          deficit);
    }
  }

  DenseMatrix<std::int64_t> cost(m, n);
  for (std::int64_t u = 0; u < m; ++u) {
    for (std::int64_t j = 0; j < n; ++j) {
      cost(u, j) = ScaledCost(affinity(u, j), options.cost_scale);
    }
  }
  auto allowed = [&](std::int64_t u, std::int64_t j) {
    return options.forbidden == nullptr || (*options.forbidden)(u, j) == 0;
  };

  // Nodes: source, reviewers, papers, sink.
  const int source = 0;
  const int sink = static_cast<int>(m + n + 1);
  auto reviewer_node = [](std::int64_t u) { return static_cast<int>(1 + u); };
  auto paper_node = [m](std::int64_t j) {
    return static_cast<int>(1 + m + j);
  };
  MinCostFlow graph(static_cast<int>(m + n + 2));
  for (std::int64_t u = 0; u < m; ++u) {
    graph.AddArc(source, reviewer_node(u), caps.per_reviewer, 0);
  }
  DenseMatrix<std::pair<int, int>> handles(m, n, {-1, -1});
  for (std::int64_t u = 0; u < m; ++u) {
    for (std::int64_t j = 0; j < n; ++j) {
      if (!allowed(u, j)) continue;
      handles(u, j) =
          graph.AddArc(reviewer_node(u), paper_node(j), 1, -cost(u, j));
    }
  }
  for (std::int64_t j = 0; j < n; ++j) {
    graph.AddArc(paper_node(j), sink, caps.per_paper, 0);
  }
  if (caps.relaxed_paper_coverage) {
    // Zero-cost bypass: units routed here are review slots left empty.
    graph.AddArc(source, sink, demand, 0);
  }

  // Shortest-path distances in the initial (acyclic) graph.
  std::vector<MinCostFlow::Cost> potential(graph.nodes(), 0);
  MinCostFlow::Cost sink_potential = 0;
  for (std::int64_t j = 0; j < n; ++j) {
    MinCostFlow::Cost best = MinCostFlow::kInf;
    for (std::int64_t u = 0; u < m; ++u) {
      if (allowed(u, j)) best = std::min(best, -cost(u, j));
    }
    potential[paper_node(j)] = best;
    sink_potential = std::min(sink_potential, best);
  }
  if (!caps.relaxed_paper_coverage) {
    sink_potential = MinCostFlow::kInf;
    for (std::int64_t j = 0; j < n; ++j) {
      sink_potential = std::min(sink_potential, potential[paper_node(j)]);
    }
  }
  potential[sink] = sink_potential;
  graph.InitPotentials(std::move(potential));

  const auto [flow, flow_cost] = graph.Run(source, sink, demand);
  if (flow < demand) {
    const std::int64_t deficit = demand - flow;
    throw InfeasibleError("infeasible: " + std::to_string(deficit) +
                              " review slots cannot be filled under the "
                              "capacity and conflict constraints (deficit " +
                              std::to_string(deficit) + ")",
                          deficit);
  }

  SolveResult result;
  result.assignment = Assignment(m, n);
  for (std::int64_t u = 0; u < m; ++u) {
    for (std::int64_t j = 0; j < n; ++j) {
      if (handles(u, j).first >= 0 && graph.Flow(handles(u, j)) > 0) {
        result.assignment.Set(u, j, true);
        result.scaled_objective += cost(u, j);
      }
    }
  }
  result.objective = AssignmentObjective(affinity, result.assignment);

  // Dual solution: a_u = max(0, pi_u), b_j = -pi_j (clamped at 0 when the
  // paper constraint is an inequality), plus the per-pair slack
  // max(0, C_uj - a_u - b_j). Weak duality makes this an upper bound on
  // the relaxation for any potentials; optimal potentials make it tight.
  const auto& pi = graph.potentials();
  std::int64_t dual = 0;
  std::vector<std::int64_t> a(m), b(n);
  for (std::int64_t u = 0; u < m; ++u) {
    a[u] = std::max<std::int64_t>(0, pi[reviewer_node(u)] - pi[source]);
    dual += a[u] * caps.per_reviewer;
  }
  for (std::int64_t j = 0; j < n; ++j) {
    b[j] = pi[source] - pi[paper_node(j)];
    if (caps.relaxed_paper_coverage) b[j] = std::max<std::int64_t>(0, b[j]);
    dual += b[j] * caps.per_paper;
  }
  for (std::int64_t u = 0; u < m; ++u) {
    for (std::int64_t j = 0; j < n; ++j) {
      if (!allowed(u, j)) continue;
      dual += std::max<std::int64_t>(0, cost(u, j) - a[u] - b[j]);
    }
  }
  result.scaled_dual_bound = dual;
  (void)flow_cost;
  return result;
}

inline void WriteAssignments(const std::string& path, const Dataset& data,
                             const Assignment& assignment) {
  auto out = OpenOutput(path);
  WriteCsvRow(out, {"reviewer", "paper"});
  for (const auto& [u, j] : assignment.Pairs()) {
    WriteCsvRow(out, {data.reviewers.Name(u), data.papers.Name(j)});
  }
}

// Objective, constraint slack histograms and wall time, for stdout.
inline void PrintSolveSummary(std::ostream& out, const SolveResult& result,
                              const Capacities& caps, double seconds) {
  const Assignment& r = result.assignment;
  std::map<int, int> reviewer_slack, paper_slack;
  for (std::size_t u = 0; u < r.reviewers(); ++u) {
    ++reviewer_slack[caps.per_reviewer - r.ReviewerLoad(u)];
  }
  for (std::size_t j = 0; j < r.papers(); ++j) {
    ++paper_slack[caps.per_paper - r.PaperLoad(j)];
  }
  out << "objective " << FormatDouble(result.objective) << '\n';
  out << "assigned_pairs " << r.size() << '\n';
  out << "lp_certificate_gap "
      << (result.scaled_dual_bound - result.scaled_objective) << '\n';
  out << "reviewer_slack";
  for (const auto& [slack, count] : reviewer_slack) {
    out << ' ' << slack << ':' << count;
  }
  out << '\n' << "paper_slack";
  for (const auto& [slack, count] : paper_slack) {
    out << ' ' << slack << ':' << count;
  }
  out << '\n' << "wall_seconds " << FormatDouble(seconds) << '\n';
}

}  // namespace revmatch

#endif  // REVMATCH_ASSIGN_H_
