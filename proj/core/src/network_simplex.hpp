#pragma once

// Primal network simplex for the uncapacitated transportation problem
//   min sum_ij c_ij x_ij  s.t.  sum_j x_ij = supply_i,  sum_i x_ij = demand_j,  x >= 0.
//
// Supply nodes are 0..m-1, demand nodes m..m+n-1, and an artificial root m+n
// joins every node through a high-cost arc, giving an initial feasible tree.
// The spanning tree is kept in parent/pred/thread form (preorder thread list,
// subtree sizes and last-successor pointers) so that each pivot touches only
// the re-hung subtree. Entering arcs are chosen by block search.

#include <cstdint>
#include <span>
#include <vector>

namespace lipgan::detail {

template <class Flow>
class TransportSimplex {
 public:
  TransportSimplex(std::span<const double> cost, long m, long n, std::vector<Flow> supply,
                   std::vector<Flow> demand);

  /// Runs to optimality. Throws NumericError once `max_pivots` is exceeded.
  long solve(long max_pivots);

  Flow flow(long i, long j) const { return flow_[i * n_ + j]; }
  /// Largest flow left on an artificial arc (zero for a feasible optimum).
  Flow artificial_residual() const;

 private:
  static constexpr std::int8_t kTree = 0;
  static constexpr std::int8_t kLower = 1;
  static constexpr int kUp = 1;
  static constexpr int kDown = -1;

  long source(long e) const { return e < arc_num_ ? e / n_ : art_source_[e - arc_num_]; }
  long target(long e) const { return e < arc_num_ ? m_ + e % n_ : art_target_[e - arc_num_]; }
  double arc_cost(long e) const { return e < arc_num_ ? cost_[e] : art_cost_[e - arc_num_]; }

  void init();
  bool find_entering();
  void find_join();
  void find_leaving();
  void change_flow();
  void update_tree();
  void update_potential();
  void recompute_potentials();
  void pivot();

  std::span<const double> cost_;
  long m_, n_, node_num_, arc_num_, root_;
  std::vector<Flow> supply_;  // node supplies (demands negative)

  std::vector<Flow> flow_;  // real + artificial arcs
  std::vector<std::int8_t> state_;
  std::vector<long> art_source_, art_target_;
  std::vector<double> art_cost_;

  std::vector<long> parent_, pred_, thread_, rev_thread_, succ_num_, last_succ_, dirty_revs_;
  std::vector<int> pred_dir_;
  std::vector<double> pi_;

  long block_size_ = 0;
  long next_arc_ = 0;
  double tolerance_ = 0.0;

  long in_arc_ = -1, join_ = -1, u_in_ = -1, v_in_ = -1, u_out_ = -1, v_out_ = -1;
  Flow delta_{};
};

}  // namespace lipgan::detail
