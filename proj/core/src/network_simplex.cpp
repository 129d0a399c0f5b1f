#include "network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lipgan/errors.hpp"

namespace lipgan::detail {

template <class Flow>
TransportSimplex<Flow>::TransportSimplex(std::span<const double> cost, long m, long n,
                                         std::vector<Flow> supply, std::vector<Flow> demand)
    : cost_(cost), m_(m), n_(n), node_num_(m + n), arc_num_(m * n), root_(m + n) {
  supply_.resize(node_num_ + 1);
  for (long i = 0; i < m; ++i) supply_[i] = supply[i];
  for (long j = 0; j < n; ++j) supply_[m + j] = -demand[j];
  supply_[root_] = Flow{};
  init();
}

template <class Flow>
void TransportSimplex<Flow>::init() {
  const long all_arcs = arc_num_ + node_num_;
  flow_.assign(all_arcs, Flow{});
  state_.assign(all_arcs, kLower);
  art_source_.assign(node_num_, 0);
  art_target_.assign(node_num_, 0);
  art_cost_.assign(node_num_, 0.0);

  parent_.assign(node_num_ + 1, -1);
  pred_.assign(node_num_ + 1, -1);
  thread_.assign(node_num_ + 1, 0);
  rev_thread_.assign(node_num_ + 1, 0);
  succ_num_.assign(node_num_ + 1, 0);
  last_succ_.assign(node_num_ + 1, 0);
  pred_dir_.assign(node_num_ + 1, kUp);
  pi_.assign(node_num_ + 1, 0.0);

  double max_cost = 0.0;
  for (double c : cost_) max_cost = std::max(max_cost, std::abs(c));
  const double art_cost = (max_cost + 1.0) * static_cast<double>(node_num_);
  // Reduced costs below this are rounding noise in the potentials.
  tolerance_ = 8.0 * std::numeric_limits<double>::epsilon() * art_cost;

  block_size_ = std::max<long>(static_cast<long>(std::ceil(std::sqrt(static_cast<double>(arc_num_)))), 10);
  next_arc_ = 0;

  parent_[root_] = -1;
  pred_[root_] = -1;
  thread_[root_] = 0;
  rev_thread_[0] = root_;
  succ_num_[root_] = node_num_ + 1;
  last_succ_[root_] = root_ - 1;
  pi_[root_] = 0.0;

  for (long u = 0; u < node_num_; ++u) {
    const long e = arc_num_ + u;
    parent_[u] = root_;
    pred_[u] = e;
    thread_[u] = u + 1;
    rev_thread_[u + 1] = u;
    succ_num_[u] = 1;
    last_succ_[u] = u;
    state_[e] = kTree;
    if (supply_[u] >= Flow{}) {
      pred_dir_[u] = kUp;
      pi_[u] = 0.0;
      art_source_[u] = u;
      art_target_[u] = root_;
      flow_[e] = supply_[u];
      art_cost_[u] = 0.0;
    } else {
      pred_dir_[u] = kDown;
      pi_[u] = art_cost;
      art_source_[u] = root_;
      art_target_[u] = u;
      flow_[e] = -supply_[u];
      art_cost_[u] = art_cost;
    }
  }
}

template <class Flow>
bool TransportSimplex<Flow>::find_entering() {
  // Block search over real arcs, resuming where the last search stopped.
  double best = -tolerance_;
  long cnt = block_size_;
  long e = next_arc_;
  long i = e / n_, j = e % n_;
  bool found = false;
  for (long visited = 0; visited < arc_num_; ++visited) {
    if (state_[e] == kLower) {
      const double c = cost_[e] + pi_[i] - pi_[m_ + j];
      if (c < best) {
        best = c;
        in_arc_ = e;
        found = true;
      }
    }
    ++e;
    if (++j == n_) {
      j = 0;
      ++i;
    }
    if (e == arc_num_) {
      e = 0;
      i = 0;
      j = 0;
    }
    if (--cnt == 0) {
      if (found) break;
      cnt = block_size_;
    }
  }
  next_arc_ = e;
  return found;
}

template <class Flow>
void TransportSimplex<Flow>::find_join() {
  long u = source(in_arc_), v = target(in_arc_);
  while (u != v) {
    if (succ_num_[u] < succ_num_[v]) {
      u = parent_[u];
    } else {
      v = parent_[v];
    }
  }
  join_ = u;
}

template <class Flow>
void TransportSimplex<Flow>::find_leaving() {
  // Entering arcs are always at their lower bound (no capacities), so flow
  // is pushed source -> target along the entering arc.
  const long first = source(in_arc_);
  const long second = target(in_arc_);
  bool have = false;
  int result = 0;
  for (long u = first; u != join_; u = parent_[u]) {
    if (pred_dir_[u] != kUp) continue;
    const Flow d = flow_[pred_[u]];
    if (!have || d < delta_) {
      delta_ = d;
      u_out_ = u;
      result = 1;
      have = true;
    }
  }
  for (long u = second; u != join_; u = parent_[u]) {
    if (pred_dir_[u] != kDown) continue;
    const Flow d = flow_[pred_[u]];
    if (!have || d <= delta_) {
      delta_ = d;
      u_out_ = u;
      result = 2;
      have = true;
    }
  }
  if (!have) throw NumericError("network simplex: unbounded cycle (negative-cost cycle without blocking arc)");
  if (result == 1) {
    u_in_ = first;
    v_in_ = second;
  } else {
    u_in_ = second;
    v_in_ = first;
  }
}

template <class Flow>
void TransportSimplex<Flow>::change_flow() {
  if (delta_ > Flow{}) {
    const Flow val = delta_;
    flow_[in_arc_] += val;
    for (long u = source(in_arc_); u != join_; u = parent_[u]) {
      if (pred_dir_[u] == kUp) {
        flow_[pred_[u]] -= val;
      } else {
        flow_[pred_[u]] += val;
      }
    }
    for (long u = target(in_arc_); u != join_; u = parent_[u]) {
      if (pred_dir_[u] == kUp) {
        flow_[pred_[u]] += val;
      } else {
        flow_[pred_[u]] -= val;
      }
    }
  }
  state_[in_arc_] = kTree;
  flow_[pred_[u_out_]] = Flow{};
  state_[pred_[u_out_]] = kLower;
}

template <class Flow>
void TransportSimplex<Flow>::update_tree() {
  const long old_rev_thread = rev_thread_[u_out_];
  const long old_succ_num = succ_num_[u_out_];
  const long old_last_succ = last_succ_[u_out_];
  v_out_ = parent_[u_out_];

  if (u_in_ == u_out_) {
    parent_[u_in_] = v_in_;
    pred_[u_in_] = in_arc_;
    pred_dir_[u_in_] = u_in_ == source(in_arc_) ? kUp : kDown;

    if (thread_[v_in_] != u_out_) {
      long after = thread_[old_last_succ];
      thread_[old_rev_thread] = after;
      rev_thread_[after] = old_rev_thread;
      after = thread_[v_in_];
      thread_[v_in_] = u_out_;
      rev_thread_[u_out_] = v_in_;
      thread_[old_last_succ] = after;
      rev_thread_[after] = old_last_succ;
    }
  } else {
    // When old_rev_thread == v_in, join and v_out coincide.
    const long thread_continue = old_rev_thread == v_in_ ? thread_[old_last_succ] : thread_[v_in_];

    // Re-hang the stem nodes between u_in and u_out, reversing their parent links.
    long stem = u_in_;
    long par_stem = v_in_;
    long next_stem;
    long last = last_succ_[u_in_];
    long before;
    long after = thread_[last];
    thread_[v_in_] = u_in_;
    dirty_revs_.clear();
    dirty_revs_.push_back(v_in_);
    while (stem != u_out_) {
      next_stem = parent_[stem];
      thread_[last] = next_stem;
      dirty_revs_.push_back(last);

      before = rev_thread_[stem];
      thread_[before] = after;
      rev_thread_[after] = before;

      parent_[stem] = par_stem;
      par_stem = stem;
      stem = next_stem;

      last = last_succ_[stem] == last_succ_[par_stem] ? rev_thread_[par_stem] : last_succ_[stem];
      after = thread_[last];
    }
    parent_[u_out_] = par_stem;
    thread_[last] = thread_continue;
    rev_thread_[thread_continue] = last;
    last_succ_[u_out_] = last;

    if (old_rev_thread != v_in_) {
      thread_[old_rev_thread] = after;
      rev_thread_[after] = old_rev_thread;
    }

    for (long u : dirty_revs_) rev_thread_[thread_[u]] = u;

    long tmp_sc = 0;
    const long tmp_ls = last_succ_[u_out_];
    for (long u = u_out_, p = parent_[u]; u != u_in_; u = p, p = parent_[u]) {
      pred_[u] = pred_[p];
      pred_dir_[u] = -pred_dir_[p];
      tmp_sc += succ_num_[u] - succ_num_[p];
      succ_num_[u] = tmp_sc;
      last_succ_[p] = tmp_ls;
    }
    pred_[u_in_] = in_arc_;
    pred_dir_[u_in_] = u_in_ == source(in_arc_) ? kUp : kDown;
    succ_num_[u_in_] = old_succ_num;
  }

  const long up_limit_out = last_succ_[join_] == v_in_ ? join_ : -1;
  const long last_succ_out = last_succ_[u_out_];
  for (long u = v_in_; u != -1 && last_succ_[u] == v_in_; u = parent_[u]) {
    last_succ_[u] = last_succ_out;
  }

  if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
    for (long u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u]) {
      last_succ_[u] = old_rev_thread;
    }
  } else if (last_succ_out != old_last_succ) {
    for (long u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u]) {
      last_succ_[u] = last_succ_out;
    }
  }

  for (long u = v_in_; u != join_; u = parent_[u]) succ_num_[u] += old_succ_num;
  for (long u = v_out_; u != join_; u = parent_[u]) succ_num_[u] -= old_succ_num;
}

template <class Flow>
void TransportSimplex<Flow>::update_potential() {
  const double sigma = pi_[v_in_] - pi_[u_in_] - pred_dir_[u_in_] * arc_cost(in_arc_);
  const long end = thread_[last_succ_[u_in_]];
  for (long u = u_in_; u != end; u = thread_[u]) pi_[u] += sigma;
}

template <class Flow>
void TransportSimplex<Flow>::recompute_potentials() {
  // Preorder thread from the root visits every parent before its children.
  pi_[root_] = 0.0;
  for (long u = thread_[root_]; u != root_; u = thread_[u]) {
    const double c = arc_cost(pred_[u]);
    pi_[u] = pi_[parent_[u]] + (pred_dir_[u] == kUp ? -c : c);
  }
}

template <class Flow>
void TransportSimplex<Flow>::pivot() {
  find_join();
  find_leaving();
  change_flow();
  update_tree();
  update_potential();
}

template <class Flow>
long TransportSimplex<Flow>::solve(long max_pivots) {
  long pivots = 0;
  for (;;) {
    if (!find_entering()) {
      recompute_potentials();
      if (!find_entering()) break;
    }
    if (++pivots > max_pivots) {
      throw NumericError("network simplex: no convergence after " + std::to_string(max_pivots) +
                         " pivots (m=" + std::to_string(m_) + ", n=" + std::to_string(n_) + ")");
    }
    pivot();
    if (pivots % 1024 == 0) recompute_potentials();
  }
  return pivots;
}

template <class Flow>
Flow TransportSimplex<Flow>::artificial_residual() const {
  Flow worst{};
  for (long e = arc_num_; e < arc_num_ + node_num_; ++e) worst = std::max(worst, flow_[e]);
  return worst;
}

template class TransportSimplex<double>;
template class TransportSimplex<std::int64_t>;

}  // namespace lipgan::detail
