#include "mongerays/network_simplex.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>

#include "mongerays/error.hpp"

namespace mongerays {

namespace {

class TransportSimplex {
 public:
  explicit TransportSimplex(const TransportProblem& p)
      : p_(p), m_(p.supply.size()), n_(p.demand.size()), nodes_(m_ + n_ + 1), root_(m_ + n_),
        real_arcs_(m_ * n_), arcs_(real_arcs_ + m_ + n_) {
    double max_cost = 0.0;
    for (double c : p.cost) max_cost = std::max(max_cost, c);
    big_m_ = (max_cost + 1.0) * static_cast<double>(nodes_);
    eps_ = 1e-12 * (max_cost + 1.0);
    const double total = std::accumulate(p.supply.begin(), p.supply.end(), 0.0);
    flow_eps_ = 1e-15 * std::max(1.0, total);

    flow_.assign(arcs_, 0.0);
    in_tree_.assign(arcs_, 0);
    tree_.reserve(nodes_ - 1);
    for (std::size_t i = 0; i < m_; ++i) {
      flow_[real_arcs_ + i] = p.supply[i];
      tree_.push_back(real_arcs_ + i);
    }
    for (std::size_t j = 0; j < n_; ++j) {
      flow_[real_arcs_ + m_ + j] = p.demand[j];
      tree_.push_back(real_arcs_ + m_ + j);
    }
    for (std::size_t a : tree_) in_tree_[a] = 1;
    block_ = std::max<std::size_t>(16, static_cast<std::size_t>(std::sqrt(double(real_arcs_))));
    rebuild();
  }

  std::size_t run() {
    const std::size_t guard = 50 * (arcs_ + nodes_) + 1000;
    std::size_t pivots = 0;
    while (true) {
      const std::size_t entering = price();
      if (entering == kNone) break;
      pivot(entering);
      if (++pivots > guard) {
        throw Error(ErrorKind::NumericFailure, "network simplex pivot guard exceeded");
      }
    }
    for (std::size_t a = real_arcs_; a < arcs_; ++a) {
      if (flow_[a] > 1e-9 * std::max(1.0, total_supply())) {
        throw Error(ErrorKind::Infeasible, "artificial arc carries flow at optimum");
      }
    }
    return pivots;
  }

  TransportResult result(std::size_t pivots) const {
    TransportResult out;
    out.pivots = pivots;
    for (std::size_t a : tree_) {
      if (a < real_arcs_ && flow_[a] > flow_eps_) {
        out.flows.push_back({a / n_, a % n_, flow_[a]});
      }
    }
    std::sort(out.flows.begin(), out.flows.end(), [](const auto& l, const auto& r) {
      return l.source != r.source ? l.source < r.source : l.sink < r.sink;
    });
    for (const auto& f : out.flows) out.cost += f.mass * p_.cost[f.source * n_ + f.sink];
    return out;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  double total_supply() const {
    return std::accumulate(p_.supply.begin(), p_.supply.end(), 0.0);
  }

  std::size_t tail(std::size_t a) const {
    if (a < real_arcs_) return a / n_;
    if (a < real_arcs_ + m_) return a - real_arcs_;
    return root_;
  }
  std::size_t head(std::size_t a) const {
    if (a < real_arcs_) return m_ + a % n_;
    if (a < real_arcs_ + m_) return root_;
    return m_ + (a - real_arcs_ - m_);
  }
  double cost(std::size_t a) const { return a < real_arcs_ ? p_.cost[a] : big_m_; }
  double reduced(std::size_t a) const { return cost(a) + pot_[tail(a)] - pot_[head(a)]; }

  std::size_t price() {
    // Artificial arcs never re-enter: their cost dominates any real path.
    std::size_t scanned = 0;
    while (scanned < real_arcs_) {
      double best = -eps_;
      std::size_t best_arc = kNone;
      const std::size_t stop = std::min(real_arcs_, scanned + block_);
      for (; scanned < stop; ++scanned) {
        const std::size_t a = next_arc_;
        next_arc_ = next_arc_ + 1 == real_arcs_ ? 0 : next_arc_ + 1;
        if (in_tree_[a]) continue;
        const double rc = reduced(a);
        if (rc < best) {
          best = rc;
          best_arc = a;
        }
      }
      if (best_arc != kNone) return best_arc;
    }
    return kNone;
  }

  void pivot(std::size_t entering) {
    const std::size_t u = tail(entering);
    const std::size_t v = head(entering);

    // Cycle orientation: join -> ... -> u -> v -> ... -> join. The last blocking arc in
    // that order leaves, which keeps the tree strongly feasible.
    std::size_t a = u, b = v;
    while (a != b) {
      if (depth_[a] >= depth_[b]) a = parent_[a];
      else b = parent_[b];
    }
    const std::size_t join = a;

    double delta = std::numeric_limits<double>::infinity();
    std::size_t leaving = kNone;
    for (std::size_t x = u; x != join; x = parent_[x]) {
      const std::size_t arc = parent_arc_[x];
      if (tail(arc) == x && flow_[arc] < delta) {
        delta = flow_[arc];
        leaving = arc;
      }
    }
    for (std::size_t x = v; x != join; x = parent_[x]) {
      const std::size_t arc = parent_arc_[x];
      if (head(arc) == x && flow_[arc] <= delta) {
        delta = flow_[arc];
        leaving = arc;
      }
    }
    if (leaving == kNone) throw Error(ErrorKind::NumericFailure, "unbounded pivot cycle");

    if (delta > 0.0) {
      flow_[entering] += delta;
      for (std::size_t x = u; x != join; x = parent_[x]) {
        const std::size_t arc = parent_arc_[x];
        flow_[arc] += tail(arc) == x ? -delta : delta;
        if (std::abs(flow_[arc]) < flow_eps_) flow_[arc] = 0.0;
      }
      for (std::size_t x = v; x != join; x = parent_[x]) {
        const std::size_t arc = parent_arc_[x];
        flow_[arc] += head(arc) == x ? -delta : delta;
        if (std::abs(flow_[arc]) < flow_eps_) flow_[arc] = 0.0;
      }
    }
    flow_[leaving] = 0.0;
    in_tree_[leaving] = 0;
    in_tree_[entering] = 1;
    *std::find(tree_.begin(), tree_.end(), leaving) = entering;
    rebuild();
  }

  void rebuild() {
    offsets_.assign(nodes_ + 1, 0);
    for (std::size_t a : tree_) {
      ++offsets_[tail(a) + 1];
      ++offsets_[head(a) + 1];
    }
    for (std::size_t i = 0; i < nodes_; ++i) offsets_[i + 1] += offsets_[i];
    incident_.assign(2 * tree_.size(), 0);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t a : tree_) {
      incident_[fill[tail(a)]++] = a;
      incident_[fill[head(a)]++] = a;
    }
    parent_.assign(nodes_, kNone);
    parent_arc_.assign(nodes_, kNone);
    depth_.assign(nodes_, 0);
    pot_.assign(nodes_, 0.0);
    queue_.clear();
    queue_.push_back(root_);
    parent_[root_] = root_;
    for (std::size_t q = 0; q < queue_.size(); ++q) {
      const std::size_t x = queue_[q];
      for (std::size_t k = offsets_[x]; k < offsets_[x + 1]; ++k) {
        const std::size_t arc = incident_[k];
        const std::size_t y = tail(arc) == x ? head(arc) : tail(arc);
        if (parent_[y] != kNone) continue;
        parent_[y] = x;
        parent_arc_[y] = arc;
        depth_[y] = depth_[x] + 1;
        // Tree arcs have zero reduced cost: pot[head] = pot[tail] + cost.
        pot_[y] = tail(arc) == x ? pot_[x] + cost(arc) : pot_[x] - cost(arc);
        queue_.push_back(y);
      }
    }
    parent_[root_] = root_;
  }

  const TransportProblem& p_;
  std::size_t m_, n_, nodes_, root_, real_arcs_, arcs_;
  double big_m_ = 0.0, eps_ = 0.0, flow_eps_ = 0.0;
  std::vector<double> flow_;
  std::vector<unsigned char> in_tree_;
  std::vector<std::size_t> tree_;
  std::size_t block_ = 16, next_arc_ = 0;

  std::vector<std::size_t> offsets_, incident_, parent_, parent_arc_, depth_, queue_;
  std::vector<double> pot_;
};

}  // namespace

TransportResult solve_transport(const TransportProblem& problem) {
  const std::size_t m = problem.supply.size();
  const std::size_t n = problem.demand.size();
  if (problem.cost.size() != m * n) {
    throw Error(ErrorKind::InputError, "transport cost matrix has wrong shape");
  }
  const double s = std::accumulate(problem.supply.begin(), problem.supply.end(), 0.0);
  const double d = std::accumulate(problem.demand.begin(), problem.demand.end(), 0.0);
  if (std::abs(s - d) > 1e-12) {
    throw Error(ErrorKind::Infeasible, "supply and demand totals differ");
  }
  for (double v : problem.supply) {
    if (!(v > 0.0)) throw Error(ErrorKind::InputError, "supplies must be positive");
  }
  for (double v : problem.demand) {
    if (!(v > 0.0)) throw Error(ErrorKind::InputError, "demands must be positive");
  }
  if (m == 0 || n == 0) return {};
  TransportSimplex simplex(problem);
  const std::size_t pivots = simplex.run();
  return simplex.result(pivots);
}

}  // namespace mongerays
