#include "slim/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "lattice.hpp"
#include "slim/errors.hpp"

namespace slim {

using detail::i128;
using detail::Lattice;

namespace {

constexpr Ticks kInfTicks = (static_cast<Ticks>(1) << 125);

/// Full assignment with its ordering key.
struct Candidate {
  Ticks total = kInfTicks;
  i128 l1 = 0;
  std::vector<int> index;  // value index per coefficient, original order

  bool valid() const { return !index.empty(); }
};

// Objective first, then L1, then lexicographic order. Value lists are sorted
// ascending, so comparing value indices compares values.
bool better(const Candidate& a, const Candidate& b) {
  if (!b.valid()) return a.valid();
  if (a.total != b.total) return a.total < b.total;
  if (a.l1 != b.l1) return a.l1 < b.l1;
  return a.index < b.index;
}

std::vector<i128> full_margins(const Lattice& lat, const std::vector<int>& index) {
  std::vector<i128> margin(static_cast<std::size_t>(lat.n), 0);
  for (Eigen::Index j = 0; j < lat.p; ++j) {
    const auto v = lat.values[static_cast<std::size_t>(j)][static_cast<std::size_t>(index[static_cast<std::size_t>(j)])];
    if (v == 0) continue;
    const auto* col = lat.column(j);
    for (Eigen::Index i = 0; i < lat.n; ++i) margin[static_cast<std::size_t>(i)] += static_cast<i128>(col[i]) * v;
  }
  return margin;
}

Candidate make_candidate(const Lattice& lat, std::vector<int> index) {
  Candidate c;
  const auto margin = full_margins(lat, index);
  Ticks total = 0;
  for (Eigen::Index i = 0; i < lat.n; ++i)
    if (margin[static_cast<std::size_t>(i)] <= 0) total += lat.weight[static_cast<std::size_t>(i)];
  for (Eigen::Index j = 0; j < lat.p; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    total += lat.penalty[ju][static_cast<std::size_t>(index[ju])];
    c.l1 += lat.l1_nano[ju][static_cast<std::size_t>(index[ju])];
  }
  c.total = total;
  c.index = std::move(index);
  return c;
}

/// Exact coordinate and pair line searches around a full assignment.
class Polisher {
 public:
  explicit Polisher(const Lattice& lat) : lat_(lat) {}

  Candidate run(Candidate c, std::uint64_t pair_work_budget) {
    margin_ = full_margins(lat_, c.index);
    for (int sweep = 0; sweep < 200; ++sweep) {
      if (coordinate_sweep(c)) continue;
      if (!pair_sweep(c, pair_work_budget)) break;
    }
    return c;
  }

  /// Best assignment of coordinate j (and of `threshold` jointly, when given)
  /// with every other coordinate of c fixed.
  Candidate best_move(const Candidate& c, Eigen::Index j, std::optional<Eigen::Index> threshold) {
    margin_ = full_margins(lat_, c.index);
    const auto ju = static_cast<std::size_t>(j);
    const i128 cur_j = lat_.values[ju][static_cast<std::size_t>(c.index[ju])];
    const auto* col_j = lat_.column(j);
    std::vector<i128> base(margin_.size());
    Candidate best;
    if (!threshold) {
      for (std::size_t i = 0; i < base.size(); ++i) base[i] = margin_[i] - static_cast<i128>(col_j[i]) * cur_j;
      best_for(c, j, base, fixed_penalty(c) - lat_.penalty[ju][static_cast<std::size_t>(c.index[ju])],
               c.l1 - lat_.l1_nano[ju][static_cast<std::size_t>(c.index[ju])], best);
      return best;
    }
    const auto k = *threshold;
    const auto ku = static_cast<std::size_t>(k);
    const i128 cur_k = lat_.values[ku][static_cast<std::size_t>(c.index[ku])];
    const auto* col_k = lat_.column(k);
    const Ticks rest_penalty = fixed_penalty(c) - lat_.penalty[ju][static_cast<std::size_t>(c.index[ju])] -
                               lat_.penalty[ku][static_cast<std::size_t>(c.index[ku])];
    const i128 rest_l1 = c.l1 - lat_.l1_nano[ju][static_cast<std::size_t>(c.index[ju])] -
                         lat_.l1_nano[ku][static_cast<std::size_t>(c.index[ku])];
    Candidate probe = c;
    for (std::size_t a = 0; a < lat_.values[ju].size(); ++a) {
      const i128 va = lat_.values[ju][a];
      for (std::size_t i = 0; i < base.size(); ++i)
        base[i] = margin_[i] + static_cast<i128>(col_j[i]) * (va - cur_j) - static_cast<i128>(col_k[i]) * cur_k;
      probe.index[ju] = static_cast<int>(a);
      best_for(probe, k, base, rest_penalty + lat_.penalty[ju][a], rest_l1 + lat_.l1_nano[ju][a], best);
    }
    return best;
  }

 private:
  void apply(Candidate& c, Eigen::Index j, int to) {
    const auto ju = static_cast<std::size_t>(j);
    const int from = c.index[ju];
    if (from == to) return;
    const i128 delta = static_cast<i128>(lat_.values[ju][static_cast<std::size_t>(to)]) -
                       lat_.values[ju][static_cast<std::size_t>(from)];
    const auto* col = lat_.column(j);
    for (Eigen::Index i = 0; i < lat_.n; ++i) margin_[static_cast<std::size_t>(i)] += static_cast<i128>(col[i]) * delta;
    c.index[ju] = to;
  }

  Ticks fixed_penalty(const Candidate& c) const {
    Ticks f = 0;
    for (Eigen::Index j = 0; j < lat_.p; ++j)
      f += lat_.penalty[static_cast<std::size_t>(j)][static_cast<std::size_t>(c.index[static_cast<std::size_t>(j)])];
    return f;
  }

  // Best value of coordinate j with the rest fixed; margins given without j.
  void best_for(const Candidate& c, Eigen::Index j, const std::vector<i128>& base, Ticks other_penalty, i128 other_l1,
                Candidate& best) {
    const auto ju = static_cast<std::size_t>(j);
    detail::loss_profile(base, lat_.column(j), lat_.values[ju], lat_.weight, profile_);
    for (std::size_t v = 0; v < profile_.size(); ++v) {
      const Ticks total = profile_[v] + other_penalty + lat_.penalty[ju][v];
      if (total > best.total) continue;
      Candidate trial;
      trial.total = total;
      trial.l1 = other_l1 + lat_.l1_nano[ju][v];
      if (total == best.total && trial.l1 > best.l1) continue;
      trial.index = c.index;
      trial.index[ju] = static_cast<int>(v);
      if (better(trial, best)) best = std::move(trial);
    }
  }

  bool coordinate_sweep(Candidate& c) {
    bool improved = false;
    std::vector<i128> base(margin_.size());
    for (Eigen::Index j = 0; j < lat_.p; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const i128 cur = lat_.values[ju][static_cast<std::size_t>(c.index[ju])];
      const auto* col = lat_.column(j);
      for (std::size_t i = 0; i < base.size(); ++i) base[i] = margin_[i] - static_cast<i128>(col[i]) * cur;
      Candidate best = c;
      best_for(c, j, base, fixed_penalty(c) - lat_.penalty[ju][static_cast<std::size_t>(c.index[ju])],
               c.l1 - lat_.l1_nano[ju][static_cast<std::size_t>(c.index[ju])], best);
      if (better(best, c)) {
        apply(c, j, best.index[ju]);
        c.total = best.total;
        c.l1 = best.l1;
        improved = true;
      }
    }
    return improved;
  }

  bool pair_sweep(Candidate& c, std::uint64_t budget) {
    // Pairs with the most penalized-free coordinate (usually the intercept) come
    // first because moving a feature typically needs a new threshold.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    for (Eigen::Index j = 0; j < lat_.p; ++j)
      for (Eigen::Index k = 0; k < lat_.p; ++k)
        if (j != k) pairs.emplace_back(j, k);
    std::stable_sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
      return lat_.values[static_cast<std::size_t>(a.second)].size() > lat_.values[static_cast<std::size_t>(b.second)].size();
    });
    std::uint64_t work = 0;
    std::vector<i128> base(margin_.size());
    for (const auto& [j, k] : pairs) {
      const auto ju = static_cast<std::size_t>(j);
      const auto ku = static_cast<std::size_t>(k);
      work += lat_.values[ju].size() * static_cast<std::uint64_t>(lat_.n);
      if (work > budget) return false;
      const i128 cur_j = lat_.values[ju][static_cast<std::size_t>(c.index[ju])];
      const i128 cur_k = lat_.values[ku][static_cast<std::size_t>(c.index[ku])];
      const auto* col_j = lat_.column(j);
      const auto* col_k = lat_.column(k);
      const Ticks rest_penalty = fixed_penalty(c) - lat_.penalty[ju][static_cast<std::size_t>(c.index[ju])] -
                                 lat_.penalty[ku][static_cast<std::size_t>(c.index[ku])];
      const i128 rest_l1 = c.l1 - lat_.l1_nano[ju][static_cast<std::size_t>(c.index[ju])] -
                           lat_.l1_nano[ku][static_cast<std::size_t>(c.index[ku])];
      Candidate best = c;
      Candidate probe = c;
      for (std::size_t a = 0; a < lat_.values[ju].size(); ++a) {
        if (static_cast<int>(a) == c.index[ju]) continue;
        const i128 va = lat_.values[ju][a];
        for (std::size_t i = 0; i < base.size(); ++i)
          base[i] = margin_[i] + static_cast<i128>(col_j[i]) * (va - cur_j) - static_cast<i128>(col_k[i]) * cur_k;
        probe.index[ju] = static_cast<int>(a);
        best_for(probe, k, base, rest_penalty + lat_.penalty[ju][a], rest_l1 + lat_.l1_nano[ju][a], best);
      }
      if (better(best, c)) {
        apply(c, j, best.index[ju]);
        apply(c, k, best.index[ku]);
        c.total = best.total;
        c.l1 = best.l1;
        return true;
      }
    }
    return false;
  }

  const Lattice& lat_;
  std::vector<i128> margin_;
  std::vector<Ticks> profile_;
};

std::vector<int> to_index(const Lattice& lat, const Eigen::VectorXd& lambda) {
  std::vector<int> index(static_cast<std::size_t>(lat.p));
  for (Eigen::Index j = 0; j < lat.p; ++j)
    index[static_cast<std::size_t>(j)] = static_cast<int>(lat.index_of(j, Decimal::from_double(lambda(j))));
  return index;
}

Eigen::VectorXd to_vector(const Lattice& lat, const std::vector<int>& index) {
  Eigen::VectorXd out(lat.p);
  for (Eigen::Index j = 0; j < lat.p; ++j)
    out(j) = lat.decimals[static_cast<std::size_t>(j)][static_cast<std::size_t>(index[static_cast<std::size_t>(j)])]
                 .to_double();
  return out;
}

// Ridge-stabilized logistic regression weights, 0 on the intercept.
std::vector<double> logistic_direction(const Dataset& d) {
  const auto& x = d.features();
  const Eigen::Index p = d.p();
  Eigen::VectorXd y01 = (d.labels().cast<double>().array() + 1.0) / 2.0;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
  const double ridge = 1e-3 * static_cast<double>(d.n());
  for (int iter = 0; iter < 30; ++iter) {
    const Eigen::VectorXd prob = ((-(x * w).array()).exp() + 1.0).inverse().matrix();
    const Eigen::VectorXd grad = x.transpose() * (prob - y01) + ridge * w;
    const Eigen::VectorXd curv = (prob.array() * (1.0 - prob.array())).matrix();
    Eigen::MatrixXd hess = x.transpose() * curv.asDiagonal() * x;
    hess.diagonal().array() += ridge;
    const Eigen::VectorXd step = hess.ldlt().solve(grad);
    if (!step.allFinite()) break;
    w -= step;
    if (step.norm() <= 1e-10 * (1.0 + w.norm())) break;
  }
  std::vector<double> dir(static_cast<std::size_t>(p), 0.0);
  for (Eigen::Index j = 0; j < p; ++j)
    if (!(d.intercept_index() && j == *d.intercept_index()) && std::isfinite(w(j)))
      dir[static_cast<std::size_t>(j)] = w(j);
  return dir;
}

int snap_value(const Lattice& lat, Eigen::Index j, double target) {
  const auto& dec = lat.decimals[static_cast<std::size_t>(j)];
  int best = static_cast<int>(lat.zero_index[static_cast<std::size_t>(j)]);
  double best_dist = std::abs(target);
  for (std::size_t v = 0; v < dec.size(); ++v) {
    const double val = dec[v].to_double();
    const double dist = std::abs(val - target);
    const double cur = dec[static_cast<std::size_t>(best)].to_double();
    if (dist < best_dist || (dist == best_dist && std::abs(val) < std::abs(cur))) {
      best = static_cast<int>(v);
      best_dist = dist;
    }
  }
  return best;
}

// Snaps t * dir onto the lattice for scales t shrinking by 2^(1/steps) from
// the largest admissible value, picking the intercept by exact line search.
// Distinct points, largest scale first.
std::vector<std::vector<int>> rounded_points(const Lattice& lat, const Dataset& d, const std::vector<double>& dir,
                                             int steps) {
  const auto intercept = d.intercept_index();
  double largest = 0.0, reach = 0.0;
  for (Eigen::Index j = 0; j < lat.p; ++j) {
    if (intercept && j == *intercept) continue;
    const auto ju = static_cast<std::size_t>(j);
    largest = std::max(largest, std::abs(dir[ju]));
    for (const auto& v : lat.decimals[ju]) reach = std::max(reach, std::abs(v.to_double()));
  }
  std::vector<std::vector<int>> out;
  if (largest == 0.0) return out;
  for (int h = 0; h < 64 * steps; ++h) {
    const double t = reach / largest * std::exp2(-static_cast<double>(h) / steps);
    std::vector<int> index(static_cast<std::size_t>(lat.p));
    bool all_zero = true;
    for (Eigen::Index j = 0; j < lat.p; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      index[ju] = static_cast<int>(lat.zero_index[ju]);
      if (intercept && j == *intercept) continue;
      index[ju] = snap_value(lat, j, dir[ju] * t);
      if (index[ju] != static_cast<int>(lat.zero_index[ju])) all_zero = false;
    }
    if (all_zero) break;
    if (intercept) {
      const auto ku = static_cast<std::size_t>(*intercept);
      const auto margin = full_margins(lat, index);
      std::vector<Ticks> profile;
      detail::loss_profile(margin, lat.column(*intercept), lat.values[ku], lat.weight, profile);
      int pick = static_cast<int>(lat.zero_index[ku]);
      for (std::size_t v = 0; v < profile.size(); ++v) {
        const auto& pv = profile[static_cast<std::size_t>(pick)];
        if (profile[v] < pv || (profile[v] == pv && lat.l1_nano[ku][v] < lat.l1_nano[ku][static_cast<std::size_t>(pick)]))
          pick = static_cast<int>(v);
      }
      index[ku] = pick;
    }
    if (out.empty() || out.back() != index) out.push_back(std::move(index));
  }
  return out;
}

std::string config_fingerprint(const SlimConfig& cfg, double c1) {
  std::ostringstream os;
  os << "c0=" << format_double(cfg.c0) << ";c1=" << format_double(c1) << ";w+=" << format_double(cfg.w_plus)
     << ";w-=" << format_double(cfg.w_minus) << ";gamma=" << format_double(cfg.gamma);
  return hex64(fnv1a(os.str()));
}

}  // namespace

std::string to_string(SolveStatus s) { return s == SolveStatus::kOptimal ? "optimal" : "feasible_budget_exhausted"; }

TraceSink csv_trace_sink(std::ostream& out) {
  return [&out](const TracePoint& t) {
    out << format_double(t.elapsed_s) << ',' << format_double(t.incumbent_objective) << ','
        << format_double(t.lower_bound) << ',' << t.incumbent_nnz << '\n';
  };
}

// ---------------------------------------------------------------- SearchState

SearchState::SearchState(const Dataset& d, const CoefficientSet& s, const SlimConfig& cfg)
    : lattice_(Lattice::build(d, s, cfg)),
      assigned_(static_cast<std::size_t>(d.p()), -1),
      margin_(static_cast<std::size_t>(d.n()), 0),
      slack_(static_cast<std::size_t>(d.n()), 0),
      free_count_(d.p()) {
  for (const auto& best : lattice_->best_case)
    for (std::size_t i = 0; i < slack_.size(); ++i) slack_[i] += best[i];
}

Eigen::Index SearchState::p() const { return lattice_->p; }

void SearchState::assign(Eigen::Index j, const Decimal& value) { assign_index(j, lattice_->index_of(j, value)); }

void SearchState::assign_index(Eigen::Index j, std::size_t value_index) {
  const auto ju = static_cast<std::size_t>(j);
  if (assigned_.at(ju) >= 0) unassign(j);
  const i128 v = lattice_->values[ju].at(value_index);
  const auto* col = lattice_->column(j);
  const auto& best = lattice_->best_case[ju];
  for (std::size_t i = 0; i < margin_.size(); ++i) {
    margin_[i] += static_cast<i128>(col[i]) * v;
    slack_[i] -= best[i];
  }
  fixed_ += lattice_->penalty[ju][value_index];
  assigned_[ju] = static_cast<int>(value_index);
  --free_count_;
}

void SearchState::unassign(Eigen::Index j) {
  const auto ju = static_cast<std::size_t>(j);
  if (assigned_.at(ju) < 0) return;
  const auto vi = static_cast<std::size_t>(assigned_[ju]);
  const i128 v = lattice_->values[ju][vi];
  const auto* col = lattice_->column(j);
  const auto& best = lattice_->best_case[ju];
  for (std::size_t i = 0; i < margin_.size(); ++i) {
    margin_[i] -= static_cast<i128>(col[i]) * v;
    slack_[i] += best[i];
  }
  fixed_ -= lattice_->penalty[ju][vi];
  assigned_[ju] = -1;
  ++free_count_;
}

bool SearchState::is_assigned(Eigen::Index j) const { return assigned_.at(static_cast<std::size_t>(j)) >= 0; }
bool SearchState::complete() const { return free_count_ == 0; }

Ticks SearchState::lower_bound() const {
  Ticks bound = fixed_;
  for (std::size_t i = 0; i < margin_.size(); ++i)
    if (margin_[i] + slack_[i] <= 0) bound += lattice_->weight[i];
  return bound;
}

std::vector<Ticks> SearchState::child_bounds(Eigen::Index j) const {
  const auto ju = static_cast<std::size_t>(j);
  if (assigned_.at(ju) >= 0) throw ArgumentError("coefficient already assigned");
  std::vector<i128> base(margin_.size());
  const auto& best = lattice_->best_case[ju];
  for (std::size_t i = 0; i < base.size(); ++i) base[i] = margin_[i] + slack_[i] - best[i];
  std::vector<Ticks> out;
  detail::loss_profile(base, lattice_->column(j), lattice_->values[ju], lattice_->weight, out);
  for (std::size_t v = 0; v < out.size(); ++v) out[v] += fixed_ + lattice_->penalty[ju][v];
  return out;
}

double lower_bound_of(const SearchState& state) { return from_ticks(state.lower_bound()); }

// ------------------------------------------------------------- BranchAndBound

class BranchAndBound {
 public:
  BranchAndBound(const Dataset& d, const CoefficientSet& s, const SlimConfig& cfg, const TraceSink& sink)
      : data_(d), set_(s), cfg_(cfg), sink_(sink), start_(Clock::now()) {}

  SolveResult run() {
    cfg_.validate();
    state_template_ = std::make_unique<SearchState>(data_, set_, cfg_);
    lat_ = state_template_->lattice_.get();
    if (cfg_.stop_at_objective) target_ = to_ticks(*cfg_.stop_at_objective);
    build_order();

    // Initial incumbents: the zero model and the polished warm start.
    std::vector<int> zero(static_cast<std::size_t>(lat_->p));
    for (Eigen::Index j = 0; j < lat_->p; ++j) zero[static_cast<std::size_t>(j)] = static_cast<int>(lat_->zero_index[static_cast<std::size_t>(j)]);
    offer(make_candidate(*lat_, zero));
    offer(polish(make_candidate(*lat_, to_index(*lat_, warm_start(data_, set_)))));
    offer(polish(make_candidate(*lat_, zero)));
    forward_selection(zero);
    rounded_seeds();

    make_tasks();
    const int workers = std::max(1, std::min<int>(cfg_.workers, static_cast<int>(tasks_.size())));
    worker_bounds_.assign(static_cast<std::size_t>(workers), kInfTicks);
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back([this, w] { work(w); });
      for (auto& t : pool) t.join();
    }
    return finish();
  }

 private:
  using Clock = std::chrono::steady_clock;

  struct Child {
    Ticks bound;
    int rank;
    int value;
  };

  struct Frame {
    std::size_t depth;
    i128 l1;
    std::vector<Child> children;
    std::size_t next = 0;
  };

  struct Task {
    std::vector<int> prefix;  // value index per search position
    Ticks bound;
    i128 l1;
  };

  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

  Candidate polish(Candidate c) const {
    Polisher p(*lat_);
    return p.run(std::move(c), 400'000'000ULL);
  }

  // Most discriminative coefficients first; value order 0, then by |value|,
  // the sign agreeing with the class-mean difference breaking ties.
  // Greedy seeds: each step adds the feature whose best value, with the
  // intercept re-fitted, gives the lowest objective; every step is polished.
  void forward_selection(const std::vector<int>& zero) {
    const auto threshold = data_.intercept_index();
    Polisher p(*lat_);
    Candidate current = make_candidate(*lat_, zero);
    std::vector<char> used(static_cast<std::size_t>(lat_->p), 0);
    if (threshold) used[static_cast<std::size_t>(*threshold)] = 1;
    std::uint64_t work = 0;
    for (;;) {
      Candidate step;
      Eigen::Index pick = -1;
      for (Eigen::Index j = 0; j < lat_->p; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        if (used[ju]) continue;
        work += lat_->values[ju].size() * static_cast<std::uint64_t>(lat_->n);
        if (work > kForwardWork || should_stop()) return;
        auto c = p.best_move(current, j, threshold);
        if (c.index[ju] == zero[ju]) continue;
        if (better(c, step)) {
          step = std::move(c);
          pick = j;
        }
      }
      if (pick < 0) return;
      used[static_cast<std::size_t>(pick)] = 1;
      current = step;
      offer(polish(current));
    }
  }

  // Rounded logistic regression at many scales; the best few are polished.
  void rounded_seeds() {
    std::vector<Candidate> pool;
    for (auto& index : rounded_points(*lat_, data_, logistic_direction(data_), 4))
      pool.push_back(make_candidate(*lat_, std::move(index)));
    std::sort(pool.begin(), pool.end(), better);
    for (std::size_t k = 0; k < pool.size() && k < kPolishedSeeds && !should_stop(); ++k) offer(polish(pool[k]));
  }

  static constexpr std::size_t kPolishedSeeds = 8;
  static constexpr std::uint64_t kForwardWork = 400'000'000ULL;

  void build_order() {
    const auto& x = data_.features();
    const auto& y = data_.labels();
    std::vector<double> diff(static_cast<std::size_t>(lat_->p), 0.0);
    const double npos = std::max<double>(1.0, static_cast<double>(data_.positives()));
    const double nneg = std::max<double>(1.0, static_cast<double>(data_.negatives()));
    for (Eigen::Index j = 0; j < lat_->p; ++j) {
      double sp = 0, sn = 0;
      for (Eigen::Index i = 0; i < data_.n(); ++i) (y(i) == 1 ? sp : sn) += x(i, j);
      diff[static_cast<std::size_t>(j)] = sp / npos - sn / nneg;
    }
    order_.resize(static_cast<std::size_t>(lat_->p));
    std::iota(order_.begin(), order_.end(), Eigen::Index{0});
    std::stable_sort(order_.begin(), order_.end(), [&](Eigen::Index a, Eigen::Index b) {
      return std::abs(diff[static_cast<std::size_t>(a)]) > std::abs(diff[static_cast<std::size_t>(b)]);
    });
    rank_.resize(static_cast<std::size_t>(lat_->p));
    for (Eigen::Index j = 0; j < lat_->p; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const auto& vals = lat_->values[ju];
      const bool positive_first = diff[ju] >= 0.0;
      std::vector<int> idx(vals.size());
      std::iota(idx.begin(), idx.end(), 0);
      std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        const auto va = vals[static_cast<std::size_t>(a)], vb = vals[static_cast<std::size_t>(b)];
        const auto aa = va < 0 ? -va : va, ab = vb < 0 ? -vb : vb;
        if (aa != ab) return aa < ab;
        return positive_first ? va > vb : va < vb;
      });
      rank_[ju].assign(vals.size(), 0);
      for (std::size_t r = 0; r < idx.size(); ++r) rank_[ju][static_cast<std::size_t>(idx[r])] = static_cast<int>(r);
    }
  }

  std::vector<Child> children_of(const SearchState& state, std::size_t depth) const {
    const Eigen::Index j = order_[depth];
    const auto bounds = state.child_bounds(j);
    std::vector<Child> out;
    out.reserve(bounds.size());
    for (std::size_t v = 0; v < bounds.size(); ++v)
      out.push_back({bounds[v], rank_[static_cast<std::size_t>(j)][v], static_cast<int>(v)});
    std::sort(out.begin(), out.end(), [](const Child& a, const Child& b) {
      return a.bound != b.bound ? a.bound < b.bound : a.rank < b.rank;
    });
    return out;
  }

  // A subtree with this bound and partial L1 cannot hold anything better than the incumbent.
  static bool prunable(Ticks bound, i128 l1, Ticks inc_total, i128 inc_l1) {
    return bound > inc_total || (bound == inc_total && l1 > inc_l1);
  }

  void make_tasks() {
    tasks_.push_back({{}, state_template_->lower_bound(), 0});
    if (cfg_.workers <= 1) return;
    const std::size_t want = static_cast<std::size_t>(cfg_.workers) * 8;
    for (std::size_t depth = 0; depth + 1 < order_.size() && tasks_.size() < want; ++depth) {
      std::vector<Task> next;
      for (const auto& t : tasks_) {
        SearchState s = *state_template_;
        for (std::size_t k = 0; k < t.prefix.size(); ++k) s.assign_index(order_[k], static_cast<std::size_t>(t.prefix[k]));
        for (const auto& c : children_of(s, depth)) {
          const i128 l1 = t.l1 + lat_->l1_nano[static_cast<std::size_t>(order_[depth])][static_cast<std::size_t>(c.value)];
          if (prunable(c.bound, l1, incumbent_.total, incumbent_.l1)) continue;
          Task child{t.prefix, c.bound, l1};
          child.prefix.push_back(c.value);
          next.push_back(std::move(child));
        }
      }
      tasks_ = std::move(next);
      if (tasks_.empty()) break;
    }
  }

  bool offer(Candidate c) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!better(c, incumbent_)) return false;
    incumbent_ = std::move(c);
    version_.fetch_add(1, std::memory_order_release);
    if (target_ && incumbent_.total <= *target_) stop_.store(true);
    record_trace_locked();
    return true;
  }

  Ticks global_bound_locked() const {
    Ticks lb = incumbent_.total;
    for (std::size_t t = next_task_.load(); t < tasks_.size(); ++t) lb = std::min(lb, tasks_[t].bound);
    for (const auto b : worker_bounds_) lb = std::min(lb, b);
    return lb;
  }

  void record_trace_locked() {
    Ticks lb = std::max(best_bound_, std::min(global_bound_locked(), incumbent_.total));
    if (tasks_.empty()) lb = 0;
    best_bound_ = lb;
    TracePoint t;
    t.elapsed_s = elapsed();
    t.incumbent_objective = from_ticks(incumbent_.total);
    t.lower_bound = from_ticks(std::min(lb, incumbent_.total));
    t.incumbent_nnz = 0;
    for (Eigen::Index j = 0; j < lat_->p; ++j)
      if (incumbent_.index[static_cast<std::size_t>(j)] != static_cast<int>(lat_->zero_index[static_cast<std::size_t>(j)]))
        ++t.incumbent_nnz;
    trace_.push_back(t);
    if (sink_) sink_(t);
    last_trace_s_ = t.elapsed_s;
  }

  bool should_stop() {
    if (stop_.load(std::memory_order_relaxed)) return true;
    if (cfg_.node_limit && nodes_.load(std::memory_order_relaxed) >= cfg_.node_limit) {
      stop_.store(true);
      return true;
    }
    if (elapsed() >= cfg_.time_budget_s) {
      stop_.store(true);
      return true;
    }
    return false;
  }

  void publish_bound(int worker, Ticks bound) {
    std::lock_guard<std::mutex> lock(mutex_);
    worker_bounds_[static_cast<std::size_t>(worker)] = bound;
    const Ticks lb = std::min(global_bound_locked(), incumbent_.total);
    if (cfg_.gap_tolerance > 0.0 && incumbent_.total > 0) {
      const double gap = from_ticks(incumbent_.total - lb) / std::max(from_ticks(incumbent_.total), 1e-12);
      if (gap <= cfg_.gap_tolerance) stop_.store(true);
    }
    if (elapsed() - last_trace_s_ >= 1.0) record_trace_locked();
  }

  void work(int worker) {
    for (;;) {
      std::size_t t;
      {
        std::lock_guard<std::mutex> lock(mutex_);
        t = next_task_.load();
        if (t >= tasks_.size() || stop_.load()) break;
        // Claim the task and publish its bound in one step so the global bound never skips it.
        worker_bounds_[static_cast<std::size_t>(worker)] = tasks_[t].bound;
        next_task_.store(t + 1);
      }
      explore(worker, tasks_[t]);
      if (stop_.load()) break;
    }
    std::lock_guard<std::mutex> lock(mutex_);
    if (!stop_.load()) worker_bounds_[static_cast<std::size_t>(worker)] = kInfTicks;
  }

  void explore(int worker, const Task& task) {
    SearchState state = *state_template_;
    for (std::size_t k = 0; k < task.prefix.size(); ++k)
      state.assign_index(order_[k], static_cast<std::size_t>(task.prefix[k]));

    Ticks inc_total = kInfTicks;
    i128 inc_l1 = 0;
    std::uint64_t seen_version = ~0ULL;
    auto refresh = [&] {
      const auto v = version_.load(std::memory_order_acquire);
      if (v == seen_version) return;
      std::lock_guard<std::mutex> lock(mutex_);
      inc_total = incumbent_.total;
      inc_l1 = incumbent_.l1;
      seen_version = v;
    };
    refresh();

    const std::size_t p = order_.size();
    if (task.prefix.size() == p) {
      offer(make_candidate_from(state, task.prefix));
      return;
    }
    if (prunable(task.bound, task.l1, inc_total, inc_l1)) return;

    std::vector<Frame> stack;
    stack.push_back({task.prefix.size(), task.l1, children_of(state, task.prefix.size()), 0});
    std::vector<int> path(task.prefix);
    std::uint64_t local_nodes = 0;

    while (!stack.empty()) {
      Frame& f = stack.back();
      refresh();
      bool descended = false;
      while (f.next < f.children.size()) {
        const Child c = f.children[f.next++];
        const auto j = order_[f.depth];
        const i128 l1 = f.l1 + lat_->l1_nano[static_cast<std::size_t>(j)][static_cast<std::size_t>(c.value)];
        if (c.bound > inc_total) {
          f.next = f.children.size();
          break;
        }
        if (prunable(c.bound, l1, inc_total, inc_l1)) continue;

        ++local_nodes;
        nodes_.fetch_add(1, std::memory_order_relaxed);
        if ((local_nodes & 127) == 0) {
          if (should_stop()) return;
          if ((local_nodes & 4095) == 0) publish_bound(worker, stack_bound(stack));
        }

        state.assign_index(j, static_cast<std::size_t>(c.value));
        path.push_back(c.value);
        if (f.depth + 1 == p) {
          // Bounds at the last level are exact objectives.
          Candidate cand = make_candidate_from(state, path);
          if (better(cand, incumbent_snapshot(inc_total, inc_l1))) {
            if (offer(polish(std::move(cand)))) refresh();
          }
          state.unassign(j);
          path.pop_back();
          refresh();
          continue;
        }
        stack.push_back({f.depth + 1, l1, children_of(state, f.depth + 1), 0});
        descended = true;
        break;
      }
      if (descended) continue;
      // Frame exhausted: undo the assignment that created it.
      const std::size_t depth = stack.back().depth;
      stack.pop_back();
      if (!stack.empty()) {
        state.unassign(order_[depth - 1]);
        path.pop_back();
      }
    }
  }

  static Candidate incumbent_snapshot(Ticks total, i128 l1) {
    Candidate c;
    c.total = total;
    c.l1 = l1;
    c.index.assign(1, std::numeric_limits<int>::max());  // never wins the lexicographic tie
    return c;
  }

  Ticks stack_bound(const std::vector<Frame>& stack) const {
    Ticks lb = kInfTicks;
    for (const auto& f : stack) {
      const std::size_t at = f.next == 0 ? 0 : f.next - 1;
      if (at < f.children.size()) lb = std::min(lb, f.children[at].bound);
    }
    return lb;
  }

  Candidate make_candidate_from(const SearchState&, const std::vector<int>& path) const {
    std::vector<int> index(order_.size());
    for (std::size_t k = 0; k < order_.size(); ++k) index[static_cast<std::size_t>(order_[k])] = path[k];
    return make_candidate(*lat_, std::move(index));
  }

  SolveResult finish() {
    SolveResult r;
    const bool exhausted = !stop_.load() && next_task_.load() >= tasks_.size();
    Ticks lb;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      lb = exhausted ? incumbent_.total : std::max(best_bound_, std::min(global_bound_locked(), incumbent_.total));
      best_bound_ = lb;
      if (trace_.empty() || trace_.back().lower_bound != from_ticks(lb)) record_trace_locked();
    }
    const Eigen::VectorXd lambda = to_vector(*lat_, incumbent_.index);
    r.objective = evaluate(data_, lambda, cfg_, &set_);
    if (r.objective.total_ticks() != incumbent_.total) throw InternalError("incumbent objective disagrees with evaluate()");
    r.lower_bound = from_ticks(lb);
    const double total = r.objective.total();
    r.gap = exhausted ? 0.0 : std::max(0.0, (total - r.lower_bound) / std::max(total, 1e-12));
    r.status = r.gap <= cfg_.gap_tolerance ? SolveStatus::kOptimal : SolveStatus::kFeasibleBudgetExhausted;
    r.trace = trace_;
    r.nodes_explored = nodes_.load();
    r.elapsed_s = elapsed();
    r.c1 = lat_->c1;
    r.best.coefficients = lambda;
    r.best.feature_names = data_.feature_names();
    r.best.intercept_index = data_.intercept_index();
    r.best.provenance = {config_fingerprint(cfg_, lat_->c1), hex64(data_.fingerprint()), to_string(r.status)};
    return r;
  }

  const Dataset& data_;
  const CoefficientSet& set_;
  SlimConfig cfg_;
  const TraceSink& sink_;
  Clock::time_point start_;

  std::unique_ptr<SearchState> state_template_;
  const Lattice* lat_ = nullptr;
  std::vector<Eigen::Index> order_;
  std::vector<std::vector<int>> rank_;
  std::vector<Task> tasks_;
  std::optional<Ticks> target_;

  std::mutex mutex_;
  Candidate incumbent_;
  std::atomic<std::uint64_t> version_{0};
  std::atomic<std::uint64_t> nodes_{0};
  std::atomic<bool> stop_{false};
  std::atomic<std::size_t> next_task_{0};
  std::vector<Ticks> worker_bounds_;
  Ticks best_bound_ = 0;
  std::vector<TracePoint> trace_;
  double last_trace_s_ = 0.0;
};

SolveResult solve(const Dataset& d, const CoefficientSet& s, const SlimConfig& cfg, const TraceSink& sink) {
  BranchAndBound bb(d, s, cfg, sink);
  return bb.run();
}

// ----------------------------------------------------------------- warm start

Eigen::VectorXd warm_start(const Dataset& d, const CoefficientSet& s) {
  SlimConfig unit;
  unit.c0 = 0.0;
  unit.c1 = 0.0;
  const auto lat = Lattice::build(d, s, unit);
  const auto& x = d.features();
  const auto& y = d.labels();
  const auto intercept = d.intercept_index();

  std::vector<double> diff(static_cast<std::size_t>(d.p()), 0.0);
  const double npos = std::max<double>(1.0, static_cast<double>(d.positives()));
  const double nneg = std::max<double>(1.0, static_cast<double>(d.negatives()));
  double largest = 0.0;
  for (Eigen::Index j = 0; j < d.p(); ++j) {
    if (intercept && j == *intercept) continue;
    double sp = 0, sn = 0;
    for (Eigen::Index i = 0; i < d.n(); ++i) (y(i) == 1 ? sp : sn) += x(i, j);
    diff[static_cast<std::size_t>(j)] = sp / npos - sn / nneg;
    largest = std::max(largest, std::abs(diff[static_cast<std::size_t>(j)]));
  }

  auto snap = [&](Eigen::Index j, double target) {
    const auto& dec = lat->decimals[static_cast<std::size_t>(j)];
    int best = static_cast<int>(lat->zero_index[static_cast<std::size_t>(j)]);
    double best_dist = std::abs(target);
    for (std::size_t v = 0; v < dec.size(); ++v) {
      const double val = dec[v].to_double();
      const double dist = std::abs(val - target);
      const double cur = dec[static_cast<std::size_t>(best)].to_double();
      if (dist < best_dist || (dist == best_dist && std::abs(val) < std::abs(cur))) {
        best = static_cast<int>(v);
        best_dist = dist;
      }
    }
    return best;
  };

  Candidate best;
  for (int halvings = 0; halvings < 64; ++halvings) {
    const double factor = std::ldexp(1.0, -halvings);
    std::vector<int> index(static_cast<std::size_t>(d.p()));
    bool all_zero = true;
    for (Eigen::Index j = 0; j < d.p(); ++j) {
      const auto ju = static_cast<std::size_t>(j);
      index[ju] = static_cast<int>(lat->zero_index[ju]);
      if ((intercept && j == *intercept) || largest == 0.0) continue;
      const double reach = s.domain(j).max_abs().to_double();
      index[ju] = snap(j, diff[ju] / largest * reach * factor);
      if (index[ju] != static_cast<int>(lat->zero_index[ju])) all_zero = false;
    }
    if (intercept) {
      // Threshold: the intercept value with the fewest mistakes, then smallest |value|.
      const auto k = *intercept;
      const auto ku = static_cast<std::size_t>(k);
      auto margin = full_margins(*lat, index);
      std::vector<Ticks> profile;
      detail::loss_profile(margin, lat->column(k), lat->values[ku], lat->weight, profile);
      int pick = static_cast<int>(lat->zero_index[ku]);
      for (std::size_t v = 0; v < profile.size(); ++v) {
        const auto& pv = profile[static_cast<std::size_t>(pick)];
        const auto av = lat->l1_nano[ku][v], ap = lat->l1_nano[ku][static_cast<std::size_t>(pick)];
        if (profile[v] < pv || (profile[v] == pv && av < ap)) pick = static_cast<int>(v);
      }
      index[ku] = pick;
    }
    Candidate c = make_candidate(*lat, index);
    if (better(c, best)) best = std::move(c);
    if (all_zero) break;
  }
  return to_vector(*lat, best.index);
}

}  // namespace slim
