#pragma once

// Exhaustive search over discretised demand deviations for short flex-only
// horizons. Deviations are integer multiples k(t) of a unit u = 5% of a
// constant base demand B, with |k(t)| <= K = f / 0.05. A point is admissible
// when sum k = 0 and every window of `window` consecutive steps sums to >= 0.
//
// The search is a depth-first branch and bound: a subtree is cut only when a
// valid lower bound on every completion is no better than the incumbent, so
// the returned value is the exact minimum over the admissible grid.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <vector>

namespace flexbill::testing {

struct EnumProblem {
  double base = 0.0;             // B, kW, constant over the horizon
  std::vector<double> pv;        // kW per step
  int k_max = 0;                 // K
  int window = 1;                // steps
  double dr_max = 0.0;
  std::vector<int> period;       // period index per step
  std::vector<double> dr_tou;    // per period
  std::vector<double> er;        // per step
  std::vector<double> nsr;       // per step

  double unit() const { return 0.05 * base; }
  std::size_t steps() const { return pv.size(); }

  double net(std::size_t t, int k) const { return base - pv[t] + k * unit(); }

  // quarter-hour energy charge / credit at one step
  double energy(std::size_t t, int k) const {
    const double d = net(t, k);
    return 0.25 * (d > 0 ? er[t] * d : nsr[t] * d);
  }

  double bill(const std::vector<int>& k) const {
    double dmax = 0.0;
    std::vector<double> pmax(dr_tou.size(), 0.0);
    double e = 0.0;
    for (std::size_t t = 0; t < steps(); ++t) {
      const double d = net(t, k[t]);
      dmax = std::max(dmax, d);
      pmax[period[t]] = std::max(pmax[period[t]], d);
      e += energy(t, k[t]);
    }
    double total = dr_max * dmax + e;
    for (std::size_t p = 0; p < dr_tou.size(); ++p) total += dr_tou[p] * pmax[p];
    return total;
  }

  bool admissible(const std::vector<int>& k) const {
    long sum = 0;
    for (int v : k) {
      if (v < -k_max || v > k_max) return false;
      sum += v;
    }
    if (sum != 0) return false;
    const auto n = static_cast<int>(steps());
    for (int s = 0; s + window <= n; ++s) {
      long w = 0;
      for (int t = s; t < s + window; ++t) w += k[static_cast<std::size_t>(t)];
      if (w < 0) return false;
    }
    return true;
  }

  // |bill(x) - bill(y)| <= gap_bound() whenever |x(t) - y(t)| <= u for all t
  double gap_bound() const {
    double top = 0.0;
    for (double r : dr_tou) top = std::max(top, r);
    double e = 0.0;
    for (double r : er) e += 0.25 * r;
    return unit() * (dr_max + top + e);
  }
};

struct EnumResult {
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> argmin;
  std::uint64_t leaves = 0;
};

class Enumerator {
 public:
  explicit Enumerator(const EnumProblem& p) : p_(p), n_(p.steps()), k_(n_, 0) {}

  EnumResult run() {
    res_ = {};
    std::vector<int> zero(n_, 0);
    res_.best = p_.bill(zero);
    res_.argmin = zero;
    build_floors();
    dfs(0, 0, 0.0, 0.0, std::vector<double>(p_.dr_tou.size(), 0.0));
    return res_;
  }

 private:
  // floor_[t][target + K(n-t)]: min energy over steps t..n-1 subject to
  // sum k = target, |k| <= K. Energy is convex in k, so raising the cheapest
  // marginal step one unit at a time from -K is optimal.
  void build_floors() {
    floor_.assign(n_ + 1, {});
    floor_[n_] = {0.0};
    for (std::size_t from = 0; from < n_; ++from) {
      const long span = static_cast<long>(p_.k_max) * static_cast<long>(n_ - from);
      std::vector<int> k(n_ - from, -p_.k_max);
      double total = 0.0;
      for (std::size_t i = 0; i < k.size(); ++i) total += p_.energy(from + i, k[i]);
      auto& row = floor_[from];
      row.assign(static_cast<std::size_t>(2 * span + 1), 0.0);
      row[0] = total;
      for (long step = 1; step <= 2 * span; ++step) {
        std::size_t arg = 0;
        double inc = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < k.size(); ++i) {
          if (k[i] == p_.k_max) continue;
          const double d = p_.energy(from + i, k[i] + 1) - p_.energy(from + i, k[i]);
          if (d < inc) {
            inc = d;
            arg = i;
          }
        }
        ++k[arg];
        total += inc;
        row[static_cast<std::size_t>(step)] = total;
      }
    }
  }

  double energy_floor(std::size_t from, long target) const {
    const long span = static_cast<long>(p_.k_max) * static_cast<long>(n_ - from);
    if (target < -span || target > span) return std::numeric_limits<double>::infinity();
    return floor_[from][static_cast<std::size_t>(target + span)];
  }

  bool windows_ok(std::size_t t) const {
    // every window containing t: completed ones must be >= 0, open ones must
    // still be able to reach 0
    const int w = p_.window;
    const auto ti = static_cast<int>(t);
    const auto n = static_cast<int>(n_);
    for (int s = std::max(0, ti - w + 1); s <= ti && s + w <= n; ++s) {
      long sum = 0;
      for (int i = s; i <= ti; ++i) sum += k_[static_cast<std::size_t>(i)];
      const long open = s + w - 1 - ti;
      if (sum + open * p_.k_max < 0) return false;
    }
    return true;
  }

  void dfs(std::size_t t, long sum, double energy, double dmax, std::vector<double> pmax) {
    auto demand = [&](double m, const std::vector<double>& pm) {
      double d = p_.dr_max * m;
      for (std::size_t q = 0; q < pm.size(); ++q) d += p_.dr_tou[q] * pm[q];
      return d;
    };
    if (t == n_) {
      ++res_.leaves;
      if (sum != 0) return;
      const double total = demand(dmax, pmax) + energy;
      if (total < res_.best) {
        res_.best = total;
        res_.argmin = k_;
      }
      return;
    }
    const auto remaining = static_cast<long>(n_ - t);
    for (int k = -p_.k_max; k <= p_.k_max; ++k) {
      const long s = sum + k;
      if (std::abs(s) > static_cast<long>(p_.k_max) * (remaining - 1)) continue;
      k_[t] = k;
      if (!windows_ok(t)) continue;
      const double d = p_.net(t, k);
      const double m = std::max(dmax, d);
      auto pm = pmax;
      auto& slot = pm[static_cast<std::size_t>(p_.period[t])];
      slot = std::max(slot, d);
      const double e = energy + p_.energy(t, k);
      const double bound = demand(m, pm) + e + (t + 1 < n_ ? energy_floor(t + 1, -s) : 0.0);
      if (bound >= res_.best - 1e-12) continue;
      dfs(t + 1, s, e, m, std::move(pm));
    }
    k_[t] = 0;
  }

  const EnumProblem& p_;
  std::size_t n_;
  std::vector<int> k_;
  std::vector<std::vector<double>> floor_;
  EnumResult res_;
};

inline EnumResult enumerate_minimum(const EnumProblem& p) { return Enumerator(p).run(); }

// Plain nested enumeration with no pruning beyond admissibility; only usable
// for tiny K, used to cross-check the branch and bound.
inline double naive_minimum(const EnumProblem& p) {
  const std::size_t n = p.steps();
  std::vector<int> k(n, -p.k_max);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    if (p.admissible(k)) best = std::min(best, p.bill(k));
    std::size_t i = 0;
    while (i < n && k[i] == p.k_max) k[i++] = -p.k_max;
    if (i == n) break;
    ++k[i];
  }
  return best;
}

}  // namespace flexbill::testing
