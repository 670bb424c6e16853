#include "parisian/g_minimizer.hpp"

#include "parisian/error.hpp"
#include "parisian/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

namespace parisian {

namespace {

constexpr double kBracketMin = 1e-8;
constexpr double kBracketMax = 1e8;
constexpr double kGoldenTolerance = 1e-10;
constexpr double kAgreement = 1e-8;

struct Probe {
  double t = 0.0;
  IndexSet support;
  SupportForms forms;
};

class Minimizer {
 public:
  explicit Minimizer(const RiskModel& model) : model_(model) {}

  Probe probe(double t) {
    const GValue g = g_at(model_, t);
    for (const auto& s : g.qp.passing_subsets) candidates_.insert(s);
    return {t, g.qp.essential, support_forms(model_, g.qp.essential)};
  }

  // True when g(p.t) < g(q.t). Within one support the difference factors as
  // (q - p)(A/(pq) - B); across supports compare in extended precision.
  static bool lower(const Probe& p, const Probe& q) {
    if (p.support == q.support) {
      const long double lhs = static_cast<long double>(p.forms.a) / (static_cast<long double>(p.t) * q.t);
      const long double diff = (static_cast<long double>(q.t) - p.t) * (lhs - p.forms.b);
      return diff < 0.0L;
    }
    return extended_value(p) < extended_value(q);
  }

  double numeric_minimum() {
    Probe mid = probe(1.0);
    Probe up = probe(2.0);
    Probe down = probe(0.5);
    double lo = 0.5;
    double hi = 2.0;
    if (lower(up, mid)) {
      Probe prev = mid;
      Probe cur = up;
      while (true) {
        const double next = cur.t * 2.0;
        if (next > kBracketMax) fail(ErrorCode::BracketNotFound, "g keeps decreasing up to t = 1e8");
        Probe nxt = probe(next);
        if (!lower(nxt, cur)) {
          lo = prev.t;
          hi = nxt.t;
          break;
        }
        prev = cur;
        cur = nxt;
      }
    } else if (lower(down, mid)) {
      Probe prev = mid;
      Probe cur = down;
      while (true) {
        const double next = cur.t * 0.5;
        if (next < kBracketMin) fail(ErrorCode::BracketNotFound, "g keeps decreasing down to t = 1e-8");
        Probe nxt = probe(next);
        if (!lower(nxt, cur)) {
          lo = nxt.t;
          hi = prev.t;
          break;
        }
        prev = cur;
        cur = nxt;
      }
    }

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    Probe pc = probe(c);
    Probe pd = probe(d);
    for (int iter = 0; iter < 400 && hi - lo > kGoldenTolerance * (1.0 + lo); ++iter) {
      if (lower(pc, pd)) {
        hi = d;
        d = c;
        pd = pc;
        c = hi - inv_phi * (hi - lo);
        pc = probe(c);
      } else {
        lo = c;
        c = d;
        pc = pd;
        d = lo + inv_phi * (hi - lo);
        pd = probe(d);
      }
    }
    return 0.5 * (lo + hi);
  }

  // Supports whose stationary time reproduces them; the one with the lowest g wins.
  double fixed_point(bool& found) {
    found = false;
    double best_t = 0.0;
    long double best_g = std::numeric_limits<long double>::infinity();
    for (const auto& support : candidates_) {
      const SupportForms forms = support_forms(model_, support);
      const double t = forms.stationary_time();
      if (!(t > 0.0) || !std::isfinite(t)) continue;
      const GValue g = g_at(model_, t);
      if (g.qp.essential != support) continue;
      const long double value = extended_value({t, support, forms});
      if (value < best_g) {
        best_g = value;
        best_t = t;
        found = true;
      }
    }
    return best_t;
  }

 private:
  static long double extended_value(const Probe& p) {
    const long double t = p.t;
    return static_cast<long double>(p.forms.a) / t + 2.0L * p.forms.c + static_cast<long double>(p.forms.b) * t;
  }

  const RiskModel& model_;
  std::set<IndexSet> candidates_;
};

}  // namespace

GValue g_at(const RiskModel& model, double t) {
  require(t > 0.0 && std::isfinite(t), "g(t) needs t > 0");
  const Eigen::VectorXd b = model.alpha + model.mu * t;
  GValue out;
  out.qp = solve_pm(model.sigma, b);
  out.value = out.qp.value / t;
  return out;
}

double SupportForms::stationary_time() const { return std::sqrt(a / b); }

double SupportForms::value(double t) const { return a / t + 2.0 * c + b * t; }

SupportForms support_forms(const RiskModel& model, const IndexSet& support) {
  const PdFactor factor(take(model.sigma, support, support));
  const Eigen::VectorXd alpha = take(model.alpha, support);
  const Eigen::VectorXd mu = take(model.mu, support);
  const Eigen::VectorXd s_alpha = factor.solve(alpha);
  SupportForms f;
  f.a = alpha.dot(s_alpha);
  f.c = mu.dot(s_alpha);
  f.b = mu.dot(factor.solve(mu));
  return f;
}

GMinimum minimize_g(const RiskModel& model) {
  Minimizer search(model);
  GMinimum out;
  out.t0_numeric = search.numeric_minimum();
  bool found = false;
  out.t0_fixed_point = search.fixed_point(found);
  if (found && std::abs(out.t0_fixed_point - out.t0_numeric) <= kAgreement * (1.0 + out.t0_fixed_point)) {
    out.t0 = out.t0_fixed_point;
  } else {
    out.t0 = out.t0_numeric;
    out.degenerate = true;
  }

  out.b = model.alpha + model.mu * out.t0;
  const GValue g = g_at(model, out.t0);
  out.essential = g.qp.essential;
  out.weakly_essential = g.qp.weakly_essential;
  out.unessential = g.qp.unessential;
  out.boundary_tie = g.qp.degenerate;
  out.ghat = g.value;
  out.gtilde = 2.0 * support_forms(model, out.essential).a / (out.t0 * out.t0 * out.t0);
  out.m = static_cast<int>(out.essential.size());
  return out;
}

}  // namespace parisian
