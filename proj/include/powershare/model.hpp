#pragma once

// Two-period limit-or-share contest model.
//
// Group 1 holds power in period 1 and chooses whether to let group 2
// (relative size delta) into the period-2 government. Sharing pays each
// group-1 member q1/(1-delta); limiting triggers a contest that destroys a
// lambda*delta fraction of the budget and pays p1*(1-lambda*delta)/(1-delta)
// in expectation. The net gain from sharing is h(delta); with fully
// proportional period-2 institutions (gamma = 1) it reduces to f(delta).

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace powershare {

template <typename Scalar = double>
struct ModelParams {
  Scalar lambda{};    // destruction sensitivity, in (0,1)
  Scalar a1{};        // group-1 coordination advantage (de facto power), >= 0
  Scalar a2{0};       // group-2 coordination term, normalized to 0
  Scalar gamma{1};    // openness of period-2 institutions, in [0,1]

  void validate() const {
    if (!(lambda > Scalar(0) && lambda < Scalar(1)))
      throw std::invalid_argument("ModelParams: lambda must be in (0,1)");
    if (!(a1 >= Scalar(0)))
      throw std::invalid_argument("ModelParams: a1 must be >= 0");
    if (a2 != Scalar(0))
      throw std::invalid_argument("ModelParams: a2 is normalized to 0");
    if (!(gamma >= Scalar(0) && gamma <= Scalar(1)))
      throw std::invalid_argument("ModelParams: gamma must be in [0,1]");
  }
};

template <typename Scalar = double>
struct GroupSplit {
  Scalar delta{};     // relative size of group 2, in (0,1)

  Scalar group1_size() const { return Scalar(1) - delta; }

  void validate() const {
    if (!(delta > Scalar(0) && delta < Scalar(1)))
      throw std::invalid_argument("GroupSplit: delta must be in (0,1)");
  }
};

// Conflict is not a dominant strategy for group 1: lambda/(1-lambda) > a1.
template <typename Scalar>
bool assumption_holds(const ModelParams<Scalar>& p) {
  return p.lambda / (Scalar(1) - p.lambda) > p.a1;
}

template <typename Scalar>
struct ControlShares {
  Scalar s1, s2;      // proportional control under sharing
  Scalar q1, q2;      // institution-adjusted control, q2 = gamma*s2
};

template <typename Scalar>
ControlShares<Scalar> control_shares(const GroupSplit<Scalar>& split,
                                     const ModelParams<Scalar>& p) {
  ControlShares<Scalar> c;
  c.s2 = split.delta;
  c.s1 = Scalar(1) - split.delta;
  c.q2 = p.gamma * split.delta;
  c.q1 = Scalar(1) - p.gamma * split.delta;
  return c;
}

template <typename Scalar>
struct ContestProbabilities {
  Scalar p1, p2;
};

template <typename Scalar>
ContestProbabilities<Scalar> contest_probabilities(
    const GroupSplit<Scalar>& split, const ModelParams<Scalar>& p) {
  const Scalar total = Scalar(1) + p.a1 + p.a2;
  ContestProbabilities<Scalar> c;
  c.p1 = (Scalar(1) - split.delta + p.a1) / total;
  c.p2 = (split.delta + p.a2) / total;
  return c;
}

template <typename Scalar>
struct Payoffs {
  Scalar share;       // group-1 per-capita payoff when access is granted
  Scalar limit;       // expected per-capita payoff under limiting
};

template <typename Scalar>
Payoffs<Scalar> payoffs(const GroupSplit<Scalar>& split,
                        const ModelParams<Scalar>& p) {
  const Scalar one_minus = Scalar(1) - split.delta;
  if (!(one_minus > std::numeric_limits<Scalar>::epsilon()))
    throw std::domain_error("payoffs: degenerate split, delta too close to 1");
  const Scalar p1 = contest_probabilities(split, p).p1;
  Payoffs<Scalar> out;
  out.share = (Scalar(1) - p.gamma * split.delta) / one_minus;
  out.limit = p1 * (Scalar(1) - p.lambda * split.delta) / one_minus;
  return out;
}

namespace detail {
template <typename Scalar>
void check_unit_interval(Scalar delta, const char* fn) {
  if (!(delta >= Scalar(0) && delta < Scalar(1)))
    throw std::domain_error(std::string(fn) + ": delta outside [0,1)");
}
}  // namespace detail

// Net gain from sharing under proportional institutions:
//   f(d) = 1 - (1-d+a1)/(1+a1) * (1-lambda*d)/(1-d).
// f(0) = 0 is returned exactly; positive f means sharing beats limiting.
template <typename Scalar>
Scalar f_value(Scalar delta, const ModelParams<Scalar>& p) {
  detail::check_unit_interval(delta, "f_value");
  if (delta == Scalar(0)) return Scalar(0);
  return Scalar(1) - (Scalar(1) - delta + p.a1) / (Scalar(1) + p.a1) *
                         (Scalar(1) - p.lambda * delta) / (Scalar(1) - delta);
}

// Net gain from sharing when period-2 institutions keep a bias toward
// group 1: h(d) = gamma + (1-gamma)/(1-d) - (1-d+a1)/(1+a1)*(1-lambda*d)/(1-d).
// Reduces to f at gamma = 1; h(0) = 0 exactly.
template <typename Scalar>
Scalar h_value(Scalar delta, const ModelParams<Scalar>& p) {
  detail::check_unit_interval(delta, "h_value");
  if (delta == Scalar(0)) return Scalar(0);
  const Scalar one_minus = Scalar(1) - delta;
  return p.gamma + (Scalar(1) - p.gamma) / one_minus -
         (Scalar(1) - delta + p.a1) / (Scalar(1) + p.a1) *
             (Scalar(1) - p.lambda * delta) / one_minus;
}

template <typename Scalar>
struct Derivatives {
  Scalar first, second;
};

template <typename Scalar>
Derivatives<Scalar> f_derivatives(Scalar delta, const ModelParams<Scalar>& p) {
  // finite at delta = 0; the singularity sits at delta = 1
  detail::check_unit_interval(delta, "f_derivatives");
  const Scalar one_minus = Scalar(1) - delta;
  const Scalar quad = p.a1 - p.lambda * (Scalar(1) + p.a1) +
                      Scalar(2) * p.lambda * delta - p.lambda * delta * delta;
  Derivatives<Scalar> d;
  d.first = -quad / ((Scalar(1) + p.a1) * one_minus * one_minus);
  d.second = -Scalar(2) * p.a1 * (Scalar(1) - p.lambda) /
             ((Scalar(1) + p.a1) * one_minus * one_minus * one_minus);
  return d;
}

template <typename Scalar>
Derivatives<Scalar> h_derivatives(Scalar delta, const ModelParams<Scalar>& p) {
  detail::check_unit_interval(delta, "h_derivatives");
  const Scalar one_minus = Scalar(1) - delta;
  const Scalar quad = p.a1 - p.lambda * (Scalar(1) + p.a1) +
                      Scalar(2) * p.lambda * delta - p.lambda * delta * delta;
  Derivatives<Scalar> d;
  d.first = ((Scalar(1) - p.gamma) - quad / (Scalar(1) + p.a1)) /
            (one_minus * one_minus);
  d.second = Scalar(2) *
             ((Scalar(1) - p.gamma) -
              p.a1 * (Scalar(1) - p.lambda) / (Scalar(1) + p.a1)) /
             (one_minus * one_minus * one_minus);
  return d;
}

template <typename Scalar>
struct DecisionOutcome {
  Scalar s1, s2;
  Scalar q1, q2;
  Scalar p1, p2;
  Scalar payoff_share;
  Scalar payoff_limit;
  Scalar f;             // net sharing gain at gamma = 1
  Scalar h;             // net sharing gain at the params' gamma
  bool grants_access;   // h > 0; exact indifference resolves to limiting
};

template <typename Scalar>
DecisionOutcome<Scalar> decide(Scalar delta, const ModelParams<Scalar>& p) {
  GroupSplit<Scalar> split{delta};
  split.validate();
  const auto shares = control_shares(split, p);
  const auto probs = contest_probabilities(split, p);
  const auto pay = payoffs(split, p);
  DecisionOutcome<Scalar> out;
  out.s1 = shares.s1;
  out.s2 = shares.s2;
  out.q1 = shares.q1;
  out.q2 = shares.q2;
  out.p1 = probs.p1;
  out.p2 = probs.p2;
  out.payoff_share = pay.share;
  out.payoff_limit = pay.limit;
  out.f = f_value(delta, p);
  out.h = h_value(delta, p);
  out.grants_access = out.h > Scalar(0);
  return out;
}

template <typename Scalar>
struct Thresholds {
  Scalar delta_star;    // interior maximizer of f
  Scalar delta_bar;     // upper root of f; decision boundary at gamma = 1
  Scalar gamma_star;    // curvature switch of h: convex below, concave above
};

// Always defined: gamma* = (1 + lambda*a1)/(1 + a1), in (lambda, 1].
template <typename Scalar>
Scalar gamma_star(const ModelParams<Scalar>& p) {
  return (Scalar(1) + p.lambda * p.a1) / (Scalar(1) + p.a1);
}

// Interior thresholds exist only under lambda/(1-lambda) > a1 with a1 > 0;
// otherwise f has no interior positive region and this throws.
template <typename Scalar>
Thresholds<Scalar> thresholds(const ModelParams<Scalar>& p) {
  if (!assumption_holds(p))
    throw std::domain_error(
        "thresholds: assumption lambda/(1-lambda) > a1 violated");
  if (!(p.a1 > Scalar(0)))
    throw std::domain_error("thresholds: interior thresholds require a1 > 0");
  Thresholds<Scalar> t;
  using std::sqrt;
  t.delta_star =
      Scalar(1) - sqrt(p.a1 * p.lambda * (Scalar(1) - p.lambda)) / p.lambda;
  t.delta_bar = Scalar(1) - p.a1 * (Scalar(1) - p.lambda) / p.lambda;
  t.gamma_star = gamma_star(p);
  return t;
}

struct SweepResult {
  Eigen::ArrayXd delta;
  Eigen::ArrayXd f;
  Eigen::ArrayXd h;
  Eigen::ArrayXd p1;
  Eigen::ArrayXd payoff_share;
  Eigen::ArrayXd payoff_limit;
  Eigen::Array<bool, Eigen::Dynamic, 1> grants_access;
};

// Evaluate the decision along a delta grid (strictly inside (0,1)).
// Output rows follow grid order regardless of how evaluation is scheduled.
inline SweepResult sweep(const ModelParams<double>& p,
                         const Eigen::ArrayXd& delta_grid) {
  if (delta_grid.size() == 0) throw std::invalid_argument("sweep: empty grid");
  const Eigen::Index n = delta_grid.size();
  SweepResult r;
  r.delta = delta_grid;
  r.f.resize(n);
  r.h.resize(n);
  r.p1.resize(n);
  r.payoff_share.resize(n);
  r.payoff_limit.resize(n);
  r.grants_access.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto d = decide(delta_grid[i], p);
    r.f[i] = d.f;
    r.h[i] = d.h;
    r.p1[i] = d.p1;
    r.payoff_share[i] = d.payoff_share;
    r.payoff_limit[i] = d.payoff_limit;
    r.grants_access[i] = d.grants_access;
  }
  return r;
}

// Fixed delta, varying gamma: traces how the sharing gain responds to
// institutional openness.
inline SweepResult sweep_gamma(ModelParams<double> p, double delta,
                               const Eigen::ArrayXd& gamma_grid) {
  if (gamma_grid.size() == 0)
    throw std::invalid_argument("sweep_gamma: empty grid");
  const Eigen::Index n = gamma_grid.size();
  SweepResult r;
  r.delta = Eigen::ArrayXd::Constant(n, delta);
  r.f.resize(n);
  r.h.resize(n);
  r.p1.resize(n);
  r.payoff_share.resize(n);
  r.payoff_limit.resize(n);
  r.grants_access.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    p.gamma = gamma_grid[i];
    const auto d = decide(delta, p);
    r.f[i] = d.f;
    r.h[i] = d.h;
    r.p1[i] = d.p1;
    r.payoff_share[i] = d.payoff_share;
    r.payoff_limit[i] = d.payoff_limit;
    r.grants_access[i] = d.grants_access;
  }
  return r;
}

using ModelParamsd = ModelParams<double>;
using GroupSplitd = GroupSplit<double>;

}  // namespace powershare
