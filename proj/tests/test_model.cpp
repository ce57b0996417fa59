#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "powershare/model.hpp"

using namespace powershare;

namespace {

ModelParams<double> params(double lambda, double a1, double gamma = 1.0) {
  ModelParams<double> p;
  p.lambda = lambda;
  p.a1 = a1;
  p.gamma = gamma;
  p.validate();
  return p;
}

// Oracle: argmax of f on a uniform interior grid.
double grid_argmax_f(const ModelParams<double>& p, int n) {
  double best = -1e300, best_d = 0.0;
  for (int i = 1; i < n; ++i) {
    const double d = static_cast<double>(i) / n;
    const double v = f_value(d, p);
    if (v > best) {
      best = v;
      best_d = d;
    }
  }
  return best_d;
}

// Oracle: bisection root of f on (lo, hi) with f(lo) > 0 > f(hi).
double bisect_root_f(const ModelParams<double>& p, double lo, double hi) {
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f_value(mid, p) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Oracle: second central finite difference of h in delta.
double h_curvature_fd(const ModelParams<double>& p, double delta, double e) {
  return (h_value(delta + e, p) - 2.0 * h_value(delta, p) +
          h_value(delta - e, p)) /
         (e * e);
}

}  // namespace

TEST_CASE("assumption") {
  CHECK(assumption_holds(params(0.5, 0.1)));
  CHECK_FALSE(assumption_holds(params(0.5, 1.0)));  // 1 > 1 fails strictly
  CHECK(assumption_holds(params(0.9, 8.0)));        // 9 > 8
}

TEST_CASE("control shares") {
  auto c = control_shares<double>({0.5}, params(0.5, 0.1, 1.0));
  CHECK(c.s2 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.q2 == doctest::Approx(0.5).epsilon(1e-15));  // gamma=1 gives q=s

  c = control_shares<double>({0.3}, params(0.5, 0.1, 0.0));
  CHECK(c.q2 == 0.0);
  CHECK(c.q1 == 1.0);

  c = control_shares<double>({0.4}, params(0.5, 0.1, 0.5));
  CHECK(c.q2 == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(c.q1 == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("contest probabilities") {
  CHECK(contest_probabilities<double>({0.5}, params(0.5, 0.0)).p1 ==
        doctest::Approx(0.5));
  CHECK(contest_probabilities<double>({0.5}, params(0.5, 0.1)).p1 ==
        doctest::Approx(0.6 / 1.1).epsilon(1e-12));
  CHECK(contest_probabilities<double>({1e-9}, params(0.5, 0.1)).p1 ==
        doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("payoffs") {
  auto p = payoffs<double>({0.3}, params(0.5, 0.1, 1.0));
  CHECK(p.share == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.limit ==
        doctest::Approx((0.8 / 1.1) * (0.85 / 0.7)).epsilon(1e-12));

  p = payoffs<double>({0.3}, params(0.5, 0.1, 0.5));
  CHECK(p.share == doctest::Approx((1.0 - 0.15) / 0.7).epsilon(1e-12));

  p = payoffs<double>({1e-10}, params(0.5, 0.1, 1.0));
  CHECK(p.share == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(p.limit ==
        doctest::Approx(contest_probabilities<double>({1e-10}, params(0.5, 0.1)).p1)
            .epsilon(1e-9));

  CHECK_THROWS_AS((payoffs<double>({1.0 - 1e-17}, params(0.5, 0.1))),
                  std::domain_error);
}

TEST_CASE("f and h values") {
  const auto p = params(0.5, 0.1);
  CHECK(f_value(0.0, p) == 0.0);
  CHECK(f_value(0.3, p) == doctest::Approx(0.116883116883).epsilon(1e-9));
  CHECK(h_value(0.3, params(0.5, 0.1, 1.0)) ==
        doctest::Approx(f_value(0.3, p)).epsilon(1e-13));
  CHECK_THROWS_AS(f_value(-0.1, p), std::domain_error);
  CHECK_THROWS_AS(f_value(1.0, p), std::domain_error);
  CHECK_THROWS_AS(h_value(1.2, p), std::domain_error);
}

TEST_CASE("decide") {
  CHECK(decide(0.3, params(0.5, 0.1, 1.0)).grants_access);
  CHECK_FALSE(decide(0.95, params(0.5, 0.1, 1.0)).grants_access);
  const auto d = decide(0.5, params(0.5, 0.1, 0.5));
  CHECK(d.h == doctest::Approx(0.5 + 1.0 - (0.6 / 1.1) * (0.75 / 0.5))
                   .epsilon(1e-12));
  CHECK(d.grants_access);
}

TEST_CASE("thresholds against oracles") {
  const auto p = params(0.5, 0.1);
  const auto t = thresholds(p);

  // delta*: closed form vs grid argmax (agreement within one grid step)
  const int n = 1000000;
  CHECK(std::fabs(t.delta_star - grid_argmax_f(p, n)) <= 2.0 / n);
  CHECK(t.delta_star == doctest::Approx(0.6837722).epsilon(1e-7));

  // delta-bar: closed form vs bisection on (delta*, 1)
  CHECK(t.delta_bar == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(std::fabs(t.delta_bar - bisect_root_f(p, t.delta_star, 1.0 - 1e-9)) <
        1e-10);

  // gamma*: curvature switch located by the sign of the finite-difference
  // curvature of h, bisected in gamma
  double lo = p.lambda, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    ModelParams<double> q = p;
    q.gamma = 0.5 * (lo + hi);
    (h_curvature_fd(q, 0.5, 1e-4) > 0.0 ? lo : hi) = q.gamma;
  }
  CHECK(std::fabs(t.gamma_star - 0.5 * (lo + hi)) < 1e-6);
  CHECK(t.gamma_star == doctest::Approx(1.05 / 1.1).epsilon(1e-12));

  CHECK_THROWS_AS(thresholds(params(0.5, 1.0)), std::domain_error);
  CHECK_THROWS_AS(thresholds(params(0.5, 0.0)), std::domain_error);
  CHECK(gamma_star(params(0.5, 1.0)) == doctest::Approx(1.5 / 2.0));
}

TEST_CASE("derivatives") {
  const auto p = params(0.5, 0.1);
  for (int i = 1; i < 100; ++i) {
    const double d = i / 100.0;
    CHECK(f_derivatives(d, p).second < 0.0);
  }
  const double dstar = thresholds(p).delta_star;
  CHECK(std::fabs(f_derivatives(dstar, p).first) < 1e-9);

  // closed form h'(0) = 1 - gamma + lambda - a1/(1+a1)
  const auto hd = h_derivatives(0.0, params(0.5, 0.1, 0.5));
  CHECK(hd.first == doctest::Approx(1.0 - 0.5 + 0.5 - 0.1 / 1.1).epsilon(1e-12));

  CHECK_THROWS_AS(f_derivatives(1.0, p), std::domain_error);
}

TEST_CASE("derivatives agree with central finite differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ul(0.1, 0.9);
  for (int rep = 0; rep < 50; ++rep) {
    const double lambda = ul(rng);
    const double a1 = std::uniform_real_distribution<double>(
        1e-3, 0.95 * lambda / (1.0 - lambda))(rng);
    const double gamma = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto p = params(lambda, a1, gamma);
    const double e = 1e-5;
    for (double d : {0.05, 0.2, 0.4, 0.6, 0.8, 0.95}) {
      const auto fd = f_derivatives(d, p);
      const double f1 = (f_value(d + e, p) - f_value(d - e, p)) / (2 * e);
      const double f2 =
          (f_value(d + e, p) - 2 * f_value(d, p) + f_value(d - e, p)) / (e * e);
      CHECK(std::fabs(f1 - fd.first) <= 1e-5 * std::max(1.0, std::fabs(fd.first)));
      CHECK(std::fabs(f2 - fd.second) <=
            1e-5 * std::max(1.0, std::fabs(fd.second)));
      const auto hd = h_derivatives(d, p);
      const double h1 = (h_value(d + e, p) - h_value(d - e, p)) / (2 * e);
      const double h2 =
          (h_value(d + e, p) - 2 * h_value(d, p) + h_value(d - e, p)) / (e * e);
      CHECK(std::fabs(h1 - hd.first) <= 1e-5 * std::max(1.0, std::fabs(hd.first)));
      CHECK(std::fabs(h2 - hd.second) <=
            1e-5 * std::max(1.0, std::fabs(hd.second)));
    }
  }
}

TEST_CASE("reduction and payoff identity") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ud(0.001, 0.999);
  std::uniform_real_distribution<double> ul(0.05, 0.95);
  std::uniform_real_distribution<double> ua(0.0, 2.0);
  std::uniform_real_distribution<double> ug(0.0, 1.0);
  for (int rep = 0; rep < 2000; ++rep) {
    const auto p = params(ul(rng), ua(rng), ug(rng));
    const double d = ud(rng);

    ModelParams<double> p1 = p;
    p1.gamma = 1.0;
    CHECK(std::fabs(h_value(d, p1) - f_value(d, p1)) < 1e-12);

    const auto pay = payoffs<double>({d}, p);
    CHECK(std::fabs(h_value(d, p) - (pay.share - pay.limit)) < 1e-12);

    const auto pr = contest_probabilities<double>({d}, p);
    const auto cs = control_shares<double>({d}, p);
    CHECK(std::fabs(pr.p1 + pr.p2 - 1.0) < 1e-12);
    CHECK(std::fabs(cs.s1 + cs.s2 - 1.0) < 1e-12);
    CHECK(std::fabs(cs.q1 + cs.q2 - 1.0) < 1e-12);
  }
}

TEST_CASE("root structure under the assumption") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ul(0.1, 0.9);
  for (int rep = 0; rep < 500; ++rep) {
    const double lambda = ul(rng);
    const double a1 = std::uniform_real_distribution<double>(
        1e-4, 0.999 * lambda / (1.0 - lambda))(rng);
    const auto p = params(lambda, a1);
    const auto t = thresholds(p);
    CHECK(0.0 < t.delta_star);
    CHECK(t.delta_star < t.delta_bar);
    CHECK(t.delta_bar < 1.0);
    CHECK(f_value(0.0, p) == 0.0);
    CHECK(std::fabs(f_value(t.delta_bar, p)) < 1e-10);
    for (int i = 1; i <= 40; ++i) {
      const double inside = t.delta_bar * i / 41.0;
      if (inside > 1e-9) CHECK(f_value(inside, p) > 0.0);
      const double outside = t.delta_bar + (1.0 - t.delta_bar) * i / 41.0;
      if (outside < 1.0 - 1e-9 && outside > t.delta_bar + 1e-9)
        CHECK(f_value(outside, p) < 0.0);
    }
  }
}

TEST_CASE("curvature switch in gamma") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ul(0.1, 0.9);
  for (int rep = 0; rep < 300; ++rep) {
    const double lambda = ul(rng);
    const double a1 = std::uniform_real_distribution<double>(
        1e-3, 0.95 * lambda / (1.0 - lambda))(rng);
    const double gs = gamma_star(params(lambda, a1));
    CHECK(gs > lambda);
    CHECK(gs <= 1.0);

    const double below = std::uniform_real_distribution<double>(0.0, gs)(rng);
    const auto p_lo = params(lambda, a1, below);
    for (int i = 1; i < 50; ++i) {
      const double d = i / 50.0;
      const auto hd = h_derivatives(d, p_lo);
      CHECK(hd.second > 0.0);
      CHECK(hd.first > 0.0);
      CHECK(h_value(d, p_lo) > 0.0);
      CHECK(decide(d, p_lo).grants_access);
    }
    if (gs < 1.0) {
      const double above =
          std::uniform_real_distribution<double>(gs + 1e-9, 1.0)(rng);
      const auto p_hi = params(lambda, a1, above);
      for (int i = 1; i < 50; ++i)
        CHECK(h_derivatives(i / 50.0, p_hi).second < 0.0);
    }
  }
}

TEST_CASE("decision boundary agrees with delta_bar: 10000 random draws") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> ul(0.05, 0.95);
  int worst_failures = 0;
  for (int rep = 0; rep < 10000; ++rep) {
    const double lambda = ul(rng);
    const double a1 = std::uniform_real_distribution<double>(
        1e-5, 0.999 * lambda / (1.0 - lambda))(rng);
    const auto p = params(lambda, a1, 1.0);
    const auto t = thresholds(p);
    double lo = t.delta_star;          // grants here
    double hi = 0.5 * (t.delta_bar + 1.0);  // limits here
    for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
      const double mid = 0.5 * (lo + hi);
      (decide(mid, p).grants_access ? lo : hi) = mid;
    }
    if (std::fabs(0.5 * (lo + hi) - t.delta_bar) > 1e-8) ++worst_failures;
  }
  CHECK(worst_failures == 0);
}

TEST_CASE("sweep") {
  const auto p = params(0.5, 0.1, 1.0);
  Eigen::ArrayXd grid(1001);
  for (int i = 0; i < 1001; ++i) grid[i] = (i + 1.0) / 1002.0;
  const auto r = sweep(p, grid);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.9 - 1e-9) CHECK(r.f[i] > 0.0);
    if (grid[i] > 0.9 + 1e-9) CHECK(r.f[i] < 0.0);
    CHECK(r.grants_access[i] == (r.h[i] > 0.0));
  }

  // gamma below gamma*: h positive and increasing along the whole grid
  const auto r2 = sweep(params(0.5, 0.1, 0.5), grid);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    CHECK(r2.h[i] > 0.0);
    if (i > 0) CHECK(r2.h[i] > r2.h[i - 1]);
  }

  Eigen::ArrayXd single(1);
  single[0] = 0.5;
  CHECK(sweep(p, single).delta.size() == 1);
  CHECK_THROWS_AS(sweep(p, Eigen::ArrayXd()), std::invalid_argument);

  Eigen::ArrayXd gammas = Eigen::ArrayXd::LinSpaced(11, 0.0, 1.0);
  const auto rg = sweep_gamma(p, 0.5, gammas);
  CHECK(rg.h[10] == doctest::Approx(f_value(0.5, p)).epsilon(1e-12));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(params(0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(params(1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(params(0.5, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(params(0.5, 0.1, 1.5), std::invalid_argument);
  ModelParams<double> p;
  p.lambda = 0.5;
  p.a1 = 0.1;
  p.a2 = 0.2;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK_THROWS_AS((GroupSplit<double>{0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((GroupSplit<double>{1.0}.validate()), std::invalid_argument);
}
