#include "gdgap/instance.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gdgap {

namespace {

std::size_t default_dimension(std::size_t n, std::size_t T) {
  if (n + 5 >= 63 || T > (kMaxDimension >> (n + 5))) {
    throw InfeasibleParams("d = T*2^(n+5) exceeds the 2^23 dimension limit; pass d explicitly");
  }
  return T << (n + 5);
}

void require_dimension(std::size_t d) {
  if (d == 0) throw InfeasibleParams("d >= 1");
  if (d > kMaxDimension) throw InfeasibleParams("d <= 2^23");
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::HardGD: return "hard-gd";
    case Family::HardReg: return "hard-reg";
    case Family::Overfit: return "overfit";
    case Family::OptL1: return "opt-l1";
    case Family::OptL2: return "opt-l2";
    case Family::LambdaLB: return "lambda-lb";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::HardGD, Family::HardReg, Family::Overfit, Family::OptL1, Family::OptL2,
                   Family::LambdaLB}) {
    if (to_string(f) == name) return f;
  }
  throw std::invalid_argument("unknown family '" + std::string(name) + "'");
}

Vector EpsilonSchedule::materialize() const {
  Vector e(d);
  for (std::size_t k = 0; k < d; ++k) e[k] = at(k);
  return e;
}

double reg_step_sum(double lambda, std::size_t T) {
  double s = 0.0;
  for (std::size_t t = 1; t <= T; ++t) s += 2.0 / (lambda * static_cast<double>(t + 1));
  return s;
}

InstanceParams pick_gd_params(std::size_t n, std::size_t T, double eta,
                              std::optional<std::size_t> d_hint) {
  if (n < 1 || T < 1) throw InfeasibleParams("n >= 1 and T >= 1");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InfeasibleParams("eta > 0");
  InstanceParams p;
  p.family = Family::HardGD;
  p.n = n;
  p.T = T;
  p.eta = eta;
  p.d = d_hint ? *d_hint : default_dimension(n, T);
  require_dimension(p.d);

  const double Td = static_cast<double>(T);
  const double nd = static_cast<double>(n);
  const double sqrt_d = std::sqrt(static_cast<double>(p.d));
  const double lemma_bound = 1.0 / (2.0 * sqrt_d * eta * Td);
  const double horizon_bound = 2.0 * nd / Td;
  const double slack_bound =
      std::min(eta * std::sqrt(Td), 1.0 / 3.0) / (16.0 * (1.0 + 5.0 * eta * Td) * sqrt_d);
  p.gamma1 = 0.5 * std::min({lemma_bound, horizon_bound, slack_bound});
  if (!(p.gamma1 > 0.0) || !std::isfinite(p.gamma1)) {
    throw InfeasibleParams("no positive gamma1 satisfies the HardGD constraints");
  }
  p.gamma2 = 2.0 * p.gamma1 * eta * Td;
  p.gamma3 = 1.0;
  p.epsilon = {p.gamma1 * eta / (2.0 * nd), p.d};
  check_invariants(p);
  return p;
}

InstanceParams pick_reg_params(std::size_t n, std::size_t T, double lambda, bool strict,
                               std::optional<std::size_t> d_hint) {
  if (T < 3) throw InfeasibleParams("T >= 3");
  if (!(lambda > 0.0) || !(lambda < 3.0)) throw InfeasibleParams("0 < lambda < 3");
  if (n < 1) throw InfeasibleParams("n >= 1");
  InstanceParams p;
  p.family = Family::HardReg;
  p.n = n;
  p.T = T;
  p.lambda = lambda;
  p.strict = strict;
  p.d = d_hint ? *d_hint : default_dimension(n, T);
  require_dimension(p.d);

  const double Td = static_cast<double>(T);
  const double base = 4.0 * std::sqrt(2.0) * lambda * std::sqrt(Td + 1.0);
  p.gamma3 = std::min(0.5 * lambda * std::sqrt(Td - 2.0), 1.0);
  p.gamma2 = 1e-3 / std::sqrt(Td) * p.gamma3 / base;
  const double stability_bound =
      1e-3 / (std::sqrt(static_cast<double>(p.d)) * (3.0 + lambda)) * p.gamma3 / base;
  const double drift_bound = p.gamma2 / reg_step_sum(lambda, T);
  const double residue_bound = strict ? std::pow(lambda / 3.0, Td + 1.0) * p.gamma3 / (Td + 1.0)
                                      : 1e-9 * p.gamma3 / (Td + 1.0);
  p.gamma1 = std::min({stability_bound, drift_bound, residue_bound});
  if (!(p.gamma1 > 0.0) || !std::isfinite(p.gamma1)) {
    throw InfeasibleParams("gamma1 underflows for this (lambda, T); use practical mode");
  }
  // The ramp tops out at eps_max / 2, strictly below gamma1 / (6n(T+1)).
  p.epsilon = {p.gamma1 / (6.0 * static_cast<double>(n) * (Td + 1.0)), p.d};
  check_invariants(p);
  return p;
}

InstanceParams make_overfit_params(std::size_t n, std::optional<std::size_t> d) {
  if (n < 1 || n + 1 >= 63) throw InfeasibleParams("1 <= n < 62");
  InstanceParams p;
  p.family = Family::Overfit;
  p.n = n;
  p.d = d ? *d : (std::size_t{1} << (n + 1));
  require_dimension(p.d);
  return p;
}

InstanceParams make_opt1_params(std::size_t d) {
  require_dimension(d);
  InstanceParams p;
  p.family = Family::OptL1;
  p.d = d;
  p.n = 1;
  p.epsilon = {1.0 / (2.0 * std::sqrt(static_cast<double>(d))), d};
  check_invariants(p);
  return p;
}

InstanceParams make_opt2_params(double eta) {
  if (!(eta > 0.0)) throw InfeasibleParams("eta > 0");
  InstanceParams p;
  p.family = Family::OptL2;
  p.d = 1;
  p.n = 1;
  p.eta = eta;
  return p;
}

InstanceParams make_lambda_lb_params(double lambda, std::size_t d) {
  if (!(lambda > 0.0)) throw InfeasibleParams("lambda > 0");
  require_dimension(d);
  InstanceParams p;
  p.family = Family::LambdaLB;
  p.d = d;
  p.n = 1;
  p.lambda = lambda;
  return p;
}

void check_invariants(const InstanceParams& p) {
  require_dimension(p.d);
  const auto& eps = p.epsilon;
  const auto require_schedule = [&] {
    if (eps.d != p.d) throw InfeasibleParams("epsilon schedule length equals d");
    if (!(eps.eps_max > 0.0)) throw InfeasibleParams("0 < eps_1 < ... < eps_d (eps_max > 0)");
    // Adjacent ramp entries must stay distinct in floating point.
    if (p.d > 1 && !(eps.at(p.d - 1) > eps.at(p.d - 2))) {
      throw InfeasibleParams("eps strictly increasing in floating point");
    }
  };
  const double Td = static_cast<double>(p.T);
  const double nd = static_cast<double>(p.n);
  const double sqrt_d = std::sqrt(static_cast<double>(p.d));

  switch (p.family) {
    case Family::HardGD: {
      if (p.n < 1 || p.T < 1) throw InfeasibleParams("n >= 1 and T >= 1");
      if (!(p.eta > 0.0)) throw InfeasibleParams("eta > 0");
      if (!(p.gamma1 > 0.0)) throw InfeasibleParams("gamma1 > 0");
      require_schedule();
      const double g2 = 2.0 * p.gamma1 * p.eta * Td;
      if (!(std::abs(p.gamma2 - g2) <= 1e-12 * g2)) {
        throw InfeasibleParams("gamma2 = 2 gamma1 eta T (gamma2 = " + fmt(p.gamma2) +
                               ", expected " + fmt(g2) + ")");
      }
      if (!(eps.last() < p.gamma1 * p.eta / (2.0 * nd))) {
        throw InfeasibleParams("eps_d < gamma1 eta / (2n)");
      }
      if (!(p.gamma1 * Td / (2.0 * nd) < 1.0)) throw InfeasibleParams("gamma1 T / (2n) < 1");
      if (!(p.gamma1 <= 1.0 / (2.0 * sqrt_d * p.eta * Td))) {
        throw InfeasibleParams("gamma1 <= 1 / (2 sqrt(d) eta T)");
      }
      if (p.gamma3 != 1.0) throw InfeasibleParams("gamma3 = 1");
      return;
    }
    case Family::HardReg: {
      if (p.T < 3) throw InfeasibleParams("T >= 3");
      if (!(p.lambda > 0.0 && p.lambda < 3.0)) throw InfeasibleParams("0 < lambda < 3");
      if (!(p.gamma1 > 0.0)) throw InfeasibleParams("gamma1 > 0");
      require_schedule();
      const double g3 = std::min(0.5 * p.lambda * std::sqrt(Td - 2.0), 1.0);
      if (!(std::abs(p.gamma3 - g3) <= 1e-12 * g3)) {
        throw InfeasibleParams("gamma3 = min{(lambda/2) sqrt(T-2), 1}");
      }
      const double base = 4.0 * std::sqrt(2.0) * p.lambda * std::sqrt(Td + 1.0);
      if (!(p.gamma2 > 0.0 && p.gamma2 <= (1e-3 / std::sqrt(Td)) * p.gamma3 / base * (1 + 1e-12))) {
        throw InfeasibleParams("0 < gamma2 <= 1e-3/sqrt(T) * gamma3 / (4 sqrt(2) lambda sqrt(T+1))");
      }
      const double tol = 1.0 + 1e-12;
      if (!(p.gamma1 <= 1e-3 / (sqrt_d * (3.0 + p.lambda)) * p.gamma3 / base * tol)) {
        throw InfeasibleParams("gamma1 <= 1e-3/(sqrt(d)(3+lambda)) * gamma3 / (4 sqrt(2) lambda sqrt(T+1))");
      }
      if (!(p.gamma1 <= p.gamma2 / reg_step_sum(p.lambda, p.T) * tol)) {
        throw InfeasibleParams("gamma1 <= gamma2 / sum_t eta_t");
      }
      if (p.strict && !(p.gamma1 <= std::pow(p.lambda / 3.0, Td + 1.0) * p.gamma3 / (Td + 1.0) * tol)) {
        throw InfeasibleParams("gamma1 <= (lambda/3)^(T+1) gamma3 / (T+1)");
      }
      if (!(eps.last() < p.gamma1 / (6.0 * nd * (Td + 1.0)))) {
        throw InfeasibleParams("eps_d < gamma1 / (6n(T+1))");
      }
      return;
    }
    case Family::Overfit:
      if (p.n < 1) throw InfeasibleParams("n >= 1");
      return;
    case Family::OptL1:
      require_schedule();
      if (!(eps.last() < 1.0 / (2.0 * sqrt_d))) throw InfeasibleParams("eps_d < 1/(2 sqrt(d))");
      return;
    case Family::OptL2:
      if (!(p.eta > 0.0)) throw InfeasibleParams("eta > 0");
      if (p.d != 1) throw InfeasibleParams("opt-l2 is scalar (d = 1)");
      return;
    case Family::LambdaLB:
      if (!(p.lambda > 0.0)) throw InfeasibleParams("lambda > 0");
      return;
  }
}

double lipschitz_constant(Family f) {
  switch (f) {
    case Family::HardGD:
    case Family::HardReg: return 3.0;
    case Family::Overfit:
    case Family::OptL2: return 2.0;
    case Family::OptL1: return 1.0;
    case Family::LambdaLB: return 0.5;
  }
  return 3.0;
}

nlohmann::json to_json(const InstanceParams& p) {
  nlohmann::json j;
  j["family"] = std::string(to_string(p.family));
  j["d"] = p.d;
  j["n"] = p.n;
  j["gamma1"] = p.gamma1;
  j["gamma2"] = p.gamma2;
  j["gamma3"] = p.gamma3;
  j["lambda"] = p.lambda;
  j["eta"] = p.eta;
  j["T"] = p.T;
  j["strict"] = p.strict;
  j["epsilon"] = {{"kind", "linear-ramp"},
                  {"eps_max", p.epsilon.eps_max},
                  {"d", p.epsilon.d},
                  {"formula", "eps_i = eps_max * i / (2d), i = 1..d"}};
  return j;
}

InstanceParams params_from_json(const nlohmann::json& j) {
  InstanceParams p;
  p.family = parse_family(j.at("family").get<std::string>());
  p.d = j.at("d").get<std::size_t>();
  p.n = j.at("n").get<std::size_t>();
  p.gamma1 = j.at("gamma1").get<double>();
  p.gamma2 = j.at("gamma2").get<double>();
  p.gamma3 = j.at("gamma3").get<double>();
  p.lambda = j.at("lambda").get<double>();
  p.eta = j.at("eta").get<double>();
  p.T = j.at("T").get<std::size_t>();
  p.strict = j.value("strict", false);
  if (j.contains("epsilon")) {
    const auto& e = j.at("epsilon");
    if (e.value("kind", std::string("linear-ramp")) != "linear-ramp") {
      throw std::invalid_argument("unsupported epsilon schedule kind");
    }
    p.epsilon = {e.at("eps_max").get<double>(), e.at("d").get<std::size_t>()};
  }
  return p;
}

Alpha Alpha::from_bits(const std::vector<int>& bits) {
  Alpha a(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) a.set(i, bits[i] != 0);
  return a;
}

std::size_t Alpha::popcount() const noexcept {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

Alpha draw_alpha(RngStream& rng, std::size_t d) {
  if (d == 0) throw std::invalid_argument("draw_alpha: d >= 1");
  Alpha a(d);
  auto words = a.words();
  for (auto& w : words) w = rng.next_u64();
  if (const std::size_t tail = d & 63; tail != 0) words.back() &= (std::uint64_t{1} << tail) - 1;
  return a;
}

Vector perturbation(const Alpha& alpha, std::size_t n) {
  const double neg = -1.0 / (2.0 * static_cast<double>(n));
  Vector v(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) v[i] = alpha[i] ? 1.0 : neg;
  return v;
}

Sample::Sample(std::vector<Alpha> points) : points_(std::move(points)) {
  if (points_.empty()) throw std::invalid_argument("sample must be nonempty");
  d_ = points_.front().size();
  counts_.assign(d_, 0);
  for (const auto& a : points_) {
    if (a.size() != d_) throw std::invalid_argument("sample points must share dimension");
    const auto words = a.words();
    for (std::size_t wi = 0; wi < words.size(); ++wi) {
      std::uint64_t w = words[wi];
      while (w != 0) {
        const int b = std::countr_zero(w);
        ++counts_[wi * 64 + static_cast<std::size_t>(b)];
        w &= w - 1;
      }
    }
  }
}

Sample Sample::draw(RngStream& rng, std::size_t n, std::size_t d) {
  std::vector<Alpha> pts;
  pts.reserve(n);
  for (std::size_t j = 0; j < n; ++j) pts.push_back(draw_alpha(rng, d));
  return Sample(std::move(pts));
}

Vector mean_perturbation(const Sample& S) {
  const double n = static_cast<double>(S.size());
  const double neg = -1.0 / (2.0 * n);
  Vector v(S.dim());
  for (std::size_t i = 0; i < S.dim(); ++i) {
    const double c = static_cast<double>(S.count(i));
    v[i] = (c * 1.0 + (n - c) * neg) / n;
  }
  return v;
}

}  // namespace gdgap
