#include "bdmrf/family.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <vector>

#include "bdmrf/errors.hpp"

namespace bdmrf {

namespace {

std::atomic<std::uint64_t> g_clamp_events{0};

double clamp_eta(double eta) {
  if (eta > kEtaClamp || eta < -kEtaClamp) {
    g_clamp_events.fetch_add(1, std::memory_order_relaxed);
    return std::clamp(eta, -kEtaClamp, kEtaClamp);
  }
  return eta;
}

bool is_count(double x) {
  return std::isfinite(x) && x >= 0.0 && std::floor(x) == x;
}

// lgamma dominates the truncated-Poisson hot path; cache small arguments.
double log_factorial(double x) {
  static const auto table = [] {
    std::array<double, 256> t{};
    for (std::size_t k = 0; k < t.size(); ++k)
      t[k] = std::lgamma(static_cast<double>(k) + 1.0);
    return t;
  }();
  if (x >= 0.0 && x < 256.0 && std::floor(x) == x)
    return table[static_cast<std::size_t>(x)];
  return std::lgamma(x + 1.0);
}

// Truncated Poisson weights w_k proportional to exp(eta*k - log k!), k = 0..r.
// Returns log normalizer; optionally fills normalized pmf.
double tpoisson_logz(double eta, int r, std::vector<double>* pmf = nullptr) {
  double m = -std::numeric_limits<double>::infinity();
  std::vector<double> logw(static_cast<std::size_t>(r) + 1);
  for (int k = 0; k <= r; ++k) {
    logw[static_cast<std::size_t>(k)] = eta * k - log_factorial(k);
    m = std::max(m, logw[static_cast<std::size_t>(k)]);
  }
  double z = 0.0;
  for (double lw : logw) z += std::exp(lw - m);
  if (pmf) {
    pmf->resize(logw.size());
    for (std::size_t k = 0; k < logw.size(); ++k)
      (*pmf)[k] = std::exp(logw[k] - m) / z;
  }
  return m + std::log(z);
}

// Poisson draw by cdf inversion; expected cost O(rate).
long poisson_inversion(double rate, RandomStream& rng) {
  double u = rng.uniform();
  double p = std::exp(-rate);
  double cum = p;
  long k = 0;
  while (u > cum && k < 10000000) {
    ++k;
    p *= rate / static_cast<double>(k);
    cum += p;
  }
  return k;
}

// Hormann's transformed rejection with squeeze (PTRS); exact for rate >= 10,
// no normal approximation. Used above the inversion cutoff.
long poisson_ptrs(double rate, RandomStream& rng) {
  const double slam = std::sqrt(rate);
  const double loglam = std::log(rate);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u = rng.uniform() - 0.5;
    double v = rng.uniform();
    double us = 0.5 - std::fabs(u);
    double kf = std::floor((2.0 * a / us + b) * u + rate + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        kf * loglam - rate - log_factorial(kf)) {
      return static_cast<long>(kf);
    }
  }
}

}  // namespace

FamilyKind FamilyKind::gaussian(double sigma) {
  if (!(sigma > 0.0)) throw SpecError("gaussian sigma must be positive");
  FamilyKind f;
  f.tag = FamilyTag::Gaussian;
  f.sigma = sigma;
  return f;
}

FamilyKind FamilyKind::bernoulli_pm() {
  FamilyKind f;
  f.tag = FamilyTag::BernoulliPM;
  return f;
}

FamilyKind FamilyKind::poisson() {
  FamilyKind f;
  f.tag = FamilyTag::Poisson;
  return f;
}

FamilyKind FamilyKind::exponential() {
  FamilyKind f;
  f.tag = FamilyTag::Exponential;
  return f;
}

FamilyKind FamilyKind::truncated_poisson(int r) {
  if (r < 1) throw SpecError("truncated poisson level must be >= 1");
  FamilyKind f;
  f.tag = FamilyTag::TruncatedPoisson;
  f.r = r;
  return f;
}

bool FamilyKind::operator==(const FamilyKind& other) const {
  if (tag != other.tag) return false;
  if (tag == FamilyTag::Gaussian) return sigma == other.sigma;
  if (tag == FamilyTag::TruncatedPoisson) return r == other.r;
  return true;
}

std::string family_name(const FamilyKind& f) {
  switch (f.tag) {
    case FamilyTag::Gaussian: return "gaussian";
    case FamilyTag::BernoulliPM: return "bernoulli_pm";
    case FamilyTag::Poisson: return "poisson";
    case FamilyTag::Exponential: return "exponential";
    case FamilyTag::TruncatedPoisson: return "tpoisson";
  }
  return "?";
}

std::uint64_t clamp_events() { return g_clamp_events.load(std::memory_order_relaxed); }
void reset_clamp_events() { g_clamp_events.store(0, std::memory_order_relaxed); }

bool domain_check(const FamilyKind& f, double x) {
  switch (f.tag) {
    case FamilyTag::Gaussian: return std::isfinite(x);
    case FamilyTag::BernoulliPM: return x == 1.0 || x == -1.0;
    case FamilyTag::Poisson: return is_count(x);
    case FamilyTag::Exponential: return std::isfinite(x) && x >= 0.0;
    case FamilyTag::TruncatedPoisson: return is_count(x) && x <= f.r;
  }
  return false;
}

void require_in_domain(const FamilyKind& f, double x) {
  if (!domain_check(f, x)) {
    throw DomainViolation("value " + std::to_string(x) +
                          " outside domain of family " + family_name(f));
  }
}

double sufficient_stat(const FamilyKind& f, double x) {
  require_in_domain(f, x);
  if (f.tag == FamilyTag::Gaussian) return x / f.sigma;
  return x;
}

double base_measure(const FamilyKind& f, double x) {
  require_in_domain(f, x);
  switch (f.tag) {
    case FamilyTag::Gaussian: return -x * x / (2.0 * f.sigma * f.sigma);
    case FamilyTag::BernoulliPM: return 0.0;
    case FamilyTag::Poisson: return -log_factorial(x);
    case FamilyTag::Exponential: return 0.0;
    case FamilyTag::TruncatedPoisson: return -log_factorial(x);
  }
  return 0.0;
}

double log_partition(const FamilyKind& f, double eta) {
  if (!std::isfinite(eta))
    throw NonNormalizableConditional("natural parameter is not finite");
  switch (f.tag) {
    case FamilyTag::Gaussian:
      // Lebesgue base; the sigma*sqrt(2*pi) constant is folded into the base
      // measure so only likelihood differences are meaningful.
      return 0.5 * eta * eta;
    case FamilyTag::BernoulliPM:
      return std::fabs(eta) + std::log1p(std::exp(-2.0 * std::fabs(eta)));
    case FamilyTag::Poisson:
      return std::exp(clamp_eta(eta));
    case FamilyTag::Exponential:
      if (eta >= 0.0)
        throw NonNormalizableConditional(
            "exponential conditional requires eta < 0, got eta=" +
            std::to_string(eta));
      return -std::log(-eta);
    case FamilyTag::TruncatedPoisson:
      return tpoisson_logz(eta, f.r);
  }
  return 0.0;
}

double mean_function(const FamilyKind& f, double eta) {
  switch (f.tag) {
    case FamilyTag::Gaussian: return eta;
    case FamilyTag::BernoulliPM: return std::tanh(eta);
    case FamilyTag::Poisson: return std::exp(clamp_eta(eta));
    case FamilyTag::Exponential:
      if (eta >= 0.0)
        throw NonNormalizableConditional("exponential mean undefined at eta >= 0");
      return -1.0 / eta;
    case FamilyTag::TruncatedPoisson: {
      std::vector<double> pmf;
      tpoisson_logz(eta, f.r, &pmf);
      double m = 0.0;
      for (std::size_t k = 0; k < pmf.size(); ++k) m += static_cast<double>(k) * pmf[k];
      return m;
    }
  }
  return 0.0;
}

double var_function(const FamilyKind& f, double eta) {
  switch (f.tag) {
    case FamilyTag::Gaussian: return 1.0;
    case FamilyTag::BernoulliPM: {
      double t = std::tanh(eta);
      return 1.0 - t * t;
    }
    case FamilyTag::Poisson: return std::exp(clamp_eta(eta));
    case FamilyTag::Exponential:
      if (eta >= 0.0)
        throw NonNormalizableConditional("exponential variance undefined at eta >= 0");
      return 1.0 / (eta * eta);
    case FamilyTag::TruncatedPoisson: {
      std::vector<double> pmf;
      tpoisson_logz(eta, f.r, &pmf);
      double m1 = 0.0, m2 = 0.0;
      for (std::size_t k = 0; k < pmf.size(); ++k) {
        double kk = static_cast<double>(k);
        m1 += kk * pmf[k];
        m2 += kk * kk * pmf[k];
      }
      return m2 - m1 * m1;
    }
  }
  return 0.0;
}

NllGrad nll_grad(const FamilyKind& f, double eta, double x) {
  require_in_domain(f, x);
  double b = sufficient_stat(f, x);
  double value = log_partition(f, eta) - eta * b - base_measure(f, x);
  double deta = mean_function(f, eta) - b;
  return {value, deta};
}

double sample_conditional(const FamilyKind& f, double eta, RandomStream& rng) {
  if (!std::isfinite(eta))
    throw NonNormalizableConditional("natural parameter is not finite");
  if (f.tag == FamilyTag::Exponential && eta >= 0.0)
    throw NonNormalizableConditional("cannot sample exponential at eta >= 0");
  double ec = clamp_eta(eta);
  switch (f.tag) {
    case FamilyTag::Gaussian:
      return f.sigma * ec + f.sigma * rng.normal();
    case FamilyTag::BernoulliPM: {
      double p_plus = 1.0 / (1.0 + std::exp(-2.0 * ec));
      return rng.uniform() < p_plus ? 1.0 : -1.0;
    }
    case FamilyTag::Poisson: {
      double rate = std::exp(ec);
      long k = rate < 30.0 ? poisson_inversion(rate, rng) : poisson_ptrs(rate, rng);
      return static_cast<double>(k);
    }
    case FamilyTag::Exponential:
      return rng.exponential(-ec);
    case FamilyTag::TruncatedPoisson: {
      std::vector<double> pmf;
      tpoisson_logz(ec, f.r, &pmf);
      double u = rng.uniform();
      double cum = 0.0;
      for (std::size_t k = 0; k < pmf.size(); ++k) {
        cum += pmf[k];
        if (u < cum) return static_cast<double>(k);
      }
      return static_cast<double>(f.r);
    }
  }
  return 0.0;
}

}  // namespace bdmrf
