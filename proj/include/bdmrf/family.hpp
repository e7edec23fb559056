#pragma once

#include <cstdint>
#include <string>

#include "bdmrf/rng.hpp"

namespace bdmrf {

enum class FamilyTag {
  Gaussian,      // known scale sigma, B(x) = x/sigma, M(x) = -x^2/(2 sigma^2)
  BernoulliPM,   // domain {-1,+1}, B(x) = x, M = 0
  Poisson,       // domain {0,1,...}, B(x) = x, M(x) = -log(x!)
  Exponential,   // domain [0,inf), B(x) = x, M = 0, requires eta < 0
  TruncatedPoisson,  // domain {0..r}, B(x) = x, M(x) = -log(x!)
};

struct FamilyKind {
  FamilyTag tag = FamilyTag::Gaussian;
  double sigma = 1.0;  // Gaussian only
  int r = 1;           // TruncatedPoisson only

  static FamilyKind gaussian(double sigma = 1.0);
  static FamilyKind bernoulli_pm();
  static FamilyKind poisson();
  static FamilyKind exponential();
  static FamilyKind truncated_poisson(int r);

  bool finite_domain() const {
    return tag == FamilyTag::BernoulliPM || tag == FamilyTag::TruncatedPoisson;
  }
  bool operator==(const FamilyKind& other) const;
};

std::string family_name(const FamilyKind& f);

// Natural parameters are clamped to this magnitude inside sampling and inside
// the Poisson log-partition; each clamp bumps a process-wide counter.
inline constexpr double kEtaClamp = 30.0;
std::uint64_t clamp_events();
void reset_clamp_events();

bool domain_check(const FamilyKind& f, double x);
void require_in_domain(const FamilyKind& f, double x);

double sufficient_stat(const FamilyKind& f, double x);
double base_measure(const FamilyKind& f, double x);

// Log-normalizer D(eta). Throws NonNormalizableConditional for the
// exponential family at eta >= 0.
double log_partition(const FamilyKind& f, double eta);

// D'(eta), the conditional mean of B.
double mean_function(const FamilyKind& f, double eta);

// D''(eta), the conditional variance of B.
double var_function(const FamilyKind& f, double eta);

struct NllGrad {
  double value;
  double deta;
};

// Per-observation negative log likelihood D(eta) - eta*B(x) - M(x) and its
// derivative in eta.
NllGrad nll_grad(const FamilyKind& f, double eta, double x);

double sample_conditional(const FamilyKind& f, double eta, RandomStream& rng);

}  // namespace bdmrf
