/// @file forcing.hpp
/// @brief Forcing term families f(t) and their exact interval averages.

#pragma once

#include <cmath>
#include <stdexcept>

namespace flatflow {

enum class ForcingKind { constant, exp_relax, integrable_perturbation };

/// f(t) = c0                        (constant)
/// f(t) = c0 + A exp(-lambda t)     (exp_relax)
/// f(t) = c0 + A (1+t)^(-p), p>1/2  (integrable_perturbation)
/// All three are uniformly bounded; the non-constant kinds have
/// square-integrable deviation from c0.
struct ForcingSpec {
  ForcingKind kind = ForcingKind::constant;
  double c0 = 1.0;
  double amplitude = 0.0;
  double rate = 1.0;  // lambda
  double p = 1.0;     // integrable_perturbation exponent

  static ForcingSpec constant(double c0) {
    return {ForcingKind::constant, c0, 0.0, 1.0, 1.0};
  }
  static ForcingSpec exp_relax(double c0, double a, double lambda) {
    return {ForcingKind::exp_relax, c0, a, lambda, 1.0};
  }
  static ForcingSpec integrable(double c0, double a, double p) {
    if (p <= 0.5)
      throw std::invalid_argument("integrable perturbation needs p > 1/2");
    return {ForcingKind::integrable_perturbation, c0, a, 1.0, p};
  }

  double value(double t) const {
    switch (kind) {
      case ForcingKind::constant: return c0;
      case ForcingKind::exp_relax: return c0 + amplitude * std::exp(-rate * t);
      case ForcingKind::integrable_perturbation:
        return c0 + amplitude * std::pow(1.0 + t, -p);
    }
    return c0;
  }
};

/// Exact average of f over [kh, (k+1)h] (closed form for every kind).
inline double fbar(const ForcingSpec& f, long k, double h) {
  if (h <= 0.0 || k < 0) throw std::invalid_argument("fbar: need h>0, k>=0");
  const double t0 = k * h, t1 = (k + 1) * h;
  switch (f.kind) {
    case ForcingKind::constant:
      return f.c0;
    case ForcingKind::exp_relax:
      return f.c0 + f.amplitude *
                        (std::exp(-f.rate * t0) - std::exp(-f.rate * t1)) /
                        (f.rate * h);
    case ForcingKind::integrable_perturbation: {
      if (f.amplitude == 0.0) return f.c0;
      double integral;
      if (std::abs(f.p - 1.0) < 1e-12)
        integral = std::log((1.0 + t1) / (1.0 + t0));
      else
        integral = (std::pow(1.0 + t1, 1.0 - f.p) -
                    std::pow(1.0 + t0, 1.0 - f.p)) /
                   (1.0 - f.p);
      return f.c0 + f.amplitude * integral / h;
    }
  }
  return f.c0;
}

}  // namespace flatflow
