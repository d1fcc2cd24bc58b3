#pragma once

#include <boost/math/distributions/chi_squared.hpp>
#include <string>

#include "parachain/errors.hpp"

namespace parachain {

// Chi-squared quantile with `dof` degrees of freedom. Delegates to Boost.Math,
// which inverts the regularized lower incomplete gamma function (Halley
// iteration seeded by the Wilson-Hilferty approximation) to near machine
// precision.
inline double chisq_quantile(unsigned dof, double level) {
  if (dof < 1) throw DomainError("chisq_quantile: degrees of freedom must be >= 1");
  if (!(level > 0.0 && level < 1.0))
    throw DomainError("chisq_quantile: level must lie in (0, 1), got " + std::to_string(level));
  const boost::math::chi_squared_distribution<double> dist(static_cast<double>(dof));
  return boost::math::quantile(dist, level);
}

inline double chisq_cdf(unsigned dof, double x) {
  if (dof < 1) throw DomainError("chisq_cdf: degrees of freedom must be >= 1");
  if (x <= 0.0) return 0.0;
  const boost::math::chi_squared_distribution<double> dist(static_cast<double>(dof));
  return boost::math::cdf(dist, x);
}

}  // namespace parachain
