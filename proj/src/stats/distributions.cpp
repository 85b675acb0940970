#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "fkwc/error.hpp"
#include "fkwc/rank_tests.hpp"

namespace fkwc::stats {

double chi_squared_sf(double x, double df) {
  if (!(df > 0.0)) throw ParameterError("chi-squared degrees of freedom must be positive");
  if (std::isnan(x)) throw ParameterError("chi-squared argument is NaN");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

double chi_squared_quantile(double p, double df) {
  if (!(df > 0.0)) throw ParameterError("chi-squared degrees of freedom must be positive");
  if (!(p >= 0.0 && p < 1.0)) throw ParameterError("quantile level must lie in [0, 1)");
  if (p == 0.0) return 0.0;
  return 2.0 * boost::math::gamma_p_inv(0.5 * df, p);
}

double normal_sf(double z) { return 0.5 * boost::math::erfc(z / std::sqrt(2.0)); }

}  // namespace fkwc::stats
