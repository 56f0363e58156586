#include "pireduce/metrics.hpp"

#include <boost/math/distributions/students_t.hpp>

namespace pireduce::detail {

double student_t_two_sided_p(double t, double dof) {
  const boost::math::students_t dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

}  // namespace pireduce::detail
