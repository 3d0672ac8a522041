#include "epigp/stats.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "epigp/errors.hpp"

namespace epigp {

double normal_critical_value(double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw config_error("confidence level must lie in (0,1)");
    }
    boost::math::normal_distribution<double> n;
    return boost::math::quantile(n, 0.5 * (1.0 + level));
}

double student_t_critical_value(double level, double dof) {
    if (!(level > 0.0 && level < 1.0)) {
        throw config_error("confidence level must lie in (0,1)");
    }
    if (!(dof >= 1.0)) {
        throw config_error("student-t degrees of freedom must be >= 1");
    }
    boost::math::students_t_distribution<double> t(dof);
    return boost::math::quantile(t, 0.5 * (1.0 + level));
}

} // namespace epigp
