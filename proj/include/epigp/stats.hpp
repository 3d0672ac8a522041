#pragma once

namespace epigp {

/// Two-sided normal critical value for a central confidence level in (0,1),
/// i.e. Phi^{-1}((1+level)/2). z(0.95) = 1.959964.
double normal_critical_value(double level);

/// Two-sided Student-t critical value with `dof` degrees of freedom (>= 1).
double student_t_critical_value(double level, double dof);

} // namespace epigp
