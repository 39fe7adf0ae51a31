#pragma once

namespace psl {

/// Dawson function F(x) = exp(-x^2) int_0^x exp(t^2) dt.
///
/// Maclaurin series for |x| < 0.2, Rybicki's exponentially convergent sampling
/// sum (step h = 0.2, aliasing error ~exp(-(pi/2h)^2)) up to |x| = 1e3, and the
/// asymptotic series beyond. Absolute and relative error below 1e-14 on the
/// real line.
double dawson(double x);

} // namespace psl
