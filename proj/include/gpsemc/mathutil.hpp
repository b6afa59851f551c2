#pragma once

#include <functional>

namespace gpsemc {

// sin(x)/x with a series fallback near zero; sinc(0) == 1 exactly.
double sinc(double x);

// Composite Simpson on [a, b] with n panels (n rounded up to even).
double simpson(const std::function<double(double)>& f, double a, double b, int n);

// Adaptive Simpson with a hard cap on the panel width. The cap guarantees that
// narrow spectral features of width >= max_step are never stepped over even
// when the integrand looks locally smooth.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, double max_step);

// Mean of sinc^2(pi * d * t_d) for d uniform on [0, half_range_hz]. This is the
// average attenuation of a tone whose distance to the nearest spectral line is
// unknown, as seen through an integrate-and-dump window of t_d seconds.
double mean_sinc_sq_uniform(double t_d_s, double half_range_hz = 500.0);

}  // namespace gpsemc
