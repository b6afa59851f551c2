#include "gpsemc/mathutil.hpp"

#include <cmath>
#include <stdexcept>

namespace gpsemc {

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  return std::sin(x) / x;
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n < 2) n = 2;
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

namespace {

double simpson3(const std::function<double(double)>& f, double a, double m, double b,
                double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double b, double fa,
             double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson3(f, a, lm, m, fa, flm, fm);
  const double right = simpson3(f, m, rm, b, fm, frm, fb);
  if (depth <= 0) return left + right;
  if (std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adapt(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adapt(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, double max_step) {
  if (!(b > a)) return 0.0;
  if (!(max_step > 0.0)) throw std::invalid_argument("adaptive_simpson: max_step must be > 0");
  const int panels = static_cast<int>(std::ceil((b - a) / max_step));
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double pa = a + i * h, pb = a + (i + 1) * h, pm = 0.5 * (pa + pb);
    const double fa = f(pa), fm = f(pm), fb = f(pb);
    const double whole = simpson3(f, pa, pm, pb, fa, fm, fb);
    total += adapt(f, pa, pb, fa, fm, fb, whole, tol / panels, 24);
  }
  return total;
}

double mean_sinc_sq_uniform(double t_d_s, double half_range_hz) {
  const double pi = 3.14159265358979323846;
  auto f = [&](double d) { double s = sinc(pi * d * t_d_s); return s * s; };
  // Smooth integrand; 4000 panels put the quadrature error far below 1e-10.
  return simpson(f, 0.0, half_range_hz, 4000) / half_range_hz;
}

}  // namespace gpsemc
