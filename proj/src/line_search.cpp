#include "rescrl/line_search.hpp"

#include <cmath>
#include <stdexcept>

namespace rescrl {

ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo,
                                      double hi, double tolerance, int max_iterations) {
  if (!(lo <= hi)) throw std::invalid_argument("golden section needs lo <= hi");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  ScalarMinimum best{c, fc};
  auto keep = [&](double x, double fx) {
    if (fx < best.value) best = {x, fx};
  };
  keep(d, fd);
  for (int it = 0; it < max_iterations && (b - a) > tolerance; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
      keep(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
      keep(d, fd);
    }
  }
  const double mid = 0.5 * (a + b);
  keep(mid, f(mid));
  for (double x : {lo, hi}) keep(x, f(x));
  return best;
}

}  // namespace rescrl
