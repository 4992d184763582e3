#pragma once

#include <functional>

namespace rescrl {

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
};

/**
 * Golden-section minimization of a unimodal function on [lo, hi].
 *
 * The interval is shrunk until it is narrower than `tolerance`; the result is
 * the best point evaluated, including the final midpoint and both original
 * endpoints. Infinite values are allowed, e.g. outside a feasible region.
 */
ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo,
                                      double hi, double tolerance = 1e-10, int max_iterations = 300);

}  // namespace rescrl
