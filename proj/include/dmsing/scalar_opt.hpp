// scalar_opt.hpp — one-dimensional golden-section refinement

#pragma once

#include <functional>

namespace dmsing {

struct ScalarMinResult {
    double x{0.0};
    double value{0.0};
    int iterations{0};
};

// Golden-section minimization of f on [a, b]; stops when the bracket width
// drops below x_tol. Assumes f is unimodal on the bracket.
ScalarMinResult golden_section_minimize(const std::function<double(double)>& f,
                                        double a, double b, double x_tol);

// Maximization via the same routine on -f.
ScalarMinResult golden_section_maximize(const std::function<double(double)>& f,
                                        double a, double b, double x_tol);

}  // namespace dmsing
