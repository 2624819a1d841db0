#include "dmsing/scalar_opt.hpp"

#include <cmath>
#include <stdexcept>

namespace dmsing {

ScalarMinResult golden_section_minimize(const std::function<double(double)>& f,
                                        double a, double b, double x_tol) {
    if (!(b > a)) throw std::invalid_argument("golden_section_minimize: empty bracket");
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;

    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    int iterations = 0;

    while (b - a > x_tol && iterations < 200) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        ++iterations;
    }
    const double x = 0.5 * (a + b);
    return ScalarMinResult{x, f(x), iterations};
}

ScalarMinResult golden_section_maximize(const std::function<double(double)>& f,
                                        double a, double b, double x_tol) {
    ScalarMinResult r = golden_section_minimize([&](double x) { return -f(x); }, a, b, x_tol);
    r.value = -r.value;
    return r;
}

}  // namespace dmsing
