#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

#include "scenery/error.hpp"

namespace scenery {

struct QuadratureOptions {
    double tol = 1e-10;
    std::size_t initial_panels = 8;
    std::size_t max_panels = std::size_t{1} << 16;
};

template <class T>
struct QuadratureResult {
    T value{};
    double last_change = 0.0;  // |I(2P) - I(P)| at termination
    std::size_t panels = 0;
    std::size_t evaluations = 0;
};

namespace detail {
inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
}  // namespace detail

// Composite 20-point Gauss-Legendre on uniform panels over [a, b]; the panel
// count doubles until two successive estimates differ by less than tol.
template <class F>
auto integrate_panels(F&& f, double a, double b, const QuadratureOptions& opt = {})
    -> QuadratureResult<decltype(f(a))> {
    using T = decltype(f(a));
    using Rule = boost::math::quadrature::gauss<double, 20>;
    const auto& nodes = Rule::abscissa();
    const auto& weights = Rule::weights();

    auto composite = [&](std::size_t panels, std::size_t& evals) {
        T total{};
        double h = (b - a) / static_cast<double>(panels);
        for (std::size_t p = 0; p < panels; ++p) {
            double mid = a + (static_cast<double>(p) + 0.5) * h;
            double half = 0.5 * h;
            T panel{};
            // boost stores the non-negative half of the symmetric rule.
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                if (nodes[i] == 0.0) {
                    panel += weights[i] * f(mid);
                    ++evals;
                } else {
                    panel += weights[i] * (f(mid - half * nodes[i]) + f(mid + half * nodes[i]));
                    evals += 2;
                }
            }
            total += panel * half;
        }
        return total;
    };

    QuadratureResult<T> out;
    std::size_t panels = opt.initial_panels;
    T previous = composite(panels, out.evaluations);
    while (panels < opt.max_panels) {
        panels *= 2;
        T current = composite(panels, out.evaluations);
        double change = detail::magnitude(current - previous);
        if (change < opt.tol) {
            out.value = current;
            out.last_change = change;
            out.panels = panels;
            return out;
        }
        previous = current;
    }
    throw Error(Errc::quadrature_nonconvergence,
                "quadrature did not reach tolerance " + std::to_string(opt.tol) + " within " +
                    std::to_string(opt.max_panels) + " panels");
}

}  // namespace scenery
