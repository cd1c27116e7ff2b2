#include "hjbqrnet/ode.hpp"

#include <algorithm>
#include <cmath>

namespace hjbqrnet {

Vector rk4_step(const OdeRhs& rhs, double t, const Vector& x, double dt, int substeps) {
    if (substeps < 1) substeps = 1;
    Vector y = x;
    double h = dt / substeps;
    for (int i = 0; i < substeps; ++i) {
        double ti = t + i * h;
        Vector k1 = rhs(ti, y);
        Vector k2 = rhs(ti + 0.5 * h, y + 0.5 * h * k1);
        Vector k3 = rhs(ti + 0.5 * h, y + 0.5 * h * k2);
        Vector k4 = rhs(ti + h, y + h * k3);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return y;
}

namespace {

// Dormand-Prince coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

}  // namespace

Dopri5Result integrate_dopri5(const OdeRhs& rhs, double t0, const Vector& x0, double t_end,
                              const Dopri5Options& options, const OdeObserver& observer) {
    Dopri5Result result{OdeStatus::reached_end, t0, x0, 0, 0};
    if (t_end <= t0) return result;

    double t = t0;
    Vector x = x0;
    Vector k1 = rhs(t, x);
    double h = std::min(options.initial_step, t_end - t0);

    while (t < t_end) {
        h = std::min({h, options.max_step, t_end - t});
        if (h < 1e-14 * std::max(1.0, std::fabs(t))) {
            result.status = OdeStatus::step_underflow;
            break;
        }
        if (result.accepted_steps + result.rejected_steps > options.max_steps) {
            result.status = OdeStatus::step_underflow;
            break;
        }

        Vector k2 = rhs(t + c2 * h, x + h * (a21 * k1));
        Vector k3 = rhs(t + c3 * h, x + h * (a31 * k1 + a32 * k2));
        Vector k4 = rhs(t + c4 * h, x + h * (a41 * k1 + a42 * k2 + a43 * k3));
        Vector k5 = rhs(t + c5 * h, x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        Vector k6 = rhs(t + h, x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        Vector x_new = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        Vector k7 = rhs(t + h, x_new);  // FSAL stage

        double err = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            double ei = h * (e1 * k1(i) + e3 * k3(i) + e4 * k4(i) + e5 * k5(i) + e6 * k6(i) +
                             e7 * k7(i));
            double sc = options.abs_tol +
                        options.rel_tol * std::max(std::fabs(x(i)), std::fabs(x_new(i)));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / std::max<double>(x.size(), 1));

        if (!std::isfinite(err)) {
            ++result.rejected_steps;
            h *= 0.2;
            continue;
        }
        if (err <= 1.0) {
            t += h;
            x = x_new;
            k1 = k7;
            ++result.accepted_steps;
            if (observer && !observer(t, x, k1)) {
                result.status = OdeStatus::observer_stop;
                break;
            }
        } else {
            ++result.rejected_steps;
        }
        double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h *= std::clamp(factor, 0.2, 5.0);
    }

    result.t_final = t;
    result.x_final = x;
    return result;
}

}  // namespace hjbqrnet
