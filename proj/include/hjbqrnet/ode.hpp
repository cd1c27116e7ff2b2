#ifndef HJBQRNET_ODE_HPP
#define HJBQRNET_ODE_HPP

#include "hjbqrnet/common.hpp"

#include <functional>
#include <limits>

namespace hjbqrnet {

using OdeRhs = std::function<Vector(double, const Vector&)>;

/// Classical RK4 with a fixed number of substeps; used for warm-start
/// simulation where only a rough trajectory is needed.
Vector rk4_step(const OdeRhs& rhs, double t, const Vector& x, double dt, int substeps);

enum class OdeStatus {
    reached_end,   // integrated through [t0, t_end]
    observer_stop, // the observer requested termination
    step_underflow // step size collapsed (stiffness signal)
};

struct Dopri5Options {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double initial_step = 1e-3;
    double max_step = std::numeric_limits<double>::infinity();
    long max_steps = 50'000'000;
};

/// Called after each accepted step with (t, x, f(t, x)); the derivative is
/// the integrator's FSAL stage, so no extra evaluation is spent. Return
/// false to stop the integration.
using OdeObserver = std::function<bool(double, const Vector&, const Vector&)>;

struct Dopri5Result {
    OdeStatus status;
    double t_final;
    Vector x_final;
    long accepted_steps;
    long rejected_steps;
};

/// Adaptive Dormand-Prince 5(4) integrator with PI-free step control and
/// the first-same-as-last optimization.
Dopri5Result integrate_dopri5(const OdeRhs& rhs, double t0, const Vector& x0, double t_end,
                              const Dopri5Options& options, const OdeObserver& observer = {});

}  // namespace hjbqrnet

#endif
