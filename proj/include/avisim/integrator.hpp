// integrator.hpp: time integration of constant-coefficient linear systems
// dx/dt = A x with complex state, on top of Boost.Odeint

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "avisim/errors.hpp"

namespace avisim {

struct Tolerances {
    double rtol = 1e-8;
    double atol = 1e-10;
};

namespace detail {

template <int Rows, int Cols>
using OdeState = std::array<std::complex<double>, static_cast<std::size_t>(Rows * Cols)>;

template <int Rows, int Cols>
struct LinearRhs {
    using Matrix = Eigen::Matrix<std::complex<double>, Rows, Rows>;
    using Block = Eigen::Matrix<std::complex<double>, Rows, Cols>;
    const Matrix* a;

    void operator()(const OdeState<Rows, Cols>& x, OdeState<Rows, Cols>& dxdt, double) const
    {
        Eigen::Map<const Block> xm(x.data());
        Eigen::Map<Block> dm(dxdt.data());
        dm.noalias() = (*a) * xm;
    }
};

template <class State>
bool all_finite(const State& s)
{
    for (const auto& z : s)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            return false;
    return true;
}

inline void validate_grid(std::span<const double> grid)
{
    if (grid.empty())
        throw ValidationError("time grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]))
            throw ValidationError("time grid contains a non-finite value");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw ValidationError("time grid must be strictly increasing");
    }
}

} // namespace detail

/// Adaptive Dormand-Prince 5(4) integration sampled on `grid` (grid[0] is the
/// initial time). `observe(index, t, x)` sees every grid point in order.
template <int Rows, int Cols, class Observer>
void integrate_linear(const Eigen::Matrix<std::complex<double>, Rows, Rows>& a,
                      const Eigen::Matrix<std::complex<double>, Rows, Cols>& x0,
                      std::span<const double> grid, Tolerances tol, Observer&& observe)
{
    namespace ode = boost::numeric::odeint;
    using State = detail::OdeState<Rows, Cols>;
    using Block = Eigen::Matrix<std::complex<double>, Rows, Cols>;

    detail::validate_grid(grid);
    if (!(tol.rtol >= 0.0 && tol.atol >= 0.0) || (tol.rtol == 0.0 && tol.atol == 0.0))
        throw ValidationError("integration tolerances must be non-negative and not both zero");

    State s;
    Eigen::Map<Block>(s.data()) = x0;
    if (!detail::all_finite(s))
        throw IntegrationError("non-finite initial state", grid.front());
    observe(std::size_t{0}, grid.front(), Block(x0));
    if (grid.size() == 1)
        return;

    const double span = grid.back() - grid.front();
    const double scale = a.cwiseAbs().rowwise().sum().maxCoeff();
    double dt = span;
    if (scale > 0.0)
        dt = std::min(span, 0.05 / scale);
    const double min_dt = 1e-14 * std::max(span, std::abs(grid.back()));

    detail::LinearRhs<Rows, Cols> rhs{&a};
    auto stepper = ode::make_dense_output(tol.atol, tol.rtol, ode::runge_kutta_dopri5<State>());
    stepper.initialize(s, grid.front(), dt);

    State sample;
    std::size_t next = 1;
    while (true) {
        while (next < grid.size() && grid[next] <= stepper.current_time()) {
            stepper.calc_state(grid[next], sample);
            observe(next, grid[next], Block(Eigen::Map<const Block>(sample.data())));
            ++next;
        }
        if (next == grid.size())
            return;

        const double t = stepper.current_time();
        try {
            stepper.do_step(std::cref(rhs));
        } catch (const ode::step_adjustment_error&) {
            throw IntegrationError("step size underflow", t);
        }
        if (!detail::all_finite(stepper.current_state()))
            throw IntegrationError("non-finite state", stepper.current_time());
        if (!(stepper.current_time_step() > min_dt) || !(stepper.current_time() > t))
            throw IntegrationError("step size underflow", stepper.current_time());
    }
}

/// e^{A h}, built by integrating the identity over one interval.
template <int Rows>
Eigen::Matrix<std::complex<double>, Rows, Rows>
propagator(const Eigen::Matrix<std::complex<double>, Rows, Rows>& a, double h,
           Tolerances tol = {1e-12, 1e-14})
{
    using Matrix = Eigen::Matrix<std::complex<double>, Rows, Rows>;
    Matrix result = Matrix::Identity();
    const std::array<double, 2> grid{0.0, h};
    integrate_linear<Rows, Rows>(a, Matrix::Identity().eval(), grid, tol,
                                 [&](std::size_t i, double, const Matrix& x) {
                                     if (i == 1)
                                         result = x;
                                 });
    return result;
}

/// Classic fixed-step RK4 over [0, t_end] in `steps` equal steps.
template <int Rows>
Eigen::Matrix<std::complex<double>, Rows, 1>
integrate_linear_fixed(const Eigen::Matrix<std::complex<double>, Rows, Rows>& a,
                       const Eigen::Matrix<std::complex<double>, Rows, 1>& x0, double t_end, int steps)
{
    namespace ode = boost::numeric::odeint;
    using State = detail::OdeState<Rows, 1>;
    using Vector = Eigen::Matrix<std::complex<double>, Rows, 1>;
    if (steps <= 0)
        throw ValidationError("fixed-step integration needs at least one step");

    State s;
    Eigen::Map<Vector>(s.data()) = x0;
    detail::LinearRhs<Rows, 1> rhs{&a};
    ode::integrate_n_steps(ode::runge_kutta4<State>(), std::cref(rhs), s, 0.0, t_end / steps, steps);
    return Eigen::Map<const Vector>(s.data());
}

} // namespace avisim
