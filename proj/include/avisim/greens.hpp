// greens.hpp: analytic photonic Green functions for a slow-light waveguide,
// a single-mode cavity, and the homogeneous-medium reference

#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "avisim/errors.hpp"
#include "avisim/units.hpp"

namespace avisim {

using cplx = std::complex<double>;

/// Complex 3-vector holding the direction content of a dipole or a local mode
/// field. Dipole magnitudes are carried separately.
struct PolarizationVector {
    Eigen::Vector3cd v = Eigen::Vector3cd::Zero();

    PolarizationVector() = default;
    explicit PolarizationVector(const Eigen::Vector3cd& components) : v(components) {}
    PolarizationVector(cplx x, cplx y, cplx z = 0.0) : v(x, y, z) {}

    static PolarizationVector x_hat() { return {1.0, 0.0}; }
    static PolarizationVector y_hat() { return {0.0, 1.0}; }
    /// (x̂ + iŷ)/√2
    static PolarizationVector right_circular()
    {
        return {1.0 / std::sqrt(2.0), cplx(0.0, 1.0 / std::sqrt(2.0))};
    }
    /// (x̂ − iŷ)/√2
    static PolarizationVector left_circular()
    {
        return {1.0 / std::sqrt(2.0), cplx(0.0, -1.0 / std::sqrt(2.0))};
    }
    /// α x̂ + β e^{iφ} ŷ
    static PolarizationVector in_plane(double alpha, double beta, double phi)
    {
        return {alpha, beta * std::polar(1.0, phi)};
    }

    double norm2() const { return v.squaredNorm(); }
    bool is_unit(double tol = 1e-12) const { return std::abs(norm2() - 1.0) < tol; }

    /// Conjugate inner product ⟨this, other⟩ = this† · other.
    cplx inner(const PolarizationVector& other) const { return v.dot(other.v); }

    PolarizationVector normalized() const { return PolarizationVector(v.normalized()); }

    friend PolarizationVector operator*(double s, const PolarizationVector& p)
    {
        return PolarizationVector(s * p.v);
    }
};

struct WaveguideSpec {
    double pitch = 400e-9;          // m
    double group_index = 50.0;      // c / v_g
    double eps_b = 13.0;
    double v_eff = 4e-20;           // m^3
    double alpha = 1.0;
    double beta = 0.0;
    double phi = 0.0;               // rad
    double k_bloch = units::pi / 400e-9;  // m^-1

    void validate() const
    {
        if (!(pitch > 0.0))
            throw ValidationError("waveguide pitch must be positive");
        if (!(group_index > 0.0))
            throw ValidationError("waveguide group index must be positive");
        if (!(v_eff > 0.0))
            throw ValidationError("waveguide effective mode volume must be positive");
        if (!(eps_b >= 1.0))
            throw ValidationError("background permittivity must be >= 1");
        if (!(std::abs(alpha * alpha + beta * beta - 1.0) < 1e-12))
            throw ValidationError("Bloch polarization coefficients must satisfy alpha^2 + beta^2 = 1 (got "
                                  + std::to_string(alpha * alpha + beta * beta) + ")");
        if (!std::isfinite(phi) || !std::isfinite(k_bloch))
            throw ValidationError("Bloch phase and wavenumber must be finite");
    }
};

struct CavitySpec {
    double omega_c = units::thz_to_rad_s(200.0);   // rad/s
    double q = 1000.0;
    double v_eff = 5e-20;                          // m^3
    double eps_b = 13.0;
    double eta = 1.0;                              // antinode factor
    PolarizationVector polarization = PolarizationVector::x_hat();

    double decay_rate() const { return omega_c / q; }

    void validate() const
    {
        if (!(omega_c > 0.0))
            throw ValidationError("cavity resonance must be positive");
        if (!(q > 0.0))
            throw ValidationError("cavity quality factor must be positive");
        if (!(v_eff > 0.0))
            throw ValidationError("cavity effective mode volume must be positive");
        if (!(eps_b >= 1.0))
            throw ValidationError("background permittivity must be >= 1");
        if (!(eta > 0.0 && eta <= 1.0))
            throw ValidationError("antinode factor eta must lie in (0, 1]");
        if (!polarization.is_unit())
            throw ValidationError("cavity polarization must be a unit vector");
    }

    /// f_c(r0) with |f_c|^2 = eta / (V_eff eps_b).
    PolarizationVector mode_field() const
    {
        return std::sqrt(eta / (v_eff * eps_b)) * polarization;
    }
};

using Reservoir = std::variant<WaveguideSpec, CavitySpec>;

/// 3x3 tensor in m^-3 together with the frequency it was evaluated at.
struct GreensTensor {
    Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
    double omega = 0.0;

    /// left† · G · right
    cplx project(const Eigen::Vector3cd& left, const Eigen::Vector3cd& right) const
    {
        return left.dot(m * right);
    }
};

/// Local Bloch field α x̂ + β e^{iφ} ŷ with amplitude 1/√(ε_b V_eff).
inline PolarizationVector mode_field(const WaveguideSpec& spec)
{
    spec.validate();
    return (1.0 / std::sqrt(spec.eps_b * spec.v_eff))
           * PolarizationVector::in_plane(spec.alpha, spec.beta, spec.phi);
}

namespace detail {
inline void require_positive_frequency(double omega)
{
    if (!(omega > 0.0))
        throw ValidationError("Green function frequency must be positive");
}
} // namespace detail

/// Bloch-mode waveguide Green function G(x, x'; ω). Coincident points take
/// Θ(0) = 1/2 from both propagation directions.
inline GreensTensor waveguide_greens(const WaveguideSpec& spec, double omega, double x, double x_prime)
{
    detail::require_positive_frequency(omega);
    const Eigen::Vector3cd e = mode_field(spec).v;
    const cplx prefactor(0.0, spec.pitch * omega * spec.group_index / (2.0 * units::c));

    const Eigen::Matrix3cd forward = e * e.adjoint();
    const Eigen::Matrix3cd backward = e.conjugate() * e.transpose();
    const double dx = x - x_prime;

    GreensTensor g;
    g.omega = omega;
    if (dx > 0.0)
        g.m = prefactor * std::polar(1.0, spec.k_bloch * dx) * forward;
    else if (dx < 0.0)
        g.m = prefactor * std::polar(1.0, -spec.k_bloch * dx) * backward;
    else
        g.m = prefactor * 0.5 * (forward + backward);
    return g;
}

/// Single-mode cavity Green function ω² f f† / (ω² − ω_c² − iωΓ_c).
inline GreensTensor cavity_greens(const CavitySpec& spec, double omega)
{
    detail::require_positive_frequency(omega);
    spec.validate();
    const Eigen::Vector3cd f = spec.mode_field().v;
    const cplx denom(omega * omega - spec.omega_c * spec.omega_c, -omega * spec.decay_rate());

    GreensTensor g;
    g.omega = omega;
    g.m = (omega * omega / denom) * (f * f.adjoint());
    return g;
}

/// Im G of a homogeneous medium of index n at coincident points, n ω³ / (6π c³).
inline double homogeneous_im_greens(double omega, double n)
{
    if (!(n >= 1.0))
        throw ValidationError("refractive index must be >= 1");
    return n * omega * omega * omega / (6.0 * units::pi * units::c * units::c * units::c);
}

/// Green tensor of either reservoir. The cavity is a single standing mode, so
/// its tensor does not depend on the emitter positions.
inline GreensTensor greens(const Reservoir& reservoir, double omega, double x = 0.0, double x_prime = 0.0)
{
    return std::visit(
        [&](const auto& spec) -> GreensTensor {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, WaveguideSpec>)
                return waveguide_greens(spec, omega, x, x_prime);
            else
                return cavity_greens(spec, omega);
        },
        reservoir);
}

/// Unnormalised local field of the reservoir mode at the emitter.
inline PolarizationVector local_field(const Reservoir& reservoir)
{
    return std::visit(
        [](const auto& spec) -> PolarizationVector {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, WaveguideSpec>)
                return mode_field(spec);
            else
                return spec.mode_field();
        },
        reservoir);
}

inline double background_permittivity(const Reservoir& reservoir)
{
    return std::visit([](const auto& spec) { return spec.eps_b; }, reservoir);
}

inline void validate(const Reservoir& reservoir)
{
    std::visit([](const auto& spec) { spec.validate(); }, reservoir);
}

} // namespace avisim
