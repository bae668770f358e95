// coupling.hpp: radiative decay, cross-decay, coherent dipole-dipole shifts and
// Lamb shifts from Green tensors, plus the analytic polarization case table

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "avisim/errors.hpp"
#include "avisim/greens.hpp"
#include "avisim/units.hpp"

namespace avisim {

enum class DipoleBasis { circular, linear };

inline std::string_view to_string(DipoleBasis b)
{
    return b == DipoleBasis::circular ? "circular" : "linear";
}

/// Two exciton dipoles sharing one magnitude. Directions are unit vectors; the
/// magnitude is in C m. Positions only matter for the waveguide.
struct DipolePair {
    PolarizationVector d_a = PolarizationVector::right_circular();
    PolarizationVector d_b = PolarizationVector::left_circular();
    double magnitude = 50.0 * units::debye;
    DipoleBasis basis = DipoleBasis::circular;
    double x_a = 0.0;   // m
    double x_b = 0.0;   // m

    static DipolePair circular(double debye)
    {
        return {PolarizationVector::right_circular(), PolarizationVector::left_circular(),
                debye * units::debye, DipoleBasis::circular};
    }

    static DipolePair linear(double debye)
    {
        return {PolarizationVector::x_hat(), PolarizationVector::y_hat(), debye * units::debye,
                DipoleBasis::linear};
    }

    bool same_point() const { return x_a == x_b; }

    Eigen::Vector3cd dipole_a() const { return magnitude * d_a.v; }
    Eigen::Vector3cd dipole_b() const { return magnitude * d_b.v; }

    void validate() const
    {
        if (!(magnitude > 0.0))
            throw ValidationError("dipole magnitude must be positive");
        if (!d_a.is_unit() || !d_b.is_unit())
            throw ValidationError("dipole directions must be unit vectors");
        // Two emitters at different sites need not be orthogonal.
        if (same_point() && std::abs(d_a.inner(d_b)) > 1e-12)
            throw ValidationError("dipoles of a single dot must be orthogonal");
    }
};

/// Γ_nn' = (2/ħε0) Im[d_n† G d_n'] in rad/s.
inline double cross_rate(const Eigen::Vector3cd& d_n, const Eigen::Vector3cd& d_np, const GreensTensor& g)
{
    return 2.0 / (units::hbar * units::eps0) * g.project(d_n, d_np).imag();
}

/// δ_nn' = (1/ħε0) Re[d_n† G d_n'] in rad/s.
inline double cross_shift(const Eigen::Vector3cd& d_n, const Eigen::Vector3cd& d_np, const GreensTensor& g)
{
    return 1.0 / (units::hbar * units::eps0) * g.project(d_n, d_np).real();
}

/// Δ_n = (1/ħε0) Re[d_n† G(r0, r0; ω_n) d_n] in rad/s.
inline double lamb_shift(const Eigen::Vector3cd& d_n, const GreensTensor& g)
{
    return cross_shift(d_n, d_n, g);
}

/// Every reservoir-induced coupling of the two excitons, in rad/s.
struct RateSet {
    double gamma_aa = 0.0;
    double gamma_bb = 0.0;
    double gamma_ab = 0.0;
    double gamma_ba = 0.0;
    double delta_ab = 0.0;
    double delta_ba = 0.0;
    double lamb_a = 0.0;
    double lamb_b = 0.0;
    bool same_point = true;

    /// The same set with all cross-dipole terms removed.
    RateSet without_cross_coupling() const
    {
        RateSet r = *this;
        r.gamma_ab = r.gamma_ba = 0.0;
        r.delta_ab = r.delta_ba = 0.0;
        return r;
    }

    bool reciprocal(double rel_tol = 1e-9) const
    {
        const double scale = std::max({std::abs(gamma_aa), std::abs(gamma_bb), 1e-300});
        return std::abs(gamma_ab - gamma_ba) <= rel_tol * scale
               && std::abs(delta_ab - delta_ba) <= rel_tol * scale;
    }

    void validate() const
    {
        const double scale = std::max(std::abs(gamma_aa), std::abs(gamma_bb));
        if (gamma_aa < -1e-12 * scale || gamma_bb < -1e-12 * scale)
            throw ValidationError("radiative decay rates must be non-negative");
        if (!same_point)
            return;
        if (std::abs(gamma_ab) > std::sqrt(std::max(gamma_aa * gamma_bb, 0.0)) + 1e-9 * gamma_aa)
            throw ValidationError("cross-decay exceeds the Cauchy-Schwarz bound sqrt(Gamma_aa Gamma_bb)");
        Eigen::Matrix2d decay;
        decay << gamma_aa, 0.5 * (gamma_ab + gamma_ba), 0.5 * (gamma_ab + gamma_ba), gamma_bb;
        if (Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(decay).eigenvalues().minCoeff() < -1e-9 * gamma_aa)
            throw ValidationError("decay matrix is not positive semidefinite");
    }
};

/// Fills every entry of the rate set. Lamb shifts use the bare frequencies; the
/// remaining rates are evaluated once at the shifted ω'_n = ω_n − Δ_n.
/// The coherent exchange is Hermitian, so δ_ba mirrors δ_ab.
inline RateSet rate_set(const DipolePair& pair, const Reservoir& reservoir, double omega_a, double omega_b)
{
    pair.validate();
    validate(reservoir);
    const Eigen::Vector3cd da = pair.dipole_a();
    const Eigen::Vector3cd db = pair.dipole_b();

    RateSet r;
    r.same_point = pair.same_point();
    r.lamb_a = lamb_shift(da, greens(reservoir, omega_a, pair.x_a, pair.x_a));
    r.lamb_b = lamb_shift(db, greens(reservoir, omega_b, pair.x_b, pair.x_b));
    const double wa = omega_a - r.lamb_a;
    const double wb = omega_b - r.lamb_b;

    r.gamma_aa = cross_rate(da, da, greens(reservoir, wa, pair.x_a, pair.x_a));
    r.gamma_bb = cross_rate(db, db, greens(reservoir, wb, pair.x_b, pair.x_b));

    const GreensTensor g_ab = greens(reservoir, wb, pair.x_a, pair.x_b);
    r.gamma_ab = cross_rate(da, db, g_ab);
    r.delta_ab = cross_shift(da, db, g_ab);
    r.gamma_ba = cross_rate(db, da, greens(reservoir, wa, pair.x_b, pair.x_a));
    r.delta_ba = r.delta_ab;
    return r;
}

/// Decay rate of a dipole of magnitude d in a homogeneous medium of index n.
inline double homogeneous_rate(double omega, double n, double dipole_cm)
{
    return 2.0 * dipole_cm * dipole_cm / (units::hbar * units::eps0) * homogeneous_im_greens(omega, n);
}

/// Rate of a dipole fully aligned with the local mode field.
inline double aligned_rate(const Reservoir& reservoir, double omega, double dipole_cm)
{
    const Eigen::Vector3cd d = dipole_cm * local_field(reservoir).normalized().v;
    return cross_rate(d, d, greens(reservoir, omega));
}

/// F_P = Γ_aligned / Γ⁰ with Γ⁰ the homogeneous rate at index n_medium.
inline double purcell_factor(double gamma_aligned, double omega, double n_medium, double dipole_cm)
{
    return gamma_aligned / homogeneous_rate(omega, n_medium, dipole_cm);
}

// ---------------------------------------------------------------------------
// Analytic polarization cases.

enum class CaseId { A1, A2, A3, B, CPointRC, CPointLP };

inline constexpr CaseId all_cases[] = {CaseId::A1, CaseId::A2, CaseId::A3,
                                      CaseId::B,  CaseId::CPointRC, CaseId::CPointLP};

inline std::string_view to_string(CaseId id)
{
    switch (id) {
    case CaseId::A1: return "A1";
    case CaseId::A2: return "A2";
    case CaseId::A3: return "A3";
    case CaseId::B: return "B";
    case CaseId::CPointRC: return "CPOINT_RC";
    case CaseId::CPointLP: return "CPOINT_LP";
    }
    throw ValidationError("unknown case id");
}

inline CaseId parse_case_id(std::string_view name)
{
    for (CaseId id : all_cases)
        if (to_string(id) == name)
            return id;
    throw ValidationError("unknown case id '" + std::string(name) + "'");
}

/// The subset of rate-set entries each analytic case pins down.
struct ClosedForm {
    std::optional<double> gamma_ab;
    std::optional<double> gamma_ba;
    std::optional<double> delta_ab;
    std::optional<double> delta_ba;
};

/// k_dx = k_ω (x_a − x_b), only used by the two-site cases.
inline ClosedForm closed_form_case(CaseId id, double gamma_aa, double k_dx = 0.0)
{
    switch (id) {
    case CaseId::A1:
        return {gamma_aa, gamma_aa, {}, {}};
    case CaseId::A2:
        return {-gamma_aa, -gamma_aa, {}, {}};
    case CaseId::A3:
        return {0.0, {}, 0.5 * gamma_aa, 0.5 * gamma_aa};
    case CaseId::B:
        return {gamma_aa, gamma_aa, {}, {}};
    case CaseId::CPointRC:
        return {2.0 * gamma_aa * std::cos(k_dx), 0.0, {}, {}};
    case CaseId::CPointLP:
        return {{}, {}, 0.5 * gamma_aa * std::sin(k_dx), 0.5 * gamma_aa * std::sin(k_dx)};
    }
    throw ValidationError("unknown case id");
}

/// Dipoles plus waveguide geometry that realise a case from first principles.
struct CaseSetup {
    DipolePair pair;
    WaveguideSpec waveguide;
};

inline CaseSetup case_setup(CaseId id, WaveguideSpec base, double dipole_debye, double k_dx = 0.0)
{
    const double h = 1.0 / std::sqrt(2.0);
    CaseSetup s{DipolePair::circular(dipole_debye), base};
    auto set_field = [&](double a, double b, double phi) {
        s.waveguide.alpha = a;
        s.waveguide.beta = b;
        s.waveguide.phi = phi;
    };
    switch (id) {
    case CaseId::A1: set_field(1.0, 0.0, 0.0); break;
    case CaseId::A2: set_field(0.0, 1.0, 0.0); break;
    case CaseId::A3: set_field(h, h, 0.0); break;
    case CaseId::B:
        s.pair = DipolePair::linear(dipole_debye);
        set_field(h, h, 0.0);
        break;
    case CaseId::CPointRC:
        s.pair.d_b = PolarizationVector::right_circular();
        set_field(h, h, units::pi / 2.0);
        s.pair.x_a = k_dx / base.k_bloch;
        break;
    case CaseId::CPointLP:
        s.pair = DipolePair::linear(dipole_debye);
        set_field(h, h, units::pi / 2.0);
        s.pair.x_a = k_dx / base.k_bloch;
        break;
    }
    return s;
}

} // namespace avisim
