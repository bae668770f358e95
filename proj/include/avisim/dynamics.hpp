// dynamics.hpp: Liouvillian of the driven, dissipative V system {g, a, b},
// time evolution, steady states, observables and closed-form limits

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "avisim/coupling.hpp"
#include "avisim/errors.hpp"
#include "avisim/integrator.hpp"
#include "avisim/units.hpp"

namespace avisim {

using Matrix3 = Eigen::Matrix3cd;
using Superoperator = Eigen::Matrix<cplx, 9, 9>;
using Vectorized = Eigen::Matrix<cplx, 9, 1>;

/// Basis indices of the V system.
namespace level {
inline constexpr int g = 0;
inline constexpr int a = 1;
inline constexpr int b = 2;
} // namespace level

/// σ_ij = |i⟩⟨j|
inline Matrix3 ket_bra(int i, int j)
{
    Matrix3 m = Matrix3::Zero();
    m(i, j) = 1.0;
    return m;
}

/// Column-stacking: vec(ρ)[i + 3j] = ρ(i, j).
inline Vectorized vectorize(const Matrix3& rho) { return Eigen::Map<const Vectorized>(rho.data()); }
inline Matrix3 unvectorize(const Vectorized& v) { return Eigen::Map<const Matrix3>(v.data()); }

/// Full parameterization of the V system in the laser rotating frame. All
/// frequencies in rad/s.
struct VSystem {
    double detuning_a = 0.0;   // ω_L − ω'_a
    double detuning_b = 0.0;   // ω_L − ω'_b
    RateSet rates;
    double omega_a = 0.0;      // Rabi frequencies; sign carries a 0 or π pump phase
    double omega_b = 0.0;
    double dephasing_a = 0.0;  // γ'_n, coherence dephasing rate
    double dephasing_b = 0.0;

    void validate() const
    {
        for (double v : {detuning_a, detuning_b, omega_a, omega_b, dephasing_a, dephasing_b})
            if (!std::isfinite(v))
                throw ValidationError("V-system parameters must be finite");
        if (dephasing_a < 0.0 || dephasing_b < 0.0)
            throw ValidationError("pure dephasing rates must be non-negative");
        rates.validate();
        if (!rates.reciprocal())
            throw ValidationError("non-reciprocal cross couplings (Gamma_ab != Gamma_ba or delta_ab != delta_ba) "
                                  "do not generate a Hermiticity-preserving master equation");
    }
};

namespace detail {
/// kron(B, A), so that vec(A X B) = kron(Bᵀ, A) vec(X).
inline Superoperator kron(const Matrix3& b, const Matrix3& a)
{
    Superoperator k;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            k.block<3, 3>(3 * i, 3 * j) = b(i, j) * a;
    return k;
}
inline Superoperator left(const Matrix3& a) { return kron(Matrix3::Identity(), a); }
inline Superoperator right(const Matrix3& b) { return kron(b.transpose(), Matrix3::Identity()); }
inline Superoperator sandwich(const Matrix3& a, const Matrix3& b) { return kron(b.transpose(), a); }
} // namespace detail

/// Generator L with dρ/dt = L ρ, in rad/ns (time in ns).
///
/// Terms: detuning commutator, coherent dipole-dipole exchange, collective
/// dissipator Σ Γ_nn' (σ_gn' ρ σ_ng − ½{σ_ng σ_gn', ρ}), coherent pump with
/// H_p/ħ = Σ Ω_n/2 (σ_gn + σ_ng), and pure dephasing γ'_n (2σ_nn ρ σ_nn − {σ_nn, ρ})
/// which damps the g–n coherence at γ'_n.
inline Superoperator liouvillian(const VSystem& sys)
{
    using namespace detail;
    sys.validate();
    const double s = 1e-9;
    const cplx i(0.0, 1.0);
    const int g = level::g;
    const int ex[2] = {level::a, level::b};
    const double detuning[2] = {sys.detuning_a * s, sys.detuning_b * s};
    const double rabi[2] = {sys.omega_a * s, sys.omega_b * s};
    const double dephasing[2] = {sys.dephasing_a * s, sys.dephasing_b * s};
    const double gamma[2][2] = {{sys.rates.gamma_aa * s, sys.rates.gamma_ab * s},
                                {sys.rates.gamma_ba * s, sys.rates.gamma_bb * s}};
    const double delta[2][2] = {{0.0, sys.rates.delta_ab * s}, {sys.rates.delta_ba * s, 0.0}};

    Superoperator l = Superoperator::Zero();
    Matrix3 h_pump = Matrix3::Zero();
    for (int p = 0; p < 2; ++p) {
        const int n = ex[p];
        const Matrix3 snn = ket_bra(n, n);
        l += i * detuning[p] * (left(snn) - right(snn));
        l += dephasing[p] * (2.0 * sandwich(snn, snn) - left(snn) - right(snn));
        h_pump += 0.5 * rabi[p] * (ket_bra(g, n) + ket_bra(n, g));

        for (int q = 0; q < 2; ++q) {
            const int m = ex[q];
            const Matrix3 snm = ket_bra(n, m);  // σ_ng σ_gm
            if (p != q)
                l += i * delta[p][q] * (left(snm) - right(snm));
            l += gamma[p][q] * (sandwich(ket_bra(g, m), ket_bra(n, g)) - 0.5 * left(snm) - 0.5 * right(snm));
        }
    }
    l += -i * (left(h_pump) - right(h_pump));
    return l;
}

/// 3x3 density matrix over {g, a, b}.
struct DensityMatrix {
    Matrix3 rho = ket_bra(level::g, level::g);

    DensityMatrix() = default;
    explicit DensityMatrix(const Matrix3& m) : rho(m) {}

    static DensityMatrix pure(const Eigen::Vector3cd& psi)
    {
        const Eigen::Vector3cd n = psi.normalized();
        return DensityMatrix(n * n.adjoint());
    }
    static DensityMatrix ground() { return pure(Eigen::Vector3cd(1, 0, 0)); }
    static DensityMatrix excited_a() { return pure(Eigen::Vector3cd(0, 1, 0)); }
    static DensityMatrix excited_b() { return pure(Eigen::Vector3cd(0, 0, 1)); }
    /// ψ_± = (|a⟩ ± |b⟩)/√2
    static DensityMatrix bell(int sign) { return pure(Eigen::Vector3cd(0, 1, sign >= 0 ? 1 : -1)); }

    cplx operator()(int i, int j) const { return rho(i, j); }

    void validate(double herm_tol = 1e-10, double trace_tol = 1e-10, double eig_tol = 1e-8) const
    {
        if (!rho.allFinite())
            throw ValidationError("density matrix has non-finite entries");
        if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > herm_tol)
            throw ValidationError("density matrix is not Hermitian");
        if (std::abs(rho.trace() - 1.0) > trace_tol)
            throw ValidationError("density matrix trace differs from 1");
        const Matrix3 h = 0.5 * (rho + rho.adjoint());
        if (Eigen::SelfAdjointEigenSolver<Matrix3>(h).eigenvalues().minCoeff() < -eig_tol)
            throw ValidationError("density matrix has a negative eigenvalue");
    }
};

inline std::pair<double, double> populations(const DensityMatrix& r)
{
    return {r.rho(level::a, level::a).real(), r.rho(level::b, level::b).real()};
}

/// F_± = ⟨ψ_±|ρ|ψ_±⟩ = (ρ_aa + ρ_bb ± 2 Re ρ_ab)/2
inline double bell_fidelity(const DensityMatrix& r, int sign)
{
    const double s = sign >= 0 ? 1.0 : -1.0;
    return 0.5 * (r.rho(level::a, level::a).real() + r.rho(level::b, level::b).real()
                  + 2.0 * s * r.rho(level::a, level::b).real());
}

inline double purity(const DensityMatrix& r) { return (r.rho * r.rho).trace().real(); }

struct Observables {
    double n_a = 0.0;
    double n_b = 0.0;
    cplx rho_ab;
    cplx rho_ga;
    cplx rho_gb;
    double f_plus = 0.0;
    double f_minus = 0.0;
    double purity = 0.0;

    static Observables of(const DensityMatrix& r)
    {
        Observables o;
        std::tie(o.n_a, o.n_b) = populations(r);
        o.rho_ab = r(level::a, level::b);
        o.rho_ga = r(level::g, level::a);
        o.rho_gb = r(level::g, level::b);
        o.f_plus = bell_fidelity(r, +1);
        o.f_minus = bell_fidelity(r, -1);
        o.purity = avisim::purity(r);
        return o;
    }
};

struct Trajectory {
    std::vector<double> t_ns;
    std::vector<Observables> samples;
    std::vector<Matrix3> states;   // only filled when requested

    static constexpr const char* csv_header =
        "t_ns,n_a,n_b,re_rho_ab,im_rho_ab,re_rho_ga,im_rho_ga,re_rho_gb,im_rho_gb,F_plus,F_minus,purity";

    void write_csv(std::ostream& os) const
    {
        os << csv_header << '\n';
        char buf[64];
        auto put = [&](double v, bool last = false) {
            std::snprintf(buf, sizeof buf, "%.12e", v);
            os << buf << (last ? '\n' : ',');
        };
        for (std::size_t k = 0; k < t_ns.size(); ++k) {
            const Observables& o = samples[k];
            put(t_ns[k]);
            put(o.n_a);
            put(o.n_b);
            put(o.rho_ab.real());
            put(o.rho_ab.imag());
            put(o.rho_ga.real());
            put(o.rho_ga.imag());
            put(o.rho_gb.real());
            put(o.rho_gb.imag());
            put(o.f_plus);
            put(o.f_minus);
            put(o.purity, true);
        }
    }
};

/// Integrates dρ/dt = L ρ from grid[0] and samples on the grid (ns). Every
/// sample is checked for Hermiticity, unit trace and positivity.
inline Trajectory evolve(const DensityMatrix& rho0, const Superoperator& l, std::span<const double> grid,
                         Tolerances tol = {}, bool keep_states = false)
{
    rho0.validate();
    Trajectory traj;
    traj.t_ns.reserve(grid.size());
    traj.samples.reserve(grid.size());
    integrate_linear<9, 1>(l, vectorize(rho0.rho), grid, tol, [&](std::size_t, double t, const Vectorized& x) {
        const DensityMatrix r(unvectorize(x));
        try {
            r.validate();
        } catch (const ValidationError& e) {
            throw IntegrationError(e.what(), t);
        }
        traj.t_ns.push_back(t);
        traj.samples.push_back(Observables::of(r));
        if (keep_states)
            traj.states.push_back(r.rho);
    });
    return traj;
}

/// Evenly spaced grid of `samples` points on [0, t_max].
inline std::vector<double> uniform_grid(double t_max, std::size_t samples)
{
    if (samples < 2 || !(t_max > 0.0))
        throw ValidationError("time grid needs t_max > 0 and at least two samples");
    std::vector<double> grid(samples);
    for (std::size_t k = 0; k < samples; ++k)
        grid[k] = t_max * static_cast<double>(k) / static_cast<double>(samples - 1);
    return grid;
}

/// Largest absolute residual ‖L vec(ρ)‖_∞.
inline double steady_state_residual(const Superoperator& l, const DensityMatrix& r)
{
    return (l * vectorize(r.rho)).cwiseAbs().maxCoeff();
}

/// Dimension of the numerical kernel of L.
inline int kernel_dimension(const Superoperator& l, double rel_tol = 1e-10)
{
    const Eigen::JacobiSVD<Superoperator> svd(l);
    const auto& sv = svd.singularValues();
    if (sv(0) == 0.0)
        return 9;
    return static_cast<int>((sv.array() < rel_tol * sv(0)).count());
}

/// Unique stationary state: least-squares solution of Lρ = 0 with Tr ρ = 1.
inline DensityMatrix steady_state(const Superoperator& l)
{
    const int dim = kernel_dimension(l);
    if (dim > 1)
        throw DegenerateSteadyStateError(
            "non-unique steady state (kernel dimension " + std::to_string(dim)
            + "); add pure dephasing or use long-time propagation instead");

    Eigen::Matrix<cplx, 10, 9> a;
    a.topRows<9>() = l;
    a.row(9).setZero();
    a(9, 0) = a(9, 4) = a(9, 8) = 1.0;
    Eigen::Matrix<cplx, 10, 1> rhs = Eigen::Matrix<cplx, 10, 1>::Zero();
    rhs(9) = 1.0;

    const Vectorized x = a.jacobiSvd(Eigen::ComputeFullU | Eigen::ComputeFullV).solve(rhs);
    Matrix3 rho = unvectorize(x);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    DensityMatrix r(rho);

    const double res = steady_state_residual(l, r);
    if (!(res < 1e-10))
        throw std::runtime_error("steady-state residual " + std::to_string(res) + " exceeds 1e-10");
    return r;
}

struct TrappingState {
    double n_a = 0.0;
    double n_b = 0.0;
    double f_minus = 0.0;
};

/// Undamped g ↔ ψ_− Rabi oscillation of the antisymmetrically pumped dark
/// configuration (Γ_ab = Γ_aa = Γ_bb, Ω_b = −Ω_a = −Ω0, on resonance). The
/// effective coupling ⟨ψ_−|H_p|g⟩ = ħΩ0/√2 gives a Rabi frequency √2 Ω0.
inline TrappingState trapping_oracle(double omega0_rad_s, double t_ns)
{
    const double theta = std::sqrt(2.0) * units::to_per_ns(omega0_rad_s) * t_ns / 2.0;
    const double p = std::sin(theta) * std::sin(theta);
    return {0.5 * p, 0.5 * p, p};
}

/// Rotating-frame Hamiltonian H/ħ in rad/s (no dissipation).
inline Matrix3 rotating_hamiltonian(const VSystem& sys)
{
    using level::a;
    using level::b;
    using level::g;
    Matrix3 h = -sys.detuning_a * ket_bra(a, a) - sys.detuning_b * ket_bra(b, b)
                - sys.rates.delta_ab * ket_bra(a, b) - sys.rates.delta_ba * ket_bra(b, a)
                + 0.5 * sys.omega_a * (ket_bra(g, a) + ket_bra(a, g))
                + 0.5 * sys.omega_b * (ket_bra(g, b) + ket_bra(b, g));
    return h;
}

/// All distinct transition frequencies λ_i − λ_j (rad/s, relative to ω_L) of the
/// dressed rotating-frame Hamiltonian, ascending.
inline std::vector<double> dressed_resonances(const VSystem& sys)
{
    sys.validate();
    const Eigen::Vector3d ev = Eigen::SelfAdjointEigenSolver<Matrix3>(rotating_hamiltonian(sys)).eigenvalues();
    std::vector<double> diffs;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            diffs.push_back(ev(i) - ev(j));
    std::sort(diffs.begin(), diffs.end());

    const double tol = 1e-6 * ev.cwiseAbs().maxCoeff();
    std::vector<double> out;
    for (double d : diffs)
        if (out.empty() || d - out.back() > tol)
            out.push_back(d);
    for (double& d : out)
        if (std::abs(d) <= tol)
            d = 0.0;
    return out;
}

} // namespace avisim
