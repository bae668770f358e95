// spectra.hpp: two-time correlations via the quantum regression theorem,
// incoherent emission spectra and peak analysis

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "avisim/dynamics.hpp"
#include "avisim/errors.hpp"
#include "avisim/integrator.hpp"
#include "avisim/units.hpp"

namespace avisim {

/// C_n(τ) on a τ grid (ns). slowest_rate is the smallest non-zero decay rate
/// of the generator (ns^-1), or 0 when unknown.
struct CorrelationSeries {
    std::vector<double> tau_ns;
    std::vector<cplx> values;
    int dipole = level::a;
    double slowest_rate = 0.0;
};

/// Eigenvalues of L in ns^-1.
inline Eigen::Matrix<cplx, 9, 1> liouvillian_spectrum(const Superoperator& l)
{
    return Eigen::ComplexEigenSolver<Superoperator>(l, false).eigenvalues();
}

namespace detail {
inline double zero_mode_tol(const Eigen::Matrix<cplx, 9, 1>& ev)
{
    return 1e-9 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
}
} // namespace detail

/// Smallest |Re λ| over the non-zero eigenvalues of L (ns^-1); 0 if L vanishes
/// or has an undamped oscillating mode.
inline double slowest_decay_rate(const Superoperator& l)
{
    const auto ev = liouvillian_spectrum(l);
    const double tol = detail::zero_mode_tol(ev);
    double slowest = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 9; ++k)
        if (std::abs(ev(k)) > tol)
            slowest = std::min(slowest, std::abs(ev(k).real()) > tol ? std::abs(ev(k).real()) : 0.0);
    return std::isfinite(slowest) ? slowest : 0.0;
}

/// Default correlation span, 20 lifetimes of the slowest mode.
inline double default_tau_max(const Superoperator& l)
{
    const double slow = slowest_decay_rate(l);
    if (!(slow > 0.0))
        throw DegenerateSteadyStateError("generator has an undamped mode; no finite correlation span exists");
    return 20.0 / slow;
}

/// Piecewise-uniform τ grid on [0, tau_max]. The local step resolves every mode
/// still alive at that delay (e^{Re λ τ} > e^-35) with 0.25/|λ|, so fast
/// components are sampled finely early and the grid coarsens once they decay.
inline std::vector<double> auto_tau_grid(const Superoperator& l, double tau_max, double resolution = 0.25)
{
    if (!(tau_max > 0.0) || !std::isfinite(tau_max))
        throw ValidationError("tau_max must be positive and finite");
    const auto ev = liouvillian_spectrum(l);
    const double tol = detail::zero_mode_tol(ev);
    const double h_cap = tau_max / 200.0;

    std::vector<double> grid{0.0};
    double tau = 0.0;
    while (tau < tau_max) {
        double fastest = 0.0;
        for (int k = 0; k < 9; ++k)
            if (std::abs(ev(k)) > tol && ev(k).real() * tau > -35.0)
                fastest = std::max(fastest, std::abs(ev(k)));
        const double h = fastest > 0.0 ? std::min(resolution / fastest, h_cap) : h_cap;
        tau = std::min(tau + h, tau_max);
        if (tau_max - tau < 1e-9 * h)
            tau = tau_max;
        grid.push_back(tau);
    }
    return grid;
}

namespace detail {
/// Advances x(0) along the τ grid with one-step propagators e^{Lh}, each built
/// once per distinct step by the adaptive integrator, and reads out x_gn.
inline CorrelationSeries propagate_readout(const Superoperator& l, Matrix3 x0, int n, std::span<const double> tau,
                                           Tolerances tol)
{
    if (n != level::a && n != level::b)
        throw ValidationError("dipole label must be a or b");
    detail::validate_grid(tau);
    CorrelationSeries out;
    out.dipole = n;
    out.tau_ns.assign(tau.begin(), tau.end());
    out.values.assign(tau.size(), cplx(0.0));

    const double scale = x0.cwiseAbs().maxCoeff();
    if (scale == 0.0)
        return out;
    const int idx = level::g + 3 * n;
    Vectorized x = vectorize(x0 / scale);
    if (tau.front() != 0.0)
        x = propagator<9>(l, tau.front(), tol) * x;
    out.values[0] = scale * x(idx);

    double h_cached = -1.0;
    Superoperator step;
    for (std::size_t k = 1; k < tau.size(); ++k) {
        const double h = tau[k] - tau[k - 1];
        if (std::abs(h - h_cached) > 1e-12 * h) {
            step = propagator<9>(l, h, tol);
            h_cached = h;
        }
        x = step * x;
        if (!x.allFinite())
            throw IntegrationError("non-finite correlation", tau[k]);
        out.values[k] = scale * x(idx);
    }
    return out;
}
} // namespace detail

/// C_n(τ) = Tr[σ_ng e^{Lτ}(σ_gn ρ_ss)] − ⟨σ_ng⟩⟨σ_gn⟩. The coherent part is
/// removed before propagation: x(0) = σ_gn ρ_ss − ρ_ss,ng ρ_ss, read out as x_gn.
inline CorrelationSeries two_time_correlation(const Superoperator& l, const DensityMatrix& rho_ss, int n,
                                              std::span<const double> tau, Tolerances tol = {1e-12, 1e-14})
{
    rho_ss.validate();
    const double res = steady_state_residual(l, rho_ss);
    if (!(res < 1e-10))
        throw ValidationError("correlation requires a steady state (residual " + std::to_string(res) + ")");
    const Matrix3 x0 = ket_bra(level::g, n) * rho_ss.rho - rho_ss(n, level::g) * rho_ss.rho;
    CorrelationSeries c = detail::propagate_readout(l, x0, n, tau, tol);
    c.slowest_rate = slowest_decay_rate(l);
    return c;
}

/// ⟨σ_ng(τ) σ_gn(0)⟩ for an emitter released from ρ0 at τ = 0 (no steady state
/// involved). Used for the spontaneous-emission line of an undriven exciton.
inline CorrelationSeries emission_correlation(const Superoperator& l, const DensityMatrix& rho0, int n,
                                              std::span<const double> tau, Tolerances tol = {1e-12, 1e-14})
{
    rho0.validate();
    CorrelationSeries c = detail::propagate_readout(l, ket_bra(level::g, n) * rho0.rho, n, tau, tol);
    c.slowest_rate = slowest_decay_rate(l);
    return c;
}

namespace detail {
/// ∫₀¹ e^{θs} ds and ∫₀¹ s e^{θs} ds.
inline std::pair<cplx, cplx> filon_moments(cplx theta)
{
    if (std::abs(theta) < 1e-2) {
        cplx m0 = 0.0, m1 = 0.0, pow = 1.0;
        double fact = 1.0;
        for (int k = 0; k < 8; ++k) {
            if (k > 0) {
                pow *= theta;
                fact *= k;
            }
            m0 += pow / (fact * (k + 1));
            m1 += pow / (fact * (k + 2));
        }
        return {m0, m1};
    }
    const cplx e = std::exp(theta);
    return {(e - 1.0) / theta, (e * (theta - 1.0) + 1.0) / (theta * theta)};
}

/// Re ∫₀^{τ_max} C(τ) e^{−iντ} dτ for several series sharing one τ grid.
/// C is interpolated linearly between samples and every interval is integrated
/// exactly against the oscillating kernel, which reduces to the trapezoidal
/// rule at ν = 0.
inline std::vector<std::vector<double>> filon_transform(std::span<const double> t,
                                                        const std::vector<const std::vector<cplx>*>& series,
                                                        std::span<const double> nu_per_ns)
{
    if (t.size() < 2)
        throw ValidationError("correlation series needs at least two samples");
    for (const auto* y : series)
        if (y->size() != t.size())
            throw ValidationError("correlation values and tau grid differ in length");

    const std::size_t ns = series.size();
    std::vector<std::vector<double>> out(ns, std::vector<double>(nu_per_ns.size()));
    std::vector<cplx> acc(ns);
    for (std::size_t w = 0; w < nu_per_ns.size(); ++w) {
        const double nu = nu_per_ns[w];
        std::fill(acc.begin(), acc.end(), cplx(0.0));
        double h_prev = -1.0;
        cplx wl, wr, step;
        cplx phase;
        for (std::size_t j = 0; j + 1 < t.size(); ++j) {
            const double h = t[j + 1] - t[j];
            if (std::abs(h - h_prev) > 1e-9 * h) {
                const cplx theta(0.0, -nu * h);
                const auto [m0, m1] = filon_moments(theta);
                wl = h * (m0 - m1);
                wr = h * m1;
                step = std::exp(theta);
                h_prev = h;
            }
            if ((j & 1023) == 0)
                phase = std::polar(1.0, -nu * t[j]);
            const cplx pl = phase * wl;
            const cplx pr = phase * wr;
            for (std::size_t s = 0; s < ns; ++s)
                acc[s] += pl * (*series[s])[j] + pr * (*series[s])[j + 1];
            phase *= step;
        }
        for (std::size_t s = 0; s < ns; ++s)
            out[s][w] = acc[s].real();
    }
    return out;
}
} // namespace detail

/// Re ∫₀^{τ_max} C(τ) e^{−iντ} dτ for each ν (rad/ns).
inline std::vector<double> fourier_half(const CorrelationSeries& c, std::span<const double> nu_per_ns)
{
    return detail::filon_transform(c.tau_ns, {&c.values}, nu_per_ns).front();
}

/// Incoherent spectra of both dipoles on a common detuning grid ω − ω_L (µeV).
struct Spectrum {
    std::vector<double> detuning_ueV;
    std::vector<double> s_a;
    std::vector<double> s_b;
    double tau_max_ns = 0.0;
    double resolution_ueV = 0.0;   // ħπ/τ_max
    std::string warning;

    void write_csv(std::ostream& os) const
    {
        os << "detuning_ueV,S_a,S_b\n";
        char buf[128];
        for (std::size_t k = 0; k < detuning_ueV.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e\n", detuning_ueV[k], s_a[k], s_b[k]);
            os << buf;
        }
    }
};

/// Evenly spaced detunings on [−half_width, +half_width] µeV.
inline std::vector<double> detuning_grid(double half_width_ueV, std::size_t points)
{
    if (!(half_width_ueV > 0.0) || points < 3)
        throw ValidationError("spectral window must be positive with at least three points");
    std::vector<double> g(points);
    for (std::size_t k = 0; k < points; ++k)
        g[k] = -half_width_ueV + 2.0 * half_width_ueV * static_cast<double>(k) / static_cast<double>(points - 1);
    return g;
}

/// One dipole's S(ν) on a µeV grid, annotating `warning` when τ_max does not
/// cover 20 lifetimes of the slowest mode.
inline std::vector<double> incoherent_spectrum(const CorrelationSeries& c, std::span<const double> detuning_ueV,
                                               std::string* warning = nullptr)
{
    std::vector<double> nu(detuning_ueV.size());
    for (std::size_t k = 0; k < nu.size(); ++k)
        nu[k] = detuning_ueV[k] / units::hbar_ueV_ns;
    if (warning && c.slowest_rate > 0.0 && c.tau_ns.back() < 20.0 / c.slowest_rate * (1.0 - 1e-12)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "tau_max = %.6g ns is shorter than 20 lifetimes of the slowest mode (%.6g ns)",
                      c.tau_ns.back(), 20.0 / c.slowest_rate);
        *warning = buf;
    }
    return fourier_half(c, nu);
}

/// Spectra of both dipoles in the steady state of L.
inline Spectrum steady_state_spectrum(const Superoperator& l, std::span<const double> detuning_ueV,
                                      double tau_max_ns = 0.0)
{
    const DensityMatrix rho_ss = steady_state(l);
    const double tau_max = tau_max_ns > 0.0 ? tau_max_ns : default_tau_max(l);
    const std::vector<double> tau = auto_tau_grid(l, tau_max);

    Spectrum s;
    s.detuning_ueV.assign(detuning_ueV.begin(), detuning_ueV.end());
    s.tau_max_ns = tau_max;
    s.resolution_ueV = units::hbar_ueV_ns * units::pi / tau_max;
    const CorrelationSeries ca = two_time_correlation(l, rho_ss, level::a, tau);
    const CorrelationSeries cb = two_time_correlation(l, rho_ss, level::b, tau);
    if (ca.slowest_rate > 0.0 && tau_max < 20.0 / ca.slowest_rate * (1.0 - 1e-12))
        s.warning = "tau_max is shorter than 20 lifetimes of the slowest mode";

    std::vector<double> nu(detuning_ueV.size());
    for (std::size_t k = 0; k < nu.size(); ++k)
        nu[k] = detuning_ueV[k] / units::hbar_ueV_ns;
    auto both = detail::filon_transform(tau, {&ca.values, &cb.values}, nu);
    s.s_a = std::move(both[0]);
    s.s_b = std::move(both[1]);
    return s;
}

// ---------------------------------------------------------------------------
// Peak analysis.

struct Peak {
    double position_ueV = 0.0;
    double height = 0.0;
    double fwhm_ueV = 0.0;
};

enum class PeakClass { singlet, triplet, quintuplet, other };

inline std::string_view to_string(PeakClass c)
{
    switch (c) {
    case PeakClass::singlet: return "singlet";
    case PeakClass::triplet: return "triplet";
    case PeakClass::quintuplet: return "quintuplet";
    case PeakClass::other: return "other";
    }
    return "other";
}

struct PeakList {
    std::vector<Peak> peaks;

    PeakClass classification() const
    {
        switch (peaks.size()) {
        case 1: return PeakClass::singlet;
        case 3: return PeakClass::triplet;
        case 5: return PeakClass::quintuplet;
        default: return PeakClass::other;
        }
    }

    void write_rows(std::ostream& os) const
    {
        os << "peak,position_ueV,height,fwhm_ueV\n";
        char buf[128];
        for (std::size_t k = 0; k < peaks.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%zu,%.12e,%.12e,%.12e\n", k, peaks[k].position_ueV, peaks[k].height,
                          peaks[k].fwhm_ueV);
            os << buf;
        }
    }
};

/// Local maxima whose topographic prominence is at least threshold·max(S).
/// Positions and heights are refined by a three-point parabola; FWHM comes from
/// linearly interpolated half-height crossings.
inline PeakList find_peaks(std::span<const double> x, std::span<const double> y, double threshold = 0.01)
{
    if (x.size() != y.size())
        throw ValidationError("peak search needs matching grids");
    PeakList out;
    const std::size_t n = y.size();
    if (n < 3)
        return out;
    const double ymax = *std::max_element(y.begin(), y.end());
    if (!(ymax > 0.0))
        return out;

    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(y[i] > y[i - 1] && y[i] >= y[i + 1]))
            continue;
        double left_min = y[i];
        std::size_t j = i;
        while (j > 0 && y[j - 1] <= y[i]) {
            --j;
            left_min = std::min(left_min, y[j]);
        }
        double right_min = y[i];
        std::size_t k = i;
        while (k + 1 < n && y[k + 1] <= y[i]) {
            ++k;
            right_min = std::min(right_min, y[k]);
        }
        if (y[i] - std::max(left_min, right_min) < threshold * ymax)
            continue;

        Peak p;
        const double dx = x[i + 1] - x[i];
        const double curv = y[i - 1] - 2.0 * y[i] + y[i + 1];
        const double off = curv != 0.0 ? 0.5 * (y[i - 1] - y[i + 1]) / curv : 0.0;
        p.position_ueV = x[i] + off * dx;
        p.height = y[i] - 0.25 * (y[i - 1] - y[i + 1]) * off;

        const double half = 0.5 * p.height;
        double xl = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t m = i; m > 0; --m)
            if (y[m - 1] < half) {
                xl = x[m - 1] + (half - y[m - 1]) / (y[m] - y[m - 1]) * (x[m] - x[m - 1]);
                break;
            }
        double xr = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t m = i; m + 1 < n; ++m)
            if (y[m + 1] < half) {
                xr = x[m] + (y[m] - half) / (y[m] - y[m + 1]) * (x[m + 1] - x[m]);
                break;
            }
        if (std::isnan(xl) && std::isnan(xr))
            p.fwhm_ueV = x.back() - x.front();
        else if (std::isnan(xl))
            p.fwhm_ueV = 2.0 * (xr - p.position_ueV);
        else if (std::isnan(xr))
            p.fwhm_ueV = 2.0 * (p.position_ueV - xl);
        else
            p.fwhm_ueV = xr - xl;
        p.fwhm_ueV = std::max(p.fwhm_ueV, std::abs(dx));
        out.peaks.push_back(p);
    }
    return out;
}

} // namespace avisim
