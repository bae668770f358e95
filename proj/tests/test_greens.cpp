#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "avisim/greens.hpp"

using namespace avisim;

namespace {

const double w0 = units::thz_to_rad_s(200.0);

// Frozen from tests/oracles/rates_oracle.py (mpmath, 40 digits).
constexpr double img_wg_xx = 8.06094239212185e19;
constexpr double img_homog_vac = 3.90720645906722e18;
constexpr double img_cav_q1000 = 1.53846153846154e21;

Eigen::Matrix3d im_part(const GreensTensor& g)
{
    // Anti-Hermitian part (G − G†)/2i, the dissipative piece of the tensor.
    return ((g.m - g.m.adjoint()) / cplx(0.0, 2.0)).real();
}

} // namespace

TEST(PolarizationVector, UnitAndOrthogonalCircularBasis)
{
    const auto r = PolarizationVector::right_circular();
    const auto l = PolarizationVector::left_circular();
    EXPECT_TRUE(r.is_unit());
    EXPECT_TRUE(l.is_unit());
    EXPECT_LT(std::abs(r.inner(l)), 1e-12);
    EXPECT_NEAR(std::abs(r.inner(PolarizationVector::x_hat())), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(ModeField, XPointYPointAndCPoint)
{
    WaveguideSpec s;
    const double amp = 1.0 / std::sqrt(s.eps_b * s.v_eff);

    auto e = mode_field(s).v;
    EXPECT_NEAR(std::abs(e(0) - amp), 0.0, 1e-12 * amp);
    EXPECT_EQ(e(1), cplx(0.0));

    s.alpha = 0.0;
    s.beta = 1.0;
    e = mode_field(s).v;
    EXPECT_EQ(e(0), cplx(0.0));
    EXPECT_NEAR(std::abs(e(1) - amp), 0.0, 1e-12 * amp);

    s.alpha = s.beta = 1.0 / std::sqrt(2.0);
    s.phi = units::pi / 2.0;
    e = mode_field(s).v;
    const Eigen::Vector3cd expect = amp * PolarizationVector::right_circular().v;
    EXPECT_LT((e - expect).norm(), 1e-12 * amp);
}

TEST(ModeField, RejectsBadNormalization)
{
    WaveguideSpec s;
    s.alpha = 0.8;
    s.beta = 0.7;
    EXPECT_THROW(mode_field(s), ValidationError);
}

TEST(WaveguideGreens, XPointClosedForm)
{
    const WaveguideSpec s;
    const GreensTensor g = waveguide_greens(s, w0, 0.0, 0.0);
    const double expect = s.pitch * w0 * s.group_index / (2.0 * units::c * s.eps_b * s.v_eff);
    EXPECT_NEAR(g.m(0, 0).imag(), expect, 1e-12 * expect);
    EXPECT_NEAR(g.m(0, 0).imag(), img_wg_xx, 1e-12 * img_wg_xx);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            EXPECT_EQ(g.m(i, j).real(), 0.0);
            if (i || j) {
                EXPECT_EQ(g.m(i, j).imag(), 0.0);
            }
        }
}

TEST(WaveguideGreens, HalfPeriodSeparationFlipsForwardPhase)
{
    const WaveguideSpec s;
    const GreensTensor same = waveguide_greens(s, w0, 0.0, 0.0);
    const GreensTensor apart = waveguide_greens(s, w0, units::pi / s.k_bloch, 0.0);
    // Coincident points average the two half-weighted directions, which coincide at the X point.
    EXPECT_NEAR(apart.m(0, 0).imag(), -same.m(0, 0).imag(), 1e-9 * same.m(0, 0).imag());
}

TEST(WaveguideGreens, Reciprocity)
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        WaveguideSpec s;
        const double th = 2 * units::pi * u(rng);
        s.alpha = std::cos(th);
        s.beta = std::sin(th);
        s.phi = 2 * units::pi * u(rng);
        const double x = 2e-6 * (u(rng) - 0.5);
        const double xp = 2e-6 * (u(rng) - 0.5);
        const double w = w0 * (0.5 + u(rng));
        const GreensTensor g1 = waveguide_greens(s, w, x, xp);
        const GreensTensor g2 = waveguide_greens(s, w, xp, x);
        const double scale = g1.m.cwiseAbs().maxCoeff();
        EXPECT_LT((g1.m.transpose() - g2.m).cwiseAbs().maxCoeff(), 1e-12 * scale);
    }
}

TEST(Greens, PassivityOfBothGeometries)
{
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        WaveguideSpec ws;
        const double th = units::pi * u(rng);
        ws.alpha = std::cos(th);
        ws.beta = std::sin(th);
        ws.phi = units::pi * u(rng);
        CavitySpec cs;
        cs.q = 100.0 + 5000.0 * std::abs(u(rng));
        cs.polarization = PolarizationVector(cplx(u(rng), u(rng)), cplx(u(rng), u(rng))).normalized();
        const double w = w0 * (1.0 + 0.01 * u(rng));
        const Eigen::Vector3cd d(cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), 0.0);
        for (const GreensTensor& g : {waveguide_greens(ws, w, 0.0, 0.0), cavity_greens(cs, w)}) {
            const double q = d.dot(im_part(g).cast<cplx>() * d).real();
            EXPECT_GE(q, -1e-12 * im_part(g).cwiseAbs().maxCoeff());
        }
    }
}

TEST(CavityGreens, OnResonanceValue)
{
    const CavitySpec s;
    const GreensTensor g = cavity_greens(s, s.omega_c);
    const Eigen::Vector3cd x = PolarizationVector::x_hat().v;
    EXPECT_NEAR(g.project(x, x).imag(), img_cav_q1000, 1e-12 * img_cav_q1000);
    EXPECT_NEAR(g.project(x, x).imag(), s.q * s.eta / (s.v_eff * s.eps_b), 1e-12 * img_cav_q1000);
    EXPECT_LT(std::abs(g.project(x, x).real()), 1e-12 * img_cav_q1000);
}

TEST(CavityGreens, ModeFieldNormalization)
{
    CavitySpec s;
    s.eta = 0.37;
    EXPECT_NEAR(s.mode_field().norm2(), s.eta / (s.v_eff * s.eps_b), 1e-12 * s.eta / (s.v_eff * s.eps_b));
    EXPECT_DOUBLE_EQ(s.decay_rate(), s.omega_c / s.q);
}

TEST(CavityGreens, LorentzianTail)
{
    const CavitySpec s;
    const double w = s.omega_c * 1.2;
    const cplx p = cavity_greens(s, w).m(0, 0);
    EXPECT_NEAR(std::abs(p.imag() / p.real()), w * s.decay_rate() / std::abs(w * w - s.omega_c * s.omega_c), 1e-12);
}

TEST(CavityGreens, OverdampedLimitVanishes)
{
    CavitySpec s;
    s.q = 1e-12;
    const double on_res = CavitySpec{}.q / (s.v_eff * s.eps_b);
    EXPECT_LT(cavity_greens(s, s.omega_c).m.cwiseAbs().maxCoeff(), 1e-12 * on_res);
}

TEST(CavityGreens, LorentzianIntegral)
{
    const CavitySpec s;
    const double gc = s.decay_rate();
    const double h = gc / 50.0;
    const int n = 50 * 400;
    double integral = 0.0;
    for (int k = -n; k <= n; ++k) {
        const double w = s.omega_c + k * h;
        const double wt = (k == -n || k == n) ? 0.5 : 1.0;
        integral += wt * h * cavity_greens(s, w).m(0, 0).imag();
    }
    const double expect = units::pi * s.omega_c * s.mode_field().norm2() / 2.0;
    EXPECT_NEAR(integral / expect, 1.0, 0.01);
}

TEST(HomogeneousGreens, ReferenceValues)
{
    EXPECT_NEAR(homogeneous_im_greens(w0, 1.0), img_homog_vac, 1e-12 * img_homog_vac);
    EXPECT_NEAR(homogeneous_im_greens(w0, std::sqrt(13.0)) / img_homog_vac, std::sqrt(13.0), 1e-12);
    EXPECT_LT(homogeneous_im_greens(1e-3, 1.0), 1e-30);
    EXPECT_THROW(homogeneous_im_greens(w0, 0.9), ValidationError);
}

TEST(Greens, NonPositiveFrequencyRejected)
{
    EXPECT_THROW(waveguide_greens(WaveguideSpec{}, 0.0, 0.0, 0.0), ValidationError);
    EXPECT_THROW(cavity_greens(CavitySpec{}, -1.0), ValidationError);
}

TEST(Greens, CavityIgnoresPositions)
{
    const Reservoir r = CavitySpec{};
    EXPECT_EQ(greens(r, w0, 0.0, 1e-6).m, greens(r, w0).m);
}
