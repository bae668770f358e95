#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "avisim/dynamics.hpp"
#include "reference_me.hpp"

using namespace avisim;

namespace {

const double w0 = units::thz_to_rad_s(200.0);

/// Rates in ns^-1 turned into a VSystem.
VSystem two_dipoles(double gaa, double gbb, double gab, double delta = 0.0)
{
    VSystem v;
    v.rates.gamma_aa = gaa * 1e9;
    v.rates.gamma_bb = gbb * 1e9;
    v.rates.gamma_ab = v.rates.gamma_ba = gab * 1e9;
    v.rates.delta_ab = v.rates.delta_ba = delta * 1e9;
    return v;
}

VSystem xpoint_waveguide()
{
    VSystem v;
    v.rates = rate_set(DipolePair::circular(50.0), WaveguideSpec{}, w0, w0);
    return v;
}

VSystem random_system(std::mt19937& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double ga = 0.5 + 1.5 * u(rng), gb = 0.5 + 1.5 * u(rng);
    VSystem v = two_dipoles(ga, gb, (1.8 * u(rng) - 0.9) * std::sqrt(ga * gb), 2.0 * u(rng) - 1.0);
    v.detuning_a = (2.0 * u(rng) - 1.0) * 1e9;
    v.detuning_b = (2.0 * u(rng) - 1.0) * 1e9;
    v.omega_a = (0.2 + 1.8 * u(rng)) * 1e9;
    v.omega_b = (2.0 * u(rng) - 1.0) * 1e9;
    v.dephasing_a = 0.5 * u(rng) * 1e9;
    v.dephasing_b = 0.5 * u(rng) * 1e9;
    return v;
}

} // namespace

TEST(Liouvillian, TracePreserving)
{
    std::mt19937 rng(1);
    for (int k = 0; k < 20; ++k) {
        const Superoperator l = liouvillian(random_system(rng));
        const double leak = (l.row(0) + l.row(4) + l.row(8)).cwiseAbs().maxCoeff();
        EXPECT_LT(leak, 1e-12);
    }
}

TEST(Liouvillian, MatchesOperatorForm)
{
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        const VSystem v = random_system(rng);
        Matrix3 x;
        for (int i = 0; i < 9; ++i)
            x.data()[i] = cplx(u(rng), u(rng));
        const Matrix3 a = unvectorize(liouvillian(v) * vectorize(x));
        const Matrix3 b = ref::rhs(ref::Params::from(v), x);
        EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Liouvillian, SingleExcitonDecay)
{
    const double g = 1.7;
    const Superoperator l = liouvillian(two_dipoles(g, g, 0.0));
    const auto grid = uniform_grid(5.0, 51);
    const Trajectory t = evolve(DensityMatrix::excited_a(), l, grid);
    for (std::size_t k = 0; k < grid.size(); ++k)
        EXPECT_NEAR(t.samples[k].n_a, std::exp(-g * grid[k]), 1e-8);
}

TEST(Liouvillian, DissipatorAnnihilatesAntisymmetricState)
{
    VSystem v = two_dipoles(2.0, 2.0, 2.0);
    const Superoperator dissipative = liouvillian(v);
    const DensityMatrix dark = DensityMatrix::bell(-1);
    EXPECT_LT((dissipative * vectorize(dark.rho)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Liouvillian, RejectsNonReciprocalOrNegativeDephasing)
{
    VSystem v = two_dipoles(1.0, 1.0, 0.5);
    v.rates.gamma_ba = 0.0;
    EXPECT_THROW(liouvillian(v), ValidationError);
    VSystem w = two_dipoles(1.0, 1.0, 0.5);
    w.dephasing_a = -1.0;
    EXPECT_THROW(liouvillian(w), ValidationError);
}

TEST(Evolve, SuperradiantSymmetricState)
{
    const VSystem v = xpoint_waveguide();
    const double g = units::to_per_ns(v.rates.gamma_aa);
    const auto grid = uniform_grid(5.0 / g, 201);
    const Trajectory t = evolve(DensityMatrix::bell(+1), liouvillian(v), grid);
    for (std::size_t k = 0; k < grid.size(); ++k)
        EXPECT_NEAR(t.samples[k].n_a + t.samples[k].n_b, std::exp(-2.0 * g * grid[k]), 1e-8);
}

TEST(Evolve, DarkAntisymmetricState)
{
    const VSystem v = xpoint_waveguide();
    const double g = units::to_per_ns(v.rates.gamma_aa);
    const Trajectory t = evolve(DensityMatrix::bell(-1), liouvillian(v), uniform_grid(10.0 / g, 201));
    for (const auto& o : t.samples) {
        EXPECT_LT(std::abs(o.n_a - 0.5), 1e-8);
        EXPECT_LT(std::abs(o.n_b - 0.5), 1e-8);
        EXPECT_NEAR(o.f_minus, 1.0, 1e-8);
    }
}

TEST(Evolve, SingleExcitationPlateau)
{
    const VSystem v = xpoint_waveguide();
    const double g = units::to_per_ns(v.rates.gamma_aa);
    const Trajectory t = evolve(DensityMatrix::excited_a(), liouvillian(v), uniform_grid(20.0 / g, 101));
    EXPECT_NEAR(t.samples.back().n_a, 0.25, 1e-8);
    EXPECT_NEAR(t.samples.back().n_b, 0.25, 1e-8);
}

TEST(Evolve, RandomDrawsKeepDensityMatrixInvariants)
{
    std::mt19937 rng(17);
    for (int k = 0; k < 30; ++k) {
        const Trajectory t = evolve(DensityMatrix::ground(), liouvillian(random_system(rng)), uniform_grid(8.0, 161));
        for (const auto& o : t.samples) {
            EXPECT_GE(o.n_a, -1e-10);
            EXPECT_GE(o.n_b, -1e-10);
            EXPECT_LE(o.n_a + o.n_b, 1.0 + 1e-8);
            EXPECT_LE(o.f_plus, 1.0 + 1e-8);
            EXPECT_LE(o.f_minus, 1.0 + 1e-8);
            EXPECT_GE(o.f_minus, -1e-10);
            EXPECT_LE(o.purity, 1.0 + 1e-8);
        }
    }
}

TEST(Evolve, AgreesWithReferenceIntegrator)
{
    std::mt19937 rng(23);
    for (int k = 0; k < 10; ++k) {
        const VSystem v = random_system(rng);
        const Trajectory t = evolve(DensityMatrix::excited_a(), liouvillian(v), std::vector<double>{0.0, 3.0}, {1e-11, 1e-13},
                                    true);
        const ref::M3 r = ref::rk4(ref::Params::from(v), DensityMatrix::excited_a().rho, 3.0, 6000);
        EXPECT_LT((t.states.back() - r).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(Evolve, IndependentDipolesStayUncorrelated)
{
    VSystem v = two_dipoles(1.3, 0.8, 0.0);
    v.omega_a = 0.9e9;
    v.omega_b = -1.4e9;
    v.detuning_a = 0.3e9;
    const Trajectory t = evolve(DensityMatrix::ground(), liouvillian(v), uniform_grid(10.0, 101));
    VSystem only_a = v;
    only_a.omega_b = 0.0;
    const Trajectory ta = evolve(DensityMatrix::ground(), liouvillian(only_a), uniform_grid(10.0, 101));
    for (const auto& o : ta.samples)
        EXPECT_LT(std::abs(o.rho_ab), 1e-10);
    EXPECT_GT(std::abs(t.samples.back().rho_ab), 0.0);
}

TEST(Evolve, RejectsBadGridAndReportsBlowUp)
{
    const Superoperator l = liouvillian(two_dipoles(1.0, 1.0, 0.0));
    EXPECT_THROW(evolve(DensityMatrix::ground(), l, std::vector<double>{0.0, 1.0, 1.0}), ValidationError);
    EXPECT_THROW(evolve(DensityMatrix::ground(), l, std::vector<double>{}), ValidationError);

    Superoperator bad = Superoperator::Identity() * 1e300;
    try {
        evolve(DensityMatrix::excited_a(), bad, std::vector<double>{0.0, 10.0});
        FAIL() << "expected an integration failure";
    } catch (const IntegrationError& e) {
        EXPECT_GE(e.time_ns(), 0.0);
    }
}

TEST(Integrator, FixedStepRk4IsFourthOrder)
{
    Eigen::Matrix<cplx, 2, 2> a;
    a << cplx(-0.3, 1.0), 0.5, -0.5, cplx(-0.1, -2.0);
    const Eigen::Matrix<cplx, 2, 1> x0(1.0, 0.0);
    Eigen::Matrix<cplx, 2, 2> p = propagator<2>(a, 2.0, {1e-13, 1e-15});
    const Eigen::Matrix<cplx, 2, 1> exact = p * x0;
    const double e1 = (integrate_linear_fixed<2>(a, x0, 2.0, 40) - exact).norm();
    const double e2 = (integrate_linear_fixed<2>(a, x0, 2.0, 80) - exact).norm();
    EXPECT_NEAR(e1 / e2, 16.0, 2.0);
}

TEST(SteadyState, NoPumpIsGround)
{
    const DensityMatrix r = steady_state(liouvillian(two_dipoles(1.0, 2.0, 0.5)));
    EXPECT_NEAR(r(0, 0).real(), 1.0, 1e-12);
    EXPECT_LT(steady_state_residual(liouvillian(two_dipoles(1.0, 2.0, 0.5)), r), 1e-10);
}

TEST(SteadyState, TrappingWithoutDephasingIsDegenerate)
{
    VSystem v = two_dipoles(2.0, 2.0, 2.0);
    v.omega_a = 1e9;
    v.omega_b = -1e9;
    EXPECT_GT(kernel_dimension(liouvillian(v)), 1);
    EXPECT_THROW(steady_state(liouvillian(v)), DegenerateSteadyStateError);
    v.dephasing_a = v.dephasing_b = 0.1e9;
    EXPECT_NO_THROW(steady_state(liouvillian(v)));
}

TEST(SteadyState, WeakPumpTwoLevelSector)
{
    const double g = 2.0, om = 0.02;
    VSystem v = two_dipoles(g, g, 0.0);
    v.omega_a = om * 1e9;
    const DensityMatrix r = steady_state(liouvillian(v));
    EXPECT_NEAR(r(1, 1).real(), om * om / (g * g + 2 * om * om), 1e-12);
    EXPECT_NEAR(r(1, 1).real() / (om * om / (g * g)), 1.0, 1e-3);

    const ref::M3 brute = ref::rk4(ref::Params::from(v), DensityMatrix::ground().rho, 30.0, 30000);
    EXPECT_NEAR(brute(1, 1).real(), r(1, 1).real(), 1e-10);
}

TEST(Observables, FidelityAndPurity)
{
    const DensityMatrix dark = DensityMatrix::bell(-1);
    EXPECT_NEAR(bell_fidelity(dark, -1), 1.0, 1e-15);
    EXPECT_NEAR(bell_fidelity(dark, +1), 0.0, 1e-15);
    EXPECT_NEAR(bell_fidelity(DensityMatrix::excited_a(), +1), 0.5, 1e-15);
    EXPECT_NEAR(bell_fidelity(DensityMatrix::excited_a(), -1), 0.5, 1e-15);
    const DensityMatrix mix(0.5 * dark.rho + 0.5 * DensityMatrix::ground().rho);
    EXPECT_NEAR(bell_fidelity(mix, -1), 0.5, 1e-15);
    EXPECT_NEAR(purity(mix), 0.5, 1e-15);
}

TEST(DensityMatrix, Validation)
{
    Matrix3 m = DensityMatrix::ground().rho;
    m(0, 1) = 0.1;
    EXPECT_THROW(DensityMatrix(m).validate(), ValidationError);
    EXPECT_THROW(DensityMatrix(2.0 * DensityMatrix::ground().rho).validate(), ValidationError);
    Matrix3 neg = Matrix3::Zero();
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    EXPECT_THROW(DensityMatrix(neg).validate(), ValidationError);
}

TEST(TrappingOracle, ClosedFormValues)
{
    const auto z = trapping_oracle(units::from_ueV(10.0), 0.0);
    EXPECT_EQ(z.n_a, 0.0);
    EXPECT_EQ(z.f_minus, 0.0);
    const double om = units::from_ueV(10.0);
    const double t_half = units::pi / (std::sqrt(2.0) * units::to_per_ns(om));
    const auto full = trapping_oracle(om, t_half);
    EXPECT_NEAR(full.n_a, 0.5, 1e-15);
    EXPECT_NEAR(full.f_minus, 1.0, 1e-15);
    EXPECT_NEAR(2.0 * t_half, 0.292435867300284, 1e-12);
}

TEST(TrappingOracle, MatchesFullMasterEquation)
{
    VSystem v = xpoint_waveguide();
    const double om = units::from_ueV(10.0);
    v.omega_a = om;
    v.omega_b = -om;
    const double period = 2.0 * units::pi / (std::sqrt(2.0) * units::to_per_ns(om));
    const auto grid = uniform_grid(20.0 * period, 2001);
    const Trajectory t = evolve(DensityMatrix::ground(), liouvillian(v), grid, {1e-10, 1e-12});
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto o = trapping_oracle(om, grid[k]);
        EXPECT_NEAR(t.samples[k].n_a, o.n_a, 1e-6);
        EXPECT_NEAR(t.samples[k].n_b, o.n_b, 1e-6);
        EXPECT_NEAR(t.samples[k].f_minus, o.f_minus, 1e-6);
    }
}

TEST(DressedResonances, SinglePumpQuintuplet)
{
    VSystem v = two_dipoles(1.0, 1.0, 0.0);
    v.omega_a = units::from_ueV(180.0);
    const auto lines = dressed_resonances(v);
    ASSERT_EQ(lines.size(), 5u);
    const double expect[] = {-180.0, -90.0, 0.0, 90.0, 180.0};
    for (int k = 0; k < 5; ++k)
        EXPECT_NEAR(units::to_ueV(lines[k]), expect[k], 1e-9);
}

TEST(DressedResonances, AntisymmetricPumpTriplet)
{
    VSystem v = two_dipoles(1.0, 1.0, 1.0);
    v.omega_a = units::from_ueV(10.0);
    v.omega_b = -units::from_ueV(10.0);
    const auto lines = dressed_resonances(v);
    ASSERT_EQ(lines.size(), 5u);
    EXPECT_NEAR(units::to_ueV(lines.back()), 10.0 * std::sqrt(2.0), 1e-9);
    EXPECT_NEAR(units::to_ueV(lines[3]), 10.0 / std::sqrt(2.0), 1e-9);
}

TEST(Trajectory, CsvFormat)
{
    Trajectory t = evolve(DensityMatrix::excited_a(), liouvillian(two_dipoles(1.0, 1.0, 0.0)), uniform_grid(1.0, 3));
    std::ostringstream os;
    t.write_csv(os);
    std::istringstream is(os.str());
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    EXPECT_EQ(header, "t_ns,n_a,n_b,re_rho_ab,im_rho_ab,re_rho_ga,im_rho_ga,re_rho_gb,im_rho_gb,F_plus,F_minus,purity");
    EXPECT_EQ(row.substr(0, 19), "0.000000000000e+00,");
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), 11);
}
