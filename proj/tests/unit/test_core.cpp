#include <gtest/gtest.h>

#include "tumour/initial.hpp"
#include "tumour/params.hpp"
#include "tumour/state.hpp"

using namespace tumour;

TEST(Grid, SpacingAndCentres) {
    EXPECT_DOUBLE_EQ(Grid(0, 15, 1500).dx(), 0.01);
    const Grid g(0, 1, 2);
    EXPECT_DOUBLE_EQ(g.centre(0), 0.25);
    EXPECT_DOUBLE_EQ(g.centre(1), 0.75);
    EXPECT_DOUBLE_EQ(g.face(2), 1.0);
    EXPECT_EQ(g.centres().size(), 2);
}

TEST(Grid, RejectsBadIntervals) {
    EXPECT_THROW(Grid(4, 4, 10), std::invalid_argument);
    EXPECT_THROW(Grid(5, 4, 10), std::invalid_argument);
    EXPECT_THROW(Grid(0, 1, 1), std::invalid_argument);
    EXPECT_THROW(Grid(0, std::numeric_limits<double>::infinity(), 10), std::invalid_argument);
}

TEST(Grid, IntegrateAndVariation) {
    const Grid g(0, 2, 4);
    Field f(4);
    f << 1, 3, 2, 2;
    EXPECT_DOUBLE_EQ(integrate(f, g.dx()), 4.0);
    EXPECT_DOUBLE_EQ(total_variation(f), 3.0);
}

TEST(Params, Validation) {
    EXPECT_THROW(make_params(1.5, 1, 1, 1), std::invalid_argument);
    EXPECT_THROW(make_params(10, 0, 1, 1), std::invalid_argument);
    EXPECT_THROW(make_params(10, 1, -1, 1), std::invalid_argument);
    ModelParams p = make_params(10, 1, 2, 1);
    EXPECT_DOUBLE_EQ(p.p_max, 2.0);
    p.p_max = 1.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Initial, BumpNormalisedToUnitMass) {
    const Grid g(0, 15, 1500);
    const Field n = build_initial(InitialProfile::bump(4.5, 6.5, 1.0), g);
    EXPECT_NEAR(integrate(n, g.dx()), 1.0, 1e-12);
    for (Eigen::Index i = 0; i < n.size(); ++i) {
        EXPECT_GE(n[i], 0.0);
        if (g.centre(i) < 4.5 - g.dx() || g.centre(i) > 6.5 + g.dx()) EXPECT_EQ(n[i], 0.0);
    }
    // m w^3 / 6 = 1 with w = 2
    EXPECT_NEAR(n.maxCoeff(), 0.75, 1e-4);
}

TEST(Initial, UnnormalisedVertex) {
    const Grid g(0, 15, 1500);
    const Field n = build_initial(InitialProfile::bump(6, 9, std::nullopt, 1.0), g);
    EXPECT_NEAR(n.maxCoeff(), 2.25, 1e-4);
    Eigen::Index at;
    n.maxCoeff(&at);
    EXPECT_NEAR(g.centre(at), 7.5, g.dx());
}

TEST(Initial, OverlapCase) {
    const Grid g(0, 15, 1500);
    const Field a = build_initial(InitialProfile::bump(6.5, 8.5), g);
    const Field b = build_initial(InitialProfile::bump(6, 9), g);
    for (Eigen::Index i = 0; i < g.cells(); ++i)
        if (g.centre(i) > 6.5 && g.centre(i) < 8.5) EXPECT_GT(a[i] * b[i], 0.0);
}

TEST(Initial, TableProfile) {
    const Grid g(0, 4, 400);
    InitialProfile p;
    p.kind = ProfileKind::custom_table;
    p.table = {{1, 0}, {2, 1}, {3, 0}};
    p.support_left = 1;
    p.support_right = 3;
    p.normalize_mass_to = std::nullopt;
    const Field n = build_initial(p, g);
    EXPECT_NEAR(integrate(n, g.dx()), 1.0, 1e-4);
    p.normalize_mass_to = 3.0;
    EXPECT_NEAR(integrate(build_initial(p, g), g.dx()), 3.0, 1e-12);
}

TEST(Initial, Errors) {
    const Grid g(0, 5, 50);
    EXPECT_THROW(build_initial(InitialProfile::bump(4, 6), g), std::invalid_argument);
    EXPECT_THROW(build_initial(InitialProfile::bump(1, 2, 0.0), g), std::invalid_argument);
}

TEST(State, RoundTripThroughPressureFraction) {
    const Grid g(0, 15, 300);
    const SpeciesState s(g, build_initial(InitialProfile::bump(4.5, 6.5), g),
                         build_initial(InitialProfile::bump(8.5, 10.5), g));
    const PRState pr = to_pressure_fraction(s, 10);
    const SpeciesState back = to_species(pr, 10);
    EXPECT_LT((back.n1 - s.n1).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((back.n2 - s.n2).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(State, VacuumFillNearest) {
    Field r(6);
    r << 0, 1, 0, 0, 0.5, 0;
    Eigen::Array<bool, Eigen::Dynamic, 1> vac(6);
    vac << true, false, true, true, false, true;
    fill_vacuum_fraction(r, vac);
    Field expect(6);
    expect << 1, 1, 1, 0.5, 0.5, 0.5;
    EXPECT_EQ(r, expect);
}
