#include <doctest.h>

#include <cmath>
#include <limits>

#include "spinport/core_model.hpp"

using namespace spinport;

TEST_SUITE_BEGIN("core_model");

TEST_CASE("coherent state has unit variances and the given means")
{
    const auto vacuum = make_coherent_state(0.0, 0.0);
    CHECK(vacuum.var_x == 1.0);
    CHECK(vacuum.var_y == 1.0);
    CHECK(vacuum.cov_xy == 0.0);
    CHECK(vacuum.mean_x == 0.0);

    const auto displaced = make_coherent_state(2.0, -1.0);
    CHECK(displaced.mean_x == 2.0);
    CHECK(displaced.mean_y == -1.0);
    CHECK(displaced.var_x == 1.0);
    CHECK(displaced.var_y == 1.0);

    // Saturates the normalized Heisenberg bound exactly.
    CHECK(displaced.var_x * displaced.var_y - displaced.cov_xy * displaced.cov_xy == 1.0);
}

TEST_CASE("unphysical single-ensemble states are rejected")
{
    GaussianSpinState s;
    s.var_x = 0.0;
    CHECK_THROWS_AS(validate(s), std::invalid_argument);
    s.var_x = 0.5;
    s.var_y = 0.5;
    CHECK_FALSE(is_physical(s));
    CHECK_THROWS_AS(validate(s), std::invalid_argument);
    s.var_x = 2.0;
    s.var_y = 2.0;
    s.cov_xy = 1.9; // det = 0.39 < 1
    CHECK_FALSE(is_physical(s));
    s.cov_xy = 1.0; // det = 3
    CHECK(is_physical(s));
}

TEST_CASE("EPR pair covariances")
{
    SUBCASE("r = 0 gives two uncorrelated coherent states")
    {
        const auto pair = make_epr_pair(0.0);
        CHECK(pair.cov.isApprox(Eigen::MatrixXd::Identity(4, 4)));
        CHECK(pair.means.isZero());
    }
    SUBCASE("r = 0.5")
    {
        const auto pair = make_epr_pair(0.5);
        const double v = std::cosh(1.0);
        const double c = std::sinh(1.0);
        CHECK(pair.cov(0, 0) == doctest::Approx(v).epsilon(1e-15));
        CHECK(pair.cov(2, 2) == doctest::Approx(v).epsilon(1e-15));
        CHECK(pair.cov(0, 2) == doctest::Approx(c).epsilon(1e-15));
        CHECK(pair.cov(1, 3) == doctest::Approx(-c).epsilon(1e-15));
        CHECK(pair.cov(0, 1) == 0.0);
        CHECK(pair.cov(0, 3) == 0.0);
    }
    SUBCASE("negative r rejected")
    {
        CHECK_THROWS_AS(make_epr_pair(-0.1), std::invalid_argument);
    }
    SUBCASE("covariance stays positive semidefinite across r")
    {
        for (double r = 0.0; r <= 5.0; r += 0.25) {
            const auto pair = make_epr_pair(r);
            CHECK(min_cov_eigenvalue(pair) >= -1e-12);
        }
    }
}

TEST_CASE("inseparability of the EPR pair equals 2 e^{-2r}")
{
    CHECK(inseparability(make_epr_pair(0.0), "2", "3") == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(inseparability(make_epr_pair(0.5), "2", "3") ==
          doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));

    for (double r = 0.0; r <= 5.0; r += 0.25) {
        const auto pair = make_epr_pair(r);
        const double expected = 2.0 * std::exp(-2.0 * r);
        // machine precision relative to the stored covariance scale: the
        // difference of cosh(2r)-sized entries cannot resolve below its ulp
        const double tol = 1e-12 * std::max(1.0, std::cosh(2.0 * r));
        CHECK(std::abs(inseparability(pair, "2", "3") - expected) <= tol);
        // invariant under exchanging the two labels
        CHECK(inseparability(pair, "3", "2") == inseparability(pair, "2", "3"));
    }

    // large r limit: perfect EPR entanglement drives the witness to 0
    CHECK(inseparability(make_epr_pair(8.0), "2", "3") < 1e-6);
}

TEST_CASE("unknown labels are rejected")
{
    const auto pair = make_epr_pair(0.3);
    CHECK_THROWS_AS(inseparability(pair, "2", "7"), std::invalid_argument);
    CHECK_THROWS_AS(pair.marginal("nope"), std::invalid_argument);
}

TEST_CASE("joint-state validation catches broken covariances")
{
    auto pair = make_epr_pair(0.5);
    SUBCASE("asymmetric")
    {
        pair.cov(0, 2) += 1e-3;
        CHECK_THROWS_AS(validate(pair), std::invalid_argument);
    }
    SUBCASE("not positive semidefinite")
    {
        pair.cov(0, 2) = 10.0;
        pair.cov(2, 0) = 10.0;
        CHECK_THROWS_AS(validate(pair), std::invalid_argument);
    }
    SUBCASE("marginal below the Heisenberg bound")
    {
        pair.cov(0, 0) = 0.25;
        pair.cov(0, 2) = 0.0;
        pair.cov(2, 0) = 0.0;
        CHECK_THROWS_AS(validate(pair), std::invalid_argument);
    }
}

TEST_CASE("marginals of the EPR pair")
{
    const auto pair = make_epr_pair(1.0);
    const auto m = pair.marginal("3");
    CHECK(m.var_x == doctest::Approx(std::cosh(2.0)).epsilon(1e-15));
    CHECK(m.var_y == doctest::Approx(std::cosh(2.0)).epsilon(1e-15));
    CHECK(m.cov_xy == 0.0);
    CHECK(is_physical(m));
}

TEST_CASE("small-tilt advisory")
{
    // tilt ~ 1e-3 of N/2: fine
    CHECK(validate_small_tilt(make_coherent_state(1.0, 0.0), 1e6).empty());
    // raw mean = 200 * sqrt(1e4/4) = 1e4 = N, far beyond the threshold
    CHECK(validate_small_tilt(make_coherent_state(200.0, 0.0), 1e4).size() == 1);
    // pole-aligned spin never warns
    CHECK(validate_small_tilt(make_coherent_state(0.0, 0.0), 4.0).empty());
    // both components over threshold -> two warnings
    CHECK(validate_small_tilt(make_coherent_state(200.0, -300.0), 1e4).size() == 2);
    // custom fraction
    CHECK(validate_small_tilt(make_coherent_state(1.0, 0.0), 1e6, 1e-5).size() == 1);
}

TEST_CASE("raw spin unit conversions")
{
    CHECK(raw_mean_from_normalized(2.0, 1e6) == doctest::Approx(1000.0));
    CHECK(raw_variance_from_normalized(1.0, 1e6) == doctest::Approx(2.5e5));
}

TEST_CASE("protocol parameter validation")
{
    ProtocolParams p;
    CHECK_NOTHROW(validate(p));
    p.cooperativity = std::numeric_limits<double>::infinity(); // lossless limit allowed
    CHECK_NOTHROW(validate(p));
    p.cooperativity = -1.0;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p.cooperativity = 100.0;
    p.n_atoms = 0.0;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p.n_atoms = 1e6;
    p.squeezing_r = -0.5;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p.squeezing_r = 1.0;
    p.gamma0 = 0.0;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
}

TEST_CASE("squeezed state helper stays physical")
{
    const auto s = make_squeezed_state(0.5);
    CHECK(s.var_x == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(s.var_y == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
    CHECK(is_physical(s));
}
