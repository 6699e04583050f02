#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oqsd/errors.hpp"
#include "oqsd/nonmarkov.hpp"
#include "oqsd/tomography.hpp"

using namespace oqsd;
using std::numbers::pi;

TEST_CASE("sigma sign tracks inflow and outflow") {
  BlochState a(1, 0, 0), b(-1, 0, 0);
  CHECK(sigma(Identity{}, a, b, 1.0) == doctest::Approx(0.0).epsilon(1e-9));
  ModelSpec spin = CentralSpin{1, 0.5};
  // D(t) = |cos t|: falling before pi/2, rising after.
  CHECK(sigma(spin, a, b, 3.0 * pi / 4.0) ==
        doctest::Approx(std::sin(3.0 * pi / 4.0)).epsilon(1e-6));
  CHECK(sigma(spin, a, b, pi / 4.0) ==
        doctest::Approx(-std::sin(pi / 4.0)).epsilon(1e-6));
  CHECK_THROWS_AS(sigma(spin, a, b, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("first return time of the map") {
  CHECK(find_tau(DampedCosine{1.0, 100.0}, 0.5, 1.0) ==
        doctest::Approx(0.0568).epsilon(1e-2));
  CHECK(find_tau(DampedCosine{1.0, 50.0}, 0.5, 1.0) ==
        doctest::Approx(0.1169).epsilon(1e-2));
  CHECK(find_tau(CentralSpin{1, 0.5}, 1e-3, 50.0) ==
        doctest::Approx(6.252).epsilon(2e-3));

  // The damped map never gets this close to the identity again.
  try {
    find_tau(DampedCosine{1.0, 100.0}, 1e-4, 3.0);
    FAIL("expected NotFoundError");
  } catch (const NotFoundError& e) {
    CHECK(e.best > 1e-4);
  }
}

TEST_CASE("tau is monotone in the tolerance") {
  for (const ModelSpec& m : {ModelSpec(CentralSpin{1, 0.5}),
                             ModelSpec(DampedCosine{1.0, 100.0}),
                             ModelSpec(QuasiPeriodicThreeSpin{})}) {
    double horizon = std::holds_alternative<QuasiPeriodicThreeSpin>(m)
                         ? 60.0
                         : 50.0;
    // The damped-cosine map never gets closer to identity than ~0.18 in the
    // entrywise norm, so its tolerance ladder stays above that floor.
    bool damped = std::holds_alternative<DampedCosine>(m);
    std::vector<double> ladder = damped ? std::vector<double>{0.5, 0.3, 0.2}
                                        : std::vector<double>{0.5, 0.1, 0.05};
    double prev = -1.0;
    for (double eps : ladder) {
      double tau = find_tau(m, eps, horizon);
      CHECK(tau >= prev - 1e-9);
      prev = tau;
    }
  }
}

TEST_CASE("windowed inflow sum") {
  BlochState a(1, 0, 0), b(-1, 0, 0);
  CHECK(blp_windowed(Identity{}, a, b, 5.0, 0.005) ==
        doctest::Approx(0.0).epsilon(1e-12));
  // One full rise of the cos^2 envelope over a period (even N).
  CHECK(blp_windowed(CentralSpin{2, 0.5}, a, b, pi * std::sqrt(2.0), 0.002) ==
        doctest::Approx(1.0).epsilon(1e-6));
  // Two rises of |cos t| over a period (odd N).
  CHECK(blp_windowed(CentralSpin{1, 0.5}, a, b, 2.0 * pi, 0.002) ==
        doctest::Approx(2.0).epsilon(1e-6));
  CHECK_THROWS_AS(blp_windowed(Identity{}, a, b, 5.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("inflow windows sit where the envelope rises") {
  // sigma > 0 exactly on [T/2, T] per period of the cos^N envelope,
  // plus the second half of |cos| periods for odd N.
  BlochState a(1, 0, 0), b(-1, 0, 0);
  for (int n : {1, 2, 3}) {
    ModelSpec m = CentralSpin{n, 0.5};
    double root_n = std::sqrt(double(n));
    auto expect_rising = [&](double t) {
      double phase = std::fmod(t / root_n, pi);
      return phase > pi / 2.0;
    };
    for (int i = 1; i < 120; ++i) {
      double t = 2.0 * pi * root_n * double(i) / 120.0;
      double phase = std::fmod(t / root_n, pi);
      if (std::abs(phase - pi / 2.0) < 0.05 || phase < 0.05 ||
          pi - phase < 0.05) {
        continue; // skip window edges
      }
      double s = sigma(m, a, b, t);
      if (expect_rising(t)) {
        CHECK(s > 0.0);
      } else {
        CHECK(s < 0.0);
      }
    }
  }
}

TEST_CASE("optimal pairs live on the dephasing equator") {
  MeasureResult res = optimal_pair_search(CentralSpin{2, 0.5},
                                          pi * std::sqrt(2.0), 512);
  CHECK(std::abs(res.pair_a.z()) < 0.02);
  CHECK(res.pair_a.radius() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK((res.pair_a.bloch3() + res.pair_b.bloch3()).norm() < 1e-9);
  CHECK(res.rate == doctest::Approx(res.blp / res.tau).epsilon(1e-12));
  CHECK(res.blp == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("spin-bath inflow rate follows 1/(pi sqrt(N))") {
  for (int n = 1; n <= 6; ++n) {
    MeasureResult res = measure_rate_periodic(CentralSpin{n, 0.5});
    double want = 1.0 / (pi * std::sqrt(double(n)));
    CHECK(std::abs(res.rate - want) < 0.02 * want);
  }
  CHECK_THROWS_AS(measure_rate_periodic(DampedCosine{1.0, 1.0}),
                  UnsupportedError);
  // Commensurate two-frequency map: period 2 pi.
  MeasureResult two = measure_rate_periodic(TwoSpinUnequal{1.0, 2.0});
  CHECK(two.tau == doctest::Approx(2.0 * pi).epsilon(1e-9));
}

TEST_CASE("rationalized common periods") {
  CHECK(rationalize_period({1.0, 2.0}, 1e-6) ==
        doctest::Approx(2.0 * pi).epsilon(1e-12));
  // pi ~ 22/7 at loose tolerance, 333/106 when tightened.
  CHECK(rationalize_period({1.0, pi}, 1e-3) ==
        doctest::Approx(14.0 * pi).epsilon(1e-12));
  CHECK(rationalize_period({1.0, pi}, 3e-5) ==
        doctest::Approx(212.0 * pi).epsilon(1e-12));
  CHECK_THROWS_AS(rationalize_period({0.0, 1.0}, 1e-6),
                  std::invalid_argument);
}

TEST_CASE("mutual information between spin and bath") {
  Eigen::Matrix2cd plus = density_from_bloch(BlochState(1, 0, 0));
  CHECK(mutual_information(3, 0.5, plus, 0.0).value ==
        doctest::Approx(0.0).epsilon(1e-12));
  // Fully dephased at t = pi/2 for N = 1: one full bit shared.
  CHECK(mutual_information(1, 0.5, plus, pi / 2.0).value ==
        doctest::Approx(1.0).epsilon(1e-10));
  // First return to zero at t = pi sqrt(2) for N = 2.
  CHECK(mutual_information(2, 0.5, plus, pi * std::sqrt(2.0)).value <
        1e-6);
  CHECK(mutual_information(2, 0.5, plus, pi * std::sqrt(2.0) - 0.5).value >
        1e-3);

  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(0.0, 8.0);
  std::uniform_real_distribution<double> r(-0.5, 0.5);
  for (int n = 1; n <= 8; ++n) {
    Eigen::Matrix2cd rho0 =
        density_from_bloch(BlochState(r(rng), r(rng), r(rng)));
    for (int k = 0; k < 50; ++k) {
      double t = u(rng);
      double fast = mutual_information(n, 0.5, rho0, t, false).value;
      double oracle = mutual_information(n, 0.5, rho0, t, true).value;
      CHECK(std::abs(fast - oracle) < 1e-8);
      CHECK(fast >= -1e-10);
    }
  }
  CHECK_THROWS_AS(mutual_information(11, 0.5, plus, 1.0, true),
                  ResourceError);
}

TEST_CASE("generator reconstruction from four trajectories") {
  // Dephasing rate (1/2) tan t away from the singularity.
  for (double t : {0.3, 1.0, 2.0, 2.9}) {
    GeneratorEstimate est = estimate_generator(CentralSpin{1, 0.5}, t, 1e-6);
    auto rates = canonical_rates(est);
    double want = 0.5 * std::tan(t);
    double got = want >= 0.0 ? rates[0].rate : rates[2].rate;
    CHECK(std::abs(got - want) < 1e-4);
    CHECK(est.h.norm() < 1e-6);
    CHECK(est.residual < 1e-8);
    // The decay direction is the z axis.
    const Eigen::Vector3d& dir =
        want >= 0.0 ? rates[0].direction : rates[2].direction;
    CHECK(std::abs(std::abs(dir[2]) - 1.0) < 1e-6);
  }

  GeneratorEstimate id = estimate_generator(Identity{}, 0.5, 1e-6);
  CHECK(id.c.norm() < 1e-9);
  CHECK(id.h.norm() < 1e-9);

  // Printed three-channel rates of the damped-cosine map at t = 0.5.
  GeneratorEstimate dc = estimate_generator(DampedCosine{1.0, 1.0}, 0.5, 1e-6);
  auto rates = canonical_rates(dc);
  double g3 = (1.0 + 2.0 * std::tan(0.5)) / 4.0;
  CHECK(std::abs(rates[0].rate - g3) < 1e-4);
  CHECK(std::abs(rates[1].rate - 0.25) < 1e-4);
  CHECK(std::abs(rates[2].rate - 0.25) < 1e-4);
  CHECK(dc.h.norm() < 1e-6);
}

TEST_CASE("negative canonical rate past the singularity") {
  GeneratorEstimate est = estimate_generator(CentralSpin{1, 0.5}, 2.0, 1e-6);
  auto rates = canonical_rates(est);
  CHECK(rates[2].rate < 0.0); // tan(2) < 0
  CHECK(rates[2].rate == doctest::Approx(0.5 * std::tan(2.0)).epsilon(1e-4));
}

TEST_CASE("rate recovery across the whole catalog with printed generators") {
  // Every model with a closed-form generator: the reconstructed Bloch-space
  // action matches it away from singularities.
  for (const ModelSpec& m : catalog_models()) {
    ClosedFormGenerator g;
    double t = 0.4 * characteristic_time(m);
    try {
      g = generator_closed_form(m, t);
    } catch (const UnsupportedError&) {
      continue;
    }
    if (g.singular) continue;
    GeneratorEstimate est = estimate_generator(m, t, 1e-6);
    // Rebuild the Bloch generator from the estimate and compare.
    Eigen::Matrix3d T = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d c = est.c;
    T(0, 0) = -2.0 * (c(1, 1) + c(2, 2));
    T(1, 1) = -2.0 * (c(0, 0) + c(2, 2));
    T(2, 2) = -2.0 * (c(0, 0) + c(1, 1));
    T(0, 1) = T(1, 0) = 2.0 * c(0, 1);
    T(0, 2) = T(2, 0) = 2.0 * c(0, 2);
    T(1, 2) = T(2, 1) = 2.0 * c(1, 2);
    CHECK((T - g.L.bottomRightCorner<3, 3>()).cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("ill-conditioned reconstruction near the singularity") {
  CHECK_THROWS_AS(estimate_generator(CentralSpin{1, 0.5}, pi / 2.0, 1e-6),
                  IllConditionedError);
  // Condition number grows without bound approaching pi/2.
  double far = estimate_generator(CentralSpin{1, 0.5}, pi / 2.0 - 0.1, 1e-6)
                   .condition_number;
  double near = estimate_generator(CentralSpin{1, 0.5}, pi / 2.0 - 1e-4, 1e-6)
                    .condition_number;
  CHECK(near > 100.0 * far);
}

TEST_CASE("bundle plumbing") {
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(2.0 * double(i) / 400.0);
  TrajectoryBundle bundle = TrajectoryBundle::sample(CentralSpin{1, 0.5},
                                                     grid);
  // Grid-step differences through the bundle interface.
  GeneratorEstimate est = estimate_generator(bundle, 1.0, 0.005);
  CHECK(std::abs(canonical_rates(est)[0].rate - 0.5 * std::tan(1.0)) < 1e-3);

  // Noise shifts the estimate but keeps states physical.
  TrajectoryBundle noisy = bundle;
  noisy.add_noise(1e-4, 12345);
  for (double t : {0.5, 1.0, 1.5}) {
    CHECK(noisy.state(0, t).physical(1e-9));
  }
  CHECK_THROWS_AS(bundle.state(0, 3.0), std::invalid_argument);
}
