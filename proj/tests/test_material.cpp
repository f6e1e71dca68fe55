#include <doctest.h>

#include <cmath>
#include <complex>

#include "lambshift/material.hpp"
#include "si_reference.hpp"

using namespace lambshift;

TEST_CASE("drude permittivity reaches eps_inf at high frequency") {
    const auto eps = drude_permittivity(DrudeMaterial::silver(), 1000.0);
    CHECK(std::abs(eps.real() - 6.0) < 1e-4);
    CHECK(eps.imag() < 1e-6);
    CHECK(eps.imag() >= 0.0);
}

TEST_CASE("drude permittivity matches the SI-unit evaluation at 2.785 eV") {
    const auto eps = drude_permittivity(DrudeMaterial::silver(), 2.785);
    const auto ref = si_reference::drude(6.0, 7.9, 0.051, 2.785);
    CHECK(std::abs(eps - ref) < 1e-12);
    // hand value: -2.044 + 0.147i
    CHECK(eps.real() == doctest::Approx(-2.044).epsilon(1e-3));
    CHECK(eps.imag() == doctest::Approx(0.147).epsilon(5e-3));
}

TEST_CASE("lossless drude vanishes at the bulk plasmon frequency") {
    DrudeMaterial m{6.0, 7.9, 0.0};
    const double w = m.omega_p / std::sqrt(m.eps_inf);
    const auto eps = drude_permittivity(m, w);
    CHECK(std::abs(eps) < 1e-12);
}

TEST_CASE("non-positive frequency is a domain error") {
    CHECK_THROWS_AS(drude_permittivity(DrudeMaterial::silver(), 0.0), domain_error);
    CHECK_THROWS_AS(drude_permittivity(DrudeMaterial::silver(), -1.0), domain_error);
}

TEST_CASE("Im eps stays positive for lossy metal over the optical window") {
    const DrudeMaterial m = DrudeMaterial::silver();
    for (double w = 0.1; w < 12.0; w += 0.05) {
        CHECK(drude_permittivity(m, w).imag() > 0.0);
    }
}

TEST_CASE("quadrupole polarizability at the reference point") {
    const HostMedium vac{1.0};
    const auto a2 = multipole_polarizability(DrudeMaterial::silver(), vac, 10.0, 2, 2.785, false);

    // independent closed-form evaluation from the SI-oracle permittivity
    const auto eps = si_reference::drude(6.0, 7.9, 0.051, 2.785);
    const auto expected = 1e5 * 2.0 * (eps - 1.0) / (2.0 * eps + 3.0);
    CHECK(std::abs(a2 - expected) / std::abs(expected) < 1e-12);

    // magnitude anchor: (5.3 + 1.2i) * 1e5 nm^5
    CHECK(a2.real() == doctest::Approx(5.3e5).epsilon(0.02));
    CHECK(a2.imag() == doctest::Approx(1.2e5).epsilon(0.05));
}

TEST_CASE("index-matched sphere does not scatter") {
    DrudeMaterial m{6.0, 7.9, 0.0};
    // lossless: eps is real, equal to 2.5 at omega_p / sqrt(eps_inf - 2.5)
    const double w = m.omega_p / std::sqrt(m.eps_inf - 2.5);
    const HostMedium host{2.5};
    for (int n : {1, 2, 3, 7}) {
        const auto a = multipole_polarizability(m, host, 8.0, n, w, false);
        CHECK(std::abs(a) < 1e-9 * std::pow(8.0, 2 * n + 1));
    }
}

TEST_CASE("lossless dipole resonance diverges without radiative correction") {
    DrudeMaterial m{6.0, 7.9, 0.0};
    const HostMedium vac{1.0};
    const double w = m.omega_p / std::sqrt(m.eps_inf + 2.0);  // eps -> -2
    const auto a = multipole_polarizability(m, vac, 10.0, 1, w, false);
    CHECK(std::abs(a) > 1e12);
}

TEST_CASE("exact lossless pole raises a singular error") {
    // omega_p = 8, omega = 4 make omega_p^2/omega^2 == 4 exact, so
    // eps_m = 2 exactly and n = 1 with eps_b = 5 hits eps_m + 2 eps_b = ...
    DrudeMaterial m{6.0, 8.0, 0.0};
    const HostMedium host{5.0};
    // eps_m(2) = 6 - 16 = -10 exactly; denominator -10 + 2*5 = 0
    CHECK_THROWS_AS(multipole_polarizability(m, host, 10.0, 1, 2.0, false), singular_error);
}

TEST_CASE("radiative correction is a no-op for higher modes") {
    const HostMedium vac{1.0};
    const auto with = multipole_polarizability(DrudeMaterial::silver(), vac, 10.0, 3, 2.9, true);
    const auto without = multipole_polarizability(DrudeMaterial::silver(), vac, 10.0, 3, 2.9, false);
    CHECK(with == without);
}

TEST_CASE("invalid polarizability inputs") {
    const HostMedium vac{1.0};
    CHECK_THROWS_AS(multipole_polarizability(DrudeMaterial::silver(), vac, 10.0, 0, 2.8, false),
                    domain_error);
    CHECK_THROWS_AS(multipole_polarizability(DrudeMaterial::silver(), vac, -10.0, 1, 2.8, false),
                    domain_error);
    CHECK_THROWS_AS(multipole_polarizability(DrudeMaterial::silver(), HostMedium{0.5}, 10.0, 1, 2.8,
                                             false),
                    domain_error);
}

TEST_CASE("quasi-static scaling: alpha_n / R^(2n+1) independent of R") {
    const HostMedium vac{1.0};
    for (int n : {1, 2, 5}) {
        const auto ref = multipole_polarizability(DrudeMaterial::silver(), vac, 10.0, n, 2.8, false) /
                         std::pow(10.0, 2 * n + 1);
        for (double R : {5.0, 20.0}) {
            const auto v = multipole_polarizability(DrudeMaterial::silver(), vac, R, n, 2.8, false) /
                           std::pow(R, 2 * n + 1);
            CHECK(std::abs(v - ref) / std::abs(ref) < 1e-12);
        }
    }
}

TEST_CASE("dipole mode parameters reproduce the quasi-static resonance") {
    const auto dp = dipole_mode_params(DrudeMaterial::silver(), HostMedium{1.0}, 10.0,
                                       PolarizabilityOptions{false, false});
    CHECK(dp.omega_d == doctest::Approx(2.793).epsilon(0.0018));  // 2.793 +- 5 meV
    CHECK(dp.eta1 == doctest::Approx(0.175).epsilon(0.01));
    CHECK(dp.mu_d == doctest::Approx(19.1).epsilon(0.005));
    CHECK(units::enm_to_debye(dp.mu_d) == doctest::Approx(916.0).epsilon(0.005));
    // quasi-static Lorentzian linewidth equals the Drude damping
    CHECK(dp.gamma_d == doctest::Approx(0.051).epsilon(0.1));
}

TEST_CASE("mu_d matches the SI-unit oracle") {
    const auto dp = dipole_mode_params(DrudeMaterial::silver(), HostMedium{1.0}, 10.0,
                                       PolarizabilityOptions{false, false});
    const double ref = si_reference::mu_d_debye(6.0, 7.9, 0.051, 1.0, 10.0, dp.omega_d);
    CHECK(std::abs(units::enm_to_debye(dp.mu_d) - ref) / ref < 1e-8);
}

TEST_CASE("radiative correction can only red-shift the dipole resonance") {
    for (double R : {5.0, 10.0, 15.0, 20.0, 25.0, 30.0}) {
        const auto plain = dipole_mode_params(DrudeMaterial::silver(), HostMedium{1.0}, R,
                                              PolarizabilityOptions{false, false});
        const auto rad = dipole_mode_params(DrudeMaterial::silver(), HostMedium{1.0}, R,
                                            PolarizabilityOptions{true, false});
        CHECK(rad.omega_d <= plain.omega_d + 1e-6);
    }
}

TEST_CASE("finite-size correction red-shifts with growing radius") {
    double prev = 10.0;
    for (double R : {5.0, 10.0, 15.0, 20.0}) {
        const auto dp = dipole_mode_params(DrudeMaterial::silver(), HostMedium{1.0}, R,
                                           PolarizabilityOptions{true, true});
        CHECK(dp.omega_d < prev);
        prev = dp.omega_d;
    }
}

TEST_CASE("mu_d scales as R^(3/2)") {
    const PolarizabilityOptions qs{false, false};
    const auto a = dipole_mode_params(DrudeMaterial::silver(), HostMedium{1.0}, 8.0, qs);
    const auto b = dipole_mode_params(DrudeMaterial::silver(), HostMedium{1.0}, 16.0, qs);
    CHECK(b.mu_d / a.mu_d == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-9));

    // with the radiative correction the tiny omega_d drift bounds the error
    const auto ar = dipole_mode_params(DrudeMaterial::silver(), HostMedium{1.0}, 8.0, {});
    const auto br = dipole_mode_params(DrudeMaterial::silver(), HostMedium{1.0}, 16.0, {});
    CHECK(br.mu_d / ar.mu_d == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(0.01));
}

TEST_CASE("resonance outside the search window is an error") {
    // large eps_b pushes the dipole resonance below 0.3 omega_p
    CHECK_THROWS_AS(dipole_mode_params(DrudeMaterial::silver(), HostMedium{10.0}, 10.0,
                                       PolarizabilityOptions{false, false}),
                    domain_error);
}
