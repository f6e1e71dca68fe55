#include <doctest.h>

#include <cmath>
#include <complex>

#include "lambshift/greens.hpp"
#include "lambshift/units.hpp"
#include "si_reference.hpp"

using namespace lambshift;

namespace {
const DrudeMaterial ag = DrudeMaterial::silver();
const HostMedium vac{1.0};
}

TEST_CASE("n = 2 term matches the hand-evaluated closed form") {
    const auto g = reduced_green_sum(ag, vac, 10.0, 12.0, 2.785, ModeRange::single(2));

    const auto eps = si_reference::drude(6.0, 7.9, 0.051, 2.785);
    const auto alpha2 = 1e5 * 2.0 * (eps - 1.0) / (2.0 * eps + 3.0);  // nm^5
    const auto expected_rr = 9.0 * alpha2 / std::pow(12.0, 8.0);
    const auto expected_tt = 3.0 * alpha2 / std::pow(12.0, 8.0);
    CHECK(std::abs(g.k_radial - expected_rr) / std::abs(expected_rr) < 1e-12);
    CHECK(std::abs(g.k_tangential - expected_tt) / std::abs(expected_tt) < 1e-12);

    // the n = 2 term alone is worth about 4 meV of shift for a 24 D emitter
    const double mu = 24.0 * units::debye;
    const double shift_mev = mu * mu * units::k_coulomb * g.k_radial.real() * 1e3;
    CHECK(shift_mev == doctest::Approx(4.2).epsilon(0.10));
}

TEST_CASE("scattered sums vanish at large separation") {
    const auto g = reduced_green_sum(ag, vac, 10.0, 1e6, 2.785, ModeRange{1, -1, 1e-10});
    CHECK(std::abs(g.k_radial) < 1e-20);
    CHECK(std::abs(g.k_tangential) < 1e-20);
}

TEST_CASE("dipole-only sum scales as d^-6") {
    const auto a = reduced_green_sum(ag, vac, 10.0, 15.0, 2.7, ModeRange::single(1));
    const auto b = reduced_green_sum(ag, vac, 10.0, 30.0, 2.7, ModeRange::single(1));
    CHECK(std::abs(a.k_radial / b.k_radial - 64.0) < 1e-10);
    CHECK(std::abs(a.k_tangential / b.k_tangential - 64.0) < 1e-10);
}

TEST_CASE("index-matched sphere yields an identically zero adaptive sum") {
    // omega_p = 8, omega = 4 make eps_m = 6 - 4 = 2 exactly
    DrudeMaterial m{6.0, 8.0, 0.0};
    const auto g = reduced_green_sum(m, HostMedium{2.0}, 8.0, 10.0, 4.0);
    CHECK(g.k_radial == std::complex<double>(0.0, 0.0));
    CHECK(g.k_tangential == std::complex<double>(0.0, 0.0));
    CHECK(g.n_used < 20);

    // a nearly matched host still converges to a negligible sum
    DrudeMaterial ms{6.0, 7.9, 0.0};
    const double w = ms.omega_p / std::sqrt(ms.eps_inf - 2.5);
    const auto gs = reduced_green_sum(ms, HostMedium{2.5}, 8.0, 10.0, w);
    CHECK(std::abs(gs.k_radial) < 1e-12);
    CHECK(std::abs(gs.k_tangential) < 1e-12);
}

TEST_CASE("emitter inside or on the sphere is a geometry error") {
    CHECK_THROWS_AS(reduced_green_sum(ag, vac, 10.0, 10.0, 2.8), geometry_error);
    CHECK_THROWS_AS(reduced_green_sum(ag, vac, 10.0, 9.0, 2.8), geometry_error);
}

TEST_CASE("series at a vanishing gap overruns the hard cap") {
    CHECK_THROWS_AS(reduced_green_sum(ag, vac, 10.0, 10.0 * (1.0 + 1e-5), 2.9), truncation_error);
}

TEST_CASE("adaptive truncation bound is honored") {
    const ModeRange adaptive{2, -1, 1e-8};
    const auto g = reduced_green_sum(ag, vac, 10.0, 11.5, 2.785, adaptive);
    CHECK(g.tail_bound < 1e-8);
    CHECK(g.n_used >= 10);

    // doubling the summation length changes nothing beyond the tolerance
    const auto longer = reduced_green_sum(ag, vac, 10.0, 11.5, 2.785,
                                          ModeRange{2, 2 * g.n_used, 1e-8});
    CHECK(std::abs(g.k_radial - longer.k_radial) / std::abs(longer.k_radial) < 1e-6);
}

TEST_CASE("truncation error decreases monotonically past the resonant band") {
    // converged reference
    const auto full = reduced_green_sum(ag, vac, 10.0, 12.0, 2.785, ModeRange{1, 400, 1e-8});
    double prev = 1e300;
    for (int n_max = 8; n_max <= 60; n_max += 4) {
        const auto g = reduced_green_sum(ag, vac, 10.0, 12.0, 2.785, ModeRange{1, n_max, 1e-8});
        const double dev = std::abs(g.k_radial - full.k_radial);
        CHECK(dev < prev);
        prev = dev;
    }
}

TEST_CASE("off-resonant sums decrease strictly with distance") {
    double prev = 1e300;
    for (double d = 10.5; d <= 50.0; d += 1.975) {
        const auto g = reduced_green_sum(ag, vac, 10.0, d, 2.5);
        CHECK(std::abs(g.k_radial) < prev);
        prev = std::abs(g.k_radial);
    }
}

TEST_CASE("mode resonances climb toward the accumulation frequency") {
    const double accumulation = 7.9 / std::sqrt(6.0 + 1.0);
    double prev_peak = 0.0;
    for (int n : {2, 3, 4, 5}) {
        double best_w = 0.0, best = -1.0;
        for (double w = 2.75; w <= 3.0; w += 1e-4) {
            const double im =
                multipole_polarizability(ag, vac, 10.0, n, w, false).imag();
            if (im > best) {
                best = im;
                best_w = w;
            }
        }
        // analytic condition: Re[n eps + (n+1)] = 0
        const double analytic =
            std::sqrt(7.9 * 7.9 / (6.0 + (n + 1.0) / n) - 0.051 * 0.051);
        CHECK(best_w == doctest::Approx(analytic).epsilon(2e-3));
        CHECK(best_w > prev_peak);
        CHECK(best_w < accumulation);
        prev_peak = best_w;
    }
}

TEST_CASE("passivity: Im K >= 0 and J_n >= 0 across the band") {
    for (double w = 2.3; w <= 3.3; w += 0.01) {
        const auto g = reduced_green_sum(ag, vac, 10.0, 12.0, w);
        CHECK(g.k_radial.imag() >= 0.0);
        CHECK(g.k_tangential.imag() >= 0.0);
        CHECK(spectral_density(ag, vac, 10.0, 12.0, w, 1, Orientation::radial) >= 0.0);
        CHECK(spectral_density(ag, vac, 10.0, 12.0, w, 3, Orientation::tangential) >= 0.0);
    }
}

TEST_CASE("spectral density crossover between dipole and dark modes") {
    double j1_far = 0.0, hom_far = 0.0, j1_near = 0.0, hom_near = 0.0;
    for (double w = 2.5; w <= 3.1; w += 1e-3) {
        j1_far = std::max(j1_far, spectral_density(ag, vac, 10.0, 20.0, w, 1, Orientation::radial));
        hom_far = std::max(hom_far, spectral_density_sum(ag, vac, 10.0, 20.0, w, ModeRange::hom(),
                                                         Orientation::radial));
        j1_near = std::max(j1_near, spectral_density(ag, vac, 10.0, 12.0, w, 1, Orientation::radial));
        hom_near = std::max(hom_near, spectral_density_sum(ag, vac, 10.0, 12.0, w, ModeRange::hom(),
                                                           Orientation::radial));
    }
    CHECK(j1_far > hom_far);    // h = R: dipole mode dominates
    CHECK(hom_near > j1_near);  // h = 0.2 R: dark modes dominate
}

TEST_CASE("reduced sums agree with the SI brute-force oracle") {
    const auto g = reduced_green_sum(ag, vac, 10.0, 12.0, 2.785, ModeRange{1, 120, 1e-8});
    const auto [rr, tt] =
        si_reference::green_sums(6.0, 7.9, 0.051, 1.0, 10.0, 12.0, 2.785, 1, 120, true);
    // oracle values are per m^3; ours per nm^3
    CHECK(std::abs(g.k_radial * 1e27 - rr) / std::abs(rr) < 1e-8);
    CHECK(std::abs(g.k_tangential * 1e27 - tt) / std::abs(tt) < 1e-8);
}
