// Copyright 2026 Tempest Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tempest/model.hpp"
#include "tempest/reference.hpp"
#include "tempest/topology.hpp"

using namespace tempest;

TEST_SUITE("reference") {

TEST_CASE("single spin closed forms: log Z = log(2 cosh b), <H> = -tanh b") {
    const IsingModel model(1, {}, {1.0});
    const auto ref = exact_stats_enumeration(model, {0.0, 0.5, 1.0});
    CHECK(ref.log_z[0] == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(ref.mean_energy[0] == doctest::Approx(0.0).scale(1.0));
    CHECK(ref.log_z[2] == doctest::Approx(1.1269280110429725).epsilon(1e-14));
    CHECK(ref.mean_energy[2] == doctest::Approx(-0.7615941559557649).epsilon(1e-14));
    CHECK(ref.magnetizations[2][0] == doctest::Approx(-std::tanh(1.0)).epsilon(1e-14));
}

TEST_CASE("two-spin ferromagnet: <x0 x1> = tanh b") {
    const IsingModel model(2, {{0, 1, -1.0}}, {});
    const auto ref = exact_stats_enumeration(model, {0.0, 0.7, 1.4});
    CHECK(ref.edge_correlations[0][0] == doctest::Approx(0.0).scale(1.0));
    CHECK(ref.edge_correlations[1][0] == doctest::Approx(0.6043677771171635).epsilon(1e-14));
    CHECK(ref.edge_correlations[2][0] == doctest::Approx(std::tanh(1.4)).epsilon(1e-14));
}

TEST_CASE("zero-field models at beta 0: energy 0, correlations 0, log Z = N log 2") {
    const IsingModel model = gen_ran1(build_chimera({1, 1, 4, {}, {}}), 8);
    const auto ref = exact_stats_enumeration(model, {0.0});
    CHECK(ref.mean_energy[0] == doctest::Approx(0.0).scale(1.0));
    CHECK(ref.log_z[0] == doctest::Approx(8.0 * std::log(2.0)).epsilon(1e-14));
    for (double c : ref.edge_correlations[0]) CHECK(c == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("enumeration agrees with the direct-summation oracle") {
    const IsingModel model = oracle::random_small_model(10, 0.35, true, 5);
    const auto ref = exact_stats_enumeration(model, {0.4, 1.7});
    for (std::size_t b = 0; b < ref.beta_grid.size(); ++b) {
        const auto vec = oracle::boltzmann_vector(model, ref.beta_grid[b]);
        CHECK(ref.mean_energy[b] ==
              doctest::Approx(oracle::vector_mean_energy(model, vec)).epsilon(1e-11));
        const auto corr = oracle::vector_edge_correlations(model, vec);
        for (std::size_t e = 0; e < corr.size(); ++e)
            CHECK(ref.edge_correlations[b][e] == doctest::Approx(corr[e]).epsilon(1e-11));
    }
    CHECK_THROWS(exact_stats_enumeration(model, {1.0}, 8));  // cap
    CHECK_THROWS(exact_stats_enumeration(model, {}));
}

TEST_CASE("dp matches enumeration to 1e-8 across instances with and without fields") {
    const std::vector<double> grid{0.0, 0.5, 1.0, 2.0, 3.54};
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const int n = 10 + static_cast<int>(seed);
        const IsingModel model = oracle::random_small_model(n, 0.3, seed % 2 == 0, seed);
        const auto enum_ref = exact_stats_enumeration(model, grid);
        const auto dp_ref = exact_stats_dp(model, grid);
        for (std::size_t b = 0; b < grid.size(); ++b) {
            CHECK(dp_ref.log_z[b] == doctest::Approx(enum_ref.log_z[b]).epsilon(1e-9));
            CHECK(std::abs(dp_ref.mean_energy[b] - enum_ref.mean_energy[b]) < 1e-8);
            for (std::size_t e = 0; e < model.edges().size(); ++e)
                CHECK(std::abs(dp_ref.edge_correlations[b][e] -
                               enum_ref.edge_correlations[b][e]) < 1e-8);
            for (int i = 0; i < n; ++i)
                CHECK(std::abs(dp_ref.magnetizations[b][i] -
                               enum_ref.magnetizations[b][i]) < 1e-8);
        }
    }
}

TEST_CASE("dp mean energy: weighted pass vs finite differences cross-check") {
    const IsingModel model = oracle::random_small_model(12, 0.3, true, 9);
    DpOptions fd;
    fd.finite_diff_energy = true;
    const auto weighted = exact_stats_dp(model, {0.5, 2.0});
    const auto diffed = exact_stats_dp(model, {0.5, 2.0}, fd);
    for (std::size_t b = 0; b < weighted.beta_grid.size(); ++b)
        CHECK(weighted.mean_energy[b] ==
              doctest::Approx(diffed.mean_energy[b]).epsilon(1e-6));
    // and the marginal assembly reproduces the weighted-pass energy exactly
    for (std::size_t b = 0; b < weighted.beta_grid.size(); ++b) {
        double assembled = 0.0;
        for (std::size_t e = 0; e < model.edges().size(); ++e)
            assembled += model.edges()[e].weight * weighted.edge_correlations[b][e];
        for (int i = 0; i < model.n_spins(); ++i)
            assembled += model.fields()[i] * weighted.magnetizations[b][i];
        CHECK(assembled == doctest::Approx(weighted.mean_energy[b]).epsilon(1e-9));
    }
}

TEST_CASE("3-spin chain log Z equals the transfer-matrix closed form") {
    const IsingModel chain(3, {{0, 1, 1.0}, {1, 2, 1.0}}, {});
    const auto dp_ref = exact_stats_dp(chain, {1.0});
    CHECK(dp_ref.log_z[0] == doctest::Approx(oracle::chain_log_z_transfer(3, 1.0, 1.0))
                                 .epsilon(1e-12));
    // frozen value computed independently: 2.9470032026458903
    CHECK(dp_ref.log_z[0] == doctest::Approx(2.9470032026458903).epsilon(1e-12));
}

TEST_CASE("dp validates the elimination width and the order argument") {
    const IsingModel c2 = gen_ran1(build_chimera({2, 2, 4, {}, {}}), 3);
    CHECK(dp_induced_width(c2) <= 12);  // column-sweep bound 4n+4
    DpOptions tight;
    tight.width_cap = 5;
    CHECK_THROWS(exact_stats_dp(c2, {1.0}, tight));
    // a custom order gives identical answers
    std::vector<int> reversed(c2.n_spins());
    for (int i = 0; i < c2.n_spins(); ++i) reversed[i] = c2.n_spins() - 1 - i;
    const auto a = exact_stats_dp(c2, {1.3});
    const auto b = exact_stats_dp(c2, reversed, {1.3});
    CHECK(a.log_z[0] == doctest::Approx(b.log_z[0]).epsilon(1e-10));
    CHECK_THROWS(exact_stats_dp(c2, std::vector<int>{0, 1}, {1.0}));       // not a permutation
    CHECK_THROWS(exact_stats_dp(c2, std::vector<int>(32, 0), {1.0}));      // repeated
}

TEST_CASE("dp handles disconnected graphs and isolated spins") {
    // two components plus a free spin
    const IsingModel model(5, {{0, 1, 1.0}, {2, 3, -0.5}}, {0.3, 0.0, 0.0, 0.0, 0.0});
    const auto dp_ref = exact_stats_dp(model, {0.9});
    const auto enum_ref = exact_stats_enumeration(model, {0.9});
    CHECK(dp_ref.log_z[0] == doctest::Approx(enum_ref.log_z[0]).epsilon(1e-12));
    CHECK(dp_ref.mean_energy[0] == doctest::Approx(enum_ref.mean_energy[0]).epsilon(1e-12));
}

TEST_CASE("energy / log Z derivative consistency at delta = 1e-4") {
    const IsingModel model = oracle::random_small_model(10, 0.4, false, 14);
    const double beta = 1.2, delta = 1e-4;
    const auto ref = exact_stats_enumeration(model, {beta - delta, beta, beta + delta});
    const double slope = (ref.log_z[2] - ref.log_z[0]) / (2.0 * delta);
    CHECK(std::abs(slope + ref.mean_energy[1]) < 1e-4);
}

TEST_CASE("finite-difference d<H>/db matches -Var(H) (variance identity)") {
    const IsingModel model = oracle::random_small_model(9, 0.4, true, 2);
    const double beta = 0.8, delta = 1e-4;
    const auto ref = exact_stats_enumeration(model, {beta - delta, beta, beta + delta});
    const double d_energy = (ref.mean_energy[2] - ref.mean_energy[0]) / (2.0 * delta);
    const auto vec = oracle::boltzmann_vector(model, beta);
    const double mean = oracle::vector_mean_energy(model, vec);
    const double var = oracle::vector_energy_second_moment(model, vec) - mean * mean;
    CHECK(d_energy == doctest::Approx(-var).epsilon(1e-3));
}

TEST_CASE("mean energy is non-increasing and correlations stay in [-1, 1]") {
    const IsingModel model = gen_ac3(build_chimera({1, 2, 4, {}, {}}), 4);
    const auto ref = exact_stats_dp(model, default_beta_grid(4.82, 0.25));
    for (std::size_t b = 1; b < ref.beta_grid.size(); ++b)
        CHECK(ref.mean_energy[b] <= ref.mean_energy[b - 1] + 1e-12);
    for (const auto& corr : ref.edge_correlations)
        for (double c : corr) {
            CHECK(c <= 1.0 + 1e-12);
            CHECK(c >= -1.0 - 1e-12);
        }
}

TEST_CASE("interpolation: exact at grid points, linear in between, hull enforced") {
    const IsingModel model(1, {}, {1.0});
    const auto ref = exact_stats_enumeration(model, default_beta_grid(2.0, 0.05));
    const int k = 10;
    CHECK(interpolate_mean_energy(ref, ref.beta_grid[k]) ==
          doctest::Approx(ref.mean_energy[k]).epsilon(1e-15));
    CHECK(interpolate_log_z(ref, ref.beta_grid[k]) ==
          doctest::Approx(ref.log_z[k]).epsilon(1e-15));
    // closed form -tanh(b) at off-grid points
    for (double beta : {0.513, 1.207, 2.481}) {
        CHECK(std::abs(interpolate_mean_energy(ref, beta) + std::tanh(beta)) < 1e-3);
        CHECK(std::abs(interpolate_log_z(ref, beta) - std::log(2.0 * std::cosh(beta))) < 1e-4);
    }
    // monotone data interpolates monotonically
    double prev = interpolate_mean_energy(ref, 0.0);
    for (double beta = 0.013; beta < 3.0; beta += 0.037) {
        const double cur = interpolate_mean_energy(ref, beta);
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
    CHECK_THROWS(interpolate_mean_energy(ref, -0.1));
    CHECK_THROWS(interpolate_mean_energy(ref, 3.1));
    // hermite log Z keeps d log Z / d beta = -<H> at grid points
    const double delta = 1e-5;
    const double fd = (interpolate_log_z(ref, ref.beta_grid[k] + delta) -
                       interpolate_log_z(ref, ref.beta_grid[k] - delta)) /
                      (2.0 * delta);
    CHECK(fd == doctest::Approx(-ref.mean_energy[k]).epsilon(1e-6));
}

TEST_CASE("exact enumeration sampler draws from the Boltzmann distribution") {
    const IsingModel model = oracle::random_small_model(8, 0.4, true, 11);
    const double beta = 1.1;
    const SampleSet samples = sample_exact_enum(model, beta, 200000, 404);
    const auto exact = oracle::boltzmann_vector(model, beta);
    std::vector<double> emp(256, 0.0);
    for (int k = 0; k < samples.size(); ++k) {
        std::uint64_t bits = 0;
        auto row = samples.state(k);
        for (int i = 0; i < 8; ++i)
            if (row[i] > 0) bits |= std::uint64_t{1} << i;
        emp[bits] += 1.0;
    }
    for (auto& v : emp) v /= samples.size();
    CHECK(oracle::total_variation(emp, exact) < 0.02);
    // determinism
    const SampleSet again = sample_exact_enum(model, beta, 100, 404);
    CHECK(std::equal(again.raw().begin(), again.raw().end(), samples.raw().begin()));
    CHECK_THROWS(sample_exact_enum(model, beta, 10, 505, 4));  // cap
}

TEST_CASE("dp backward sampler agrees with enumeration sampling") {
    const IsingModel model = oracle::random_small_model(10, 0.35, true, 23);
    const double beta = 1.4;
    const auto exact = oracle::boltzmann_vector(model, beta);
    const SampleSet samples = sample_exact_dp(model, beta, 200000, 808);
    std::vector<double> emp(1024, 0.0);
    for (int k = 0; k < samples.size(); ++k) {
        std::uint64_t bits = 0;
        auto row = samples.state(k);
        for (int i = 0; i < 10; ++i)
            if (row[i] > 0) bits |= std::uint64_t{1} << i;
        emp[bits] += 1.0;
    }
    for (auto& v : emp) v /= samples.size();
    CHECK(oracle::total_variation(emp, exact) < 0.03);
    // mean energy within 4 sigma
    double mean = 0.0;
    for (double e : sample_energies(model, samples)) mean += e;
    mean /= samples.size();
    const double truth = oracle::vector_mean_energy(model, exact);
    const double var = oracle::vector_energy_second_moment(model, exact) - truth * truth;
    CHECK(std::abs(mean - truth) < 4.0 * std::sqrt(var / samples.size()));
}

TEST_CASE("pt thermodynamic integration recovers log Z on a small instance") {
    const IsingModel model = gen_ran1(build_chimera({1, 1, 4, {}, {}}), 77);
    std::vector<double> grid;
    for (int k = 0; k <= 71; ++k) grid.push_back(3.54 * k / 71.0);  // ~0.05 spacing
    PtStatsOptions options;
    options.rounds = 8000;
    const auto pt = pt_stats(model, grid, options, 1001);
    const auto exact = exact_stats_enumeration(model, grid);
    const int at = pt.grid_index_of(3.54);
    REQUIRE(at >= 0);
    CHECK(std::abs(pt.log_z[at] - exact.log_z[at]) / std::abs(exact.log_z[at]) < 0.005);
    CHECK(pt.has_log_z());
    PtStatsOptions no_ti = options;
    no_ti.thermodynamic_integration = false;
    no_ti.rounds = 400;
    const auto plain = pt_stats(model, {1.0}, no_ti, 5);
    CHECK_FALSE(plain.has_log_z());
    CHECK_THROWS(pt_stats(model, {1.0}, PtStatsOptions{2, 8, 0.25, true, 10, 5}, 1));
}

TEST_CASE("default beta grid spans 0 to 1.5 beta_t") {
    const auto grid = default_beta_grid(3.54);
    CHECK(grid.front() == doctest::Approx(0.0));
    CHECK(grid.back() >= 1.5 * 3.54 - 1e-9);
    CHECK(grid[1] - grid[0] == doctest::Approx(0.05));
}

}  // TEST_SUITE
