// SPDX-License-Identifier: Apache-2.0
//
// maisac - movable-antenna ISAC beamforming and positioning toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "doctest.h"
#include "oracles.hpp"

#include "maisac/errors.hpp"
#include "maisac/model.hpp"

#include <random>

using namespace maisac;

namespace
{

UserChannelGeometry random_geometry(Eigen::Index paths, std::mt19937_64 &rng)
{
    UserChannelGeometry g;
    g.rx_elevations.resize(paths);
    g.rx_azimuths.resize(paths);
    g.tx_elevations.resize(paths);
    g.tx_azimuths.resize(paths);
    g.prm_diag.resize(paths);
    for (Eigen::Index i = 0; i < paths; ++i)
    {
        g.rx_elevations(i) = oracle::uniform(rng, -kPi / 2, kPi / 2);
        g.rx_azimuths(i) = oracle::uniform(rng, -kPi / 2, kPi / 2);
        g.tx_elevations(i) = oracle::uniform(rng, -kPi / 2, kPi / 2);
        g.tx_azimuths(i) = oracle::uniform(rng, -kPi / 2, kPi / 2);
        g.prm_diag(i) = cd(oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1));
    }
    g.distance = 30.0;
    return g;
}

} // namespace

TEST_CASE("transmit array is a half-wavelength ULA")
{
    SystemConfig c;
    c.n_tx = 2;
    CHECK(build_transmit_array(c)(1) == doctest::Approx(0.025));
    c.n_tx = 1;
    CHECK(build_transmit_array(c)(0) == 0.0);
    c.n_tx = 10;
    CHECK(build_transmit_array(c)(9) == doctest::Approx(0.225));
    const auto v = tx_positions_2d(build_transmit_array(c));
    CHECK(v[3].x == doctest::Approx(0.075));
    CHECK(v[3].y == 0.0);
}

TEST_CASE("field responses")
{
    std::mt19937_64 rng(41);
    const double lambda = 0.05;
    const auto g = random_geometry(6, rng);

    CHECK((receive_field_response({0, 0}, g, lambda).array() - cd(1.0)).abs().maxCoeff() <= 1e-15);

    UserChannelGeometry one = g;
    one.rx_elevations(0) = kPi / 2;
    one.rx_azimuths(0) = 0.0;
    CHECK(std::abs(receive_field_response({lambda, 0}, one, lambda)(0) - cd(1.0)) <= 1e-12);

    const Position2d u{0.013, -0.021};
    const auto f = receive_field_response(u, g, lambda);
    for (Eigen::Index i = 0; i < f.size(); ++i)
    {
        const double rho = u.x * std::sin(g.rx_elevations(i)) * std::cos(g.rx_azimuths(i)) +
                           u.y * std::cos(g.rx_elevations(i));
        const double phase = 2.0 * kPi / lambda * rho;
        CHECK(std::abs(f(i) - cd(std::cos(phase), std::sin(phase))) <= 1e-12);
        CHECK(std::abs(std::abs(f(i)) - 1.0) <= 1e-12);
    }

    const std::vector<Position2d> tx{{0, 0}, {0.02, 0}, {0.02, 0}};
    const auto t = transmit_field_response_matrix(g, tx, lambda);
    CHECK((t.col(0).array() - cd(1.0)).abs().maxCoeff() <= 1e-15);
    CHECK((t.col(1) - t.col(2)).norm() == 0.0);
    for (Eigen::Index j = 0; j < t.rows(); ++j)
    {
        const double phase = 2.0 * kPi / lambda * 0.02 * std::sin(g.tx_elevations(j)) * std::cos(g.tx_azimuths(j));
        CHECK(std::abs(t(j, 1) - std::polar(1.0, phase)) <= 1e-12);
    }
}

TEST_CASE("channel vector")
{
    std::mt19937_64 rng(42);
    const double lambda = 0.05;
    SystemConfig c;
    c.n_tx = 4;
    const auto tx = tx_positions_2d(build_transmit_array(c));

    SUBCASE("single path")
    {
        auto g = random_geometry(1, rng);
        g.prm_diag(0) = 1.0;
        const auto h = channel_vector({0, 0}, g, tx, lambda);
        const auto t = transmit_field_response_matrix(g, tx, lambda);
        CHECK((h.adjoint() - t.row(0)).norm() <= 1e-14);
    }
    SUBCASE("zero PRM")
    {
        auto g = random_geometry(5, rng);
        g.prm_diag.setZero();
        CHECK(channel_vector({0.01, 0.02}, g, tx, lambda).norm() == 0.0);
    }
    SUBCASE("entry-wise triple product and linearity in the PRM")
    {
        const auto g = random_geometry(5, rng);
        const Position2d u{-0.02, 0.011};
        const auto h = channel_vector(u, g, tx, lambda);
        const double k = 2.0 * kPi / lambda;
        for (std::size_t n = 0; n < tx.size(); ++n)
        {
            cd hn_conj = 0.0; // (h^H)_n = sum_i conj(f_i) sigma_i t_{i,n}
            for (Eigen::Index i = 0; i < g.n_paths(); ++i)
            {
                const double rr = u.x * std::sin(g.rx_elevations(i)) * std::cos(g.rx_azimuths(i)) +
                                  u.y * std::cos(g.rx_elevations(i));
                const double rt = tx[n].x * std::sin(g.tx_elevations(i)) * std::cos(g.tx_azimuths(i)) +
                                  tx[n].y * std::cos(g.tx_elevations(i));
                hn_conj += std::polar(1.0, -k * rr) * g.prm_diag(i) * std::polar(1.0, k * rt);
            }
            CHECK(std::abs(std::conj(h(static_cast<Eigen::Index>(n))) - hn_conj) <= 1e-12);
        }
        auto g1 = g, g2 = g;
        g2.prm_diag = oracle::random_complex(5, 1, rng);
        auto g12 = g;
        g12.prm_diag = g1.prm_diag + g2.prm_diag;
        CHECK((channel_vector(u, g12, tx, lambda) - channel_vector(u, g1, tx, lambda) -
               channel_vector(u, g2, tx, lambda))
                  .norm() <= 1e-12);
    }
}

TEST_CASE("SINR")
{
    std::mt19937_64 rng(43);
    const auto hs = std::vector<Eigen::VectorXcd>{oracle::random_complex(4, 1, rng), oracle::random_complex(4, 1, rng),
                                                  oracle::random_complex(4, 1, rng)};
    BeamformingMatrix w{oracle::random_complex(4, 3, rng)};

    BeamformingMatrix w1{w.columns.leftCols(1)};
    CHECK(sinr(0, w1, hs, 0.5) == doctest::Approx(std::norm(hs[0].dot(w1.columns.col(0))) / 0.5));

    for (std::size_t k = 0; k < 3; ++k)
    {
        double interference = 0.0;
        double signal = 0.0;
        for (Eigen::Index q = 0; q < 3; ++q)
        {
            cd acc = 0.0;
            for (Eigen::Index n = 0; n < 4; ++n)
                acc += std::conj(hs[k](n)) * w.columns(n, q);
            if (static_cast<std::size_t>(q) == k)
                signal = std::norm(acc);
            else
                interference += std::norm(acc);
        }
        CHECK(oracle::relative_diff(sinr(k, w, hs, 0.3), signal / (interference + 0.3)) <= 1e-12);
    }

    BeamformingMatrix rot{w.columns * std::polar(1.0, 0.7)};
    CHECK(oracle::relative_diff(sinr(1, rot, hs, 0.3), sinr(1, w, hs, 0.3)) <= 1e-12);

    // orthogonal beamformer gives zero
    Eigen::VectorXcd ortho = oracle::random_complex(4, 1, rng);
    ortho -= hs[0] * (hs[0].dot(ortho) / hs[0].squaredNorm());
    BeamformingMatrix wo{ortho};
    CHECK(sinr(0, wo, hs, 1.0) <= 1e-20);

    CHECK_THROWS_AS(sinr(0, w, hs, 0.0), InvalidConfig);
}

TEST_CASE("sample covariance")
{
    std::mt19937_64 rng(44);
    BeamformingMatrix e{Eigen::MatrixXcd::Zero(3, 1)};
    e.columns(0, 0) = std::sqrt(2.0);
    Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(3, 3);
    expected(0, 0) = 2.0;
    CHECK((sample_covariance(e) - expected).norm() <= 1e-15);
    CHECK(sample_covariance(BeamformingMatrix{Eigen::MatrixXcd::Zero(3, 2)}).norm() == 0.0);

    BeamformingMatrix w{oracle::random_complex(5, 3, rng)};
    const auto r = sample_covariance(w);
    CHECK((r - r.adjoint()).norm() <= 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    CHECK(oracle::relative_diff(r.trace().real(), w.power()) <= 1e-10);
}

TEST_CASE("random geometry")
{
    SystemConfig c;
    std::mt19937_64 a(7), b(7);
    const auto d1 = draw_random_geometry(c, a);
    const auto d2 = draw_random_geometry(c, b);
    REQUIRE(d1.users.size() == 5);
    for (std::size_t k = 0; k < d1.users.size(); ++k)
    {
        CHECK((d1.users[k].prm_diag - d2.users[k].prm_diag).norm() == 0.0);
        CHECK(d1.users[k].distance >= 20.0);
        CHECK(d1.users[k].distance <= 60.0);
        CHECK_NOTHROW(d1.users[k].validate());
        CHECK(d1.users[k].rx_elevations.cwiseAbs().maxCoeff() <= kPi / 2);
    }
    CHECK(d1.reflect_gain == doctest::Approx(std::pow(1e-4 * std::pow(30.0, -2.8), 2)));

    // PRM variance c0 d^-a / L over 10^5 draws at a fixed distance
    SystemConfig fixed;
    fixed.user_dist_min = fixed.user_dist_max = 25.0;
    fixed.n_users = 1;
    std::mt19937_64 rng(8);
    double acc = 0.0;
    int count = 0;
    while (count < 100000)
    {
        const auto d = draw_random_geometry(fixed, rng);
        for (Eigen::Index i = 0; i < d.users[0].n_paths(); ++i, ++count)
            acc += std::norm(d.users[0].prm_diag(i));
    }
    const double expected_var = 1e-4 * std::pow(25.0, -2.8) / 10.0;
    CHECK(std::abs(acc / count - expected_var) <= 0.05 * expected_var);
}

TEST_CASE("config validation")
{
    SystemConfig c;
    CHECK_NOTHROW(c.validate());
    c.power_budget = -1.0;
    c.n_users = 0;
    try
    {
        c.validate();
        FAIL("expected InvalidConfig");
    }
    catch (const InvalidConfig &e)
    {
        const std::string msg = e.what();
        CHECK(msg.find("power_budget") != std::string::npos);
        CHECK(msg.find("n_users") != std::string::npos);
    }
    SystemConfig tight;
    tight.d_min = tight.wavelength / 2.0;
    CHECK_THROWS_AS(tight.validate(), InvalidConfig);
    SystemConfig ang;
    ang.target_angle = kPi / 2;
    CHECK_THROWS_AS(ang.validate(), InvalidConfig);
}

TEST_CASE("receive layout audit")
{
    Eigen::VectorXd d(3);
    d << 0.0, 0.02, 0.05;
    CHECK(receive_layout_violations(d, 0.01, 0.2).empty());
    d << -0.001, 0.005, 0.3;
    CHECK(receive_layout_violations(d, 0.01, 0.2).size() == 3);
    CHECK(in_user_region({0.05, -0.05}, 0.05));
    CHECK_FALSE(in_user_region({0.0501, 0.0}, 0.05));
}
