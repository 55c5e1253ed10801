// SPDX-License-Identifier: Apache-2.0
//
// mahb: movable sub-array hybrid beamforming simulator
// Copyright (C) 2026 The mahb authors
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

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace mahb;

namespace
{
    struct State
    {
        ChannelScenario sc;
        SubArrayCenters c;
        HybridBeamformer bf;
        CMatrix H;
    };

    State random_state(std::uint64_t seed, int K = 4, double P = 1.0, Connectivity conn = Connectivity::sub_connected)
    {
        std::mt19937_64 rng(seed * 7 + 1);
        State s{oracle::random_scenario(seed, K, 3), {}, {}, {}};
        s.c = oracle::random_centers(rng, s.sc.geometry);
        s.bf = oracle::random_beamformer(rng, s.sc.geometry, K, P, conn);
        s.H = channel_matrix(s.c, s.sc);
        return s;
    }

    double surrogate(const State &s) { return surrogate_value(s.H, s.bf.precoder(s.sc.geometry), s.sc.noise_powers(), update_slack(s.H, s.bf.precoder(s.sc.geometry), s.sc.noise_powers())); }
}

TEST(Slack, ScalarExamples)
{
    const CMatrix a = CMatrix::Ones(1, 1);
    const SlackState s = update_slack(a, RVector::Ones(1));
    EXPECT_DOUBLE_EQ(s.gamma(0), 1.0);
    EXPECT_NEAR(std::abs(s.omega(0) - Complex(0.5, 0.0)), 0.0, 1e-15);

    CMatrix g(2, 2);
    g << Complex(0.0, 0.0), Complex(1.0, 1.0), Complex(0.3, 0.0), Complex(2.0, -1.0);
    const SlackState z = update_slack(g, RVector::Ones(2));
    EXPECT_EQ(z.gamma(0), 0.0);
    EXPECT_EQ(z.omega(0), Complex(0.0, 0.0));
    EXPECT_GT(z.gamma(1), 0.0);
}

TEST(Slack, MatchesDirectFormula)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        const State s = random_state(seed, 2);
        const CMatrix WA = oracle::analog_dense(s.bf.phases, 4, 4);
        const RVector noise = s.sc.noise_powers();
        const SlackState st = update_slack(s.H, s.bf.precoder(s.sc.geometry), noise);
        const std::vector<double> want = oracle::sinr(s.H, WA, s.bf.digital, noise);
        for (int k = 0; k < 2; ++k)
        {
            const Complex a = (s.H.col(k).adjoint() * WA * s.bf.digital.col(k))(0);
            double b = noise(k);
            for (int j = 0; j < 2; ++j)
                b += std::norm((s.H.col(k).adjoint() * WA * s.bf.digital.col(j))(0));
            EXPECT_NEAR(st.gamma(k), want[static_cast<std::size_t>(k)], 1e-10 * want[static_cast<std::size_t>(k)]);
            EXPECT_NEAR(std::abs(st.omega(k) - a / b), 0.0, 1e-12 * std::abs(a / b));
        }
    }
}

TEST(Surrogate, ZeroBeamformerIsZero)
{
    const State s = random_state(3);
    const CMatrix gains = CMatrix::Zero(4, 4);
    const SlackState zero{RVector::Zero(4), CVector::Zero(4)};
    EXPECT_EQ(surrogate_value(gains, s.sc.noise_powers(), zero), 0.0);
    EXPECT_EQ(update_slack(gains, s.sc.noise_powers()).gamma.sum(), 0.0);
}

TEST(Surrogate, TightAtOptimalSlack)
{
    for (std::uint64_t seed = 0; seed < 200; ++seed)
    {
        const State s = random_state(seed, 4, 0.1 + 0.05 * static_cast<double>(seed));
        const double want = std::log(2.0) * oracle::sum_rate(s.H, oracle::analog_dense(s.bf.phases, 4, 4), s.bf.digital, s.sc.noise_powers());
        ASSERT_NEAR(surrogate(s), want, 1e-9) << "seed " << seed;
    }
}

TEST(Surrogate, OptimalSlackDominatesPerturbations)
{
    const State s = random_state(41);
    const CMatrix V = s.bf.precoder(s.sc.geometry);
    const RVector noise = s.sc.noise_powers();
    const SlackState opt = update_slack(s.H, V, noise);
    const double best = surrogate_value(s.H, V, noise, opt);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n(0.0, 0.3);
    for (int t = 0; t < 100; ++t)
    {
        SlackState p = opt;
        for (int k = 0; k < 4; ++k)
        {
            p.gamma(k) = std::max(0.0, p.gamma(k) * (1.0 + n(rng)));
            p.omega(k) += Complex(n(rng), n(rng)) * std::abs(opt.omega(k));
        }
        EXPECT_LE(surrogate_value(s.H, V, noise, p), best + 1e-12);
    }
}

TEST(AnalogOperator, IdentityPhasesCopyScalars)
{
    const ArrayGeometry g;
    const AnalogOperator op = apply_block_structure(RVector::Zero(16), g);
    CMatrix x(4, 1);
    x << Complex(1, 2), Complex(-3, 0), Complex(0, 0.5), Complex(4, -4);
    const CMatrix y = op.apply(x);
    for (int s = 0; s < 4; ++s)
        for (int i = 0; i < 4; ++i)
            EXPECT_EQ(y(s * 4 + i, 0), x(s, 0));
    EXPECT_THROW(apply_block_structure(RVector::Zero(15), g), ConfigError);
}

TEST(AnalogOperator, StructuredMatchesDense)
{
    const ArrayGeometry g;
    std::mt19937_64 rng(14);
    for (int t = 0; t < 20; ++t)
    {
        const HybridBeamformer bf = oracle::random_beamformer(rng, g, 3, 1.0);
        const AnalogOperator op = apply_block_structure(bf.phases, g);
        const CMatrix dense = oracle::analog_dense(bf.phases, 4, 4);
        const CMatrix x = CMatrix::Random(4, 3);
        const CMatrix y = CMatrix::Random(16, 2);
        EXPECT_LE((op.apply(x) - dense * x).norm(), 1e-12);
        EXPECT_LE((op.apply_adjoint(y) - dense.adjoint() * y).norm(), 1e-12);
        EXPECT_LE((op.dense() - dense).norm(), 1e-12);
        // power recast: ||W_A x||^2 = N_h N_v ||x||^2
        EXPECT_NEAR(op.apply(x).squaredNorm(), 4.0 * x.squaredNorm(), 1e-12 * x.squaredNorm());
    }
}

TEST(AnalogOperator, ProjectionExamples)
{
    CVector phi(3);
    phi << Complex(2.0, 0.0), Complex(-1.0, -1.0), Complex(0.0, 0.0);
    const RVector p = project_unit_modulus(phi);
    EXPECT_NEAR(p(0), 0.0, 1e-15);
    EXPECT_NEAR(p(1), 5.0 * kPi / 4.0, 1e-12);
    EXPECT_EQ(p(2), 0.0);
    const CVector u = unit_modulus(p);
    for (Eigen::Index i = 0; i < u.size(); ++i)
        EXPECT_NEAR(std::abs(u(i)), 1.0, 1e-15);
}

TEST(Digital, InactiveConstraintReturnsUnconstrained)
{
    DigitalSubproblem p;
    p.quadratic = CMatrix::Identity(3, 3);
    p.linear = CMatrix::Random(3, 2) * 0.1;
    p.budget = 10.0;
    const DigitalSolution s = solve_digital(p);
    EXPECT_EQ(s.multiplier, 0.0);
    EXPECT_LE((s.digital - p.linear).norm(), 1e-14);
    EXPECT_THROW(solve_digital(DigitalSubproblem{p.quadratic, p.linear, {}, 0.0}), ConfigError);
}

TEST(Digital, PowerStrictlyDecreasingInMultiplier)
{
    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t)
    {
        const CMatrix X = CMatrix::Random(4, 6);
        const CMatrix Xi = X * X.adjoint();
        const CMatrix B = CMatrix::Random(4, 3);
        const CMatrix I = CMatrix::Identity(4, 4);
        double prev = oracle::digital_power(Xi, B, I, 1e-3);
        for (double lam = 1e-2; lam < 1e3; lam *= 1.7)
        {
            const double cur = oracle::digital_power(Xi, B, I, lam);
            EXPECT_LT(cur, prev);
            prev = cur;
        }
    }
}

TEST(Digital, MultiplierMatchesGridOracle)
{
    for (std::uint64_t seed = 0; seed < 40; ++seed)
    {
        const State s = random_state(seed, 4, 1.0);
        const SlackState sl = update_slack(s.H, s.bf.precoder(s.sc.geometry), s.sc.noise_powers());
        DigitalSubproblem p = digital_subproblem(s.H, s.bf, s.sc.geometry, sl);
        p.budget = 1e-3 * oracle::digital_power(p.quadratic, p.linear, CMatrix::Identity(4, 4), 1e-6);
        const DigitalSolution sol = solve_digital(p);
        ASSERT_GT(sol.multiplier, 0.0);
        EXPECT_NEAR(sol.digital.squaredNorm(), p.budget, 1e-6 * p.budget);
        EXPECT_LE(sol.digital.squaredNorm(), p.budget * (1.0 + 1e-9));

        double hi = 1.0;
        while (oracle::digital_power(p.quadratic, p.linear, CMatrix::Identity(4, 4), hi) > p.budget)
            hi *= 2.0;
        const int n = 10000;
        const double cell = hi / n;
        double best = 0.0, mismatch = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= n; ++i)
        {
            const double lam = i * cell;
            const double m = std::abs(oracle::digital_power(p.quadratic, p.linear, CMatrix::Identity(4, 4), lam) - p.budget);
            if (m < mismatch)
            {
                mismatch = m;
                best = lam;
            }
        }
        EXPECT_LE(std::abs(sol.multiplier - best), cell) << "seed " << seed;
    }
}

TEST(Digital, RankOneMatchesInversionIdentity)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        State s = random_state(100 + seed, 1, 0.5);
        const SlackState sl = update_slack(s.H, s.bf.precoder(s.sc.geometry), s.sc.noise_powers());
        DigitalSubproblem p = digital_subproblem(s.H, s.bf, s.sc.geometry, sl);
        // xi = W_A^H h; Xi = mu xi xi^H; beta = b xi, so w(lambda) = b xi / (lambda + mu |xi|^2)
        const CVector xi = oracle::analog_dense(s.bf.phases, 4, 4).adjoint() * s.H.col(0);
        const double mu = sl.mu()(0);
        const double b = std::abs(sl.beta_scale()(0));
        const double budget = p.budget * 1e-4;
        p.budget = budget;
        const double lam = b * xi.norm() / std::sqrt(budget) - mu * xi.squaredNorm();
        ASSERT_GT(lam, 0.0);
        const DigitalSolution sol = solve_digital(p);
        EXPECT_NEAR(sol.multiplier, lam, 1e-5 * lam);
        s.bf.digital = sol.digital;
        EXPECT_NEAR(s.bf.transmit_power(s.sc.geometry), 4.0 * budget, 1e-6 * 4.0 * budget);
    }
}

TEST(Digital, StepDoesNotDecreaseSurrogateAndStaysFeasible)
{
    for (std::uint64_t seed = 0; seed < 50; ++seed)
    {
        for (Connectivity conn : {Connectivity::sub_connected, Connectivity::fully_connected})
        {
            State s = random_state(300 + seed, 4, 0.01, conn);
            const RVector noise = s.sc.noise_powers();
            const SlackState sl = update_slack(s.H, s.bf.precoder(s.sc.geometry), noise);
            const double before = surrogate_value(s.H, s.bf.precoder(s.sc.geometry), noise, sl);
            const DigitalSolution sol = solve_digital(digital_subproblem(s.H, s.bf, s.sc.geometry, sl));
            s.bf.digital = sol.digital;
            const double after = surrogate_value(s.H, s.bf.precoder(s.sc.geometry), noise, sl);
            EXPECT_GE(after, before - 1e-8 * (1.0 + std::abs(before)));
            EXPECT_LE(s.bf.transmit_power(s.sc.geometry), s.bf.power_budget * (1.0 + 1e-9));
            if (sol.multiplier > 0.0)
            {
                EXPECT_NEAR(s.bf.transmit_power(s.sc.geometry), s.bf.power_budget, 1e-6 * s.bf.power_budget);
            }
        }
    }
}

TEST(Analog, PenaltyOnlyProblemIsFixedPoint)
{
    AnalogSubproblem a;
    a.users = 2;
    a.lifted = CMatrix::Zero(8, 4);
    a.mu = RVector::Zero(2);
    a.linear = CVector::Zero(8);
    RVector ph(8);
    ph << 0.1, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 0.0;
    const AnalogSolution s = solve_analog(a, ph, 0.7, 5);
    EXPECT_LE((unit_modulus(s.phases) - unit_modulus(ph)).norm(), 1e-12);
    EXPECT_THROW(solve_analog(a, ph, 0.0, 5), ConfigError);
}

TEST(Analog, LiftedColumnsReproduceLinkGains)
{
    for (Connectivity conn : {Connectivity::sub_connected, Connectivity::fully_connected})
    {
        State s = random_state(61, 3, 1.0, conn);
        const SlackState sl = update_slack(s.H, s.bf.precoder(s.sc.geometry), s.sc.noise_powers());
        const AnalogSubproblem a = analog_subproblem(s.H, s.bf.digital, conn, s.sc.geometry, sl);
        const CVector p = unit_modulus(s.bf.phases);
        const CMatrix gains = link_gains(s.H, s.bf.precoder(s.sc.geometry));
        for (int k = 0; k < 3; ++k)
            for (int kp = 0; kp < 3; ++kp)
                EXPECT_NEAR(std::abs(Complex(a.lifted_column(k, kp).dot(p)) - gains(k, kp)), 0.0, 1e-12);
        // analog objective + slack-only terms = surrogate
        double rest = 0.0;
        const RVector noise = s.sc.noise_powers();
        for (int k = 0; k < 3; ++k)
            rest += std::log1p(sl.gamma(k)) - sl.gamma(k) - sl.mu()(k) * noise(k);
        EXPECT_NEAR(a.objective(p) + rest, surrogate_value(gains, noise, sl), 1e-10);
    }
}

TEST(Analog, PenalizedTraceNonDecreasingAndUnitModulus)
{
    for (std::uint64_t seed = 0; seed < 30; ++seed)
    {
        State s = random_state(700 + seed, 4);
        const SlackState sl = update_slack(s.H, s.bf.precoder(s.sc.geometry), s.sc.noise_powers());
        const AnalogSubproblem a = analog_subproblem(s.H, s.bf.digital, s.bf.connectivity, s.sc.geometry, sl);
        const AnalogSolution sol = solve_analog(a, s.bf.phases, a.data_scale() * 0.1, 20);
        ASSERT_EQ(sol.penalized_trace.size(), 20u);
        for (std::size_t i = 1; i < sol.penalized_trace.size(); ++i)
            EXPECT_GE(sol.penalized_trace[i], sol.penalized_trace[i - 1] - 1e-8 * (1.0 + std::abs(sol.penalized_trace[i])));
        const CVector p = unit_modulus(sol.phases);
        for (Eigen::Index i = 0; i < p.size(); ++i)
            EXPECT_NEAR(std::abs(p(i)), 1.0, 1e-12);
    }
}

TEST(PowerRecast, SubConnectedIdentity)
{
    std::mt19937_64 rng(5);
    const ArrayGeometry g;
    for (int t = 0; t < 50; ++t)
    {
        const HybridBeamformer bf = oracle::random_beamformer(rng, g, 4, 2.0);
        EXPECT_NEAR(bf.transmit_power(g), 4.0 * bf.digital.squaredNorm(), 1e-12 * bf.transmit_power(g));
    }
}

TEST(Analog, ContinuationNearExhaustiveSearchOnToys)
{
    // N = 4: one 2x2 sub-array, two users. Discrete search over 16 levels per entry.
    int close = 0;
    const int instances = 30;
    for (int t = 0; t < instances; ++t)
    {
        GeometryParams gp;
        gp.n_rf_h = gp.n_rf_v = 1;
        const ChannelScenario sc = oracle::random_scenario(4000 + static_cast<std::uint64_t>(t), 2, 2, gp);
        std::mt19937_64 rng(17 + static_cast<std::uint64_t>(t));
        const HybridBeamformer bf = oracle::random_beamformer(rng, sc.geometry, 2, 1.0);
        const CMatrix H = channel_matrix(sc.geometry.frame_centers(), sc);
        const SlackState sl = update_slack(H, bf.precoder(sc.geometry), sc.noise_powers());
        const AnalogSubproblem a = analog_subproblem(H, bf.digital, bf.connectivity, sc.geometry, sl);

        double grid = -std::numeric_limits<double>::infinity();
        RVector ph(4);
        for (int i = 0; i < 65536; ++i)
        {
            for (int j = 0, x = i; j < 4; ++j, x /= 16)
                ph(j) = kTwoPi * (x % 16) / 16.0;
            grid = std::max(grid, a.objective(unit_modulus(ph)));
        }
        const double start = a.objective(unit_modulus(bf.phases));
        const double got = a.objective(unit_modulus(solve_analog_continuation(a, bf.phases, {})));
        EXPECT_GE(got, start);
        close += got >= grid - 1e-3;
    }
    EXPECT_GE(close, instances * 9 / 10);
}
