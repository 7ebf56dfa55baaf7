#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "holosense/analysis.hpp"
#include "holosense/error.hpp"
#include "holosense/prony.hpp"
#include "oracles.hpp"

using namespace holosense;
using namespace holosense::analysis;

TEST_CASE("separation threshold, frozen values")
{
    CHECK(separation_threshold(256) == doctest::Approx(0.2776801836348979).epsilon(1e-14));
    CHECK(separation_threshold(16) == doctest::Approx(1.1107207345395915).epsilon(1e-14));
}

TEST_CASE("first bound: noiseless limit and linearity")
{
    BoundInputs in;
    in.K = 16;
    in.N = 2;
    in.est_order = 4;
    in.sigma1 = 20.0;
    in.norm_Y1 = 20.0;
    in.norm_y0 = 5.0;
    in.norm_h = 1.5;
    in.beta0_abs = 0.8;
    CHECK(lemma1_bound(in) == 0.0);

    in.epsilon = 1e-3;
    in.delta_sigma1_sq = 0.5;
    // Frozen from an independent numpy evaluation.
    CHECK(lemma1_bound(in) == doctest::Approx(2.050467707173347).epsilon(1e-12));

    in.delta_sigma1_sq = 0.0;
    const double one = lemma1_bound(in);
    in.epsilon = 2e-3;
    CHECK(lemma1_bound(in) == doctest::Approx(2.0 * one));

    in.beta0_abs = 0.0;
    CHECK_THROWS_AS(lemma1_bound(in), DomainError);
}

TEST_CASE("third bound: special cases and frozen value")
{
    BoundInputs in;
    in.K = 64;
    in.N = 2;
    CHECK(lemma3_bound(in, 10.0) == 0.0);
    in.epsilon = 1e-3;
    CHECK(lemma3_bound(in, 10.0) == doctest::Approx(std::sqrt(3.0) * 1e-3));
    in.delta = 1e-4;
    CHECK(lemma3_bound(in, 10.0) == doctest::Approx(0.02109877818713746).epsilon(1e-12));
}

TEST_CASE("second lemma: single column and a frozen K = 256 case")
{
    const Lemma2Report one = lemma2_check(CVector::Constant(1, std::polar(1.0, 0.3)), 16);
    CHECK(one.norm_L_sq == doctest::Approx(1.0 / 16));
    CHECK(one.holds);

    CVector z(4);
    for (int i = 0; i < 4; ++i)
        z[i] = std::polar(1.0, 0.1 + 0.3 * i);
    const Lemma2Report r = lemma2_check(z, 256);
    CHECK(r.separation_ok);
    CHECK(r.holds);
    CHECK(r.norm_L_sq == doctest::Approx(0.003978868567377495).epsilon(1e-9));
    CHECK(r.norm_L_sq == doctest::Approx(oracle::lemma2_norm_sq(z, 256)).epsilon(1e-9));
    CHECK(r.bound == doctest::Approx(3.0 / 256));

    CVector close(2);
    close << std::polar(1.0, 0.0), std::polar(1.0, 0.05);
    CHECK_FALSE(lemma2_check(close, 16).separation_ok);

    CVector repeated(2);
    repeated << 1.0, 1.0;
    CHECK_THROWS_AS(lemma2_check(repeated, 16), DomainError);
    CHECK_THROWS_AS(lemma2_check(CVector::Constant(1, 1.1), 16), DomainError);
}

TEST_CASE("second lemma holds on every separated set, K in {16, 64, 256, 1024}")
{
    for (int K : {16, 64, 256, 1024})
    {
        Engine eng(derive_seed(101, K));
        const double gap = separation_threshold(K);
        const int n_max = static_cast<int>(std::ceil(2 * kPi / gap)) - 1;
        for (int t = 0; t < 100; ++t)
        {
            const int n = 1 + static_cast<int>(eng() % n_max);
            const CVector z = separated_roots(eng, n, gap);
            const Lemma2Report r = lemma2_check(z, K);
            REQUIRE(r.separation_ok);
            CHECK_MESSAGE(r.holds, "K=" << K << " N=" << n << " q=" << r.q << " ||L||^2=" << r.norm_L_sq);
        }
    }
}

TEST_CASE("separated roots respect the gap")
{
    Engine eng(5);
    for (int t = 0; t < 100; ++t)
    {
        const CVector z = separated_roots(eng, 5, 1.0);
        CHECK(min_circular_separation(z) > 1.0);
        CHECK((z.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS_AS(separated_roots(eng, 7, 1.0), DomainError);
}

TEST_CASE("third lemma with an injected frequency error, K = 64")
{
    Engine eng(21);
    int held = 0;
    const int draws = 1000;
    for (int t = 0; t < draws; ++t)
    {
        const BoundedRecord rec = bounded_noise_record(eng, 64, 2, 1e-3, separation_threshold(64));
        CVector est(2);
        for (int n = 0; n < 2; ++n)
            est[n] = rec.roots[n] * std::polar(1.0, (eng() & 1) ? 1e-4 : -1e-4);
        const Lemma3Sample s = lemma3_instance(rec.clean, rec.noisy, rec.roots, rec.amplitudes, est);
        CHECK(s.inputs.delta == doctest::Approx(1e-4).epsilon(1e-6));
        CHECK(s.inputs.epsilon <= 1e-3);
        held += s.holds;
    }
    CHECK(held == draws);
}

TEST_CASE("first lemma on bounded-noise draws, K = 16, N = 2, P_e = 4")
{
    // The bound is derived for high SNR; the rate is reported, and must be
    // high at this noise level.
    Engine eng(33);
    int held = 0, total = 0;
    for (int t = 0; t < 1000; ++t)
    {
        const BoundedRecord rec = bounded_noise_record(eng, 16, 2, 1e-3, separation_threshold(16) / 2);
        for (const Lemma1Sample &s : lemma1_instance(rec.clean, rec.noisy, rec.roots, 4))
        {
            ++total;
            held += s.holds;
            CHECK(s.bound > 0.0);
        }
    }
    MESSAGE("first-bound hold rate: " << held << "/" << total);
    CHECK(held == total);
}

TEST_CASE("pipeline trial, noiseless and failures")
{
    const UpaGeometry g = UpaGeometry::make(16, 16);
    const std::vector<LosUser> users{{kPi / 2, 0.0, {1.0, 0.0}}, {deg2rad(30.0), deg2rad(60.0), {0.0, 1.0}}};
    const TrialOutcome ok = pipeline_trial(g, users, std::nullopt, pmcs::Config::for_geometry(g, 2), 1);
    CHECK_FALSE(ok.failed);
    CHECK(ok.ratio < 1e-15);

    const std::vector<LosUser> twins{{deg2rad(60.0), 0.2, {1.0, 0.0}}, {deg2rad(100.0), -0.5, {1.0, 0.0}}};
    const TrialOutcome bad = pipeline_trial(g, twins, std::nullopt, pmcs::Config::for_geometry(g, 2), 1);
    CHECK(bad.failed);
    CHECK(bad.ratio == 1.0);
}

TEST_CASE("trend: noiseless floor, skipping and determinism")
{
    const std::vector<LosUser> users{{kPi / 2, 0.0, {1.0, 0.0}}, {deg2rad(30.0), deg2rad(60.0), {0.0, 1.0}}};
    const std::vector<std::pair<int, int>> sizes{{2, 2}, {4, 4}, {8, 8}};
    const std::vector<TrendPoint> clean = theorem1_trend(users, std::nullopt, sizes, 3, 9);
    REQUIRE(clean.size() == 2); // 2x2 cannot host two users
    for (const TrendPoint &p : clean)
        CHECK(p.mean_nmse_db < -150.0);

    const std::vector<std::pair<int, int>> one{{8, 8}};
    const auto a = theorem1_trend(users, 10.0, one, 20, 4, 10, 1);
    const auto b = theorem1_trend(users, 10.0, one, 20, 4, 10, 3);
    CHECK(a[0].ratios == b[0].ratios);
    CHECK(a[0].mean_nmse_db == b[0].mean_nmse_db);
}

TEST_CASE("beamscan oracle")
{
    const UpaGeometry g = UpaGeometry::make(16, 16);
    const std::vector<LosUser> one{{deg2rad(70.0), deg2rad(40.0), {1.0, 0.0}}};
    const BeamscanResult r = beamscan_oracle(to_grid(g, received_field(g, one)), g, 1.0);
    REQUIRE(!r.peaks.empty());
    CHECK(r.peaks[0].theta_deg == doctest::Approx(70.0));
    CHECK(r.peaks[0].phi_deg == doctest::Approx(40.0));
    CHECK(r.peaks[0].value == doctest::Approx(1.0));

    const BeamscanResult zero = beamscan_oracle(CMatrix::Zero(16, 16), g, 1.0);
    CHECK(zero.power.cwiseAbs().maxCoeff() == 0.0);
    CHECK(zero.peaks.empty());

    const std::vector<LosUser> two{{deg2rad(60.0), deg2rad(-30.0), {1.0, 0.0}},
                                   {deg2rad(120.0), deg2rad(35.0), {0.0, 0.9}}};
    const BeamscanResult r2 = beamscan_oracle(to_grid(g, received_field(g, two)), g, 1.0);
    REQUIRE(r2.peaks.size() >= 2);
    for (const LosUser &u : two)
    {
        const bool found = std::any_of(r2.peaks.begin(), r2.peaks.begin() + 2, [&](const Peak &p) {
            return std::abs(p.theta_deg - rad2deg(u.theta)) <= 1.0 && std::abs(p.phi_deg - rad2deg(u.phi)) <= 1.0;
        });
        CHECK(found);
    }
    CHECK_THROWS_AS(beamscan_oracle(CMatrix::Zero(16, 16), g, 0.0), DomainError);
}
