// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails or overruns its time budget.
//
// --expect-fail P9,P11 marks known failures: the lines still read FAIL, and
// the exit status is 0 only when exactly those criteria fail.

#include "holosense/analysis.hpp"
#include "holosense/error.hpp"
#include "holosense/holography.hpp"
#include "holosense/patterns.hpp"
#include "holosense/pmcs.hpp"
#include "holosense/prony.hpp"
#include "holosense/random.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

using namespace holosense;

namespace
{
struct Outcome
{
    bool pass = false;
    std::string detail;
};

struct Criterion
{
    const char *id;
    const char *name;
    double budget_s;
    std::function<Outcome()> body;
};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// Best one-to-one matching distance between two small sets.
template <typename Dist>
std::vector<std::size_t> best_match(std::size_t n, Dist dist)
{
    std::vector<std::size_t> perm(n), best;
    std::iota(perm.begin(), perm.end(), 0);
    double best_cost = 1e300;
    do
    {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            c += dist(i, perm[i]);
        if (c < best_cost)
        {
            best_cost = c;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

CVector random_separated(Engine &eng, int n, double gap)
{
    return analysis::separated_roots(eng, n, gap);
}

CVector random_amplitudes(Engine &eng, int n, double lo, double hi)
{
    CVector b(n);
    for (int i = 0; i < n; ++i)
        b[i] = std::polar(uniform(eng, lo, hi), uniform(eng, -kPi, kPi));
    return b;
}

bool near_peak(const std::vector<Peak> &peaks, double theta, double phi, double tol)
{
    return std::any_of(peaks.begin(), peaks.end(), [&](const Peak &p) {
        return std::abs(p.theta_deg - theta) <= tol && std::abs(p.phi_deg - phi) <= tol;
    });
}

const std::vector<LosUser> &two_users()
{
    static const std::vector<LosUser> users{{deg2rad(90.0), 0.0, {1.0, 0.0}},
                                            {deg2rad(30.0), deg2rad(60.0), std::polar(1.0, kPi / 2)}};
    return users;
}

// ---------------------------------------------------------------------------

Outcome p1()
{
    const UpaGeometry g = UpaGeometry::make(16, 16);
    const ReferenceWave ref = ReferenceWave::normal_incidence();
    Engine eng(1001);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t)
    {
        CMatrix eo(16, 16);
        for (Eigen::Index i = 0; i < eo.size(); ++i)
            eo.data()[i] = complex_gaussian(eng, 1.0);
        const CMatrix rec = psis_recover(record_psi_set(eo, g, ref, NoiseModel{}), ref);
        worst = std::max(worst, (rec - eo).cwiseAbs().maxCoeff() / eo.cwiseAbs().maxCoeff());
    }
    return {worst < 1e-10, "max relative error " + fmt(worst) + " over 100 fields"};
}

PatternResult single_user_pattern(bool psis)
{
    const UpaGeometry g = UpaGeometry::make(16, 16, 0.5, 0.5, 3.5e9);
    const ReferenceWave ref = ReferenceWave::normal_incidence();
    const std::vector<LosUser> user{{deg2rad(70.0), deg2rad(40.0), {1.0, 0.0}}};
    const CMatrix eo = to_grid(g, received_field(g, user));
    CVector w;
    if (psis)
        w = to_flat(psis_recover(record_psi_set(eo, g, ref, NoiseModel{}), ref));
    else
        w = to_flat(naive_reconstruction_weights(record(eo, g, ref, NoiseModel{}), ref));
    return array_pattern(w, g, AngularGrid::front_hemisphere(1.0));
}

Outcome p2()
{
    const PatternResult p = single_user_pattern(false);
    // The reference (DC) term is a uniform weight vector, whose lobe is the
    // array broadside: (90, 0) in this angle convention.
    const bool dc = near_peak(p.peaks, 90.0, 0.0, 2.0);
    const bool obj = near_peak(p.peaks, 70.0, 40.0, 2.0);
    const bool conj = near_peak(p.peaks, 110.0, -40.0, 2.0);
    std::ostringstream os;
    os << "lobes: broadside(90,0) " << (dc ? "yes" : "no") << ", (70,40) " << (obj ? "yes" : "no") << ", (110,-40) "
       << (conj ? "yes" : "no") << "; " << p.peaks.size() << " peaks above -40 dB";
    return {dc && obj && conj, os.str()};
}

Outcome p3()
{
    const PatternResult p = single_user_pattern(true);
    if (p.peaks.empty())
        return {false, "no peaks"};
    const Peak &top = p.peaks[0];
    const bool at = std::abs(top.theta_deg - 70.0) <= 1.0 && std::abs(top.phi_deg - 40.0) <= 1.0;
    const double second = p.peaks.size() > 1 ? p.peaks[1].value : -300.0;
    return {at && second < -10.0, "main lobe (" + fmt(top.theta_deg) + ", " + fmt(top.phi_deg) +
                                      "), strongest other local maximum " + fmt(second) + " dB"};
}

Outcome p4()
{
    Engine eng(1004);
    double worst = 0.0;
    int draws = 0;
    for (int n = 1; n <= 3; ++n)
        for (int t = 0; t < 500; ++t, ++draws)
        {
            const CVector z = random_separated(eng, n, 0.3);
            const CVector b = random_amplitudes(eng, n, 0.5, 2.0);
            const CVector y = prony::vandermonde(z, 2 * n) * b;
            const prony::Estimate est = prony::estimate(y, {n, n, 0.1, prony::Solver::pseudoinverse});
            const auto m = best_match(n, [&](std::size_t i, std::size_t j) { return std::abs(est.roots_signal[j] - z[i]); });
            for (int i = 0; i < n; ++i)
            {
                worst = std::max(worst, std::abs(est.roots_signal[m[i]] - z[i]));
                worst = std::max(worst, std::abs(est.amplitudes[m[i]] - b[i]));
            }
        }
    return {worst < 1e-8, "max root/amplitude error " + fmt(worst) + " over " + std::to_string(draws) + " draws"};
}

Outcome p5()
{
    Engine eng(1005);
    double worst_signal = 0.0, worst_extra = 0.0;
    int bad = 0, cases = 0;
    for (int t = 0; t < 500; ++t)
    {
        const CVector z = random_separated(eng, 2, 0.3);
        const CVector b = random_amplitudes(eng, 2, 0.5, 1.5);
        const CVector y = prony::vandermonde(z, 16) * b;
        for (int pe = 3; pe <= 14; ++pe, ++cases)
        {
            const prony::Estimate est = prony::estimate(y, {2, pe, 0.1, prony::Solver::pseudoinverse});
            double sig = 0.0;
            for (Eigen::Index i = 0; i < 2; ++i)
                sig = std::max(sig, std::abs(std::abs(est.roots_signal[i]) - 1.0));
            double extra = 0.0;
            int inside = 0;
            std::vector<double> mods;
            for (Eigen::Index i = 0; i < est.roots_all.size(); ++i)
                mods.push_back(std::abs(est.roots_all[i]));
            std::sort(mods.begin(), mods.end());
            for (int i = 0; i < pe - 2; ++i)
            {
                extra = std::max(extra, mods[i]);
                inside += mods[i] < 1.0 - 1e-6;
            }
            worst_signal = std::max(worst_signal, sig);
            worst_extra = std::max(worst_extra, extra);
            bad += !(sig < 1e-6 && inside == pe - 2);
        }
    }
    return {bad == 0, "max | |z_signal| - 1 | " + fmt(worst_signal) + ", max extraneous |z| " + fmt(worst_extra) +
                          ", " + std::to_string(bad) + "/" + std::to_string(cases) + " violations"};
}

Outcome p6()
{
    std::ostringstream os;
    bool ok = true;
    for (int K : {16, 64, 256})
    {
        Engine eng(derive_seed(1006, K));
        const double gap = analysis::separation_threshold(K);
        const int n_max = static_cast<int>(std::ceil(2.0 * kPi / gap)) - 1;
        int held = 0;
        double worst_ratio = 0.0;
        for (int t = 0; t < 1000; ++t)
        {
            const int n = 1 + static_cast<int>(eng() % static_cast<std::uint64_t>(n_max));
            const analysis::Lemma2Report r = analysis::lemma2_check(random_separated(eng, n, gap), K);
            if (!r.separation_ok)
                return {false, "generator produced an unseparated set"};
            held += r.holds;
            worst_ratio = std::max(worst_ratio, r.norm_L_sq / r.bound);
        }
        ok = ok && held == 1000;
        os << "K=" << K << ": " << held << "/1000 (max ||L||^2 / (3/K) = " << fmt(worst_ratio) << ") ";
    }
    return {ok, os.str()};
}

Outcome p7()
{
    Engine eng(1007);
    const int K = 64, N = 2;
    int held = 0;
    double worst_ratio = 0.0;
    for (int t = 0; t < 1000; ++t)
    {
        const analysis::BoundedRecord rec =
            analysis::bounded_noise_record(eng, K, N, 1e-3, analysis::separation_threshold(K));
        const prony::Estimate est = prony::estimate(rec.noisy, {N, 10, 0.1, prony::Solver::pseudoinverse});
        const CVector z = est.roots_signal.array() / est.roots_signal.array().abs();
        const analysis::Lemma3Sample s = analysis::lemma3_instance(rec.clean, rec.noisy, rec.roots, rec.amplitudes, z);
        if (!s.separation_ok)
            return {false, "generator produced an unseparated set"};
        held += s.holds;
        worst_ratio = std::max(worst_ratio, s.measured / s.bound);
    }
    return {held == 1000,
            std::to_string(held) + "/1000 within the bound (max measured/bound " + fmt(worst_ratio) + ")"};
}

Outcome p8()
{
    const std::vector<std::pair<int, int>> sizes{{4, 4}, {8, 8}, {16, 16}, {32, 32}};
    const auto trend = analysis::theorem1_trend(two_users(), 10.0, sizes, 100, 1008, 10, 1);
    std::ostringstream os;
    os << "mean NMSE dB:";
    for (const auto &p : trend)
        os << " N_t=" << p.n_t << ": " << fmt(p.mean_nmse_db) << " (" << p.failures << " failed)";
    return {trend.size() == sizes.size() && analysis::strictly_decreasing(trend), os.str()};
}

// Mean NMSE (dB) per order with common noise draws across orders.
std::vector<double> order_sweep(std::optional<double> snr, int trials, std::uint64_t seed, int &failures)
{
    const UpaGeometry g = UpaGeometry::make(16, 16);
    std::vector<double> out;
    for (int pe = 2; pe <= 14; ++pe)
    {
        pmcs::Config cfg = pmcs::Config::for_geometry(g, 2, pe);
        double sum = 0.0;
        for (int t = 0; t < trials; ++t)
        {
            const analysis::TrialOutcome o = analysis::pipeline_trial(g, two_users(), snr, cfg, derive_seed(seed, t));
            sum += o.ratio;
            failures += o.failed;
        }
        out.push_back(std::max(-150.0, pmcs::ratio_to_db(sum / trials)));
    }
    return out;
}

Outcome p9()
{
    std::ostringstream os;
    bool ok = true;
    for (const std::optional<double> snr : {std::optional<double>{}, std::optional<double>{20.0}})
    {
        int failures = 0;
        const std::vector<double> v = order_sweep(snr, snr ? 300 : 1, 1009, failures);
        const auto mid_begin = v.begin() + 1, mid_end = v.end() - 1;
        const double mid_min = *std::min_element(mid_begin, mid_end);
        const double mid_max = *std::max_element(mid_begin, mid_end);
        const bool flat = mid_max - mid_min <= 3.0;
        const bool edges = v.front() >= mid_min && v.back() >= mid_min;
        ok = ok && flat && edges;
        os << (snr ? "SNR 20 dB" : "noiseless") << ": P_e=2 " << fmt(v.front()) << ", mid [" << fmt(mid_min) << ", "
           << fmt(mid_max) << "], P_e=14 " << fmt(v.back()) << " dB; ";
    }
    return {ok, os.str()};
}

Outcome p10()
{
    const UpaGeometry g = UpaGeometry::make(16, 16);
    const ReferenceWave ref = ReferenceWave::normal_incidence();
    const pmcs::Config cfg = pmcs::Config::for_geometry(g, 2);
    Engine eng(1010);
    const double min_sep = 2.0 * kPi / 64.0;
    double worst = 0.0;
    int mispaired = 0, failures = 0;
    for (int t = 0; t < 200; ++t)
    {
        std::vector<LosUser> users(2);
        // Draw until both spatial frequencies are separated and the
        // amplitudes are distinct.
        for (;;)
        {
            for (LosUser &u : users)
            {
                u.theta = uniform(eng, deg2rad(10.0), deg2rad(170.0));
                u.phi = uniform(eng, deg2rad(-80.0), deg2rad(80.0));
                u.b = std::polar(uniform(eng, 0.5, 1.5), uniform(eng, -kPi, kPi));
            }
            const double wv = std::abs(wrap_angle(kPi * (std::cos(users[0].theta) - std::cos(users[1].theta))));
            const double wh = std::abs(wrap_angle(kPi * (std::sin(users[0].theta) * std::sin(users[0].phi) -
                                                         std::sin(users[1].theta) * std::sin(users[1].phi))));
            if (wv >= min_sep && wh >= min_sep && std::abs(users[0].b - users[1].b) > 0.1)
                break;
        }
        const CMatrix eo = to_grid(g, received_field(g, users));
        const CMatrix rec = psis_recover(record_psi_set(eo, g, ref, NoiseModel{}), ref);
        pmcs::Result r;
        try
        {
            r = pmcs::segment(rec, cfg, g);
        }
        catch (const Error &)
        {
            ++failures;
            continue;
        }
        // Pairing is correct when each estimate's (z_h, z_v) both belong to
        // the same true user.
        for (const pmcs::UserEstimate &e : r.users)
        {
            std::size_t best = 0;
            double best_err = 1e300;
            for (std::size_t u = 0; u < 2; ++u)
            {
                const CVector h = user_channel(g, users[u]);
                const double err = (e.channel - h).norm() / h.norm();
                if (err < best_err)
                {
                    best_err = err;
                    best = u;
                }
            }
            const CMatrix truth = to_grid(g, user_channel(g, users[best]));
            const Complex zh = truth(0, 1) / truth(0, 0), zv = truth(1, 0) / truth(0, 0);
            mispaired += !(std::abs(e.z_h - zh) < 1e-6 && std::abs(e.z_v - zv) < 1e-6);
            worst = std::max(worst, best_err);
        }
    }
    return {worst < 1e-8 && mispaired == 0 && failures == 0,
            "max per-user relative error " + fmt(worst) + ", " + std::to_string(mispaired) + " mispaired, " +
                std::to_string(failures) + " failed, 200 scenarios"};
}

// Strongest local maximum per lobe: maxima closer than one null-to-null
// beamwidth (2 / n in direction cosines) to a stronger one are dropped.
std::vector<Peak> lobe_peaks(const std::vector<Peak> &peaks, const UpaGeometry &g)
{
    const double width = 2.0 / std::min(g.n_v, g.n_h);
    auto cosines = [](const Peak &p) {
        const double th = deg2rad(p.theta_deg), ph = deg2rad(p.phi_deg);
        return std::pair{std::cos(th), std::sin(th) * std::sin(ph)};
    };
    std::vector<Peak> kept;
    for (const Peak &p : peaks)
    {
        const auto [uv, uh] = cosines(p);
        const bool shadowed = std::any_of(kept.begin(), kept.end(), [&](const Peak &k) {
            const auto [kv, kh] = cosines(k);
            return std::hypot(uv - kv, uh - kh) < width;
        });
        if (!shadowed)
            kept.push_back(p);
    }
    return kept;
}

Outcome p11()
{
    const UpaGeometry g = UpaGeometry::make(16, 16);
    const ReferenceWave ref = ReferenceWave::normal_incidence();
    const std::vector<LosUser> &users = two_users();
    const pmcs::Config cfg = pmcs::Config::for_geometry(g, 2);
    const CMatrix eo = to_grid(g, received_field(g, users));
    std::ostringstream os;
    bool ok = true;
    for (const double snr : {10.0, 20.0, 30.0})
    {
        const double sigma = noise_sigma_for_snr(eo, snr);
        double worst = 0.0;
        int disagree = 0, failures = 0;
        for (int t = 0; t < 100; ++t)
        {
            const CMatrix rec =
                psis_recover(record_psi_set(eo, g, ref, {sigma, derive_seed(derive_seed(1011, t), snr)}), ref);
            pmcs::Result r;
            try
            {
                r = pmcs::segment(rec, cfg, g);
            }
            catch (const Error &)
            {
                ++failures;
                continue;
            }
            const std::vector<Peak> lobes = lobe_peaks(analysis::beamscan_oracle(rec, g, 0.5).peaks, g);
            if (lobes.size() < 2)
            {
                ++disagree;
                continue;
            }
            const auto m = best_match(2, [&](std::size_t i, std::size_t j) {
                return std::hypot(r.users[i].theta_deg - lobes[j].theta_deg, r.users[i].phi_deg - lobes[j].phi_deg);
            });
            double d = 0.0;
            for (std::size_t i = 0; i < 2; ++i)
                d = std::max({d, std::abs(r.users[i].theta_deg - lobes[m[i]].theta_deg),
                              std::abs(r.users[i].phi_deg - lobes[m[i]].phi_deg)});
            worst = std::max(worst, d);
            disagree += d > 1.0;
        }
        ok = ok && disagree == 0 && failures == 0;
        os << snr << " dB: " << disagree << " trials off by > 1 deg (max " << fmt(worst) << "), " << failures
           << " failed; ";
    }
    return {ok, os.str()};
}
} // namespace

int main(int argc, char **argv)
{
    std::set<std::string> expected;
    for (int i = 1; i < argc; ++i)
    {
        const std::string arg = argv[i];
        if (arg == "--expect-fail" && i + 1 < argc)
        {
            std::stringstream ids(argv[++i]);
            for (std::string id; std::getline(ids, id, ',');)
                expected.insert(id);
        }
        else
        {
            std::fprintf(stderr, "usage: %s [--expect-fail ID[,ID...]]\n", argv[0]);
            return 2;
        }
    }

    spdlog::set_level(spdlog::level::warn);
    const std::vector<Criterion> criteria{
        {"P1", "PSIS exactness", 1.0, p1},
        {"P2", "raw hologram lobes", 5.0, p2},
        {"P3", "PSIS pattern cleanup", 5.0, p3},
        {"P4", "Prony exact recovery", 2.0, p4},
        {"P5", "extraneous roots inside the circle", 5.0, p5},
        {"P6", "Vandermonde pseudo-inverse bound", 30.0, p6},
        {"P7", "amplitude error bound", 30.0, p7},
        {"P8", "NMSE decreases with array size", 180.0, p8},
        {"P9", "estimation-order boundary behaviour", 120.0, p9},
        {"P10", "noiseless end-to-end exactness", 60.0, p10},
        {"P11", "beamscan oracle agreement", 120.0, p11},
    };

    int failed = 0;
    std::set<std::string> failed_ids;
    for (const Criterion &c : criteria)
    {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = c.body();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.budget_s;
        const bool pass = o.pass && in_time;
        failed += !pass;
        if (!pass)
            failed_ids.insert(c.id);
        std::printf("%-4s %s  %s: %s [%.2f s / %.0f s%s]\n", c.id, pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                    secs, c.budget_s, in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    if (!expected.empty())
    {
        std::string listed;
        for (const std::string &id : expected)
            listed += (listed.empty() ? "" : ",") + id;
        std::printf("expected failures: %s (%s)\n", listed.c_str(),
                    failed_ids == expected ? "matched" : "MISMATCH");
        return failed_ids == expected ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
