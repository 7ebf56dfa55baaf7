// SPDX-License-Identifier: Apache-2.0
//
// holosense: channel sensing for holographic interference surfaces
// Copyright (C) 2026 The holosense authors
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

#include "holosense/analysis.hpp"
#include "holosense/error.hpp"
#include "holosense/prony.hpp"
#include "holosense/random.hpp"
#include "parallel.hpp"

#include <Eigen/SVD>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace holosense::analysis
{

namespace
{
double spectral_norm(const CMatrix &m)
{
    if (m.size() == 0)
        return 0.0;
    return Eigen::JacobiSVD<CMatrix>(m).singularValues()(0);
}

// Best matching of estimates to truth under `dist`; returns, for every true
// index, the estimate index. Sizes are small, so the search is exhaustive.
template <typename Dist>
std::vector<std::size_t> match(std::size_t n, Dist dist)
{
    std::vector<std::size_t> perm(n), best;
    std::iota(perm.begin(), perm.end(), 0);
    double best_cost = std::numeric_limits<double>::infinity();
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

double arc_distance(Complex a, Complex b)
{
    return std::abs(wrap_angle(std::arg(a) - std::arg(b)));
}
} // namespace

double lemma1_bound(const BoundInputs &in)
{
    if (!(in.beta0_abs > 0.0))
        throw DomainError("beta0 vanishes: the prediction polynomial has coincident roots");
    if (!(in.sigma1 > 0.0))
        throw DomainError("sigma1 must be positive");
    const double kn = static_cast<double>(in.K - in.N);
    const double bracket = in.norm_Y1 * std::sqrt(kn) * in.epsilon / (in.sigma1 * in.sigma1) +
                           in.norm_y0 * kn * in.epsilon + in.delta_sigma1_sq * in.norm_h;
    return std::sqrt(static_cast<double>(in.est_order)) / in.beta0_abs * bracket;
}

double lemma3_bound(const BoundInputs &in, double norm_y)
{
    const double k = static_cast<double>(in.K);
    return std::sqrt(3.0) / k * std::pow(k - 0.5, 1.5) * std::sqrt(static_cast<double>(in.N)) * in.delta * norm_y +
           std::sqrt(3.0) * in.epsilon;
}

double separation_threshold(int K)
{
    if (K < 1)
        throw DomainError("sample count must be positive");
    return kPi * std::sqrt(2.0 * K) / K;
}

double min_circular_separation(const CVector &z)
{
    if (z.size() < 2)
        return 2.0 * kPi;
    std::vector<double> w(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i)
        w[i] = std::arg(z[i]);
    std::sort(w.begin(), w.end());
    double q = w.front() + 2.0 * kPi - w.back();
    for (std::size_t i = 1; i < w.size(); ++i)
        q = std::min(q, w[i] - w[i - 1]);
    return q;
}

Lemma2Report lemma2_check(const CVector &z, int K)
{
    if (z.size() == 0)
        throw DomainError("no frequencies given");
    if (K < z.size())
        throw DomainError("fewer samples than frequencies");
    for (Eigen::Index i = 0; i < z.size(); ++i)
        if (std::abs(std::abs(z[i]) - 1.0) > 1e-9)
            throw DomainError("roots must lie on the unit circle");

    Lemma2Report r;
    r.q = min_circular_separation(z);
    if (r.q < 1e-12)
        throw DomainError("repeated frequency");
    r.threshold = separation_threshold(K);
    r.separation_ok = r.q > r.threshold;

    const CMatrix phi = prony::vandermonde(z, K);
    const CMatrix gram = phi.adjoint() * phi;
    const CMatrix L = gram.ldlt().solve(phi.adjoint());
    const double norm = spectral_norm(L);
    r.norm_L_sq = norm * norm;
    r.bound = 3.0 / K;
    r.holds = r.norm_L_sq <= r.bound;
    return r;
}

std::vector<Lemma1Sample> lemma1_instance(const CVector &clean, const CVector &noisy, const CVector &true_roots,
                                          int est_order)
{
    if (clean.size() != noisy.size())
        throw DomainError("clean and noisy records differ in length");
    const int K = static_cast<int>(clean.size());
    const int N = static_cast<int>(true_roots.size());
    const prony::Config cfg{N, est_order, 0.1, prony::Solver::pseudoinverse};
    cfg.validate(K);

    const CMatrix Y = prony::build_data_matrix(clean, est_order);
    const CMatrix Y1 = Y.rightCols(est_order);
    const CMatrix Y1_noisy = prony::build_data_matrix(noisy, est_order).rightCols(est_order);

    BoundInputs base;
    base.K = K;
    base.N = N;
    base.est_order = est_order;
    base.epsilon = (noisy - clean).cwiseAbs().maxCoeff();
    base.sigma1 = spectral_norm(Y1);
    base.norm_Y1 = base.sigma1; // ||Y1^H|| == ||Y1||
    base.norm_y0 = Y.col(0).norm();
    const double s1n = spectral_norm(Y1_noisy);
    base.delta_sigma1_sq = std::abs(s1n * s1n - base.sigma1 * base.sigma1);
    base.q = min_circular_separation(true_roots);

    const CVector h = prony::solve_min_norm(Y, N);
    base.norm_h = h.tail(est_order).norm();
    const CVector roots_all = prony::find_roots(h);

    const prony::Estimate est = prony::estimate(noisy, cfg);
    const std::vector<std::size_t> to_est = match(static_cast<std::size_t>(N), [&](std::size_t i, std::size_t j) {
        return std::abs(est.roots_signal[j] - true_roots[i]);
    });

    std::vector<Lemma1Sample> out;
    for (int n = 0; n < N; ++n)
    {
        const Complex zn = true_roots[n];
        Eigen::Index own = 0;
        (roots_all.array() - zn).abs().minCoeff(&own);
        Complex beta0{1.0, 0.0};
        for (Eigen::Index i = 0; i < roots_all.size(); ++i)
            if (i != own)
                beta0 *= zn - roots_all[i];

        Lemma1Sample s;
        s.inputs = base;
        s.inputs.beta0_abs = std::abs(beta0);
        s.measured = std::abs(est.roots_signal[to_est[n]] - zn);
        s.bound = lemma1_bound(s.inputs);
        s.holds = s.measured <= s.bound;
        out.push_back(s);
    }
    return out;
}

Lemma3Sample lemma3_instance(const CVector &clean, const CVector &noisy, const CVector &true_roots,
                             const CVector &true_amplitudes, const CVector &estimated_roots)
{
    if (clean.size() != noisy.size())
        throw DomainError("clean and noisy records differ in length");
    if (true_roots.size() != true_amplitudes.size() || true_roots.size() != estimated_roots.size())
        throw DomainError("root and amplitude sets differ in size");
    const auto n = static_cast<std::size_t>(true_roots.size());

    const std::vector<std::size_t> to_est = match(
        n, [&](std::size_t i, std::size_t j) { return arc_distance(estimated_roots[j], true_roots[i]); });
    const CVector b_fit = prony::fit_amplitudes(noisy, estimated_roots);

    Lemma3Sample s;
    s.inputs.K = static_cast<int>(clean.size());
    s.inputs.N = static_cast<int>(n);
    s.inputs.epsilon = (noisy - clean).cwiseAbs().maxCoeff();
    s.inputs.q = min_circular_separation(true_roots);
    CVector b_hat(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        b_hat[i] = b_fit[to_est[i]];
        s.inputs.delta = std::max(s.inputs.delta, arc_distance(estimated_roots[to_est[i]], true_roots[i]));
    }
    s.norm_y = noisy.norm();
    s.measured = (b_hat - true_amplitudes).norm();
    s.bound = lemma3_bound(s.inputs, s.norm_y);
    s.separation_ok = s.inputs.q > separation_threshold(s.inputs.K);
    s.holds = s.measured <= s.bound;
    return s;
}

CVector separated_roots(Engine &engine, int n, double min_gap)
{
    if (n < 1)
        throw DomainError("at least one root is required");
    const double slack = 2.0 * kPi - n * min_gap;
    if (!(min_gap > 0.0) || !(slack > 0.0))
        throw DomainError("cannot place the roots with the requested gap");

    std::vector<double> share(n);
    for (double &s : share)
        s = uniform(engine, 0.0, 1.0);
    const double total = std::accumulate(share.begin(), share.end(), 0.0);
    double w = uniform(engine, -kPi, kPi);
    CVector z(n);
    for (int i = 0; i < n; ++i)
    {
        z[i] = std::polar(1.0, w);
        // keep a sliver of every share so no gap collapses onto min_gap
        w += min_gap + slack * (0.999 * share[i] / total + 0.001 / n);
    }
    return z;
}

BoundedRecord bounded_noise_record(Engine &engine, int K, int N, double epsilon, double min_gap)
{
    BoundedRecord r;
    r.roots = separated_roots(engine, N, min_gap);
    r.amplitudes.resize(N);
    for (int n = 0; n < N; ++n)
        r.amplitudes[n] = std::polar(uniform(engine, 0.5, 1.5), uniform(engine, -kPi, kPi));
    r.clean = prony::vandermonde(r.roots, K) * r.amplitudes;
    r.noisy = r.clean;
    for (int k = 0; k < K; ++k)
        r.noisy[k] += uniform_in_disk(engine, epsilon);
    return r;
}

TrialOutcome pipeline_trial(const UpaGeometry &geom, std::span<const LosUser> users, std::optional<double> snr_db,
                            const pmcs::Config &config, std::uint64_t seed, const ReferenceWave &ref)
{
    const CMatrix object = to_grid(geom, received_field(geom, users));
    const double sigma = snr_db ? noise_sigma_for_snr(object, *snr_db) : 0.0;
    const HologramSet set = record_psi_set(object, geom, ref, {sigma, seed});
    const CMatrix recovered = psis_recover(set, ref);

    std::vector<CVector> truth;
    truth.reserve(users.size());
    for (const LosUser &u : users)
        truth.push_back(user_channel(geom, u));

    TrialOutcome out;
    try
    {
        out.result = pmcs::segment(recovered, config, geom);
        out.ratio = pmcs::score(out.result, truth);
    }
    catch (const PairingError &e)
    {
        out.failed = true;
        out.failure = e.what();
    }
    catch (const EstimationError &e)
    {
        out.failed = true;
        out.failure = e.what();
    }
    catch (const IllConditionedError &e)
    {
        out.failed = true;
        out.failure = e.what();
    }
    if (out.failed)
    {
        out.ratio = 1.0;
        out.result = {};
        SPDLOG_DEBUG("trial failed: {}", out.failure);
    }
    return out;
}

std::vector<TrendPoint> theorem1_trend(std::span<const LosUser> users, std::optional<double> snr_db,
                                       std::span<const std::pair<int, int>> sizes, int trials, std::uint64_t seed,
                                       int est_order, int jobs, double f_c, double spacing_wl)
{
    if (trials < 1)
        throw DomainError("at least one trial is required");
    const int n_users = static_cast<int>(users.size());

    std::vector<TrendPoint> out;
    for (std::size_t s = 0; s < sizes.size(); ++s)
    {
        const auto [n_v, n_h] = sizes[s];
        if (n_users > std::min(n_v, n_h) - n_users)
        {
            spdlog::warn("skipping {}x{}: too small for {} users", n_v, n_h, n_users);
            continue;
        }
        const UpaGeometry geom = UpaGeometry::make(n_v, n_h, spacing_wl, spacing_wl, f_c);
        const pmcs::Config cfg = pmcs::Config::for_geometry(geom, n_users, est_order);
        const std::uint64_t size_seed = derive_seed(seed, s);

        TrendPoint p;
        p.n_v = n_v;
        p.n_h = n_h;
        p.n_t = geom.unit_count();
        p.est_order = cfg.est_order_h;
        p.ratios.assign(trials, 1.0);
        std::vector<char> failed(trials, 0);
        detail::parallel_for(static_cast<std::size_t>(trials), jobs, [&](std::size_t t) {
            const TrialOutcome r = pipeline_trial(geom, users, snr_db, cfg, derive_seed(size_seed, t));
            p.ratios[t] = r.ratio;
            failed[t] = r.failed;
        });
        p.failures = static_cast<int>(std::count(failed.begin(), failed.end(), 1));
        const double mean = std::accumulate(p.ratios.begin(), p.ratios.end(), 0.0) / trials;
        p.mean_nmse_db = pmcs::ratio_to_db(mean);
        spdlog::info("{}x{}: mean NMSE {:.3f} dB ({} failed trials)", n_v, n_h, p.mean_nmse_db, p.failures);
        out.push_back(std::move(p));
    }
    return out;
}

bool strictly_decreasing(std::span<const TrendPoint> trend)
{
    for (std::size_t i = 1; i < trend.size(); ++i)
        if (!(trend[i].mean_nmse_db < trend[i - 1].mean_nmse_db))
            return false;
    return true;
}

BeamscanResult beamscan_oracle(const CMatrix &field, const UpaGeometry &geom, double resolution_deg)
{
    if (!(resolution_deg > 0.0))
        throw DomainError("scan resolution must be positive");
    BeamscanResult out;
    out.grid = AngularGrid::front_hemisphere(resolution_deg);
    const double nt = static_cast<double>(geom.unit_count());
    out.power = beam_power(to_flat(field), geom, out.grid) / (nt * nt);
    out.peaks = local_maxima(out.power, out.grid, 0.0);
    return out;
}

} // namespace holosense::analysis
