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

#include "holosense/prony.hpp"
#include "holosense/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace holosense::prony
{

namespace
{
constexpr double kRankTolerance = 1e-10;
constexpr double kMonicTolerance = 1e-12;
constexpr double kMinRootDistance = 1e-9;
} // namespace

Solver parse_solver(std::string_view name)
{
    if (name == "pseudoinverse")
        return Solver::pseudoinverse;
    if (name == "total-least-squares" || name == "tls")
        return Solver::total_least_squares;
    throw DomainError("unknown solver '" + std::string(name) + "'");
}

std::string_view to_string(Solver solver)
{
    return solver == Solver::pseudoinverse ? "pseudoinverse" : "total-least-squares";
}

void Config::validate(int sample_count) const
{
    if (n_signals < 1)
        throw DomainError("number of signals must be at least 1");
    if (est_order < n_signals || est_order > sample_count - n_signals)
        throw DomainError("estimation order " + std::to_string(est_order) + " outside [" +
                          std::to_string(n_signals) + ", " + std::to_string(sample_count - n_signals) +
                          "] for " + std::to_string(sample_count) + " samples");
    if (!(root_tolerance > 0.0))
        throw DomainError("root tolerance must be positive");
}

CMatrix build_data_matrix(const CVector &samples, int est_order)
{
    const auto k = static_cast<int>(samples.size());
    if (est_order < 0 || k < est_order + 1)
        throw DomainError("need at least P_e + 1 = " + std::to_string(est_order + 1) + " samples, got " +
                          std::to_string(k));
    CMatrix y(k - est_order, est_order + 1);
    for (int r = 0; r < y.rows(); ++r)
        for (int c = 0; c <= est_order; ++c)
            y(r, c) = samples[est_order + r - c];
    return y;
}

int effective_rank(const CMatrix &m)
{
    if (m.size() == 0)
        return 0;
    const RVector sv = Eigen::JacobiSVD<CMatrix>(m).singularValues();
    if (sv.size() == 0 || sv[0] == 0.0)
        return 0;
    return static_cast<int>((sv.array() > kRankTolerance * sv[0]).count());
}

CVector solve_min_norm(const CMatrix &data, int rank, Solver solver)
{
    if (data.cols() < 2)
        throw DomainError("data matrix needs at least two columns");
    if (data.cwiseAbs().maxCoeff() == 0.0)
        throw DegenerateInputError("data matrix is identically zero");

    const Eigen::Index order = data.cols() - 1;
    CVector h(order + 1);
    h[0] = 1.0;

    if (solver == Solver::pseudoinverse)
    {
        const CMatrix y1 = data.rightCols(order);
        const CVector y0 = data.col(0);
        Eigen::JacobiSVD<CMatrix> svd(y1, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const RVector &sv = svd.singularValues();
        if (sv[0] == 0.0)
            throw DegenerateInputError("prediction block of the data matrix is identically zero");
        int keep = static_cast<int>((sv.array() > kRankTolerance * sv[0]).count());
        if (rank > 0)
            keep = std::min(keep, rank);
        // h_rest = -V_r S_r^{-1} U_r^H y0
        CVector coeff = svd.matrixU().leftCols(keep).adjoint() * y0;
        coeff.array() /= sv.head(keep).array().cast<Complex>();
        h.tail(order) = -svd.matrixV().leftCols(keep) * coeff;
        return h;
    }

    Eigen::JacobiSVD<CMatrix> svd(data, Eigen::ComputeFullV);
    const RVector &sv = svd.singularValues();
    int keep = static_cast<int>((sv.array() > kRankTolerance * sv[0]).count());
    if (rank > 0)
        keep = std::min(keep, rank);
    keep = std::min<int>(keep, static_cast<int>(order)); // noise subspace is never empty
    const CMatrix v2 = svd.matrixV().rightCols(order + 1 - keep);
    const CVector lead = v2.row(0).adjoint();
    const double lead_norm2 = lead.squaredNorm();
    if (lead_norm2 < 1e-300)
        throw DegenerateInputError("noise subspace has no component along h_0");
    h = v2 * lead / lead_norm2;
    h[0] = 1.0;
    return h;
}

CVector find_roots(const CVector &coeffs)
{
    if (coeffs.size() < 2)
        throw DomainError("polynomial needs degree at least 1");
    if (std::abs(coeffs[0] - Complex(1.0, 0.0)) > kMonicTolerance)
        throw DomainError("polynomial is not monic (leading coefficient must be 1)");

    const Eigen::Index degree = coeffs.size() - 1;
    if (degree == 1)
        return CVector::Constant(1, -coeffs[1]);

    CMatrix companion = CMatrix::Zero(degree, degree);
    companion.row(0) = -coeffs.tail(degree).transpose();
    companion.diagonal(-1).setOnes();
    Eigen::ComplexEigenSolver<CMatrix> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw EstimationError("companion eigenvalue iteration did not converge");
    return solver.eigenvalues();
}

CMatrix vandermonde(const CVector &roots, int sample_count)
{
    CMatrix phi(sample_count, roots.size());
    for (Eigen::Index n = 0; n < roots.size(); ++n)
    {
        Complex p{1.0, 0.0};
        for (int k = 0; k < sample_count; ++k)
        {
            phi(k, n) = p;
            p *= roots[n];
        }
    }
    return phi;
}

CVector fit_amplitudes(const CVector &samples, const CVector &roots)
{
    const auto k = static_cast<int>(samples.size());
    if (roots.size() == 0)
        throw DomainError("no roots to fit");
    if (k < roots.size())
        throw DomainError("need at least as many samples as roots");

    const CMatrix phi = vandermonde(roots, k);
    for (Eigen::Index i = 0; i < roots.size(); ++i)
        for (Eigen::Index j = i + 1; j < roots.size(); ++j)
            if (std::abs(roots[i] - roots[j]) <= kMinRootDistance)
            {
                const RVector sv = Eigen::JacobiSVD<CMatrix>(phi).singularValues();
                const double cond = sv[sv.size() - 1] > 0 ? sv[0] / sv[sv.size() - 1]
                                                          : std::numeric_limits<double>::infinity();
                throw IllConditionedError("repeated roots make the Vandermonde system ill-conditioned (cond = " +
                                              std::to_string(cond) + ")",
                                          cond);
            }
    return phi.colPivHouseholderQr().solve(samples);
}

CVector select_signal_roots(const CVector &roots, int n_signals, double tie_tolerance, const CVector *samples)
{
    const auto total = static_cast<int>(roots.size());
    if (n_signals < 1 || total < n_signals)
        throw DomainError("cannot select " + std::to_string(n_signals) + " roots out of " + std::to_string(total));

    std::vector<int> order(total);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::abs(roots[a]) > std::abs(roots[b]); });

    std::vector<int> chosen(order.begin(), order.begin() + n_signals);

    if (n_signals < total && samples != nullptr)
    {
        const double boundary = std::abs(roots[order[n_signals - 1]]);
        std::vector<int> firm, tied;
        for (int idx : order)
        {
            const double mod = std::abs(roots[idx]);
            if (mod > boundary + tie_tolerance)
                firm.push_back(idx);
            else if (std::abs(mod - boundary) <= tie_tolerance)
                tied.push_back(idx);
        }
        if (static_cast<int>(firm.size() + tied.size()) > n_signals)
        {
            std::vector<int> pool = firm;
            pool.insert(pool.end(), tied.begin(), tied.end());
            CVector cand(pool.size());
            for (std::size_t i = 0; i < pool.size(); ++i)
                cand[i] = roots[pool[i]];
            try
            {
                const CVector amp = fit_amplitudes(*samples, cand);
                std::vector<std::size_t> tied_pos(tied.size());
                std::iota(tied_pos.begin(), tied_pos.end(), firm.size());
                std::stable_sort(tied_pos.begin(), tied_pos.end(),
                                 [&](std::size_t a, std::size_t b) { return std::abs(amp[a]) > std::abs(amp[b]); });
                chosen = firm;
                for (std::size_t i = 0; static_cast<int>(chosen.size()) < n_signals; ++i)
                    chosen.push_back(pool[tied_pos[i]]);
            }
            catch (const Error &)
            {
                // keep the modulus order when the provisional fit is singular
            }
        }
    }

    std::stable_sort(chosen.begin(), chosen.end(),
                     [&](int a, int b) { return std::abs(roots[a]) > std::abs(roots[b]); });
    CVector out(n_signals);
    for (int i = 0; i < n_signals; ++i)
        out[i] = roots[chosen[i]];
    return out;
}

Estimate estimate(const CVector &samples, const Config &config)
{
    const auto k = static_cast<int>(samples.size());
    config.validate(k);

    Estimate est;
    const CMatrix data = build_data_matrix(samples, config.est_order);
    est.coeffs = solve_min_norm(data, config.n_signals, config.solver);
    est.roots_all = find_roots(est.coeffs);
    est.roots_signal = select_signal_roots(est.roots_all, config.n_signals, 1e-9, &samples);
    est.amplitudes = fit_amplitudes(samples, est.roots_signal);
    est.residual = (vandermonde(est.roots_signal, k) * est.amplitudes - samples).norm();
    return est;
}

} // namespace holosense::prony
