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

#ifndef HOLOSENSE_ANALYSIS_HPP
#define HOLOSENSE_ANALYSIS_HPP

#include "holosense/channel.hpp"
#include "holosense/holography.hpp"
#include "holosense/patterns.hpp"
#include "holosense/pmcs.hpp"
#include "holosense/random.hpp"
#include "holosense/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace holosense::analysis
{

// Error bounds of the segmentation estimator and their empirical checks.
//
// Notation for a K-sample record y(k) = sum_n b_n z_n^k perturbed by
// |w(k)| < epsilon, estimated with order P_e: Y = [y0 | Y1] is the data matrix,
// sigma1 the principal singular value of Y1, h the (tail of the) prediction
// coefficients and beta0 = prod_{i != n} (z_n - z_i) over the other zeros of H.

struct BoundInputs
{
    double epsilon = 0.0;         // sample perturbation bound
    double delta = 0.0;           // angular-frequency error bound [rad]
    int K = 0;                    // samples
    int N = 0;                    // signals
    int est_order = 0;            // P_e
    double sigma1 = 0.0;          // principal singular value of Y1
    double delta_sigma1_sq = 0.0; // | sigma1_noisy^2 - sigma1^2 |
    double norm_Y1 = 0.0;         // || Y1^H ||_2
    double norm_y0 = 0.0;         // || y0 ||_2
    double norm_h = 0.0;          // || h ||_2
    double beta0_abs = 0.0;       // | beta0 |
    double q = 0.0;               // minimum angular separation [rad]
};

// sqrt(P_e)/|beta0| * [ ||Y1^H|| sqrt(K-N) eps / sigma1^2
//                       + ||y0|| (K-N) eps + delta_sigma1^2 ||h|| ].
// Throws DomainError for beta0 == 0 or sigma1 == 0.
double lemma1_bound(const BoundInputs &in);

// sqrt(3)/K (K - 1/2)^{3/2} sqrt(N) delta ||y|| + sqrt(3) eps. Valid when the
// frequencies are separated by more than separation_threshold(K).
double lemma3_bound(const BoundInputs &in, double norm_y);

// pi sqrt(2K) / K
double separation_threshold(int K);

// Minimum circular gap between the angular frequencies of unit-circle roots.
double min_circular_separation(const CVector &z);

struct Lemma2Report
{
    double q = 0.0;
    double threshold = 0.0;
    bool separation_ok = false;
    double norm_L_sq = 0.0; // || (Phi^H Phi)^{-1} Phi^H ||_2^2
    double bound = 0.0;     // 3 / K
    bool holds = false;
};

// Throws DomainError for roots off the unit circle (1e-9) or repeated roots.
Lemma2Report lemma2_check(const CVector &z, int K);

// One root of one noisy instance checked against the first bound.
struct Lemma1Sample
{
    BoundInputs inputs;
    double measured = 0.0; // |z_hat - z|
    double bound = 0.0;
    bool holds = false;
};

// Measures every instance quantity from a clean / noisy sample pair and
// returns one entry per true root.
std::vector<Lemma1Sample> lemma1_instance(const CVector &clean, const CVector &noisy, const CVector &true_roots,
                                          int est_order);

struct Lemma3Sample
{
    BoundInputs inputs;
    double norm_y = 0.0;
    double measured = 0.0; // || b_hat - b ||_2
    double bound = 0.0;
    bool separation_ok = false;
    bool holds = false;
};

// Fits amplitudes on `estimated_roots` (unit circle, any order) and measures
// delta and epsilon from the truth.
Lemma3Sample lemma3_instance(const CVector &clean, const CVector &noisy, const CVector &true_roots,
                             const CVector &true_amplitudes, const CVector &estimated_roots);

// n unit-circle roots whose circular gaps all exceed min_gap: gaps are
// min_gap plus a random share of the slack, then the set is rotated at random.
// Throws DomainError when n * min_gap >= 2 pi.
CVector separated_roots(Engine &engine, int n, double min_gap);

// y(k) = sum_n b_n z_n^k with separated roots, |b_n| in [0.5, 1.5] and
// uniform phase, plus noise drawn uniformly in the disk of radius epsilon.
struct BoundedRecord
{
    CVector roots;
    CVector amplitudes;
    CVector clean;
    CVector noisy;
};
BoundedRecord bounded_noise_record(Engine &engine, int K, int N, double epsilon, double min_gap);

// Hologram -> PSIS -> PMCS on one noise realisation.
struct TrialOutcome
{
    double ratio = 1.0; // pooled ||h_hat - h||^2 / ||h||^2
    bool failed = false;
    std::string failure;
    pmcs::Result result;
};

// snr_db == nullopt runs noiseless. Segmentation errors are reported as a
// failed trial with ratio 1 (the estimate counts as the zero channel).
TrialOutcome pipeline_trial(const UpaGeometry &geom, std::span<const LosUser> users, std::optional<double> snr_db,
                            const pmcs::Config &config, std::uint64_t seed,
                            const ReferenceWave &ref = ReferenceWave::normal_incidence());

struct TrendPoint
{
    int n_v = 0;
    int n_h = 0;
    std::size_t n_t = 0;
    int est_order = 0;
    double mean_nmse_db = 0.0; // 10 log10 of the mean ratio
    int failures = 0;
    std::vector<double> ratios; // per trial
};

// Mean NMSE per array size. Sizes too small for N <= P_e <= K - N are skipped
// with a warning. Trial t of size index s uses
// derive_seed(derive_seed(seed, s), t).
std::vector<TrendPoint> theorem1_trend(std::span<const LosUser> users, std::optional<double> snr_db,
                                       std::span<const std::pair<int, int>> sizes, int trials, std::uint64_t seed,
                                       int est_order = 10, int jobs = 1, double f_c = 3.5e9,
                                       double spacing_wl = 0.5);

bool strictly_decreasing(std::span<const TrendPoint> trend);

struct BeamscanResult
{
    AngularGrid grid;
    RMatrix power; // |a^H vec(E)|^2 / N_t^2
    std::vector<Peak> peaks;
};

// Exhaustive beam scan of a field over the front half space at the given
// resolution; peaks are strict local maxima sorted by power.
BeamscanResult beamscan_oracle(const CMatrix &field, const UpaGeometry &geom, double resolution_deg);

} // namespace holosense::analysis

#endif
