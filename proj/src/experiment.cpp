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

#include "holosense/experiment.hpp"
#include "holosense/analysis.hpp"
#include "holosense/csv.hpp"
#include "holosense/error.hpp"
#include "holosense/holography.hpp"
#include "holosense/manifest.hpp"
#include "holosense/prony.hpp"
#include "holosense/random.hpp"
#include "parallel.hpp"

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace holosense::cli
{

using nlohmann::json;

namespace
{
constexpr std::array<std::pair<ExperimentKind, std::string_view>, 7> kKinds{{
    {ExperimentKind::pattern_raw, "pattern-raw"},
    {ExperimentKind::pattern_psis, "pattern-psis"},
    {ExperimentKind::psis_demo, "psis-demo"},
    {ExperimentKind::nmse_snr, "nmse-snr"},
    {ExperimentKind::nmse_size, "nmse-size"},
    {ExperimentKind::nmse_order, "nmse-order"},
    {ExperimentKind::bounds, "bounds"},
}};

// Typed field access that records problems instead of throwing, so that one
// pass reports everything wrong with a document.
class Reader
{
public:
    explicit Reader(std::vector<std::string> &issues) : issues_(issues) {}

    void issue(const std::string &path, const std::string &what) { issues_.push_back(path + ": " + what); }

    const json *object(const json &parent, const std::string &key, const std::string &path)
    {
        if (!parent.contains(key))
            return nullptr;
        const json &v = parent.at(key);
        if (!v.is_object())
        {
            issue(path, "expected an object");
            return nullptr;
        }
        return &v;
    }

    template <typename T>
    T get(const json &parent, const std::string &key, T fallback, const std::string &path)
    {
        if (!parent.contains(key) || parent.at(key).is_null())
            return fallback;
        const json &v = parent.at(key);
        if constexpr (std::is_same_v<T, bool>)
        {
            if (!v.is_boolean())
                return issue(path, "expected a boolean"), fallback;
        }
        else if constexpr (std::is_integral_v<T>)
        {
            if (!v.is_number_integer())
                return issue(path, "expected an integer"), fallback;
            if constexpr (std::is_unsigned_v<T>)
                if (v.is_number_integer() && !v.is_number_unsigned())
                    return issue(path, "expected a non-negative integer"), fallback;
        }
        else if constexpr (std::is_floating_point_v<T>)
        {
            if (!v.is_number())
                return issue(path, "expected a number"), fallback;
        }
        else
        {
            if (!v.is_string())
                return issue(path, "expected a string"), fallback;
        }
        return v.get<T>();
    }

private:
    std::vector<std::string> &issues_;
};

void check_keys(Reader &r, const json &obj, std::initializer_list<std::string_view> known, const std::string &path)
{
    for (const auto &[key, _] : obj.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            r.issue(path.empty() ? key : path + "." + key, "unknown field");
}

LosUser parse_user(Reader &r, const json &u, const UpaGeometry &geom, const std::string &path)
{
    if (!u.is_object())
    {
        r.issue(path, "expected an object");
        return {};
    }
    if (u.contains("paths"))
    {
        check_keys(r, u,
                   {"paths", "rx_location_m", "speed_mps", "theta_v_deg", "phi_v_deg", "symbol_abs",
                    "symbol_phase_deg", "time_s"},
                   path);
        UserScenario s;
        const json &paths = u.at("paths");
        if (!paths.is_array() || paths.empty())
        {
            r.issue(path + ".paths", "expected a non-empty array");
            return {};
        }
        for (std::size_t p = 0; p < paths.size(); ++p)
        {
            const std::string pp = path + ".paths[" + std::to_string(p) + "]";
            const json &pj = paths[p];
            if (!pj.is_object())
            {
                r.issue(pp, "expected an object");
                continue;
            }
            check_keys(r, pj,
                       {"theta_zod_deg", "phi_aod_deg", "theta_zoa_deg", "phi_aoa_deg", "gain_abs",
                        "gain_phase_deg", "delay_s"},
                       pp);
            PathParams path_params;
            path_params.theta_zod = deg2rad(r.get(pj, "theta_zod_deg", 90.0, pp + ".theta_zod_deg"));
            path_params.phi_aod = deg2rad(r.get(pj, "phi_aod_deg", 0.0, pp + ".phi_aod_deg"));
            path_params.theta_zoa = deg2rad(r.get(pj, "theta_zoa_deg", 90.0, pp + ".theta_zoa_deg"));
            path_params.phi_aoa = deg2rad(r.get(pj, "phi_aoa_deg", 0.0, pp + ".phi_aoa_deg"));
            path_params.beta = std::polar(r.get(pj, "gain_abs", 1.0, pp + ".gain_abs"),
                                          deg2rad(r.get(pj, "gain_phase_deg", 0.0, pp + ".gain_phase_deg")));
            path_params.tau = r.get(pj, "delay_s", 0.0, pp + ".delay_s");
            s.paths.push_back(path_params);
        }
        if (u.contains("rx_location_m"))
        {
            const json &loc = u.at("rx_location_m");
            if (loc.is_array() && loc.size() == 3 && std::all_of(loc.begin(), loc.end(), [](const json &x) {
                    return x.is_number();
                }))
                s.rx_location = {loc[0].get<double>(), loc[1].get<double>(), loc[2].get<double>()};
            else
                r.issue(path + ".rx_location_m", "expected three numbers");
        }
        s.speed = r.get(u, "speed_mps", 0.0, path + ".speed_mps");
        s.theta_v = deg2rad(r.get(u, "theta_v_deg", 0.0, path + ".theta_v_deg"));
        s.phi_v = deg2rad(r.get(u, "phi_v_deg", 0.0, path + ".phi_v_deg"));
        s.tx_symbol = std::polar(r.get(u, "symbol_abs", 1.0, path + ".symbol_abs"),
                                 deg2rad(r.get(u, "symbol_phase_deg", 0.0, path + ".symbol_phase_deg")));
        const double t = r.get(u, "time_s", 0.0, path + ".time_s");
        if (s.paths.empty())
            return {};
        try
        {
            return to_los_user(geom, s, t);
        }
        catch (const Error &e)
        {
            r.issue(path, e.what());
            return {};
        }
    }

    check_keys(r, u, {"theta_deg", "phi_deg", "b_abs", "b_phase_deg"}, path);
    if (!u.contains("theta_deg") || !u.contains("phi_deg"))
        r.issue(path, "needs theta_deg and phi_deg (or a paths list)");
    LosUser out;
    const double theta = r.get(u, "theta_deg", 90.0, path + ".theta_deg");
    const double phi = r.get(u, "phi_deg", 0.0, path + ".phi_deg");
    if (!(theta >= 0.0 && theta <= 180.0))
        r.issue(path + ".theta_deg", "must lie in [0, 180]");
    if (!(phi > -180.0 && phi <= 180.0))
        r.issue(path + ".phi_deg", "must lie in (-180, 180]");
    out.theta = deg2rad(theta);
    out.phi = deg2rad(phi);
    const double b_abs = r.get(u, "b_abs", 1.0, path + ".b_abs");
    if (!(b_abs > 0.0))
        r.issue(path + ".b_abs", "must be positive");
    out.b = std::polar(b_abs, deg2rad(r.get(u, "b_phase_deg", 0.0, path + ".b_phase_deg")));
    return out;
}

std::string snr_label(const std::optional<double> &snr)
{
    return snr ? csv::format_number(*snr) + " dB" : std::string("noiseless");
}

double snr_value(const std::optional<double> &snr)
{
    return snr ? *snr : std::numeric_limits<double>::infinity();
}

class Outputs
{
public:
    Outputs(std::filesystem::path dir, std::string prefix) : dir_(std::move(dir)), prefix_(std::move(prefix)) {}

    // Opens <prefix>_<suffix> for writing and remembers it for the manifest.
    std::ofstream open(const std::string &suffix)
    {
        const std::filesystem::path p = dir_ / (prefix_ + "_" + suffix);
        if (p.has_parent_path())
            std::filesystem::create_directories(p.parent_path());
        std::ofstream out(p, std::ios::binary);
        if (!out)
            throw Error("cannot open " + p.string() + " for writing");
        files_.push_back(p);
        return out;
    }

    std::filesystem::path path(const std::string &suffix) const { return dir_ / (prefix_ + "_" + suffix); }
    const std::vector<std::filesystem::path> &files() const { return files_; }

private:
    std::filesystem::path dir_;
    std::string prefix_;
    std::vector<std::filesystem::path> files_;
};

void close_checked(std::ofstream &out)
{
    out.close();
    if (!out)
        throw Error("write failed");
}

json peaks_json(const std::vector<Peak> &peaks)
{
    json arr = json::array();
    for (const Peak &p : peaks)
        arr.push_back({{"theta_deg", p.theta_deg}, {"phi_deg", p.phi_deg}, {"value", p.value}});
    return arr;
}

json complex_json(Complex c)
{
    return json::array({c.real(), c.imag()});
}

json result_json(const pmcs::Result &result)
{
    json users = json::array();
    for (const pmcs::UserEstimate &u : result.users)
        users.push_back({{"theta_deg", u.theta_deg},
                         {"phi_deg", u.phi_deg},
                         {"b", complex_json(u.b)},
                         {"b_h", complex_json(u.b_h)},
                         {"b_v", complex_json(u.b_v)},
                         {"z_h", complex_json(u.z_h)},
                         {"z_v", complex_json(u.z_v)},
                         {"modulus_deviation", u.modulus_deviation},
                         {"accepted", u.accepted}});
    json out{{"users", users}};
    out["nmse_db"] = result.nmse_db ? json(*result.nmse_db) : json(nullptr);
    if (!result.truth_assignment.empty())
        out["truth_assignment"] = result.truth_assignment;
    return out;
}

struct Context
{
    const ExperimentConfig &cfg;
    const RunOptions &opt;
    std::uint64_t seed;
    Outputs &out;
    json &extra;
    int failures = 0;
};

// ---- patterns -------------------------------------------------------------

void write_pattern(Context &ctx, const CVector &weights)
{
    const PatternResult pattern = array_pattern(weights, ctx.cfg.geometry, ctx.cfg.pattern_grid);
    {
        std::ofstream f = ctx.out.open("pattern.csv");
        write_pattern_csv(f, pattern);
        close_checked(f);
    }
    {
        std::ofstream f = ctx.out.open("results.csv");
        f << "rank,theta_deg,phi_deg,gain_db\n";
        for (std::size_t i = 0; i < pattern.peaks.size(); ++i)
        {
            const Peak &p = pattern.peaks[i];
            csv::write_row(f, {static_cast<long long>(i), p.theta_deg, p.phi_deg, p.value});
        }
        close_checked(f);
    }
    ctx.extra["peaks"] = peaks_json(pattern.peaks);
    for (std::size_t i = 0; i < std::min<std::size_t>(pattern.peaks.size(), 5); ++i)
        spdlog::info("peak {}: ({:.1f}, {:.1f}) deg, {:.2f} dB", i, pattern.peaks[i].theta_deg,
                     pattern.peaks[i].phi_deg, pattern.peaks[i].value);
}

CMatrix object_field(const ExperimentConfig &cfg)
{
    return to_grid(cfg.geometry, received_field(cfg.geometry, cfg.users));
}

NoiseModel first_noise(const Context &ctx, const CMatrix &object)
{
    const std::optional<double> snr = ctx.cfg.snr_db.front();
    return {snr ? noise_sigma_for_snr(object, *snr) : 0.0, derive_seed(ctx.seed, 0)};
}

void run_pattern_raw(Context &ctx)
{
    const ReferenceWave ref = ReferenceWave::normal_incidence();
    const CMatrix object = object_field(ctx.cfg);
    const Hologram holo = record(object, ctx.cfg.geometry, ref, first_noise(ctx, object));
    write_pattern(ctx, to_flat(naive_reconstruction_weights(holo, ref)));
}

void run_pattern_psis(Context &ctx)
{
    const ReferenceWave ref = ReferenceWave::normal_incidence();
    const CMatrix object = object_field(ctx.cfg);
    const HologramSet set = record_psi_set(object, ctx.cfg.geometry, ref, first_noise(ctx, object));
    write_pattern(ctx, to_flat(psis_recover(set, ref)));
}

void run_psis_demo(Context &ctx)
{
    const UpaGeometry &geom = ctx.cfg.geometry;
    const ReferenceWave ref = ReferenceWave::normal_incidence();
    const CMatrix object = object_field(ctx.cfg);
    const HologramSet set = record_psi_set(object, geom, ref, first_noise(ctx, object));
    for (const auto &[holo, name] : {std::pair{&set.i0, "hologram_0.csv"}, std::pair{&set.i_half, "hologram_half.csv"},
                                     std::pair{&set.i_pi, "hologram_pi.csv"}})
    {
        std::ofstream f = ctx.out.open(name);
        write_hologram_csv(f, *holo);
        close_checked(f);
    }
    const CMatrix recovered = psis_recover(set, ref);
    const double rel = (recovered - object).norm() / object.norm();
    ctx.extra["psis_relative_error"] = rel;
    spdlog::info("PSIS relative recovery error {:.3e}", rel);

    std::vector<CVector> truth;
    for (const LosUser &u : ctx.cfg.users)
        truth.push_back(user_channel(geom, u));
    pmcs::Result result;
    try
    {
        result = pmcs::segment(recovered, ctx.cfg.pmcs, geom);
        if (result.users.size() == truth.size())
            pmcs::score(result, truth);
    }
    catch (const PairingError &e)
    {
        ++ctx.failures;
        spdlog::error("segmentation failed: {}", e.what());
    }
    catch (const EstimationError &e)
    {
        ++ctx.failures;
        spdlog::error("segmentation failed: {}", e.what());
    }

    std::ofstream f = ctx.out.open("results.csv");
    f << "user,theta_deg,phi_deg,b_re,b_im,z_h_re,z_h_im,z_v_re,z_v_im,accepted\n";
    for (std::size_t i = 0; i < result.users.size(); ++i)
    {
        const pmcs::UserEstimate &u = result.users[i];
        csv::write_row(f, {static_cast<long long>(i), u.theta_deg, u.phi_deg, u.b.real(), u.b.imag(), u.z_h.real(),
                           u.z_h.imag(), u.z_v.real(), u.z_v.imag(), static_cast<long long>(u.accepted)});
    }
    close_checked(f);
    ctx.extra["pmcs"] = result_json(result);
}

// ---- Monte-Carlo sweeps ---------------------------------------------------

struct SweepPoint
{
    UpaGeometry geom;
    std::optional<double> snr;
    pmcs::Config pmcs;
    std::uint64_t seed; // trial t uses derive_seed(seed, t)
};

struct SweepResult
{
    std::vector<double> ratios;
    int failures = 0;
};

SweepResult run_point(const SweepPoint &p, const std::vector<LosUser> &users, int trials, int jobs)
{
    SweepResult r;
    r.ratios.assign(trials, 1.0);
    std::vector<char> failed(trials, 0);
    detail::parallel_for(static_cast<std::size_t>(trials), jobs, [&](std::size_t t) {
        const analysis::TrialOutcome o = analysis::pipeline_trial(p.geom, users, p.snr, p.pmcs, derive_seed(p.seed, t));
        r.ratios[t] = o.ratio;
        failed[t] = o.failed;
    });
    r.failures = static_cast<int>(std::count(failed.begin(), failed.end(), 1));
    return r;
}

void run_sweep(Context &ctx, const std::vector<SweepPoint> &points)
{
    std::ofstream results = ctx.out.open("results.csv");
    std::ofstream summary = ctx.out.open("summary.csv");
    results << "config-id,N_t,snr_db,trial,nmse_db\n";
    summary << "config-id,n_v,n_h,N_t,snr_db,est_order,trials,failures,mean_nmse_db\n";
    const int trials = ctx.cfg.trials;
    for (std::size_t c = 0; c < points.size(); ++c)
    {
        const SweepPoint &p = points[c];
        const SweepResult r = run_point(p, ctx.cfg.users, trials, ctx.opt.jobs);
        const auto nt = static_cast<long long>(p.geom.unit_count());
        for (int t = 0; t < trials; ++t)
            csv::write_row(results, {static_cast<long long>(c), nt, snr_value(p.snr), static_cast<long long>(t),
                                     pmcs::ratio_to_db(r.ratios[t])});
        const double mean_db =
            pmcs::ratio_to_db(std::accumulate(r.ratios.begin(), r.ratios.end(), 0.0) / trials);
        csv::write_row(summary, {static_cast<long long>(c), static_cast<long long>(p.geom.n_v),
                                 static_cast<long long>(p.geom.n_h), nt, snr_value(p.snr),
                                 static_cast<long long>(p.pmcs.est_order_h), static_cast<long long>(trials),
                                 static_cast<long long>(r.failures), mean_db});
        ctx.failures += r.failures;
        spdlog::info("config {}: {}x{}, {}, P_e {}: mean NMSE {:.3f} dB ({} failed)", c, p.geom.n_v, p.geom.n_h,
                     snr_label(p.snr), p.pmcs.est_order_h, mean_db, r.failures);
    }
    close_checked(results);
    close_checked(summary);
}

void run_nmse_snr(Context &ctx)
{
    std::vector<std::optional<double>> snrs = ctx.cfg.snr_db;
    if (!ctx.cfg.snr_given)
    {
        snrs.clear();
        for (int db = -10; db <= 30; db += 5)
            snrs.emplace_back(db);
    }
    std::vector<SweepPoint> points;
    for (std::size_t i = 0; i < snrs.size(); ++i)
        points.push_back({ctx.cfg.geometry, snrs[i], ctx.cfg.pmcs, derive_seed(ctx.seed, i)});
    run_sweep(ctx, points);
}

void run_nmse_size(Context &ctx)
{
    const int n = ctx.cfg.pmcs.n_users;
    std::vector<SweepPoint> points;
    std::uint64_t index = 0;
    for (const std::optional<double> &snr : ctx.cfg.snr_db)
        for (const auto &[n_v, n_h] : ctx.cfg.sizes)
        {
            const std::uint64_t config_index = index++;
            if (n > std::min(n_v, n_h) - n)
            {
                spdlog::warn("skipping {}x{}: too small for {} users", n_v, n_h, n);
                continue;
            }
            const UpaGeometry geom =
                UpaGeometry::make(n_v, n_h, ctx.cfg.spacing_v_wl, ctx.cfg.spacing_h_wl, ctx.cfg.geometry.f_c);
            pmcs::Config cfg = pmcs::Config::for_geometry(geom, n, ctx.cfg.pmcs.est_order_h);
            cfg.solver = ctx.cfg.pmcs.solver;
            cfg.root_tolerance = ctx.cfg.pmcs.root_tolerance;
            cfg.pairing_tolerance = ctx.cfg.pmcs.pairing_tolerance;
            points.push_back({geom, snr, cfg, derive_seed(ctx.seed, config_index)});
        }
    run_sweep(ctx, points);
}

void run_nmse_order(Context &ctx)
{
    const UpaGeometry &geom = ctx.cfg.geometry;
    const int n = ctx.cfg.pmcs.n_users;
    std::vector<int> orders = ctx.cfg.est_orders;
    if (orders.empty())
        for (int p = n; p <= std::min(geom.n_v, geom.n_h) - n; ++p)
            orders.push_back(p);

    // Every order sees the same noise realisations at a given SNR, so the
    // curve compares orders rather than draws.
    std::vector<SweepPoint> points;
    for (std::size_t i = 0; i < ctx.cfg.snr_db.size(); ++i)
        for (int p : orders)
        {
            pmcs::Config cfg = ctx.cfg.pmcs;
            cfg.est_order_h = cfg.est_order_v = p;
            points.push_back({geom, ctx.cfg.snr_db[i], cfg, derive_seed(ctx.seed, i)});
        }
    run_sweep(ctx, points);
}

// ---- bounds ---------------------------------------------------------------

struct BoundRow
{
    double measured = 0.0;
    double bound = 0.0;
    bool holds = false;
    bool valid = false; // false when the instance could not be evaluated
};

void run_bounds(Context &ctx)
{
    const BoundsConfig &b = ctx.cfg.bounds;
    const auto count = static_cast<std::size_t>(b.instances);
    std::ofstream results = ctx.out.open("results.csv");
    std::ofstream summary = ctx.out.open("summary.csv");
    results << "bound-name,instance-id,measured,bound,holds\n";
    summary << "bound-name,instances,evaluated,held\n";

    auto emit = [&](const std::string &name, const std::vector<BoundRow> &rows) {
        int evaluated = 0, held = 0;
        for (std::size_t i = 0; i < rows.size(); ++i)
        {
            if (!rows[i].valid)
                continue;
            ++evaluated;
            held += rows[i].holds;
            csv::write_row(results, {std::string_view(name), static_cast<long long>(i), rows[i].measured,
                                     rows[i].bound, static_cast<long long>(rows[i].holds)});
        }
        ctx.failures += static_cast<int>(rows.size()) - evaluated;
        csv::write_row(summary, {std::string_view(name), static_cast<long long>(rows.size()),
                                 static_cast<long long>(evaluated), static_cast<long long>(held)});
        spdlog::info("{}: {}/{} instances within the bound", name, held, evaluated);
    };

    // Root perturbation bound: one row per (instance, root).
    {
        const std::uint64_t s = derive_seed(ctx.seed, 1);
        const int N = b.lemma1_N;
        std::vector<BoundRow> rows(count * N);
        detail::parallel_for(count, ctx.opt.jobs, [&](std::size_t i) {
            Engine eng(derive_seed(s, i));
            const analysis::BoundedRecord rec = analysis::bounded_noise_record(
                eng, b.lemma1_K, N, b.epsilon, analysis::separation_threshold(b.lemma1_K) / 2.0);
            try
            {
                const auto samples = analysis::lemma1_instance(rec.clean, rec.noisy, rec.roots, b.lemma1_est_order);
                for (int n = 0; n < N; ++n)
                    rows[i * N + n] = {samples[n].measured, samples[n].bound, samples[n].holds, true};
            }
            catch (const Error &e)
            {
                SPDLOG_DEBUG("lemma1 instance {} skipped: {}", i, e.what());
            }
        });
        emit("lemma1", rows);
    }

    // Pseudo-inverse norm bound: frequency sets meeting the separation condition, random size.
    for (int K : b.lemma2_K)
    {
        const std::uint64_t s = derive_seed(derive_seed(ctx.seed, 2), static_cast<std::uint64_t>(K));
        std::vector<BoundRow> rows(count);
        const double gap = analysis::separation_threshold(K);
        const int n_max = std::max(1, std::min(K, static_cast<int>(std::ceil(2.0 * kPi / gap)) - 1));
        detail::parallel_for(count, ctx.opt.jobs, [&](std::size_t i) {
            Engine eng(derive_seed(s, i));
            const int n = 1 + static_cast<int>(eng() % static_cast<std::uint64_t>(n_max));
            const CVector z = analysis::separated_roots(eng, n, gap);
            const analysis::Lemma2Report r = analysis::lemma2_check(z, K);
            rows[i] = {r.norm_L_sq, r.bound, r.holds, r.separation_ok};
        });
        emit("lemma2-K" + std::to_string(K), rows);
    }

    // Amplitude bound: Prony roots projected onto the unit circle give delta.
    {
        const std::uint64_t s = derive_seed(ctx.seed, 3);
        std::vector<BoundRow> rows(count);
        const prony::Config pc{b.lemma3_N, b.lemma3_est_order, 0.1, prony::Solver::pseudoinverse};
        detail::parallel_for(count, ctx.opt.jobs, [&](std::size_t i) {
            Engine eng(derive_seed(s, i));
            const analysis::BoundedRecord rec = analysis::bounded_noise_record(
                eng, b.lemma3_K, b.lemma3_N, b.epsilon, analysis::separation_threshold(b.lemma3_K));
            try
            {
                const prony::Estimate est = prony::estimate(rec.noisy, pc);
                const CVector z = est.roots_signal.array() / est.roots_signal.array().abs();
                const analysis::Lemma3Sample r =
                    analysis::lemma3_instance(rec.clean, rec.noisy, rec.roots, rec.amplitudes, z);
                rows[i] = {r.measured, r.bound, r.holds, r.separation_ok};
            }
            catch (const Error &e)
            {
                SPDLOG_DEBUG("lemma3 instance {} skipped: {}", i, e.what());
            }
        });
        emit("lemma3", rows);
    }
    close_checked(results);
    close_checked(summary);
}

// ---- validation -----------------------------------------------------------

void validate(ExperimentConfig &c, Reader &r)
{
    try
    {
        c.geometry.validate();
    }
    catch (const Error &e)
    {
        r.issue("geometry", e.what());
        return;
    }
    // Without a kind the user checks wait for run(), which validates again.
    const bool needs_users = c.kind && *c.kind != ExperimentKind::bounds;
    if (needs_users && c.users.empty())
        r.issue("users", "at least one user is required");
    if (c.trials < 1)
        r.issue("noise.trials", "must be at least 1");
    if (c.snr_db.empty())
        r.issue("noise.snr_db", "must list at least one value");
    if (c.pmcs.n_users < 1)
        r.issue("pmcs.n_users", "must be at least 1");
    else if (needs_users && static_cast<std::size_t>(c.pmcs.n_users) != c.users.size())
        r.issue("pmcs.n_users", "must equal the number of users (" + std::to_string(c.users.size()) + ")");

    const bool sweeps_geometry = c.kind && *c.kind == ExperimentKind::nmse_size;
    const bool sweeps_order = c.kind && *c.kind == ExperimentKind::nmse_order;
    if (!sweeps_geometry && !sweeps_order && c.pmcs.n_users >= 1)
    {
        try
        {
            c.pmcs.validate(c.geometry);
        }
        catch (const Error &e)
        {
            r.issue("pmcs.est_order", e.what());
        }
    }
    if (sweeps_geometry && c.sizes.empty())
        r.issue("sweep.sizes", "nmse-size needs at least one array size");
    if (sweeps_order)
    {
        const int k = std::min(c.geometry.n_v, c.geometry.n_h);
        if (k - c.pmcs.n_users < c.pmcs.n_users)
            r.issue("geometry", "array too small for the number of users");
        for (int p : c.est_orders)
            if (p < c.pmcs.n_users || p > k - c.pmcs.n_users)
                r.issue("sweep.est_orders", "order " + std::to_string(p) + " outside [N, K - N]");
    }
    try
    {
        c.pattern_grid.validate();
    }
    catch (const Error &e)
    {
        r.issue("pattern", e.what());
    }

    const BoundsConfig &b = c.bounds;
    if (b.instances < 1)
        r.issue("bounds.instances", "must be at least 1");
    if (!(b.epsilon >= 0.0))
        r.issue("bounds.epsilon", "must be non-negative");
    if (b.lemma1_N < 1 || b.lemma1_est_order < b.lemma1_N || b.lemma1_est_order > b.lemma1_K - b.lemma1_N)
        r.issue("bounds.lemma1", "needs 1 <= N <= est_order <= K - N");
    if (b.lemma3_N < 1 || b.lemma3_est_order < b.lemma3_N || b.lemma3_est_order > b.lemma3_K - b.lemma3_N)
        r.issue("bounds.lemma3", "needs 1 <= N <= est_order <= K - N");
    else if (b.lemma3_N * analysis::separation_threshold(b.lemma3_K) >= 2.0 * kPi)
        r.issue("bounds.lemma3", "N frequencies cannot meet the separation condition at this K");
    if (b.lemma1_N >= 1 && b.lemma1_K >= 1 && b.lemma1_N * analysis::separation_threshold(b.lemma1_K) / 2.0 >= 2.0 * kPi)
        r.issue("bounds.lemma1", "N frequencies do not fit on the circle at this K");
    for (int k : b.lemma2_K)
        if (k < 2)
            r.issue("bounds.lemma2.K", "sample counts must be at least 2");
}

} // namespace

ExperimentKind parse_kind(std::string_view name)
{
    for (const auto &[kind, label] : kKinds)
        if (label == name)
            return kind;
    throw ConfigError({"unknown experiment '" + std::string(name) + "'"});
}

std::string_view to_string(ExperimentKind kind)
{
    for (const auto &[k, label] : kKinds)
        if (k == kind)
            return label;
    return "unknown";
}

std::vector<std::string_view> kind_names()
{
    std::vector<std::string_view> out;
    for (const auto &kv : kKinds)
        out.push_back(kv.second);
    return out;
}

ExperimentConfig parse_config(std::string_view json_text)
{
    json doc;
    try
    {
        doc = json::parse(json_text);
    }
    catch (const json::parse_error &e)
    {
        throw ConfigError({"syntax error at byte " + std::to_string(e.byte) + ": " + e.what()});
    }
    std::vector<std::string> issues;
    Reader r(issues);
    if (!doc.is_object())
        throw ConfigError({"top level must be a JSON object"});
    check_keys(r, doc, {"experiment", "geometry", "users", "noise", "pmcs", "sweep", "pattern", "bounds",
                        "output_prefix"},
               "");

    ExperimentConfig c;
    c.source = doc.dump();
    if (doc.contains("experiment"))
    {
        const std::string name = r.get<std::string>(doc, "experiment", "", "experiment");
        try
        {
            c.kind = parse_kind(name);
        }
        catch (const ConfigError &)
        {
            r.issue("experiment", "unknown experiment '" + name + "'");
        }
    }

    if (const json *g = r.object(doc, "geometry", "geometry"))
    {
        check_keys(r, *g, {"n_v", "n_h", "spacing_v_wl", "spacing_h_wl", "f_c_hz"}, "geometry");
        c.spacing_v_wl = r.get(*g, "spacing_v_wl", 0.5, "geometry.spacing_v_wl");
        c.spacing_h_wl = r.get(*g, "spacing_h_wl", 0.5, "geometry.spacing_h_wl");
        c.geometry.n_v = r.get(*g, "n_v", 16, "geometry.n_v");
        c.geometry.n_h = r.get(*g, "n_h", 16, "geometry.n_h");
        c.geometry.f_c = r.get(*g, "f_c_hz", 3.5e9, "geometry.f_c_hz");
        if (c.geometry.f_c > 0.0)
        {
            c.geometry.d_v = c.spacing_v_wl * c.geometry.lambda0();
            c.geometry.d_h = c.spacing_h_wl * c.geometry.lambda0();
        }
    }

    if (doc.contains("users"))
    {
        const json &users = doc.at("users");
        if (!users.is_array())
            r.issue("users", "expected an array");
        else
            for (std::size_t i = 0; i < users.size(); ++i)
                c.users.push_back(parse_user(r, users[i], c.geometry, "users[" + std::to_string(i) + "]"));
    }

    if (const json *n = r.object(doc, "noise", "noise"))
    {
        check_keys(r, *n, {"snr_db", "trials", "seed"}, "noise");
        if (n->contains("snr_db"))
        {
            const json &s = n->at("snr_db");
            auto one = [&](const json &v, const std::string &path) -> std::optional<double> {
                if (v.is_null())
                    return std::nullopt;
                if (!v.is_number())
                    r.issue(path, "expected a number or null (noiseless)");
                return v.is_number() ? std::optional<double>(v.get<double>()) : std::nullopt;
            };
            c.snr_db.clear();
            c.snr_given = true;
            if (s.is_array())
                for (std::size_t i = 0; i < s.size(); ++i)
                    c.snr_db.push_back(one(s[i], "noise.snr_db[" + std::to_string(i) + "]"));
            else
                c.snr_db.push_back(one(s, "noise.snr_db"));
        }
        c.trials = r.get(*n, "trials", 100, "noise.trials");
        c.seed = r.get<std::uint64_t>(*n, "seed", 1, "noise.seed");
    }

    c.pmcs.n_users = static_cast<int>(std::max<std::size_t>(1, c.users.size()));
    int est_order = 10;
    if (const json *p = r.object(doc, "pmcs", "pmcs"))
    {
        check_keys(r, *p, {"n_users", "est_order", "solver", "root_tolerance", "pairing_tolerance"}, "pmcs");
        c.pmcs.n_users = r.get(*p, "n_users", c.pmcs.n_users, "pmcs.n_users");
        est_order = r.get(*p, "est_order", est_order, "pmcs.est_order");
        try
        {
            c.pmcs.solver = prony::parse_solver(r.get<std::string>(*p, "solver", "pseudoinverse", "pmcs.solver"));
        }
        catch (const Error &e)
        {
            r.issue("pmcs.solver", e.what());
        }
        c.pmcs.root_tolerance = r.get(*p, "root_tolerance", 0.1, "pmcs.root_tolerance");
        c.pmcs.pairing_tolerance = r.get(*p, "pairing_tolerance", 1.0, "pmcs.pairing_tolerance");
    }
    c.pmcs.est_order_h = c.pmcs.est_order_v = est_order;

    if (const json *s = r.object(doc, "sweep", "sweep"))
    {
        check_keys(r, *s, {"sizes", "est_orders"}, "sweep");
        if (s->contains("sizes"))
        {
            const json &sizes = s->at("sizes");
            if (!sizes.is_array())
                r.issue("sweep.sizes", "expected an array");
            else
                for (std::size_t i = 0; i < sizes.size(); ++i)
                {
                    const json &v = sizes[i];
                    const std::string path = "sweep.sizes[" + std::to_string(i) + "]";
                    if (v.is_number_integer())
                    {
                        const auto nt = v.get<long long>();
                        const auto side = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(nt))));
                        if (nt < 1 || side * side != nt)
                            r.issue(path, "N_t must be a perfect square (or give [n_v, n_h])");
                        else
                            c.sizes.emplace_back(static_cast<int>(side), static_cast<int>(side));
                    }
                    else if (v.is_array() && v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer())
                        c.sizes.emplace_back(v[0].get<int>(), v[1].get<int>());
                    else
                        r.issue(path, "expected N_t or [n_v, n_h]");
                }
        }
        if (s->contains("est_orders"))
        {
            const json &o = s->at("est_orders");
            if (!o.is_array() || !std::all_of(o.begin(), o.end(), [](const json &x) { return x.is_number_integer(); }))
                r.issue("sweep.est_orders", "expected an array of integers");
            else
                for (const json &x : o)
                    c.est_orders.push_back(x.get<int>());
        }
    }

    if (const json *p = r.object(doc, "pattern", "pattern"))
    {
        check_keys(r, *p, {"step_deg", "region"}, "pattern");
        const double step = r.get(*p, "step_deg", 1.0, "pattern.step_deg");
        const std::string region = r.get<std::string>(*p, "region", "full", "pattern.region");
        if (region == "front")
            c.pattern_grid = AngularGrid::front_hemisphere(step);
        else if (region == "full")
            c.pattern_grid.step = step;
        else
            r.issue("pattern.region", "expected 'full' or 'front'");
    }

    if (const json *b = r.object(doc, "bounds", "bounds"))
    {
        check_keys(r, *b, {"instances", "epsilon", "lemma1", "lemma2", "lemma3"}, "bounds");
        BoundsConfig &bc = c.bounds;
        bc.instances = r.get(*b, "instances", bc.instances, "bounds.instances");
        bc.epsilon = r.get(*b, "epsilon", bc.epsilon, "bounds.epsilon");
        if (const json *l = r.object(*b, "lemma1", "bounds.lemma1"))
        {
            check_keys(r, *l, {"K", "N", "est_order"}, "bounds.lemma1");
            bc.lemma1_K = r.get(*l, "K", bc.lemma1_K, "bounds.lemma1.K");
            bc.lemma1_N = r.get(*l, "N", bc.lemma1_N, "bounds.lemma1.N");
            bc.lemma1_est_order = r.get(*l, "est_order", bc.lemma1_est_order, "bounds.lemma1.est_order");
        }
        if (const json *l = r.object(*b, "lemma2", "bounds.lemma2"))
        {
            check_keys(r, *l, {"K"}, "bounds.lemma2");
            if (l->contains("K"))
            {
                const json &k = l->at("K");
                if (!k.is_array() || !std::all_of(k.begin(), k.end(), [](const json &x) { return x.is_number_integer(); }))
                    r.issue("bounds.lemma2.K", "expected an array of integers");
                else
                    bc.lemma2_K = k.get<std::vector<int>>();
            }
        }
        if (const json *l = r.object(*b, "lemma3", "bounds.lemma3"))
        {
            check_keys(r, *l, {"K", "N", "est_order"}, "bounds.lemma3");
            bc.lemma3_K = r.get(*l, "K", bc.lemma3_K, "bounds.lemma3.K");
            bc.lemma3_N = r.get(*l, "N", bc.lemma3_N, "bounds.lemma3.N");
            bc.lemma3_est_order = r.get(*l, "est_order", bc.lemma3_est_order, "bounds.lemma3.est_order");
        }
    }

    c.output_prefix = r.get<std::string>(doc, "output_prefix", c.output_prefix, "output_prefix");
    if (c.output_prefix.empty())
        r.issue("output_prefix", "must not be empty");

    validate(c, r);
    if (!issues.empty())
        throw ConfigError(std::move(issues));
    return c;
}

ExperimentConfig load_config(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError({"cannot read " + path.string()});
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

RunReport run(const ExperimentConfig &config, const RunOptions &options)
{
    if (options.kind && config.kind && *options.kind != *config.kind)
        throw ConfigError({"experiment: file says '" + std::string(to_string(*config.kind)) +
                           "' but '" + std::string(to_string(*options.kind)) + "' was requested"});
    const std::optional<ExperimentKind> chosen = options.kind ? options.kind : config.kind;
    if (!chosen)
        throw ConfigError({"experiment: no experiment named in the file or on the command line"});
    if (options.jobs < 1)
        throw ConfigError({"jobs: must be at least 1"});

    // Re-validate against the chosen kind: the file may not name one.
    ExperimentConfig cfg = config;
    cfg.kind = chosen;
    {
        std::vector<std::string> issues;
        Reader r(issues);
        validate(cfg, r);
        if (!issues.empty())
            throw ConfigError(std::move(issues));
    }

    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t seed = options.seed.value_or(cfg.seed);
    Outputs out(options.out_dir, cfg.output_prefix);
    json extra = json::object();
    Context ctx{cfg, options, seed, out, extra};
    spdlog::info("running {} (seed {}, {} jobs)", to_string(*chosen), seed, options.jobs);

    switch (*chosen)
    {
    case ExperimentKind::pattern_raw:
        run_pattern_raw(ctx);
        break;
    case ExperimentKind::pattern_psis:
        run_pattern_psis(ctx);
        break;
    case ExperimentKind::psis_demo:
        run_psis_demo(ctx);
        break;
    case ExperimentKind::nmse_snr:
        run_nmse_snr(ctx);
        break;
    case ExperimentKind::nmse_size:
        run_nmse_size(ctx);
        break;
    case ExperimentKind::nmse_order:
        run_nmse_order(ctx);
        break;
    case ExperimentKind::bounds:
        run_bounds(ctx);
        break;
    }

    RunReport report;
    report.kind = *chosen;
    report.files = out.files();
    report.failures = ctx.failures;
    report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json files = json::array();
    for (const std::filesystem::path &p : report.files)
        files.push_back({{"path", p.filename().string()}, {"sha256", sha256_file(p)}});
    json manifest{{"experiment", std::string(to_string(*chosen))},
                  {"version", std::string(version())},
                  {"seed", seed},
                  {"jobs", options.jobs},
                  {"wall_time_s", report.wall_time_s},
                  {"failures", report.failures},
                  {"config", json::parse(cfg.source)},
                  {"files", files}};
    manifest.update(extra);

    report.manifest = out.path("manifest.json");
    std::ofstream m(report.manifest, std::ios::binary);
    if (!m)
        throw Error("cannot open " + report.manifest.string() + " for writing");
    m << manifest.dump(2) << '\n';
    close_checked(m);
    spdlog::info("wrote {} files and {}", report.files.size(), report.manifest.string());
    return report;
}

std::string pmcs_result_json(const pmcs::Result &result)
{
    return result_json(result).dump();
}

} // namespace holosense::cli
