#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "holosense/error.hpp"
#include "holosense/holography.hpp"
#include "holosense/patterns.hpp"
#include "oracles.hpp"

#include <sstream>

using namespace holosense;

namespace
{
bool has_peak(const std::vector<Peak> &peaks, double theta, double phi, double tol)
{
    return std::any_of(peaks.begin(), peaks.end(), [&](const Peak &p) {
        return std::abs(p.theta_deg - theta) <= tol && std::abs(p.phi_deg - phi) <= tol;
    });
}
} // namespace

TEST_CASE("grid axes")
{
    const AngularGrid full;
    CHECK(full.thetas().size() == 181);
    CHECK(full.phis().size() == 360);
    CHECK(full.phis().front() == doctest::Approx(-179.0));
    CHECK(full.phis().back() == doctest::Approx(180.0));
    const AngularGrid front = AngularGrid::front_hemisphere(0.5);
    CHECK(front.phis().size() == 361);
    CHECK_FALSE(front.phi_wraps());
    CHECK_THROWS_AS((AngularGrid{0, 180, -180, 180, 0.0}.validate()), DomainError);
    CHECK_THROWS_AS((AngularGrid{0, 200, -180, 180, 1.0}.validate()), DomainError);
}

TEST_CASE("beam power matches explicit summation")
{
    const UpaGeometry g = UpaGeometry::make(6, 5);
    CVector w(30);
    for (int i = 0; i < 30; ++i)
        w[i] = std::polar(1.0 + 0.1 * i, 0.37 * i * i);
    const AngularGrid grid{10, 170, -150, 150, 20};
    const RMatrix p = beam_power(w, g, grid);
    const auto th = grid.thetas();
    const auto ph = grid.phis();
    for (std::size_t i = 0; i < th.size(); ++i)
        for (std::size_t j = 0; j < ph.size(); ++j)
            CHECK(p(i, j) == doctest::Approx(oracle::beam_power(g, w, deg2rad(th[i]), deg2rad(ph[j]))).epsilon(1e-10));
}

TEST_CASE("matched weights peak at the steering direction with gain N_t^2")
{
    const UpaGeometry g = UpaGeometry::make(16, 16);
    const CVector w = steering_vector(g, deg2rad(70.0), deg2rad(40.0));
    const AngularGrid grid = AngularGrid::front_hemisphere(1.0);
    CHECK(beam_power(w, g, grid).maxCoeff() == doctest::Approx(256.0 * 256.0));
    const PatternResult p = array_pattern(w, g, grid);
    REQUIRE(!p.peaks.empty());
    CHECK(p.peaks[0].theta_deg == 70.0);
    CHECK(p.peaks[0].phi_deg == 40.0);
    CHECK(p.gain_db.maxCoeff() == 0.0);
    for (std::size_t i = 1; i < p.peaks.size(); ++i)
        CHECK(p.peaks[i - 1].value >= p.peaks[i].value);
}

TEST_CASE("pattern is scale invariant and rejects zero weights")
{
    const UpaGeometry g = UpaGeometry::make(8, 8);
    const CVector w = steering_vector(g, deg2rad(100.0), deg2rad(-20.0));
    const AngularGrid grid{0, 180, -180, 180, 3};
    const PatternResult a = array_pattern(w, g, grid);
    const PatternResult b = array_pattern(Complex(-2.5, 4.0) * w, g, grid);
    CHECK((a.gain_db - b.gain_db).cwiseAbs().maxCoeff() < 1e-9);
    CHECK_THROWS_AS(array_pattern(CVector::Zero(64), g, grid), DomainError);
    CHECK_THROWS_AS(array_pattern(CVector::Ones(10), g, grid), DomainError);
}

TEST_CASE("conjugate weights mirror the lobe to (180 - theta, -phi)")
{
    const UpaGeometry g = UpaGeometry::make(16, 16);
    const CVector w = steering_vector(g, deg2rad(70.0), deg2rad(40.0));
    const AngularGrid grid = AngularGrid::front_hemisphere(1.0);
    const PatternResult p = array_pattern(w.conjugate(), g, grid);
    CHECK(p.peaks[0].theta_deg == 110.0);
    CHECK(p.peaks[0].phi_deg == -40.0);
}

TEST_CASE("raw hologram weights show DC, object and conjugate lobes")
{
    const UpaGeometry g = UpaGeometry::make(16, 16);
    const ReferenceWave ref = ReferenceWave::normal_incidence();
    const CMatrix eo = to_grid(g, steering_vector(g, deg2rad(70.0), deg2rad(40.0)));
    const Hologram h = record(eo, g, ref, NoiseModel{});
    const PatternResult p =
        array_pattern(to_flat(naive_reconstruction_weights(h, ref)), g, AngularGrid::front_hemisphere(1.0));
    CHECK(has_peak(p.peaks, 90.0, 0.0, 2.0)); // DC term, broadside
    CHECK(has_peak(p.peaks, 70.0, 40.0, 2.0));
    CHECK(has_peak(p.peaks, 110.0, -40.0, 2.0));
}

TEST_CASE("pole rows report a single peak")
{
    const AngularGrid grid{0, 180, -90, 90, 10};
    RMatrix v = RMatrix::Zero(19, 19);
    v.row(0).setConstant(5.0);
    const auto peaks = local_maxima(v, grid, -1.0);
    REQUIRE(peaks.size() == 1);
    CHECK(peaks[0].theta_deg == 0.0);
    CHECK(peaks[0].phi_deg == 0.0);
}

TEST_CASE("pattern CSV")
{
    const UpaGeometry g = UpaGeometry::make(2, 2);
    const AngularGrid grid{0, 90, 0, 90, 90};
    const PatternResult p = array_pattern(CVector::Ones(4), g, grid);
    std::ostringstream os;
    write_pattern_csv(os, p);
    const std::string s = os.str();
    CHECK(s.rfind("theta_deg,phi_deg,gain_db\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 5);
    CHECK(s.find("90,0,0\n") != std::string::npos);
}
