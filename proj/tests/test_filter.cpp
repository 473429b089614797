#include <cmath>
#include <numbers>

#include "doctest.h"
#include "freespiral/constants.hpp"
#include "freespiral/errors.hpp"
#include "freespiral/experiments.hpp"
#include "freespiral/random.hpp"

using namespace freespiral;

namespace {

FilterConfig base_config() {
    FilterConfig cfg;
    cfg.energies_eV = log_energy_grid(1e-5, 1.0, 5);
    cfg.n_samples = 20000;
    cfg.seed = 42;
    return cfg;
}

}  // namespace

TEST_CASE("Philox-4x32-10 known-answer vectors") {
    using B = Philox4x32::Block;
    CHECK(Philox4x32::generate(B{0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::generate(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::generate(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
    CHECK(to_unit_interval(0, 0) == 0.0);
    CHECK(to_unit_interval(0xffffffff, 0xffffffff) < 1.0);
}

TEST_CASE("energy grid and cutoff") {
    const std::vector<double> g = log_energy_grid(1e-5, 1.0, 5);
    CHECK(g.size() == 26);
    CHECK(g.front() == doctest::Approx(1e-5));
    CHECK(g.back() == doctest::Approx(1.0));

    // Oracle: R_s = M0 mu / (m_e v) = D/2  =>  E = m_e v^2 / 2 with v = 2 M0 mu / (m_e D).
    const ModelParams p = physical_params(0.5);
    const double mz = quantized_spin_projection(p).m_hat_z;
    const double m_e = effective_mass(p, mz);
    CHECK(m_e == doctest::Approx(cgs::electron_mass).epsilon(1e-12));
    const double D = 1e-6;
    const double v = 2.0 * p.M0 * std::sqrt(1.0 - mz * mz) / (m_e * D);
    const double expected = 0.5 * m_e * v * v / cgs::electron_volt;
    CHECK(spiral_cutoff_energy(p, mz, D) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(expected == doctest::Approx(1.905e-4).epsilon(1e-3));
    // lambda_0 at 0.01 eV exceeds the hole diameter
    CHECK(de_broglie_wavelength(p, mz, speed_from_energy(p, mz, 0.01)) > D);
}

TEST_CASE("point-classical transmission is the geometric fraction at every energy") {
    const ModelParams p = physical_params(0.5);
    const TransmissionCurve c = run_filter_transmission(p, ElectronModel::PointClassical, base_config());
    CHECK(c.geometric_fraction == doctest::Approx(std::numbers::pi / 16.0));
    for (std::size_t k = 0; k < c.energy_eV.size(); ++k) {
        CHECK(c.transmission[k] == c.transmission.front());
        CHECK(std::abs(c.transmission[k] - c.geometric_fraction) < 4.0 * c.std_error[k]);
    }
    CHECK_FALSE(c.heuristic);
}

TEST_CASE("free-spiral transmission: zero below the cutoff, full-orbit fraction above") {
    const ModelParams p = physical_params(0.5);
    const FilterConfig cfg = base_config();
    const TransmissionCurve c = run_filter_transmission(p, ElectronModel::FreeSpiral, cfg);
    const double half = 0.5 * cfg.hole_diameter;
    for (std::size_t k = 0; k < c.energy_eV.size(); ++k) {
        if (c.energy_eV[k] < c.cutoff_eV) {
            CHECK(c.passed[k] == 0);
            CHECK(c.R_s[k] > half);
        } else {
            CHECK(c.passed[k] > 0);
            // axis offset below D/2 - R_s, uniform over the cell
            const double gap = half - c.R_s[k];
            const double expected = std::numbers::pi * gap * gap / (c.cell_pitch * c.cell_pitch);
            CHECK(std::abs(c.transmission[k] - expected) < 4.0 * c.std_error[k] + 1e-12);
        }
    }
}

TEST_CASE("diffraction baseline is the labelled heuristic") {
    const ModelParams p = physical_params(0.5);
    const FilterConfig cfg = base_config();
    const TransmissionCurve point = run_filter_transmission(p, ElectronModel::PointClassical, cfg);
    const TransmissionCurve c = run_filter_transmission(p, ElectronModel::DiffractionBaseline, cfg);
    CHECK(c.heuristic);
    for (std::size_t k = 0; k < c.energy_eV.size(); ++k) {
        const double r = c.lambda_0[k] / (2.0 * cfg.hole_diameter);
        const double factor = std::max(0.0, 1.0 - r * r);
        CHECK(c.transmission[k] == doctest::Approx(factor * point.transmission[k]).epsilon(1e-14));
        if (k > 0) CHECK(c.transmission[k] >= c.transmission[k - 1]);
    }
}

TEST_CASE("transmission is deterministic and independent of the thread count") {
    const ModelParams p = physical_params(0.5);
    FilterConfig cfg = base_config();
    const TransmissionCurve a = run_filter_transmission(p, ElectronModel::FreeSpiral, cfg);
    const TransmissionCurve b = run_filter_transmission(p, ElectronModel::FreeSpiral, cfg);
    cfg.threads = 3;
    const TransmissionCurve c = run_filter_transmission(p, ElectronModel::FreeSpiral, cfg);
    CHECK(a.passed == b.passed);
    CHECK(a.passed == c.passed);
    CHECK(a.transmission == c.transmission);
    cfg.seed = 43;
    const TransmissionCurve d = run_filter_transmission(p, ElectronModel::FreeSpiral, cfg);
    CHECK(a.passed != d.passed);
}

TEST_CASE("spin sign does not change free-spiral transmission") {
    const ModelParams p = physical_params(0.5);
    FilterConfig cfg = base_config();
    cfg.spin_sign = 1;
    const TransmissionCurve up = run_filter_transmission(p, ElectronModel::FreeSpiral, cfg);
    cfg.spin_sign = -1;
    const TransmissionCurve down = run_filter_transmission(p, ElectronModel::FreeSpiral, cfg);
    CHECK(up.passed == down.passed);
    const TransmissionCurve flipped = run_filter_transmission(physical_params(0.5, -1), ElectronModel::FreeSpiral, base_config());
    CHECK(flipped.passed == run_filter_transmission(p, ElectronModel::FreeSpiral, base_config()).passed);
}

TEST_CASE("transmission does not grow as the hole shrinks") {
    const ModelParams p = physical_params(0.5);
    for (const auto model : {ElectronModel::PointClassical, ElectronModel::DiffractionBaseline, ElectronModel::FreeSpiral}) {
        FilterConfig cfg = base_config();
        cfg.cell_pitch = 4e-6;
        std::vector<double> prev;
        for (double D : {2e-6, 1.5e-6, 1e-6, 0.7e-6}) {
            cfg.hole_diameter = D;
            const TransmissionCurve c = run_filter_transmission(p, model, cfg);
            if (!prev.empty()) {
                for (std::size_t k = 0; k < prev.size(); ++k) CHECK(c.transmission[k] <= prev[k]);
            }
            prev = c.transmission;
        }
    }
}

TEST_CASE("thin filter: a partial turn passes at least as often as a full one") {
    const ModelParams p = physical_params(0.5);
    FilterConfig cfg = base_config();
    const TransmissionCurve thick = run_filter_transmission(p, ElectronModel::FreeSpiral, cfg);
    cfg.thickness = 1e-7;
    const TransmissionCurve thin = run_filter_transmission(p, ElectronModel::FreeSpiral, cfg);
    std::uint64_t gained = 0;
    for (std::size_t k = 0; k < thick.passed.size(); ++k) {
        CHECK(thin.passed[k] >= thick.passed[k]);
        gained += thin.passed[k] - thick.passed[k];
    }
    CHECK(gained > 0);
}

TEST_CASE("filter configuration errors") {
    const ModelParams p = physical_params(0.5);
    FilterConfig cfg = base_config();
    cfg.n_samples = 0;
    CHECK_THROWS_AS(run_filter_transmission(p, ElectronModel::FreeSpiral, cfg), PreconditionError);
    cfg = base_config();
    cfg.hole_diameter = 0.0;
    CHECK_THROWS_AS(run_filter_transmission(p, ElectronModel::FreeSpiral, cfg), PreconditionError);
    cfg = base_config();
    cfg.cell_pitch = 0.5e-6;
    CHECK_THROWS_AS(run_filter_transmission(p, ElectronModel::FreeSpiral, cfg), PreconditionError);
    cfg = base_config();
    cfg.energies_eV = {0.01, -1.0};
    CHECK_THROWS_AS(run_filter_transmission(p, ElectronModel::FreeSpiral, cfg), PreconditionError);
    CHECK(model_tag(parse_model("diffraction-baseline")) == "diffraction-baseline");
    CHECK_THROWS_AS(parse_model("wave"), PreconditionError);
}
