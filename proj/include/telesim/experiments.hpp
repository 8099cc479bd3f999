// experiments.hpp
// Coarse-grained Bloch-sphere sources: specification information of the
// classical source selecting the state, its Holevo-bounded accessible
// counterpart, and the two-bits-sent-per-run cost ledger.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "telesim/infotheory.hpp"
#include "telesim/qcore.hpp"
#include "telesim/teleport.hpp"

namespace telesim::experiments {

using infotheory::ProbDist;
using infotheory::QuantumEnsemble;
using qcore::Label;
using qcore::StateVector;
using qcore::Vector;

struct SphereCell {
    double theta = 0.0;   // colatitude of the cell midpoint, [0, pi]
    double phi = 0.0;     // longitude of the cell midpoint, [0, 2pi)
    double weight = 0.0;  // solid angle, 4pi/N for every cell
};

// Equal-area partition of the unit sphere: latitude bands whose boundaries
// advance uniformly in cos(theta) by the band's share of cells, each band cut
// into equal longitude sectors. Midpoints sit at the band's area-bisecting
// cos(theta) and the sector's central longitude.
class SphereGrid {
public:
    explicit SphereGrid(std::size_t n_cells) {
        qcore::detail::require(n_cells >= 1, "sphere grid needs at least one cell");
        const auto n_bands = static_cast<std::size_t>(
            std::max<long long>(1, std::llround(std::sqrt(static_cast<double>(n_cells)))));

        band_sectors_.resize(n_bands);
        for (std::size_t b = 0; b < n_bands; ++b)
            band_sectors_[b] = (b + 1) * n_cells / n_bands - b * n_cells / n_bands;

        band_cos_bounds_.resize(n_bands + 1);
        band_cos_bounds_[0] = 1.0;
        std::size_t cum = 0;
        for (std::size_t b = 0; b < n_bands; ++b) {
            cum += band_sectors_[b];
            band_cos_bounds_[b + 1] =
                1.0 - 2.0 * static_cast<double>(cum) / static_cast<double>(n_cells);
        }

        const double weight = 4.0 * std::numbers::pi / static_cast<double>(n_cells);
        cells_.reserve(n_cells);
        for (std::size_t b = 0; b < n_bands; ++b) {
            const double mid_cos = 0.5 * (band_cos_bounds_[b] + band_cos_bounds_[b + 1]);
            const double theta = std::acos(std::clamp(mid_cos, -1.0, 1.0));
            const auto sectors = band_sectors_[b];
            for (std::size_t s = 0; s < sectors; ++s) {
                const double phi = 2.0 * std::numbers::pi *
                                   (static_cast<double>(s) + 0.5) / static_cast<double>(sectors);
                cells_.push_back(SphereCell{theta, phi, weight});
            }
        }
    }

    const std::vector<SphereCell>& cells() const { return cells_; }
    std::size_t size() const { return cells_.size(); }
    std::size_t n_bands() const { return band_sectors_.size(); }
    std::size_t band_sectors(std::size_t b) const { return band_sectors_[b]; }
    double band_cos_bound(std::size_t b) const { return band_cos_bounds_[b]; }

private:
    std::vector<SphereCell> cells_;
    std::vector<std::size_t> band_sectors_;
    std::vector<double> band_cos_bounds_;
};

inline SphereGrid coarse_grain_sphere(std::size_t n_cells) { return SphereGrid(n_cells); }

// Pure state at the cell midpoint: cos(theta/2)|up> + e^{i phi} sin(theta/2)|down>.
inline StateVector cell_state(const SphereCell& cell, const Label& label = "1") {
    Vector v(2);
    v << std::cos(cell.theta / 2.0), std::polar(std::sin(cell.theta / 2.0), cell.phi);
    return StateVector(std::move(v), {label}, /*renormalize=*/true);
}

// A classical source selecting cells (hence pure states) with probabilities.
struct StateSource {
    SphereGrid grid;
    ProbDist dist;

    StateSource(SphereGrid g, ProbDist d) : grid(std::move(g)), dist(std::move(d)) {
        qcore::detail::require(dist.size() == grid.size(),
                               "source distribution must have one entry per cell");
    }
};

inline StateSource uniform_source(std::size_t n_cells) {
    SphereGrid grid(n_cells);
    return StateSource(std::move(grid), ProbDist::uniform(n_cells));
}

// H(A): the Shannon entropy of the selecting source.
inline double specification_information(const StateSource& src) {
    return infotheory::shannon_entropy(src.dist);
}

inline QuantumEnsemble source_ensemble(const StateSource& src, const Label& label = "1") {
    std::vector<std::pair<double, qcore::DensityOperator>> entries;
    entries.reserve(src.grid.size());
    for (std::size_t i = 0; i < src.grid.size(); ++i)
        entries.emplace_back(src.dist[i],
                             qcore::density_from_state(cell_state(src.grid.cells()[i], label)));
    return QuantumEnsemble(std::move(entries));
}

struct SpecAccessible {
    double h_spec = 0.0;  // bits required to specify the selected state
    double chi = 0.0;     // Holevo bound on what a measurement can recover
    double gap = 0.0;     // h_spec - chi
};

inline SpecAccessible spec_vs_accessible(const StateSource& src) {
    const double h = specification_information(src);
    const double chi = infotheory::holevo_chi(source_ensemble(src));
    return SpecAccessible{h, chi, h - chi};
}

struct CostLedger {
    std::size_t runs = 0;
    std::size_t classical_bits_sent = 0;  // two per run
    double accessible_bound = 0.0;        // chi * runs
    double ratio = 0.0;                   // sent / accessible, +inf when chi = 0
};

// Teleports n_runs source-selected states and tallies the classical
// communication against the Holevo-bounded information Bob could decode.
inline CostLedger cost_ledger(const StateSource& src, std::size_t n_runs, RandomStream& rng) {
    qcore::detail::require(n_runs >= 1, "cost ledger needs at least one run");

    const double chi = infotheory::holevo_chi(source_ensemble(src));
    std::size_t bits = 0;
    for (std::size_t t = 0; t < n_runs; ++t) {
        const std::size_t cell = src.dist.sample(rng);
        const StateVector psi = cell_state(src.grid.cells()[cell]);
        const teleport::UnknownState chi_state(psi.amplitude(0), psi.amplitude(1));
        const auto transcript = teleport::run_collapse(chi_state, rng);
        bits += transcript.classical_bits_sent();
    }

    const double accessible = chi * static_cast<double>(n_runs);
    CostLedger ledger{n_runs, bits, accessible, 0.0};
    ledger.ratio = accessible > 0.0 ? static_cast<double>(bits) / accessible
                                    : std::numeric_limits<double>::infinity();
    return ledger;
}

}  // namespace telesim::experiments
