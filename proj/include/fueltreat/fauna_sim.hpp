#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fueltreat/landscape.hpp"
#include "fueltreat/schedule.hpp"
#include "fueltreat/schedule_eval.hpp"

namespace fueltreat {

/// Presence/absence of the tracked species per cell for years 0..horizon.
struct OccupancyState {
    int cells = 0;
    int horizon = 0;
    std::vector<std::uint8_t> occupied;

    bool is_occupied(int cell, int year) const {
        return occupied[static_cast<std::size_t>(year) * static_cast<std::size_t>(cells) +
                        static_cast<std::size_t>(cell)] != 0;
    }
    int count(int year) const;
};

struct OccupancyRules {
    /// One-step spread into unoccupied mature cells next to occupied ones.
    bool recolonise = true;
};

/// Replays a schedule. Year 0 occupancy is the set of mature cells. Each
/// later year applies, in order:
///   1. relocation: occupants of a cell treated this year move into every
///      neighbour that is mature this year, or die if there is none;
///   2. persistence: occupied, untreated cells that are still mature stay
///      occupied;
///   3. recolonisation: every unoccupied mature cell with an occupied mature
///      neighbour (as of the end of step 2) becomes occupied.
/// Throws std::invalid_argument if the inputs disagree on dimensions.
OccupancyState simulate_occupancy(const Landscape& landscape, const Schedule& schedule,
                                  const DerivedState& state, const OccupancyRules& rules = {});

/// Occupied cells over all cells in `year`; throws std::out_of_range for a
/// year outside 0..horizon.
double occupancy_fraction(const OccupancyState& occupancy, int year);

/// Same 0/1 line format as schedules, one line per year 0..horizon.
void write_occupancy(std::ostream& out, const OccupancyState& occupancy);

}  // namespace fueltreat
