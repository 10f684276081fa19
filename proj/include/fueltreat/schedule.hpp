#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fueltreat {

/// Binary treatment plan x[cell, year] for years 1..horizon.
class Schedule {
public:
    Schedule() = default;
    Schedule(int cells, int horizon);

    int cells() const { return cells_; }
    int horizon() const { return horizon_; }

    bool treated(int cell, int year) const { return x_[index(cell, year)] != 0; }
    void set(int cell, int year, bool on) { x_[index(cell, year)] = on ? 1 : 0; }
    void flip(int cell, int year) { x_[index(cell, year)] ^= 1; }

    int treated_count(int year) const;
    int total_treatments() const;

    /// Raw row-major storage: entry (year - 1) * cells + cell.
    const std::vector<std::uint8_t>& raw() const { return x_; }

    bool operator==(const Schedule&) const = default;

private:
    std::size_t index(int cell, int year) const {
        return static_cast<std::size_t>(year - 1) * static_cast<std::size_t>(cells_) +
               static_cast<std::size_t>(cell);
    }

    int cells_ = 0;
    int horizon_ = 0;
    std::vector<std::uint8_t> x_;
};

// Text matrix format: one line per year, space-separated 0/1 per cell in
// cell-index order. Lines starting with '#' and blank lines are ignored.
void write_schedule(std::ostream& out, const Schedule& schedule);
Schedule read_schedule(std::istream& in);
Schedule load_schedule(const std::string& path);
void save_schedule(const std::string& path, const Schedule& schedule);

/// Reads the same 0/1 line format into a plain matrix (used for occupancy).
std::vector<std::vector<int>> read_binary_matrix(std::istream& in);

}  // namespace fueltreat
