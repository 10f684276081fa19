#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fueltreat {

/// Vegetation and fuel parameters of one cell.
///
/// Ages are in whole years since the cell was last treated. The thresholds
/// must satisfy 0 < min_tfi <= mature_threshold <= high_threshold <= max_tfi.
struct CellParams {
    double area = 1.0;
    int mature_threshold = 8;
    int high_threshold = 12;
    int min_tfi = 2;
    int max_tfi = 16;
    int initial_age = 0;

    /// Throws std::invalid_argument describing the first broken invariant.
    void validate() const;
};

using CellPair = std::pair<int, int>;

/// A set of cells with symmetric adjacency. Cells are indexed 0..size()-1;
/// for grids the index is row-major (index = row * cols + col).
///
/// Immutable after construction.
class Landscape {
public:
    /// Validates cell parameters and neighbor symmetry; throws
    /// std::invalid_argument on failure. rows/cols are informational
    /// (0 for non-grid landscapes) but when given must match cells.size().
    Landscape(std::vector<CellParams> cells, std::vector<std::vector<int>> neighbors,
              int rows = 0, int cols = 0);

    int size() const { return static_cast<int>(cells_.size()); }
    const CellParams& cell(int i) const { return cells_.at(static_cast<std::size_t>(i)); }
    const std::vector<CellParams>& cells() const { return cells_; }
    std::span<const int> neighbors(int i) const { return neighbors_.at(static_cast<std::size_t>(i)); }
    double total_area() const { return total_area_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool is_grid() const { return rows_ > 0 && cols_ > 0; }

    /// Every adjacent pair once, as (i, j) with i < j, in lexicographic order.
    const std::vector<CellPair>& connection_pairs() const { return pairs_; }

    /// Largest initial age over all cells.
    int max_initial_age() const;

    /// Copy of this landscape with new initial ages (one per cell).
    Landscape with_initial_ages(std::span<const int> ages) const;

    /// Copy with cell indices relabelled: new cell k is old cell order[k].
    Landscape permuted(std::span<const int> order) const;

private:
    std::vector<CellParams> cells_;
    std::vector<std::vector<int>> neighbors_;
    std::vector<CellPair> pairs_;
    double total_area_ = 0.0;
    int rows_ = 0;
    int cols_ = 0;
};

/// rows x cols grid with 4-neighbourhood adjacency; every cell copies the
/// template (area, thresholds, initial age).
Landscape build_grid(int rows, int cols, const CellParams& params);

/// Standalone pair enumeration, equivalent to landscape.connection_pairs().
std::vector<CellPair> connection_pairs(const Landscape& landscape);

/// Categorical distribution over integer ages: probabilities[a] = P(age = a).
struct AgeDistribution {
    std::vector<double> probabilities;

    static AgeDistribution uniform(int max_age);
    static AgeDistribution point(int age);

    /// Throws std::invalid_argument unless probabilities are nonnegative,
    /// sum to 1 within 1e-9, and the support lies within [0, max_age].
    void validate(int max_age) const;

    /// Inverse-CDF lookup of u in [0, 1): smallest age a with u < CDF(a).
    int sample(double u) const;
};

struct GenerationConfig {
    int rows = 10;
    int cols = 10;
    AgeDistribution ages = AgeDistribution::uniform(16);
    std::uint64_t seed = 1;
};

/// Random grid landscape. Cell ages are drawn in row-major order, one
/// mt19937_64 draw per cell converted with Rng::uniform01 and mapped
/// through AgeDistribution::sample.
Landscape generate_random(const GenerationConfig& config, const CellParams& params);

/// JSON landscape document (see docs/formats.md).
void write_landscape(std::ostream& out, const Landscape& landscape);
Landscape read_landscape(std::istream& in);
Landscape load_landscape(const std::string& path);
void save_landscape(const std::string& path, const Landscape& landscape);

}  // namespace fueltreat
