#include "fueltreat/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "fueltreat/rng.hpp"

namespace fueltreat {

void CellParams::validate() const {
    if (!(area > 0.0) || !std::isfinite(area)) {
        throw std::invalid_argument("cell area must be positive");
    }
    if (min_tfi <= 0) {
        throw std::invalid_argument("min_tfi must be positive");
    }
    if (!(min_tfi <= mature_threshold && mature_threshold <= high_threshold &&
          high_threshold <= max_tfi)) {
        throw std::invalid_argument(
            "thresholds must satisfy min_tfi <= mature <= high <= max_tfi");
    }
    if (initial_age < 0) {
        throw std::invalid_argument("initial_age must be nonnegative");
    }
}

Landscape::Landscape(std::vector<CellParams> cells, std::vector<std::vector<int>> neighbors,
                     int rows, int cols)
    : cells_(std::move(cells)), neighbors_(std::move(neighbors)), rows_(rows), cols_(cols) {
    if (cells_.empty()) {
        throw std::invalid_argument("landscape must contain at least one cell");
    }
    if (neighbors_.size() != cells_.size()) {
        throw std::invalid_argument("neighbor list count does not match cell count");
    }
    if ((rows_ != 0 || cols_ != 0) &&
        (rows_ <= 0 || cols_ <= 0 ||
         static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_) != cells_.size())) {
        throw std::invalid_argument("rows x cols does not match cell count");
    }
    const int n = size();
    for (const auto& c : cells_) {
        c.validate();
        total_area_ += c.area;
    }
    for (int i = 0; i < n; ++i) {
        auto& nb = neighbors_[static_cast<std::size_t>(i)];
        std::sort(nb.begin(), nb.end());
        if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) {
            throw std::invalid_argument("duplicate neighbor of cell " + std::to_string(i));
        }
        for (int j : nb) {
            if (j < 0 || j >= n) {
                throw std::invalid_argument("neighbor index out of range");
            }
            if (j == i) {
                throw std::invalid_argument("cell " + std::to_string(i) + " lists itself as neighbor");
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j : neighbors_[static_cast<std::size_t>(i)]) {
            const auto& back = neighbors_[static_cast<std::size_t>(j)];
            if (!std::binary_search(back.begin(), back.end(), i)) {
                throw std::invalid_argument("neighbor relation is not symmetric");
            }
            if (i < j) {
                pairs_.emplace_back(i, j);
            }
        }
    }
}

int Landscape::max_initial_age() const {
    int best = 0;
    for (const auto& c : cells_) best = std::max(best, c.initial_age);
    return best;
}

Landscape Landscape::with_initial_ages(std::span<const int> ages) const {
    if (ages.size() != cells_.size()) {
        throw std::invalid_argument("age count does not match cell count");
    }
    auto cells = cells_;
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i].initial_age = ages[i];
    return Landscape(std::move(cells), neighbors_, rows_, cols_);
}

Landscape Landscape::permuted(std::span<const int> order) const {
    const int n = size();
    if (static_cast<int>(order.size()) != n) {
        throw std::invalid_argument("permutation size does not match cell count");
    }
    std::vector<int> new_index(static_cast<std::size_t>(n), -1);
    for (int k = 0; k < n; ++k) {
        const int old = order[static_cast<std::size_t>(k)];
        if (old < 0 || old >= n || new_index[static_cast<std::size_t>(old)] != -1) {
            throw std::invalid_argument("order is not a permutation");
        }
        new_index[static_cast<std::size_t>(old)] = k;
    }
    std::vector<CellParams> cells(static_cast<std::size_t>(n));
    std::vector<std::vector<int>> nbrs(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const auto old = static_cast<std::size_t>(order[static_cast<std::size_t>(k)]);
        cells[static_cast<std::size_t>(k)] = cells_[old];
        for (int j : neighbors_[old]) {
            nbrs[static_cast<std::size_t>(k)].push_back(new_index[static_cast<std::size_t>(j)]);
        }
    }
    // The grid shape no longer describes the index layout.
    return Landscape(std::move(cells), std::move(nbrs));
}

Landscape build_grid(int rows, int cols, const CellParams& params) {
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("grid dimensions must be positive");
    }
    const auto n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    std::vector<CellParams> cells(n, params);
    std::vector<std::vector<int>> nbrs(n);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            auto& nb = nbrs[static_cast<std::size_t>(r * cols + c)];
            if (r > 0) nb.push_back((r - 1) * cols + c);
            if (c > 0) nb.push_back(r * cols + c - 1);
            if (c + 1 < cols) nb.push_back(r * cols + c + 1);
            if (r + 1 < rows) nb.push_back((r + 1) * cols + c);
        }
    }
    return Landscape(std::move(cells), std::move(nbrs), rows, cols);
}

std::vector<CellPair> connection_pairs(const Landscape& landscape) {
    return landscape.connection_pairs();
}

AgeDistribution AgeDistribution::uniform(int max_age) {
    if (max_age < 0) throw std::invalid_argument("max_age must be nonnegative");
    const auto k = static_cast<std::size_t>(max_age) + 1;
    return AgeDistribution{std::vector<double>(k, 1.0 / static_cast<double>(k))};
}

AgeDistribution AgeDistribution::point(int age) {
    if (age < 0) throw std::invalid_argument("age must be nonnegative");
    std::vector<double> p(static_cast<std::size_t>(age) + 1, 0.0);
    p.back() = 1.0;
    return AgeDistribution{std::move(p)};
}

void AgeDistribution::validate(int max_age) const {
    if (probabilities.empty()) {
        throw std::invalid_argument("age distribution is empty");
    }
    double total = 0.0;
    for (std::size_t a = 0; a < probabilities.size(); ++a) {
        const double p = probabilities[a];
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw std::invalid_argument("age probabilities must be finite and nonnegative");
        }
        if (p > 0.0 && static_cast<int>(a) > max_age) {
            throw std::invalid_argument("age distribution support exceeds max_tfi");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("age probabilities must sum to 1");
    }
}

int AgeDistribution::sample(double u) const {
    double cdf = 0.0;
    int last_positive = 0;
    for (std::size_t a = 0; a < probabilities.size(); ++a) {
        if (probabilities[a] <= 0.0) continue;
        cdf += probabilities[a];
        last_positive = static_cast<int>(a);
        if (u < cdf) return last_positive;
    }
    // Rounding can leave the final CDF a hair below u.
    return last_positive;
}

Landscape generate_random(const GenerationConfig& config, const CellParams& params) {
    if (config.rows < 1 || config.cols < 1) {
        throw std::invalid_argument("grid dimensions must be positive");
    }
    params.validate();
    config.ages.validate(params.max_tfi);
    const Landscape grid = build_grid(config.rows, config.cols, params);
    Rng rng(config.seed);
    std::vector<int> ages(static_cast<std::size_t>(grid.size()));
    for (auto& a : ages) a = config.ages.sample(rng.uniform01());
    return grid.with_initial_ages(ages);
}

namespace {

using nlohmann::json;

// Emits a scalar when every cell shares the value, else a per-cell array.
template <typename Get>
json uniform_or_array(const Landscape& l, Get get) {
    const auto& cells = l.cells();
    const auto first = get(cells.front());
    const bool uniform =
        std::all_of(cells.begin(), cells.end(), [&](const CellParams& c) { return get(c) == first; });
    if (uniform) return json(first);
    json arr = json::array();
    for (const auto& c : cells) arr.push_back(get(c));
    return arr;
}

template <typename T>
std::vector<T> scalar_or_array(const json& doc, const char* key, std::size_t n, T fallback) {
    if (!doc.contains(key)) return std::vector<T>(n, fallback);
    const auto& v = doc.at(key);
    if (v.is_array()) {
        if (v.size() != n) {
            throw std::invalid_argument(std::string("field '") + key + "' has wrong length");
        }
        return v.get<std::vector<T>>();
    }
    return std::vector<T>(n, v.get<T>());
}

}  // namespace

void write_landscape(std::ostream& out, const Landscape& landscape) {
    json doc;
    doc["format"] = "fueltreat-landscape-1";
    if (landscape.is_grid()) {
        doc["rows"] = landscape.rows();
        doc["cols"] = landscape.cols();
    }
    json ages = json::array();
    for (const auto& c : landscape.cells()) ages.push_back(c.initial_age);
    doc["initial_ages"] = std::move(ages);
    doc["mature_threshold"] = uniform_or_array(landscape, [](const CellParams& c) { return c.mature_threshold; });
    doc["high_threshold"] = uniform_or_array(landscape, [](const CellParams& c) { return c.high_threshold; });
    doc["min_tfi"] = uniform_or_array(landscape, [](const CellParams& c) { return c.min_tfi; });
    doc["max_tfi"] = uniform_or_array(landscape, [](const CellParams& c) { return c.max_tfi; });
    doc["area"] = uniform_or_array(landscape, [](const CellParams& c) { return c.area; });
    if (!landscape.is_grid()) {
        json nb = json::array();
        for (int i = 0; i < landscape.size(); ++i) {
            const auto s = landscape.neighbors(i);
            nb.push_back(std::vector<int>(s.begin(), s.end()));
        }
        doc["neighbors"] = std::move(nb);
    }
    out << doc.dump(2) << '\n';
}

Landscape read_landscape(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("landscape document: ") + e.what());
    }
    try {
        if (doc.contains("format") && doc.at("format") != "fueltreat-landscape-1") {
            throw std::invalid_argument("unsupported landscape format " + doc.at("format").dump());
        }
        const auto ages = doc.at("initial_ages").get<std::vector<int>>();
        const std::size_t n = ages.size();
        if (n == 0) throw std::invalid_argument("initial_ages is empty");
        const CellParams defaults;
        const auto mature = scalar_or_array<int>(doc, "mature_threshold", n, defaults.mature_threshold);
        const auto high = scalar_or_array<int>(doc, "high_threshold", n, defaults.high_threshold);
        const auto min_tfi = scalar_or_array<int>(doc, "min_tfi", n, defaults.min_tfi);
        const auto max_tfi = scalar_or_array<int>(doc, "max_tfi", n, defaults.max_tfi);
        const auto area = scalar_or_array<double>(doc, "area", n, defaults.area);
        std::vector<CellParams> cells(n);
        for (std::size_t i = 0; i < n; ++i) {
            cells[i] = CellParams{area[i], mature[i], high[i], min_tfi[i], max_tfi[i], ages[i]};
        }
        if (doc.contains("neighbors")) {
            auto nbrs = doc.at("neighbors").get<std::vector<std::vector<int>>>();
            const int rows = doc.value("rows", 0);
            const int cols = doc.value("cols", 0);
            return Landscape(std::move(cells), std::move(nbrs), rows, cols);
        }
        const int rows = doc.at("rows").get<int>();
        const int cols = doc.at("cols").get<int>();
        if (rows < 1 || cols < 1 ||
            static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) != n) {
            throw std::invalid_argument("rows x cols does not match initial_ages length");
        }
        const Landscape grid = build_grid(rows, cols, cells.front());
        std::vector<std::vector<int>> nbrs;
        for (int i = 0; i < grid.size(); ++i) {
            const auto s = grid.neighbors(i);
            nbrs.emplace_back(s.begin(), s.end());
        }
        return Landscape(std::move(cells), std::move(nbrs), rows, cols);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("landscape document: ") + e.what());
    }
}

Landscape load_landscape(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_landscape(in);
}

void save_landscape(const std::string& path, const Landscape& landscape) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_landscape(out, landscape);
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace fueltreat
