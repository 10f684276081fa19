#include "fueltreat/schedule.hpp"

#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fueltreat {

Schedule::Schedule(int cells, int horizon) : cells_(cells), horizon_(horizon) {
    if (cells < 1) throw std::invalid_argument("schedule needs at least one cell");
    if (horizon < 1) throw std::invalid_argument("schedule horizon must be at least 1");
    x_.assign(static_cast<std::size_t>(cells) * static_cast<std::size_t>(horizon), 0);
}

int Schedule::treated_count(int year) const {
    int count = 0;
    for (int i = 0; i < cells_; ++i) count += treated(i, year) ? 1 : 0;
    return count;
}

int Schedule::total_treatments() const {
    return std::accumulate(x_.begin(), x_.end(), 0);
}

void write_schedule(std::ostream& out, const Schedule& schedule) {
    for (int t = 1; t <= schedule.horizon(); ++t) {
        for (int i = 0; i < schedule.cells(); ++i) {
            if (i > 0) out << ' ';
            out << (schedule.treated(i, t) ? '1' : '0');
        }
        out << '\n';
    }
}

std::vector<std::vector<int>> read_binary_matrix(std::istream& in) {
    std::vector<std::vector<int>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        std::vector<int> row;
        std::string tok;
        while (ls >> tok) {
            if (tok != "0" && tok != "1") {
                throw std::invalid_argument("line " + std::to_string(line_no) +
                                            ": expected 0 or 1, got '" + tok + "'");
            }
            row.push_back(tok == "1" ? 1 : 0);
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": ragged row");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Schedule read_schedule(std::istream& in) {
    const auto rows = read_binary_matrix(in);
    if (rows.empty()) throw std::invalid_argument("schedule file has no rows");
    Schedule s(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
    for (int t = 1; t <= s.horizon(); ++t) {
        for (int i = 0; i < s.cells(); ++i) {
            s.set(i, t, rows[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(i)] != 0);
        }
    }
    return s;
}

Schedule load_schedule(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_schedule(in);
}

void save_schedule(const std::string& path, const Schedule& schedule) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_schedule(out, schedule);
}

}  // namespace fueltreat
