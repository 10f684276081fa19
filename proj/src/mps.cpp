// MPS export/import and solution-file exchange for MipInstance.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fueltreat/mip_model.hpp"

namespace fueltreat {

namespace {

// Shortest decimal text that reads back to the same double.
std::string number(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buf.data(), end);
}

double parse_number(const std::string& tok, const std::string& context) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || end != tok.c_str() + tok.size() || std::isnan(v)) {
        throw std::invalid_argument(context + ": not a number: '" + tok + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& line) {
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string tok;
    while (ls >> tok) toks.push_back(tok);
    return toks;
}

char sense_code(Sense s) {
    switch (s) {
        case Sense::le: return 'L';
        case Sense::ge: return 'G';
        case Sense::eq: return 'E';
    }
    return 'N';
}

int equation_from_name(const std::string& name) {
    if (name.size() < 2 || name[0] != 'E') return 0;
    int eq = 0;
    const auto* first = name.data() + 1;
    const auto* last = name.data() + name.size();
    auto [ptr, ec] = std::from_chars(first, last, eq);
    if (ec != std::errc{} || ptr == first || (ptr != last && *ptr != '_')) return 0;
    return eq;
}

}  // namespace

void write_mps(std::ostream& out, const MipInstance& instance) {
    const auto& vars = instance.variables();
    const auto& rows = instance.rows();

    // Column-major view of the matrix, objective first.
    std::vector<std::vector<std::pair<std::string_view, double>>> columns(vars.size());
    for (const auto& [var, coef] : instance.objective()) {
        columns[static_cast<std::size_t>(var)].emplace_back("OBJ", coef);
    }
    for (const auto& r : rows) {
        for (const auto& [var, coef] : r.terms) columns[static_cast<std::size_t>(var)].emplace_back(r.name, coef);
    }

    out << "* fueltreat treatment-scheduling model\n";
    out << "* big_m " << number(instance.big_m) << '\n';
    out << "* horizon " << instance.horizon << '\n';
    out << "NAME " << instance.name << '\n';
    out << "ROWS\n";
    out << " N OBJ\n";
    for (const auto& r : rows) out << ' ' << sense_code(r.sense) << ' ' << r.name << '\n';
    out << "COLUMNS\n";
    bool in_integer = false;
    int marker = 0;
    for (std::size_t k = 0; k < vars.size(); ++k) {
        const bool integer = vars[k].kind == VarKind::binary;
        if (integer != in_integer) {
            out << "    MARKER" << marker++ << " 'MARKER' " << (integer ? "'INTORG'" : "'INTEND'") << '\n';
            in_integer = integer;
        }
        if (columns[k].empty()) {
            // Keep otherwise unreferenced columns visible to readers.
            out << "    " << vars[k].name << " OBJ 0\n";
        }
        for (const auto& [row_name, coef] : columns[k]) {
            out << "    " << vars[k].name << ' ' << row_name << ' ' << number(coef) << '\n';
        }
    }
    if (in_integer) out << "    MARKER" << marker << " 'MARKER' 'INTEND'\n";
    out << "RHS\n";
    for (const auto& r : rows) {
        if (r.rhs != 0.0) out << "    RHS " << r.name << ' ' << number(r.rhs) << '\n';
    }
    out << "BOUNDS\n";
    for (const auto& v : vars) {
        if (v.kind == VarKind::binary) {
            out << " BV BND " << v.name << '\n';
            continue;
        }
        if (v.lower != 0.0) {
            if (std::isinf(v.lower)) out << " MI BND " << v.name << '\n';
            else out << " LO BND " << v.name << ' ' << number(v.lower) << '\n';
        }
        if (!std::isinf(v.upper)) out << " UP BND " << v.name << ' ' << number(v.upper) << '\n';
    }
    out << "ENDATA\n";
}

void save_mps(const std::string& path, const MipInstance& instance) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_mps(out, instance);
    if (!out) throw std::runtime_error("write failed: " + path);
}

MipInstance read_mps(std::istream& in) {
    enum class Section { none, rows, columns, rhs, bounds, done };
    MipInstance mip;
    std::string objective_row;
    std::map<std::string, std::size_t> row_index;
    std::vector<Row> rows;
    std::vector<std::pair<int, double>> objective;
    Section section = Section::none;
    bool integer = false;
    std::string line;
    int line_no = 0;

    auto fail = [&](const std::string& what) {
        throw std::invalid_argument("MPS line " + std::to_string(line_no) + ": " + what);
    };
    auto variable = [&](const std::string& name, bool is_int) {
        int k = mip.find(name);
        if (k < 0) k = mip.add_variable(name, is_int ? VarKind::binary : VarKind::continuous);
        return k;
    };

    while (std::getline(in, line)) {
        ++line_no;
        const auto toks = split(line);
        if (toks.empty()) continue;
        if (toks[0][0] == '*') {
            if (toks.size() == 3 && toks[1] == "big_m") mip.big_m = parse_number(toks[2], "big_m");
            if (toks.size() == 3 && toks[1] == "horizon") mip.horizon = static_cast<int>(parse_number(toks[2], "horizon"));
            continue;
        }
        const bool header = !std::isspace(static_cast<unsigned char>(line[0]));
        if (header) {
            const auto& s = toks[0];
            if (s == "NAME") { mip.name = toks.size() > 1 ? toks[1] : ""; continue; }
            if (s == "ROWS") { section = Section::rows; continue; }
            if (s == "COLUMNS") { section = Section::columns; continue; }
            if (s == "RHS") { section = Section::rhs; continue; }
            if (s == "BOUNDS") { section = Section::bounds; continue; }
            if (s == "ENDATA") { section = Section::done; break; }
            if (s == "RANGES") fail("RANGES section is not supported");
            fail("unknown section '" + s + "'");
        }
        switch (section) {
            case Section::rows: {
                if (toks.size() != 2) fail("expected '<type> <name>'");
                const auto& type = toks[0];
                if (type == "N") {
                    if (objective_row.empty()) objective_row = toks[1];
                    continue;
                }
                Row r;
                r.name = toks[1];
                r.equation = equation_from_name(r.name);
                if (type == "L") r.sense = Sense::le;
                else if (type == "G") r.sense = Sense::ge;
                else if (type == "E") r.sense = Sense::eq;
                else fail("unknown row type '" + type + "'");
                if (!row_index.emplace(r.name, rows.size()).second) fail("duplicate row " + r.name);
                rows.push_back(std::move(r));
                break;
            }
            case Section::columns: {
                if (toks.size() == 3 && (toks[1] == "'MARKER'" || toks[1] == "MARKER")) {
                    if (toks[2] == "'INTORG'" || toks[2] == "INTORG") integer = true;
                    else if (toks[2] == "'INTEND'" || toks[2] == "INTEND") integer = false;
                    else fail("unknown marker");
                    continue;
                }
                if (toks.size() != 3 && toks.size() != 5) fail("expected '<col> <row> <value> [<row> <value>]'");
                const int var = variable(toks[0], integer);
                for (std::size_t p = 1; p + 1 < toks.size(); p += 2) {
                    const double v = parse_number(toks[p + 1], "coefficient");
                    if (toks[p] == objective_row) {
                        if (v != 0.0) objective.emplace_back(var, v);
                        continue;
                    }
                    const auto it = row_index.find(toks[p]);
                    if (it == row_index.end()) fail("unknown row " + toks[p]);
                    rows[it->second].terms.emplace_back(var, v);
                }
                break;
            }
            case Section::rhs: {
                if (toks.size() != 3 && toks.size() != 5) fail("expected '<set> <row> <value> [<row> <value>]'");
                for (std::size_t p = 1; p + 1 < toks.size(); p += 2) {
                    if (toks[p] == objective_row) continue;
                    const auto it = row_index.find(toks[p]);
                    if (it == row_index.end()) fail("unknown row " + toks[p]);
                    rows[it->second].rhs = parse_number(toks[p + 1], "rhs");
                }
                break;
            }
            case Section::bounds: {
                if (toks.size() < 3) fail("expected '<type> <set> <col> [<value>]'");
                const int k = mip.find(toks[2]);
                if (k < 0) fail("bound on unknown column " + toks[2]);
                auto& v = mip.variable(k);
                const auto& type = toks[0];
                auto value = [&] {
                    if (toks.size() != 4) fail("bound needs a value");
                    return parse_number(toks[3], "bound");
                };
                if (type == "BV") { v.kind = VarKind::binary; v.lower = 0.0; v.upper = 1.0; }
                else if (type == "UP") v.upper = value();
                else if (type == "LO") v.lower = value();
                else if (type == "FX") v.lower = v.upper = value();
                else if (type == "MI") v.lower = -std::numeric_limits<double>::infinity();
                else if (type == "PL") v.upper = std::numeric_limits<double>::infinity();
                else if (type == "FR") {
                    v.lower = -std::numeric_limits<double>::infinity();
                    v.upper = std::numeric_limits<double>::infinity();
                } else fail("unsupported bound type '" + type + "'");
                break;
            }
            case Section::none:
            case Section::done:
                fail("data outside a section");
        }
    }
    if (section != Section::done) throw std::invalid_argument("MPS file has no ENDATA");
    for (auto& r : rows) mip.add_row(std::move(r));
    mip.objective() = std::move(objective);
    return mip;
}

std::string_view to_string(SolutionStatus status) {
    switch (status) {
        case SolutionStatus::optimal: return "optimal";
        case SolutionStatus::feasible: return "feasible";
        case SolutionStatus::infeasible: return "infeasible";
        case SolutionStatus::unknown: return "unknown";
    }
    return "unknown";
}

double SolutionVector::value(const MipInstance& instance, const std::string& name) const {
    return values.at(static_cast<std::size_t>(instance.id(name)));
}

SolutionVector import_solution(const MipInstance& instance, std::istream& in) {
    SolutionVector sol;
    sol.values.assign(instance.variables().size(), 0.0);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto toks = split(line);
        if (toks.empty()) continue;
        if (toks[0][0] == '#') {
            // "# Objective value = 12" (Gurobi-style header).
            const auto pos = line.find('=');
            if (pos != std::string::npos && line.find("bjective") != std::string::npos) {
                const auto rhs = split(line.substr(pos + 1));
                if (rhs.size() == 1) sol.claimed_objective = parse_number(rhs[0], "objective");
            }
            continue;
        }
        const std::string where = "solution line " + std::to_string(line_no);
        if (toks.size() != 2) throw std::invalid_argument(where + ": expected '<name> <value>'");
        const int k = instance.find(toks[0]);
        if (k < 0) throw std::invalid_argument(where + ": unknown variable '" + toks[0] + "'");
        sol.values[static_cast<std::size_t>(k)] = parse_number(toks[1], where);
    }
    sol.objective_value = objective_value(instance, sol.values);
    if (sol.claimed_objective && std::abs(*sol.claimed_objective - sol.objective_value) > 1e-6) {
        sol.objective_mismatch = true;
    }
    sol.violations = violated_rows(instance, sol.values, 1e-6);
    sol.status = sol.violations.empty() ? SolutionStatus::feasible : SolutionStatus::infeasible;
    return sol;
}

SolutionVector import_solution_file(const MipInstance& instance, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return import_solution(instance, in);
}

void write_solution(std::ostream& out, const MipInstance& instance, const std::vector<double>& values) {
    out << "# Objective value = " << number(objective_value(instance, values)) << '\n';
    const auto& vars = instance.variables();
    for (std::size_t k = 0; k < vars.size(); ++k) out << vars[k].name << ' ' << number(values.at(k)) << '\n';
}

}  // namespace fueltreat
