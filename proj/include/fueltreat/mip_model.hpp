#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fueltreat/landscape.hpp"
#include "fueltreat/schedule.hpp"
#include "fueltreat/schedule_eval.hpp"

namespace fueltreat {

enum class VarKind { binary, continuous };
enum class Sense { le, ge, eq };

struct Variable {
    std::string name;
    VarKind kind = VarKind::continuous;
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
};

struct Row {
    std::string name;
    int equation = 0;                           // model equation number, 0 if unknown
    std::vector<std::pair<int, double>> terms;  // (variable id, coefficient)
    Sense sense = Sense::le;
    double rhs = 0.0;
};

/// Explicit linear model: variables, rows, and a minimisation objective.
///
/// Naming is part of the file contract (docs/formats.md):
///   x_i_t   treatment          A_i_t   fuel age (continuous, t = 0..T)
///   H_i_t   high fuel load     HC_i_j_t  high pair (i < j)
///   MT_i_t  mature             HB_i_j_t  habitat pair (i < j)
///   O_i_t   old (t = 0..T-1)
/// Rows are named E<eq>_<indices>, e.g. E4_3_2 or E9_0_1_5.
class MipInstance {
public:
    int add_variable(std::string name, VarKind kind);
    void add_row(Row row);

    int find(const std::string& name) const;  // -1 if absent
    int id(const std::string& name) const;    // throws std::out_of_range if absent

    const std::vector<Variable>& variables() const { return vars_; }
    Variable& variable(int id) { return vars_.at(static_cast<std::size_t>(id)); }
    const std::vector<Row>& rows() const { return rows_; }
    std::vector<std::pair<int, double>>& objective() { return objective_; }
    const std::vector<std::pair<int, double>>& objective() const { return objective_; }

    int count_rows(int equation) const;
    int count_variables(VarKind kind) const;
    int count_prefix(const std::string& prefix) const;

    std::string name = "fueltreat";
    double big_m = 0.0;
    int horizon = 0;
    /// Years whose habitat-target row was left out because G_t = 0.
    std::vector<int> omitted_target_years;
    /// Cells without neighbours; their forced-treatment row is vacuous.
    std::vector<int> isolated_cells;

private:
    std::vector<Variable> vars_;
    std::vector<Row> rows_;
    std::vector<std::pair<int, double>> objective_;
    std::unordered_map<std::string, int> index_;
};

std::string x_name(int i, int t);
std::string age_name(int i, int t);
std::string high_name(int i, int t);
std::string mature_name(int i, int t);
std::string old_name(int i, int t);
std::string high_pair_name(int i, int j, int t);
std::string habitat_pair_name(int i, int j, int t);

/// Lowers the scheduling problem to its explicit MIP. Throws
/// std::invalid_argument if horizon < 1, the setting horizon differs, or a
/// habitat target exceeds the number of adjacent pairs.
MipInstance build_mip(const Landscape& landscape, const SettingSpec& setting, int horizon);

/// Uniform big-M: max initial age + horizon + 1.
double big_m_for(const Landscape& landscape, int horizon);

/// Full variable vector for a schedule: ages, classifications and pair
/// indicators at their exact values (HC at its lower bound).
std::vector<double> lift_schedule(const MipInstance& instance, const Landscape& landscape,
                                  const Schedule& schedule);

/// x restriction of a point, rounded to the nearest integer.
Schedule schedule_from_point(const MipInstance& instance, int cells, const std::vector<double>& values);

struct RowViolation {
    int row = -1;
    double amount = 0.0;
};

/// Rows violated by more than `tolerance`, plus bound and integrality
/// violations reported with row = -1 - variable id.
std::vector<RowViolation> violated_rows(const MipInstance& instance, const std::vector<double>& values,
                                        double tolerance = 1e-6);

double objective_value(const MipInstance& instance, const std::vector<double>& values);

/// Free-format MPS with INTORG/INTEND markers around the binaries.
void write_mps(std::ostream& out, const MipInstance& instance);
void save_mps(const std::string& path, const MipInstance& instance);
/// Reads free MPS as written by write_mps (and the common subset other
/// tools emit). Equation tags are recovered from E<eq>_ row names.
MipInstance read_mps(std::istream& in);

enum class SolutionStatus { optimal, feasible, infeasible, unknown };
std::string_view to_string(SolutionStatus status);

struct SolutionVector {
    std::vector<double> values;                 // indexed by variable id
    double objective_value = 0.0;               // recomputed from HC values
    std::optional<double> claimed_objective;    // from a "# Objective value = v" header
    bool objective_mismatch = false;            // |claimed - recomputed| > 1e-6
    SolutionStatus status = SolutionStatus::unknown;
    std::vector<RowViolation> violations;

    double value(const MipInstance& instance, const std::string& name) const;
};

/// Parses "name value" lines. Blank lines and lines starting with '#' are
/// skipped; a '#' line of the form "# Objective value = v" is taken as the
/// solver's claimed objective. Missing variables default to 0. Throws
/// std::invalid_argument on a malformed line or unknown name. Status is
/// `feasible` if every row, bound and integrality condition holds within
/// 1e-6, else `infeasible`.
SolutionVector import_solution(const MipInstance& instance, std::istream& in);
SolutionVector import_solution_file(const MipInstance& instance, const std::string& path);

/// Writes a solution in the format import_solution reads.
void write_solution(std::ostream& out, const MipInstance& instance, const std::vector<double>& values);

/// Result of the early-year relaxation search.
struct RampResult {
    int relaxed_years = 0;              // k: G_t = 0 for t <= k
    std::vector<int> targets;           // G_t for t = 1..T
    bool feasible = false;              // solve_fn accepted some k in 0..T
};

/// Returns the G series with G_t = low for t <= k and base_target after,
/// where k is the smallest value in 0..T accepted by solve_fn. `low`
/// defaults to 0. Exceptions from solve_fn propagate.
RampResult ramp_targets(const Landscape& landscape, int base_target, int horizon,
                        const std::function<bool(const std::vector<int>&)>& solve_fn, int low = 0);

}  // namespace fueltreat
