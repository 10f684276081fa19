#pragma once

#include <iosfwd>
#include <string>

#include "fueltreat/experiment.hpp"

namespace fueltreat {

// JSON experiment configuration (docs/formats.md). Absent keys keep their
// defaults; unknown keys are rejected so typos do not pass silently.
ExperimentConfig read_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
void write_config(std::ostream& out, const ExperimentConfig& config);
void save_config(const std::string& path, const ExperimentConfig& config);

}  // namespace fueltreat
