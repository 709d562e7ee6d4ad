#pragma once

#include <string>
#include <vector>

#include "dsat/control.hpp"
#include "dsat/plant.hpp"
#include "dsat/simulate.hpp"

namespace dsat {

// Named design-point configurations.  The plant and loop presets carry the
// published design constants; the scenario groups reproduce the published
// response studies (an eccentricity sweep at 30 deg inclination and an
// inclination sweep at e = 0.2, each over a short horizon and over ten
// orbital periods, for each control axis).

std::vector<std::string> plant_preset_names();
PlantMatrices plant_preset(const std::string& name);

std::vector<std::string> loop_preset_names();
FeedbackLoop loop_preset(const std::string& name);

struct ScenarioGroup {
  std::string name;
  std::string angle_of_interest;  // column the study focuses on
  std::vector<Scenario> members;
};

const std::vector<ScenarioGroup>& scenario_groups();

// Flat lookup of a single scenario by its full member name.
Scenario find_scenario(const std::string& name);
std::vector<std::string> scenario_names();

// Published-figure aliases: maps a figure number to the scenario group
// that reproduces it.  Throws std::invalid_argument for unknown numbers.
const std::vector<std::pair<int, std::string>>& figure_aliases();
std::string figure_alias(int figure);

}  // namespace dsat
