#pragma once

#include "tndkit/dgp.hpp"
#include "tndkit/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace tndkit {

// Round-trip-exact decimal rendering (%.17g trimmed to shortest that parses
// back identically).
std::string format_double(double x);

void write_dataset_csv(const TndDataset& data, std::ostream& os);
void write_dataset_csv(const TndDataset& data, const std::string& path);

void write_population_csv(const std::vector<FullPopulationRow>& rows, std::ostream& os);
void write_population_csv(const std::vector<FullPopulationRow>& rows, const std::string& path);

std::vector<FullPopulationRow> read_population_csv(std::istream& is);
std::vector<FullPopulationRow> read_population_csv(const std::string& path);

// Parse a dataset CSV with columns `v`, `y`, and one or more covariate
// columns. Numeric covariate columns pass through; categorical columns
// (any non-numeric content) are one-hot encoded over their observed levels.
// schema == "quebec" instead validates and encodes the fixed real-data
// layout (age_group, sex, multimorbidity, epi_week). Throws SchemaError
// with row/column diagnostics.
TndDataset read_dataset_csv(std::istream& is, const std::string& schema = "generic");
TndDataset read_dataset_csv(const std::string& path, const std::string& schema = "generic");

} // namespace tndkit
