#pragma once

#include <iosfwd>
#include <string>

#include "photonbound/analytical/measurement_table.hpp"
#include "photonbound/cli/config.hpp"

namespace photonbound::cli {

// %.17g, so every double survives a write/read cycle unchanged.
std::string format_double(double v);

// Schema:
//   # detector=threshold key=value ...
//   x,<setting>,<setting>,...
//   <intensity>,<f>,<f>,...
// Threshold settings are attenuations; homodyne settings are bins `lo:hi`.
void write_table(std::ostream& os, const MeasurementTable& table);

// Throws ConfigError with line and column of the first offending field.
MeasurementTable read_table(std::istream& is, const std::string& origin = "<table>");
MeasurementTable load_table(const std::string& path);

}  // namespace photonbound::cli
