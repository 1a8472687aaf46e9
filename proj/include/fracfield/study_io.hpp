#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "fracfield/weak_error.hpp"

namespace fracfield {

/// Metadata written as '#' comment lines at the top of every artifact.
/// Everything except the timestamp is a function of the inputs.
struct ArtifactHeader {
  std::string artifact;  // e.g. "study rows"
  std::map<std::string, std::string> parameters;
  std::string calibration = "none";
  std::string generator = "none";
};

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

void write_header(std::ostream& out, const ArtifactHeader& header, const std::string& timestamp);

void write_rows_csv(std::ostream& out, const StudyResult& result);
void write_rates_csv(std::ostream& out, const StudyResult& result);

/// Log-log chart of abs_error against h for one functional, one series per beta.
void write_error_plot_svg(std::ostream& out, const StudyResult& result, const std::string& functional);

}  // namespace fracfield
