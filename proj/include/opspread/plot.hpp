#pragma once

#include <map>
#include <string>
#include <vector>

namespace opspread {

enum class PlotKind { FCurve, VelocityCorrections, FrontHeat };

std::string to_string(PlotKind k);

// Named series plus an optional [t][x] grid for heat strips.
struct PlotData {
    std::map<std::string, std::vector<double>> series;
    std::vector<std::vector<double>> grid;
};

// FCurve needs "epsilon" and "f_chain"; VelocityCorrections needs "epsilon", "dv_F" and
// "dv_S_printed"; FrontHeat needs a non-empty grid. Throws missing-series otherwise.
// Output is a pure function of the data.
std::string emit_plot(const PlotData& data, PlotKind kind);
void write_plot(const std::string& path, const PlotData& data, PlotKind kind);

}  // namespace opspread
