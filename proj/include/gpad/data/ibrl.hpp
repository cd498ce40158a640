#pragma once

// IBRL-format telemetry ingestion. Readings are whitespace-separated lines
//   date time epoch moteid temperature humidity light voltage
// and node coordinates come from a separate "moteid x y" file.

#include <iosfwd>
#include <map>

#include "gpad/data/series.hpp"

namespace gpad::data {

struct IbrlOptions {
    std::int64_t ffill_limit = 10;        // forward-fill gaps up to this length, interpolate beyond
    double max_missing_fraction = 0.40;   // drop nodes missing more epochs than this
    double max_malformed_fraction = 0.05; // hard error beyond this

    double humidity_min = -10.0, humidity_max = 110.0;
    double voltage_min = 0.0, voltage_max = 5.0;  // valid range (voltage_min, voltage_max]
};

struct IbrlStats {
    std::int64_t lines_total = 0;
    std::int64_t lines_malformed = 0;
    std::int64_t duplicates = 0;
    std::int64_t invalid_cells = 0;       // physically impossible readings
    std::int64_t filled_forward = 0;
    std::int64_t filled_interpolated = 0;
    std::vector<int> dropped_nodes;
    std::vector<std::string> warnings;
};

struct IbrlResult {
    SensorSeries series;
    std::map<int, std::array<double, 2>> coordinates;  // by mote id, kept nodes only
    IbrlStats stats;
};

IbrlResult parse_ibrl(std::istream& readings, std::istream* coords, const IbrlOptions& opt = {});

// Re-emit a gap-free series in the readings format (synthetic timestamps,
// epochs 0..T-1, full %.17g precision). parse_ibrl of the output reproduces
// the series exactly.
void serialize_ibrl(const SensorSeries& series, std::ostream& os);

}  // namespace gpad::data
