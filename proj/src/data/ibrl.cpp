#include "gpad/data/ibrl.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gpad::data {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

bool parse_int(const std::string& s, long& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto res = std::from_chars(b, e, out);
    return res.ec == std::errc() && res.ptr == e;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

}  // namespace

IbrlResult parse_ibrl(std::istream& readings, std::istream* coords, const IbrlOptions& opt) {
    IbrlResult res;
    IbrlStats& st = res.stats;

    std::map<int, std::array<double, 2>> coord_map;
    if (coords) {
        std::string line;
        while (std::getline(*coords, line)) {
            auto f = split_ws(line);
            if (f.empty()) continue;
            long mote;
            double x, y;
            if (f.size() != 3 || !parse_int(f[0], mote) || !parse_double(f[1], x) || !parse_double(f[2], y))
                throw std::runtime_error("malformed coordinate line: " + line);
            coord_map[static_cast<int>(mote)] = {x, y};
        }
    }

    // (mote, epoch) -> 4 modality readings; first occurrence wins.
    std::map<std::pair<int, long>, std::array<double, 4>> rows;
    std::string line;
    while (std::getline(readings, line)) {
        auto f = split_ws(line);
        if (f.empty()) continue;
        ++st.lines_total;
        long epoch, mote;
        std::array<double, 4> vals{};
        bool ok = f.size() == 8 && parse_int(f[2], epoch) && parse_int(f[3], mote);
        for (int m = 0; ok && m < 4; ++m) ok = parse_double(f[4 + static_cast<std::size_t>(m)], vals[static_cast<std::size_t>(m)]);
        if (!ok) {
            ++st.lines_malformed;
            continue;
        }
        if (coords && !coord_map.count(static_cast<int>(mote))) {
            // Nodes without a known position cannot join the graph.
            continue;
        }
        // Physically impossible readings become missing cells.
        if (!std::isfinite(vals[1]) || vals[1] < opt.humidity_min || vals[1] > opt.humidity_max) {
            vals[1] = kMissing;
            ++st.invalid_cells;
        }
        if (!std::isfinite(vals[3]) || vals[3] <= opt.voltage_min || vals[3] > opt.voltage_max) {
            vals[3] = kMissing;
            ++st.invalid_cells;
        }
        auto key = std::make_pair(static_cast<int>(mote), epoch);
        if (rows.count(key)) {
            ++st.duplicates;
            continue;
        }
        rows[key] = vals;
    }

    if (st.lines_total > 0 &&
        static_cast<double>(st.lines_malformed) > opt.max_malformed_fraction * static_cast<double>(st.lines_total))
        throw std::runtime_error("IBRL parse: " + std::to_string(st.lines_malformed) + " of " +
                                 std::to_string(st.lines_total) + " lines malformed (limit " +
                                 std::to_string(opt.max_malformed_fraction * 100) + "%)");
    if (rows.empty()) throw std::runtime_error("IBRL parse: no usable readings");

    long epoch_min = std::numeric_limits<long>::max(), epoch_max = std::numeric_limits<long>::min();
    std::set<int> motes;
    for (const auto& [key, v] : rows) {
        motes.insert(key.first);
        epoch_min = std::min(epoch_min, key.second);
        epoch_max = std::max(epoch_max, key.second);
    }
    const std::int64_t T = epoch_max - epoch_min + 1;

    // Drop nodes with too many absent epochs.
    std::vector<int> kept;
    for (int mote : motes) {
        std::int64_t present = 0;
        for (long e = epoch_min; e <= epoch_max; ++e) present += rows.count({mote, e}) ? 1 : 0;
        const double missing = 1.0 - static_cast<double>(present) / static_cast<double>(T);
        if (missing > opt.max_missing_fraction) {
            st.dropped_nodes.push_back(mote);
            st.warnings.push_back("node " + std::to_string(mote) + " dropped: missing " +
                                  std::to_string(missing * 100) + "% of epochs");
        } else {
            kept.push_back(mote);
        }
    }
    if (kept.empty()) throw std::runtime_error("IBRL parse: all nodes dropped by the gap policy");

    const std::int64_t N = static_cast<std::int64_t>(kept.size());
    const std::int64_t M = 4;
    Tensor values({N, M, T});

    for (std::int64_t ni = 0; ni < N; ++ni) {
        const int mote = kept[static_cast<std::size_t>(ni)];
        for (std::int64_t m = 0; m < M; ++m) {
            std::vector<double> col(static_cast<std::size_t>(T), kMissing);
            for (long e = epoch_min; e <= epoch_max; ++e) {
                auto it = rows.find({mote, e});
                if (it != rows.end()) col[static_cast<std::size_t>(e - epoch_min)] = it->second[static_cast<std::size_t>(m)];
            }
            // Gap policy: leading gaps backfill, runs <= limit forward-fill,
            // longer interior runs interpolate, trailing gaps carry forward.
            std::int64_t first_valid = -1;
            for (std::int64_t t = 0; t < T; ++t)
                if (!std::isnan(col[static_cast<std::size_t>(t)])) {
                    first_valid = t;
                    break;
                }
            if (first_valid < 0)
                throw std::runtime_error("node " + std::to_string(mote) + " has no valid readings for modality " +
                                         std::to_string(m));
            for (std::int64_t t = 0; t < first_valid; ++t) {
                col[static_cast<std::size_t>(t)] = col[static_cast<std::size_t>(first_valid)];
                ++st.filled_forward;
            }
            std::int64_t last_valid = first_valid;
            for (std::int64_t t = first_valid + 1; t < T; ++t) {
                if (!std::isnan(col[static_cast<std::size_t>(t)])) {
                    const std::int64_t run = t - last_valid - 1;
                    if (run > 0) {
                        if (run <= opt.ffill_limit) {
                            for (std::int64_t u = last_valid + 1; u < t; ++u) {
                                col[static_cast<std::size_t>(u)] = col[static_cast<std::size_t>(last_valid)];
                                ++st.filled_forward;
                            }
                        } else {
                            const double x0 = col[static_cast<std::size_t>(last_valid)];
                            const double x1 = col[static_cast<std::size_t>(t)];
                            for (std::int64_t u = last_valid + 1; u < t; ++u) {
                                const double frac = static_cast<double>(u - last_valid) / static_cast<double>(t - last_valid);
                                col[static_cast<std::size_t>(u)] = x0 + frac * (x1 - x0);
                                ++st.filled_interpolated;
                            }
                        }
                    }
                    last_valid = t;
                }
            }
            for (std::int64_t t = last_valid + 1; t < T; ++t) {
                col[static_cast<std::size_t>(t)] = col[static_cast<std::size_t>(last_valid)];
                ++st.filled_forward;
            }
            for (std::int64_t t = 0; t < T; ++t) values.at3(ni, m, t) = col[static_cast<std::size_t>(t)];
        }
    }

    res.series.values = std::move(values);
    res.series.node_ids = kept;
    res.series.modality_names = {"temperature", "humidity", "light", "voltage"};
    res.series.sample_interval_s = 31.0;
    for (int mote : kept) {
        auto it = coord_map.find(mote);
        if (it != coord_map.end()) res.coordinates[mote] = it->second;
    }
    return res;
}

void serialize_ibrl(const SensorSeries& series, std::ostream& os) {
    if (series.n_modalities() != 4)
        throw std::invalid_argument("serialize_ibrl: the readings format carries exactly 4 modalities");
    char buf[64];
    for (std::int64_t t = 0; t < series.n_steps(); ++t) {
        for (std::int64_t n = 0; n < series.n_nodes(); ++n) {
            os << "2004-03-01 00:00:00.0 " << t << ' ' << series.node_ids[static_cast<std::size_t>(n)];
            for (std::int64_t m = 0; m < 4; ++m) {
                std::snprintf(buf, sizeof(buf), " %.17g", series.values.at3(n, m, t));
                os << buf;
            }
            os << '\n';
        }
    }
}

}  // namespace gpad::data
