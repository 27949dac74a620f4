#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace tanlock {

enum class Edge { positive, negative };

constexpr std::string_view to_string(Edge edge) { return edge == Edge::positive ? "positive" : "negative"; }

/// Telemetry for one divider-output sampling event.
struct TraceRecord {
    std::uint64_t k = 0;    ///< sample index, 1-based
    double t = 0.0;         ///< sampling instant, s
    int ratio = 0;          ///< DIV value that produced this interval
    Edge edge = Edge::positive;
    double f_dco = 0.0;     ///< DCO frequency during the interval, Hz
    double s_sin = 0.0;
    double s_cos = 0.0;
    double phi = 0.0;       ///< detector output, (-pi, pi]
    double v_filter = 0.0;  ///< loop-filter output computed from phi
    bool saturated = false;
    bool degenerate = false;
};

using Trace = std::vector<TraceRecord>;

} // namespace tanlock
