#pragma once

// SVG rendering of two-dimensional run records.

#include <filesystem>

namespace rollkit {

// Reads <dir>/run.json and its CSV sidecars and writes an SVG of the body, the
// rolling ball, contact points and trajectories. Throws kInvalidInput for m != 2.
void write_plot(const std::filesystem::path& run_record, const std::filesystem::path& svg_out);

}  // namespace rollkit
