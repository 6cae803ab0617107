#pragma once

#include <string>
#include <vector>

#include "mmpos/geometry.hpp"
#include "mmpos/signal.hpp"

namespace mmpos {

// Binary phasor tensor: 32-byte header (8-byte magic "MMPOSSIG", three
// little-endian uint64 dims path/rx/freq) followed by complex64 entries in
// [path][rx][freq] order, little-endian.
void write_signal_dump(const std::string& path, const DemodulatedSignal& sig);
DemodulatedSignal read_signal_dump(const std::string& path);

// Point cloud text: one "x y z value" line per point.
void write_point_cloud(const std::string& path, const std::vector<Vec3>& pts,
                       const std::vector<double>& values);
void write_point_cloud(const std::string& path, const std::vector<Vec3>& pts, double value = 1.0);

}  // namespace mmpos
