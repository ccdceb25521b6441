#pragma once

#include "spectune/image.hpp"
#include "spectune/tomo.hpp"

#include <map>
#include <string>
#include <vector>

namespace spectune {

// Binary volume container: magic "SPVOL1", X,Y,Z as unsigned 32-bit
// little-endian, then X*Y*Z float32 little-endian values, x fastest, slice
// major. X maps to columns, Y to rows, Z to slices.
void write_volume(const std::string& path, const Volume& volume);
Volume read_volume(const std::string& path);

// Sinogram stacks reuse the container with X = offsets, Y = angles,
// Z = slices. Geometry is canonical (unit-pitch centered offsets, equispaced
// angles over [0, pi)), so the reader rebuilds it from the dimensions alone.
void write_sinograms(const std::string& path, const std::vector<Sinogram>& sinos);
std::vector<Sinogram> read_sinograms(const std::string& path);

// Binary 8-bit PGM (P5), one slice, min-max scaled; a constant slice maps to
// all zeros.
void write_pgm(const std::string& path, const GrayImage& slice);

// Plain key=value lines; blank lines and #-comments ignored, later keys win.
std::map<std::string, std::string> read_config(const std::string& path);
void write_config(const std::string& path,
                  const std::map<std::string, std::string>& entries);

} // namespace spectune
