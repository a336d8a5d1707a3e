#pragma once

#include <filesystem>
#include <iosfwd>

#include "hodgedec/simplicial_complex.hpp"

namespace hodgedec {

enum class MeshFormat { off, obj };

/// Reads a triangle mesh. Faces with more than three vertices are
/// rejected, never fanned.
SimplicialComplex load_mesh(std::istream& in, MeshFormat format);

/// Reads a mesh file, picking the format from the extension (.off/.obj).
SimplicialComplex load_mesh(const std::filesystem::path& path);

/// Writes a surface complex as OFF, windings following the stored
/// orientations.
void write_off(std::ostream& out, const SimplicialComplex& K);

}  // namespace hodgedec
