#pragma once

#include <string>

#include "hodgedec/simplicial_complex.hpp"

namespace fixtures {

hodgedec::SimplicialComplex single_triangle();
hodgedec::SimplicialComplex tetrahedron_surface();
hodgedec::SimplicialComplex icosahedron();

// Polar disk: a center vertex plus `rings` concentric circles of k
// vertices; the outermost circle is the boundary.
hodgedec::SimplicialComplex disk(int k = 12, int rings = 3);

// Annulus with `rings` concentric circles of k vertices between radius 1
// and 2; the innermost and outermost circles are boundary.
hodgedec::SimplicialComplex annulus(int k = 12, int rings = 4);

// Five-vertex Mobius band; non-orientable with a single boundary loop.
hodgedec::SimplicialComplex mobius_band();

// One solid 3-simplex; exercises the dimension-independent paths.
hodgedec::SimplicialComplex solid_tetrahedron();

std::string tetrahedron_obj_text();
std::string icosahedron_off_text();

}  // namespace fixtures
