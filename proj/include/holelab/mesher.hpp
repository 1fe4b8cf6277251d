#pragma once

#include "holelab/geometry.hpp"
#include "holelab/mesh.hpp"
#include "holelab/perforated_domain.hpp"

namespace holelab {

/// Number of rings per doubling of the ring scale for a curve of unit
/// perimeter `perimeter` resolved by n points: ring scales grow by
/// q = 2^(1/m) so that radial and tangential sizes match.
int rings_per_octave(double perimeter, int n);

/// Mesh of Omega \ eps*closure(T) built from nested rings around the hole.
/// The hole boundary has exactly n_hole segments. Ring scales lie on the
/// lattice eps*size*2^(j/m), so meshes for dyadic eps share their far field
/// and differ by m*n_hole vertices per halving of eps.
TriMesh mesh_single_hole(const DomainSpec& spec, double h_far, int n_hole);

/// Same ring construction with the hole replaced by a filled core disk of
/// radius `core` resolved by n_core points. The origin is a mesh vertex.
TriMesh mesh_without_hole(const DomainSpec& spec, double h_far, int n_core = 32, double core = 0.25);

/// Annulus B(center, R) \ (center + s*closure(T)); tags outer and hole(0).
TriMesh mesh_annulus(const Point& center, double R, const HoleShape& hole, double s, int n_hole);

/// Two-level conforming mesh of the whole unit square with every hole and
/// ball boundary resolved by n_hole segments. Cell boundaries carry n_hole
/// segments each and must not be coarser than h_far.
TriMesh mesh_perforated(const PerforatedDomain& pd, int n_hole, double h_far);

/// Structured mesh of [x0,x1] x [y0,y1] with nx x ny cells, each split into
/// four triangles through its center. Boundary tagged outer.
TriMesh mesh_rectangle(double x0, double y0, double x1, double y1, int nx, int ny);

}  // namespace holelab
