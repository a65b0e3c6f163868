//! Singly periodic genus-two Scherk saddle towers.
//!
//! The pipeline runs from the explicit Weierstrass data on the curve
//! w² = ((b+z)/(b−z))·((x−z)/(x+z))·((y+z)/(y−z)) to a solved parameter set,
//! a mesh of the fundamental piece, the assembled periodic surface, and a set
//! of numerical checks of its symmetry and embeddedness.
//!
//! * [`weier`]: parameters, the curve, g, dh and the immersion forms.
//! * [`quad`]: double-exponential quadrature and circle contours.
//! * [`periods`]: residues, the period integrals and the family solver.
//! * [`mesh`]: piece integration, assembly by reflections, OBJ/PLY export.
//! * [`verify`]: symmetry, injectivity, degree, embeddedness, geodesic checks.

pub mod quad;
pub mod weier;
pub mod periods;
pub mod mesh;
pub mod verify;
