"""Python interface to the bornscat C++ core (k = 1 units throughout)."""

from ._core import (
    DimensionError,
    DomainError,
    Error,
    ParseError,
    Shape,
    VoxelGrid,
    amplification,
    analytic_bounds,
    circumscribed_radius,
    cross_sections,
    f_TE,
    f_TM,
    find_roots,
    inscribed_radius,
    load_config,
    lommel_integral,
    mie_internal_field,
    plane_wave,
    read_mask,
    selftest,
    semigroup,
    solvable_region,
    solve,
    spherical_h2,
    spherical_j,
    volume,
    voxelize,
    write_mask,
)

__all__ = [name for name in dir() if not name.startswith("_")]
