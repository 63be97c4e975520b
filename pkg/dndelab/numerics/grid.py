# Copyright IBM Inc. All Rights Reserved.
# SPDX-License-Identifier: Apache-2.0

"""Uniform radial finite-volume mesh on [0, r_max] and the discrete operators built on it

Cells are spherical shells; for n = 1 a cell stands for the two symmetric intervals of the line, so volumes and
face areas carry |S^0| = 2. Face values are arrays of length cells + 1, cell values arrays of length cells.
"""

from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np
import pydantic
from pydantic import ConfigDict

import dndelab.models.constants
import dndelab.models.errors
import dndelab.numerics.special

logger = logging.getLogger(__name__)


class RadialGrid(pydantic.BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", arbitrary_types_allowed=True)

    n: int
    r_max: float
    cells: int
    dr: float
    faces: np.ndarray
    centers: np.ndarray
    volumes: np.ndarray
    face_areas: np.ndarray

    def check_cells(self, values: np.ndarray, what: str = "cell values") -> np.ndarray:
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1 or arr.shape[0] != self.cells:
            raise dndelab.models.errors.LengthMismatchError(self.cells, int(arr.size), what)
        return arr

    def check_faces(self, values: np.ndarray, what: str = "face values") -> np.ndarray:
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1 or arr.shape[0] != self.cells + 1:
            raise dndelab.models.errors.LengthMismatchError(self.cells + 1, int(arr.size), what)
        return arr

    def same_as(self, other: RadialGrid) -> bool:
        return (self.n == other.n and self.cells == other.cells
                and math.isclose(self.r_max, other.r_max, rel_tol=1e-15, abs_tol=0.0))


def build(n: int, r_max: float, m: int) -> RadialGrid:
    """Builds the mesh with m uniform shells

    Raises:
        dndelab.models.errors.BadMeshError: if r_max <= 0 or m is below the minimum number of cells
    """
    if not (math.isfinite(r_max) and r_max > 0.0):
        raise dndelab.models.errors.BadMeshError(f"r_max must be positive and finite, got {r_max}")
    if isinstance(m, bool) or int(m) != m or m < dndelab.models.constants.MIN_CELLS:
        raise dndelab.models.errors.BadMeshError(
            f"need an integer number of cells >= {dndelab.models.constants.MIN_CELLS}, got {m}")
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise dndelab.models.errors.BadMeshError(f"the dimension must be an integer >= 1, got {n}")
    m = int(m)
    n = int(n)

    area = dndelab.numerics.special.sphere_area(n)
    faces = np.linspace(0.0, r_max, m + 1)
    centers = 0.5 * (faces[1:] + faces[:-1])
    powers = faces ** n
    volumes = area * (powers[1:] - powers[:-1]) / n
    face_areas = area * faces ** (n - 1)

    return RadialGrid(n=n, r_max=float(r_max), cells=m, dr=float(r_max) / m, faces=faces, centers=centers,
                      volumes=volumes, face_areas=face_areas)


def integrate(grid: RadialGrid, f: np.ndarray, tail: bool = False) -> float:
    """Sum of f_i V_i, the midpoint approximation of the integral of a radial function over the ball of radius r_max

    With tail=True a power-law closure f ~ r^(-alpha) estimated from the last two cells adds the integral beyond
    r_max, provided the decay is integrable (alpha > n).
    """
    values = grid.check_cells(f)
    total = float(np.dot(values, grid.volumes))

    if tail:
        total += _tail_closure(grid, values)
    return total


def decay_exponent(grid: RadialGrid, values: np.ndarray) -> Optional[float]:
    """alpha in f ~ r^(-alpha) fitted through the last two cell centres, None unless f is positive and decreasing
    there"""
    f_inner, f_outer = values[-2], values[-1]
    if not (f_inner > 0.0 and f_outer > 0.0 and f_outer < f_inner):
        return None

    r_inner, r_outer = grid.centers[-2], grid.centers[-1]
    return -math.log(f_outer / f_inner) / math.log(r_outer / r_inner)


def _tail_closure(grid: RadialGrid, values: np.ndarray) -> float:
    alpha = decay_exponent(grid, values)
    if alpha is None:
        return 0.0

    r_outer, f_outer = grid.centers[-1], values[-1]
    if alpha <= grid.n + 0.5:
        logger.debug(f"Decay exponent {alpha} too slow for a tail closure in dimension {grid.n}")
        return 0.0

    f_edge = f_outer * (grid.r_max / r_outer) ** (-alpha)
    area = dndelab.numerics.special.sphere_area(grid.n)
    return area * f_edge * grid.r_max ** grid.n / (alpha - grid.n)


def face_gradient(grid: RadialGrid, f: np.ndarray) -> np.ndarray:
    """(f_{i+1} - f_i)/dr on interior faces, zero on the origin face (symmetry) and the outer face (no flux)"""
    values = grid.check_cells(f)
    ret = np.zeros(grid.cells + 1)
    ret[1:-1] = np.diff(values) / grid.dr
    return ret


def center_gradient(grid: RadialGrid, f: np.ndarray) -> np.ndarray:
    return center_average(face_gradient(grid, f))


def whole_space_gradient(grid: RadialGrid, f: np.ndarray) -> np.ndarray:
    """df/dr at the cell centres of a function sampled from the whole space

    Central differences inside, the even reflection at the origin and a second order one-sided difference in the
    outermost cell. Unlike center_gradient nothing assumes a zero-flux outer face, so the last two values still
    carry the decay of the sampled function for the tail closure.
    """
    values = grid.check_cells(f)
    ret = center_average(face_gradient(grid, values))
    if grid.cells >= 3:
        ret[-1] = (3.0 * values[-1] - 4.0 * values[-2] + values[-3]) / (2.0 * grid.dr)
    return ret


def center_average(g: np.ndarray) -> np.ndarray:
    """Arithmetic mean of the two face values of each cell

    The outermost cell takes its inner face value because the zero-flux face is a boundary condition of the
    evolution and not a property of fields sampled from functions defined on the whole space.
    """
    ret = 0.5 * (g[1:] + g[:-1])
    if ret.shape[0] > 1:
        ret[-1] = g[-2]
    return ret


def second_derivative(grid: RadialGrid, f: np.ndarray) -> np.ndarray:
    """(g_{i+1/2} - g_{i-1/2})/dr, meaningful on interior cells only"""
    g = face_gradient(grid, f)
    return np.diff(g) / grid.dr


def divergence(grid: RadialGrid, flux: np.ndarray) -> np.ndarray:
    """Conservative divergence (A_{i+1/2} F_{i+1/2} - A_{i-1/2} F_{i-1/2}) / V_i of a face field"""
    flux = grid.check_faces(flux, "fluxes")
    through = grid.face_areas * flux
    return np.diff(through) / grid.volumes


def regularized_flux(g: np.ndarray, p: float, eps: float) -> np.ndarray:
    """phi(g) = (g^2 + eps^2)^((p-2)/2) g, exactly g when p = 2 and zero where g = 0"""
    g = np.asarray(g, dtype=float)
    if p == 2.0:
        return g.copy()

    magnitude = g * g + eps * eps
    with np.errstate(divide="ignore", invalid="ignore"):
        coefficient = np.where(magnitude > 0.0, magnitude ** (0.5 * (p - 2.0)), 0.0)
    return coefficient * g


def p_laplacian(grid: RadialGrid, v: np.ndarray, p: float, eps: float = 0.0) -> np.ndarray:
    """Finite-volume p-Laplacian div(|grad v|^(p-2) grad v) with zero flux at both ends of the mesh"""
    return divergence(grid, regularized_flux(face_gradient(grid, v), p, eps))
