"""Discrete Dirichlet domains: uniform intervals and masked 2D lattices.

A Grid owns the interior-node bookkeeping of a uniform lattice with zero
boundary values.  2D regions are staircase approximations: every stencil
neighbor outside the interior set reads as a boundary site with value 0.
Grids and fields are immutable after construction and safe to share.
"""
from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import DisconnectedDomainError, GridMismatchError


class Grid:
    """Interior nodes of a uniform lattice with Dirichlet closure.

    Parameters are normally supplied by :func:`build_interval` or
    :func:`build_masked_2d`; direct construction is possible for tests.

    Attributes:
        dimension: 1 or 2.
        extent: physical length per axis.
        n: lattice site count per axis (candidate interior sites).
        h: mesh width per axis, ``extent[k] / (n[k] + 1)``.
        mask: boolean (n[0], n[1]) array of interior sites (2D only).
        num_interior: number of interior nodes.
        sites: (num_interior, dimension) integer lattice coordinates.
        interior_index: lattice -> vector position map, -1 for exterior.
        weight: quadrature weight per interior node (product of mesh widths).
        neighbors: (num_interior, 2*dimension) vector positions of stencil
            neighbors, -1 where the neighbor is a boundary site.
    """

    def __init__(self, dimension, extent, n, mask=None):
        self.dimension = int(dimension)
        self.extent = tuple(float(e) for e in extent)
        self.n = tuple(int(k) for k in n)
        if self.dimension not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {dimension}")
        if any(e <= 0 for e in self.extent):
            raise ValueError(f"extent must be positive, got {self.extent}")
        if any(k < 3 for k in self.n):
            raise ValueError(f"need at least 3 lattice sites per axis, got {self.n}")
        self.h = tuple(e / (k + 1) for e, k in zip(self.extent, self.n))

        if self.dimension == 1:
            m = self.n[0]
            self.mask = None
            self.sites = np.arange(m, dtype=np.int64)[:, None]
            self.interior_index = np.arange(m, dtype=np.int64)
            left = np.arange(-1, m - 1, dtype=np.int64)
            right = np.arange(1, m + 1, dtype=np.int64)
            right[-1] = -1
            self.neighbors = np.stack([left, right], axis=1)
        else:
            mask = np.asarray(mask, dtype=bool)
            if mask.shape != self.n:
                raise ValueError(f"mask shape {mask.shape} != lattice shape {self.n}")
            if not mask.any():
                raise ValueError("mask has no interior sites")
            self.mask = mask
            self.mask.setflags(write=False)
            m = int(mask.sum())
            index = np.full(self.n, -1, dtype=np.int64)
            index[mask] = np.arange(m)
            self.interior_index = index
            self.interior_index.setflags(write=False)
            self.sites = np.argwhere(mask).astype(np.int64)
            cols = []
            for axis, shift in ((0, -1), (0, +1), (1, -1), (1, +1)):
                shifted = self.sites.copy()
                shifted[:, axis] += shift
                valid = (shifted[:, axis] >= 0) & (shifted[:, axis] < self.n[axis])
                nb = np.full(m, -1, dtype=np.int64)
                nb[valid] = index[shifted[valid, 0], shifted[valid, 1]]
                cols.append(nb)
            self.neighbors = np.stack(cols, axis=1)

        self.num_interior = self.sites.shape[0]
        self.cell_volume = float(np.prod(self.h))
        self.weight = np.full(self.num_interior, self.cell_volume)
        self.weight.setflags(write=False)
        self.sites.setflags(write=False)
        self.neighbors.setflags(write=False)

    @cached_property
    def laplacian(self) -> sp.csr_matrix:
        """Raw second-difference matrix of -Laplace with Dirichlet closure."""
        m = self.num_interior
        inv_h2 = [1.0 / hk**2 for hk in self.h]
        diag = np.full(m, 2.0 * sum(inv_h2))
        rows = [np.arange(m)]
        cols = [np.arange(m)]
        vals = [diag]
        for column in range(self.neighbors.shape[1]):
            axis = column // 2
            nb = self.neighbors[:, column]
            present = nb >= 0
            rows.append(np.nonzero(present)[0])
            cols.append(nb[present])
            vals.append(np.full(int(present.sum()), -inv_h2[axis]))
        mat = sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(m, m),
        )
        return mat.tocsr()

    @cached_property
    def boundary_adjacent(self) -> np.ndarray:
        """Interior nodes with at least one boundary stencil neighbor."""
        return (self.neighbors < 0).any(axis=1)

    def coords(self) -> np.ndarray:
        """Physical coordinates of the interior nodes, shape (m, dimension)."""
        return (self.sites + 1) * np.asarray(self.h)

    def content_hash(self) -> str:
        payload = hashlib.sha256()
        payload.update(np.int64(self.dimension).tobytes())
        payload.update(np.asarray(self.extent).tobytes())
        payload.update(np.asarray(self.n, dtype=np.int64).tobytes())
        if self.mask is not None:
            payload.update(np.packbits(self.mask).tobytes())
        return payload.hexdigest()[:12]

    def __repr__(self):
        shape = "x".join(str(k) for k in self.n)
        return f"Grid({self.dimension}d, {shape}, {self.num_interior} interior nodes)"


@dataclass(frozen=True, eq=False)
class ScalarField:
    """One real value per interior node of a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=float)
        if values.shape != (self.grid.num_interior,):
            raise ValueError(
                f"field length {values.shape} != interior node count "
                f"({self.grid.num_interior},)"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("field contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def norm(self) -> float:
        return float(np.sqrt(inner(self, self)))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def __len__(self):
        return self.values.size


def _check_same_grid(f: ScalarField, g: ScalarField):
    if f.grid is not g.grid:
        raise GridMismatchError("fields live on different grids")


def inner(f: ScalarField, g: ScalarField) -> float:
    """Quadrature pairing sum_i w_i f_i g_i."""
    _check_same_grid(f, g)
    return float(np.dot(f.grid.weight * f.values, g.values))


def min_normal_derivative(u: ScalarField) -> float:
    """Smallest one-sided boundary difference u(node)/h over boundary-adjacent nodes.

    A staircase stand-in for the minimal normal derivative on the physical
    boundary; diagnostic only, never used inside a solve.
    """
    grid = u.grid
    best = np.inf
    for column in range(grid.neighbors.shape[1]):
        axis = column // 2
        at_boundary = grid.neighbors[:, column] < 0
        if at_boundary.any():
            best = min(best, float(np.min(u.values[at_boundary]) / grid.h[axis]))
    return best


def _flood_fill_connected(mask: np.ndarray) -> bool:
    seeds = np.argwhere(mask)
    if seeds.size == 0:
        return False
    seen = np.zeros_like(mask, dtype=bool)
    queue = deque([tuple(seeds[0])])
    seen[tuple(seeds[0])] = True
    while queue:
        i, j = queue.popleft()
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            a, b = i + di, j + dj
            if 0 <= a < mask.shape[0] and 0 <= b < mask.shape[1]:
                if mask[a, b] and not seen[a, b]:
                    seen[a, b] = True
                    queue.append((a, b))
    return bool(seen.sum() == mask.sum())


def build_interval(length: float, n: int) -> Grid:
    """Uniform 1D interval grid with n interior nodes, h = length/(n+1)."""
    if length <= 0:
        raise ValueError(f"length must be positive, got {length}")
    if n < 3:
        raise ValueError(f"need at least 3 interior nodes, got {n}")
    return Grid(1, (length,), (n,))


def parse_bitmap(text: str) -> np.ndarray:
    """Parse a text bitmap: first line "rows cols", then rows of 0/1 characters.

    Returns the interior mask in (x, y) = (col, row) index order.
    """
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty bitmap")
    try:
        rows, cols = (int(tok) for tok in lines[0].split())
    except ValueError as exc:
        raise ValueError(f"bad bitmap header {lines[0]!r}") from exc
    if len(lines) - 1 != rows:
        raise ValueError(f"expected {rows} bitmap rows, got {len(lines) - 1}")
    grid_rows = []
    for ln in lines[1:]:
        if len(ln) != cols or set(ln) - {"0", "1"}:
            raise ValueError(f"bad bitmap row {ln!r}")
        grid_rows.append([c == "1" for c in ln])
    row_major = np.array(grid_rows, dtype=bool)  # (rows, cols)
    return row_major.T.copy()  # (cols, rows) = (x, y)


def build_masked_2d(
    shape: str,
    resolution: int = 64,
    *,
    width: float = 1.0,
    height: float = 1.0,
    radius: float = 0.5,
    bitmap: str | Path | None = None,
) -> Grid:
    """Build a 2D masked grid for a rectangle, a disk, or a text bitmap.

    For ``rectangle`` and ``disk`` the lattice has ``resolution`` candidate
    sites per axis.  ``bitmap`` reads the mask from text (or a path to it)
    and ignores ``resolution``; its lattice spans the unit square.  Interiors
    that are not 4-connected are rejected.
    """
    if shape == "rectangle":
        if resolution < 8:
            raise ValueError(f"resolution must be >= 8, got {resolution}")
        mask = np.ones((resolution, resolution), dtype=bool)
        grid = Grid(2, (width, height), (resolution, resolution), mask)
    elif shape == "disk":
        if resolution < 8:
            raise ValueError(f"resolution must be >= 8, got {resolution}")
        if radius <= 0:
            raise ValueError(f"radius must be positive, got {radius}")
        side = 2.0 * radius
        h = side / (resolution + 1)
        x = (np.arange(resolution) + 1) * h
        xx, yy = np.meshgrid(x, x, indexing="ij")
        mask = (xx - radius) ** 2 + (yy - radius) ** 2 < radius**2
        grid = Grid(2, (side, side), (resolution, resolution), mask)
    elif shape == "bitmap":
        if bitmap is None:
            raise ValueError("bitmap shape requires bitmap text or path")
        text = bitmap
        if isinstance(bitmap, Path) or (isinstance(bitmap, str) and "\n" not in bitmap):
            text = Path(bitmap).read_text()
        mask = parse_bitmap(text)
        grid = Grid(2, (1.0, 1.0), mask.shape, mask)
    else:
        raise ValueError(f"unknown shape {shape!r}")

    if not _flood_fill_connected(grid.mask):
        raise DisconnectedDomainError(f"{shape} mask produced a disconnected interior")
    return grid
