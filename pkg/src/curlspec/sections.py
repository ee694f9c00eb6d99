"""Planar cross-sections in the (r, z) half-plane and their grid discretisation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

_AREA_SUBSAMPLES = 16


class DegenerateSectionError(ValueError):
    """Raised when a cross-section has no interior grid nodes."""


@dataclass(frozen=True)
class Disk:
    """Disk of radius ``a`` centred at ``(R, 0)``."""

    R: float
    a: float

    def __post_init__(self):
        if not (self.a > 0 and self.R - self.a > 0):
            raise ValueError(f"disk needs 0 < a < R, got a={self.a}, R={self.R}")

    @property
    def r_min(self):
        return self.R - self.a

    @property
    def r_max(self):
        return self.R + self.a

    @property
    def anchor(self):
        return self.R, 0.0

    @property
    def box(self):
        return self.R - self.a, self.R + self.a, -self.a, self.a

    def inside(self, r, z, tol):
        return np.hypot(r - self.R, z) < self.a - tol

    def crossing(self, r, z, dr, dz):
        # smallest t in (0, 1] with |p + t d - c| = a, p inside
        px, pz = r - self.R, z
        dd = dr * dr + dz * dz
        b = px * dr + pz * dz
        c = px * px + pz * pz - self.a * self.a
        return (-b + np.sqrt(np.maximum(b * b - dd * c, 0.0))) / dd

    def cell_areas(self, r, z, h):
        d = np.hypot(r - self.R, z)
        full = d < self.a - h
        out = np.where(full, h * h, 0.0)
        # complement of the two exact classes, so rounding cannot drop a node
        near = ~full & (d <= self.a + h)
        if np.any(near):
            s = _AREA_SUBSAMPLES
            off = ((np.arange(s) + 0.5) / s - 0.5) * h
            rr = r[near][:, None, None] + off[None, :, None]
            zz = z[near][:, None, None] + off[None, None, :]
            frac = np.mean(np.hypot(rr - self.R, zz) < self.a, axis=(1, 2))
            out[near] = frac * h * h
        return out


@dataclass(frozen=True)
class Rectangle:
    """Rectangle ``[r_lo, r_hi] x [z_lo, z_hi]``."""

    r_lo: float
    r_hi: float
    z_lo: float
    z_hi: float

    def __post_init__(self):
        if not (0 < self.r_lo < self.r_hi and self.z_lo < self.z_hi):
            raise ValueError("rectangle needs 0 < r_lo < r_hi and z_lo < z_hi")

    @classmethod
    def centered(cls, r_lo, r_hi, height):
        return cls(r_lo, r_hi, -height / 2, height / 2)

    @property
    def r_min(self):
        return self.r_lo

    @property
    def r_max(self):
        return self.r_hi

    @property
    def anchor(self):
        return self.r_lo, self.z_lo

    @property
    def box(self):
        return self.r_lo, self.r_hi, self.z_lo, self.z_hi

    def inside(self, r, z, tol):
        return (
            (r > self.r_lo + tol)
            & (r < self.r_hi - tol)
            & (z > self.z_lo + tol)
            & (z < self.z_hi - tol)
        )

    def crossing(self, r, z, dr, dz):
        if dr > 0:
            return (self.r_hi - r) / dr
        if dr < 0:
            return (self.r_lo - r) / dr
        if dz > 0:
            return (self.z_hi - z) / dz
        return (self.z_lo - z) / dz

    def cell_areas(self, r, z, h):
        wr = np.clip(np.minimum(r + h / 2, self.r_hi) - np.maximum(r - h / 2, self.r_lo), 0, None)
        wz = np.clip(np.minimum(z + h / 2, self.z_hi) - np.maximum(z - h / 2, self.z_lo), 0, None)
        return wr * wz


@dataclass(frozen=True, eq=False)
class GridMask:
    """Occupancy mask on a uniform grid; ``occupied[j, i]`` is node (r0 + i h, z0 + j h).

    Occupied nodes are unknowns; every other node is a Dirichlet node, so the
    boundary is the staircase through the first unoccupied nodes.
    """

    r0: float
    z0: float
    h: float
    occupied: np.ndarray

    def __post_init__(self):
        occ = np.asarray(self.occupied, dtype=bool)
        object.__setattr__(self, "occupied", occ)
        for name in ("r0", "z0", "h"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if occ.ndim != 2:
            raise ValueError("mask must be two-dimensional")
        if not (self.h > 0):
            raise ValueError("mask spacing must be positive")
        if not occ.any():
            raise DegenerateSectionError("mask has no occupied nodes")
        if self.r_min <= 0:
            raise ValueError("mask reaches the symmetry axis r <= 0")

    @property
    def nr(self):
        return self.occupied.shape[1]

    @property
    def nz(self):
        return self.occupied.shape[0]

    @property
    def r_min(self):
        cols = np.nonzero(self.occupied.any(axis=0))[0]
        return self.r0 + (cols[0] - 1) * self.h

    @property
    def r_max(self):
        cols = np.nonzero(self.occupied.any(axis=0))[0]
        return self.r0 + (cols[-1] + 1) * self.h

    def contains(self, other: "GridMask") -> bool:
        """True when every occupied node of ``other`` is occupied here (same lattice)."""
        if not math.isclose(self.h, other.h):
            return False
        di = (other.r0 - self.r0) / self.h
        dj = (other.z0 - self.z0) / self.h
        if abs(di - round(di)) > 1e-9 or abs(dj - round(dj)) > 1e-9:
            return False
        jj, ii = np.nonzero(other.occupied)
        ii = ii + int(round(di))
        jj = jj + int(round(dj))
        ok = (ii >= 0) & (ii < self.nr) & (jj >= 0) & (jj < self.nz)
        if not ok.all():
            return False
        return bool(self.occupied[jj, ii].all())

    @classmethod
    def from_shape(cls, shape, h):
        grid = build_grid(shape, h)
        return cls(grid.r[0], grid.z[0], h, grid.interior.copy())

    @classmethod
    def read(cls, path):
        return cls.parse(Path(path).read_text())

    @classmethod
    def parse(cls, text: str):
        lines = [ln.strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        if not lines:
            raise ValueError("empty mask file")
        head = lines[0].replace(",", " ").split()
        if len(head) != 5:
            raise ValueError("mask header must be: r0 z0 grid_h nr nz")
        r0, z0, h = (float(v) for v in head[:3])
        nr, nz = int(head[3]), int(head[4])
        rows = lines[1:]
        if len(rows) != nz:
            raise ValueError(f"mask header announces {nz} rows, found {len(rows)}")
        occ = np.zeros((nz, nr), dtype=bool)
        for j, row in enumerate(rows):
            cells = row.replace(",", " ").split()
            if len(cells) == 1 and len(cells[0]) == nr:
                cells = list(cells[0])
            if len(cells) != nr or any(c not in "01" for c in cells):
                raise ValueError(f"mask row {j} must hold {nr} entries of 0/1")
            occ[j] = [c == "1" for c in cells]
        return cls(r0, z0, h, occ)

    def dumps(self) -> str:
        out = [f"{self.r0!r} {self.z0!r} {self.h!r} {self.nr} {self.nz}"]
        out += [" ".join("1" if v else "0" for v in row) for row in self.occupied]
        return "\n".join(out) + "\n"


CrossSection = Disk | Rectangle | GridMask


@dataclass
class Grid:
    """Uniform node lattice with interior nodes and cut-edge data.

    ``edges`` lists interior-interior links as index pairs; ``bnd`` lists
    links from an interior node to the boundary as (index, theta, r_b) where
    ``theta * h`` is the distance to the boundary point at radius ``r_b``.
    """

    h: float
    r: np.ndarray
    z: np.ndarray
    interior: np.ndarray
    index: np.ndarray
    edges: np.ndarray
    bnd_node: np.ndarray
    bnd_theta: np.ndarray
    bnd_r: np.ndarray

    @property
    def n(self):
        return int(self.interior.sum())

    def node_r(self):
        rr = np.broadcast_to(self.r[None, :], self.interior.shape)
        return rr[self.interior]

    def node_z(self):
        zz = np.broadcast_to(self.z[:, None], self.interior.shape)
        return zz[self.interior]

    def scatter(self, values):
        out = np.zeros(self.interior.shape)
        out[self.interior] = values
        return out


_DIRECTIONS = ((1, 0), (-1, 0), (0, 1), (0, -1))


def _lattice(lo, hi, anchor, h):
    i0 = math.floor((lo - anchor) / h + 1e-9) - 1
    i1 = math.ceil((hi - anchor) / h - 1e-9) + 1
    return anchor + h * np.arange(i0, i1 + 1)


def build_grid(section, h=None) -> Grid:
    if isinstance(section, GridMask):
        if h is not None and not math.isclose(h, section.h, rel_tol=1e-12):
            raise ValueError(f"grid mask has native spacing {section.h}, got grid_h={h}")
        h = section.h
        pad = np.zeros((section.nz + 2, section.nr + 2), dtype=bool)
        pad[1:-1, 1:-1] = section.occupied
        r = section.r0 + h * np.arange(-1, section.nr + 1)
        z = section.z0 + h * np.arange(-1, section.nz + 1)
        interior = pad
        shape = None
    else:
        if h is None or not (h > 0):
            raise ValueError("grid_h must be a positive length")
        r_lo, r_hi, z_lo, z_hi = section.box
        ar, az = section.anchor
        r = _lattice(r_lo, r_hi, ar, h)
        z = _lattice(z_lo, z_hi, az, h)
        rr, zz = np.meshgrid(r, z)
        interior = section.inside(rr, zz, 1e-9 * h)
        shape = section

    n = int(interior.sum())
    if n == 0:
        raise DegenerateSectionError("cross-section has no interior grid nodes at this spacing")
    index = -np.ones(interior.shape, dtype=np.int64)
    index[interior] = np.arange(n)
    jj, ii = np.nonzero(interior)
    nz_, nr_ = interior.shape

    edges = []
    bnode, btheta, br = [], [], []
    for di, dj in _DIRECTIONS:
        ni, nj = ii + di, jj + dj
        valid = (ni >= 0) & (ni < nr_) & (nj >= 0) & (nj < nz_)
        nb_in = np.zeros_like(valid)
        nb_in[valid] = interior[nj[valid], ni[valid]]
        if (di, dj) in ((1, 0), (0, 1)):
            src = index[jj[nb_in], ii[nb_in]]
            dst = index[nj[nb_in], ni[nb_in]]
            edges.append(np.stack([src, dst], axis=1))
        out = ~nb_in
        if not np.any(out):
            continue
        rp = r[ii[out]]
        zp = z[jj[out]]
        if shape is None:
            theta = np.ones(rp.shape)
        else:
            theta = shape.crossing(rp, zp, di * h, dj * h)
            theta = np.clip(theta, 1e-8, 1.0)
        bnode.append(index[jj[out], ii[out]])
        btheta.append(theta)
        br.append(rp + di * theta * h)

    return Grid(
        h=h,
        r=r,
        z=z,
        interior=interior,
        index=index,
        edges=np.concatenate(edges) if edges else np.zeros((0, 2), dtype=np.int64),
        bnd_node=np.concatenate(bnode),
        bnd_theta=np.concatenate(btheta),
        bnd_r=np.concatenate(br),
    )


def node_areas(section, grid: Grid):
    """Area of each node's dual cell inside the section.

    Returns (areas of interior nodes, areas of non-interior nodes).
    """
    rr, zz = np.meshgrid(grid.r, grid.z)
    if isinstance(section, GridMask):
        areas = np.where(grid.interior, grid.h**2, 0.0)
    else:
        areas = section.cell_areas(rr, zz, grid.h)
    return areas[grid.interior], areas[~grid.interior], rr[~grid.interior]
