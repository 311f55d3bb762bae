"""Node placement sampling and distance moments.

Two placement layouts are available:

``"uniform"``
    All ``n`` nodes i.i.d. uniform on ``[-a, a]^2``; ``n1`` of them are then
    elected as fog nodes uniformly at random.
``"fog_range"``
    Fog nodes are uniform on the square and every end device is uniform in
    the disk of radius ``pi * R / n1`` (the fog range) around one fog node,
    with devices dealt to fog nodes round-robin. This is the geometry the
    closed-form objectives assume, so the simulated optimum lines up with
    the analytic one.

In both layouts each device is served by its nearest fog node.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .model import SUPPORTED_ALPHAS, NetworkConfig

PRNG_NAME = "numpy.random.PCG64 via SeedSequence(entropy=seed, spawn_key=keys)"
LAYOUTS = ("uniform", "fog_range")

# E[|z|^alpha] / a^alpha for z uniform on [-a, a]^2.  alpha=4 is exact
# (2/5 + 2/9); alpha=1 keeps the rounded 0.765 used by the objective.
_CENTER_MOMENT = {1: 0.765, 2: 2.0 / 3.0, 4: 56.0 / 90.0}


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """Return a PCG64 generator for ``seed`` and an optional sub-stream key.

    ``make_rng(seed, trial)`` and ``make_rng(seed, trial, redraw)`` give
    statistically independent streams for every distinct key tuple.
    """
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass
class Placement:
    """Sampled node coordinates with the fog election and device assignment."""

    coords: np.ndarray
    fog_indices: np.ndarray
    assignment: dict[int, int]
    seed: int
    a: float
    layout: str = "uniform"
    prng: str = PRNG_NAME
    _device_indices: np.ndarray = field(init=False, repr=False, compare=False)
    _assigned_fog: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float)
        self.fog_indices = np.asarray(sorted(int(i) for i in self.fog_indices), dtype=np.int64)
        devices = sorted(self.assignment)
        self._device_indices = np.asarray(devices, dtype=np.int64)
        self._assigned_fog = np.asarray([self.assignment[d] for d in devices], dtype=np.int64)

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def device_indices(self) -> np.ndarray:
        return self._device_indices

    @property
    def assigned_fog(self) -> np.ndarray:
        """Fog index serving each entry of :attr:`device_indices`."""
        return self._assigned_fog

    @property
    def assigned_slot(self) -> np.ndarray:
        """Position in :attr:`fog_indices` of each device's fog node."""
        return np.searchsorted(self.fog_indices, self._assigned_fog)

    def device_fog_distances(self) -> np.ndarray:
        d = self.coords[self._device_indices] - self.coords[self._assigned_fog]
        return np.hypot(d[:, 0], d[:, 1])

    def fog_cloud_distances(self) -> np.ndarray:
        f = self.coords[self.fog_indices]
        return np.hypot(f[:, 0], f[:, 1])

    def to_json(self) -> str:
        return json.dumps(
            {
                "seed": self.seed,
                "a": self.a,
                "layout": self.layout,
                "prng": self.prng,
                "coords": self.coords.tolist(),
                "fog_indices": self.fog_indices.tolist(),
                "assignment": {str(d): int(f) for d, f in sorted(self.assignment.items())},
            },
            indent=1,
        )

    @classmethod
    def from_json(cls, text: str) -> "Placement":
        doc = json.loads(text)
        return cls(
            coords=np.asarray(doc["coords"], dtype=float).reshape(-1, 2),
            fog_indices=doc["fog_indices"],
            assignment={int(d): int(f) for d, f in doc["assignment"].items()},
            seed=doc["seed"],
            a=doc["a"],
            layout=doc.get("layout", "uniform"),
            prng=doc.get("prng", PRNG_NAME),
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "x_km", "y_km", "role", "assigned_fog"])
        fogs = set(self.fog_indices.tolist())
        for i, (x, y) in enumerate(self.coords):
            if i in fogs:
                w.writerow([i, f"{x:.17g}", f"{y:.17g}", "fog", ""])
            else:
                w.writerow([i, f"{x:.17g}", f"{y:.17g}", "device", self.assignment[i]])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, seed: int, a: float, layout: str = "uniform") -> "Placement":
        rows = list(csv.DictReader(io.StringIO(text)))
        rows.sort(key=lambda r: int(r["index"]))
        coords = np.array([[float(r["x_km"]), float(r["y_km"])] for r in rows])
        fogs = [int(r["index"]) for r in rows if r["role"] == "fog"]
        assignment = {int(r["index"]): int(r["assigned_fog"]) for r in rows if r["role"] == "device"}
        return cls(coords=coords, fog_indices=fogs, assignment=assignment, seed=seed, a=a, layout=layout)


def nearest_assignment(coords: np.ndarray, fog_indices: np.ndarray) -> dict[int, int]:
    """Map every non-fog index to its nearest fog node (lowest index on ties)."""
    coords = np.asarray(coords, dtype=float)
    fog_indices = np.sort(np.asarray(fog_indices, dtype=np.int64))
    is_fog = np.zeros(len(coords), dtype=bool)
    is_fog[fog_indices] = True
    devices = np.flatnonzero(~is_fog)
    diff = coords[devices, None, :] - coords[None, fog_indices, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    # argmin returns the first minimum; fog_indices is ascending
    nearest = fog_indices[np.argmin(dist, axis=1)]
    return dict(zip(devices.tolist(), nearest.tolist()))


def _uniform_in_disks(rng, centers, radius, a):
    """Uniform points in disks of ``radius`` around ``centers``, clipped to the square by rejection."""
    out = np.empty_like(centers)
    todo = np.arange(len(centers))
    while todo.size:
        rho = radius * np.sqrt(rng.uniform(size=todo.size))
        theta = rng.uniform(0.0, 2.0 * np.pi, size=todo.size)
        pts = centers[todo] + np.column_stack((rho * np.cos(theta), rho * np.sin(theta)))
        ok = np.all(np.abs(pts) <= a, axis=1)
        out[todo[ok]] = pts[ok]
        todo = todo[~ok]
    return out


def sample_placement_rng(cfg: NetworkConfig, n1: int, rng: np.random.Generator, layout: str = "uniform"):
    """Draw ``(coords, fog_indices)`` from an existing generator."""
    n, a = cfg.total_nodes_n, cfg.half_side_a
    if not 1 <= n1 <= n - 1:
        raise ValueError(f"n1 must lie in [1, {n - 1}], got {n1}")
    if layout == "uniform":
        coords = rng.uniform(-a, a, size=(n, 2))
        fog_indices = np.sort(rng.choice(n, size=n1, replace=False))
    elif layout == "fog_range":
        fog_indices = np.sort(rng.choice(n, size=n1, replace=False))
        is_fog = np.zeros(n, dtype=bool)
        is_fog[fog_indices] = True
        devices = np.flatnonzero(~is_fog)
        coords = np.empty((n, 2))
        coords[fog_indices] = rng.uniform(-a, a, size=(n1, 2))
        owner = fog_indices[np.arange(devices.size) % n1]
        coords[devices] = _uniform_in_disks(rng, coords[owner], fog_range(cfg.fog_radius_R, n1), a)
    else:
        raise ValueError(f"unknown layout {layout!r}; expected one of {LAYOUTS}")
    return coords, fog_indices


def sample_placement(cfg: NetworkConfig, n1: int, seed: int, layout: str = "uniform") -> Placement:
    """Sample ``n`` nodes, elect exactly ``n1`` fog nodes and assign devices.

    Identical ``(cfg, n1, seed, layout)`` yields bit-identical output.
    """
    coords, fog_indices = sample_placement_rng(cfg, n1, make_rng(seed), layout)
    return Placement(
        coords=coords,
        fog_indices=fog_indices,
        assignment=nearest_assignment(coords, fog_indices),
        seed=seed,
        a=cfg.half_side_a,
        layout=layout,
    )


def center_distance_moment(alpha: int, a: float) -> float:
    """Mean of ``|z|^alpha`` for a point uniform on ``[-a, a]^2``, i.e. E[y^alpha] to the cloud."""
    if alpha not in _CENTER_MOMENT:
        raise ValueError(f"unsupported alpha {alpha!r}; expected one of {SUPPORTED_ALPHAS}")
    if not a > 0:
        raise ValueError(f"a must be > 0, got {a}")
    return _CENTER_MOMENT[alpha] * a**alpha


def fog_range(R: float, n1: float) -> float:
    """Coverage radius of each fog node when ``n1`` fog nodes share a mesh of radius ``R``."""
    if not R > 0 or not n1 > 0:
        raise ValueError(f"R and n1 must be > 0, got R={R}, n1={n1}")
    return math.pi * R / n1


def bpp_distance_moment(order: int, r: float, i: int, N_per_fog: float) -> float:
    """Moment of the ``i``-th nearest of ``N`` uniform points in a disk of radius ``r``.

    ``order`` 1 and 4 use the closed forms ``r sqrt(i/(N+1))`` and
    ``r^4 i^2 / (N+1)^2``; ``order`` 2 is exact, ``r^2 i / (N+1)``.
    """
    if not r > 0 or i < 1 or not N_per_fog > 0:
        raise ValueError(f"need r > 0, i >= 1, N > 0; got r={r}, i={i}, N={N_per_fog}")
    m = i / (N_per_fog + 1.0)
    if order == 1:
        return r * math.sqrt(m)
    if order == 2:
        return r**2 * m
    if order == 4:
        return r**4 * m**2
    raise ValueError(f"unsupported order {order!r}; expected one of {SUPPORTED_ALPHAS}")


def empirical_moment(alpha: int, a: float, samples: int, seed: int) -> float:
    """Monte Carlo estimate of :func:`center_distance_moment`."""
    if alpha not in SUPPORTED_ALPHAS:
        raise ValueError(f"unsupported alpha {alpha!r}")
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    rng = make_rng(seed)
    z = rng.uniform(-a, a, size=(samples, 2))
    r2 = z[:, 0] ** 2 + z[:, 1] ** 2
    return float(np.mean(r2 ** (alpha / 2.0)))
