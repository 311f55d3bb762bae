"""Seeded Monte Carlo evaluation of SINR, data rate and transmission delay.

Two rate definitions are provided.

``"round"`` (default)
    All links share one channel of bandwidth ``W``. In one round every end
    device uploads an ``M``-bit packet to its fog node, and every fog node
    uploads one aggregated, partially processed ``(M - K)``-bit packet to the
    cloud. The data rate seen by each device is ``M`` divided by the round's
    airtime (plus ``fixed_delays``). At low SNR the airtime is proportional
    to the sum of ``x^alpha`` over devices plus ``y^alpha`` over fog nodes,
    which is the quantity the closed-form optimum minimizes.
``"two_hop"``
    Per-device ``M / trans_delay`` with
    ``trans_delay = M / R_fog + (M - K) / R_cloud + fixed_delays``, averaged
    over devices. Nothing is charged for adding a fog node here, so this rate
    grows monotonically with ``n1``.

The SNR axis fixes ``P / sigma^2`` for both device and fog transmitters, with
distances in km (unit reference distance 1 km).
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import LAYOUTS, PRNG_NAME, Placement, make_rng, nearest_assignment, sample_placement_rng
from .model import NetworkConfig
from .optimizer import analytic_p

RATE_DEFINITIONS = {
    "round": "M / (sum_devices M/R_fog + sum_fogs (M-K)/R_cloud + fixed_delays), shared channel",
    "two_hop": "mean over devices of M / (M/R_fog + (M-K)/R_cloud + fixed_delays)",
}
FADING_MODES = (None, "nakagami")
NAKAGAMI_M = 2.0
MAX_REDRAWS = 100

# stream tags for make_rng(seed, tag, trial, redraw)
_ARM_OPT, _ARM_UNOPT, _ARM_N1 = 0, 1, 2


class SingularityError(ValueError):
    """A link has zero length (device on its fog node, or fog node on the cloud)."""


class SimulationError(RuntimeError):
    """A trial could not produce a valid placement."""


@dataclass
class LinkBudget:
    """Per-link SINR and rates for one placement.

    Device arrays follow ``placement.device_indices``; fog arrays follow
    ``placement.fog_indices``. ``trans_delay`` is per device.
    """

    sinr_fog: np.ndarray
    sinr_cloud: np.ndarray
    rate_fog: np.ndarray
    rate_cloud: np.ndarray
    trans_delay: np.ndarray
    assigned_slot: np.ndarray = field(repr=False)


def snr_config(cfg: NetworkConfig, snr_db: float) -> NetworkConfig:
    """Copy of ``cfg`` with both transmit powers set to ``sigma^2 * 10^(snr_db/10)``."""
    power = cfg.noise_var_sigma2 * 10.0 ** (snr_db / 10.0)
    return cfg.replace(tx_power_device_P=power, tx_power_fog_P=power)


def _budget(x, y, slot, cfg, h_fog, h_cloud):
    alpha = cfg.alpha
    sinr_fog = cfg.tx_power_device_P * h_fog * x ** (-alpha) / (cfg.noise_var_sigma2 + cfg.interference_fog_I)
    sinr_cloud = cfg.tx_power_fog_P * h_cloud * y ** (-alpha) / (cfg.noise_var_sigma2 + cfg.interference_cloud_I)
    rate_fog = cfg.bandwidth_W * np.log2(1.0 + sinr_fog)
    rate_cloud = cfg.bandwidth_W * np.log2(1.0 + sinr_cloud)
    M, K = cfg.packet_bits_M, cfg.processed_bits_K
    with np.errstate(divide="ignore"):
        delay = M / rate_fog + (M - K) / rate_cloud[slot] + cfg.fixed_delays
    return LinkBudget(sinr_fog, sinr_cloud, rate_fog, rate_cloud, delay, slot)


def link_budget(placement: Placement, cfg: NetworkConfig, channel_draws=None) -> LinkBudget:
    """Evaluate SINR, Shannon rates and two-hop delay for every link.

    Parameters
    ----------
    channel_draws : tuple of arrays, optional
        ``(h_fog, h_cloud)`` power gains, one per device link and one per
        fog-to-cloud link. Unit gains when omitted.

    Raises
    ------
    SingularityError
        If a device sits on its fog node or a fog node sits on the cloud.
    """
    x = placement.device_fog_distances()
    y = placement.fog_cloud_distances()
    if channel_draws is None:
        h_fog, h_cloud = np.ones_like(x), np.ones_like(y)
    else:
        h_fog, h_cloud = (np.asarray(h, dtype=float) for h in channel_draws)
        if h_fog.shape != x.shape or h_cloud.shape != y.shape:
            raise ValueError("channel_draws must hold one gain per device link and one per fog link")
        if np.any(h_fog <= 0) or np.any(h_cloud <= 0):
            raise ValueError("channel gains must be > 0")
    if np.any(x == 0):
        d = int(placement.device_indices[np.flatnonzero(x == 0)[0]])
        raise SingularityError(f"device {d} is colocated with fog node {placement.assignment[d]}")
    if np.any(y == 0):
        f = int(placement.fog_indices[np.flatnonzero(y == 0)[0]])
        raise SingularityError(f"fog node {f} is colocated with the cloud")
    return _budget(x, y, placement.assigned_slot, cfg, h_fog, h_cloud)


def effective_rate(budget: LinkBudget, cfg: NetworkConfig, definition: str = "round") -> float:
    """Average data rate of the end devices under ``definition``."""
    M, K = cfg.packet_bits_M, cfg.processed_bits_K
    if definition == "round":
        airtime = np.sum(M / budget.rate_fog) + np.sum((M - K) / budget.rate_cloud)
        return float(M / (airtime + cfg.fixed_delays))
    if definition == "two_hop":
        return float(np.mean(M / budget.trans_delay))
    raise ValueError(f"unknown rate definition {definition!r}; expected one of {tuple(RATE_DEFINITIONS)}")


def _draw_gains(rng, n_dev, n_fog, fading):
    if fading is None:
        return np.ones(n_dev), np.ones(n_fog)
    if fading == "nakagami":
        # power gain of Nakagami-m amplitude: Gamma(m, 1/m), unit mean
        return (rng.gamma(NAKAGAMI_M, 1.0 / NAKAGAMI_M, size=n_dev),
                rng.gamma(NAKAGAMI_M, 1.0 / NAKAGAMI_M, size=n_fog))
    raise ValueError(f"unknown fading mode {fading!r}; expected one of {FADING_MODES}")


def _trial_rates(cfg, n1, snr_db, rng, layout, definition, fading):
    coords, fogs = sample_placement_rng(cfg, n1, rng, layout)
    assignment = nearest_assignment(coords, fogs)
    placement = Placement(coords=coords, fog_indices=fogs, assignment=assignment, seed=-1, a=cfg.half_side_a, layout=layout)
    gains = _draw_gains(rng, len(assignment), n1, fading)
    return np.array([effective_rate(link_budget(placement, snr_config(cfg, s), gains), cfg, definition) for s in snr_db])


def _robust_trial(cfg, n1, snr_db, seed, keys, layout, definition, fading):
    for redraw in range(MAX_REDRAWS + 1):
        try:
            return _trial_rates(cfg, n1, snr_db, make_rng(seed, *keys, redraw), layout, definition, fading)
        except SingularityError:
            continue
    raise SimulationError(f"trial {keys} produced colocated nodes in {MAX_REDRAWS} re-draws")


def _check_common(trials, layout, definition):
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if layout not in LAYOUTS:
        raise ValueError(f"unknown layout {layout!r}; expected one of {LAYOUTS}")
    if definition not in RATE_DEFINITIONS:
        raise ValueError(f"unknown rate definition {definition!r}; expected one of {tuple(RATE_DEFINITIONS)}")


def average_rates(
    cfg: NetworkConfig,
    n1: int,
    snr_grid_db,
    trials: int,
    seed: int,
    *,
    layout: str = "fog_range",
    definition: str = "round",
    fading: str | None = None,
) -> np.ndarray:
    """Average data rate with ``n1`` fog nodes at each SNR in ``snr_grid_db``.

    Each trial draws one placement (and channel gains) that is reused for
    every SNR point; trial ``t`` uses the sub-stream ``(seed, t, redraw)``.
    """
    _check_common(trials, layout, definition)
    n = cfg.total_nodes_n
    if not 1 <= n1 <= n - 1:
        raise ValueError(f"n1 must lie in [1, {n - 1}], got {n1}")
    snr = np.atleast_1d(np.asarray(snr_grid_db, dtype=float))
    per_trial = np.stack([_robust_trial(cfg, n1, snr, seed, (t,), layout, definition, fading) for t in range(trials)])
    return per_trial.mean(axis=0)


def average_rate(cfg: NetworkConfig, n1: int, snr_db: float, trials: int, seed: int, **kwargs) -> float:
    """Average data rate (bit/s) with ``n1`` fog nodes at one SNR point."""
    return float(average_rates(cfg, n1, [snr_db], trials, seed, **kwargs)[0])


def optimized_fog_count(cfg: NetworkConfig) -> int:
    """``round(n * analytic_p)`` with a floor of one fog node."""
    n = cfg.total_nodes_n
    n1 = math.floor(n * analytic_p(cfg.alpha, cfg.half_side_a, cfg.fog_radius_R, n) + 0.5)
    return min(max(1, n1), n - 1)


@dataclass
class RateRatioReport:
    """Optimized vs unoptimized average data rate over an SNR grid."""

    snr_grid_db: np.ndarray
    rate_opt: np.ndarray
    rate_unopt: np.ndarray
    ratio: np.ndarray
    trials: int
    seed: int
    n: int
    alpha: int
    n1_opt: int = 0
    a_km: float = float("nan")
    R_km: float = float("nan")
    rate_definition: str = "round"
    layout: str = "fog_range"
    fading: str | None = None
    prng: str = PRNG_NAME

    def metadata(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "n": self.n,
            "alpha": self.alpha,
            "a_km": self.a_km,
            "R_km": self.R_km,
            "n1_opt": self.n1_opt,
            "rate_definition": self.rate_definition,
            "rate_definition_text": RATE_DEFINITIONS[self.rate_definition],
            "layout": self.layout,
            "fading": self.fading,
            "unoptimized_n1": f"uniform on {{1, ..., {self.n - 1}}} per trial",
            "prng": self.prng,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["snr_db", "rate_opt_bps", "rate_unopt_bps", "ratio"])
        for row in zip(self.snr_grid_db, self.rate_opt, self.rate_unopt, self.ratio):
            w.writerow([f"{v:.17g}" for v in row])
        return buf.getvalue()

    def metadata_json(self) -> str:
        return json.dumps(self.metadata(), indent=2)

    @classmethod
    def from_csv(cls, text: str, metadata: str | dict) -> "RateRatioReport":
        meta = json.loads(metadata) if isinstance(metadata, str) else metadata
        cols = np.loadtxt(io.StringIO(text), delimiter=",", skiprows=1, ndmin=2).T
        return cls(
            snr_grid_db=cols[0], rate_opt=cols[1], rate_unopt=cols[2], ratio=cols[3],
            trials=meta["trials"], seed=meta["seed"], n=meta["n"], alpha=meta["alpha"],
            n1_opt=meta.get("n1_opt", 0), a_km=meta.get("a_km", float("nan")), R_km=meta.get("R_km", float("nan")),
            rate_definition=meta.get("rate_definition", "round"), layout=meta.get("layout", "fog_range"),
            fading=meta.get("fading"), prng=meta.get("prng", PRNG_NAME),
        )


def rate_ratio_experiment(
    cfg: NetworkConfig,
    snr_grid_db,
    trials: int,
    seed: int,
    *,
    layout: str = "fog_range",
    definition: str = "round",
    fading: str | None = None,
) -> RateRatioReport:
    """Compare ``round(n * analytic_p)`` fog nodes against a random fog count.

    The unoptimized arm draws ``n1`` uniformly from ``{1, ..., n-1}``
    independently in every trial and averages the resulting rates.
    """
    _check_common(trials, layout, definition)
    snr = np.asarray(snr_grid_db, dtype=float)
    if snr.ndim != 1 or snr.size == 0:
        raise ValueError("snr_grid_db must be a non-empty 1-D sequence")
    n = cfg.total_nodes_n
    n1_opt = optimized_fog_count(cfg)

    opt = np.empty((trials, snr.size))
    unopt = np.empty((trials, snr.size))
    for t in range(trials):
        opt[t] = _robust_trial(cfg, n1_opt, snr, seed, (_ARM_OPT, t), layout, definition, fading)
        n1 = int(make_rng(seed, _ARM_N1, t).integers(1, n))
        unopt[t] = _robust_trial(cfg, n1, snr, seed, (_ARM_UNOPT, t), layout, definition, fading)

    rate_opt = opt.mean(axis=0)
    rate_unopt = unopt.mean(axis=0)
    return RateRatioReport(
        snr_grid_db=snr, rate_opt=rate_opt, rate_unopt=rate_unopt, ratio=rate_opt / rate_unopt,
        trials=trials, seed=seed, n=n, alpha=cfg.alpha, n1_opt=n1_opt,
        a_km=cfg.half_side_a, R_km=cfg.fog_radius_R,
        rate_definition=definition, layout=layout, fading=fading,
    )
