"""Finite-size-scaling collapse.

Ansatz: ``y(s, N) = N^(zeta/nu) f((s - s_c) N^(1/nu))``. The collapse quality
is the Houdayer-Hartmann statistic: every rescaled point is compared with a
local master curve obtained by weighted linear fits through the bracketing
points of all *other* sizes; perfect collapse within errors gives ~1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .rng import stream

# Nelder-Mead settings (scipy's non-adaptive coefficients are 1, 2, 0.5, 0.5)
NM_FATOL = 1e-6
NM_MAXITER = 500
DEFAULT_BOOTSTRAP = 200
# half-width in s of the fit window used by the command line
DEFAULT_WINDOW = 0.75


class UndefinedQualityError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, best: "CollapseFit"):
        super().__init__(message)
        self.best = best


@dataclass
class ScalingDataset:
    """Flat (N, s, y, yerr) arrays, one entry per data point."""

    sizes: np.ndarray
    s: np.ndarray
    y: np.ndarray
    yerr: np.ndarray
    label: str = "I3"

    def __post_init__(self):
        self.sizes = np.asarray(self.sizes, dtype=float)
        self.s = np.asarray(self.s, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        self.yerr = np.asarray(self.yerr, dtype=float)
        if not (self.sizes.shape == self.s.shape == self.y.shape == self.yerr.shape):
            raise ValueError("dataset columns differ in length")
        if np.any(self.yerr <= 0) or not np.all(np.isfinite(self.yerr)):
            raise ValueError("standard errors must be positive and finite")

    @classmethod
    def from_series(cls, series, label: str = "I3") -> "ScalingDataset":
        """``series``: iterable of (N, [(s, mean, sem), ...])."""
        cols = [], [], [], []
        for n, points in series:
            for s, y, e in points:
                for col, v in zip(cols, (n, s, y, e)):
                    col.append(v)
        return cls(*(np.array(c) for c in cols), label=label)

    @classmethod
    def from_records(cls, records, observable: str = "i3", min_err: Optional[float] = None, model=None):
        """Build from SweepRecords; errors are floored at ``min_err``
        (default 1 / realizations, the resolution of an ensemble mean)."""
        sizes, s, y, e = [], [], [], []
        for rec in records:
            if model is not None and rec.model != model:
                continue
            mean = getattr(rec, f"{observable}_mean")
            sem = getattr(rec, f"{observable}_sem")
            floor = min_err if min_err is not None else 1.0 / rec.realizations
            sizes.append(rec.N)
            s.append(rec.s)
            y.append(mean)
            e.append(max(sem, floor))
        return cls(np.array(sizes), np.array(s), np.array(y), np.array(e), label=observable)

    @property
    def system_sizes(self) -> np.ndarray:
        return np.unique(self.sizes)

    def series(self, n) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        sel = self.sizes == n
        order = np.argsort(self.s[sel])
        return self.s[sel][order], self.y[sel][order], self.yerr[sel][order]

    def validate(self) -> None:
        sizes = self.system_sizes
        if sizes.size < 2:
            raise UndefinedQualityError("collapse needs at least two system sizes")
        for n in sizes:
            if np.count_nonzero(self.sizes == n) < 4:
                raise ValueError(f"size {n:g} has fewer than 4 points")

    def window(self, center: float, half_width: float) -> "ScalingDataset":
        """Points with |s - center| <= half_width."""
        keep = np.abs(self.s - center) <= half_width + 1e-12
        return ScalingDataset(self.sizes[keep], self.s[keep], self.y[keep], self.yerr[keep], self.label)

    def with_values(self, y: np.ndarray) -> "ScalingDataset":
        return ScalingDataset(self.sizes, self.s, y, self.yerr, self.label)


def synthetic_dataset(
    sizes: Sequence[int],
    s: Sequence[float],
    s_c: float = -1.0,
    nu: float = 2.0,
    zeta: float = 0.0,
    noise: float = 0.02,
    seed: int = 0,
    f=None,
) -> ScalingDataset:
    """Data drawn from a known scaling form, for checking the fitter.

    ``f`` defaults to a logistic step from 0 down to -1; Gaussian noise of
    absolute size ``noise`` is added and quoted as the error bar.
    """
    if f is None:
        f = lambda x: -1.0 / (1.0 + np.exp(-x))  # noqa: E731
    n_grid, s_grid = np.meshgrid(np.asarray(sizes, float), np.asarray(s, float), indexing="ij")
    n_flat, s_flat = n_grid.ravel(), s_grid.ravel()
    clean = n_flat ** (zeta / nu) * f((s_flat - s_c) * n_flat ** (1.0 / nu))
    rng = stream(seed)
    y = clean + rng.normal(0.0, noise, clean.size)
    return ScalingDataset(n_flat, s_flat, y, np.full(clean.size, noise), label="synthetic")


def rescale(d: ScalingDataset, s_c: float, nu: float, zeta: float = 0.0):
    scale = d.sizes ** (-zeta / nu)
    return (d.s - s_c) * d.sizes ** (1.0 / nu), d.y * scale, d.yerr * scale


def collapse_quality(d: ScalingDataset, s_c: float, nu: float, zeta: float = 0.0) -> float:
    if nu <= 0:
        raise ValueError("nu must be positive")
    sizes = d.system_sizes
    if sizes.size < 2:
        raise UndefinedQualityError("collapse needs at least two system sizes")
    x, y, dy = rescale(d, s_c, nu, zeta)
    groups = []
    for n in sizes:
        sel = np.flatnonzero(d.sizes == n)
        sel = sel[np.argsort(x[sel])]
        groups.append((x[sel], y[sel], dy[sel]))

    total, count = 0.0, 0
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        for i in range(len(groups)):
            t, c = _group_chi2(i, groups)
            total += t
            count += c
    if count == 0:
        raise UndefinedQualityError("no rescaled point overlaps another size")
    return total / count


def _group_chi2(i, groups) -> tuple[float, int]:
    xi, yi, dyi = groups[i]
    K = np.zeros_like(xi)
    Kx = np.zeros_like(xi)
    Ky = np.zeros_like(xi)
    Kxx = np.zeros_like(xi)
    Kxy = np.zeros_like(xi)
    for k, (xk, yk, dyk) in enumerate(groups):
        if k == i:
            continue
        j = np.searchsorted(xk, xi, side="right")
        ok = (j > 0) & (j < xk.size)
        j = np.clip(j, 1, xk.size - 1)
        for jj in (j - 1, j):
            w = np.where(ok, 1.0 / dyk[jj] ** 2, 0.0)
            K += w
            Kx += w * xk[jj]
            Ky += w * yk[jj]
            Kxx += w * xk[jj] ** 2
            Kxy += w * xk[jj] * yk[jj]
    delta = K * Kxx - Kx**2
    good = (K > 0) & (delta > 0)
    if not good.any():
        return 0.0, 0
    xg = xi[good]
    dg = delta[good]
    master = (Kxx[good] * Ky[good] - Kx[good] * Kxy[good] + xg * (K[good] * Kxy[good] - Kx[good] * Ky[good])) / dg
    master_var = (Kxx[good] - 2 * xg * Kx[good] + xg**2 * K[good]) / dg
    return float(np.sum((yi[good] - master) ** 2 / (dyi[good] ** 2 + master_var))), int(good.sum())


def crossing_point(
    s: np.ndarray, y_small, e_small, y_large, e_large, direction: str = "down"
) -> Optional[float]:
    """Where the larger size's curve crosses the smaller one's.

    ``direction="down"`` looks for ``y_large - y_small`` changing from >= 0 to
    < 0 with increasing s (I3); ``"up"`` for the opposite (P*). Each candidate
    sign change is scored by the summed significance |diff| / sigma of the
    unbroken same-sign runs on either side, so that flips caused by noise in
    flat stretches lose to the genuine crossing. The winner is located by a
    weighted straight-line fit to the differences at the two bracketing points
    and one neighbour on each side, kept only if the root stays in the bracket
    (otherwise plain linear interpolation).
    """
    if direction not in ("down", "up"):
        raise ValueError(f"direction must be 'down' or 'up', got {direction!r}")
    s = np.asarray(s, dtype=float)
    diff = np.asarray(y_large, float) - np.asarray(y_small, float)
    if direction == "up":
        diff = -diff
    sigma = np.hypot(np.asarray(e_small, float), np.asarray(e_large, float))
    sig = np.abs(diff) / np.where(sigma > 0, sigma, np.inf)
    best, best_score = None, -np.inf
    for k in range(s.size - 1):
        if not diff[k] >= 0 > diff[k + 1]:
            continue
        lo = k
        while lo > 0 and diff[lo - 1] >= 0:
            lo -= 1
        hi = k + 1
        while hi + 1 < s.size and diff[hi + 1] < 0:
            hi += 1
        score = sig[lo : hi + 1].sum()
        if score > best_score:
            best, best_score = _refine_root(s, diff, sigma, k, lo, hi), score
    return best


def _refine_root(s, diff, sigma, k, lo, hi) -> float:
    frac = diff[k] / (diff[k] - diff[k + 1])
    plain = s[k] + frac * (s[k + 1] - s[k])
    window = slice(max(lo, k - 1), min(hi, k + 2) + 1)
    xs, ds, es = s[window], diff[window], sigma[window]
    if xs.size < 3 or np.any(es <= 0):
        return float(plain)
    slope, icpt = np.polyfit(xs, ds, 1, w=1.0 / es)
    if slope >= 0:
        return float(plain)
    root = -icpt / slope
    return float(root) if s[k] <= root <= s[k + 1] else float(plain)


def dataset_crossing(d: ScalingDataset, n_small, n_large, direction: str = "down") -> Optional[float]:
    s1, y1, e1 = d.series(n_small)
    s2, y2, e2 = d.series(n_large)
    common, i1, i2 = np.intersect1d(s1, s2, return_indices=True)
    return crossing_point(common, y1[i1], e1[i1], y2[i2], e2[i2], direction)


@dataclass
class CollapseFit:
    s_c: float
    nu: float
    zeta: float
    quality: float
    s_c_err: float = 0.0
    nu_err: float = 0.0
    zeta_err: float = 0.0
    n_bootstrap: int = 0
    fix_zeta: bool = True
    n_iterations: int = 0
    metadata: dict = field(default_factory=dict)

    @property
    def errors(self) -> tuple[float, float]:
        """Bootstrap standard errors (s_c, nu)."""
        return self.s_c_err, self.nu_err

    def master_curve(self, d: ScalingDataset) -> np.ndarray:
        """Rows (N, x, y, yerr) of the rescaled data, sorted by x."""
        x, y, dy = rescale(d, self.s_c, self.nu, self.zeta)
        order = np.argsort(x, kind="stable")
        return np.column_stack([d.sizes, x, y, dy])[order]

    def report(self, d: Optional[ScalingDataset] = None) -> str:
        lines = [
            f"s_c = {self.s_c:.9g}",
            f"s_c_err = {self.s_c_err:.9g}",
            f"nu = {self.nu:.9g}",
            f"nu_err = {self.nu_err:.9g}",
            f"zeta = {self.zeta:.9g}",
            f"quality = {self.quality:.9g}",
            f"n_bootstrap = {self.n_bootstrap}",
        ]
        if not self.fix_zeta:
            lines.insert(5, f"zeta_err = {self.zeta_err:.9g}")
        for key, val in self.metadata.items():
            lines.append(f"# {key} = {val}")
        if d is not None:
            lines.append("master_curve:")
            for _, x, y, e in self.master_curve(d):
                lines.append(f"{x:.9g},{y:.9g},{e:.9g}")
        return "\n".join(lines) + "\n"


def parse_report(text: str) -> dict:
    out: dict = {}
    rows = []
    in_curve = False
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line == "master_curve:":
            in_curve = True
            continue
        if in_curve:
            rows.append([float(v) for v in line.split(",")])
        else:
            key, _, val = line.partition("=")
            out[key.strip()] = float(val) if key.strip() != "n_bootstrap" else int(val)
    out["master_curve"] = np.array(rows).reshape(-1, 3)
    return out


def _objective(d: ScalingDataset, fix_zeta: bool, zeta0: float):
    def f(p):
        s_c, nu = p[0], p[1]
        zeta = zeta0 if fix_zeta else p[2]
        if not np.isfinite(nu) or nu <= 0.05:
            return np.inf
        try:
            return collapse_quality(d, s_c, nu, zeta)
        except UndefinedQualityError:
            return np.inf

    return f


def _minimize(d, start, fix_zeta, zeta0, maxiter=NM_MAXITER):
    start = np.asarray(start, dtype=float)
    steps = np.array([0.1, 0.25, 0.1])[: start.size]
    simplex = np.vstack([start] + [start + np.eye(start.size)[k] * steps[k] for k in range(start.size)])
    return minimize(
        _objective(d, fix_zeta, zeta0),
        start,
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "fatol": NM_FATOL,
            "xatol": np.inf,
            "maxiter": maxiter,
            "adaptive": False,
        },
    )


def initial_guess(d: ScalingDataset) -> tuple[float, float]:
    """s_c from the crossing of the two largest sizes (grid median if none), nu = 2."""
    sizes = d.system_sizes
    sc = dataset_crossing(d, sizes[-2], sizes[-1])
    if sc is None:
        sc = dataset_crossing(d, sizes[-2], sizes[-1], direction="up")
    if sc is None:
        sc = float(np.median(d.s))
    return float(sc), 2.0


def fit_collapse(
    d: ScalingDataset,
    init: Optional[Sequence[float]] = None,
    fix_zeta: bool = True,
    zeta: float = 0.0,
    n_bootstrap: int = DEFAULT_BOOTSTRAP,
    seed: int = 0,
    maxiter: int = NM_MAXITER,
    window: Optional[float] = None,
) -> CollapseFit:
    """Nelder-Mead fit of (s_c, nu[, zeta]) with Gaussian-resampling bootstrap errors.

    With ``window`` set, only points within that distance in s of the starting
    s_c (the largest-size crossing unless ``init`` is given) enter the fit; the
    scaling form is only expected to hold near the transition.
    """
    d.validate()
    if init is None:
        init = initial_guess(d)
    if window is not None:
        if window <= 0:
            raise ValueError("window must be positive")
        d = d.window(float(init[0]), float(window))
        d.validate()
    start = [float(init[0]), float(init[1])] + ([] if fix_zeta else [float(zeta)])
    res = _minimize(d, start, fix_zeta, zeta, maxiter)
    best = CollapseFit(
        s_c=float(res.x[0]),
        nu=float(res.x[1]),
        zeta=float(zeta if fix_zeta else res.x[2]),
        quality=float(res.fun),
        fix_zeta=fix_zeta,
        n_iterations=int(res.nit),
        metadata={
            "optimizer": "nelder-mead",
            "fatol": NM_FATOL,
            "maxiter": maxiter,
            "init": tuple(start),
            "window": window,
            "n_points": int(d.s.size),
        },
    )
    if not np.isfinite(res.fun):
        raise ConvergenceError("collapse quality undefined at every simplex vertex", best)
    if not res.success:
        raise ConvergenceError(f"Nelder-Mead did not converge: {res.message}", best)

    samples = []
    for b in range(n_bootstrap):
        rng = stream(seed, b)
        resampled = d.with_values(d.y + rng.normal(0.0, d.yerr))
        r = _minimize(resampled, res.x, fix_zeta, zeta, maxiter)
        if np.isfinite(r.fun):
            samples.append(r.x)
    if samples:
        arr = np.array(samples)
        errs = arr.std(axis=0, ddof=1) if len(samples) > 1 else np.zeros(arr.shape[1])
        best.s_c_err, best.nu_err = float(errs[0]), float(errs[1])
        if not fix_zeta:
            best.zeta_err = float(errs[2])
    best.n_bootstrap = len(samples)
    return best
