"""A-priori bound audits of a run and the observables extracted from it."""

import logging
import math
from dataclasses import astuple, dataclass, field, fields
from typing import TYPE_CHECKING, Dict, List, Tuple

import numpy as np
import pandas as pd
from scipy import spatial

from .grid import Field, l1_norm, linf_norm, support_radius, total_variation

if TYPE_CHECKING:
    from .solver.coupling import ModelParams, SimState


@dataclass(frozen=True)
class GrowthBounds:
    l1_u: float
    linf_u: float
    l1_w: float
    linf_w: float


def _growth_time(gamma: float, t: float) -> float:
    # (e^{gamma t} - 1) / gamma, continuous at gamma = 0
    if gamma == 0:
        return t
    return math.expm1(gamma * t) / gamma


def _scaled_exp(norm: float, exponent: float) -> float:
    if norm == 0:
        return 0.0
    with np.errstate(over="ignore"):
        return float(norm * np.exp(exponent))


def growth_bounds(
    p: "ModelParams", K: float, u0: Field, w0: Field, t: float
) -> GrowthBounds:
    assert p.gamma >= 0 and t >= 0
    tau = _growth_time(p.gamma, t)
    linf_w0 = linf_norm(w0)
    return GrowthBounds(
        l1_u=_scaled_exp(l1_norm(u0), p.alpha * tau * linf_w0),
        linf_u=_scaled_exp(linf_norm(u0), (p.alpha + K) * tau * linf_w0),
        l1_w=_scaled_exp(l1_norm(w0), p.gamma * t),
        linf_w=_scaled_exp(linf_w0, p.gamma * t),
    )


def support_bound(rho0: float, K: float, gamma: float, l1_w0: float, t: float) -> float:
    assert min(rho0, K, gamma, l1_w0, t) >= 0
    if l1_w0 == 0 or t == 0:
        return rho0
    with np.errstate(over="ignore"):
        return float(rho0 + K * t * np.exp(gamma * t) * l1_w0)


@dataclass
class DiagnosticRecord:
    t: float
    l1_u: float
    linf_u: float
    l1_w: float
    linf_w: float
    tv_u: float
    support_u: float
    bound_l1_u: float
    bound_linf_u: float
    bound_l1_w: float
    bound_linf_w: float
    bound_support_u: float
    ok_l1_u: int
    ok_linf_u: int
    ok_l1_w: int
    ok_linf_w: int
    ok_support_u: int
    min_u: float
    min_w: float

    @property
    def ok(self) -> bool:
        return all(getattr(self, name) for name in OK_COLUMNS)

    def to_tuple(self) -> Tuple:
        return astuple(self)


DIAGNOSTIC_COLUMNS = [f.name for f in fields(DiagnosticRecord)]
OK_COLUMNS = [c for c in DIAGNOSTIC_COLUMNS if c.startswith("ok_")]


@dataclass
class DiagnosticsSeries:
    records: List[DiagnosticRecord] = field(default_factory=list)

    def append(self, rec: DiagnosticRecord):
        assert not self.records or rec.t > self.records[-1].t, (
            f"Diagnostics must be recorded at increasing times; got {rec.t} after "
            f"{self.records[-1].t}"
        )
        self.records.append(rec)

    def __len__(self) -> int:
        return len(self.records)

    def last(self) -> DiagnosticRecord:
        return self.records[-1]

    def all_ok(self) -> bool:
        return all(r.ok for r in self.records)

    def failures(self) -> Dict[str, int]:
        # number of records failing each bound
        return {
            c: sum(1 for r in self.records if not getattr(r, c)) for c in OK_COLUMNS
        }

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [r.to_tuple() for r in self.records], columns=DIAGNOSTIC_COLUMNS
        )

    @classmethod
    def from_frame(cls, df: pd.DataFrame) -> "DiagnosticsSeries":
        if list(df.columns) != DIAGNOSTIC_COLUMNS:
            raise ValueError(f"Unexpected diagnostics columns: {list(df.columns)}")
        series = cls()
        for row in df.itertuples(index=False):
            vals = {
                c: (int(v) if c in OK_COLUMNS else float(v))
                for c, v in zip(DIAGNOSTIC_COLUMNS, row)
            }
            series.append(DiagnosticRecord(**vals))
        return series


class BoundAudit:
    """Checks a state against growth and propagation bounds built from the initial data.

    Norms are allowed a relative slack of `tol_audit`; the support radius is
    allowed `support_slack` (one kernel radius by default) on top of the bound.
    """

    def __init__(
        self,
        u0: Field,
        w0: Field,
        p: "ModelParams",
        K: float,
        tol_audit: float = 0.10,
        support_slack: float | None = None,
    ):
        assert tol_audit >= 0
        self.u0 = u0
        self.w0 = w0
        self.p = p
        self.K = K
        self.tol_audit = tol_audit
        self.support_slack = p.ell if support_slack is None else support_slack
        self.rho0 = support_radius(u0)
        self.l1_w0 = l1_norm(w0)

    def evaluate(self, t: float, u: Field, w: Field) -> DiagnosticRecord:
        b = growth_bounds(self.p, self.K, self.u0, self.w0, t)
        rho = support_bound(self.rho0, self.K, self.p.gamma, self.l1_w0, t)
        l1_u, linf_u = l1_norm(u), linf_norm(u)
        l1_w, linf_w = l1_norm(w), linf_norm(w)
        sup_u = support_radius(u)
        slack = 1 + self.tol_audit
        return DiagnosticRecord(
            t=t,
            l1_u=l1_u,
            linf_u=linf_u,
            l1_w=l1_w,
            linf_w=linf_w,
            tv_u=total_variation(u),
            support_u=sup_u,
            bound_l1_u=b.l1_u,
            bound_linf_u=b.linf_u,
            bound_l1_w=b.l1_w,
            bound_linf_w=b.linf_w,
            bound_support_u=rho,
            ok_l1_u=int(l1_u <= b.l1_u * slack),
            ok_linf_u=int(linf_u <= b.linf_u * slack),
            ok_l1_w=int(l1_w <= b.l1_w * slack),
            ok_linf_w=int(linf_w <= b.linf_w * slack),
            ok_support_u=int(sup_u <= rho + self.support_slack),
            min_u=u.min(),
            min_w=w.min(),
        )


class DiagnosticsRecorder:
    """Run observer appending one audited record per call."""

    def __init__(
        self,
        u0: Field,
        w0: Field,
        p: "ModelParams",
        K: float,
        tol_audit: float = 0.10,
    ):
        self.audit = BoundAudit(u0, w0, p, K, tol_audit)
        self.series = DiagnosticsSeries()
        self._warned: set = set()

    def __call__(self, s: "SimState"):
        rec = self.audit.evaluate(s.t, s.u, s.w)
        self.series.append(rec)
        for c in OK_COLUMNS:
            if not getattr(rec, c) and c not in self._warned:
                self._warned.add(c)
                name = c.removeprefix("ok_")
                logging.warning(
                    f"Bound on {name} exceeded at t={rec.t:g}: observed "
                    f"{getattr(rec, name):.6g} vs bound {getattr(rec, 'bound_' + name):.6g}"
                )


@dataclass
class PeakSet:
    peaks: List[Tuple[float, float, float]]
    spacing: float | None

    @property
    def count(self) -> int:
        return len(self.peaks)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.peaks, columns=["x", "y", "height"])

    def __str__(self) -> str:
        spacing = "n/a" if self.spacing is None else f"{self.spacing:.4g}"
        return f"{self.count} peaks, mean nearest-neighbour spacing {spacing}"


def detect_peaks(u: Field, rel_threshold: float = 0.25) -> PeakSet:
    assert 0 < rel_threshold < 1
    v = u.values
    top = linf_norm(u)
    c = v[1:-1, 1:-1]
    mask = (c >= rel_threshold * top) & (c > 0)
    nx, ny = v.shape
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            mask &= c > v[1 + di : nx - 1 + di, 1 + dj : ny - 1 + dj]
    ii, jj = np.nonzero(mask)
    xs = u.grid.x_centers()[ii + 1]
    ys = u.grid.y_centers()[jj + 1]
    heights = c[ii, jj]
    peaks = [(float(x), float(y), float(h)) for x, y, h in zip(xs, ys, heights)]
    if len(peaks) < 2:
        return PeakSet(peaks=peaks, spacing=None)
    pts = np.column_stack([xs, ys])
    dist, _ = spatial.cKDTree(pts).query(pts, k=2)
    return PeakSet(peaks=peaks, spacing=float(dist[:, 1].mean()))


def mass_series(diag: DiagnosticsSeries) -> pd.DataFrame:
    # densities are non-negative, so the L1 norms are the domain integrals
    df = diag.to_frame()
    return pd.DataFrame(
        {"t": df["t"], "mass_u": df["l1_u"], "mass_w": df["l1_w"]}
    ).reset_index(drop=True)


@dataclass(frozen=True)
class DipAndRise:
    t_min: float
    mass_min: float
    # relative increase from the minimum to the later maximum
    rise: float


def dip_and_rise(t: np.ndarray, m: np.ndarray) -> DipAndRise | None:
    """Strict interior minimum of a mass series followed by a rise, if any."""
    t = np.asarray(t, dtype=np.float64)
    m = np.asarray(m, dtype=np.float64)
    if m.size < 3:
        return None
    k = int(np.argmin(m))
    if k == 0 or k == m.size - 1 or not m[k] < m[0]:
        return None
    later = float(m[k:].max())
    if not later > m[k]:
        return None
    rise = (later - m[k]) / m[k] if m[k] > 0 else math.inf
    return DipAndRise(t_min=float(t[k]), mass_min=float(m[k]), rise=rise)
