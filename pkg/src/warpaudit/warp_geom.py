"""Extrinsic geometry of warped product immersions into flat cosymplectic space.

The ambient space is R^{2m+1} with coordinates ordered ``(x1, y1, ..., xm, ym,
z)``, the Euclidean metric, structure tensor ``phi(dx_i) = dy_i``,
``phi(dy_i) = -dx_i``, ``phi(dz) = 0`` and Reeb field ``xi = dz``.  Because
the ambient is flat, the second fundamental form is the normal projection of
the coordinate second derivatives of the immersion, all of which are taken by
central finite differences on a black-box map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Sequence

import numpy as np

from . import linalg_core as la


class GeometryError(ValueError):
    pass


class DegenerateImmersion(GeometryError):
    pass


class ModelInvariantError(GeometryError):
    def __init__(self, invariant: str, residual: float, point):
        super().__init__(f"model invariant '{invariant}' violated at {tuple(point)}: residual {residual:.3e}")
        self.invariant = invariant
        self.residual = residual


@dataclass(frozen=True)
class GeometrySettings:
    fd1: float = 1e-6
    fd2: float = 1e-4
    proj_tol: float = 1e-8
    metric_tol: float = 1e-7
    geo_tol: float = 1e-6
    laplacian_sign: str = "divgrad"

    def __post_init__(self):
        if self.laplacian_sign not in ("divgrad", "negative"):
            raise ValueError(f"laplacian_sign must be 'divgrad' or 'negative', got {self.laplacian_sign!r}")


DEFAULT_SETTINGS = GeometrySettings()


@dataclass(frozen=True)
class AmbientCosymplectic:
    m: int
    c_c: float = 0.0

    @property
    def dim(self) -> int:
        return 2 * self.m + 1

    def phi(self, vec: np.ndarray) -> np.ndarray:
        vec = np.asarray(vec, dtype=float)
        out = np.zeros_like(vec)
        out[1 : 2 * self.m : 2] = vec[0 : 2 * self.m : 2]
        out[0 : 2 * self.m : 2] = -vec[1 : 2 * self.m : 2]
        return out

    def eta(self, vec: np.ndarray) -> float:
        return float(vec[-1])

    @property
    def reeb(self) -> np.ndarray:
        e = np.zeros(self.dim)
        e[-1] = 1.0
        return e

    def structure_residual(self) -> float:
        """Largest defect of the almost contact metric identities on basis vectors."""
        basis = np.eye(self.dim)
        worst = float(np.max(np.abs(self.phi(self.reeb))))
        for u in basis:
            target = -u + self.eta(u) * self.reeb
            worst = max(worst, float(np.max(np.abs(self.phi(self.phi(u)) - target))))
            for w in basis:
                lhs = self.phi(u) @ self.phi(w)
                worst = max(worst, abs(lhs - (u @ w - self.eta(u) * self.eta(w))))
        return worst


def _unit_metric(q: np.ndarray) -> np.ndarray:
    return np.eye(len(q))


@dataclass(frozen=True)
class ImmersionModel:
    """Chart of ``N_T x_f N_perp`` mapped into the ambient space.

    Chart coordinates list the ``n1`` first-factor coordinates (one of which,
    ``xi_index``, maps to the Reeb direction) before the ``n2`` fiber
    coordinates.  ``warping_f`` takes the first-factor coordinates and
    ``fiber_metric`` the fiber coordinates.
    """

    name: str
    n1: int
    n2: int
    ambient: AmbientCosymplectic
    bounds: tuple[tuple[float, float], ...]
    immersion: Callable[[np.ndarray], np.ndarray]
    warping_f: Callable[[np.ndarray], float]
    xi_index: int
    fiber_metric: Callable[[np.ndarray], np.ndarray] = _unit_metric
    description: str = ""

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise GeometryError(f"need n1, n2 >= 1, got {self.n1}, {self.n2}")
        if len(self.bounds) != self.n:
            raise GeometryError(f"chart has {len(self.bounds)} axes, expected {self.n}")
        if not 0 <= self.xi_index < self.n1:
            raise GeometryError("xi_index must be a first-factor coordinate")

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def scales(self) -> np.ndarray:
        return np.array([hi - lo for lo, hi in self.bounds], dtype=float)

    def __call__(self, p) -> np.ndarray:
        return np.asarray(self.immersion(np.asarray(p, dtype=float)), dtype=float)

    def f(self, p) -> float:
        return float(self.warping_f(np.asarray(p, dtype=float)[: self.n1]))

    def grid(self, per_axis: int | Sequence[int] = 5) -> list[np.ndarray]:
        """Cell-centred sample points, so every point is interior."""
        if isinstance(per_axis, int):
            per_axis = [per_axis] * self.n
        if len(per_axis) != self.n or min(per_axis) < 1:
            raise GeometryError(f"grid needs {self.n} positive counts, got {per_axis}")
        axes = [lo + (np.arange(k) + 0.5) * (hi - lo) / k for (lo, hi), k in zip(self.bounds, per_axis)]
        return [np.array(pt) for pt in product(*axes)]


@dataclass
class PointGeometry:
    point: np.ndarray
    jacobian: np.ndarray
    tangent_frame: np.ndarray
    metric: np.ndarray
    h: np.ndarray
    h_sq: float
    xi_coords: np.ndarray
    grad_lnf_sq: float | None = None
    lap_lnf: float | None = None
    rhs: float | None = None

    @property
    def margin(self) -> float:
        return self.h_sq - self.rhs


@dataclass(frozen=True)
class ShapeOperator:
    normal_direction: np.ndarray
    matrix: np.ndarray
    reduced: np.ndarray


# ---------------------------------------------------------------------------
# finite differences


def _steps(p: np.ndarray, i: int, h: float) -> tuple[np.ndarray, np.ndarray, float, float]:
    # Offsets along axis i with the step lengths that were actually representable.
    pp = p.copy()
    pm = p.copy()
    pp[i] = p[i] + h
    pm[i] = p[i] - h
    return pp, pm, pp[i] - p[i], p[i] - pm[i]


def _central(fun, p: np.ndarray, i: int, h: float):
    pp, pm, hp, hm = _steps(p, i, h)
    return (fun(pp) - fun(pm)) / (hp + hm)


def _richardson(fun, p: np.ndarray, i: int, h: float):
    return (4.0 * _central(fun, p, i, 0.5 * h) - _central(fun, p, i, h)) / 3.0


def _require_interior(model: ImmersionModel, p: np.ndarray, settings: GeometrySettings) -> None:
    margin = 2.0 * settings.fd2 * model.scales
    for i, (lo, hi) in enumerate(model.bounds):
        if not lo + margin[i] <= p[i] <= hi - margin[i]:
            raise GeometryError(f"point {tuple(p)} is not interior to the chart on axis {i}")


def jacobian(model: ImmersionModel, p, step: float | None = None, settings: GeometrySettings = DEFAULT_SETTINGS) -> np.ndarray:
    """Columns ``dF/du_i`` by Richardson-extrapolated central differences."""
    p = np.asarray(p, dtype=float)
    rel = settings.fd1 if step is None else step
    return np.column_stack([_richardson(model, p, i, rel * s) for i, s in enumerate(model.scales)])


def _mgs(cols: np.ndarray) -> np.ndarray:
    q = np.array(cols, dtype=float)
    for j in range(q.shape[1]):
        for i in range(j):
            q[:, j] -= (q[:, i] @ q[:, j]) * q[:, i]
        q[:, j] /= np.linalg.norm(q[:, j])
    return q


def tangent_frame(model: ImmersionModel, p, settings: GeometrySettings = DEFAULT_SETTINGS) -> tuple[np.ndarray, np.ndarray]:
    """Jacobian and an orthonormal tangent frame (columns), first-factor vectors first."""
    p = np.asarray(p, dtype=float)
    _require_interior(model, p, settings)
    jac = jacobian(model, p, settings=settings)
    smin = float(la.svals(jac)[-1])
    if smin < 1e-8:
        raise DegenerateImmersion(f"degenerate immersion point {tuple(p)}: smallest singular value {smin:.3e}")
    return jac, _mgs(jac)


def _hessian(model: ImmersionModel, p: np.ndarray, rel_step: float) -> np.ndarray:
    # hess[i, j] = d^2 F / du_i du_j, shape (n, n, ambient)
    n = model.n
    steps = rel_step * model.scales
    f0 = model(p)
    hess = np.zeros((n, n, f0.shape[0]))
    for i in range(n):
        pp, pm, hp, hm = _steps(p, i, steps[i])
        hess[i, i] = 2.0 * ((model(pp) - f0) / hp - (f0 - model(pm)) / hm) / (hp + hm)
        for j in range(i + 1, n):
            ppp, ppm, hpj, hmj = _steps(pp, j, steps[j])
            pmp, pmm, _, _ = _steps(pm, j, steps[j])
            mixed = (model(ppp) - model(ppm) - model(pmp) + model(pmm)) / ((hp + hm) * (hpj + hmj))
            hess[i, j] = hess[j, i] = mixed
    return hess


def second_fundamental_form(model: ImmersionModel, p, settings: GeometrySettings = DEFAULT_SETTINGS) -> PointGeometry:
    """Second fundamental form at ``p`` in the orthonormal tangent frame.

    ``h[r, s]`` is the ambient normal vector ``h(e_r, e_s)``.
    """
    p = np.asarray(p, dtype=float)
    jac, frame = tangent_frame(model, p, settings)
    # frame = jac @ coeff, i.e. e_r = sum_i coeff[i, r] d_i
    coeff = np.linalg.inv(frame.T @ jac)
    hess = _hessian(model, p, settings.fd2)
    second = np.einsum("ir,js,ijk->rsk", coeff, coeff, hess)
    normal_proj = np.eye(frame.shape[0]) - frame @ frame.T
    h = second @ normal_proj.T
    h = 0.5 * (h + h.transpose(1, 0, 2))
    h_sq = float(np.sum(h * h))
    return PointGeometry(
        point=p,
        jacobian=jac,
        tangent_frame=frame,
        metric=jac.T @ jac,
        h=h,
        h_sq=h_sq,
        xi_coords=frame.T @ model.ambient.reeb,
    )


def _first_factor_metric(model: ImmersionModel, q: np.ndarray, rel_step: float) -> np.ndarray:
    jac = jacobian(model, q, step=rel_step)[:, : model.n1]
    return jac.T @ jac


def _grad_lnf(model: ImmersionModel, q: np.ndarray, rel_step: float) -> np.ndarray:
    def lnf(r):
        fr = model.f(r)
        if not fr > 0:
            raise GeometryError(f"warping function must be positive, got {fr} at {tuple(r)}")
        return math.log(fr)

    scales = model.scales
    return np.array([_richardson(lnf, q, i, rel_step * scales[i]) for i in range(model.n1)])


def warping_terms(model: ImmersionModel, p, settings: GeometrySettings = DEFAULT_SETTINGS) -> tuple[float, float]:
    """``(|grad ln f|^2, Laplacian ln f)`` on the first factor at ``p``.

    The Laplacian is the divergence of the gradient for the first-factor
    metric, negated when ``settings.laplacian_sign == 'negative'``.
    """
    p = np.asarray(p, dtype=float)
    # The Laplacian differences a computed flux, so every derivative here uses
    # the larger fd2 step with Richardson extrapolation (O(h^4)); fd1 roundoff
    # would be amplified by 1/fd2 in the outer difference.
    step = settings.fd2
    g1 = _first_factor_metric(model, p, step)
    grad = _grad_lnf(model, p, step)
    grad_sq = float(grad @ np.linalg.solve(g1, grad))

    def flux(q):
        g = _first_factor_metric(model, q, step)
        return math.sqrt(np.linalg.det(g)) * np.linalg.solve(g, _grad_lnf(model, q, step))

    div = 0.0
    for i in range(model.n1):
        div += _richardson(lambda q: flux(q)[i], p, i, step * model.scales[i])
    lap = div / math.sqrt(np.linalg.det(g1))
    if settings.laplacian_sign == "negative":
        lap = -lap
    return grad_sq, lap


def theorem_rhs(n1: int, n2: int, grad_lnf_sq: float, lap_lnf: float, c_c: float = 0.0) -> float:
    """Lower bound ``2 n2 (|grad ln f|^2 - Lap ln f + (n1 - 1) c/4)`` for ``|h|^2``."""
    return 2.0 * n2 * (grad_lnf_sq - lap_lnf + (n1 - 1) * c_c / 4.0)


def analyze_point(model: ImmersionModel, p, settings: GeometrySettings = DEFAULT_SETTINGS) -> PointGeometry:
    geo = second_fundamental_form(model, p, settings)
    geo.grad_lnf_sq, geo.lap_lnf = warping_terms(model, p, settings)
    geo.rhs = theorem_rhs(model.n1, model.n2, geo.grad_lnf_sq, geo.lap_lnf, model.ambient.c_c)
    return geo


# ---------------------------------------------------------------------------
# structure checks


def cr_residuals(model: ImmersionModel, geo: PointGeometry) -> dict[str, float]:
    amb = model.ambient
    frame = geo.tangent_frame
    e_t = frame[:, : model.n1]
    e_perp = frame[:, model.n1 :]
    dt = 0.0
    for e in e_t.T:
        pe = amb.phi(e)
        dt = max(dt, float(np.linalg.norm(pe - e_t @ (e_t.T @ pe))))
    dperp = 0.0
    for e in e_perp.T:
        dperp = max(dperp, float(np.max(np.abs(frame.T @ amb.phi(e)))))
    g = geo.metric
    block = float(np.max(np.abs(g[: model.n1, model.n1 :])))
    fiber = model.fiber_metric(geo.point[model.n1 :])
    warp = float(np.max(np.abs(g[model.n1 :, model.n1 :] - model.f(geo.point) ** 2 * fiber)))
    reeb = amb.reeb
    xi_tangent = float(np.linalg.norm(reeb - e_t @ (e_t.T @ reeb)))
    return {
        "dt_invariance_residual": dt,
        "dperp_antiinvariance_residual": dperp,
        "metric_block_residual": block,
        "warp_factor_residual": warp,
        "xi_tangent_residual": xi_tangent,
    }


def check_cr_structure(model: ImmersionModel, points, settings: GeometrySettings = DEFAULT_SETTINGS) -> dict[str, float]:
    """Worst residual of each contact CR-warped product condition over ``points``."""
    worst: dict[str, float] = {}
    for p in points:
        jac, frame = tangent_frame(model, p, settings)
        geo = PointGeometry(np.asarray(p, float), jac, frame, jac.T @ jac, np.zeros(0), 0.0, np.zeros(0))
        for key, val in cr_residuals(model, geo).items():
            worst[key] = max(worst.get(key, 0.0), val)
    return worst


def _verify_invariants(model: ImmersionModel, geo: PointGeometry, settings: GeometrySettings) -> None:
    for key, val in cr_residuals(model, geo).items():
        if val > settings.metric_tol:
            raise ModelInvariantError(key, val, geo.point)


@dataclass
class TheoremRecord:
    point: np.ndarray
    h_sq: float
    grad_lnf_sq: float
    lap_lnf: float
    rhs: float
    margin: float


@dataclass
class TheoremVerdict:
    model: str
    records: list[TheoremRecord]
    verdict: str
    min_margin: float
    max_abs_margin: float
    equality: bool
    diagnostics: dict[str, float] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict != "violated"


def equality_diagnostics(model: ImmersionModel, geo: PointGeometry) -> dict[str, float]:
    """Residuals for the totally geodesic / umbilical / minimal characterisation."""
    n1, n2 = model.n1, model.n2
    h = geo.h
    geodesic = float(np.sqrt(np.sum(h[:n1, :n1] ** 2)))
    hp = h[n1:, n1:]
    mean = sum(hp[a, a] for a in range(n2)) / n2
    umb = hp - np.einsum("ab,k->abk", np.eye(n2), mean)
    trace = sum(h[r, r] for r in range(model.n))
    return {
        "dt_block_norm": geodesic,
        "dperp_umbilicity_residual": float(np.sqrt(np.sum(umb**2))),
        "mean_curvature_trace": float(np.linalg.norm(trace)),
    }


def check_warping_bound(model: ImmersionModel, points, settings: GeometrySettings = DEFAULT_SETTINGS) -> TheoremVerdict:
    """Pointwise comparison of ``|h|^2`` against the warping-function bound.

    The verdict is ``equality`` when every margin is within ``geo_tol`` of
    zero, ``strict`` when every margin exceeds it, ``holds`` for a mixture and
    ``violated`` when any margin is below ``-geo_tol``.
    """
    tol = settings.geo_tol
    records = []
    diag: dict[str, float] = {}
    for p in points:
        geo = analyze_point(model, p, settings)
        _verify_invariants(model, geo, settings)
        records.append(TheoremRecord(geo.point, geo.h_sq, geo.grad_lnf_sq, geo.lap_lnf, geo.rhs, geo.margin))
        for key, val in equality_diagnostics(model, geo).items():
            diag[key] = max(diag.get(key, 0.0), val)
    margins = np.array([r.margin for r in records])
    if np.any(margins < -tol):
        verdict = "violated"
    elif np.all(np.abs(margins) < tol):
        verdict = "equality"
    elif np.all(margins > tol):
        verdict = "strict"
    else:
        verdict = "holds"
    equality = verdict == "equality"
    return TheoremVerdict(
        model=model.name,
        records=records,
        verdict=verdict,
        min_margin=float(margins.min()),
        max_abs_margin=float(np.abs(margins).max()),
        equality=equality,
        diagnostics=diag if equality else {},
    )


check_theorem_4_2 = check_warping_bound  # name used by the operation catalog


def check_dt_minimality(model: ImmersionModel, points, settings: GeometrySettings = DEFAULT_SETTINGS) -> float:
    worst = 0.0
    for p in points:
        h = second_fundamental_form(model, p, settings).h
        trace = sum(h[i, i] for i in range(model.n1))
        worst = max(worst, float(np.linalg.norm(trace)))
    return worst


def h_on(geo: PointGeometry, u: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``h(u, w)`` for tangent vectors given in frame coordinates."""
    return np.einsum("r,s,rsk->k", u, w, geo.h)


def check_xi_relations(model: ImmersionModel, points, settings: GeometrySettings = DEFAULT_SETTINGS) -> dict[str, float]:
    worst = 0.0
    for p in points:
        geo = second_fundamental_form(model, p, settings)
        worst = max(worst, float(np.linalg.norm(h_on(geo, geo.xi_coords, geo.xi_coords))))
    return {"h_xi_xi_max": worst}


def normal_basis(geo: PointGeometry) -> np.ndarray:
    """Orthonormal basis (columns) of the normal space at a point."""
    frame = geo.tangent_frame
    proj = np.eye(frame.shape[0]) - frame @ frame.T
    lam, vecs = la.symmetric_eigen(0.5 * (proj + proj.T))
    k = frame.shape[0] - frame.shape[1]
    return vecs[:, :k]


def shape_operator(model: ImmersionModel, p, zeta, settings: GeometrySettings = DEFAULT_SETTINGS,
                   geo: PointGeometry | None = None) -> ShapeOperator:
    """Matrix of ``A_zeta`` in the tangent frame via ``<A X, Y> = <h(X, Y), zeta>``.

    ``reduced`` is the same form restricted to the orthogonal complement of
    the Reeb direction, an ``(n-1) x (n-1)`` symmetric matrix.
    """
    geo = geo if geo is not None else second_fundamental_form(model, p, settings)
    zeta = np.asarray(zeta, dtype=float)
    if abs(np.linalg.norm(zeta) - 1.0) > settings.proj_tol:
        raise GeometryError(f"normal direction must be a unit vector, |zeta| = {np.linalg.norm(zeta):.12g}")
    tangential = float(np.linalg.norm(geo.tangent_frame.T @ zeta))
    if tangential > settings.proj_tol:
        raise GeometryError(f"zeta is not normal at {tuple(geo.point)}: tangential residual {tangential:.3e}")
    mat = geo.h @ zeta
    mat = 0.5 * (mat + mat.T)
    xi = geo.xi_coords
    comp = np.eye(len(xi)) - np.outer(xi, xi)
    _, vecs = la.symmetric_eigen(0.5 * (comp + comp.T))
    basis = vecs[:, : len(xi) - 1]
    reduced = basis.T @ mat @ basis
    return ShapeOperator(zeta, mat, 0.5 * (reduced + reduced.T))


# ---------------------------------------------------------------------------
# catalog


def _flat_product(u):
    x, y, z, t = u
    return np.array([x, y, t, 0.0, z])


def _chen_cone(u):
    x, y, z, t = u
    c, s = math.cos(t), math.sin(t)
    return np.array([x * c, y * c, x * s, y * s, z])


def _circle_fiber(u):
    x, y, z, t = u
    return np.array([x, y, math.cos(t), math.sin(t), z])


def _holomorphic_fiber(u):
    x, y, z, t = u
    return np.array([x, t, y, 0.0, z])


def _one(q):
    return 1.0


def _radius(q):
    return math.hypot(q[0], q[1])


R5 = AmbientCosymplectic(m=2)


def builtin_models() -> dict[str, ImmersionModel]:
    unit_box = ((-1.0, 1.0),) * 4
    return {
        "flat-product": ImmersionModel(
            "flat-product", 3, 1, R5, unit_box, _flat_product, _one, xi_index=2,
            description="affine product (x, y, t, 0, z), f = 1",
        ),
        "chen-cone": ImmersionModel(
            "chen-cone", 3, 1, R5, ((0.5, 2.0), (-0.5, 0.5), (-1.0, 1.0), (0.2, 1.3)),
            _chen_cone, _radius, xi_index=2,
            description="(x cos t, y cos t, x sin t, y sin t, z), f = sqrt(x^2 + y^2)",
        ),
        "circle-fiber": ImmersionModel(
            "circle-fiber", 3, 1, R5, ((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0), (0.0, 3.0)),
            _circle_fiber, _one, xi_index=2,
            description="(x, y, cos t, sin t, z), f = 1",
        ),
    }


def holomorphic_fiber_model() -> ImmersionModel:
    """Negative control: the fiber direction is the phi-image of a first-factor one."""
    return ImmersionModel(
        "holomorphic-fiber", 3, 1, R5, ((-1.0, 1.0),) * 4, _holomorphic_fiber, _one, xi_index=2,
        description="(x, t, y, 0, z), fiber is phi-invariant partner of x",
    )


def get_model(name: str) -> ImmersionModel:
    models = builtin_models()
    try:
        return models[name]
    except KeyError:
        raise GeometryError(f"unknown model {name!r}; catalog: {', '.join(models)}") from None
