"""Both sides of the harmonic-series and shape-operator matrix inequalities.

The ``*_sides`` functions evaluate an inequality literally and return its
sides without judging them.  :func:`run_audit` drives a registered check over
seeded random instances, records margins (``rhs - lhs``, positive when the
inequality holds) and optionally persists violating instances.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numba
import numpy as np

from . import linalg_core as la
from .linalg_core import Matrix
from .spectra_gen import GenSpec, generate, trial_seed

AUDIT_TOL = 1e-9
INTERPRETATIONS = ("floor_t1", "floor_tv", "dim")


class HypothesisViolation(ValueError):
    """Input lies outside the class an inequality is stated for."""


class UnknownCheck(KeyError):
    pass


# ---------------------------------------------------------------------------
# scalar harmonic bounds


@dataclass(frozen=True)
class HarmonicBounds:
    v: int
    sum_inv_sqrt: float
    lower: float
    upper: float

    @property
    def holds(self) -> bool:
        return self.lower < self.sum_inv_sqrt < self.upper


def _require_v(v: int) -> None:
    if v < 2:
        raise HypothesisViolation(f"v must be an integer > 1, got {v}")


def harmonic_inv_sqrt_bounds(v: int) -> HarmonicBounds:
    _require_v(v)
    s = math.fsum(1.0 / math.sqrt(k) for k in range(1, v + 1))
    return HarmonicBounds(v, s, 2.0 * math.sqrt(v + 1) - 2.0, 2.0 * math.sqrt(v) - 1.0)


def sqrt_sum_chain(v: int) -> tuple[float, float, float]:
    """``(sum sqrt(k), (sum k)(sum 1/sqrt(k)), v(v+1)(sqrt(v) - 0.5))``."""
    _require_v(v)
    sum_sqrt = math.fsum(math.sqrt(k) for k in range(1, v + 1))
    middle = (v * (v + 1) / 2) * harmonic_inv_sqrt_bounds(v).sum_inv_sqrt
    return sum_sqrt, middle, chain_cap(v)


def chain_cap(v: int) -> float:
    return v * (v + 1) * (math.sqrt(v) - 0.5)


@numba.njit(cache=True)
def _running_sums(v_max, power):
    # Neumaier-compensated prefix sums of k**power for k = 1..v_max.
    out = np.empty(v_max)
    s = 0.0
    c = 0.0
    for k in range(1, v_max + 1):
        x = float(k) ** power
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
        out[k - 1] = s + c
    return out


@dataclass(frozen=True)
class SweepResult:
    name: str
    v_min: int
    v_max: int
    checked: int
    failures: list[int]
    min_margins: dict[str, float]

    @property
    def passed(self) -> bool:
        return not self.failures


def harmonic_sweep(v_max: int, v_min: int = 2) -> SweepResult:
    """Check both strict harmonic bounds for every ``v`` in ``[v_min, v_max]``."""
    _require_v(v_min)
    s = _running_sums(v_max, -0.5)[v_min - 1 :]
    v = np.arange(v_min, v_max + 1, dtype=np.float64)
    lo = s - (2.0 * np.sqrt(v + 1) - 2.0)
    hi = (2.0 * np.sqrt(v) - 1.0) - s
    bad = np.nonzero((lo <= 0) | (hi <= 0))[0] + v_min
    return SweepResult(
        "harmonic", v_min, v_max, len(v), bad.tolist(),
        {"lower": float(lo.min()), "upper": float(hi.min())},
    )


def chain_sweep(v_max: int, v_min: int = 2) -> SweepResult:
    _require_v(v_min)
    sum_sqrt = _running_sums(v_max, 0.5)[v_min - 1 :]
    inv = _running_sums(v_max, -0.5)[v_min - 1 :]
    v = np.arange(v_min, v_max + 1, dtype=np.float64)
    middle = v * (v + 1) / 2 * inv
    cap = v * (v + 1) * (np.sqrt(v) - 0.5)
    first = middle - sum_sqrt
    second = cap - middle
    bad = np.nonzero((first < 0) | (second < 0))[0] + v_min
    return SweepResult(
        "chain", v_min, v_max, len(v), bad.tolist(),
        {"sum_le_middle": float(first.min()), "middle_le_cap": float(second.min())},
    )


@dataclass(frozen=True)
class WeightedHarmonicResult:
    v: int
    value: float
    lower_statement: float
    lower_proof: float
    upper: float

    @property
    def statement_holds(self) -> bool:
        return self.lower_statement < self.value < self.upper

    @property
    def proof_holds(self) -> bool:
        return self.lower_proof < self.value


def weighted_harmonic_bounds(xs) -> WeightedHarmonicResult:
    """Weighted sum ``sum x_k / sqrt(k)`` with its two-sided bounds.

    The lower bound is reported twice: with the ``v(v+1)(sqrt(v)-0.5)``
    denominator of the statement, and with the ``(v+1)(sqrt(v)-0.5)``
    denominator that the derivation actually produces.
    """
    xs = [float(x) for x in xs]
    v = len(xs)
    _require_v(v)
    if any(not x > 0 for x in xs):
        raise HypothesisViolation("weights must be strictly positive")
    value = math.fsum(x / math.sqrt(k) for k, x in enumerate(xs, start=1))
    lo, hi = min(xs), max(xs)
    root = math.sqrt(v) - 0.5
    return WeightedHarmonicResult(
        v=v,
        value=value,
        lower_statement=lo / (v * (v + 1) * root),
        lower_proof=lo / ((v + 1) * root),
        upper=v * (2.0 * math.sqrt(v) - 1.0) * hi,
    )


# ---------------------------------------------------------------------------
# matrix inequalities


def weighted_power_sum(a: Matrix) -> Matrix:
    """``sum_{k=1}^{v} sqrt(k) a^k`` with powers built by repeated products."""
    a = la.as_matrix(a)
    v = a.shape[0]
    power = a
    total = a.copy()
    for k in range(2, v + 1):
        power = la.multiply(power, a)
        total = total + math.sqrt(k) * power
    return total


def _require_pd(a: Matrix, what: str) -> int:
    a = la.as_matrix(a)
    if a.shape[0] != a.shape[1] or not la.is_symmetric(a):
        raise HypothesisViolation(f"{what} must be symmetric")
    if a.shape[0] < 2:
        raise HypothesisViolation(f"{what} must have dimension v > 1, got {a.shape[0]}")
    lam = la.min_eigenvalue(a)
    if lam <= la.PD_FLOOR:
        raise HypothesisViolation(f"{what} is not positive definite (min eigenvalue {lam:.3e})")
    return a.shape[0]


def t010_sides(a: Matrix) -> tuple[float, float]:
    """Weighted power-sum norm against its geometric-series bound.

    Requires a positive definite ``a`` with Hilbert-Schmidt norm below one,
    since the bound is singular or negative otherwise.
    """
    v = _require_pd(a, "A")
    u = la.hs_norm(a)
    if u >= 1.0:
        raise HypothesisViolation(f"hypothesis violation: ||A||_2 = {u:.6g} >= 1")
    lhs = la.hs_norm(weighted_power_sum(a))
    rhs = chain_cap(v) * (u - u ** (v + 1)) / (1.0 - u)
    return lhs, rhs


def c1_sides(a: Matrix) -> tuple[float, float]:
    v = _require_pd(a, "A")
    if not la.is_doubly_stochastic(a, 1e-8):
        raise HypothesisViolation("hypothesis violation: A is not doubly stochastic")
    lhs = la.hs_norm(weighted_power_sum(a))
    return lhs, v * chain_cap(v)


@dataclass(frozen=True)
class T0Sides:
    lower: float
    middle: float
    upper: float
    m: int

    @property
    def lower_margin(self) -> float:
        return self.middle - self.lower

    @property
    def upper_margin(self) -> float:
        return self.upper - self.middle


def summation_limit(t_a: np.ndarray, interpretation: str) -> int:
    v = len(t_a)
    if interpretation == "floor_t1":
        m = math.floor(t_a[0])
    elif interpretation == "floor_tv":
        m = math.floor(t_a[-1])
    elif interpretation == "dim":
        m = v
    else:
        raise ValueError(f"unknown interpretation {interpretation!r}; expected {INTERPRETATIONS}")
    return min(max(m, 1), v)


def t0_sides(x: Matrix, a: Matrix, interpretation: str = "floor_t1") -> T0Sides:
    """Sides of the ``t_k(X A^{-1/2})`` harmonic bound, unjudged.

    The statement leaves the index of the ``floor(t_k(A))`` summation limit
    free; ``interpretation`` picks it (largest singular value, smallest, or
    the dimension itself) and the same limit ``m`` replaces the floor and
    ceiling in both bounds.
    """
    v = _require_pd(x, "X")
    if _require_pd(a, "A") != v:
        raise HypothesisViolation(f"X and A differ in dimension: {x.shape} vs {a.shape}")
    t_a = la.svals(a)
    if math.floor(t_a[0]) > v:
        raise HypothesisViolation(f"hypothesis violation: floor(t_1(A)) = {math.floor(t_a[0])} > v = {v}")
    m = summation_limit(t_a, interpretation)
    t_x = la.svals(x)
    middle = math.fsum(la.svals(la.multiply(x, la.inverse_sqrt_pd(a)))[:m])
    lower = float(t_x[-1]) * (2.0 * math.sqrt(m + 1) - 2.0)
    upper = (2.0 * math.sqrt(m) - 1.0) * float(t_x[0])
    return T0Sides(lower, middle, upper, m)


def _random_orthonormal_columns(v: int, k: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((v, k)))
    return q * np.sign(np.diag(r))


def kyfan_variational_check(a: Matrix, k: int, tuples: int, seed: int) -> tuple[float, float, float]:
    """Sampled, exact and attained values of the Ky Fan variational form.

    Returns ``(best_sampled, svd_value, attained)`` where ``best_sampled`` is
    the best ``sum |y_j' a x_j|`` over ``tuples`` random orthonormal pairs and
    ``attained`` uses the top-``k`` singular vector pairs.
    """
    a = la.as_matrix(a)
    v = a.shape[0]
    if not 1 <= k <= v:
        raise la.LinalgError(f"Ky Fan index must lie in [1, {v}], got {k}")
    svd_value = la.kyfan_norm(a, k)
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(tuples):
        xs = _random_orthonormal_columns(v, k, rng)
        ys = _random_orthonormal_columns(v, k, rng)
        ax = la.multiply(a, xs)
        best = max(best, math.fsum(abs(float(ys[:, j] @ ax[:, j])) for j in range(k)))
    _, left, right = la.singular_triplets(a, k)
    ar = la.multiply(a, right)
    attained = math.fsum(abs(float(left[:, j] @ ar[:, j])) for j in range(k))
    return best, svd_value, attained


def fan_dominance(a: Matrix, b: Matrix, tol: float = AUDIT_TOL) -> bool:
    a = la.as_matrix(a)
    b = la.as_matrix(b)
    if a.shape != b.shape:
        raise la.LinalgError(f"dimension mismatch: {a.shape} vs {b.shape}")
    ta, tb = la.svals(a), la.svals(b)
    return bool(np.all(np.cumsum(ta) >= np.cumsum(tb) - tol))


# ---------------------------------------------------------------------------
# audit runner


@dataclass
class Trial:
    """Outcome of one audited instance."""

    margin: float
    instance: Matrix | None
    values: dict = field(default_factory=dict)
    side_margins: dict | None = None
    extras: dict = field(default_factory=dict)


@dataclass
class Violation:
    dim: int
    trial_index: int
    margin: float
    artifact_path: str | None
    sides: list[str] | None = None


@dataclass
class AuditReport:
    check_name: str
    dims: tuple[int, int]
    trials: int
    master_seed: int
    tolerance: float
    interpretation: str = ""
    min_margin: float | None = None
    violations: list[Violation] = field(default_factory=list)
    results: list[dict] = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def clean(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate_instance(check_name: str, instance: Matrix | None, seed: int = 0, **options) -> Trial:
    """Judge one instance (for example a persisted counterexample) with a registered check."""
    check = get_check(check_name)
    if check.deterministic:
        raise ValueError(f"check {check_name!r} has no matrix instance")
    instance = la.as_matrix(instance)
    dim = instance.shape[0] // check.operands
    return check.evaluate(instance, dim, seed, **options)


@dataclass(frozen=True)
class Check:
    """A registered audit.

    ``draw(dim, seed)`` builds the instance for one trial (two-operand checks
    pack their operands as a direct sum) and ``evaluate(instance, dim, seed,
    **options)`` judges it, so a persisted instance can be re-evaluated
    verbatim.  Deterministic checks have no instance.
    """

    name: str
    draw: Callable[[int, int], Matrix | None]
    evaluate: Callable[..., Trial]
    description: str
    deterministic: bool = False
    operands: int = 1


def _draw(kind: str, dim: int, seed: int, stream: int, **params) -> Matrix:
    return generate(GenSpec(dim, kind, trial_seed(seed, stream), params))


def _gaussian(dim: int, seed: int, stream: int) -> Matrix:
    return np.random.default_rng(trial_seed(seed, stream)).standard_normal((dim, dim))


def _pair(instance: Matrix) -> tuple[Matrix, Matrix]:
    a, b = la.split_direct_sum(instance, 2)
    return a, b


def _no_instance(dim, seed):
    return None


def _eval_harmonic(instance, dim, seed, **_):
    b = harmonic_inv_sqrt_bounds(dim)
    return Trial(min(b.sum_inv_sqrt - b.lower, b.upper - b.sum_inv_sqrt), None,
                 {"sum": b.sum_inv_sqrt, "lower": b.lower, "upper": b.upper})


def _eval_chain(instance, dim, seed, **_):
    s, mid, cap = sqrt_sum_chain(dim)
    return Trial(min(mid - s, cap - mid), None, {"sum_sqrt": s, "middle": mid, "cap": cap})


def _draw_weights(dim, seed):
    rng = np.random.default_rng(trial_seed(seed, 0))
    return (10.0 - rng.uniform(0.0, 10.0, dim))[None, :]  # (0, 10]


def _eval_weighted(instance, dim, seed, **_):
    r = weighted_harmonic_bounds(la.as_matrix(instance).ravel())
    margin = min(r.value - r.lower_statement, r.upper - r.value)
    return Trial(margin, instance, asdict(r), extras={"proof_margin": r.value - r.lower_proof})


def _eval_t010(instance, dim, seed, **_):
    lhs, rhs = t010_sides(instance)
    return Trial(rhs - lhs, instance, {"lhs": lhs, "rhs": rhs, "hs_norm": la.hs_norm(instance)})


def _eval_c1(instance, dim, seed, **_):
    lhs, rhs = c1_sides(instance)
    hs = la.hs_norm(instance)
    return Trial(rhs - lhs, instance, {"lhs": lhs, "rhs": rhs, "hs_norm": hs}, extras={"hs_norm": hs})


def _draw_t0(dim, seed):
    x = _draw("positive_definite", dim, seed, 0)
    a = _draw("positive_definite", dim, seed, 1, lam_max=float(dim))
    return la.direct_sum([x, a])


def _eval_t0(instance, dim, seed, interpretation="floor_t1", **_):
    x, a = _pair(instance)
    s = t0_sides(x, a, interpretation)
    sides = {"lower": s.lower_margin, "upper": s.upper_margin}
    return Trial(min(sides.values()), instance,
                 {"lower": s.lower, "middle": s.middle, "upper": s.upper, "m": s.m},
                 side_margins=sides)


def _draw_gaussian(dim, seed):
    return _gaussian(dim, seed, 0)


def _draw_gaussian_pair(dim, seed):
    return la.direct_sum([_gaussian(dim, seed, 0), _gaussian(dim, seed, 1)])


def _eval_kyfan(instance, dim, seed, tuples=32, **_):
    a = la.as_matrix(instance)
    k = int(np.random.default_rng(trial_seed(seed, 1)).integers(1, a.shape[0] + 1))
    best, svd_value, attained = kyfan_variational_check(a, k, tuples, trial_seed(seed, 2))
    # the attained value must match to 1e-8; fold a miss into the margin
    gap = abs(attained - svd_value)
    margin = svd_value - best if gap < 1e-8 else -gap
    return Trial(margin, a, {"k": k, "best_sampled": best, "svd_value": svd_value, "attained": attained})


def _eval_fan_dominance(instance, dim, seed, **_):
    a, b = _pair(instance)
    single = fan_dominance(a, b)
    doubled = fan_dominance(la.direct_sum([a, a]), la.direct_sum([b, b]))
    return Trial(1.0 if single == doubled else -1.0, instance, {"single": single, "doubled": doubled})


def _draw_weyl(dim, seed):
    b = _draw("symmetric", dim, seed, 0)
    g = _gaussian(dim, seed, 1)
    p = la.multiply(g, la.adjoint(g))
    return la.direct_sum([b, 0.5 * (p + p.T)])


def _eval_weyl(instance, dim, seed, **_):
    b, p = _pair(instance)
    if not la.psd_order(p, np.zeros_like(p)).holds:
        raise HypothesisViolation("perturbation is not positive semidefinite")
    lb = la.eigenvalues_symmetric(b)
    lbp = la.eigenvalues_symmetric(b + p)
    return Trial(float(np.min(lbp - lb)), instance)


def _eval_submult(instance, dim, seed, **_):
    x, y = _pair(instance)
    lhs = la.svals(la.multiply(x, y))
    rhs = la.svals(x)[0] * la.svals(y)
    return Trial(float(np.min(rhs - lhs)), instance)


def abs_symmetric(a: Matrix) -> Matrix:
    lam, q = la.symmetric_eigen(a)
    out = la.multiply(q * np.abs(lam), la.adjoint(q))
    return 0.5 * (out + out.T)


def _draw_pm_order(dim, seed):
    a = _draw("symmetric", dim, seed, 0)
    g = _gaussian(dim, seed, 1)
    p = la.multiply(g, la.adjoint(g))
    return la.direct_sum([a, abs_symmetric(a) + 0.5 * (p + p.T)])


def _eval_pm_order(instance, dim, seed, **_):
    a, b = _pair(instance)
    if not (la.psd_order(b, a).holds and la.psd_order(b, -a).holds):
        raise HypothesisViolation("B does not dominate +-A")
    v = a.shape[0]
    t_a = la.svals(a)
    t_bb = la.svals(la.direct_sum([b, b]))[:v]
    return Trial(float(np.min(t_bb - t_a)), instance)


def _draw_symmetric_pair(dim, seed):
    return la.direct_sum([_draw("symmetric", dim, seed, 0), _draw("symmetric", dim, seed, 1)])


def _eval_ab_ba(instance, dim, seed, **_):
    a, b = _pair(instance)
    v = a.shape[0]
    ab = la.multiply(a, b)
    lhs = la.svals(ab + la.adjoint(ab))
    sq = la.multiply(a, a) + la.multiply(b, b)
    rhs = la.svals(la.direct_sum([sq, sq]))[:v]
    return Trial(float(np.min(rhs - lhs)), instance)


def _eval_unitary_invariance(instance, dim, seed, **_):
    a = la.as_matrix(instance)
    v = a.shape[0]
    u = _draw("orthogonal", v, seed, 1)
    w = _draw("orthogonal", v, seed, 2)
    diff = np.max(np.abs(la.svals(la.multiply(la.multiply(u, a), w)) - la.svals(a)))
    return Trial(-float(diff), a)


def _eval_hs_identity(instance, dim, seed, **_):
    a = la.as_matrix(instance)
    hs2 = la.hs_norm(a) ** 2
    diff = abs(hs2 - math.fsum(la.svals(a) ** 2)) / max(hs2, 1.0)
    return Trial(-diff, a)


def _eval_direct_sum(instance, dim, seed, **_):
    a, b = _pair(instance)
    v = a.shape[0]
    merged = np.sort(np.concatenate([la.svals(a), la.svals(b)]))[::-1]
    block = np.zeros((2 * v, 2 * v))
    block[:v, v:] = b
    block[v:, :v] = a.T
    diff = max(np.max(np.abs(la.svals(la.direct_sum([a, b])) - merged)),
               np.max(np.abs(la.svals(block) - merged)))
    return Trial(-float(diff), instance)


CHECKS: dict[str, Check] = {
    c.name: c
    for c in (
        Check("harmonic", _no_instance, _eval_harmonic,
              "strict bounds on sum 1/sqrt(k) at v = dim", deterministic=True),
        Check("chain", _no_instance, _eval_chain,
              "sum sqrt(k) <= (sum k)(sum 1/sqrt(k)) <= v(v+1)(sqrt(v)-0.5)", deterministic=True),
        Check("weighted_harmonic", _draw_weights, _eval_weighted,
              "weighted harmonic bounds on random positive weights"),
        Check("t010", lambda d, s: _draw("pd_hs_contraction", d, s, 0), _eval_t010,
              "weighted power-sum bound, PD with ||A||_2 < 1"),
        Check("c1", lambda d, s: _draw("pd_doubly_stochastic", d, s, 0), _eval_c1,
              "weighted power-sum bound, PD doubly stochastic"),
        Check("t0", _draw_t0, _eval_t0,
              "t_k(X A^-1/2) harmonic bounds (per interpretation)", operands=2),
        Check("kyfan", _draw_gaussian, _eval_kyfan, "Ky Fan variational form vs singular values"),
        Check("fan_dominance", _draw_gaussian_pair, _eval_fan_dominance,
              "Fan dominance is preserved by doubling", operands=2),
        Check("weyl", _draw_weyl, _eval_weyl, "Weyl monotonicity under PSD perturbation", operands=2),
        Check("submult", _draw_gaussian_pair, _eval_submult, "t_j(XY) <= t_1(X) t_j(Y)", operands=2),
        Check("pm_order", _draw_pm_order, _eval_pm_order,
              "+-A <= B implies t_j(A) <= t_j(B (+) B)", operands=2),
        Check("ab_ba", _draw_symmetric_pair, _eval_ab_ba,
              "t_j(AB+BA) <= t_j((A^2+B^2) (+) (A^2+B^2))", operands=2),
        Check("unitary_invariance", _draw_gaussian, _eval_unitary_invariance,
              "singular values invariant under orthogonal factors"),
        Check("hs_identity", _draw_gaussian, _eval_hs_identity, "||A||_2^2 = sum t_j^2"),
        Check("direct_sum", _draw_gaussian_pair, _eval_direct_sum,
              "singular values of direct sums and antidiagonal blocks", operands=2),
    )
}


def get_check(name: str) -> Check:
    try:
        return CHECKS[name]
    except KeyError:
        raise UnknownCheck(f"unknown check {name!r}; registered: {', '.join(CHECKS)}") from None


def artifact_label(check_name: str, interpretation: str = "") -> str:
    return f"{check_name}-{interpretation}" if interpretation else check_name


def run_audit(
    check_name: str,
    dims: tuple[int, int],
    trials: int,
    master_seed: int,
    tolerance: float = AUDIT_TOL,
    *,
    interpretation: str = "",
    artifact_dir: str | Path | None = None,
    **options,
) -> AuditReport:
    """Run ``trials`` seeded instances of a check for every dim in ``dims``.

    ``dims`` is an inclusive range.  Deterministic checks are evaluated once
    per dimension.  Trial ``i`` at dimension ``d`` draws from the stream
    ``(master_seed, d, i)`` only, so the report does not depend on execution
    order.  Violating instances are written to ``artifact_dir`` as
    ``<check>_<dim>_<trial>.mat`` when a directory is given.
    """
    check = get_check(check_name)
    if check_name == "t0":
        interpretation = interpretation or "floor_t1"
        if interpretation not in INTERPRETATIONS:
            raise ValueError(f"unknown interpretation {interpretation!r}; expected {INTERPRETATIONS}")
        options["interpretation"] = interpretation
    else:
        interpretation = ""
    d_lo, d_hi = dims
    if d_lo < 2 or d_hi < d_lo:
        raise HypothesisViolation(f"dims must satisfy 2 <= lo <= hi, got {d_lo}..{d_hi}")
    if trials < 0:
        raise ValueError("trials must be non-negative")

    report = AuditReport(check_name, (d_lo, d_hi), 0, int(master_seed), tolerance, interpretation)
    label = artifact_label(check_name, interpretation)
    out_dir = Path(artifact_dir) if artifact_dir is not None else None
    side_counts: dict[str, int] = {}
    extras_acc: dict[str, list] = {}

    per_dim = min(trials, 1) if check.deterministic else trials
    for dim in range(d_lo, d_hi + 1):
        for i in range(per_dim):
            seed = trial_seed(master_seed, dim, i)
            t = check.evaluate(check.draw(dim, seed), dim, seed, **options)
            report.trials += 1
            row = {"dim": dim, "trial": i, "margin": t.margin, **t.values}
            if t.side_margins is not None:
                row["side_margins"] = t.side_margins
            report.results.append(row)
            for key, val in t.extras.items():
                extras_acc.setdefault(key, []).append(val)
            if report.min_margin is None or t.margin < report.min_margin:
                report.min_margin = t.margin
            if t.margin < -tolerance:
                sides = None
                if t.side_margins is not None:
                    sides = [s for s, m in t.side_margins.items() if m < -tolerance]
                    for s in sides:
                        side_counts[s] = side_counts.get(s, 0) + 1
                path = None
                if out_dir is not None and t.instance is not None:
                    out_dir.mkdir(parents=True, exist_ok=True)
                    path = str(la.write_matrix(out_dir / f"{label}_{dim}_{i}.mat", t.instance))
                report.violations.append(Violation(dim, i, t.margin, path, sides))

    if "hs_norm" in extras_acc:
        report.extras["max_hs_norm"] = max(extras_acc["hs_norm"])
        report.extras["identity_hs_norm"] = {d: math.sqrt(d) for d in range(d_lo, d_hi + 1)}
    if "proof_margin" in extras_acc:
        pm = extras_acc["proof_margin"]
        report.extras["proof_bound_violations"] = sum(1 for m in pm if m <= -tolerance)
        report.extras["proof_bound_min_margin"] = min(pm)
    if check_name == "t0":
        report.extras["side_violations"] = {"lower": side_counts.get("lower", 0),
                                            "upper": side_counts.get("upper", 0)}
    return report


def t0_verdict_table(
    dims: tuple[int, int],
    trials: int,
    master_seed: int,
    tolerance: float = AUDIT_TOL,
    artifact_dir: str | Path | None = None,
) -> dict[str, dict[str, int]]:
    """Violation counts per interpretation and side for the ``t0`` check."""
    table = {}
    for interp in INTERPRETATIONS:
        rep = run_audit("t0", dims, trials, master_seed, tolerance,
                        interpretation=interp, artifact_dir=artifact_dir)
        table[interp] = dict(rep.extras["side_violations"], trials=rep.trials)
    return table
