"""The invariant mean of a composed mapping, by convergent iteration.

Iterating a mean-type mapping never widens the bracket: min(M^n(x)) is
nondecreasing and max(M^n(x)) is nonincreasing in n, so the oscillation
max - min of the iterates can only shrink.  When it shrinks to zero the
iterates converge to a constant vector (K(x), ..., K(x)); K is the
unique mean invariant under the mapping, and the midpoint of the final
bracket estimates K(x) with certified radius oscillation/2 regardless
of the convergence speed.

`invariant_mean_eval` runs that iteration.  Non-convergence (periodic or
disconnected incidence structure) is a structured report, never an
exception, so callers can inspect the final iterate.  When the full
sequence has several cluster points, `subsequence_limits` follows each
residue class modulo m separately with a per-coordinate Cauchy test,
which handles limits that are not constant vectors.

The verification helpers (`verify_invariance`, `verify_mean_properties`,
`solve_invariant_equation`) are sampling falsifiers in the same spirit
as `check_mean_property`: violations are data with witnesses, and a
clean sweep is evidence, not proof.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random
from typing import Callable, Sequence

from .averaging import (
    CERTIFIED,
    ComposedMapping,
    certify_uniform_weak_contractivity,
    is_constant_vector,
    oscillation,
)
from .errors import ConvergenceError, PreconditionError, ValidationError
from .means import sample_box

__all__ = [
    "ConvergenceReport",
    "ResidueLimit",
    "SubsequenceLimits",
    "Witness",
    "CheckReport",
    "SolveReport",
    "invariant_mean_eval",
    "limit_mapping_eval",
    "subsequence_limits",
    "verify_invariance",
    "verify_mean_properties",
    "solve_invariant_equation",
    "check_oscillation_monotonicity",
    "check_bracket_dichotomy",
]

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10_000


@dataclass(frozen=True)
class ConvergenceReport:
    """Result of iterating toward the invariant mean from one start point.

    value is the midpoint of [min, max] of the final iterate (None when
    not converged) and error_radius is half its oscillation, a rigorous
    enclosure radius thanks to the monotone bracket.
    """

    value: float | None
    error_radius: float
    iterations_used: int
    converged: bool
    final_iterate: tuple[float, ...]

    def to_json_dict(self) -> dict:
        return {
            "value": self.value,
            "error_radius": self.error_radius,
            "iterations_used": self.iterations_used,
            "converged": self.converged,
            "final_iterate": list(self.final_iterate),
        }


@dataclass(frozen=True)
class ResidueLimit:
    """Limit estimate of the iterates with index == r (mod modulus)."""

    point: tuple[float, ...]
    converged: bool


@dataclass(frozen=True)
class SubsequenceLimits:
    """Per-residue limits of the iteration modulo `modulus`.

    Applying the mapping to limits[r] lands on limits[(r+1) % modulus]
    (up to tolerance) whenever the flags are set.
    """

    modulus: int
    limits: tuple[ResidueLimit, ...]

    @property
    def all_converged(self) -> bool:
        return all(entry.converged for entry in self.limits)

    def to_json_dict(self) -> dict:
        return {
            "modulus": self.modulus,
            "limits": [
                {"point": list(entry.point), "converged": entry.converged}
                for entry in self.limits
            ],
        }


@dataclass(frozen=True)
class Witness:
    """A sampled point that violated a checked property."""

    point: tuple[float, ...]
    message: str

    def __str__(self) -> str:
        return f"x={self.point}: {self.message}"


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one sampling verification sweep."""

    name: str
    n_samples: int
    n_evaluated: int
    n_skipped: int
    max_residual: float
    violations: tuple[Witness, ...]
    notes: str = ""

    @property
    def passed(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class SolveReport:
    """Outcome of testing F = phi(K(.)) by sampling."""

    verdict: str  # "invariant", "not invariant", or "inconclusive"
    max_residual: float
    n_evaluated: int
    n_skipped: int
    violations: tuple[Witness, ...]


def _effective_tol(tol: float, x0: Sequence[float]) -> float:
    # absolute tolerance scaled by the magnitude of the start vector
    return tol * max(1.0, abs(max(x0)))


def invariant_mean_eval(
    m: ComposedMapping,
    x: Sequence[float],
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    stall_window: int | None = None,
) -> ConvergenceReport:
    """Iterate until the oscillation drops below 2*tol*scale or limits hit.

    scale is max(1, |max(x)|); the reported error_radius is therefore at
    most tol*scale on convergence.  The oscillation is nonincreasing, so
    a window over which it fails to shrink (stall_window steps, default
    max(200, 2*3^p), 0 disables) proves practical stagnation and ends the
    run early with converged=False; periodic and disconnected structures
    are reported this way instead of burning max_iter.
    """
    if tol <= 0.0:
        raise ValidationError(f"tol must be > 0, got {tol!r}")
    if max_iter < 1:
        raise ValidationError(f"max_iter must be >= 1, got {max_iter!r}")
    xs = m._validate_point(x)
    threshold = 2.0 * _effective_tol(tol, xs)
    window = stall_window if stall_window is not None else max(200, 2 * 3 ** m.p)
    y = xs
    osc = oscillation(y)
    n = 0
    anchor_osc = osc
    anchor_n = 0
    while osc >= threshold and n < max_iter:
        y = m.apply(y)
        n += 1
        osc = oscillation(y)
        if window and n - anchor_n >= window:
            if osc > anchor_osc * (1.0 - 1e-12):
                break  # stalled: no measurable shrink across the window
            anchor_osc = osc
            anchor_n = n
    converged = osc < threshold
    value = 0.5 * (min(y) + max(y)) if converged else None
    return ConvergenceReport(
        value=value,
        error_radius=0.5 * osc,
        iterations_used=n,
        converged=converged,
        final_iterate=y,
    )


def limit_mapping_eval(
    m: ComposedMapping,
    x: Sequence[float],
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> tuple[float, ...]:
    """The constant vector (K(x), ..., K(x)); raises ConvergenceError when
    the iteration does not settle."""
    report = invariant_mean_eval(m, x, tol=tol, max_iter=max_iter)
    if not report.converged or report.value is None:
        raise ConvergenceError(
            f"no common limit within {report.iterations_used} iterations "
            f"(final oscillation {2 * report.error_radius:g}); "
            "the incidence graph is likely not ergodic"
        )
    return (report.value,) * m.p


def subsequence_limits(
    m: ComposedMapping,
    x: Sequence[float],
    modulus: int,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> SubsequenceLimits:
    """Limits of the iterate subsequences with index == r (mod modulus).

    Each residue class is tested separately: it converges when two
    consecutive same-residue iterates agree coordinatewise within
    tol*scale twice in a row.  Unlike the oscillation test this admits
    limits that are nonconstant vectors, as a periodic incidence graph
    produces.  Residues that never settle are flagged, not fatal.
    """
    if not isinstance(modulus, int) or modulus < 1:
        raise ValidationError(f"modulus must be a positive integer, got {modulus!r}")
    if max_iter < modulus:
        raise ValidationError(f"max_iter={max_iter} cannot cover modulus={modulus}")
    xs = m._validate_point(x)
    thr = _effective_tol(tol, xs)
    last: list[tuple[float, ...] | None] = [None] * modulus
    stable = [0] * modulus
    converged = [False] * modulus
    last[0] = xs
    y = xs
    n = 0
    while n < max_iter and not all(converged):
        y = m.apply(y)
        n += 1
        r = n % modulus
        prev = last[r]
        if prev is not None:
            diff = max(abs(a - b) for a, b in zip(y, prev))
            if diff < thr:
                stable[r] += 1
                if stable[r] >= 2:
                    converged[r] = True
            else:
                stable[r] = 0
        last[r] = y
    entries = []
    for r in range(modulus):
        point = last[r]
        if point is None:  # max_iter < first visit of this residue
            point = xs
        entries.append(ResidueLimit(point=point, converged=converged[r]))
    return SubsequenceLimits(modulus=modulus, limits=tuple(entries))


def _nonconstant_samples(
    m: ComposedMapping, rng: Random, n_samples: int, min_spread: float = 0.05
) -> list[tuple[float, ...]]:
    if m.p < 2:
        return []  # every vector in I^1 is constant
    lo, hi = sample_box(m.interval)
    pts = []
    while len(pts) < n_samples:
        x = tuple(rng.uniform(lo, hi) for _ in range(m.p))
        if max(x) - min(x) >= min_spread * (hi - lo):
            pts.append(x)
    return pts


def verify_invariance(
    m: ComposedMapping,
    tol: float = 1e-9,
    rng: Random | None = None,
    n_samples: int = 100,
) -> CheckReport:
    """Check K(M(x)) = K(x) on samples, both sides from the iteration.

    Samples where either side fails to converge are skipped and counted;
    the report carries the max residual over the evaluated ones.
    """
    rng = rng if rng is not None else Random(0)
    samples = _nonconstant_samples(m, rng, n_samples)
    violations = []
    worst = 0.0
    evaluated = 0
    skipped = 0
    for x in samples:
        r_x = invariant_mean_eval(m, x)
        r_mx = invariant_mean_eval(m, m.apply(x))
        if not (r_x.converged and r_mx.converged):
            skipped += 1
            continue
        evaluated += 1
        residual = abs(r_x.value - r_mx.value)
        worst = max(worst, residual)
        if residual > _effective_tol(tol, x):
            violations.append(
                Witness(x, f"|K(M(x)) - K(x)| = {residual:.3e} exceeds {tol:g}*scale")
            )
    return CheckReport(
        name="invariance",
        n_samples=len(samples),
        n_evaluated=evaluated,
        n_skipped=skipped,
        max_residual=worst,
        violations=tuple(violations),
    )


_PROPERTY_DEFAULT_TOL = {"strict": 1e-9, "monotone": 1e-9, "homogeneous": 1e-10}
_HOMOGENEITY_FACTORS = (0.5, 2.0, 10.0)


def verify_mean_properties(
    m: ComposedMapping,
    which: str,
    rng: Random | None = None,
    n_samples: int = 200,
    tol: float | None = None,
) -> CheckReport:
    """Sampled falsification of a property of the invariant mean K.

    which selects one of:
      * "strict"      -- min(x) < K(x) < max(x) on nonconstant x; besides
        random points this probes each coordinate alone (constant vector
        with a single bumped entry), the pattern that exposes coordinates
        K does not depend on.
      * "monotone"    -- bumping one coordinate by +0.1 never lowers K.
      * "homogeneous" -- K(c*x) = c*K(x) for c in {0.5, 2, 10}, relative.

    The corresponding flag must be asserted on every component mean (and
    homogeneity additionally needs the domain (0, +inf)); otherwise the
    hypothesis is absent and a PreconditionError is raised.  Samples where
    the iteration does not converge are skipped and counted.
    """
    if which not in _PROPERTY_DEFAULT_TOL:
        raise ValidationError(f"unknown property {which!r}")
    rng = rng if rng is not None else Random(0)
    tol = _PROPERTY_DEFAULT_TOL[which] if tol is None else tol
    missing = [
        mean.label for mean in m.base.means if not getattr(mean.flags, which)
    ]
    if missing:
        raise PreconditionError(
            f"{which} flag not asserted for {', '.join(sorted(set(missing)))}"
        )
    if which == "homogeneous":
        iv = m.interval
        if not (iv.lower == 0.0 and iv.lower_open and iv.upper == float("inf")):
            raise PreconditionError(f"homogeneity needs the domain (0, +inf), got {iv}")

    lo, hi = sample_box(m.interval)
    mid = 0.5 * (lo + hi)
    violations = []
    worst = 0.0
    evaluated = 0
    skipped = 0

    def _converged_value(x):
        rep = invariant_mean_eval(m, x)
        return (rep.value, rep.error_radius) if rep.converged else (None, None)

    if which == "strict":
        structured = [
            (tuple(mid * 1.3 if i == k else mid for i in range(m.p)), k + 1)
            for k in range(m.p)
        ]
        samples = structured + [(x, None) for x in _nonconstant_samples(m, rng, n_samples)]
        for x, bumped in samples:
            if min(x) == max(x):  # p = 1: strictness is vacuous
                continue
            value, radius = _converged_value(x)
            if value is None:
                skipped += 1
                continue
            evaluated += 1
            margin = 2.0 * radius + _effective_tol(1e-12, x)
            gap = min(value - min(x), max(x) - value)
            worst = max(worst, -gap)
            if gap <= margin:
                where = f" (only coordinate {bumped} varied)" if bumped else ""
                violations.append(
                    Witness(
                        x,
                        f"K(x)={value!r} not strictly inside "
                        f"[{min(x)!r}, {max(x)!r}]{where}",
                    )
                )
    elif which == "monotone":
        step = 0.1
        samples = _nonconstant_samples(m, rng, n_samples)
        for idx, x in enumerate(samples):
            k = idx % m.p
            bumped = x[k] + step
            if not m.interval.contains(bumped):
                continue
            y = tuple(bumped if i == k else t for i, t in enumerate(x))
            v_x, r_x = _converged_value(x)
            v_y, r_y = _converged_value(y)
            if v_x is None or v_y is None:
                skipped += 1
                continue
            evaluated += 1
            drop = v_x - v_y
            worst = max(worst, drop)
            if drop > r_x + r_y + _effective_tol(1e-12, x):
                violations.append(
                    Witness(x, f"K decreased by {drop:.3e} after +{step} on coordinate {k + 1}")
                )
    else:  # homogeneous
        samples = _nonconstant_samples(m, rng, n_samples)
        for x in samples:
            v_x, r_x = _converged_value(x)
            if v_x is None:
                skipped += 1
                continue
            for c in _HOMOGENEITY_FACTORS:
                cx = tuple(c * t for t in x)
                v_cx, r_cx = _converged_value(cx)
                if v_cx is None:
                    skipped += 1
                    continue
                evaluated += 1
                residual = abs(v_cx - c * v_x)
                rel = residual / abs(c * v_x)
                worst = max(worst, rel)
                if residual > tol * abs(c * v_x) + c * r_x + r_cx:
                    violations.append(
                        Witness(x, f"|K({c}x) - {c}K(x)| = {residual:.3e} (relative {rel:.3e})")
                    )
    return CheckReport(
        name=which,
        n_samples=len(samples),
        n_evaluated=evaluated,
        n_skipped=skipped,
        max_residual=worst,
        violations=tuple(violations),
    )


def check_oscillation_monotonicity(
    m: ComposedMapping,
    rng: Random | None = None,
    n_samples: int = 200,
    n_steps: int = 50,
    slack: float = 1e-15,
) -> CheckReport:
    """Along every sampled trace, min(M^n(x)) must be nondecreasing and
    max(M^n(x)) nonincreasing in n.

    This holds exactly in real arithmetic, and means that round toward
    the bracket keep it exact in floating point too; the slack is a
    one-ulp allowance, not a modelling tolerance.
    """
    rng = rng if rng is not None else Random(0)
    samples = _nonconstant_samples(m, rng, n_samples)
    violations = []
    worst = 0.0
    for x in samples:
        trace = m.iterate(x, n_steps)
        prev_min = min(trace[0])
        prev_max = max(trace[0])
        for k in range(1, len(trace)):
            cur_min = min(trace[k])
            cur_max = max(trace[k])
            drop = prev_min - cur_min  # > 0 means the bracket widened
            rise = cur_max - prev_max
            worst = max(worst, drop, rise)
            if drop > slack or rise > slack:
                violations.append(
                    Witness(
                        x,
                        f"bracket widened at step {k}: min dropped {drop:.3e}, "
                        f"max rose {rise:.3e}",
                    )
                )
                break
            prev_min = cur_min
            prev_max = cur_max
    return CheckReport(
        name="oscillation-monotonicity",
        n_samples=len(samples),
        n_evaluated=len(samples),
        n_skipped=0,
        max_residual=worst,
        violations=tuple(violations),
    )


def check_bracket_dichotomy(
    m: ComposedMapping,
    rng: Random | None = None,
    n_samples: int = 100,
) -> CheckReport:
    """After n0 = 3^p steps, a nonconstant start vector must either have
    collapsed to a constant vector or sit strictly inside its starting
    bracket: min(x) < min(M^n0(x)) <= max(M^n0(x)) < max(x).

    This is the sampled form of the dichotomy that underlies the n0 = 3^p
    certificate; run it on certified mappings.
    """
    rng = rng if rng is not None else Random(0)
    n0 = 3 ** m.p
    samples = _nonconstant_samples(m, rng, n_samples)
    violations = []
    worst = 0.0
    for x in samples:
        y = x
        for _ in range(n0):
            y = m.apply(y)
        if is_constant_vector(y):
            continue
        low_gap = min(y) - min(x)
        high_gap = max(x) - max(y)
        worst = max(worst, -low_gap, -high_gap)
        if low_gap <= 0.0 or high_gap <= 0.0:
            violations.append(
                Witness(
                    x,
                    f"M^{n0}(x) neither constant nor strictly inside the bracket: "
                    f"min gap {low_gap:.3e}, max gap {high_gap:.3e}",
                )
            )
    return CheckReport(
        name="bracket-dichotomy",
        n_samples=len(samples),
        n_evaluated=len(samples),
        n_skipped=0,
        max_residual=worst,
        violations=tuple(violations),
    )


def solve_invariant_equation(
    f: Callable[[Sequence[float]], float],
    m: ComposedMapping,
    tol: float = 1e-9,
    rng: Random | None = None,
    n_samples: int = 100,
) -> tuple[Callable[[float], float], SolveReport]:
    """Solve F = phi(K(.)) for a diagonal-continuous F, or refute it.

    The unique candidate is phi(t) := F(t, ..., t), the restriction of F
    to the diagonal; F is invariant under the mapping exactly when
    F(x) = phi(K(x)) for all x.  The returned report holds the sampled
    verdict with the max residual and any witness.  Requires a certified
    uniformly-weak-contractive mapping (else K and with it phi would not
    be grounded).
    """
    cert = certify_uniform_weak_contractivity(m)
    if cert.status != CERTIFIED:
        raise PreconditionError(
            f"mapping not certified uniformly weak contractive: {cert.evidence}"
        )
    rng = rng if rng is not None else Random(0)
    p = m.p

    def phi(t: float) -> float:
        return f((t,) * p)

    samples = _nonconstant_samples(m, rng, n_samples)
    violations = []
    worst = 0.0
    evaluated = 0
    skipped = 0
    for x in samples:
        rep = invariant_mean_eval(m, x)
        if not rep.converged:
            skipped += 1
            continue
        evaluated += 1
        lhs = float(f(x))
        rhs = float(phi(rep.value))
        residual = abs(lhs - rhs)
        worst = max(worst, residual)
        if residual > tol * max(1.0, abs(lhs)):
            violations.append(
                Witness(x, f"|F(x) - phi(K(x))| = {residual:.3e}: F(x)={lhs!r}, phi(K(x))={rhs!r}")
            )
    if evaluated == 0:
        verdict = "inconclusive"
    elif violations:
        verdict = "not invariant"
    else:
        verdict = "invariant"
    return phi, SolveReport(
        verdict=verdict,
        max_residual=worst,
        n_evaluated=evaluated,
        n_skipped=skipped,
        violations=tuple(violations),
    )
