"""Seeded randomized verification campaigns.

Each sample draws from its own counter-based generator, keyed by the root
seed with the sample index in the counter, so any failing sample can be
re-run alone with :func:`run_sample`.  Samples may be evaluated on a
thread pool (``APT_NUM_THREADS``, 0 = serial); results are merged by index,
so reports do not depend on the thread count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import mpmath
import numpy as np

from .divergences import ialpha, kl_limit_probe
from .errors import AlphaProjError
from .geometry import (
    parallelogram_terms,
    pythagorean_report,
    r_combine,
    segment_divergence_derivative,
    segment_min_check,
    segment_projection,
)
from .measures import Density, WeightedSpace, as_alpha, kl_divergence, total_variation
from .projection import (
    ConstraintSet,
    SolverOptions,
    brute_force_project,
    iterated_projection_check,
    projection_characterization_check,
    project,
    uniqueness_probe,
)

SUITES = ("parallelogram", "pythagorean", "derivative", "limits", "projection")

DEFAULT_ALPHAS = {
    "parallelogram": (0.3, 0.5, 0.8, 1.5, 2.0, 4.0),
    "pythagorean": (0.5, 2.0),
    "derivative": (0.5, 2.0),
    "limits": (None,),
    "projection": (0.5, 2.0),
}

DEFAULT_SAMPLES = {
    "parallelogram": 1000,
    "pythagorean": 50,
    "derivative": 200,
    "limits": 100,
    "projection": 50,
}

# name -> (tolerance, "min" | "max"): for "min" a check passes when its
# metric is >= tol, for "max" when it is <= tol.
DEFAULT_TOLERANCES = {
    "gap_sign": -1e-10,
    "scale_side": -1e-12,
    "proof_identity": 1e-11,
    "mass": 1e-12,
    "certificate": -1e-6,
    "negative_control": -1e-4,
    "segment_equivalence": 0.0,
    "segment_equality": 1e-8,
    "iterated_gap": 1e-5,
    "derivative_rel_err": 1e-5,
    "monotone": 0.0,
    "kl_bound": 10.0,
    "value_diff": 1e-5,
    "tv_to_oracle": 1e-3,
    "uniqueness": 1e-6,
    "converged": 0.0,
}

_DIRECTION = {
    "gap_sign": "min",
    "scale_side": "min",
    "certificate": "min",
}

JENSEN_MARGIN = 1e-3
FD_STEP = 1e-5
MAX_FAILURES_LISTED = 20


def sample_generator(seed: int, index: int) -> np.random.Generator:
    """Independent stream for sample ``index`` of a campaign keyed by ``seed``."""
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, index, 0]))


def thread_count() -> int:
    raw = os.environ.get("APT_NUM_THREADS")
    if raw is None or raw.strip() == "":
        return min(4, os.cpu_count() or 1)
    n = int(raw)
    if n < 0:
        raise ValueError("APT_NUM_THREADS must be >= 0")
    return n


# -- sample generators ------------------------------------------------------

def _simplex(rng: np.random.Generator, n: int, floor: float = 0.0) -> np.ndarray:
    v = rng.dirichlet(np.ones(n))
    if floor:
        v = (1.0 - n * floor) * v + floor
    return v


def random_moment_instance(rng: np.random.Generator, n: int):
    """Reference density and a one-moment constraint set on ``n`` points."""
    space = WeightedSpace.counting(n)
    r = Density(space, _simplex(rng, n))
    stat = rng.normal(size=n)
    target = float(stat @ _simplex(rng, n))
    return r, ConstraintSet(space, [(stat, target)])


# -- per-sample checks ------------------------------------------------------
# Each returns {check_name: metric or None (skipped)}.

def _sign(alpha: float) -> float:
    return 1.0 if alpha < 1 else -1.0


def _parallelogram(rng, alpha, tol):
    n = int(rng.integers(2, 9))
    space = WeightedSpace.counting(n)
    p1, p2, r = (Density(space, _simplex(rng, n)) for _ in range(3))
    lam = float(rng.uniform())
    t = parallelogram_terms(p1, p2, r, lam, alpha)
    s = _sign(alpha)
    near_jensen = total_variation(p1, p2) < JENSEN_MARGIN
    r12 = r_combine(p1, p2, lam, alpha)
    return {
        "gap_sign": None if near_jensen else s * t.gap,
        "scale_side": s * (t.scale - 1.0),
        "proof_identity": abs(t.lhs - t.scale * t.rhs),
        "mass": abs(float(r12.values @ r12.weights) - 1.0),
    }


def _perturbed(q: np.ndarray, v: np.ndarray, tv: float):
    d = 0.5 * float(np.abs(v - q).sum())
    if d < tv:
        return None
    return q + (tv / d) * (v - q)


def _pythagorean(rng, alpha, tol):
    n = int(rng.integers(3, 6))
    r, e = random_moment_instance(rng, n)
    seed = int(rng.integers(2**32))
    opts = SolverOptions(n_restarts=4, n_cert=200, seed=seed)
    res = project(r, e, alpha, opts)
    out = {
        "converged": 0.0 if res.converged else 1.0,
        "certificate": res.worst_certificate,
    }
    # negative control: a feasible non-optimum at TV 0.01 from q
    v = e.sample(rng, 1)
    qt = _perturbed(res.q.values, v[0], 0.01) if v.shape[0] else None
    if qt is None:
        out["negative_control"] = None
    else:
        out["negative_control"] = projection_characterization_check(
            Density(r.space, qt), r, e, alpha, n_samples=200, seed=seed
        )
    # residual sign agrees with the segment condition, decisive cases only
    p = Density(r.space, e.sample(rng, 1)[0])
    mismatch = 0
    decided = 0
    for q in (res.q, Density(r.space, qt) if qt is not None else None):
        if q is None:
            continue
        resid = pythagorean_report(p, q, r, alpha).residual
        if math.isnan(resid) or abs(resid) <= 1e-6:
            continue
        decided += 1
        mismatch += int((resid >= 0) != segment_min_check(p, q, r, alpha))
    out["segment_equivalence"] = float(mismatch) if decided else None
    # both equalities at an interior minimizer over a segment
    space = WeightedSpace.counting(n)
    pp, ss, rr = (Density(space, _simplex(rng, n, 1e-3)) for _ in range(3))
    lam, qq = segment_projection(pp, ss, rr, alpha)
    if 1e-6 < lam < 1 - 1e-6:
        out["segment_equality"] = max(
            abs(pythagorean_report(pp, qq, rr, alpha).residual),
            abs(pythagorean_report(ss, qq, rr, alpha).residual),
        )
    else:
        out["segment_equality"] = None
    # iterated projections on nested affine families
    m = 5
    space = WeightedSpace.counting(m)
    r5 = Density(space, _simplex(rng, m, 0.02))
    c = 0.5 * r5.values + 0.5 * _simplex(rng, m, 0.02)
    s1, s2 = rng.normal(size=(2, m))
    e5 = ConstraintSet(space, [(s1, float(s1 @ c))])
    e51 = e5.restrict([(s2, float(s2 @ c))])
    it = iterated_projection_check(r5, e5, e51, alpha, SolverOptions(n_restarts=4, n_cert=0, seed=seed))
    interior = min(it.q.values.min(), it.q1.values.min()) > 1e-9
    out["iterated_gap"] = it.tv_gap if interior else None
    return out


def _mp_segment_f(p, q, r, alpha, lam):
    """I_f(P_lam', R') in multiprecision on a counting space."""
    a = mpmath.mpf(alpha)
    rho = (1 - a) / a
    sgn = 1 if alpha < 1 else -1
    v = [lam * pi + (1 - lam) * qi for pi, qi in zip(p, q)]
    sv = mpmath.fsum(x**a for x in v)
    sr = mpmath.fsum(x**a for x in r)
    return sgn * mpmath.fsum(
        (x**a / sv) ** (1 + rho) * (y**a / sr) ** (-rho) for x, y in zip(v, r)
    )


def fd_derivative(p: np.ndarray, q: np.ndarray, r: np.ndarray, alpha: float, h: float = FD_STEP) -> float:
    """One-sided third-order difference at lam = 0 with step ``h``."""
    with mpmath.workdps(40):
        P = [mpmath.mpf(float(x)) for x in p]
        Q = [mpmath.mpf(float(x)) for x in q]
        R = [mpmath.mpf(float(x)) for x in r]
        H = mpmath.mpf(h)
        f = [_mp_segment_f(P, Q, R, alpha, k * H) for k in range(4)]
        return float((-11 * f[0] + 18 * f[1] - 9 * f[2] + 2 * f[3]) / (6 * H))


def _derivative(rng, alpha, tol):
    n = int(rng.integers(2, 9))
    space = WeightedSpace.counting(n)
    p, q, r = (Density(space, _simplex(rng, n, 1e-3)) for _ in range(3))
    d = segment_divergence_derivative(p, q, r, alpha)
    fd = fd_derivative(p.values, q.values, r.values, alpha)
    return {"derivative_rel_err": abs(d - fd) / max(abs(fd), 1e-300)}


LIMIT_EPSILONS = (1e-2, 1e-3, 1e-4)


def _limits(rng, alpha, tol):
    n = int(rng.integers(2, 9))
    space = WeightedSpace.counting(n)
    p, q = (Density(space, _simplex(rng, n, 1e-3)) for _ in range(2))
    rows = kl_limit_probe(p, q, LIMIT_EPSILONS)
    below = [g for a, _, g in rows if a < 1]
    above = [g for a, _, g in rows if a > 1]
    steps = [b - a for side in (below, above) for a, b in zip(side, side[1:])]
    kl = kl_divergence(p, q)
    eps = LIMIT_EPSILONS[-1]
    return {
        "monotone": max(steps),
        "kl_bound": max(below[-1], above[-1]) / (eps * (1.0 + kl)),
    }


def _projection(rng, alpha, tol):
    n = int(rng.integers(3, 5))
    r, e = random_moment_instance(rng, n)
    seed = int(rng.integers(2**32))
    res = project(r, e, alpha, SolverOptions(seed=seed))
    oracle = brute_force_project(r, e, alpha, 1e-3, refine_to=1e-5)
    return {
        "converged": 0.0 if res.converged else 1.0,
        "value_diff": abs(res.value - ialpha(oracle, r, alpha)),
        "tv_to_oracle": total_variation(res.q, oracle),
        "uniqueness": uniqueness_probe(r, e, alpha, 16, seed=seed),
        "certificate": res.worst_certificate,
    }


_SAMPLERS: dict[str, Callable] = {
    "parallelogram": _parallelogram,
    "pythagorean": _pythagorean,
    "derivative": _derivative,
    "limits": _limits,
    "projection": _projection,
}


def _passes(name: str, metric: float, tol: dict) -> bool:
    if math.isnan(metric):
        return False
    if _DIRECTION.get(name) == "min":
        return metric >= tol[name]
    if name == "negative_control":
        return metric < tol[name]
    return metric <= tol[name]


# -- campaign driver --------------------------------------------------------

@dataclass(frozen=True)
class SampleOutcome:
    index: int
    alpha: float | None
    metrics: dict
    error: str | None = None


def run_sample(suite: str, seed: int, index: int, alpha: float | None, tolerances: dict | None = None) -> SampleOutcome:
    """Evaluate one campaign sample; the draw depends only on (seed, index)."""
    tol = {**DEFAULT_TOLERANCES, **(tolerances or {})}
    rng = sample_generator(seed, index)
    if alpha is not None:
        as_alpha(alpha)
    try:
        metrics = _SAMPLERS[suite](rng, alpha, tol)
    except AlphaProjError as exc:
        return SampleOutcome(index, alpha, {}, f"{type(exc).__name__}: {exc}")
    return SampleOutcome(index, alpha, metrics)


def run_campaign(
    suite: str,
    n_samples: int | None = None,
    seed: int = 0,
    alphas: Sequence[float] | None = None,
    tolerances: dict | None = None,
    threads: int | None = None,
) -> dict:
    """Run ``suite`` and return its report as a plain dictionary.

    The report lists, per check, how many samples were evaluated and
    skipped, how many violated the tolerance, the worst metric and the
    ``(seed, index, alpha)`` of the first failing samples.
    """
    if suite not in _SAMPLERS:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    tol = {**DEFAULT_TOLERANCES, **(tolerances or {})}
    unknown = set(tolerances or {}) - set(DEFAULT_TOLERANCES)
    if unknown:
        raise ValueError(f"unknown tolerance name(s): {sorted(unknown)}")
    n = DEFAULT_SAMPLES[suite] if n_samples is None else int(n_samples)
    if n < 1:
        raise ValueError("need at least one sample")
    alist = tuple(DEFAULT_ALPHAS[suite] if alphas is None or suite == "limits" else alphas)
    jobs = [(i, a) for a in alist for i in range(n)]
    threads = thread_count() if threads is None else threads

    def job(ia):
        return run_sample(suite, seed, ia[0], ia[1], tol)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(job, jobs))
    else:
        outcomes = [job(j) for j in jobs]

    checks: dict[str, dict] = {}
    errors = []
    for out in outcomes:
        if out.error is not None:
            errors.append({"seed": seed, "index": out.index, "alpha": out.alpha, "error": out.error})
            continue
        for name, metric in out.metrics.items():
            c = checks.setdefault(
                name,
                {"count": 0, "skipped": 0, "violations": 0, "worst": None,
                 "tolerance": tol[name], "failing": []},
            )
            if metric is None:
                c["skipped"] += 1
                continue
            c["count"] += 1
            lower_is_worse = _DIRECTION.get(name) == "min"
            if name == "negative_control":
                lower_is_worse = False
            w = c["worst"]
            if w is None or (metric < w if lower_is_worse else metric > w):
                c["worst"] = metric
            if not _passes(name, metric, tol):
                c["violations"] += 1
                if len(c["failing"]) < MAX_FAILURES_LISTED:
                    c["failing"].append({"seed": seed, "index": out.index, "alpha": out.alpha, "value": metric})
    total = sum(c["violations"] for c in checks.values()) + len(errors)
    return {
        "suite": suite,
        "seed": seed,
        "n_samples": n,
        "alphas": [a for a in alist if a is not None],
        "checks": dict(sorted(checks.items())),
        "errors": errors,
        "violations": total,
        "passed": total == 0,
    }
