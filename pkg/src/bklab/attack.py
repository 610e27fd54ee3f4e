"""Adaptive metric-choosing adversary.

The adversary sees the classifier only through a query oracle and the
public encryption handles.  It walks the features in order, keeping a flip
of feature ``j`` when the classifier's acceptance rate does not move by
``3 * delta`` or more, and marking ``j`` sensitive otherwise.  It then
re-encrypts the sensitive features of a sample to the target class and
protects a metric-class set disjoint from them, so the perturbation stays
under budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import bigkey
from .bigkey import EncHandle
from .metric import ProtectedMetric, metric_class_contains
from .task import Instance, hybrid_batch, replace_features

TOO_MANY_SENSITIVE = "TooManySensitive"


class BadParams(ValueError):
    pass


def _exact(x: float) -> Fraction:
    # repr round-trips, so 0.05 becomes exactly 1/20
    return Fraction(repr(x)) if isinstance(x, float) else Fraction(x)


@dataclass(frozen=True)
class EstimatorParams:
    delta: float
    lam_est: float

    def __post_init__(self):
        if not 0 < self.delta <= 0.5:
            raise BadParams(f"delta must lie in (0, 1/2], got {self.delta}")
        if self.lam_est < 1:
            raise BadParams(f"lam_est must be at least 1, got {self.lam_est}")

    @property
    def m(self) -> int:
        return math.ceil(_exact(self.lam_est) / _exact(self.delta) ** 2)

    @property
    def failure_bound(self) -> float:
        """Hoeffding bound on Pr[|estimate - mean| > delta]."""
        return 2 * math.exp(-2 * self.lam_est)


def estimate_mean(trial: Callable, params: EstimatorParams, rng) -> float:
    """Mean of ``m`` independent runs of ``trial(rng)``, each a 0/1 outcome."""
    m = params.m
    return sum(int(bool(trial(rng))) for _ in range(m)) / m


def estimate_mean_batch(sampler: Callable, params: EstimatorParams, rng) -> float:
    """Same estimate when ``sampler(k, rng)`` returns ``k`` outcomes at once."""
    m = params.m
    outcomes = sampler(m, rng)
    if len(outcomes) != m:
        raise BadParams(f"sampler returned {len(outcomes)} outcomes, expected {m}")
    return int(np.count_nonzero(np.asarray(outcomes))) / m


@dataclass
class SensitivityReport:
    n: int
    sensitive: tuple[int, ...]
    insensitive: tuple[int, ...]
    gaps: dict[int, float]
    trace: list[dict] = field(default_factory=list)
    queries: int = 0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "sensitive": list(self.sensitive),
            "insensitive": list(self.insensitive),
            "gaps": {str(j): g for j, g in sorted(self.gaps.items())},
            "trace": self.trace,
            "queries": self.queries,
        }


def probe_sensitivity(oracle, handles: Sequence[EncHandle], b: int,
                      params: EstimatorParams, rng) -> SensitivityReport:
    """Hybrid walk over features; uses exactly ``2 * n * m`` oracle queries."""
    n = len(handles)
    m = params.m
    threshold = 3 * _exact(params.delta)
    flipped_from = 1 - b

    classify = oracle.classify
    queries = 0

    def hits(J) -> int:
        nonlocal queries
        batch = hybrid_batch(handles, J, flipped_from, m, rng)
        queries += len(batch)
        return sum(1 for x in batch if classify(x) == b)

    J: list[int] = []
    sensitive: list[int] = []
    gaps: dict[int, float] = {}
    trace = []
    for j in range(n):
        base = hits(J)
        moved = hits(J + [j])
        gap = Fraction(abs(moved - base), m)
        gaps[j] = float(gap)
        keep = gap < threshold
        trace.append({"j": j, "mu": base / m, "mu_flip": moved / m, "kept": keep})
        if keep:
            J.append(j)
        else:
            sensitive.append(j)
    return SensitivityReport(n, tuple(sensitive), tuple(J), gaps, trace, queries)


@dataclass(frozen=True)
class Success:
    x_tilde: Instance
    T: frozenset[int]
    report: SensitivityReport

    ok = True

    def to_dict(self) -> dict:
        return {"status": "success", "T": sorted(self.T), "report": self.report.to_dict()}


@dataclass(frozen=True)
class Abort:
    reason: str
    report: SensitivityReport | None = None

    ok = False

    def to_dict(self) -> dict:
        out = {"status": "abort", "reason": self.reason}
        if self.report is not None:
            out["report"] = self.report.to_dict()
        return out


def choose_metric(n: int, sensitive: Sequence[int], t_class: int) -> frozenset[int] | None:
    """Lexicographically smallest class member avoiding ``sensitive``."""
    free = [i for i in range(n) if i not in set(sensitive)]
    if len(free) < t_class:
        return None
    return frozenset(free[:t_class])


def craft(x: Instance, report: SensitivityReport, handles: Sequence[EncHandle], b: int,
          t_class: int, rng):
    """Re-encrypt the sensitive features of a class ``1 - b`` sample to ``b``."""
    T = choose_metric(len(handles), report.sensitive, t_class)
    if T is None:
        return Abort(TOO_MANY_SENSITIVE, report)
    new = {i: bigkey.enc(handles[i], b, rng) for i in report.sensitive}
    return Success(replace_features(x, new), T, report)


@dataclass
class FoolingStats:
    trials: int
    fooled: int = 0
    clean_hits: int = 0
    admissible: int = 0
    in_class: int = 0
    probe_queries: int = 0
    fooling_queries: int = 0
    baseline_queries: int = 0

    @property
    def fooling_rate(self) -> float:
        return self.fooled / self.trials if self.trials else 0.0

    @property
    def clean_rate(self) -> float:
        return self.clean_hits / self.trials if self.trials else 0.0

    @property
    def gap(self) -> float:
        return abs(self.clean_rate - self.fooling_rate)

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "fooled": self.fooled,
            "clean_hits": self.clean_hits,
            "fooling_rate": self.fooling_rate,
            "clean_rate": self.clean_rate,
            "gap": self.gap,
            "admissible": self.admissible,
            "in_class": self.in_class,
            "probe_queries": self.probe_queries,
            "fooling_queries": self.fooling_queries,
            "baseline_queries": self.baseline_queries,
        }


def full_attack(oracle, handles: Sequence[EncHandle], b: int, params: EstimatorParams,
                t_class: int, rng, trials: int = 200):
    """Probe once, then craft and score ``trials`` adversarial examples.

    The clean baseline ``Pr[C(sample of class b) = b]`` is measured on
    ``trials`` further queries.  Returns ``(outcome, stats)`` where
    ``outcome`` is the first crafted result (or the abort).
    """
    if trials < 1:
        raise BadParams("need at least one fooling trial")
    n = len(handles)
    report = probe_sensitivity(oracle, handles, b, params, rng)
    stats = FoolingStats(trials, probe_queries=report.queries)
    T = choose_metric(n, report.sensitive, t_class)
    if T is None:
        return Abort(TOO_MANY_SENSITIVE, report), stats

    metric = ProtectedMetric(n, T)
    first = None
    for x in hybrid_batch(handles, (), 1 - b, trials, rng):
        outcome = craft(x, report, handles, b, t_class, rng)
        if first is None:
            first = outcome
        stats.admissible += metric.is_admissible(x, outcome.x_tilde)
        stats.in_class += metric_class_contains(n, t_class, outcome.T)
        stats.fooled += oracle.classify(outcome.x_tilde) == b
        stats.fooling_queries += 1

    for x in hybrid_batch(handles, (), b, trials, rng):
        stats.clean_hits += oracle.classify(x) == b
        stats.baseline_queries += 1
    return first, stats
