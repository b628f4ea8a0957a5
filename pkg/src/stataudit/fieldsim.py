"""Synthetic research-field generator.

Every study is a two-group normal experiment with a known true standardized
mean difference; the generator computes the exact t and p, applies a
publication filter, and emits a Corpus in the ingestion schema. Attempts are
seeded counter-style (one child SeedSequence per attempt index), so a given
(config, attempt) pair always produces the same study no matter how many
workers evaluate attempts, and the published corpus is the first n_papers
accepted attempts in attempt order.

Only t-type studies are generated; that is the dominant statistic in real
coded corpora and the one every downstream detector consumes.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .core import kernels as K
from .corpus import CodedTest, Corpus, PaperRecord
from .errors import DomainError

_CHASE_REDRAW_CAP = 5
_ATTEMPT_FACTOR = 1000      # give up after 1000 attempts per requested paper
_MIN_TOTAL_N = 4

_D_KINDS = ("point", "normal")
_SIZE_KINDS = ("lognormal", "empirical")
_COUNT_KINDS = ("point", "uniform")
_FILTER_KINDS = ("none", "significant_only", "prob_publish", "chase")


@dataclass(frozen=True)
class FieldConfig:
    """Declarative description of a simulated field.

    Distribution fields are tagged tuples:
      true_d             ("point", d) | ("normal", mean, sd)
      sample_size        ("lognormal", mu, sigma) | ("empirical", (n, n, ...))
      tests_per_family   ("point", k) | ("uniform", lo, hi)
      publication_filter ("none",) | ("significant_only",)
                         | ("prob_publish", p_sig, p_nonsig)
                         | ("chase", nudge_width)
    """
    n_papers: int
    true_d: Tuple = ("point", 0.0)
    sample_size: Tuple = ("lognormal", 4.3, 0.7)
    tests_per_family: Tuple = ("point", 1)
    publication_filter: Tuple = ("none",)
    seed: int = 0

    def validate(self) -> None:
        if self.n_papers < 1:
            raise DomainError("n_papers must be at least 1")
        kind = self.true_d[0]
        if kind not in _D_KINDS:
            raise DomainError(f"unknown true_d kind {kind!r}")
        if kind == "normal" and self.true_d[2] < 0:
            raise DomainError("true_d sd must be nonnegative")
        kind = self.sample_size[0]
        if kind not in _SIZE_KINDS:
            raise DomainError(f"unknown sample_size kind {kind!r}")
        if kind == "lognormal" and self.sample_size[2] <= 0:
            raise DomainError("sample_size sigma must be positive")
        if kind == "empirical":
            pool = self.sample_size[1]
            if len(pool) == 0 or any(n < _MIN_TOTAL_N for n in pool):
                raise DomainError(
                    f"empirical sizes must be >= {_MIN_TOTAL_N} and nonempty")
        kind = self.tests_per_family[0]
        if kind not in _COUNT_KINDS:
            raise DomainError(f"unknown tests_per_family kind {kind!r}")
        if kind == "point" and self.tests_per_family[1] < 1:
            raise DomainError("tests_per_family must be at least 1")
        if kind == "uniform":
            lo, hi = self.tests_per_family[1:3]
            if not 1 <= lo <= hi:
                raise DomainError("tests_per_family bounds need 1 <= lo <= hi")
        kind = self.publication_filter[0]
        if kind not in _FILTER_KINDS:
            raise DomainError(f"unknown publication_filter kind {kind!r}")
        if kind == "prob_publish":
            for p in self.publication_filter[1:3]:
                if not 0.0 <= p <= 1.0:
                    raise DomainError("publish probabilities must be in [0, 1]")
        if kind == "chase" and self.publication_filter[1] < 0:
            raise DomainError("nudge_width must be nonnegative")
        if self.seed < 0:
            raise DomainError("seed must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "n_papers": self.n_papers,
            "true_d": list(self.true_d),
            "sample_size": [self.sample_size[0],
                            list(self.sample_size[1])
                            if self.sample_size[0] == "empirical"
                            else self.sample_size[1],
                            *self.sample_size[2:]],
            "tests_per_family": list(self.tests_per_family),
            "publication_filter": list(self.publication_filter),
            "seed": self.seed,
        }

    @staticmethod
    def from_dict(payload: dict) -> "FieldConfig":
        def tup(v):
            if isinstance(v, (list, tuple)):
                return tuple(tup(x) for x in v)
            return v
        cfg = FieldConfig(
            n_papers=int(payload["n_papers"]),
            true_d=tup(payload.get("true_d", ("point", 0.0))),
            sample_size=tup(payload.get("sample_size", ("lognormal", 4.3, 0.7))),
            tests_per_family=tup(payload.get("tests_per_family", ("point", 1))),
            publication_filter=tup(payload.get("publication_filter", ("none",))),
            seed=int(payload.get("seed", 0)),
        )
        cfg.validate()
        return cfg


def _draw_total_n(dist, rng) -> int:
    if dist[0] == "lognormal":
        n = int(round(rng.lognormal(mean=dist[1], sigma=dist[2])))
        return max(_MIN_TOTAL_N, n)
    pool = np.asarray(dist[1], dtype=int)
    return int(pool[rng.integers(0, len(pool))])


def _draw_d(dist, rng) -> float:
    if dist[0] == "point":
        return float(dist[1])
    return float(rng.normal(dist[1], dist[2]))


def _draw_count(dist, rng) -> int:
    if dist[0] == "point":
        return int(dist[1])
    return int(rng.integers(dist[1], dist[2] + 1))


def _simulate_t(rng, d, n1, n2):
    x1 = rng.normal(d, 1.0, size=n1)
    x2 = rng.normal(0.0, 1.0, size=n2)
    v1 = float(np.var(x1, ddof=1))
    v2 = float(np.var(x2, ddof=1))
    df = n1 + n2 - 2
    pooled = ((n1 - 1) * v1 + (n2 - 1) * v2) / df
    t = (float(np.mean(x1)) - float(np.mean(x2))) \
        / math.sqrt(pooled * (1.0 / n1 + 1.0 / n2))
    p = 2.0 * (1.0 - K.t_cdf(abs(t), float(df)))
    return t, min(max(p, 0.0), 1.0)


def _run_attempt(config: FieldConfig, attempt: int):
    """Evaluate one paper attempt. Pure in (config, attempt)."""
    rng = np.random.default_rng(
        np.random.SeedSequence(config.seed, spawn_key=(attempt,)))
    total_n = _draw_total_n(config.sample_size, rng)
    n1 = total_n - total_n // 2
    n2 = total_n // 2
    k = _draw_count(config.tests_per_family, rng)
    filt = config.publication_filter

    tests = []
    any_sig = False
    for _ in range(k):
        d = _draw_d(config.true_d, rng)
        t, p = _simulate_t(rng, d, n1, n2)
        if filt[0] == "chase":
            lo, hi = 0.05, 0.05 + filt[1]
            redraws = 0
            while lo < p < hi and redraws < _CHASE_REDRAW_CAP:
                t, p = _simulate_t(rng, d, n1, n2)
                redraws += 1
        any_sig = any_sig or p < 0.05
        tests.append((t, p))

    if filt[0] == "significant_only":
        published = any_sig
    elif filt[0] == "prob_publish":
        threshold = filt[1] if any_sig else filt[2]
        published = bool(rng.uniform() < threshold)
    else:
        published = True
    return published, total_n, n1, n2, tests


def _attempt_star(args):
    return _run_attempt(*args)


def simulate_field(config: FieldConfig, workers: int = 1) -> Corpus:
    """Generate a published field; deterministic in config alone.

    The worker count only spreads attempt evaluation across processes; the
    published set is always the first n_papers accepted attempts in attempt
    order, so output never depends on workers.
    """
    config.validate()
    cap = _ATTEMPT_FACTOR * config.n_papers
    accepted = []

    if workers > 1:
        block = max(64, workers * 16)
        try:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                start = 0
                while start < cap and len(accepted) < config.n_papers:
                    stop = min(cap, start + block)
                    args = [(config, a) for a in range(start, stop)]
                    for result in pool.map(_attempt_star, args):
                        if result[0] and len(accepted) < config.n_papers:
                            accepted.append(result)
                    start = stop
        except OSError:
            accepted = []
            workers = 1       # process pool unavailable here; fall through
    if workers <= 1 and len(accepted) < config.n_papers:
        accepted = []
        for attempt in range(cap):
            result = _run_attempt(config, attempt)
            if result[0]:
                accepted.append(result)
                if len(accepted) == config.n_papers:
                    break

    papers = []
    tests = []
    test_seq = 0
    for idx, (_, total_n, n1, n2, drawn) in enumerate(accepted, start=1):
        paper_id = f"P{idx:04d}"
        papers.append(PaperRecord(paper_id=paper_id, total_n=total_n,
                                  mturk=False, mcc=False, venue="sim"))
        for t, p in drawn:
            test_seq += 1
            tests.append(CodedTest(
                test_id=f"T{test_seq:06d}", paper_id=paper_id,
                family_id=f"F{idx:04d}", statistic="t", value=t,
                df1=float(n1 + n2 - 2), p_reported=p, p_comparator="eq",
                n1=n1, n2=n2, design="ind"))
    return Corpus(papers=tuple(papers), tests=tuple(tests))
