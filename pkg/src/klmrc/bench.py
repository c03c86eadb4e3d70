"""Knowledge-base generators and the scaling benchmark.

``generate_kb`` builds layered exception chains in the style of the
penguin example: chain ``c`` with ``L`` levels is ::

    x_c_0 |~ f_c
    x_c_l |~ x_c_{l-1}        for 1 <= l < L
    x_c_l |~ f_c / -f_c       alternating sign, for 1 <= l < L

so ``x_c_l`` is exceptional with respect to everything below it and lands on
rank ``l``.  The rest of the statements are fillers with a fresh consequent
atom, attached either to a chain atom (same rank as that atom) or to a fresh
antecedent (rank 0).  All antecedents are positive atoms, so setting every
atom false satisfies the materialisation: generated KBs are always consistent.
"""
from __future__ import annotations

import csv
import math
import random
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats

from . import __version__
from .baserank import base_rank
from .kb import Conditional, Kind, KnowledgeBase, Literal, Query
from .rc import rc_entails

DEFAULT_SIZES = tuple(range(25, 326, 25))
DEFAULT_TRIALS = 2000
DEFAULT_LEVELS = 3
WARMUP = 10
CSV_HEADER = ("size", "mean_s", "ci95_s", "trials")


def _pos(name: str) -> Literal:
    return Literal(name)


def generate_kb(
    size: int, seed: int, levels: int = DEFAULT_LEVELS, classical_fraction: float = 0.0
) -> tuple[KnowledgeBase, Query]:
    if size < 2:
        raise ValueError("size must be at least 2")
    if levels < 1:
        raise ValueError("levels must be at least 1")
    rng = random.Random(seed)
    statements: list[Conditional] = []
    chain_atoms: list[str] = []

    depth = min(levels, (size + 1) // 2) if size >= 3 else 1
    chain_len = 2 * depth - 1
    chains = max(1, size // (2 * chain_len)) if depth > 1 else 0
    for c in range(chains):
        f = _pos(f"f{c}")
        x = [f"x{c}_{l}" for l in range(depth)]
        chain_atoms.extend(x)
        statements.append(Conditional(_pos(x[0]), f))
        for l in range(1, depth):
            statements.append(Conditional(_pos(x[l]), _pos(x[l - 1])))
            statements.append(Conditional(_pos(x[l]), Literal(f.atom, l % 2 == 1)))

    k = 0
    while len(statements) < size:
        g = Literal(f"g{k}", rng.random() < 0.5)
        if chain_atoms and rng.random() < 0.5:
            statements.append(Conditional(_pos(rng.choice(chain_atoms)), g))
        else:
            kind = Kind.CLASSICAL if rng.random() < classical_fraction else Kind.DEFEASIBLE
            statements.append(Conditional(_pos(f"a{k}"), g, kind))
        k += 1

    rng.shuffle(statements)
    kb = KnowledgeBase(tuple(statements))
    pick = rng.choice(kb.statements)
    return kb, Query(pick.antecedent, pick.consequent)


def random_kb(
    rng: random.Random | int,
    max_statements: int = 12,
    max_atoms: int = 8,
    classical_prob: float = 0.25,
    min_statements: int = 0,
) -> KnowledgeBase:
    """Uniformly random literal implications, duplicates dropped; may be inconsistent."""
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    n_atoms = rng.randint(1, max_atoms)
    names = [f"p{i}" for i in range(n_atoms)]
    n = rng.randint(min_statements, max_statements)

    def lit():
        return Literal(rng.choice(names), rng.random() < 0.5)

    out = {}
    for _ in range(n):
        kind = Kind.CLASSICAL if rng.random() < classical_prob else Kind.DEFEASIBLE
        out.setdefault(Conditional(lit(), lit(), kind), None)
    return KnowledgeBase(tuple(out))


@dataclass(frozen=True)
class BenchConfig:
    sizes: tuple[int, ...] = DEFAULT_SIZES
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    output: Path | None = None
    levels: int = DEFAULT_LEVELS
    classical_fraction: float = 0.0
    warmup: int = WARMUP

    def __post_init__(self):
        sizes = tuple(self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if not sizes:
            raise ValueError("sizes must be non-empty")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("sizes must be strictly ascending")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass(frozen=True)
class BenchRecord:
    size: int
    mean_seconds: float
    ci95_seconds: float
    trials: int
    entailed: bool = field(default=False, compare=False)
    ranks: int = field(default=0, compare=False)


@dataclass
class BenchResult:
    records: list[BenchRecord]
    slope: float
    intercept: float


def ci95_halfwidth(samples: Sequence[float]) -> float:
    n = len(samples)
    if n < 2:
        return 0.0
    return float(stats.t.ppf(0.975, n - 1) * statistics.stdev(samples) / math.sqrt(n))


def fit_line(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    """Least-squares ``y = slope * x + intercept``."""
    if len(xs) < 2:
        return 0.0, float(ys[0]) if ys else 0.0
    slope, intercept = np.polyfit(np.asarray(xs, float), np.asarray(ys, float), 1)
    return float(slope), float(intercept)


def time_size(kb: KnowledgeBase, q: Query, trials: int, warmup: int = WARMUP):
    for _ in range(warmup):
        rc_entails(base_rank(kb), q)
    samples = []
    verdicts = set()
    ranks = 0
    for _ in range(trials):
        t0 = time.perf_counter()
        ranked = base_rank(kb)
        answer = rc_entails(ranked, q)
        samples.append(time.perf_counter() - t0)
        verdicts.add(answer.entailed)
        ranks = ranked.n
    if len(verdicts) != 1:
        raise RuntimeError("verdict changed between trials")
    return samples, verdicts.pop(), ranks


def run_bench(cfg: BenchConfig, progress=None) -> BenchResult:
    records = []
    for size in cfg.sizes:
        kb, q = generate_kb(size, cfg.seed, cfg.levels, cfg.classical_fraction)
        samples, entailed, ranks = time_size(kb, q, cfg.trials, cfg.warmup)
        rec = BenchRecord(
            size, statistics.fmean(samples), ci95_halfwidth(samples), cfg.trials, entailed, ranks
        )
        records.append(rec)
        if progress:
            progress(rec)
    slope, intercept = fit_line([r.size for r in records], [r.mean_seconds for r in records])
    result = BenchResult(records, slope, intercept)
    if cfg.output is not None:
        write_csv(result, cfg, cfg.output)
    return result


def write_csv(result: BenchResult, cfg: BenchConfig, path: Path | str) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(f"# klmrc {__version__} bench\n")
        fh.write(f"# seed={cfg.seed} trials={cfg.trials} warmup={cfg.warmup} "
                 f"levels={cfg.levels} classical_fraction={cfg.classical_fraction}\n")
        fh.write(f"# sizes={','.join(map(str, cfg.sizes))}\n")
        fh.write(f"# fit: mean_s = {result.slope:.6g} * size + {result.intercept:.6g}\n")
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for r in result.records:
            w.writerow([r.size, repr(r.mean_seconds), repr(r.ci95_seconds), r.trials])


def read_csv(path: Path | str) -> list[BenchRecord]:
    with Path(path).open() as fh:
        rows = [line for line in fh if not line.startswith("#")]
    reader = csv.DictReader(rows)
    return [
        BenchRecord(int(r["size"]), float(r["mean_s"]), float(r["ci95_s"]), int(r["trials"]))
        for r in reader
    ]
