"""Seeded Monte Carlo sweeps over (n, p, r) grids.

Each trial derives its own 64-bit seed from (master seed, n, p index,
trial index), samples a graph, runs one reconstruction algorithm or
witness finder, and emits one record. Records are independent of
execution order and worker count, so a sweep is reproducible
byte-for-byte (wall times aside) from its config alone.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

from shotgun.graph import Graph, GnpParams, components, derive_seed, sample_gnp
from shotgun.reconstruct import (
    FAST,
    FULL,
    BallCollection,
    Outcome,
    ReconstructionResult,
    assemble_small_components,
    hybrid_high_low_reconstruct,
    overlap_reconstruct,
    two_ball_reconstruct,
)
from shotgun.witness import (
    SwapWitness,
    find_path_pair_witness,
    find_r1_witness,
    find_r2_witness,
    find_r3_witness,
    good_edge,
    path_component_count,
    verify_witness,
)

__all__ = [
    "THRESHOLDS",
    "SweepConfig",
    "SweepRecord",
    "CellSummary",
    "CSV_HEADER",
    "resolve_p",
    "run_sweep",
    "summarize",
    "records_to_csv",
    "write_sweep_csv",
    "read_sweep_csv",
    "wilson_interval",
]

# =========================================================================
# Threshold formulas and p grids
# =========================================================================

# Named threshold functions f(n, r); a p grid entry "mul:c:name" resolves
# to c * f(n, r). Names are shared verbatim with the plots package.
THRESHOLDS: dict[str, Callable[[int, int], float]] = {
    # n^(-(2r+1)/(2r)): boundary of the path-pair witness regime
    "path_pair": lambda n, r: float(n) ** (-(2 * r + 1) / (2 * r)),
    # log n / (r n)
    "log_rn": lambda n, r: math.log(n) / (r * n),
    # sqrt(log n / (25 n))
    "sqrt_log_25n": lambda n, r: math.sqrt(math.log(n) / (25 * n)),
    # n^(-3/4) * (log n)^(1/4)
    "n34_log14": lambda n, r: float(n) ** -0.75 * math.log(n) ** 0.25,
    # (log n)^2 / (n (log log n)^3)
    "log2_llog3": lambda n, r: math.log(n) ** 2
    / (n * math.log(math.log(n)) ** 3),
}

_RECONSTRUCT_ALGORITHMS = (
    "assemble",
    "overlap",
    "two-ball-full",
    "two-ball-fast",
    "hybrid",
)
_WITNESS_FINDERS = ("path-pair", "r1", "r2", "r3")

# Radius constraints per mode name; None means any radius >= 1.
_MODE_RADIUS: dict[str, tuple[int, int | None]] = {
    "reconstruct:assemble": (1, None),
    "reconstruct:overlap": (2, None),
    "reconstruct:two-ball-full": (2, 2),
    "reconstruct:two-ball-fast": (2, 2),
    "reconstruct:hybrid": (4, None),
    "witness:path-pair": (1, None),
    "witness:r1": (1, 1),
    "witness:r2": (2, 2),
    "witness:r3": (3, 3),
}


def _entry_float(text: str, entry: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"cannot parse p grid entry {entry!r}") from None


def _parse_p_entry(entry: str) -> None:
    """Validate one p grid entry; raises ValueError on bad grammar.

    Grammar: a float literal in (0,1), "exp:a" for p = n^(-a) with a > 0,
    or "mul:c:name" for p = c * THRESHOLDS[name](n, r) with c > 0.
    """
    parts = entry.split(":")
    if len(parts) == 1:
        p = _entry_float(entry, entry)
        if not 0.0 < p < 1.0:
            raise ValueError(f"probability {entry!r} outside (0, 1)")
        return
    if parts[0] == "exp" and len(parts) == 2:
        if _entry_float(parts[1], entry) <= 0:
            raise ValueError(f"exponent must be positive in {entry!r}")
        return
    if parts[0] == "mul" and len(parts) == 3:
        if _entry_float(parts[1], entry) <= 0:
            raise ValueError(f"multiplier must be positive in {entry!r}")
        if parts[2] not in THRESHOLDS:
            known = ", ".join(sorted(THRESHOLDS))
            raise ValueError(
                f"unknown threshold {parts[2]!r} in {entry!r} (known: {known})"
            )
        return
    raise ValueError(f"cannot parse p grid entry {entry!r}")


def resolve_p(entry: str, n: int, r: int) -> float:
    """Resolve one p grid entry to a probability for a concrete (n, r)."""
    _parse_p_entry(entry)
    parts = entry.split(":")
    if len(parts) == 1:
        p = float(entry)
    elif parts[0] == "exp":
        p = float(n) ** -float(parts[1])
    else:
        p = float(parts[1]) * THRESHOLDS[parts[2]](n, r)
    if not 0.0 < p < 1.0:
        raise ValueError(
            f"p grid entry {entry!r} resolves to {p} at n={n}, outside (0, 1)"
        )
    return p


# =========================================================================
# Config and record types
# =========================================================================


@dataclass(frozen=True)
class SweepConfig:
    """Full description of a sweep; two equal configs give equal records.

    `p_spec` entries follow the grammar of :func:`resolve_p`. `mode` is
    "reconstruct:<algorithm>" or "witness:<finder>" with algorithms
    {assemble, overlap, two-ball-full, two-ball-fast, hybrid} and finders
    {path-pair, r1, r2, r3}. `witness_budget` caps the candidate stream
    of the r1/r2 finders. `wall_clock_cap_s` is off by default: a time
    cut is nondeterministic, so deterministic budgets are the primary
    work limit, and trials exceeding an enabled cap are folded into
    INCONSISTENT with an in-memory `timed_out` marker.
    """

    n_values: tuple[int, ...]
    p_spec: tuple[str, ...]
    r: int
    trials: int
    master_seed: int
    mode: str
    witness_budget: int = 1_000_000
    wall_clock_cap_s: float | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "n_values", tuple(self.n_values))
        object.__setattr__(self, "p_spec", tuple(str(e) for e in self.p_spec))
        if not self.n_values:
            raise ValueError("n_values must be nonempty")
        if any(n < 1 for n in self.n_values):
            raise ValueError("all n values must be >= 1")
        if not self.p_spec:
            raise ValueError("p_spec must be nonempty")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.master_seed < 1 << 64:
            raise ValueError("master_seed must fit in 64 bits")
        if self.witness_budget < 0:
            raise ValueError("witness_budget must be >= 0")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.wall_clock_cap_s is not None and self.wall_clock_cap_s <= 0:
            raise ValueError("wall_clock_cap_s must be positive when set")
        if self.mode not in _MODE_RADIUS:
            known = ", ".join(sorted(_MODE_RADIUS))
            raise ValueError(f"unknown mode {self.mode!r} (known: {known})")
        lo, hi = _MODE_RADIUS[self.mode]
        if self.r < lo or (hi is not None and self.r > hi):
            bound = f"= {lo}" if hi == lo else f">= {lo}"
            raise ValueError(f"mode {self.mode!r} needs radius {bound}, got {self.r}")
        for n in self.n_values:
            for entry in self.p_spec:
                resolve_p(entry, n, self.r)


@dataclass(frozen=True)
class SweepRecord:
    """One trial's outcome plus auxiliary counters.

    The twelve CSV fields come first, in column order. Counters that a
    mode does not compute are -1: `unique_rm1_balls` (the number of
    distinct (r-1)-ball classes; equal to n exactly when the overlap
    precondition holds) is filled by reconstruction algorithms that test
    (r-1)-ball uniqueness, `good_edge_count` only by the r3 witness mode
    (a full census over the edges). `max_component` and
    `path_pair_count` (components that are paths on exactly 2r+1
    vertices) are always computed from the sampled graph. The trailing
    fields stay in memory only: the witness behind a WITNESS_FOUND
    outcome (already verified), the wall-clock cap marker, and a
    free-form note for INCONSISTENT records.
    """

    n: int
    p: float
    r: int
    trial: int
    seed: int
    mode: str
    outcome: Outcome
    max_component: int
    unique_rm1_balls: int
    path_pair_count: int
    good_edge_count: int
    elapsed_ms: int
    witness: SwapWitness | None = None
    timed_out: bool = False
    note: str = ""


CSV_HEADER = (
    "n,p,r,trial,seed,mode,outcome,max_component,"
    "unique_rm1_balls,path_pair_count,good_edge_count,elapsed_ms"
)


# =========================================================================
# Trial execution
# =========================================================================


def _reconstruct_trial(
    g: Graph, cfg: SweepConfig, p: float
) -> tuple[ReconstructionResult, Outcome]:
    algorithm = cfg.mode.split(":", 1)[1]
    bc = BallCollection.from_graph(g, cfg.r)
    if algorithm == "assemble":
        result = assemble_small_components(bc)
    elif algorithm == "overlap":
        result = overlap_reconstruct(bc)
    elif algorithm == "two-ball-full":
        result = two_ball_reconstruct(bc, FULL)
    elif algorithm == "two-ball-fast":
        result = two_ball_reconstruct(bc, FAST)
    else:
        result = hybrid_high_low_reconstruct(bc, p_hint=p)
    outcome = result.outcome
    if outcome is Outcome.EXACT and result.graph != g:
        # labelled equality implies r-ball multiset equality; an EXACT
        # claim that fails it must never be recorded as a success
        return result, Outcome.INCONSISTENT
    return result, outcome


def _witness_trial(
    g: Graph, cfg: SweepConfig, p: float, search_seed: int
) -> tuple[SwapWitness | None, Outcome, str]:
    finder = cfg.mode.split(":", 1)[1]
    if finder == "path-pair":
        witness = find_path_pair_witness(g, cfg.r)
    elif finder == "r1":
        witness = find_r1_witness(
            g, budget=cfg.witness_budget, p=p, seed=search_seed
        )
    elif finder == "r2":
        witness = find_r2_witness(
            g, budget=cfg.witness_budget, p=p, seed=search_seed
        )
    else:
        witness = find_r3_witness(g, p)
    if witness is None:
        return None, Outcome.NONE, ""
    report = verify_witness(g, witness)
    if not report.valid:
        return None, Outcome.INCONSISTENT, "witness failed verification"
    return witness, Outcome.WITNESS_FOUND, ""


def _run_trial(task: tuple[SweepConfig, int, int, float, int]) -> SweepRecord:
    cfg, n, p_index, p, trial = task
    seed = derive_seed(cfg.master_seed, n, p_index, trial)
    start = time.perf_counter()
    witness: SwapWitness | None = None
    unique_rm1 = -1
    good_edges = -1
    note = ""
    try:
        g = sample_gnp(GnpParams(n=n, p=p, seed=seed))
        comps = components(g)
        max_component = max((len(c) for c in comps), default=0)
        path_pairs = path_component_count(g, 2 * cfg.r + 1)
        if cfg.mode.startswith("reconstruct:"):
            result, outcome = _reconstruct_trial(g, cfg, p)
            unique_rm1 = int(result.stats.get("unique_rm1_balls", -1))
            if outcome is Outcome.INCONSISTENT and result.outcome is Outcome.EXACT:
                note = "EXACT output disagreed with the source edge set"
        else:
            witness, outcome, note = _witness_trial(
                g, cfg, p, derive_seed(seed, 1)
            )
            if cfg.mode == "witness:r3":
                good_edges = sum(
                    1 for u, v in g.edges() if good_edge(g, u, v, p)
                )
    except Exception as exc:  # per-trial isolation: sweeps never abort
        outcome = Outcome.INCONSISTENT
        note = f"{type(exc).__name__}: {exc}"
        max_component = -1
        path_pairs = -1
    elapsed = time.perf_counter() - start
    timed_out = (
        cfg.wall_clock_cap_s is not None and elapsed > cfg.wall_clock_cap_s
    )
    if timed_out and outcome is not Outcome.INCONSISTENT:
        outcome = Outcome.INCONSISTENT
        witness = None
        note = "wall clock cap exceeded"
    return SweepRecord(
        n=n,
        p=p,
        r=cfg.r,
        trial=trial,
        seed=seed,
        mode=cfg.mode,
        outcome=outcome,
        max_component=max_component,
        unique_rm1_balls=unique_rm1,
        path_pair_count=path_pairs,
        good_edge_count=good_edges,
        elapsed_ms=round(elapsed * 1000),
        witness=witness,
        timed_out=timed_out,
        note=note,
    )


def run_sweep(cfg: SweepConfig) -> list[SweepRecord]:
    """Execute every (n, p, trial) cell of the config.

    Per-trial seeds are derived as mix(master_seed, n, p_index, trial),
    so any single trial can be reproduced in isolation. Trial failures
    become INCONSISTENT records; the sweep itself never aborts. Records
    are sorted by (n, p, trial) regardless of worker count or execution
    order. Every WITNESS_FOUND record carries a witness that passed
    verification; every EXACT record was checked against the source
    labelled edge set (which subsumes ball-multiset equality) before
    being recorded.
    """
    tasks = [
        (cfg, n, p_index, resolve_p(entry, n, cfg.r), trial)
        for n in cfg.n_values
        for p_index, entry in enumerate(cfg.p_spec)
        for trial in range(cfg.trials)
    ]
    if cfg.workers == 1:
        records = [_run_trial(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(_run_trial, tasks))
    records.sort(key=lambda rec: (rec.n, rec.p, rec.trial, rec.seed))
    return records


# =========================================================================
# Summaries
# =========================================================================


def wilson_interval(
    successes: int, trials: int, z: float = 1.96
) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion, clipped to [0, 1]."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in [0, trials]")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = phat + z2 / (2 * trials)
    margin = z * math.sqrt(
        phat * (1.0 - phat) / trials + z2 / (4 * trials * trials)
    )
    # the bounds bracket phat exactly in real arithmetic; the min/max
    # pair keeps that true under floating-point rounding
    low = min((centre - margin) / denom, phat)
    high = max((centre + margin) / denom, phat)
    return max(0.0, low), min(1.0, high)


_SUCCESS_OUTCOMES = {
    "reconstruct": (Outcome.EXACT, Outcome.ISOMORPHIC),
    "witness": (Outcome.WITNESS_FOUND,),
}


@dataclass(frozen=True)
class CellSummary:
    """Per-(n, p, r, mode) outcome frequencies with a Wilson 95% interval.

    Success means EXACT or ISOMORPHIC for reconstruction modes and
    WITNESS_FOUND for witness modes.
    """

    n: int
    p: float
    r: int
    mode: str
    trials: int
    counts: tuple[tuple[str, int], ...]
    successes: int
    frequency: float
    wilson_low: float
    wilson_high: float


def summarize(records: Sequence[SweepRecord]) -> list[CellSummary]:
    """Group records by cell and compute per-outcome frequencies."""
    if not records:
        raise ValueError("cannot summarize zero records")
    cells: dict[tuple[int, float, int, str], list[SweepRecord]] = {}
    for rec in records:
        cells.setdefault((rec.n, rec.p, rec.r, rec.mode), []).append(rec)
    out = []
    for (n, p, r, mode), recs in sorted(cells.items()):
        counter: dict[str, int] = {}
        for rec in recs:
            counter[rec.outcome.value] = counter.get(rec.outcome.value, 0) + 1
        wins = _SUCCESS_OUTCOMES[mode.split(":", 1)[0]]
        successes = sum(1 for rec in recs if rec.outcome in wins)
        low, high = wilson_interval(successes, len(recs))
        out.append(
            CellSummary(
                n=n,
                p=p,
                r=r,
                mode=mode,
                trials=len(recs),
                counts=tuple(sorted(counter.items())),
                successes=successes,
                frequency=successes / len(recs),
                wilson_low=low,
                wilson_high=high,
            )
        )
    return out


# =========================================================================
# CSV persistence
# =========================================================================


def records_to_csv(records: Iterable[SweepRecord]) -> str:
    """Render records in the fixed twelve-column schema.

    Floats use shortest round-trip formatting; the output is a pure
    function of the records, so equal sweeps give byte-equal text.
    """
    lines = [CSV_HEADER]
    for rec in records:
        lines.append(
            f"{rec.n},{rec.p!r},{rec.r},{rec.trial},{rec.seed},{rec.mode},"
            f"{rec.outcome.value},{rec.max_component},{rec.unique_rm1_balls},"
            f"{rec.path_pair_count},{rec.good_edge_count},{rec.elapsed_ms}"
        )
    return "\n".join(lines) + "\n"


def write_sweep_csv(records: Iterable[SweepRecord], path: str | Path) -> None:
    """Write :func:`records_to_csv` output to a file."""
    Path(path).write_text(records_to_csv(records))


def read_sweep_csv(path: str | Path) -> list[SweepRecord]:
    """Parse a sweep CSV back into records (in-memory fields default)."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"bad sweep CSV header in {path}")
    records = []
    for line in lines[1:]:
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 12:
            raise ValueError(f"bad sweep CSV row: {line!r}")
        records.append(
            SweepRecord(
                n=int(parts[0]),
                p=float(parts[1]),
                r=int(parts[2]),
                trial=int(parts[3]),
                seed=int(parts[4]),
                mode=parts[5],
                outcome=Outcome(parts[6]),
                max_component=int(parts[7]),
                unique_rm1_balls=int(parts[8]),
                path_pair_count=int(parts[9]),
                good_edge_count=int(parts[10]),
                elapsed_ms=int(parts[11]),
            )
        )
    return records
