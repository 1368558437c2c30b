"""Seeded Monte-Carlo sampling: Haar unitaries, profile-constrained matrices,
trace-moment estimators, and spectral-radius experiments.

Randomness discipline: every public entry point takes an integer seed and
derives counter-based Philox streams via ``rng_stream(seed, index)``.  Work
items (replications) own disjoint stream indices and results are merged by
index, so output is byte-stable under any parallelism degree.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from .profiles import SingularProfile

_BATCH = 4096


class EigensolverError(RuntimeError):
    """Eigensolver failed to converge; carries the stream that produced the
    offending sample."""

    def __init__(self, seed: int, stream_index: int):
        super().__init__(
            f"eigensolver did not converge (seed={seed}, stream={stream_index})"
        )
        self.seed = seed
        self.stream_index = stream_index


class OverflowGuardError(RuntimeError):
    """Matrix power left the floating-point range."""


def rng_stream(seed: int, index: int = 0) -> np.random.Generator:
    """Independent counter-based generator for (seed, stream index)."""
    if not 0 <= seed < 2**63:
        raise ValueError("seed must fit in a nonnegative 63-bit integer")
    if not 0 <= index < 2**63:
        raise ValueError("stream index must fit in a nonnegative 63-bit integer")
    return np.random.Generator(np.random.Philox(key=[seed, index]))


def haar_batch(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of ``count`` independent Haar-distributed n x n unitaries.

    Complex Ginibre followed by QR, with the Q columns rescaled by the phases
    of the R diagonal.  Without that rescaling the QR output is not Haar.
    """
    if n < 1 or count < 1:
        raise ValueError("dimension and count must be at least 1")
    z = rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))
    z /= math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    mod = np.abs(d)
    phase = np.where(mod > 0, d / np.where(mod > 0, mod, 1.0), 1.0)
    return q * phase[:, None, :]


def sample_haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """One Haar-distributed n x n unitary."""
    return haar_batch(n, 1, rng)[0]


def sample_A(profile: SingularProfile, rng: np.random.Generator) -> np.ndarray:
    """One draw of A = U T V with independent Haar factors and
    T = diag(profile)."""
    return sample_A_batch(profile, 1, rng)[0]


def sample_A_batch(
    profile: SingularProfile, count: int, rng: np.random.Generator
) -> np.ndarray:
    s = profile.as_float_array()
    u = haar_batch(profile.n, count, rng)
    v = haar_batch(profile.n, count, rng)
    return (u * s) @ v


def _power_batch(a: np.ndarray, k: int) -> np.ndarray:
    """a^k by repeated multiplication; every step is checked for overflow."""
    out = a
    for _ in range(k - 1):
        out = out @ a
        if not np.all(np.isfinite(out)):
            raise OverflowGuardError(f"matrix power overflowed at exponent <= {k}")
    return out


@dataclass(frozen=True)
class MomentEstimate:
    """Empirical mean and standard error of a sampled statistic."""

    mean: float
    std_error: float
    samples: int
    statistic: str
    k: int
    n: int


def _finish_estimate(
    vals: np.ndarray, statistic: str, k: int, n: int
) -> MomentEstimate:
    samples = len(vals)
    se = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return MomentEstimate(float(vals.mean()), se, samples, statistic, k, n)


def estimate_trace_moment(
    k: int,
    profile: SingularProfile,
    samples: int,
    seed: int,
    mode: Literal["uu", "sq"] = "uu",
) -> MomentEstimate:
    """Monte-Carlo estimate of a k-th trace moment of A = U T V.

    mode "uu" averages trace(A^k (A^k)^*), mode "sq" averages |trace(A^k)|^2.
    Both statistics are real; k = 1 with mode "uu" is deterministic, so its
    standard error is numerical noise only.
    """
    if k < 1:
        raise ValueError("moment order must be at least 1")
    if samples < 2:
        raise ValueError("need at least 2 samples for a standard error")
    if mode not in ("uu", "sq"):
        raise ValueError(f"unknown mode {mode!r}")
    rng = rng_stream(seed)
    vals = np.empty(samples, dtype=float)
    done = 0
    while done < samples:
        b = min(_BATCH, samples - done)
        a = sample_A_batch(profile, b, rng)
        p = _power_batch(a, k)
        if mode == "uu":
            vals[done : done + b] = np.sum(np.abs(p) ** 2, axis=(1, 2))
        else:
            tr = np.trace(p, axis1=1, axis2=2)
            vals[done : done + b] = np.abs(tr) ** 2
        done += b
    return _finish_estimate(vals, f"trace_{mode}", k, profile.n)


def extreme_eigenvalues(a: np.ndarray) -> tuple[float, float]:
    """(largest, smallest) eigenvalue modulus of a dense square matrix."""
    eigs = np.linalg.eigvals(a)
    mods = np.abs(eigs)
    return float(mods.max()), float(mods.min())


@dataclass(frozen=True)
class ProfileFamily:
    """Recipe producing a profile for any dimension n.

    kinds:
    * "uniform-random": n independent draws, uniform on [lo, hi], consuming
      the replication's own stream,
    * "grid": the deterministic grid from lo to hi,
    * "constant": lo repeated.
    """

    kind: Literal["uniform-random", "grid", "constant"]
    lo: float = 1.0
    hi: float = 1.0

    def realize(self, n: int, rng: np.random.Generator) -> SingularProfile:
        if self.kind == "uniform-random":
            return SingularProfile(tuple(rng.uniform(self.lo, self.hi, n)))
        if self.kind == "grid":
            return SingularProfile.uniform_grid(float(self.lo), float(self.hi), n)
        if self.kind == "constant":
            return SingularProfile.constant(float(self.lo), n)
        raise ValueError(f"unknown family kind {self.kind!r}")


@dataclass(frozen=True)
class ExperimentRecord:
    """One output row; the CSV schema is exactly these fields in this order."""

    n: int
    k: int
    seed: int
    stat: str
    value: float
    b: float
    a: float
    M: float
    m: float


CSV_COLUMNS = ("n", "k", "seed", "stat", "value", "b", "a", "M", "m")


def _spectrum_replication(
    family: ProfileFamily, n: int, seed: int, stream_index: int
) -> list[ExperimentRecord]:
    rng = rng_stream(seed, stream_index)
    profile = family.realize(n, rng)
    a_mat = sample_A(profile, rng)
    try:
        hi, lo = extreme_eigenvalues(a_mat)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(seed, stream_index) from exc
    b, a = profile.b, profile.a
    big, small = float(profile.M), float(profile.m)

    def row(stat: str, value: float) -> ExperimentRecord:
        return ExperimentRecord(n, 1, seed, stat, value, b, a, big, small)

    return [
        row("spectral_radius", hi),
        row("min_modulus", lo),
        row("radius_deviation", hi - b),
        row("min_deviation", a - lo),
    ]


def _spectrum_worker(args: tuple) -> list[ExperimentRecord]:
    return _spectrum_replication(*args)


def spectrum_records(
    family: ProfileFamily,
    n_values: Sequence[int],
    replications: int,
    seed: int,
    jobs: int = 1,
) -> list[ExperimentRecord]:
    """Extreme-eigenvalue records over an n-grid.

    Each (n, replication) pair owns stream index grid_position * replications
    + replication, so the output is independent of ``jobs``.
    """
    if replications < 1:
        raise ValueError("need at least one replication")
    tasks = [
        (family, n, seed, pos * replications + rep)
        for pos, n in enumerate(n_values)
        for rep in range(replications)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_spectrum_worker, tasks))
    else:
        chunks = [_spectrum_worker(t) for t in tasks]
    return [record for chunk in chunks for record in chunk]


@dataclass(frozen=True)
class RateFit:
    """Log-log regression of the median positive radius deviation against n.

    ``degenerate`` is set when fewer than two grid points have a positive
    median deviation; the slope is then reported as 0 (consistent with a
    deviation that has already collapsed to zero at these sizes).
    """

    slope: float
    stderr: float
    ci_low: float
    ci_high: float
    medians: tuple[tuple[int, float], ...]
    degenerate: bool


def _fit_loglog(points: Sequence[tuple[int, float]]) -> RateFit:
    positive = [(n, med) for n, med in points if med > 0]
    if len(positive) < 2:
        return RateFit(0.0, 0.0, 0.0, 0.0, tuple(points), True)
    xs = np.log([n for n, _ in positive])
    ys = np.log([med for _, med in positive])
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    if len(positive) > 2:
        sxx = float(np.sum((xs - xs.mean()) ** 2))
        stderr = math.sqrt(float(np.sum(resid**2)) / (len(positive) - 2) / sxx)
    else:
        stderr = 0.0
    return RateFit(
        float(slope),
        stderr,
        float(slope - 1.96 * stderr),
        float(slope + 1.96 * stderr),
        tuple(points),
        False,
    )


def radius_rate_experiment(
    family: ProfileFamily,
    n_grid: Sequence[int],
    replications: int,
    seed: int,
    jobs: int = 1,
) -> tuple[list[ExperimentRecord], RateFit]:
    """Records plus a fitted decay rate for the positive part of
    |largest eigenvalue| - b across the n-grid.

    Medians below the eigensolver rounding scale (eps * n * b) count as zero;
    otherwise a profile whose radius deviation is exactly 0 would feed pure
    rounding noise into the regression instead of flagging degeneracy.
    """
    records = spectrum_records(family, n_grid, replications, seed, jobs)
    eps = float(np.finfo(float).eps)
    points = []
    for n in n_grid:
        rows = [r for r in records if r.n == n and r.stat == "radius_deviation"]
        med = float(np.median([max(r.value, 0.0) for r in rows]))
        floor = 8 * eps * n * max(1.0, max(r.b for r in rows))
        points.append((n, med if med > floor else 0.0))
    return records, _fit_loglog(points)


@dataclass(frozen=True)
class TailPoint:
    delta: float
    p_radius_above: float
    p_min_below: float


def tail_experiment(
    profile: SingularProfile,
    n: int,
    deltas: Sequence[float],
    replications: int,
    seed: int,
    jobs: int = 1,
) -> tuple[list[ExperimentRecord], list[TailPoint]]:
    """Empirical exceedance frequencies for a fixed profile at dimension n:
    P(|largest eigenvalue| > b + delta) and P(|smallest| < a - delta) per
    delta.  Sharing one sample set across deltas makes both curves
    automatically nonincreasing in delta."""
    if n != profile.n:
        raise ValueError(f"profile has n={profile.n}, experiment asked for {n}")
    tasks = [
        (_FixedProfileFamily(profile.values), n, seed, rep)
        for rep in range(replications)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_spectrum_worker, tasks))
    else:
        chunks = [_spectrum_worker(t) for t in tasks]
    records = [record for chunk in chunks for record in chunk]
    radii = [r.value for r in records if r.stat == "spectral_radius"]
    minima = [r.value for r in records if r.stat == "min_modulus"]
    b, a = profile.b, profile.a
    points = [
        TailPoint(
            float(delta),
            sum(v > b + delta for v in radii) / replications,
            sum(v < a - delta for v in minima) / replications,
        )
        for delta in deltas
    ]
    return records, points


@dataclass(frozen=True)
class _FixedProfileFamily:
    """Internal family wrapper that always realizes one fixed profile."""

    values: tuple

    def realize(self, n: int, rng: np.random.Generator) -> SingularProfile:
        profile = SingularProfile(self.values)
        if profile.n != n:
            raise ValueError("fixed profile does not match requested dimension")
        return profile


def _format_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_records_csv(records: Iterable[ExperimentRecord], path: str) -> None:
    """CSV with the exact header n,k,seed,stat,value,b,a,M,m; floats are
    written with repr so rereading reproduces them bit for bit."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow([_format_value(getattr(r, c)) for c in CSV_COLUMNS])


def read_records_csv(path: str) -> list[ExperimentRecord]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != list(CSV_COLUMNS):
            raise ValueError(f"unexpected CSV header: {reader.fieldnames}")
        return [
            ExperimentRecord(
                n=int(row["n"]),
                k=int(row["k"]),
                seed=int(row["seed"]),
                stat=row["stat"],
                value=float(row["value"]),
                b=float(row["b"]),
                a=float(row["a"]),
                M=float(row["M"]),
                m=float(row["m"]),
            )
            for row in reader
        ]


def write_records_jsonl(records: Iterable[ExperimentRecord], path: str) -> None:
    """One JSON object per line, keys sorted, floats via repr round-trip."""
    with open(path, "w") as fh:
        for r in records:
            fh.write(json.dumps(asdict(r), sort_keys=True))
            fh.write("\n")


def read_records_jsonl(path: str) -> list[ExperimentRecord]:
    out = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                out.append(ExperimentRecord(**json.loads(line)))
    return out
