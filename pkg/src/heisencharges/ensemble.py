"""Random product states, deviation statistics and superposition diagnostics.

Random states come from numpy's Philox-4x64 counter-based generator keyed by
``(seed, state_index)``.  Each state draws ``ceil(M/64)`` raw 64-bit words and
reads their bits least-significant first; bit ``b`` gives site ``1 + b``.  A
state therefore depends only on ``(M, seed, index)``, never on how work is
split between processes.
"""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .conjecture import GridSpec, deviation
from .lax import lax_blocks
from .monodromy import SpinState
from .spin_algebra import check_jj, top_sector

PRNG_NAME = "numpy.random.Philox(key=seed + (index << 64)), raw uint64, LSB-first bits"
REPORT_SCHEMA = "heisencharges.ensemble_report/1"
ANNIHILATION_TOL = 1e-13
_MASK64 = (1 << 64) - 1


def _bit_generator(seed: int, index: int) -> np.random.Philox:
    return np.random.Philox(key=(int(seed) & _MASK64) | (int(index) << 64))


def random_state(M: int, seed: int, index: int = 0) -> SpinState:
    """I.i.d. uniform sites in ``{1, 2}``; identical for identical ``(M, seed, index)``."""
    if M < 1:
        raise ValueError("M must be >= 1")
    words = _bit_generator(seed, index).random_raw((M + 63) // 64)
    bits = np.unpackbits(words.astype("<u8").view(np.uint8), bitorder="little")[:M]
    return SpinState(tuple(int(b) + 1 for b in bits))


def is_nongeneric(psi) -> dict:
    """Whether ``psi`` is a power of a shorter word, with its smallest period."""
    s = SpinState.coerce(psi).sites
    M = len(s)
    for p in range(1, M):
        if M % p == 0 and s == s[:p] * (M // p):
            return {"periodic": True, "period": p}
    return {"periodic": False, "period": M}


@dataclass(frozen=True)
class EnsembleConfig:
    M: int
    jj: int
    count: int
    seed: int
    grid: GridSpec = GridSpec()
    backend: str = "auto"
    parallelism: int = 1
    bins: int = 20

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.M < 1:
            raise ValueError("M must be >= 1")
        check_jj(self.jj)


@dataclass
class StateResult:
    psi: str
    delta: float | None
    nongeneric_flag: bool
    excluded_points: list = field(default_factory=list)
    error: str | None = None


@dataclass
class EnsembleReport:
    per_state: list
    quantiles: dict
    histogram: dict
    seed: int
    config: dict
    failed: int = 0

    def to_json_dict(self) -> dict:
        return {"schema": REPORT_SCHEMA, "prng": PRNG_NAME, "seed": self.seed, "config": self.config,
                "quantiles": self.quantiles, "histogram": self.histogram, "failed": self.failed,
                "per_state": [asdict(s) for s in self.per_state]}

    def to_json(self) -> str:
        return json.dumps(_round_floats(self.to_json_dict()), sort_keys=True)

    def histogram_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", "count"])
        edges, counts = self.histogram["edges"], self.histogram["counts"]
        for lo, hi, c in zip(edges[:-1], edges[1:], counts):
            w.writerow([f"{lo:.15g}", f"{hi:.15g}", c])
        return buf.getvalue()

    @property
    def deltas(self) -> np.ndarray:
        return np.array([s.delta for s in self.per_state if s.delta is not None])


def _round_floats(obj):
    if isinstance(obj, float):
        return float(f"{obj:.15g}") if np.isfinite(obj) else str(obj)
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _one_state(args) -> StateResult:
    cfg, index = args
    psi = random_state(cfg.M, cfg.seed, index)
    flag = is_nongeneric(psi)["periodic"]
    try:
        res = deviation(psi, cfg.jj, cfg.grid, backend=cfg.backend)
    except (ArithmeticError, ValueError) as exc:
        return StateResult(str(psi), None, flag, [], f"{type(exc).__name__}: {exc}")
    if not np.isfinite(res.delta):
        return StateResult(str(psi), None, flag, res.excluded, "no finite grid point")
    return StateResult(str(psi), res.delta, flag, res.excluded)


def run_ensemble(cfg: EnsembleConfig, progress=None) -> EnsembleReport:
    """Deviation of ``cfg.count`` random states; per-state failures are recorded."""
    jobs = [(cfg, i) for i in range(cfg.count)]
    if cfg.parallelism > 1:
        with ProcessPoolExecutor(max_workers=cfg.parallelism) as ex:
            results = list(ex.map(_one_state, jobs, chunksize=max(1, cfg.count // (4 * cfg.parallelism))))
    else:
        results = []
        for i, job in enumerate(jobs):
            results.append(_one_state(job))
            if progress:
                progress(i + 1, cfg.count)
    deltas = np.array([r.delta for r in results if r.delta is not None])
    if deltas.size:
        q = np.quantile(deltas, [0, 0.25, 0.5, 0.75, 1.0])
        quantiles = dict(zip(["min", "q25", "median", "q75", "max"], map(float, q)))
        top = float(deltas.max()) if deltas.max() > 0 else 1.0
        counts, edges = np.histogram(deltas, bins=cfg.bins, range=(0.0, top))
        histogram = {"edges": [float(e) for e in edges], "counts": [int(c) for c in counts]}
    else:
        quantiles = {k: None for k in ["min", "q25", "median", "q75", "max"]}
        histogram = {"edges": [], "counts": []}
    config = asdict(cfg)
    config.pop("parallelism")
    return EnsembleReport(results, quantiles, histogram, cfg.seed, config,
                          failed=sum(r.delta is None for r in results))


# superpositions ---------------------------------------------------------------

@dataclass(frozen=True)
class GeneralStatePair:
    psi_m: SpinState
    psi_n: SpinState

    def __post_init__(self):
        m, n = SpinState.coerce(self.psi_m), SpinState.coerce(self.psi_n)
        if len(m) != len(n):
            raise ValueError("states must have equal length")
        if m == n:
            raise ValueError("states must differ in at least one site")
        object.__setattr__(self, "psi_m", m)
        object.__setattr__(self, "psi_n", n)


def pair_product(pair: GeneralStatePair, jj: int, mu: float, x: float | None = None,
                 convention: str = "unitary") -> np.ndarray:
    """Full-space product of blocks ``L^{psi_m(i)}_{psi_n(i)}``, site 1 rightmost."""
    blk = lax_blocks(check_jj(jj), mu, x, convention=convention)
    n = (jj + 1) ** 2
    out = np.eye(n, dtype=complex)
    for a, b in zip(pair.psi_m, pair.psi_n):
        out = blk[(a, b)] @ out
    return out


def offdiagonal_decay(pair: GeneralStatePair, jj: int, mu: float, repeats: int,
                      convention: str = "unitary") -> np.ndarray:
    """``||P^k restricted to inputs in W(j, j)||_2`` for ``k = 1..repeats``.

    ``P`` is the one-period product from :func:`pair_product`; inputs are the
    top sector, outputs are the whole space (off-diagonal blocks change S^z).
    """
    if mu == 0:
        raise ValueError("mu must be nonzero")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    p = pair_product(pair, jj, mu, convention=convention)
    cols = top_sector(jj).flat
    acc = p[:, cols]
    out = []
    for _ in range(repeats):
        out.append(float(np.linalg.norm(acc, 2)))
        acc = p @ acc
    return np.array(out)


def decays(norms, factor: float = 0.1) -> bool:
    """Exact annihilation at one repetition, or strict ``factor`` decay and monotone."""
    norms = np.asarray(norms)
    if norms[0] <= ANNIHILATION_TOL:
        return True
    mono = bool(np.all(np.diff(norms) <= 1e-12 * norms[0]))
    return bool(mono and norms[-1] < factor * norms[0])


def contraction_bound(jj: int, mu: float, x: float, block: str = "b12",
                      convention: str = "unitary") -> float:
    """Largest singular value of an off-diagonal block on the full space."""
    blk = lax_blocks(check_jj(jj), mu, x, convention=convention)
    return float(np.linalg.norm(getattr(blk, block), 2))


def contraction_sup(jj: int, lo: float = -10.0, hi: float = 10.0, points: int = 201,
                    block: str = "b12") -> tuple[float, float, float]:
    """``(sup, mu, x)`` of :func:`contraction_bound` over a square real grid."""
    g = np.linspace(lo, hi, points)
    best = (-1.0, 0.0, 0.0)
    for mu in g:
        blk = lax_blocks(check_jj(jj), np.full(points, mu), g, convention="unitary")
        norms = np.linalg.norm(getattr(blk, block), 2, axis=(-2, -1))
        k = int(np.argmax(norms))
        if norms[k] > best[0]:
            best = (float(norms[k]), float(mu), float(g[k]))
    return best
