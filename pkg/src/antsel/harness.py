"""Monte Carlo BER simulation over parameter sweeps.

Every trial (one channel realization, i.e. one coherence block) owns the
random stream ``RngStream(seed, (point.stream, trial))`` and draws, in
order: the i.i.d. channel, the estimation error, the noise and finally one
uniform per symbol that decides its bit. Trials are processed in fixed-size chunks whose size depends only
on the point, so the numbers produced never depend on how many worker
processes share the work.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
import math
import numbers
import os
import time

import numpy as np

from antsel.channel import (
    _cn,
    apply_correlation,
    build_correlation,
    corrupt_estimate,
    trial_generators,
    validate_phi,
    validate_tau,
)
from antsel.exceptions import InvalidAxisValue, InvalidParams
from antsel.selection import build_problem, omp_kernel, omp_select

SCHEMES = ("omp-selection", "mrc")
SWEEP_AXES = ("snr_db", "phi", "k_s", "tau")
SIGMA_X2 = 1.0
# complex entries of the per-chunk (trials, symbols, antennas) arrays
CHUNK_BUDGET = 1 << 19
MAX_CHUNK_TRIALS = 256


@dataclass(frozen=True)
class SimPoint:
    """One operating point.

    ``stream`` selects the random substream family; points that share
    ``seed`` and ``stream`` see identical channels, noise and bits, which
    makes paired scheme comparisons low-variance.
    """

    m: int
    k_s: int
    phi: float
    tau: float
    snr_db: float
    scheme: str = "omp-selection"
    trials: int = 10_000
    symbols_per_channel: int = 100
    seed: int = 1
    stream: int = 0

    def __post_init__(self):
        for name in ("m", "k_s", "trials", "symbols_per_channel", "seed", "stream"):
            val = getattr(self, name)
            if isinstance(val, bool) or not isinstance(val, numbers.Integral):
                raise InvalidParams(f"{name} must be an integer, got {val!r}")
        if self.m < 1:
            raise InvalidParams(f"m must be >= 1, got {self.m}")
        if not 1 <= self.k_s <= self.m:
            raise InvalidParams(f"k_s must lie in [1, m={self.m}], got {self.k_s}")
        if self.trials < 1 or self.symbols_per_channel < 1:
            raise InvalidParams("trials and symbols_per_channel must be >= 1")
        if self.seed < 0 or self.stream < 0:
            raise InvalidParams("seed and stream must be non-negative")
        if self.scheme not in SCHEMES:
            raise InvalidParams(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        try:
            validate_phi(self.phi)
            validate_tau(self.tau)
        except ValueError as exc:
            raise InvalidParams(str(exc)) from None
        if not math.isfinite(self.snr_db):
            raise InvalidParams("snr_db must be finite")

    @property
    def noise_var(self):
        return SIGMA_X2 * 10.0 ** (-self.snr_db / 10.0)


@dataclass(frozen=True)
class BerRecord:
    point: SimPoint
    bits_sent: int
    bit_errors: int

    @property
    def ber(self):
        return self.bit_errors / self.bits_sent

    @property
    def stderr(self):
        p = self.ber
        return math.sqrt(p * (1.0 - p) / self.bits_sent)


def _chunk_size(point):
    per_trial = point.symbols_per_channel * point.m
    return max(1, min(MAX_CHUNK_TRIALS, CHUNK_BUDGET // per_trial))


def _chunks(point):
    size = _chunk_size(point)
    return [(lo, min(lo + size, point.trials)) for lo in range(0, point.trials, size)]


def _draw_chunk(point, lo, hi):
    # per trial: h_iid (m), e_iid (m), noise (symbols x m), then bits
    m, n_sym = point.m, point.symbols_per_channel
    n_cn = (2 + n_sym) * m
    draws = np.empty((hi - lo, n_cn), dtype=np.complex128)
    uniforms = np.empty((hi - lo, n_sym))
    for trial, gen in trial_generators(point.seed, (point.stream,), range(lo, hi)):
        draws[trial - lo] = _cn(gen, (n_cn,))
        uniforms[trial - lo] = gen.random(n_sym)
    h_iid = draws[:, :m]
    e_iid = draws[:, m : 2 * m]
    noise = draws[:, 2 * m :].reshape(hi - lo, n_sym, m)
    bits = (uniforms < 0.5).astype(np.int8)
    return h_iid, e_iid, bits, noise


def trial_errors(point, lo, hi, model=None):
    """Bit-error counts for trials ``lo .. hi-1`` of ``point``."""
    model = model or build_correlation(point.m, point.phi)
    h_iid, e_iid, bits, noise = _draw_chunk(point, lo, hi)
    h_true = apply_correlation(model, h_iid)
    h_est = apply_correlation(model, corrupt_estimate(h_iid, point.tau, None, error=e_iid))

    if point.scheme == "mrc":
        weights = h_est
    else:
        problem = build_problem(h_est, SIGMA_X2, point.noise_var)
        weights, _, _ = omp_kernel(problem.l_mat, problem.r_mat, problem.target, point.k_s)

    x = np.sqrt(SIGMA_X2) * (1.0 - 2.0 * bits)
    y = h_true[:, None, :] * x[..., None] + np.sqrt(point.noise_var) * noise
    z = np.sum(np.conj(weights)[:, None, :] * y, axis=-1)
    detected = (z.real < 0).astype(np.int8)
    return np.count_nonzero(detected != bits, axis=1)


def _run_chunk(args):
    point, lo, hi = args
    return int(trial_errors(point, lo, hi).sum())


def default_workers():
    env = os.environ.get("ANTSEL_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InvalidParams(f"ANTSEL_WORKERS must be an integer, got {env!r}") from None
    return 1


def run_points(points, workers=None):
    """Simulate several points; records come back in input order."""
    points = list(points)
    workers = default_workers() if workers is None else int(workers)
    tasks = [(i, (p, lo, hi)) for i, p in enumerate(points) for lo, hi in _chunks(p)]
    errors = [0] * len(points)
    if workers <= 1 or len(tasks) <= 1:
        models = {}
        for i, (p, lo, hi) in tasks:
            key = (p.m, p.phi)
            if key not in models:
                models[key] = build_correlation(p.m, p.phi)
            errors[i] += int(trial_errors(p, lo, hi, models[key]).sum())
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            counts = pool.map(_run_chunk, [t for _, t in tasks], chunksize=1)
            for (i, _), n in zip(tasks, counts):
                errors[i] += n
    return [
        BerRecord(p, p.trials * p.symbols_per_channel, e) for p, e in zip(points, errors)
    ]


def run_point(point, workers=None):
    """BER of one operating point; deterministic given the point."""
    return run_points([point], workers)[0]


def run_sweep(base, axis, values, workers=None):
    """Vary one field of ``base``; record ``i`` uses substream ``stream=i``."""
    if axis not in SWEEP_AXES:
        raise InvalidParams(f"axis must be one of {SWEEP_AXES}, got {axis!r}")
    points = []
    for i, val in enumerate(values):
        try:
            points.append(replace(base, **{axis: val, "stream": i}))
        except InvalidParams as exc:
            raise InvalidAxisValue(axis, val, str(exc)) from None
    return run_points(points, workers)


def analytic_mrc_ber(m, snr_linear):
    """Exact BPSK error probability of ``m``-branch MRC in i.i.d. Rayleigh fading.

    ``p^m * sum_k C(m-1+k, k) (1-p)^k`` with
    ``p = (1 - sqrt(g / (1 + g))) / 2``.
    """
    if isinstance(m, bool) or not isinstance(m, numbers.Integral) or m < 1:
        raise InvalidParams(f"m must be a positive integer, got {m!r}")
    if not snr_linear > 0 or math.isinf(snr_linear):
        raise InvalidParams(f"snr_linear must be positive and finite, got {snr_linear!r}")
    mu = math.sqrt(snr_linear / (1.0 + snr_linear))
    p = 0.5 * (1.0 - mu)
    return p**m * sum(math.comb(m - 1 + k, k) * (1.0 - p) ** k for k in range(m))


def measure_omp_runtime(m_values, k_s, repeats, seed=0):
    """Mean wall time of :func:`omp_select` per array size.

    Problems are random i.i.d. channels at unit SNR, built outside the timed
    region. Returns ``[(m, seconds), ...]``; empty when ``repeats == 0``.
    """
    if repeats <= 0:
        return []
    gen = np.random.default_rng(seed)
    out = []
    for m in m_values:
        if m < k_s:
            raise InvalidParams(f"m={m} is smaller than k_s={k_s}")
        problems = [build_problem(_cn(gen, (m,)), 1.0, 1.0) for _ in range(repeats)]
        omp_select(problems[0], k_s)  # warm-up
        total = 0.0
        for prob in problems:
            t0 = time.perf_counter()
            omp_select(prob, k_s)
            total += time.perf_counter() - t0
        out.append((m, total / repeats))
    return out


def point_fields():
    return [f.name for f in fields(SimPoint)]
