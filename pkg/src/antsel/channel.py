"""Correlated Rayleigh channels, imperfect estimates and receiver noise.

Receive-side correlation follows the exponential model
``corr[i, j] = phi ** |i - j|`` with real ``phi`` in ``[0, 1)``. The channel
seen by the array is ``corr_sqrt @ h_iid`` and the receiver's estimate is
formed on the uncorrelated component before the same colouring is applied::

    h_est = corr_sqrt @ (sqrt(1 - tau) * h_iid + sqrt(tau) * e_iid)

All samplers draw from an explicit generator; nothing touches global RNG
state.
"""

from dataclasses import dataclass
from functools import lru_cache
import numbers

import numpy as np

from antsel.exceptions import DimensionMismatch, InvalidPhi, InvalidTau, InvalidVariance
from antsel.linalg import hermitian_sqrt


class RngStream:
    """Counter-based random stream keyed by ``(master_seed, stream_id)``.

    The Philox key is derived from the master seed and every component of
    ``stream_id`` except the last, which is written into the high word of
    the counter. Each trial therefore owns a disjoint block of the Philox
    sequence, and equal ids always reproduce the same draws no matter which
    process creates the stream.

    Attributes
    ----------
    master_seed : int
    stream_id : tuple of int
        Usually ``(point_index, trial_index)``.
    generator : numpy.random.Generator
        Stateful generator; consecutive draws advance it.
    """

    def __init__(self, master_seed, stream_id=(0, 0)):
        stream_id = tuple(int(s) for s in stream_id)
        if not stream_id or any(s < 0 for s in stream_id):
            raise ValueError("stream_id must be a non-empty tuple of non-negative ints")
        self.master_seed = int(master_seed)
        self.stream_id = stream_id
        key = _philox_key(self.master_seed, stream_id[:-1])
        bitgen = np.random.Philox(key=key, counter=[0, 0, 0, stream_id[-1]])
        self.generator = np.random.Generator(bitgen)

    def __repr__(self):
        return f"RngStream(master_seed={self.master_seed}, stream_id={self.stream_id})"


def trial_generators(master_seed, prefix, trials):
    """Yield ``(trial, generator)`` for each trial index in ``trials``.

    Equivalent to ``RngStream(master_seed, prefix + (trial,)).generator`` for
    every trial, but reuses one bit generator and only rewinds its counter,
    which is several times cheaper in tight Monte Carlo loops. Each yielded
    generator is only valid until the next iteration.
    """
    key = _philox_key(int(master_seed), tuple(int(p) for p in prefix))
    bitgen = np.random.Philox(key=key)
    gen = np.random.Generator(bitgen)
    state = bitgen.state
    for trial in trials:
        state["state"] = {
            "counter": np.array([0, 0, 0, trial], dtype=np.uint64),
            "key": key,
        }
        state["buffer_pos"] = 4
        state["has_uint32"] = 0
        state["uinteger"] = 0
        bitgen.state = state
        yield trial, gen


@lru_cache(maxsize=1024)
def _philox_key(master_seed, prefix):
    seq = np.random.SeedSequence(master_seed & (2**64 - 1), spawn_key=prefix)
    return seq.generate_state(2, np.uint64)


def _generator(rng):
    if isinstance(rng, RngStream):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def _cn(gen, shape):
    # CN(0, 1): variance 1/2 on each of the real and imaginary parts
    pairs = gen.standard_normal(tuple(shape) + (2,))
    return pairs.view(np.complex128)[..., 0] * np.sqrt(0.5)


@dataclass(frozen=True, eq=False)
class CorrelationModel:
    m: int
    phi: float
    corr: np.ndarray
    corr_sqrt: np.ndarray


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    h_iid: np.ndarray
    h_true: np.ndarray
    h_est: np.ndarray
    tau: float
    e_iid: np.ndarray


def _check_count(m):
    if isinstance(m, bool) or not isinstance(m, numbers.Integral) or m < 1:
        raise ValueError(f"antenna count must be a positive integer, got {m!r}")
    return int(m)


def validate_phi(phi):
    if isinstance(phi, (bool, complex)) or not isinstance(phi, numbers.Real):
        raise InvalidPhi(f"phi must be a real number, got {phi!r}")
    phi = float(phi)
    if not 0.0 <= phi < 1.0:
        raise InvalidPhi(f"phi must lie in [0, 1), got {phi}")
    return phi


def validate_tau(tau):
    if isinstance(tau, (bool, complex)) or not isinstance(tau, numbers.Real):
        raise InvalidTau(f"tau must be a real number, got {tau!r}")
    tau = float(tau)
    if not 0.0 <= tau <= 1.0:
        raise InvalidTau(f"tau must lie in [0, 1], got {tau}")
    return tau


def build_correlation(m, phi):
    """Exponential receive correlation model for an ``m``-element array.

    >>> build_correlation(3, 0.5).corr
    array([[1.  , 0.5 , 0.25],
           [0.5 , 1.  , 0.5 ],
           [0.25, 0.5 , 1.  ]])
    """
    m = _check_count(m)
    phi = validate_phi(phi)
    idx = np.arange(m)
    corr = phi ** np.abs(idx[:, None] - idx[None, :]).astype(float)
    corr_sqrt = hermitian_sqrt(corr)
    corr.setflags(write=False)
    corr_sqrt.setflags(write=False)
    return CorrelationModel(m=m, phi=phi, corr=corr, corr_sqrt=corr_sqrt)


def sample_iid_channel(m, rng):
    """Draw ``m`` i.i.d. CN(0, 1) channel coefficients."""
    return _cn(_generator(rng), (_check_count(m),))


def apply_correlation(model, h_iid):
    """Colour i.i.d. channel(s) with the model's square root.

    ``h_iid`` may carry leading batch axes; the last axis must have length
    ``model.m``.
    """
    h_iid = np.asarray(h_iid)
    if h_iid.shape[-1:] != (model.m,):
        raise DimensionMismatch(
            f"channel has shape {h_iid.shape}, model expects {model.m} antennas"
        )
    return h_iid @ model.corr_sqrt.T


def corrupt_estimate(h_iid, tau, rng, error=None):
    """Imperfect estimate of the uncorrelated channel component.

    Returns ``sqrt(1 - tau) * h_iid + sqrt(tau) * e_iid``. A fresh
    ``e_iid ~ CN(0, I)`` is drawn from ``rng`` unless ``error`` is supplied.
    The error vector is drawn even when ``tau == 0`` so that the stream
    layout does not depend on ``tau``; in that case the returned estimate is
    an exact copy of ``h_iid``.
    """
    tau = validate_tau(tau)
    h_iid = np.asarray(h_iid)
    if error is None:
        error = _cn(_generator(rng), h_iid.shape)
    elif np.shape(error) != h_iid.shape:
        raise DimensionMismatch("error vector shape differs from channel shape")
    if tau == 0.0:
        return h_iid.astype(np.complex128, copy=True)
    return np.sqrt(1.0 - tau) * h_iid + np.sqrt(tau) * np.asarray(error)


def sample_realization(model, tau, rng):
    """Draw one coherence block: true channel and the receiver's estimate.

    Draw order is ``h_iid`` then ``e_iid``, both from ``rng``.
    """
    tau = validate_tau(tau)
    gen = _generator(rng)
    h_iid = sample_iid_channel(model.m, gen)
    e_iid = sample_iid_channel(model.m, gen)
    h_hat_iid = corrupt_estimate(h_iid, tau, gen, error=e_iid)
    return ChannelRealization(
        h_iid=h_iid,
        h_true=apply_correlation(model, h_iid),
        h_est=apply_correlation(model, h_hat_iid),
        tau=tau,
        e_iid=e_iid,
    )


def sample_noise(m, noise_var, rng, n_symbols=None):
    """AWGN with CN(0, noise_var) entries.

    Shape is ``(m,)``, or ``(n_symbols, m)`` when ``n_symbols`` is given.
    """
    if isinstance(noise_var, bool) or not isinstance(noise_var, numbers.Real):
        raise InvalidVariance(f"noise variance must be real, got {noise_var!r}")
    if not noise_var > 0 or not np.isfinite(noise_var):
        raise InvalidVariance(f"noise variance must be positive, got {noise_var}")
    m = _check_count(m)
    shape = (m,) if n_symbols is None else (int(n_symbols), m)
    return np.sqrt(noise_var) * _cn(_generator(rng), shape)
