"""BPSK transmit/receive chain with MRC and sparse-selection combining."""

import numpy as np

from antsel.exceptions import DimensionMismatch, InvalidVariance


def bpsk_modulate(bit, sigma_x2=1.0):
    """Map bit 0 to ``+sqrt(sigma_x2)`` and bit 1 to ``-sqrt(sigma_x2)``.

    Works elementwise on arrays of bits.
    """
    if not sigma_x2 > 0:
        raise InvalidVariance(f"sigma_x2 must be positive, got {sigma_x2!r}")
    bit = np.asarray(bit)
    if np.any((bit != 0) & (bit != 1)):
        raise ValueError("bits must be 0 or 1")
    sym = np.sqrt(sigma_x2) * (1.0 - 2.0 * bit)
    return float(sym) if sym.ndim == 0 else sym


def _same_length(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[-1:] != b.shape[-1:]:
        raise DimensionMismatch(f"lengths differ: {a.shape} vs {b.shape}")
    return a, b


def receive(channel_true, symbol, noise):
    """``y = h x + v``."""
    h, v = _same_length(channel_true, noise)
    return h * symbol + v


def combine_mrc(channel_est, y):
    """``h_est^H y`` over all branches, unnormalised."""
    h, y = _same_length(channel_est, y)
    return np.sum(np.conj(h) * y, axis=-1)


def combine_selection(sel, y):
    """``h_s^H y``; only antennas in the support contribute.

    ``sel`` is a :class:`~antsel.selection.SelectionVector` or a raw
    weight array.
    """
    w = getattr(sel, "weights", sel)
    w, y = _same_length(w, y)
    return np.sum(np.conj(w) * y, axis=-1)


def bpsk_detect(combined):
    """Hard decision: 0 when the real part is >= 0, else 1."""
    bits = (np.real(np.asarray(combined)) < 0).astype(np.int8)
    return int(bits) if bits.ndim == 0 else bits
