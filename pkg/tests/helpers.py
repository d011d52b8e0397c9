import numpy as np


def random_cn(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_hpd(rng, m, eps=1e-3):
    g = random_cn(rng, (m, m))
    return g @ g.conj().T + eps * np.eye(m)
