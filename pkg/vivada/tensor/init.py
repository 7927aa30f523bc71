import numpy as np

from vivada.constants import RECURRENT_INIT_RANGE


def uniform(rng: np.random.Generator, shape, limit: float = RECURRENT_INIT_RANGE) -> np.ndarray:
    return rng.uniform(-limit, limit, size=shape).astype(np.float32)


def glorot(rng: np.random.Generator, shape, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(np.float32)


def zeros(shape) -> np.ndarray:
    return np.zeros(shape, dtype=np.float32)
