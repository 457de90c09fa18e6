import numpy as np
from hypothesis import HealthCheck, settings

from ellipsum import Ellipsoid

settings.register_profile(
    "ellipsum",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ellipsum")


def spd_matrix(rng: np.random.Generator, dim: int, log_lo: float = -2.0, log_hi: float = 2.0) -> np.ndarray:
    """Random SPD matrix with log-uniform eigenvalues and a random orthogonal frame."""
    eigs = 10.0 ** rng.uniform(log_lo, log_hi, dim)
    frame, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    m = (frame * eigs) @ frame.T
    return 0.5 * (m + m.T)


def random_ellipsoid(rng: np.random.Generator, dim: int, log_lo: float = -2.0, log_hi: float = 2.0) -> Ellipsoid:
    return Ellipsoid(center=rng.normal(size=dim), shape=spd_matrix(rng, dim, log_lo, log_hi))
