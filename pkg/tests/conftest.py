import numpy as np
import pytest

from mirlab.data import build_dataset
from mirlab.numerics import Tensor, backward, tsum


@pytest.fixture(scope="session")
def small_dataset():
    """8 episodes per pairing: 16 paired trajectories, 12 train / 4 holdout."""
    return build_dataset(n_episodes_per_pairing=8, seed=3)


def finite_diff_check(fn, tensors, rel_tol=1e-4, eps=1e-6, probes=20, seed=0):
    """Compare analytic gradients of scalar fn(*tensors) against central
    finite differences at randomly probed parameter entries."""
    for t in tensors:
        t.zero_grad()
    loss = fn(*tensors)
    backward(loss)
    rng = np.random.default_rng(seed)
    checked = 0
    for t in tensors:
        flat = t.data.reshape(-1)
        grad = t.grad.reshape(-1)
        for _ in range(probes):
            i = int(rng.integers(0, flat.size))
            orig = flat[i]
            flat[i] = orig + eps
            hi = fn(*tensors).item()
            flat[i] = orig - eps
            lo = fn(*tensors).item()
            flat[i] = orig
            num = (hi - lo) / (2 * eps)
            denom = max(abs(num), abs(grad[i]), 1e-8)
            assert abs(num - grad[i]) / denom < rel_tol, (
                f"grad mismatch at flat index {i}: analytic {grad[i]}, "
                f"numeric {num}"
            )
            checked += 1
    return checked


@pytest.fixture
def fdcheck():
    return finite_diff_check
