import numpy as np
import pytest

from massbath import XState, to_product_basis


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


def wootters_concurrence(rho: np.ndarray) -> float:
    """Eigenvalue construction of the concurrence for an arbitrary 4x4 state."""
    sigma_y = np.array([[0.0, -1j], [1j, 0.0]])
    flip = np.kron(sigma_y, sigma_y)
    rho_tilde = flip @ rho.conj() @ flip
    evals = np.linalg.eigvals(rho @ rho_tilde)
    lams = np.sqrt(np.abs(np.sort(evals.real)))
    return max(0.0, lams[3] - lams[2] - lams[1] - lams[0])


def partial_transpose_negativity(rho: np.ndarray) -> float:
    """Doubled sum of negative eigenvalues of the partial transpose."""
    pt = rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
    evals = np.linalg.eigvalsh(pt)
    return float(np.sum(np.maximum(0.0, -2.0 * evals)))


def state_distance(x: XState, y: XState) -> float:
    return max(
        abs(x.pop_g - y.pop_g),
        abs(x.pop_a - y.pop_a),
        abs(x.pop_s - y.pop_s),
        abs(x.pop_e - y.pop_e),
        abs(x.coh_ge - y.coh_ge),
        abs(x.coh_as - y.coh_as),
    )


def check_block_positivity(state: XState, tol: float = 1e-9) -> None:
    pops = state.populations()
    assert pops.min() >= -tol
    assert abs(pops.sum() - 1.0) <= 1e-10
    assert abs(state.coh_ge) ** 2 <= state.pop_g * state.pop_e + tol
    assert abs(state.coh_as) ** 2 <= state.pop_a * state.pop_s + tol


def off_x_magnitude(state: XState) -> float:
    rho = to_product_basis(state)
    mask = np.zeros((4, 4), dtype=bool)
    for i in range(4):
        mask[i, i] = True
        mask[i, 3 - i] = True
    return float(np.max(np.abs(rho[~mask])))
