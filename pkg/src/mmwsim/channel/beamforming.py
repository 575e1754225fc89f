from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class BeamformingPair:
    tx_weights: np.ndarray
    rx_weights: np.ndarray

    def __post_init__(self):
        for name in ("tx_weights", "rx_weights"):
            w = getattr(self, name)
            if abs(np.linalg.norm(w) - 1.0) > 1e-9:
                raise ValueError(f"{name} must have unit norm")


def power_iteration_beamforming(H: np.ndarray, iterations: int = 500, tolerance: float = 1e-13) -> BeamformingPair:
    """Dominant left/right singular vectors of ``H`` by power iteration.

    Iterates on ``H^H H`` for the transmit vector and sets
    ``rx = H tx / |H tx|``. Stops after ``iterations`` steps or once the
    relative change of the gain estimate drops below ``tolerance``.
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2:
        raise ValueError("channel matrix must be 2-D")
    gram = H.conj().T @ H
    norms = np.linalg.norm(gram, axis=0)
    if not np.any(norms > 0):
        raise ValueError("zero channel matrix has no dominant direction")

    # start from the strongest column of the Gram matrix: it lies in the
    # range of H^H H, so it is never orthogonal to the whole signal space
    v = gram[:, int(np.argmax(norms))]
    v = v / np.linalg.norm(v)
    gain = float(np.real(v.conj() @ gram @ v))
    for _ in range(iterations):
        x = gram @ v
        v = x / np.linalg.norm(x)
        new_gain = float(np.real(v.conj() @ gram @ v))
        converged = abs(new_gain - gain) <= tolerance * new_gain
        gain = new_gain
        if converged:
            break

    y = H @ v
    return BeamformingPair(tx_weights=v, rx_weights=y / np.linalg.norm(y))


def beamforming_gain(H: np.ndarray, pair: BeamformingPair) -> float:
    """``|w_rx^H H w_tx|^2``."""
    n_rx, n_tx = H.shape
    if pair.rx_weights.shape[0] != n_rx or pair.tx_weights.shape[0] != n_tx:
        raise ValueError(
            f"weights ({pair.rx_weights.shape[0]}, {pair.tx_weights.shape[0]}) "
            f"do not match channel {H.shape}"
        )
    return float(abs(pair.rx_weights.conj() @ H @ pair.tx_weights) ** 2)
