"""Dirac matrices in the standard (Dirac) representation and the 16-element Clifford basis."""

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple

import numpy as np

from src.utils.errors import StructuralError

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
_SIGMA_PAIRS: Tuple[Tuple[int, int], ...] = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


@dataclass(frozen=True, eq=False)
class GammaBasis:
    identity: np.ndarray
    gamma: np.ndarray  # (4, 4, 4), upper index mu
    gamma5: np.ndarray
    sigma: np.ndarray  # (4, 4, 4, 4), sigma[mu, nu] = (i/2)[gamma^mu, gamma^nu]

    def __post_init__(self) -> None:
        for mu in range(4):
            for nu in range(4):
                anti = self.gamma[mu] @ self.gamma[nu] + self.gamma[nu] @ self.gamma[mu]
                if not np.allclose(anti, 2.0 * METRIC[mu, nu] * self.identity, atol=0.0):
                    raise StructuralError(
                        f"gamma matrices violate the Clifford relation at ({mu}, {nu})"
                    )
        for array in (self.identity, self.gamma, self.gamma5, self.sigma):
            array.flags.writeable = False

    @classmethod
    def dirac(cls) -> "GammaBasis":
        zero = np.zeros((2, 2), dtype=complex)
        eye2 = np.eye(2, dtype=complex)
        gamma = np.empty((4, 4, 4), dtype=complex)
        gamma[0] = np.block([[eye2, zero], [zero, -eye2]])
        for i, pauli in enumerate(_PAULI, start=1):
            gamma[i] = np.block([[zero, pauli], [-pauli, zero]])
        gamma5 = 1j * gamma[0] @ gamma[1] @ gamma[2] @ gamma[3]
        sigma = np.zeros((4, 4, 4, 4), dtype=complex)
        for mu in range(4):
            for nu in range(4):
                sigma[mu, nu] = 0.5j * (gamma[mu] @ gamma[nu] - gamma[nu] @ gamma[mu])
        return cls(identity=np.eye(4, dtype=complex), gamma=gamma, gamma5=gamma5, sigma=sigma)

    def slash(self, vector: np.ndarray) -> np.ndarray:
        """v_mu gamma^mu for a contravariant (possibly complex) four-vector v^mu."""
        lowered = METRIC @ np.asarray(vector)
        return np.tensordot(lowered, self.gamma, axes=1)

    def elements(self) -> List[Tuple[str, np.ndarray]]:
        """The basis (1, i g5, g^mu, g5 g^mu, Sigma^{mu nu} for mu < nu) with labels."""
        items: List[Tuple[str, np.ndarray]] = [
            ("1", self.identity),
            ("i*g5", 1j * self.gamma5),
        ]
        items += [(f"g{mu}", self.gamma[mu]) for mu in range(4)]
        items += [(f"g5*g{mu}", self.gamma5 @ self.gamma[mu]) for mu in range(4)]
        items += [(f"S{mu}{nu}", self.sigma[mu, nu]) for mu, nu in _SIGMA_PAIRS]
        return items


@lru_cache(maxsize=1)
def dirac_basis() -> GammaBasis:
    return GammaBasis.dirac()


def dirac_decompose(matrix: np.ndarray, gamma: GammaBasis | None = None) -> np.ndarray:
    """Coefficients c_A with matrix = sum_A c_A Gamma_A over ``GammaBasis.elements``.

    Every basis element squares to +-1, so c_A = tr(Gamma_A^{-1} M) / 4.
    """
    gamma = gamma or dirac_basis()
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (4, 4):
        raise StructuralError(f"dirac_decompose expects a 4x4 matrix, got {matrix.shape}")
    coeffs = np.empty(16, dtype=complex)
    for index, (_label, element) in enumerate(gamma.elements()):
        square = np.trace(element @ element).real / 4.0
        coeffs[index] = np.trace(element @ matrix) / (4.0 * square)
    return coeffs


def dirac_recompose(coeffs: np.ndarray, gamma: GammaBasis | None = None) -> np.ndarray:
    gamma = gamma or dirac_basis()
    return sum(c * element for c, (_label, element) in zip(coeffs, gamma.elements()))


def basis_labels() -> List[str]:
    return [label for label, _element in dirac_basis().elements()]


__all__ = [
    "GammaBasis",
    "METRIC",
    "basis_labels",
    "dirac_basis",
    "dirac_decompose",
    "dirac_recompose",
]
