"""
Results of the matrix factorizations.
"""
import numpy as np
from pydantic import BaseModel, ConfigDict

from src.models.circuit import Circuit


class CsdResult(BaseModel):
    """U = (k00 + k01) . A(theta_y) . (k10 + k11), A a multiplexed R_Y on the first qubit."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    k00: np.ndarray
    k01: np.ndarray
    k10: np.ndarray
    k11: np.ndarray
    theta_y: np.ndarray

    @property
    def left(self) -> np.ndarray:
        return np.stack([self.k00, self.k01])

    @property
    def right(self) -> np.ndarray:
        return np.stack([self.k10, self.k11])


class FlagFactorization(BaseModel):
    """V = diag(delta) . matrix(flag)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    flag: Circuit
    delta: np.ndarray


class TwoQubitKak(BaseModel):
    """V = e^{i alpha} CNOT . R_ZZ(-psi) . (a x b) . exp(-i(theta XX + phi ZZ)/2) . (c x d)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    alpha: float
    psi: float
    theta: float
    phi: float
