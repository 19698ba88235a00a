"""
Minkowski Algebra Module

Vectors and bivectors of Minkowski 4-space with the signature (+,+,+,-)
inner product. The dataclasses are the public value types; the
``*_array`` kernels work on the last axis of numpy arrays and are what
the surface and oracle modules use for whole-grid evaluation.

Bivector coordinates are always ordered (12, 13, 14, 23, 24, 34).
"""

from dataclasses import dataclass, fields
from typing import Tuple, Union

import numpy as np
from scipy.spatial.transform import Rotation

SIGNATURE = np.array([1.0, 1.0, 1.0, -1.0])
BIVECTOR_PAIRS: Tuple[Tuple[int, int], ...] = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
BIVECTOR_LABELS: Tuple[str, ...] = ("c12", "c13", "c14", "c23", "c24", "c34")
# <e_i^e_j, e_i^e_j> is -1 exactly when one index is 4
BIVECTOR_SIGNS = np.array([1.0, 1.0, -1.0, 1.0, -1.0, -1.0])
DEFAULT_CAUSAL_TOL = 1e-9

SPACELIKE = "spacelike"
TIMELIKE = "timelike"
LIGHTLIKE = "lightlike"

_I = np.array([i for i, _ in BIVECTOR_PAIRS])
_J = np.array([j for _, j in BIVECTOR_PAIRS])


@dataclass(frozen=True)
class SpacetimeVector:
    """Point or vector of R^4_1 in the fixed basis e1..e4 (e4 timelike)."""

    x1: float
    x2: float
    x3: float
    x4: float

    @classmethod
    def from_array(cls, values) -> "SpacetimeVector":
        arr = np.asarray(values, dtype=float).reshape(4)
        return cls(*(float(c) for c in arr))

    @classmethod
    def basis(cls, index: int) -> "SpacetimeVector":
        """Return e_index for index in 1..4."""
        if index not in (1, 2, 3, 4):
            raise ValueError(f"basis index must be 1..4, got {index}")
        arr = np.zeros(4)
        arr[index - 1] = 1.0
        return cls.from_array(arr)

    def to_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2, self.x3, self.x4])

    def __add__(self, other: "SpacetimeVector") -> "SpacetimeVector":
        return SpacetimeVector.from_array(self.to_array() + other.to_array())

    def __sub__(self, other: "SpacetimeVector") -> "SpacetimeVector":
        return SpacetimeVector.from_array(self.to_array() - other.to_array())

    def __neg__(self) -> "SpacetimeVector":
        return SpacetimeVector.from_array(-self.to_array())

    def __mul__(self, scalar: float) -> "SpacetimeVector":
        return SpacetimeVector.from_array(self.to_array() * float(scalar))

    __rmul__ = __mul__


@dataclass(frozen=True)
class Bivector:
    """Element of the bivector space, coordinates on e_i^e_j with i < j."""

    c12: float
    c13: float
    c14: float
    c23: float
    c24: float
    c34: float

    @classmethod
    def from_array(cls, values) -> "Bivector":
        arr = np.asarray(values, dtype=float).reshape(6)
        return cls(*(float(c) for c in arr))

    @classmethod
    def zero(cls) -> "Bivector":
        return cls(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)

    def to_array(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)])

    def to_dict(self) -> dict:
        return {label: getattr(self, label) for label in BIVECTOR_LABELS}

    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.to_array())))

    def __add__(self, other: "Bivector") -> "Bivector":
        return Bivector.from_array(self.to_array() + other.to_array())

    def __sub__(self, other: "Bivector") -> "Bivector":
        return Bivector.from_array(self.to_array() - other.to_array())

    def __neg__(self) -> "Bivector":
        return Bivector.from_array(-self.to_array())

    def __mul__(self, scalar: float) -> "Bivector":
        return Bivector.from_array(self.to_array() * float(scalar))

    __rmul__ = __mul__


VectorLike = Union[SpacetimeVector, np.ndarray]


def _vec(v: VectorLike) -> np.ndarray:
    return v.to_array() if isinstance(v, SpacetimeVector) else np.asarray(v, dtype=float)


def _biv(b) -> np.ndarray:
    return b.to_array() if isinstance(b, Bivector) else np.asarray(b, dtype=float)


# ---------------------------------------------------------------------------
# array kernels (last axis holds the coordinates)
# ---------------------------------------------------------------------------

def inner4_array(u: np.ndarray, w: np.ndarray) -> np.ndarray:
    return np.einsum("...i,i,...i->...", u, SIGNATURE, w)


def wedge_array(u: np.ndarray, w: np.ndarray) -> np.ndarray:
    u, w = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(w, dtype=float))
    return u[..., _I] * w[..., _J] - u[..., _J] * w[..., _I]


def inner_biv_array(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("...i,i,...i->...", a, BIVECTOR_SIGNS, b)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def inner4(u: VectorLike, w: VectorLike) -> float:
    """
    Minkowski inner product u1w1 + u2w2 + u3w3 - u4w4.

    Args:
        u: First vector
        w: Second vector

    Returns:
        The inner product as a float
    """
    return float(inner4_array(_vec(u), _vec(w)))


def wedge(u: VectorLike, w: VectorLike) -> Bivector:
    """Exterior product with coordinates c_ij = u_i w_j - u_j w_i."""
    return Bivector.from_array(wedge_array(_vec(u), _vec(w)))


def inner_biv(a, b) -> float:
    """
    Induced inner product on bivectors.

    On decomposables it equals the determinant of the 2x2 Gram matrix of
    inner4 values; in coordinates it is diagonal with signs
    (+, +, -, +, -, -).
    """
    return float(inner_biv_array(_biv(a), _biv(b)))


def causal_character(v: VectorLike, tol: float = DEFAULT_CAUSAL_TOL) -> str:
    """
    Classify a vector by the sign of <v, v>.

    Args:
        v: Vector to classify
        tol: Half-width of the band treated as lightlike (must be positive)

    Returns:
        'spacelike', 'timelike' or 'lightlike'
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    q = inner4(v, v)
    if q > tol:
        return SPACELIKE
    if q < -tol:
        return TIMELIKE
    return LIGHTLIKE


# ---------------------------------------------------------------------------
# isometries
# ---------------------------------------------------------------------------

def lorentz_boost(direction, rapidity: float) -> np.ndarray:
    """
    Pure boost along a spatial direction.

    Args:
        direction: Spatial 3-vector (normalised internally)
        rapidity: Boost rapidity

    Returns:
        4x4 matrix acting on column vectors
    """
    n = np.asarray(direction, dtype=float).reshape(3)
    norm = np.linalg.norm(n)
    if norm == 0.0:
        raise ValueError("boost direction must be nonzero")
    n = n / norm
    ch, sh = np.cosh(rapidity), np.sinh(rapidity)
    boost = np.eye(4)
    boost[:3, :3] += (ch - 1.0) * np.outer(n, n)
    boost[:3, 3] = sh * n
    boost[3, :3] = sh * n
    boost[3, 3] = ch
    return boost


def is_lorentz(matrix: np.ndarray, tol: float = 1e-10) -> bool:
    """Check matrix^T eta matrix = eta."""
    eta = np.diag(SIGNATURE)
    m = np.asarray(matrix, dtype=float)
    return bool(np.max(np.abs(m.T @ eta @ m - eta)) <= tol)


def random_isometry(rng: np.random.Generator, max_rapidity: float = 0.5,
                    max_shift: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    """
    Draw a rigid motion from the identity component.

    Returns:
        Tuple (lorentz_matrix, translation)
    """
    spatial = np.eye(4)
    spatial[:3, :3] = Rotation.from_rotvec(rng.normal(size=3)).as_matrix()
    boost = lorentz_boost(rng.normal(size=3), rng.uniform(-max_rapidity, max_rapidity))
    translation = rng.uniform(-max_shift, max_shift, size=4)
    return boost @ spatial, translation
