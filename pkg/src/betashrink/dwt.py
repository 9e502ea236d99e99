"""Periodized orthogonal discrete wavelet transform (Mallat pyramid).

Only dyadic lengths are supported. Boundaries are handled by circular
convolution, which keeps the transform exactly orthogonal.

Alignment convention: at every level the approximation and detail
coefficients are

    a[k] = sum_i h[i] * x[(2k + i) mod n]
    d[k] = sum_i g[i] * x[(2k + i) mod n]

with ``g[i] = (-1)**i * h[L-1-i]``. The inverse is the transpose of this map.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "WaveletFilter",
    "CoefficientPyramid",
    "get_filter",
    "forward",
    "inverse",
    "dyadic_exponent",
    "FILTERS",
]

# Extremal-phase Daubechies low-pass taps (8 and 10 vanishing moments),
# normalized so that the taps sum to sqrt(2).
_DAUB8 = (
    0.054415842243103967, 0.31287159091429984, 0.6756307362972892,
    0.5853546836542062, -0.015829105256348078, -0.2840155429615466,
    0.00047248457391295336, 0.12874742662047872, -0.017369301001807804,
    -0.044088253930794616, 0.013981027917398263, 0.008746094047405747,
    -0.00487035299345156, -0.00039174037337694824, 0.0006754494064505685,
    -0.00011747678412476936,
)
_DAUB10 = (
    0.026670057900555544, 0.1881768000776915, 0.5272011889317257,
    0.6884590394536034, 0.28117234366057714, -0.24984642432731324,
    -0.19594627437737963, 0.12736934033579647, 0.09305736460356819,
    -0.07139414716639432, -0.029457536821876844, 0.033212674059341155,
    0.0036065535669561936, -0.010733175483330623, 0.001395351747052925,
    0.001992405295185052, -0.000685856694959711, -0.0001164668551292856,
    9.35886703200696e-05, -1.3264202894521238e-05,
)
# Haar is handy for hand-checkable tests.
_HAAR = (2 ** -0.5, 2 ** -0.5)


@dataclass(frozen=True)
class WaveletFilter:
    name: str
    low_pass: np.ndarray
    high_pass: np.ndarray = field(init=False)

    def __post_init__(self):
        h = np.asarray(self.low_pass, dtype=float)
        L = h.size
        if L < 2 or L % 2:
            raise ValueError(f"filter {self.name!r} must have an even number of taps")
        g = np.array([(-1) ** i * h[L - 1 - i] for i in range(L)])
        h.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "low_pass", h)
        object.__setattr__(self, "high_pass", g)
        self.validate()

    @property
    def length(self) -> int:
        return self.low_pass.size

    def validate(self, tol: float = 1e-12) -> None:
        """Check unit energy, sum sqrt(2), and orthogonality to even shifts."""
        h = self.low_pass
        if abs(np.sum(h * h) - 1.0) > tol:
            raise ValueError(f"filter {self.name!r}: taps do not have unit energy")
        if abs(np.sum(h) - np.sqrt(2.0)) > tol:
            raise ValueError(f"filter {self.name!r}: taps do not sum to sqrt(2)")
        L = h.size
        for shift in range(2, L, 2):
            if abs(np.dot(h[:-shift], h[shift:])) > tol:
                raise ValueError(f"filter {self.name!r}: not orthogonal to shift {shift}")


FILTERS = {
    "haar": WaveletFilter("haar", _HAAR),
    "daub8": WaveletFilter("daub8", _DAUB8),
    "daub10": WaveletFilter("daub10", _DAUB10),
}


def get_filter(name: str | WaveletFilter) -> WaveletFilter:
    if isinstance(name, WaveletFilter):
        return name
    try:
        return FILTERS[name.lower()]
    except KeyError:
        raise ValueError(
            f"unknown wavelet {name!r}; choose from {sorted(FILTERS)}"
        ) from None


def dyadic_exponent(n: int) -> int:
    """Return J with ``n == 2**J``; raise ValueError otherwise."""
    n = int(n)
    if n < 1 or n & (n - 1):
        raise ValueError(f"length {n} is not a power of two")
    return n.bit_length() - 1


@dataclass
class CoefficientPyramid:
    """Multiresolution coefficients of a length ``n = 2**J`` signal.

    ``coarse`` holds the ``2**J0`` scaling coefficients and ``details[j]``
    holds the ``2**j`` detail coefficients of level ``j`` for
    ``J0 <= j <= J-1``.
    """

    coarse: np.ndarray
    details: dict[int, np.ndarray]
    n: int
    J0: int

    def __post_init__(self):
        self.coarse = np.asarray(self.coarse, dtype=float)
        self.details = {int(j): np.asarray(v, dtype=float) for j, v in self.details.items()}
        self.check()

    @property
    def J(self) -> int:
        return dyadic_exponent(self.n)

    @property
    def levels(self) -> list[int]:
        return list(range(self.J0, self.J))

    def check(self) -> None:
        J = dyadic_exponent(self.n)
        if not 0 <= self.J0 < J:
            raise ValueError(f"J0={self.J0} outside [0, {J - 1}]")
        if self.coarse.shape != (2 ** self.J0,):
            raise ValueError(
                f"coarse part has shape {self.coarse.shape}, expected ({2 ** self.J0},)"
            )
        if sorted(self.details) != list(range(self.J0, J)):
            raise ValueError(
                f"detail levels {sorted(self.details)} do not cover {self.J0}..{J - 1}"
            )
        for j, v in self.details.items():
            if v.shape != (2 ** j,):
                raise ValueError(f"level {j} has shape {v.shape}, expected ({2 ** j},)")

    def all_details(self) -> np.ndarray:
        """Detail coefficients concatenated from coarsest to finest level."""
        return np.concatenate([self.details[j] for j in self.levels])

    def to_vector(self) -> np.ndarray:
        """Flatten as ``[coarse, d_J0, d_J0+1, ..., d_J-1]``."""
        return np.concatenate([self.coarse, self.all_details()])

    @classmethod
    def from_vector(cls, vec, J0: int = 0) -> "CoefficientPyramid":
        vec = np.asarray(vec, dtype=float)
        n = vec.size
        J = dyadic_exponent(n)
        if not 0 <= J0 < J:
            raise ValueError(f"J0={J0} outside [0, {J - 1}]")
        coarse = vec[: 2 ** J0]
        details = {j: vec[2 ** j: 2 ** (j + 1)] for j in range(J0, J)}
        return cls(coarse.copy(), {j: v.copy() for j, v in details.items()}, n, J0)

    def map_details(self, fn) -> "CoefficientPyramid":
        """New pyramid with ``fn(level, coeffs)`` applied to every detail level."""
        new = {j: np.asarray(fn(j, self.details[j]), dtype=float) for j in self.levels}
        return CoefficientPyramid(self.coarse.copy(), new, self.n, self.J0)

    def copy(self) -> "CoefficientPyramid":
        return self.map_details(lambda j, v: v.copy())


def _indices(half: int, L: int) -> np.ndarray:
    n = 2 * half
    return (2 * np.arange(half)[:, None] + np.arange(L)[None, :]) % n


def forward(signal, filt: str | WaveletFilter = "daub8", J0: int = 0) -> CoefficientPyramid:
    """Forward periodized DWT down to level ``J0``."""
    filt = get_filter(filt)
    x = np.asarray(signal, dtype=float)
    if x.ndim != 1:
        raise ValueError("signal must be one-dimensional")
    J = dyadic_exponent(x.size)
    if J0 < 0 or J0 >= J:
        raise ValueError(f"J0={J0} must satisfy 0 <= J0 < J={J}")
    h, g = filt.low_pass, filt.high_pass
    details = {}
    a = x
    for j in range(J - 1, J0 - 1, -1):
        idx = _indices(a.size // 2, filt.length)
        blocks = a[idx]
        details[j] = blocks @ g
        a = blocks @ h
    return CoefficientPyramid(a, details, x.size, J0)


def inverse(pyramid: CoefficientPyramid, filt: str | WaveletFilter = "daub8") -> np.ndarray:
    """Inverse periodized DWT; exact inverse of :func:`forward` for ``filt``."""
    filt = get_filter(filt)
    pyramid.check()
    h, g = filt.low_pass, filt.high_pass
    a = pyramid.coarse.astype(float, copy=True)
    for j in pyramid.levels:
        d = pyramid.details[j]
        out = np.zeros(2 * a.size)
        idx = _indices(a.size, filt.length)
        np.add.at(out, idx, a[:, None] * h[None, :] + d[:, None] * g[None, :])
        a = out
    return a
