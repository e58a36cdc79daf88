"""Video catalog and demand model.

A catalog holds F files, each encoded into L quality layers.  Quality
level l is delivered as the cumulative "super layer" made of layers
1..l, so its size is the running sum of the individual layer sizes.
Request popularity over files follows a Mandelbrot-Zipf law; the joint
demand over (file, quality) splits each file's popularity between the
lowest quality and the L-1 higher qualities.

File and layer indices are 1-based in every public signature, matching
the usual ranked-catalog convention; storage is 0-based internally.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "ContentLibrary",
    "preference_matrix",
    "quality_preference",
    "request_distribution",
    "request_probability",
    "super_layer_size",
    "total_catalog_bits",
]


@dataclass(frozen=True)
class ContentLibrary:
    """Immutable catalog of ``file_count`` files times ``layer_count`` layers.

    Parameters
    ----------
    file_count : int
        Number of files F, at least 2 (the preference split divides by F-1).
    layer_count : int
        Number of layers L per file, at least 2 (the split divides by L-1).
    layer_sizes : ndarray, shape (F, L)
        Size of each individual layer in bits, strictly positive.
    skewness : float
        Popularity skewness (>= 0); 0 gives a uniform request law.
    plateau : float
        Popularity plateau (>= 0); 0 reduces to a plain Zipf law.
    """

    file_count: int
    layer_count: int
    layer_sizes: np.ndarray
    skewness: float = 1.0
    plateau: float = 5.0

    def __post_init__(self):
        if self.file_count < 2:
            raise ValueError("file_count must be >= 2")
        if self.layer_count < 2:
            raise ValueError(
                "layer_count must be >= 2; the quality preference split is "
                "undefined for a single layer"
            )
        sizes = np.asarray(self.layer_sizes, dtype=float)
        if sizes.shape != (self.file_count, self.layer_count):
            raise ValueError(
                f"layer_sizes must have shape {(self.file_count, self.layer_count)}, "
                f"got {sizes.shape}"
            )
        if not np.all(sizes > 0):
            raise ValueError("all layer sizes must be strictly positive")
        if self.skewness < 0:
            raise ValueError("skewness must be >= 0")
        if self.plateau < 0:
            raise ValueError("plateau must be >= 0")
        sizes = sizes.copy()
        sizes.setflags(write=False)
        object.__setattr__(self, "layer_sizes", sizes)

    @classmethod
    def uniform(cls, file_count, layer_count, layer_size_bits=25e6,
                skewness=1.0, plateau=5.0):
        """Catalog with one common size for every layer of every file."""
        sizes = np.full((file_count, layer_count), float(layer_size_bits))
        return cls(file_count, layer_count, sizes, skewness, plateau)

    @cached_property
    def super_layer_sizes(self) -> np.ndarray:
        """Cumulative layer sizes, shape (F, L): entry (f, l) is the number
        of bits delivered for quality level l of file f."""
        cum = np.cumsum(self.layer_sizes, axis=1)
        cum.setflags(write=False)
        return cum

    @property
    def shape(self) -> tuple[int, int]:
        return (self.file_count, self.layer_count)


def _check_file_index(lib, f):
    if not 1 <= f <= lib.file_count:
        raise IndexError(f"file index {f} out of range 1..{lib.file_count}")


def _check_layer_index(lib, l):
    if not 1 <= l <= lib.layer_count:
        raise IndexError(f"layer index {l} out of range 1..{lib.layer_count}")


def request_distribution(lib: ContentLibrary) -> np.ndarray:
    """Mandelbrot-Zipf request probabilities over files, shape (F,).

    Entry f-1 is (f+q)^(-a) normalized over the catalog, with a the
    skewness and q the plateau.  Sums to 1 by construction.
    """
    ranks = np.arange(1, lib.file_count + 1, dtype=float)
    weights = (ranks + lib.plateau) ** (-lib.skewness)
    return weights / weights.sum()


def request_probability(lib: ContentLibrary, f: int) -> float:
    """Probability that a request targets file ``f`` (1-based)."""
    _check_file_index(lib, f)
    return float(request_distribution(lib)[f - 1])


def preference_matrix(lib: ContentLibrary) -> np.ndarray:
    """Joint request probability over (file, quality level), shape (F, L).

    File f's popularity p(f) is split between the lowest quality, with
    weight (f-1)/(F-1), and the L-1 higher qualities, each with weight
    (F-f)/((F-1)(L-1)).  Row sums telescope back to p(f), so the matrix
    sums to 1.  The most popular file is never requested at the lowest
    quality and the least popular one never above it.
    """
    F, L = lib.file_count, lib.layer_count
    pf = request_distribution(lib)
    ranks = np.arange(1, F + 1, dtype=float)
    out = np.empty((F, L))
    out[:, 0] = pf * (ranks - 1) / (F - 1)
    out[:, 1:] = (pf * (F - ranks) / ((F - 1) * (L - 1)))[:, None]
    return out


def quality_preference(lib: ContentLibrary, f: int, l: int) -> float:
    """Joint probability of requesting quality level ``l`` of file ``f``."""
    _check_file_index(lib, f)
    _check_layer_index(lib, l)
    return float(preference_matrix(lib)[f - 1, l - 1])


def super_layer_size(lib: ContentLibrary, f: int, l: int) -> float:
    """Bits delivered for quality level ``l`` of file ``f`` (layers 1..l)."""
    _check_file_index(lib, f)
    _check_layer_index(lib, l)
    return float(lib.super_layer_sizes[f - 1, l - 1])


def total_catalog_bits(lib: ContentLibrary) -> float:
    """Sum of all super-layer sizes; the cache budget that stores everything."""
    return float(lib.super_layer_sizes.sum())
