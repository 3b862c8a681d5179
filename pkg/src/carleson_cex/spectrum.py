"""Sparse vector-valued Taylor spectra."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import DomainError

__all__ = ["SpectrumEntry", "VectorSpectrum"]


@dataclass(frozen=True)
class SpectrumEntry:
    """One nonzero Taylor coefficient ``n -> vector``.

    Attributes
    ----------
    n : int
        Taylor index (exact integer, ``n >= 1``).
    coords : ndarray of int
        Coordinates of the nonzero components, strictly increasing.
    values : ndarray of complex
        The nonzero components.
    j, l : int or None
        Optional provenance of the index (generation and low bit).
    """

    n: int
    coords: np.ndarray
    values: np.ndarray
    j: int | None = None
    l: int | None = None

    def dense(self, dim: int) -> np.ndarray:
        out = np.zeros(dim, dtype=complex)
        out[self.coords] = self.values
        return out

    @property
    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2))


@dataclass(frozen=True)
class VectorSpectrum:
    """Immutable sparse map from Taylor index to a complex ``dim``-vector.

    Entries are kept sorted by ``n`` and every stored vector is nonzero.
    Use :meth:`from_vectors` to build one from a mapping of dense vectors.
    """

    dim: int
    entries: tuple[SpectrumEntry, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError("spectrum dimension must be positive")
        seen = set()
        prev = 0
        for e in self.entries:
            if not isinstance(e.n, int) or e.n < 1:
                raise DomainError(f"Taylor index must be an integer >= 1, got {e.n!r}")
            if e.n <= prev or e.n in seen:
                raise DomainError("entries must be sorted by strictly increasing n")
            seen.add(e.n)
            prev = e.n
            if len(e.values) == 0 or not np.any(e.values != 0):
                raise DomainError(f"entry n={e.n} stores a zero vector")
            if len(e.coords) and (e.coords.min() < 0 or e.coords.max() >= self.dim):
                raise DomainError(f"entry n={e.n} has coordinates outside [0, {self.dim})")
            e.coords.setflags(write=False)
            e.values.setflags(write=False)

    # construction -------------------------------------------------------
    @staticmethod
    def make_entry(n: int, coords: Iterable[int], values: Iterable[complex],
                   j: int | None = None, l: int | None = None) -> SpectrumEntry:
        c = np.asarray(list(coords), dtype=np.int64)
        v = np.asarray(list(values), dtype=complex)
        order = np.argsort(c, kind="stable")
        c, v = c[order], v[order]
        keep = v != 0
        return SpectrumEntry(int(n), c[keep], v[keep], j, l)

    @classmethod
    def from_entries(cls, dim: int, entries: Iterable[SpectrumEntry]) -> "VectorSpectrum":
        kept = [e for e in entries if len(e.values) and np.any(e.values != 0)]
        kept.sort(key=lambda e: e.n)
        return cls(dim, tuple(kept))

    @classmethod
    def from_vectors(cls, dim: int, vectors: Mapping[int, np.ndarray]) -> "VectorSpectrum":
        entries = []
        for n, vec in vectors.items():
            vec = np.asarray(vec, dtype=complex)
            if vec.shape != (dim,):
                raise DomainError(f"vector for n={n} has shape {vec.shape}, expected ({dim},)")
            nz = np.flatnonzero(vec)
            if len(nz):
                entries.append(SpectrumEntry(int(n), nz.astype(np.int64), vec[nz].copy()))
        return cls.from_entries(dim, entries)

    # mapping-like access -------------------------------------------------
    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[SpectrumEntry]:
        return iter(self.entries)

    def __contains__(self, n: object) -> bool:
        return n in self._index

    def __getitem__(self, n: int) -> np.ndarray:
        """Dense coefficient vector at ``n`` (zero vector off the support)."""
        i = self._index.get(n)
        if i is None:
            return np.zeros(self.dim, dtype=complex)
        return self.entries[i].dense(self.dim)

    @property
    def _index(self) -> dict:
        cache = self.__dict__.get("_index_cache")
        if cache is None:
            cache = {e.n: i for i, e in enumerate(self.entries)}
            object.__setattr__(self, "_index_cache", cache)
        return cache

    def support(self) -> list[int]:
        return [e.n for e in self.entries]

    @property
    def max_index(self) -> int:
        return self.entries[-1].n if self.entries else 0

    @property
    def single_coordinate(self) -> bool:
        """True when every entry has exactly one nonzero component."""
        return all(len(e.coords) == 1 for e in self.entries)

    def h2_norm_squared(self) -> float:
        """``sum_n |coefficient(n)|^2``, the Hardy-space norm squared."""
        return float(sum(e.norm_squared for e in self.entries))

    def coordinate_support(self, p: int) -> list[int]:
        return [e.n for e in self.entries if p in set(e.coords.tolist())]

    def scaled(self, factor: complex) -> "VectorSpectrum":
        """Spectrum multiplied by a scalar (zero factor gives the empty spectrum)."""
        if factor == 0:
            return VectorSpectrum(self.dim, ())
        return VectorSpectrum(self.dim, tuple(
            SpectrumEntry(e.n, e.coords.copy(), e.values * factor, e.j, e.l) for e in self.entries))

    # serialisation -------------------------------------------------------
    def to_dict(self) -> dict:
        out = []
        for e in self.entries:
            vec = e.dense(self.dim)
            out.append({
                "n": str(e.n),
                "j": e.j,
                "l": e.l,
                "vector": [[float(z.real), float(z.imag)] for z in vec],
            })
        return {"dim": self.dim, "entries": out}

    @classmethod
    def from_dict(cls, doc: Mapping) -> "VectorSpectrum":
        dim = int(doc["dim"])
        entries = []
        for item in doc["entries"]:
            vec = np.array([complex(re, im) for re, im in item["vector"]], dtype=complex)
            nz = np.flatnonzero(vec)
            entries.append(SpectrumEntry(int(item["n"]), nz.astype(np.int64), vec[nz],
                                         item.get("j"), item.get("l")))
        return cls.from_entries(dim, entries)
