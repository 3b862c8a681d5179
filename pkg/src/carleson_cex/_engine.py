"""Assembly of Carleson-square Gram matrices for lacunary two-bit spectra.

A spectrum is *lacunary two-bit* when every entry has a single coordinate
``p`` and an index of one of the forms

    n = 2^p                 (one-bit term)
    n = 2^h + 2^p, h > p    (two-bit term).

The spectrum of ``phi`` has this shape.  For an arc ``I`` of rank ``r`` and
centre ``C = (2k + 1) / 2^(r+1)`` the factor ``exp(2 pi i n C)`` of every
term splits as ``D_p * z_h`` where ``D_p = exp(2 pi i 2^p C)`` depends on the
coordinate only and ``z_h = exp(2 pi i 2^h C)`` equals ``1`` for ``h > r``,
``-1`` for ``h = r`` and genuinely depends on ``k`` only for ``h < r``.
Since ``diag(D)`` is unitary it does not change eigenvalues, so the
arc dependence of the spectrum of ``mu(Q_I)`` is carried by the few phases
``z_h`` with ``h < r``.  Pairs of terms whose phases coincide are assembled
once per rank and shared by all arcs of that rank.

Truncation
----------
Pairs are grouped into *units*: pairs of distinct blocks (the one-bit term
``2^h`` alone, or the two-bit terms sharing the top bit ``2^h``) and, inside a block, the rows of the upper triangle.  For
each unit an upper bound of the absolute sum of its entries follows from
``|sinc(y)| <= min(1, 1/(pi |y|))`` and the monotonicity of the radial
factor.  Units are dropped in increasing order of their bound while the total
stays below ``tol`` times the diagonal mass, and the dropped total is
reported: it bounds the spectral-norm error of the assembled matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .disk import radial_factor_array
from .dyadic import turn_phase
from .spectrum import VectorSpectrum

__all__ = ["TwoBitSpectrum", "RankAssembly"]


@dataclass(frozen=True)
class RankAssembly:
    """Per-rank pair selection, ready to be accumulated for any set of arcs."""

    rank: int
    length: float
    ell: float
    coef: np.ndarray
    frac_hi: np.ndarray
    frac_lo: np.ndarray
    group: np.ndarray
    pair_b1: np.ndarray
    pair_b2: np.ndarray
    row_keep: np.ndarray
    dropped_mass: float
    diag_mass: float
    kept_pairs: int
    low_bits: np.ndarray  # bit positions h < r whose phase varies with the arc

    def phase_table(self, indices) -> np.ndarray:
        """Phase table ``[group, arc]`` for the arcs ``(rank, k)``, ``k`` in ``indices``."""
        nrows = int(self.group.max(initial=0)) + 1
        table = np.ones((nrows, len(indices)), dtype=complex)
        for a, k in enumerate(indices):
            num = 2 * k + 1
            for h in self.low_bits:
                table[h + 1, a] = turn_phase(num << int(h), self.rank + 1)
        return table


class TwoBitSpectrum:
    """Array view of a lacunary two-bit spectrum, sorted into blocks.

    Parameters
    ----------
    spectrum : VectorSpectrum
        Must satisfy :meth:`accepts`.
    """

    def __init__(self, spectrum: VectorSpectrum):
        if not self.accepts(spectrum):
            raise ValueError("spectrum is not lacunary two-bit")
        self.dim = spectrum.dim
        rows = []
        for e in spectrum:
            n = e.n
            h = n.bit_length() - 1
            rest = n - (1 << h)
            lo = -1 if rest == 0 else rest.bit_length() - 1
            rows.append((h, lo, int(e.coords[0]), complex(e.values[0]), n))
        rows.sort(key=lambda t: (t[0], t[1]))
        self.n_terms = len(rows)
        self.hi = np.array([r[0] for r in rows], dtype=np.int64)
        self.lo = np.array([r[1] for r in rows], dtype=np.int64)
        self.coord = np.array([r[2] for r in rows], dtype=np.int64)
        self.coef = np.array([r[3] for r in rows], dtype=complex)
        self.index = [r[4] for r in rows]
        self.two_bit = self.lo >= 0
        self.hi_pow = np.ldexp(1.0, self.hi)
        self.lo_val = np.where(self.two_bit, np.ldexp(1.0, np.maximum(self.lo, 0)), 0.0)
        self.n_float = self.hi_pow + self.lo_val
        # block key 2h + [two-bit]: the one-bit term 2^h forms its own block so
        # that the phase group is constant on every block
        key = 2 * self.hi + self.two_bit.astype(np.int64)
        nblocks = int(key.max()) + 1 if self.n_terms else 0
        counts = np.bincount(key, minlength=nblocks) if self.n_terms else np.zeros(0, np.int64)
        self.blk_start = np.zeros(nblocks + 1, dtype=np.int64)
        self.blk_start[1:] = np.cumsum(counts)
        self.n_blocks = nblocks
        absc = np.abs(self.coef)
        self.block_l1 = np.add.reduceat(absc, self.blk_start[:-1]) if self.n_terms else absc
        self.block_l1 = np.where(counts > 0, self.block_l1, 0.0)
        self.block_nmin = np.full(nblocks, np.inf)
        self.block_nmax = np.zeros(nblocks)
        for b in range(nblocks):
            s, e = self.blk_start[b], self.blk_start[b + 1]
            if e > s:
                self.block_nmin[b] = self.n_float[s]
                self.block_nmax[b] = self.n_float[e - 1]
        # prefix l1 norms inside each block (exclusive) and gaps to the previous term
        prefix = np.zeros(self.n_terms)
        gap = np.full(self.n_terms, np.inf)
        for b in range(nblocks):
            s, e = self.blk_start[b], self.blk_start[b + 1]
            if e - s > 1:
                prefix[s + 1:e] = np.cumsum(absc[s:e - 1])
                gap[s + 1:e] = np.diff(self.lo_val[s:e])
        self.row_prefix = prefix
        self.row_gap = gap

    @staticmethod
    def accepts(spectrum: VectorSpectrum) -> bool:
        for e in spectrum:
            if len(e.coords) != 1:
                return False
            p = int(e.coords[0])
            n = e.n
            h = n.bit_length() - 1
            rest = n - (1 << h)
            if rest == 0:
                if p != h:
                    return False
            elif rest != (1 << p):
                return False
        return True

    # ------------------------------------------------------------------
    def coordinate_l1_sq(self) -> float:
        """``sum_p (sum_{t at p} |c_t|)^2``: bounds ``sup_D ||phi||^2``."""
        acc = np.zeros(self.dim)
        np.add.at(acc, self.coord, np.abs(self.coef))
        return float(np.sum(acc ** 2))

    def assemble(self, rank: int, tol: float) -> RankAssembly:
        """Select the kept pairs for arcs of ``rank`` with relative budget ``tol``."""
        length = math.ldexp(1.0, -rank)
        ell = math.inf if rank == 0 else -math.log1p(-length)
        hi, lo = self.hi, self.lo

        def bitval(b):
            return np.where(b >= rank + 1, 0.0, np.where(b == rank, 1.0, np.ldexp(1.0, b - rank)))

        frac_hi = bitval(hi)
        frac_lo = np.where(self.two_bit, bitval(np.maximum(lo, 0)), 0.0)
        sign = np.where(self.two_bit & (hi == rank), -1.0, 1.0)
        coef = self.coef * sign
        group = np.where(self.two_bit & (hi < rank), hi + 1, 0).astype(np.int64)
        low_bits = np.unique(hi[self.two_bit & (hi < rank)])

        absc = np.abs(self.coef)
        diag = absc ** 2 * radial_factor_array(2.0 * self.n_float + 2.0, ell) * length
        diag_mass = float(diag.sum())
        budget = tol * diag_mass

        live = np.flatnonzero(self.blk_start[1:] > self.blk_start[:-1])
        b1, b2 = np.triu_indices(len(live), 1)
        b1, b2 = live[b1], live[b2]
        if tol > 0 and len(b1):
            u_min = self.block_nmin[b1] + self.block_nmin[b2] + 2.0
            d_min = self.block_nmin[b2] - self.block_nmax[b1]
            with np.errstate(divide="ignore"):
                sinc_b = np.minimum(1.0, 1.0 / (math.pi * d_min * length))
            pair_bound = 2.0 * self.block_l1[b1] * self.block_l1[b2] * \
                radial_factor_array(u_min, ell) * length * sinc_b
            blk = np.searchsorted(self.blk_start, np.arange(self.n_terms), side="right") - 1
            u_row = 2.0 * self.block_nmin[blk] + 2.0
            with np.errstate(divide="ignore"):
                sinc_r = np.minimum(1.0, 1.0 / (math.pi * self.row_gap * length))
            row_bound = 2.0 * absc * self.row_prefix * radial_factor_array(u_row, ell) * length * sinc_r
            bounds = np.concatenate([pair_bound, row_bound])
            order = np.argsort(bounds, kind="stable")
            cum = np.cumsum(bounds[order])
            n_drop = int(np.searchsorted(cum, budget, side="right"))
            dropped_mass = float(cum[n_drop - 1]) if n_drop else 0.0
            dropped = order[:n_drop]
            keep_pair = np.ones(len(b1), dtype=bool)
            keep_pair[dropped[dropped < len(b1)]] = False
            row_keep = np.ones(self.n_terms, dtype=np.uint8)
            row_keep[dropped[dropped >= len(b1)] - len(b1)] = 0
            b1, b2 = b1[keep_pair], b2[keep_pair]
        else:
            dropped_mass = 0.0
            row_keep = np.ones(self.n_terms, dtype=np.uint8)
        pair_b1 = np.concatenate([live, b1]).astype(np.int64)
        pair_b2 = np.concatenate([live, b2]).astype(np.int64)
        # order by phase-group pair so that kernels can share work per group pair
        blk_group = group[np.minimum(self.blk_start[:-1], max(self.n_terms - 1, 0))]
        order = np.lexsort((pair_b2, pair_b1, blk_group[pair_b2], blk_group[pair_b1]))
        pair_b1, pair_b2 = pair_b1[order], pair_b2[order]
        sizes = np.diff(self.blk_start)
        kept = int(np.sum(sizes[b1] * sizes[b2]))
        for b in live:
            s, e = self.blk_start[b], self.blk_start[b + 1]
            kept += int(e - s) + int(np.sum(row_keep[s:e] * np.arange(e - s)))
        return RankAssembly(rank, length, ell, coef, frac_hi, frac_lo, group, pair_b1, pair_b2,
                            row_keep, dropped_mass, diag_mass, kept, low_bits)

    def accumulate(self, asm: RankAssembly, indices, backend=None) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(shared, per_arc)`` Hermitian matrices.

        ``shared + per_arc[a]`` is the phase-reduced Gram matrix of the arc
        ``(rank, indices[a])``; conjugating it by ``diag(coordinate_phases)``
        gives the Gram matrix itself.  ``backend`` overrides the kernel module.
        """
        kern = kernels if backend is None else backend
        phases = asm.phase_table(indices)
        out_free = np.zeros((self.dim, self.dim), dtype=complex)
        out_arcs = np.zeros((self.dim, self.dim, len(indices)), dtype=complex)
        kern.accumulate_pairs(self.coord, asm.coef, self.hi_pow, self.lo_val,
                              asm.frac_hi, asm.frac_lo,
                              asm.group, self.blk_start, asm.pair_b1, asm.pair_b2,
                              asm.row_keep, asm.length, asm.ell, phases, out_free, out_arcs)
        shared = out_free + out_free.conj().T
        per_arc = np.transpose(out_arcs, (2, 0, 1))
        per_arc = per_arc + np.conj(np.transpose(per_arc, (0, 2, 1)))
        return shared, per_arc

    def coordinate_phases(self, rank: int, k: int) -> np.ndarray:
        """``D_p = exp(2 pi i 2^p C_I)`` for ``p < dim``."""
        num = 2 * k + 1
        return np.array([turn_phase(num << p, rank + 1) for p in range(self.dim)], dtype=complex)
