"""Kronecker-product DFT beamforming codebooks and exhaustive pair search.

Codeword (m, n) is c_m^y kron c_n^z with
    c_m^y[k] = exp(j*2*pi*m*k/My) / sqrt(My),  k = 0..My-1
and likewise along z; entries have constant modulus 1/sqrt(M) and the M
codewords form an orthonormal basis. Flat codeword index is m*Mz + n,
matching the steering-vector element ordering.
"""

import math
from dataclasses import dataclass

import numpy as np

from .geometry import AnglePair


@dataclass(frozen=True)
class BeamIndex:
    m: int  # y-axis DFT index
    n: int  # z-axis DFT index
    flat: int


@dataclass(frozen=True)
class BeamPair:
    tx: BeamIndex
    rx: BeamIndex

    @property
    def key(self):
        return (self.tx.flat, self.rx.flat)


@dataclass(frozen=True)
class Codebook:
    """Columns of `matrix` are the codewords; column m*Mz + n is beam (m, n)."""

    matrix: np.ndarray
    cols: int  # My
    rows: int  # Mz

    @property
    def size(self):
        return self.matrix.shape[1]

    @property
    def length(self):
        return self.matrix.shape[0]

    def beam_index(self, flat: int) -> BeamIndex:
        return BeamIndex(flat // self.rows, flat % self.rows, flat)


def build_codebook(cols: int, rows: int) -> Codebook:
    """DFT codebook for a cols x rows (My x Mz) UPA; My*Mz codewords."""
    if cols < 1 or rows < 1:
        raise ValueError("codebook grid must be at least 1x1")
    ky, m = np.meshgrid(np.arange(cols), np.arange(cols), indexing="ij")
    Fy = np.exp(2j * math.pi * ky * m / cols) / math.sqrt(cols)
    kz, n = np.meshgrid(np.arange(rows), np.arange(rows), indexing="ij")
    Fz = np.exp(2j * math.pi * kz * n / rows) / math.sqrt(rows)
    return Codebook(np.kron(Fy, Fz), cols, rows)


def beam_grid_angles(C: Codebook, m: int, n: int, spacing: float = 0.5):
    """Physical (zenith, azimuth) a beam points at, or None if the beam's
    spatial frequencies fall outside the visible region.

    Beam (m, n) matches the steering vector with sin(theta)sin(phi) = Oy and
    cos(theta) = Oz where Oy = m/(My*spacing) and Oz = n/(Mz*spacing), each
    wrapped into [-1/(2*spacing), 1/(2*spacing)).
    """

    def freq(idx, count):
        v = math.fmod(idx / (count * spacing), 1.0 / spacing)
        if v >= 0.5 / spacing:
            v -= 1.0 / spacing
        elif v < -0.5 / spacing:
            v += 1.0 / spacing
        return v

    oy = freq(m, C.cols)
    oz = freq(n, C.rows)
    if abs(oz) > 1.0 or oy * oy + oz * oz > 1.0:
        return None
    theta = math.acos(oz)
    st = math.sin(theta)
    if st == 0.0:
        return AnglePair(theta, 0.0) if oy == 0.0 else None
    return AnglePair(theta, math.asin(min(1.0, max(-1.0, oy / st))))


def best_beam_pair(H: np.ndarray, F: Codebook, W: Codebook):
    """Exhaustive argmax of |w^H H f|^2 over both codebooks.

    Returns (BeamPair, gain). Ties break deterministically: lowest flat tx
    index first, then lowest flat rx index.
    """
    if H.shape != (W.length, F.length):
        raise ValueError(f"shape mismatch: H {H.shape}, W length {W.length}, F length {F.length}")
    # gains[i_tx, i_rx]; C-order argmax realizes the tie-break.
    proj = W.matrix.conj().T @ H @ F.matrix  # (|W|, |F|)
    gains = np.abs(proj.T) ** 2
    flat = int(np.argmax(gains))
    i_tx, i_rx = divmod(flat, W.size)
    return BeamPair(F.beam_index(i_tx), W.beam_index(i_rx)), float(gains[i_tx, i_rx])


def nearest_codeword(C: Codebook, a: np.ndarray) -> int:
    """Flat index of the codeword maximizing |a^H c| (first max wins)."""
    return int(np.argmax(np.abs(C.matrix.conj().T @ np.asarray(a))))
