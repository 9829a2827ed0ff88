"""Noncausal Wiener filter baseline built from Welch spectral estimates.

The mean-square-optimal linear time-invariant estimate of a component s
from a measured mixture u has transfer function H(w) = P_us(w) / P_uu(w),
the ratio of the cross-spectral density to the input power spectral
density.  Both densities are estimated by Welch's method (averaged
windowed periodograms over overlapping segments), the ratio is inverted
to a centered impulse response of one segment length, and the filter is
applied by direct convolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynsys import TimeSeries

DEFAULT_SEG_LEN = 500


@dataclass
class SpectrumEstimate:
    """Welch estimate over the discrete frequency grid of one segment.

    values[k] is the estimated power (PSD, real) or cross power (CSD,
    complex) in bin k of the length-seg_len DFT grid; the normalization
    makes the sum over all bins approximate the signal variance.
    """

    values: np.ndarray
    seg_len: int
    dt: float

    def frequencies(self) -> np.ndarray:
        """Two-sided frequency grid in cycles per time unit."""
        return np.fft.fftfreq(self.seg_len, d=self.dt)


@dataclass
class WienerFilter:
    """Real impulse response, noncausal, zero lag at index seg_len // 2."""

    h: np.ndarray
    seg_len: int

    def __post_init__(self) -> None:
        if len(self.h) != self.seg_len:
            raise ValueError(f"h has length {len(self.h)}, expected {self.seg_len}")


def hann_window(length: int) -> np.ndarray:
    """Symmetric Hann window: 0.5 (1 - cos(2 pi n / (L-1)))."""
    if length < 2:
        raise ValueError(f"window length must be >= 2, got {length}")
    n = np.arange(length)
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * n / (length - 1)))


def welch_csd(
    x: TimeSeries,
    y: TimeSeries,
    seg_len: int = DEFAULT_SEG_LEN,
    overlap: int | None = None,
) -> SpectrumEstimate:
    """Cross-spectral density of (x, y) by averaged windowed periodograms.

    Each length-seg_len segment is Hann-windowed; segment periodograms
    conj(DFT(w*x)) * DFT(w*y) are averaged and divided by L * sum(w^2) so
    that the PSD case sums to the sample variance.  welch_csd(x, x) is
    real and nonnegative (computed as squared magnitudes).
    """
    if overlap is None:
        overlap = seg_len // 2
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if x.dt != y.dt:
        raise ValueError(f"dt mismatch: {x.dt} vs {y.dt}")
    if len(x) < seg_len:
        raise ValueError(f"series length {len(x)} shorter than one segment ({seg_len})")
    if not 0 <= overlap < seg_len:
        raise ValueError(f"overlap must lie in [0, seg_len), got {overlap}")
    window = hann_window(seg_len)
    hop = seg_len - overlap
    n_seg = (len(x) - seg_len) // hop + 1
    same = x.samples is y.samples
    acc = np.zeros(seg_len, dtype=float if same else complex)
    for i in range(n_seg):
        lo = i * hop
        xw = np.fft.fft(window * x.samples[lo : lo + seg_len])
        if same:
            acc += xw.real * xw.real + xw.imag * xw.imag
        else:
            yw = np.fft.fft(window * y.samples[lo : lo + seg_len])
            acc += np.conj(xw) * yw
    scale = n_seg * seg_len * float(np.sum(window * window))
    return SpectrumEstimate(values=acc / scale, seg_len=seg_len, dt=x.dt)


def welch_psd(
    x: TimeSeries,
    seg_len: int = DEFAULT_SEG_LEN,
    overlap: int | None = None,
) -> SpectrumEstimate:
    """Power spectral density: welch_csd of a series with itself."""
    return welch_csd(x, x, seg_len=seg_len, overlap=overlap)


def wiener_transfer(p_us: SpectrumEstimate, p_uu: SpectrumEstimate) -> SpectrumEstimate:
    """Pointwise ratio P_us / P_uu with a floored denominator.

    Bins where the input power is below 1e-8 of its peak carry no usable
    signal; flooring them prevents noise amplification in the ratio.
    """
    if p_us.seg_len != p_uu.seg_len:
        raise ValueError(f"grid mismatch: seg_len {p_us.seg_len} vs {p_uu.seg_len}")
    if p_us.dt != p_uu.dt:
        raise ValueError(f"dt mismatch: {p_us.dt} vs {p_uu.dt}")
    denom = np.asarray(p_uu.values).real
    floor = 1e-8 * float(np.max(denom)) if np.max(denom) > 0 else 1.0
    ratio = np.asarray(p_us.values) / np.maximum(denom, floor)
    return SpectrumEstimate(values=ratio, seg_len=p_us.seg_len, dt=p_us.dt)


def impulse_response(transfer: SpectrumEstimate) -> WienerFilter:
    """Invert a Hermitian transfer function to a centered real impulse response."""
    values = np.asarray(transfer.values, dtype=complex)
    length = transfer.seg_len
    scale = float(np.max(np.abs(values)))
    tol = 1e-10 * max(scale, 1.0)
    asym = np.abs(values - np.conj(values[(-np.arange(length)) % length]))
    if float(np.max(asym)) > max(1e-8 * max(scale, 1.0), 1e-12):
        raise ValueError(
            "transfer function is not Hermitian-symmetric; "
            "it cannot come from real signals"
        )
    h_raw = np.fft.ifft(values)
    residue = float(np.max(np.abs(h_raw.imag)))
    if residue > tol:
        raise ValueError(f"imaginary residue {residue:g} exceeds tolerance {tol:g}")
    return WienerFilter(h=np.roll(h_raw.real, length // 2), seg_len=length)


def apply(f: WienerFilter, u: TimeSeries) -> TimeSeries:
    """Same-length convolution with the centered filter (zero-lag aligned).

    Edges are computed with implicit zero padding; the first and last
    seg_len // 2 output samples touch the padding, and metrics can exclude
    that many samples per edge if edge effects matter.
    """
    if len(u) < f.seg_len:
        raise ValueError(f"input length {len(u)} shorter than filter ({f.seg_len})")
    full = np.convolve(u.samples, f.h, mode="full")
    mid = f.seg_len // 2
    return TimeSeries(full[mid : mid + len(u)], u.dt)


def build_wiener(
    u_train: TimeSeries,
    s_train: TimeSeries,
    seg_len: int = DEFAULT_SEG_LEN,
    overlap: int | None = None,
) -> WienerFilter:
    """Estimate the full separation filter from aligned training series."""
    p_uu = welch_psd(u_train, seg_len=seg_len, overlap=overlap)
    p_us = welch_csd(u_train, s_train, seg_len=seg_len, overlap=overlap)
    return impulse_response(wiener_transfer(p_us, p_uu))
