"""Periodic fractional calculus on truncated Fourier series.

A real T-periodic signal is represented by its Fourier coefficients
c[n], n = -N..N, with s(t) = sum_n c[n] exp(j n w0 t) and w0 = 2 pi / T.
The fractional derivative of order alpha acts diagonally with symbol
(j n w0)^alpha; negative alpha is the fractional integral, defined on
mean-zero signals only (the n = 0 coefficient is the mean and has no
preimage).  The module also provides the mean-removing projector, the
periodic Green's function of the order-alpha derivative, atomic measures
on the circle with their total-variation norm, and a mean-zero bump used
to saturate the dual pairing against a projected Dirac.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_N_TERMS, DEFAULT_TOL, Tolerances
from .errors import (
    AlphaTooSmall,
    DuplicateAtoms,
    NonZeroMeanForIntegral,
    SchemaMismatch,
)


@dataclass(frozen=True)
class FourierSeries:
    """Truncated Fourier expansion of a real T-periodic signal.

    Parameters
    ----------
    period : float
        Period T > 0.
    coeffs : np.ndarray
        Complex array of length 2N + 1 holding c[-N..N]; entry i stores
        the coefficient of frequency index n = i - N.  Must be
        conjugate-symmetric (real signal).
    """

    period: float
    coeffs: np.ndarray

    def __post_init__(self):
        if self.period <= 0:
            raise ValueError(f"period must be positive, got {self.period}")
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.ndim != 1 or len(c) < 3 or len(c) % 2 == 0:
            raise ValueError("coeffs must be a 1-d array of odd length >= 3")
        scale = max(1.0, float(np.max(np.abs(c))))
        # real signal: c[-n] must equal conj(c[n])
        sym = np.max(np.abs(c[::-1] - np.conj(c)))
        if sym > DEFAULT_TOL.coeff * scale:
            raise ValueError(
                f"coefficients are not conjugate-symmetric (defect {sym:.3e})"
            )
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "period", float(self.period))

    @property
    def order(self) -> int:
        """Truncation order N."""
        return (len(self.coeffs) - 1) // 2

    @property
    def omega0(self) -> float:
        return 2.0 * np.pi / self.period

    @property
    def indices(self) -> np.ndarray:
        """Frequency indices n = -N..N aligned with coeffs."""
        n = self.order
        return np.arange(-n, n + 1)

    @property
    def mean(self) -> complex:
        return complex(self.coeffs[self.order])

    def evaluate(self, t) -> np.ndarray:
        """Evaluate s(t) = sum_n c[n] exp(j n w0 t) at arbitrary points.

        Returns the real part; the imaginary residue is bounded by the
        conjugate-symmetry defect and is discarded.
        """
        t = np.asarray(t, dtype=np.float64)
        scalar = t.ndim == 0
        tt = np.atleast_1d(t)
        n = self.indices
        # pair n with -n so the sum is assembled as mean + 2 Re(half sum)
        half = self.coeffs[self.order + 1 :]
        phases = np.exp(1j * self.omega0 * np.outer(tt, n[self.order + 1 :]))
        vals = np.real(self.mean) + 2.0 * np.real(phases @ half)
        return vals[0] if scalar else vals

    def sample_uniform(self, n_points: int) -> np.ndarray:
        """Evaluate on the uniform grid t_k = k T / n_points via inverse FFT."""
        if n_points < 2 * self.order + 1:
            raise ValueError("n_points must resolve the truncation order")
        spec = np.zeros(n_points, dtype=np.complex128)
        n = self.indices
        spec[n % n_points] = self.coeffs
        return np.real(np.fft.ifft(spec) * n_points)

    @classmethod
    def from_function(cls, func, period: float, order: int, oversample: int = 8):
        """Build the truncated expansion of a callable by FFT on a fine grid.

        The callable is sampled at ``oversample * (2 order + 1)`` uniform
        points; aliasing is the caller's responsibility (smooth inputs).
        """
        m = oversample * (2 * order + 1)
        t = np.arange(m) * (period / m)
        samples = np.asarray(func(t), dtype=np.float64)
        spec = np.fft.fft(samples) / m
        n = np.arange(-order, order + 1)
        return cls(period, spec[n % m])

    @classmethod
    def zero(cls, period: float, order: int):
        return cls(period, np.zeros(2 * order + 1, dtype=np.complex128))

    def to_json(self) -> str:
        payload = {
            "period": self.period,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str):
        try:
            payload = json.loads(text)
            period = payload["period"]
            coeffs = np.array(
                [complex(re, im) for re, im in payload["coeffs"]],
                dtype=np.complex128,
            )
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise SchemaMismatch(f"not a serialized Fourier series: {exc}") from exc
        return cls(period, coeffs)


@dataclass(frozen=True)
class AtomicMeasure1D:
    """Finite atomic measure sum_k a_k delta(. - t_k) on one period.

    weights and locations are parallel arrays; locations must be pairwise
    distinct (exact duplicates are rejected at construction, near
    duplicates by :func:`mnorm_atomic`).
    """

    weights: np.ndarray
    locations: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        t = np.asarray(self.locations, dtype=np.float64).reshape(-1)
        if len(w) != len(t):
            raise ValueError("weights and locations must have equal length")
        if len(t) > 1 and np.min(np.diff(np.sort(t))) == 0.0:
            raise DuplicateAtoms("atom locations must be pairwise distinct")
        w.flags.writeable = False
        t.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "locations", t)

    def __len__(self) -> int:
        return len(self.weights)

    def to_json(self) -> str:
        atoms = [[float(a), float(t)] for a, t in zip(self.weights, self.locations)]
        return json.dumps({"atoms": atoms})

    @classmethod
    def from_json(cls, text: str):
        try:
            payload = json.loads(text)
            atoms = payload["atoms"]
            w = [a for a, _ in atoms]
            t = [tk for _, tk in atoms]
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise SchemaMismatch(f"not a serialized atomic measure: {exc}") from exc
        return cls(np.array(w), np.array(t))


def _symbol(alpha: float, n: np.ndarray, omega0: float) -> np.ndarray:
    """Principal branch of (j n w0)^alpha for integer frequencies n != 0.

    (j n w0)^alpha = |n w0|^alpha exp(j alpha (pi/2) sign(n)); conjugate
    symmetry in n is preserved for real alpha, so real signals stay real.
    """
    mag = np.abs(n * omega0) ** alpha
    return mag * np.exp(1j * alpha * (np.pi / 2.0) * np.sign(n))


def frac_derivative(
    s: FourierSeries, alpha: float, tol: Tolerances = DEFAULT_TOL
) -> FourierSeries:
    """Fractional derivative (alpha > 0) or integral (alpha < 0) of s.

    Acts as multiplication by (j n w0)^alpha on each coefficient.  The
    n = 0 coefficient is kept for alpha = 0, zeroed for alpha > 0, and
    must already be negligible for alpha < 0 since constants have no
    antiderivative in the image space.

    Raises
    ------
    NonZeroMeanForIntegral
        If alpha < 0 and |c[0]| > tol.mean_zero * max|c|.
    """
    if alpha == 0.0:
        return s
    c = s.coeffs
    center = s.order
    if alpha < 0:
        scale = max(1.0, float(np.max(np.abs(c))))
        if np.abs(c[center]) > tol.mean_zero * scale:
            raise NonZeroMeanForIntegral(
                f"mean coefficient {c[center]:.3e} exceeds "
                f"{tol.mean_zero:.1e} * max|c|; project it out first"
            )
    n = s.indices
    out = np.zeros_like(c)
    nz = n != 0
    out[nz] = c[nz] * _symbol(alpha, n[nz], s.omega0)
    return FourierSeries(s.period, out)


def project_P0(s: FourierSeries) -> FourierSeries:
    """Remove the mean: zero the n = 0 coefficient.  Idempotent."""
    c = s.coeffs.copy()
    c[s.order] = 0.0
    return FourierSeries(s.period, c)


def green_periodic(
    alpha: float,
    t,
    period: float,
    n_terms: int = DEFAULT_N_TERMS,
) -> np.ndarray:
    """Periodic Green's function of the order-alpha derivative.

    Evaluates sum_{0 < |n| <= N} (j n w0)^{-alpha} exp(j n w0 t), which for
    alpha > 1 converges absolutely to a continuous function; the truncation
    error is O(N^{1 - alpha}).  The mean is zero by construction.

    Parameters
    ----------
    alpha : float
        Order, must exceed 1 for absolute convergence.
    t : float or array
        Evaluation points (any reals; the result is T-periodic).
    period : float
        Period T.
    n_terms : int
        One-sided truncation N >= 1.

    Raises
    ------
    AlphaTooSmall
        If alpha <= 1; the series is not absolutely summable there.
    """
    if alpha <= 1.0:
        raise AlphaTooSmall(f"need alpha > 1 for a convergent sum, got {alpha}")
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    t = np.asarray(t, dtype=np.float64)
    scalar = t.ndim == 0
    tt = np.atleast_1d(t).ravel()
    omega0 = 2.0 * np.pi / period
    total = np.zeros(len(tt), dtype=np.complex128)
    # accumulate the two-sided sum in blocks; conjugate pairs are added
    # together so cancellation of the imaginary part happens termwise
    block = 8192
    for start in range(1, n_terms + 1, block):
        n = np.arange(start, min(start + block, n_terms + 1))
        coeff = _symbol(-alpha, n, omega0)
        phase = np.exp(1j * omega0 * np.outer(tt, n))
        side = phase @ coeff
        total += side + np.conj(side)
    resid = float(np.max(np.abs(total.imag))) if len(tt) else 0.0
    if resid > 1e-10:
        raise FloatingPointError(
            f"imaginary residue {resid:.3e} exceeds 1e-10; symmetry broken"
        )
    vals = total.real
    out = vals.reshape(np.atleast_1d(t).shape)
    return float(out[0]) if scalar else out


def mnorm_atomic(mu: AtomicMeasure1D, min_gap: float = 1e-9) -> float:
    """Total-variation norm of an atomic measure: sum_k |a_k|.

    Exact for distinct atoms; near-coincident atoms must be merged by the
    caller first because their joint mass is |a_i + a_j|, not |a_i| + |a_j|.

    Raises
    ------
    DuplicateAtoms
        If two locations are closer than ``min_gap``.
    """
    if len(mu) == 0:
        return 0.0
    if len(mu) > 1:
        srt = np.sort(mu.locations)
        if np.min(np.diff(srt)) < min_gap:
            raise DuplicateAtoms(
                f"two atoms closer than {min_gap:.1e}; merge weights first"
            )
    return float(np.sum(np.abs(mu.weights)))


def dirac_pairing(t0: float, s: FourierSeries) -> float:
    """Pairing of the projected Dirac at t0 with the signal s.

    The projected Dirac is the unit point mass minus its mean, so the
    pairing is the evaluation of the mean-removed signal: s(t0) - mean(s).
    Exact for trigonometric polynomials.
    """
    return float(project_P0(s).evaluate(t0))


def _hat(u: np.ndarray) -> np.ndarray:
    return np.maximum(0.0, 1.0 - np.abs(u))


def periodic_bump(
    t0: float,
    eps: float,
    period: float,
    order: int = 8192,
    normalize: bool = True,
) -> FourierSeries:
    """Mean-zero continuous bump of width eps centered at t0.

    The profile is a triangle of height 1 at the center flanked by two
    half-depth negative triangles, so the integral vanishes exactly while
    the peak value stays 1 and the range stays inside [-1/2, 1].  Realized
    as a truncated Fourier series; with ``normalize`` the coefficients are
    rescaled so the truncated series has sup norm <= 1 (truncation rounds
    the corners, which may otherwise push the peak marginally over 1).

    Used to show the projected Dirac at t0 has dual norm 1: the pairing
    approaches 1 from below as order grows.
    """
    if not 0 < eps <= period / 2:
        raise ValueError("need 0 < eps <= period/2")

    def profile(t):
        u = (np.asarray(t) - t0 + period / 2.0) % period - period / 2.0
        u = u / eps
        return _hat(4 * u) - 0.5 * _hat(4 * u - 2) - 0.5 * _hat(4 * u + 2)

    series = FourierSeries.from_function(profile, period, order)
    series = project_P0(series)  # discretization leaves a ~1e-16 mean
    if normalize:
        peak = float(np.max(np.abs(series.sample_uniform(8 * order))))
        if peak > 1.0:
            series = FourierSeries(period, series.coeffs / peak)
    return series
