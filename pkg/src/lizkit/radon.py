"""Quadrature Radon transform, backprojection, ramp-type filtering, and the
slice-theorem / ridge-identity verification tools (d = 2).

Fourier convention used throughout for *continuous* statements:

    fhat(w) = (2 pi)^(-d) integral f(x) exp(-j <w, x>) dx,

with the inverse carrying no prefactor.  Under this convention the 1-d
transform of a sinogram column g = R{f}(., xi) satisfies

    ghat(w) = (2 pi)^(d-1) * fhat(w xi),

which is the form verified by :func:`slice_check`.  The filter K has the
convention-free frequency response c_d |w|^(d-1) with
c_d = 1 / (2 (2 pi)^(d-1)); for d = 2 that is |w| / (4 pi).

Discrete scalings are stated where each FFT is taken.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .config import DEFAULT_TOL
from .errors import (
    BoundaryMass,
    DirectionNotOnGrid,
    NonUnitDirection,
    SchemaMismatch,
    UnsupportedDimension,
)
from .kernels import ridge_profile

C2 = 1.0 / (4.0 * np.pi)  # c_d for d = 2


@dataclass(frozen=True)
class SampledField:
    """Real d = 2 field sampled on a centered square lattice.

    values[i, j] = f(x1 = coords[i], x2 = coords[j]); the side count is odd
    so the origin is a sample point.
    """

    values: np.ndarray
    spacing: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise UnsupportedDimension("field must be a square 2-d array")
        if v.shape[0] % 2 == 0:
            raise ValueError("side count must be odd (origin-centered lattice)")
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        if self.spacing <= 0:
            raise ValueError("spacing must be positive")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "spacing", float(self.spacing))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def coords(self) -> np.ndarray:
        half = self.n // 2
        return (np.arange(self.n) - half) * self.spacing

    @property
    def radius(self) -> float:
        """Half the side length."""
        return (self.n // 2) * self.spacing

    @property
    def spline_coeffs(self) -> np.ndarray:
        """Cubic spline coefficients of the lattice values, computed once."""
        cached = getattr(self, "_spline_coeffs", None)
        if cached is None:
            cached = ndimage.spline_filter(self.values, order=3, mode="constant")
            cached.flags.writeable = False
            object.__setattr__(self, "_spline_coeffs", cached)
        return cached

    @classmethod
    def from_function(cls, func, n: int, extent: float):
        """Sample func(x1, x2) on an odd n x n lattice over [-extent, extent]^2."""
        if n % 2 == 0:
            n += 1
        h = 2.0 * extent / (n - 1)
        axis = (np.arange(n) - n // 2) * h
        x1, x2 = np.meshgrid(axis, axis, indexing="ij")
        return cls(np.asarray(func(x1, x2), dtype=np.float64), h)

    def boundary_max(self) -> float:
        v = self.values
        return float(
            max(
                np.max(np.abs(v[0, :])),
                np.max(np.abs(v[-1, :])),
                np.max(np.abs(v[:, 0])),
                np.max(np.abs(v[:, -1])),
            )
        )

    def parity(self, tol: float = 1e-10) -> str:
        """'even', 'odd', or 'none' under x -> -x (reversal is exact on the lattice)."""
        v = self.values
        rev = v[::-1, ::-1]
        scale = max(1.0, float(np.max(np.abs(v))))
        if np.max(np.abs(v - rev)) <= tol * scale:
            return "even"
        if np.max(np.abs(v + rev)) <= tol * scale:
            return "odd"
        return "none"


@dataclass(frozen=True)
class SinogramGrid:
    """Sinogram samples g(t_i, theta_j) with a half-circle extension rule.

    angles lists the stored directions (radians); directions are the unit
    vectors (cos, sin).  For grids covering [0, pi) the other half circle
    is implied by the parity flag:

        g(t, theta + pi) = sign * g(-t, theta),  sign = +1 even / -1 odd.

    Sinograms of functions always carry 'even' (the line through x with
    normal -xi is the line through x with normal xi); 'odd' arises after
    an odd number of t-derivatives.
    """

    t: np.ndarray
    angles: np.ndarray
    values: np.ndarray
    parity: str = "even"

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.float64)
        ang = np.asarray(self.angles, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (len(t), len(ang)):
            raise ValueError("values must have shape (n_t, n_dir)")
        if len(t) > 1:
            steps = np.diff(t)
            if np.max(np.abs(steps - steps[0])) > 1e-9 * abs(steps[0]):
                raise ValueError("t grid must be uniform")
        if self.parity not in ("even", "odd"):
            raise ValueError("parity must be 'even' or 'odd'")
        t, ang, v = t.copy(), ang.copy(), v.copy()
        for arr in (t, ang, v):
            arr.flags.writeable = False
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "angles", ang)
        object.__setattr__(self, "values", v)

    @property
    def n_t(self) -> int:
        return len(self.t)

    @property
    def n_dir(self) -> int:
        return len(self.angles)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0]) if len(self.t) > 1 else 0.0

    @property
    def directions(self) -> np.ndarray:
        """Unit vectors, shape (n_dir, 2); unit norm by construction."""
        return np.stack([np.cos(self.angles), np.sin(self.angles)], axis=-1)

    @property
    def half_circle(self) -> bool:
        """True when the grid stores [0, pi) and relies on the extension rule."""
        return bool(np.max(self.angles) < np.pi - 1e-12)

    def to_binary(self, bin_path, sidecar_path=None, timestamp: str = ""):
        """Write little-endian float64 values with a fixed 32-byte header.

        Header layout: int64 n_t, int64 n_dir, float64 t_min, float64 t_max.
        The JSON sidecar carries angles, parity, dtype, and an optional
        timestamp (informational only; excluded from comparisons).
        """
        header = struct.pack(
            "<qqdd", self.n_t, self.n_dir, float(self.t[0]), float(self.t[-1])
        )
        body = self.values.astype("<f8").tobytes(order="C")
        with open(bin_path, "wb") as fh:
            fh.write(header)
            fh.write(body)
        sidecar = {
            "n_t": self.n_t,
            "n_dir": self.n_dir,
            "t_min": float(self.t[0]),
            "t_max": float(self.t[-1]),
            "angles": [float(a) for a in self.angles],
            "parity": self.parity,
            "dtype": "<f8",
            "timestamp": timestamp,
        }
        if sidecar_path is None:
            sidecar_path = str(bin_path) + ".json"
        with open(sidecar_path, "w") as fh:
            json.dump(sidecar, fh)

    @classmethod
    def from_binary(cls, bin_path, sidecar_path=None):
        if sidecar_path is None:
            sidecar_path = str(bin_path) + ".json"
        try:
            with open(sidecar_path) as fh:
                meta = json.load(fh)
            with open(bin_path, "rb") as fh:
                n_t, n_dir, t_min, t_max = struct.unpack("<qqdd", fh.read(32))
                body = np.frombuffer(fh.read(), dtype="<f8")
            if (n_t, n_dir) != (meta["n_t"], meta["n_dir"]):
                raise SchemaMismatch("header and sidecar disagree on shape")
            values = body.reshape(n_t, n_dir)
            t = np.linspace(t_min, t_max, n_t)
            return cls(t, np.array(meta["angles"]), values, meta["parity"])
        except (KeyError, ValueError, struct.error) as exc:
            raise SchemaMismatch(f"not a serialized sinogram: {exc}") from exc


def default_angles(n_dir: int = 180, full_circle: bool = False) -> np.ndarray:
    span = 2.0 * np.pi if full_circle else np.pi
    return np.arange(n_dir) * (span / n_dir)


def default_t_grid(field: SampledField, n_t: int | None = None) -> np.ndarray:
    """Symmetric uniform t covering the lattice diagonal at the field spacing."""
    reach = field.radius * np.sqrt(2.0)
    if n_t is None:
        half = int(np.ceil(reach / field.spacing))
        return np.arange(-half, half + 1) * field.spacing
    return np.linspace(-reach, reach, n_t)


def _column(field: SampledField, xi: np.ndarray, t: np.ndarray, oversample: int = 2):
    """Line integrals of the interpolated field along normals xi.

    The field is lifted to its cardinal cubic spline interpolant (exact at
    the lattice, transfer flat to about 1e-4 over the central half band)
    and for each offset t the integrand is sampled at spacing h/oversample
    on the segment of length 2 * radius * sqrt(2) centered on the
    projection axis; points outside the lattice read as zero.
    """
    h = field.spacing
    half = field.n // 2
    reach = field.radius * np.sqrt(2.0)
    ds = h / oversample
    s = np.arange(-int(np.ceil(reach / ds)), int(np.ceil(reach / ds)) + 1) * ds
    perp = np.array([-xi[1], xi[0]])
    # sample coordinates: x = t xi + s perp, mapped to fractional indices
    x1 = np.add.outer(t * xi[0], s * perp[0])
    x2 = np.add.outer(t * xi[1], s * perp[1])
    idx1 = x1 / h + half
    idx2 = x2 / h + half
    vals = ndimage.map_coordinates(
        field.spline_coeffs, [idx1.ravel(), idx2.ravel()], order=3, cval=0.0,
        prefilter=False,
    ).reshape(x1.shape)
    return vals.sum(axis=1) * ds


def radon(
    field: SampledField,
    t: np.ndarray | None = None,
    angles: np.ndarray | None = None,
    oversample: int = 2,
    tol=DEFAULT_TOL,
) -> SinogramGrid:
    """Radon transform by trapezoid quadrature with bilinear interpolation.

    Parameters
    ----------
    field : SampledField
        Input; must decay below tol.boundary_decay * max|f| at the lattice
        edge, otherwise line integrals are truncated, not approximated.
    t, angles : arrays, optional
        Sinogram grid; defaults to the field-diagonal t range at the field
        spacing and 180 uniform half-circle directions.
    oversample : int
        Integrand samples per lattice spacing along each line.

    Raises
    ------
    BoundaryMass
        If the field does not decay at the edge.
    """
    scale = float(np.max(np.abs(field.values))) if field.values.size else 0.0
    if scale > 0 and field.boundary_max() > tol.boundary_decay * scale:
        raise BoundaryMass(
            f"field boundary max {field.boundary_max():.3e} exceeds "
            f"{tol.boundary_decay:.1e} * max|f| = {tol.boundary_decay * scale:.3e}"
        )
    if t is None:
        t = default_t_grid(field)
    if angles is None:
        angles = default_angles()
    t = np.asarray(t, dtype=np.float64)
    angles = np.asarray(angles, dtype=np.float64)
    cols = np.empty((len(t), len(angles)))
    for j, theta in enumerate(angles):
        xi = np.array([np.cos(theta), np.sin(theta)])
        cols[:, j] = _column(field, xi, t, oversample)
    return SinogramGrid(t, angles, cols, parity="even")


def backproject(
    g: SinogramGrid, n: int, spacing: float, upsample: int = 4
) -> SampledField:
    """Adjoint of the Radon transform onto an n x n lattice.

    R*{g}(x) = integral over the full unit circle of g(<xi, x>, xi); for a
    half-circle grid the second half is supplied by the parity extension,
    so an 'odd' sinogram backprojects to zero.  Columns are spectrally
    upsampled by ``upsample`` before linear interpolation in t, which keeps
    the interpolation error quadratically small for filtered sinograms
    with content near the t Nyquist rate; offsets beyond the stored t
    range read as zero.
    """
    if n % 2 == 0:
        n += 1
    half = n // 2
    axis = (np.arange(n) - half) * spacing
    x1, x2 = np.meshgrid(axis, axis, indexing="ij")
    out = np.zeros((n, n))
    dtheta = (np.pi if g.half_circle else 2.0 * np.pi) / g.n_dir
    sign = 1.0 if g.parity == "even" else -1.0
    if upsample > 1:
        n_t = g.n_t
        n_pad = 1 << int(np.ceil(np.log2(2 * n_t)))
        spec = np.fft.rfft(g.values, n=n_pad, axis=0)
        spec_up = np.zeros((n_pad * upsample // 2 + 1, g.n_dir), dtype=np.complex128)
        spec_up[: n_pad // 2 + 1] = spec
        vals = np.fft.irfft(spec_up, n=n_pad * upsample, axis=0)
        vals = vals[: (n_t - 1) * upsample + 1, :] * upsample
        t = g.t[0] + np.arange(vals.shape[0]) * (g.dt / upsample)
    else:
        vals = g.values
        t = g.t
    for j in range(g.n_dir):
        xi = g.directions[j]
        proj = x1 * xi[0] + x2 * xi[1]
        col = vals[:, j]
        acc = np.interp(proj, t, col, left=0.0, right=0.0)
        if g.half_circle:
            # theta + pi reads the same stored column at the negated
            # offset: g(<-xi, x>, theta + pi) = sign * g(<xi, x>, theta)
            acc = (1.0 + sign) * acc
        out += acc
    return SampledField(out * dtheta, spacing)


def _apply_frequency_filter(g: SinogramGrid, response, pad_factor: int = 4):
    """Per-column FFT filter with zero padding against circular wrap.

    The discrete transform pairs ghat[k] = sum_i g[i] exp(-j w_k t_i) with
    w_k = 2 pi k / (n_pad dt); `response` receives w_k and multiplies in
    place.  Padding is appended; columns must decay at both t ends (the
    radon precondition guarantees it).
    """
    n_t = g.n_t
    n_pad = 1 << int(np.ceil(np.log2(max(2, pad_factor * n_t))))
    spec = np.fft.rfft(g.values, n=n_pad, axis=0)
    omega = 2.0 * np.pi * np.fft.rfftfreq(n_pad, d=g.dt)
    spec *= response(omega)[:, np.newaxis]
    out = np.fft.irfft(spec, n=n_pad, axis=0)[:n_t, :]
    return out


def filter_Krad(g: SinogramGrid, pad_factor: int = 4) -> SinogramGrid:
    """Apply the filter with frequency response c_2 |w| = |w| / (4 pi).

    The response is an operator symbol, so it is independent of the
    continuous Fourier normalization; discretely each column is filtered
    as irfft(c_2 |w_k| rfft(col)) on a zero-padded grid.  Parity is
    preserved (even symbol).
    """
    out = _apply_frequency_filter(g, lambda w: C2 * np.abs(w), pad_factor)
    return SinogramGrid(g.t, g.angles, out, g.parity)


def filter_Krad_inverse(
    g: SinogramGrid, omega_min: float | None = None, pad_factor: int = 4
) -> SinogramGrid:
    """Divide by the response c_2 |w|, zeroing taps with |w| < omega_min.

    The inverse symbol 1/(c_2 |w|) is singular at w = 0: it is only defined
    on mean-oscillating columns.  Taps below omega_min (default: 1.5 bins
    of the padded grid) are zeroed, which projects out the unrecoverable
    near-DC content; the caller is responsible for feeding columns whose
    spectrum vanishes there.
    """
    if omega_min is None:
        n_pad = 1 << int(np.ceil(np.log2(max(2, pad_factor * g.n_t))))
        omega_min = 1.5 * (2.0 * np.pi / (n_pad * g.dt))

    def response(w):
        safe = np.where(np.abs(w) < omega_min, 1.0, w)
        return np.where(np.abs(w) < omega_min, 0.0, 1.0 / (C2 * np.abs(safe)))

    out = _apply_frequency_filter(g, response, pad_factor)
    return SinogramGrid(g.t, g.angles, out, g.parity)


@dataclass(frozen=True)
class SliceReport:
    """Comparison of a sinogram column spectrum against the field spectrum."""

    angle: float
    omega: np.ndarray
    column_spectrum: np.ndarray
    field_spectrum: np.ndarray
    max_rel_error: float


# alias candidate window: a steps along xi, b steps across; wide enough that
# anything outside has transfer below the keep floor for oversample >= 4
_AB_GRID = np.array(
    [(a, b) for a in range(-16, 17) for b in range(-5, 6)], dtype=np.float64
)
_NEIGHBOR_OFFSETS = np.array(
    [(i, j) for i in (-1.0, 0.0, 1.0) for j in (-1.0, 0.0, 1.0)]
)


def _cubic_transfer(nu):
    """Per-axis transfer of cardinal cubic interpolation.

    nu is in cycles per sample; the B-spline spectrum sinc^4 is divided by
    the prefilter symbol (2 + cos(2 pi nu)) / 3, making the response flat
    to about 1e-4 over the central half band and exactly 1 at integers'
    partition of unity.
    """
    return np.sinc(nu) ** 4 / ((2.0 + np.cos(2.0 * np.pi * nu)) / 3.0)


def _segment_lattice_distances(lats: np.ndarray, xi: np.ndarray, u_max: float):
    """Min distances from the segments {lat + u xi : 0 <= u <= u_max} to Z^2.

    Decides whether an alias ray sweeps close enough to a reciprocal
    lattice point to pick up spectral mass; u_max < 1 so the 3x3 integer
    neighborhoods of both endpoints cover every nearest candidate.
    """
    ends = np.stack([lats, lats + u_max * xi], axis=1)
    cand = (np.round(ends)[:, :, np.newaxis, :] + _NEIGHBOR_OFFSETS).reshape(
        len(lats), 18, 2
    )
    dpar = np.clip((cand - lats[:, np.newaxis, :]) @ xi, 0.0, u_max)
    foot = lats[:, np.newaxis, :] + dpar[:, :, np.newaxis] * xi
    gaps = np.hypot(foot[:, :, 0] - cand[:, :, 0], foot[:, :, 1] - cand[:, :, 1])
    return gaps.min(axis=1)


def _dtft2(field: SampledField, w: np.ndarray) -> np.ndarray:
    """Lattice spectrum (h^2/(2 pi)^2) sum f(x) exp(-j <w, x>) at rows of w.

    This is the exact trigonometric interpolant through the 2-d FFT values
    of the field, evaluated off-grid by direct summation (separable sums).
    """
    c = field.coords
    w = np.atleast_2d(w)
    u = np.exp(-1j * np.outer(w[:, 0], c))
    v = np.exp(-1j * np.outer(w[:, 1], c))
    out = np.einsum("in,in->i", u @ field.values, v)
    return out * (field.spacing**2 / (2.0 * np.pi) ** 2)


def slice_check(
    field: SampledField,
    xi,
    oversample: int = 8,
    alias_reach: float = 8.0,
    spectral_scale: float = 1.5,
    tol=DEFAULT_TOL,
) -> SliceReport:
    """Verify ghat(w) = (2 pi) fhat(w xi) for the column at direction xi.

    The left side is the discrete transform of the quadrature column.  The
    right side restricts the field's lattice spectrum (exact trigonometric
    interpolation of its 2-d FFT) to the ray w xi, scaled by (2 pi)^(d-1),
    and then accounts for the quadrature's own discretization: sampling
    the cardinal cubic interpolant on the rotated lattice (steps dt along
    xi, h/oversample across) makes the column spectrum exactly

        ghat(w) = 2 pi sum_ab fhat_N(v_ab) B(v_ab),
        v_ab = w xi + a (2 pi/dt) xi + b (2 pi oversample/h) perp(xi),

    with B(v) the product over axes of the cardinal cubic transfer
    (sinc^4 over the prefilter symbol), fhat_N the lattice spectrum, and
    (a, b) running over the dual of the rotated quadrature lattice
    (a along xi, b across).  Only
    near-resonant terms contribute: term (a, b) is kept when its alias ray
    sweeps within ``alias_reach`` of a reciprocal lattice point, measured
    as (2 pi/h) times the segment-to-Z^2 distance of
    a (dt/h) xi + b oversample perp(xi) + [0, band] xi in lattice units,
    and when its worst-case contribution, the peak B-spline attenuation
    times the assumed spectral decay exp(-gap^2 / (2 spectral_scale^2)),
    clears 1e-9.  The defaults (reach 8, scale 1.5) cover unit-width
    Gaussian fields and their low-order polynomial modulations; a handful
    of terms survive per direction.  For lattice-aligned directions the
    sum telescopes to 1 by the partition of unity and the plain spectrum
    is used.

    The report's error is max |lhs - rhs| / max |lhs| over the central half
    of the spectrum (|w| up to half Nyquist of the t grid).
    """
    xi = np.asarray(xi, dtype=np.float64).reshape(2)
    norm = float(np.hypot(xi[0], xi[1]))
    if abs(norm - 1.0) > tol.unit_direction:
        raise NonUnitDirection(f"|xi| = {norm:.15g} is not 1")
    t = default_t_grid(field)
    col = _column(field, xi, t, oversample)
    n_t = len(t)
    n_pad = 1 << int(np.ceil(np.log2(2 * n_t)))
    dt = t[1] - t[0]
    omega = 2.0 * np.pi * np.fft.rfftfreq(n_pad, d=dt)
    # ghat(w) = (dt / 2 pi) sum g(t_i) exp(-j w t_i); fft indexes from t[0]
    lhs = np.fft.rfft(col, n=n_pad) * np.exp(-1j * omega * t[0]) * (dt / (2.0 * np.pi))
    band = omega <= np.pi / (2.0 * dt)
    omega_b = omega[band]
    h = field.spacing
    aligned = min(abs(xi[0]), abs(xi[1])) < tol.unit_direction
    if aligned:
        rhs = (2.0 * np.pi) * _dtft2(field, omega_b[:, np.newaxis] * xi)
    else:
        omega_t = 2.0 * np.pi / dt
        omega_s = oversample * 2.0 * np.pi / h
        perp = np.array([-xi[1], xi[0]])
        u_max = h / (4.0 * dt)  # band end in lattice units along xi
        lats = _AB_GRID[:, :1] * (dt / h) * xi + _AB_GRID[:, 1:] * oversample * perp
        gaps = (2.0 * np.pi / h) * _segment_lattice_distances(lats, xi, u_max)
        near = gaps <= alias_reach
        ab = _AB_GRID[near]
        shifts = ab[:, :1] * omega_t * xi + ab[:, 1:] * omega_s * perp
        w_all = omega_b[np.newaxis, :, np.newaxis] * xi + shifts[:, np.newaxis, :]
        tr = _cubic_transfer(w_all[..., 0] * h / (2.0 * np.pi)) * _cubic_transfer(
            w_all[..., 1] * h / (2.0 * np.pi)
        )
        decay = np.exp(-(gaps[near] ** 2) / (2.0 * spectral_scale**2))
        good = tr.max(axis=1) * decay >= 1e-9
        tr = tr[good]
        shifts = shifts[good]
        # shared-phase lattice sums: per term the ray phase factors into the
        # direction's base matrices times a rank-1 shift phase
        c = field.coords
        base_u = np.exp(-1j * np.outer(omega_b * xi[0], c))
        base_v = np.exp(-1j * np.outer(omega_b * xi[1], c))
        pu = np.exp(-1j * np.outer(shifts[:, 0], c))
        pv = np.exp(-1j * np.outer(shifts[:, 1], c))
        n_b, n_c = base_u.shape
        u_rows = (base_u[np.newaxis] * pu[:, np.newaxis, :]).reshape(-1, n_c)
        v_rows = (base_v[np.newaxis] * pv[:, np.newaxis, :]).reshape(-1, n_c)
        vals = np.einsum("rn,rn->r", u_rows @ field.values, v_rows)
        vals = vals.reshape(len(tr), n_b) * (h**2 / (2.0 * np.pi) ** 2)
        rhs = (2.0 * np.pi) * np.einsum("kn,kn->n", vals, tr)
    lhs_b = lhs[band]
    denom = float(np.max(np.abs(lhs_b))) or 1.0
    err = float(np.max(np.abs(lhs_b - rhs)) / denom)
    return SliceReport(
        angle=float(np.arctan2(xi[1], xi[0])),
        omega=omega_b,
        column_spectrum=lhs_b,
        field_spectrum=rhs,
        max_rel_error=err,
    )


def radon_of_ridge(
    m: int,
    t0: float,
    xi0,
    t: np.ndarray,
    angles: np.ndarray,
    angular_tol: float = 1e-9,
) -> SinogramGrid:
    """Filtered sinogram of the ridge profile: the concentrated measure
    P_even{rho_m(. - t0) delta_(xi0)} realized on a discrete grid.

    All mass sits in the column(s) matching +-xi0; the angular Dirac is
    stored as a density (divided by the angular step) so that direction
    sums weighted by the step recover the correct integrals.  The column
    at -xi0 (explicit on full-circle grids, implied by the even extension
    on half grids) carries the reflected profile rho_m(-t - t0).

    Raises
    ------
    DirectionNotOnGrid
        If neither +xi0 nor -xi0 matches a grid direction within tolerance.
    """
    xi0 = np.asarray(xi0, dtype=np.float64).reshape(2)
    nrm = float(np.hypot(xi0[0], xi0[1]))
    if abs(nrm - 1.0) > DEFAULT_TOL.unit_direction:
        raise NonUnitDirection(f"|xi0| = {nrm:.15g} is not 1")
    t = np.asarray(t, dtype=np.float64)
    angles = np.asarray(angles, dtype=np.float64)
    theta0 = np.arctan2(xi0[1], xi0[0]) % (2.0 * np.pi)
    values = np.zeros((len(t), len(angles)))
    grid = SinogramGrid(t, angles, values)  # validates the grid
    span = np.pi if grid.half_circle else 2.0 * np.pi
    dtheta = span / len(angles)
    hit = False
    for j, ang in enumerate(angles):
        delta = (ang - theta0) % (2.0 * np.pi)
        if min(delta, 2.0 * np.pi - delta) <= angular_tol:
            values[:, j] += 0.5 * ridge_profile(m, t - t0) / dtheta
            hit = True
        delta = (ang - (theta0 + np.pi)) % (2.0 * np.pi)
        if min(delta, 2.0 * np.pi - delta) <= angular_tol:
            values[:, j] += 0.5 * ridge_profile(m, -t - t0) / dtheta
            hit = True
    if not hit:
        raise DirectionNotOnGrid(
            f"no grid direction within {angular_tol:.1e} of angle {theta0:.6f}"
        )
    return SinogramGrid(t, angles, values, parity="even")
