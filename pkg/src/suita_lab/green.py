"""Green functions, Robin constants and logarithmic capacity on model domains.

The (negative) Green function G(., w) of a domain is harmonic away from the
pole w, behaves like log|z - w| at the pole, and vanishes on the boundary.
Closed forms used here:

* Disc(c, R):   G(z, w) = log( R |z - w| / |R^2 - conj(w - c)(z - c)| )
* Annulus q < |z| < 1, via the canonical product
      P(t) = (1 - t) * prod_{k>=1} (1 - q^{2k} t)(1 - q^{2k}/t),
  assembled as
      G(z, w) = log|P(z/w)| - log|P(z conj(w))| + log|w|
                - log|w| log|z| / log q.
  The product form satisfies P(q^2 t) = -P(t)/t, which makes G vanish on
  both circles; the boundary-vanishing invariant in the test suite is the
  self-certification of the coefficient assembly.
* MoebiusImage: pullback, since G is conformally invariant.

Gradients come from term-wise differentiation: writing G = Re f with f
holomorphic in z, grad G = (Re f', -Im f').  The same f'' feeds the Newton
refinement of critical points.

Everything is vectorized over numpy arrays of complex z; the scalar public
operations wrap the array kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .errors import (
    CoincidentPoints,
    ConvergenceFailure,
    PointOutsideDomain,
    RadiusTooLarge,
    UnsupportedDomain,
)
from .geometry import Annulus, Disc, Domain, MoebiusImage, Point, PolarComplement, Polygon

# ---------------------------------------------------------------------------
# Result types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GreenValue:
    value: float
    grad_x: float
    grad_y: float
    truncation_bound: float

    @property
    def gradient(self) -> complex:
        return complex(self.grad_x, self.grad_y)


@dataclass(frozen=True)
class CapacityResult:
    capacity: float
    robin_constant: float  # log of the capacity
    truncation_bound: float


@dataclass(frozen=True)
class CriticalPoint:
    location: complex
    level: float  # G at the critical point
    gradient_residual: float
    order: int  # local normal-form exponent n >= 2


# ---------------------------------------------------------------------------
# Annulus canonical product
# ---------------------------------------------------------------------------


def annulus_truncation_order(q: float) -> int:
    """Smallest K with q^(2K-2) below 1e-15.

    The factors (1 - q^{2k} t) with k > K then perturb log P by less than
    ~1e-14 for every argument t that the Green function assembly uses
    (|t| between about q and 1/q).
    """
    return max(4, int(math.ceil(1.0 + 7.5 * math.log(10) / (-math.log(q)))))


def _prime_log_abs(t: np.ndarray, q: float, order: int) -> np.ndarray:
    """log |P(t)| truncated at the given product order."""
    acc = np.log(np.abs(1.0 - t))
    for k in range(1, order + 1):
        s = q ** (2 * k)
        acc += np.log(np.abs(1.0 - s * t)) + np.log(np.abs(1.0 - s / t))
    return acc


def _prime_log_deriv(t: np.ndarray, q: float, order: int) -> np.ndarray:
    """P'(t)/P(t) truncated at the given product order."""
    acc = -1.0 / (1.0 - t)
    for k in range(1, order + 1):
        s = q ** (2 * k)
        acc += -s / (1.0 - s * t) + s / (t * (t - s))
    return acc


def _prime_log_deriv2(t: np.ndarray, q: float, order: int) -> np.ndarray:
    """d/dt of P'(t)/P(t)."""
    acc = -1.0 / (1.0 - t) ** 2
    for k in range(1, order + 1):
        s = q ** (2 * k)
        acc += -(s * s) / (1.0 - s * t) ** 2 - s * (2.0 * t - s) / (t * (t - s)) ** 2
    return acc


def _prime_tail_bound(t_abs: np.ndarray, q: float, order: int) -> np.ndarray:
    """Bound on the dropped log-product tail for |t| in the working shell."""
    s = q ** (2 * (order + 1))
    return 1.4 * s * (t_abs + 1.0 / t_abs) / (1.0 - q * q)


# ---------------------------------------------------------------------------
# Raw field evaluation (no membership checks; callers mask)
# ---------------------------------------------------------------------------


def _require_series_domain(domain: Domain) -> tuple[Domain, tuple[complex, complex, complex, complex]]:
    core, coeffs = geo.flatten_moebius(domain)
    if isinstance(core, (Polygon, PolarComplement)):
        raise UnsupportedDomain(f"no series Green function for {type(core).__name__}; use the Monte Carlo oracle")
    return core, coeffs


def green_values_raw(domain: Domain, w: Point, z: np.ndarray) -> np.ndarray:
    """G(z, w) evaluated by formula on an array of z.

    No membership clipping: the closed forms continue analytically a short
    distance past the boundary, which the grid machinery exploits so that
    level-line interpolation stays exact near the boundary.
    """
    core, coeffs = _require_series_domain(domain)
    z = np.asarray(z, dtype=complex)
    if isinstance(domain, MoebiusImage):
        zeta_w = geo.moebius_inverse(coeffs, w)
        zeta_z = geo.moebius_inverse(coeffs, z)
        return green_values_raw(core, zeta_w, zeta_z)
    with np.errstate(divide="ignore"):  # log(0) = -inf at the pole is correct
        if isinstance(core, Disc):
            u = z - core.center
            v = w - core.center
            r2 = core.radius * core.radius
            return np.log(core.radius * np.abs(z - w) / np.abs(r2 - np.conj(v) * u))
        q = core.q
        order = annulus_truncation_order(q)
        lw, lq = math.log(abs(w)), math.log(q)
        g = _prime_log_abs(z / w, q, order) - _prime_log_abs(z * np.conj(w), q, order)
        return g + lw - lw * np.log(np.abs(z)) / lq


def green_fprime_raw(domain: Domain, w: Point, z: np.ndarray) -> np.ndarray:
    """f'(z) where G = Re f; grad G = (Re f', -Im f')."""
    core, coeffs = _require_series_domain(domain)
    z = np.asarray(z, dtype=complex)
    if isinstance(domain, MoebiusImage):
        zeta_w = geo.moebius_inverse(coeffs, w)
        zeta_z = geo.moebius_inverse(coeffs, z)
        a, b, c, d = coeffs
        det = a * d - b * c
        inv_prime = det / (a - c * z) ** 2  # derivative of the inverse map
        return green_fprime_raw(core, zeta_w, zeta_z) * inv_prime
    if isinstance(core, Disc):
        v = w - core.center
        r2 = core.radius * core.radius
        return 1.0 / (z - w) + np.conj(v) / (r2 - np.conj(v) * (z - core.center))
    q = core.q
    order = annulus_truncation_order(q)
    lw, lq = math.log(abs(w)), math.log(q)
    return (
        _prime_log_deriv(z / w, q, order) / w
        - np.conj(w) * _prime_log_deriv(z * np.conj(w), q, order)
        - (lw / lq) / z
    )


def green_fsecond_raw(domain: Domain, w: Point, z: np.ndarray) -> np.ndarray:
    """f''(z); the full Hessian of G follows since G is harmonic."""
    core, coeffs = _require_series_domain(domain)
    z = np.asarray(z, dtype=complex)
    if isinstance(domain, MoebiusImage):
        zeta_w = geo.moebius_inverse(coeffs, w)
        zeta_z = geo.moebius_inverse(coeffs, z)
        a, b, c, d = coeffs
        det = a * d - b * c
        ip = det / (a - c * z) ** 2
        ipp = 2.0 * c * det / (a - c * z) ** 3
        return green_fsecond_raw(core, zeta_w, zeta_z) * ip * ip + green_fprime_raw(core, zeta_w, zeta_z) * ipp
    if isinstance(core, Disc):
        v = w - core.center
        r2 = core.radius * core.radius
        return -1.0 / (z - w) ** 2 + np.conj(v) ** 2 / (r2 - np.conj(v) * (z - core.center)) ** 2
    q = core.q
    order = annulus_truncation_order(q)
    lw, lq = math.log(abs(w)), math.log(q)
    return (
        _prime_log_deriv2(z / w, q, order) / (w * w)
        - np.conj(w) ** 2 * _prime_log_deriv2(z * np.conj(w), q, order)
        + (lw / lq) / (z * z)
    )


def green_truncation_bound(domain: Domain, w: Point, z: np.ndarray) -> np.ndarray:
    """Reported bound on the series truncation error of G (0 for closed forms)."""
    core, coeffs = _require_series_domain(domain)
    z = np.asarray(z, dtype=complex)
    if isinstance(domain, MoebiusImage):
        zeta_w = geo.moebius_inverse(coeffs, w)
        zeta_z = geo.moebius_inverse(coeffs, z)
        return green_truncation_bound(core, zeta_w, zeta_z)
    if isinstance(core, Disc):
        return np.zeros(z.shape)
    q = core.q
    order = annulus_truncation_order(q)
    return _prime_tail_bound(np.abs(z / w), q, order) + _prime_tail_bound(np.abs(z * np.conj(w)), q, order)


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def green_eval(domain: Domain, w: Point, z: Point) -> GreenValue:
    """Value and gradient of the Green function G(., w) at z."""
    if isinstance(domain, (Polygon, PolarComplement)):
        raise UnsupportedDomain("green_eval supports Disc, Annulus and their Moebius images")
    if z == w:
        raise CoincidentPoints("Green function pole: z == w")
    if not geo.contains(domain, w):
        raise PointOutsideDomain(f"pole {w} outside domain")
    if not geo.contains(domain, z):
        raise PointOutsideDomain(f"evaluation point {z} outside domain")
    za = np.asarray(z, dtype=complex)
    value = float(green_values_raw(domain, w, za))
    fp = complex(green_fprime_raw(domain, w, za))
    bound = float(green_truncation_bound(domain, w, za))
    return GreenValue(value=value, grad_x=fp.real, grad_y=-fp.imag, truncation_bound=bound)


def robin_capacity(domain: Domain, w: Point) -> CapacityResult:
    """Logarithmic capacity c(w) = exp(Robin constant) of the complement.

    The log singularity is cancelled inside the series (the (1 - t) factor
    of the canonical product is dropped at t = 1), never by subtracting two
    nearly equal logarithms.
    """
    if isinstance(domain, PolarComplement):
        if not geo.contains(domain, w):
            raise PointOutsideDomain(f"{w} outside domain")
        return CapacityResult(capacity=0.0, robin_constant=-math.inf, truncation_bound=0.0)
    if isinstance(domain, Polygon):
        raise UnsupportedDomain("capacity on polygons is oracle territory")
    if not geo.contains(domain, w):
        raise PointOutsideDomain(f"{w} outside domain")
    core, coeffs = geo.flatten_moebius(domain)
    if isinstance(domain, MoebiusImage):
        zeta_w = geo.moebius_inverse(coeffs, w)
        base = robin_capacity(core, zeta_w)
        scale = abs(geo.moebius_fprime(coeffs, zeta_w))
        robin = base.robin_constant - math.log(scale)
        return CapacityResult(capacity=math.exp(robin), robin_constant=robin, truncation_bound=base.truncation_bound)
    if isinstance(core, Disc):
        d2 = abs(w - core.center) ** 2
        c = core.radius / (core.radius**2 - d2)
        return CapacityResult(capacity=c, robin_constant=math.log(c), truncation_bound=0.0)
    q = core.q
    order = annulus_truncation_order(q)
    lw, lq = math.log(abs(w)), math.log(q)
    x = abs(w) ** 2
    log_regular = 0.0
    for k in range(1, order + 1):
        s = q ** (2 * k)
        log_regular += 2.0 * math.log(1.0 - s)
    log_p = float(_prime_log_abs(np.asarray(x, dtype=complex), q, order))
    robin = log_regular - log_p - lw * lw / lq
    # Tail: the dropped factors of the regular part plus those of P(x).
    tail = 2.0 * q ** (2 * (order + 1)) / (1.0 - q * q) + float(
        _prime_tail_bound(np.asarray([x]), q, order)[0]
    )
    return CapacityResult(capacity=math.exp(robin), robin_constant=robin, truncation_bound=tail)


def disc_max_green(domain: Domain, w: Point, r: float, n_angles: int = 4096) -> float:
    """Maximum of G(., w) over the closed disc of radius r around w.

    G is subharmonic there, so the maximum sits on the circle |z - w| = r.
    Dense angular sampling (offset half a spacing so a boundary tangency is
    never hit exactly) plus one parabolic refinement per local maximum, and
    a second-order modulus-of-continuity margin capped at 1e-8.  The result
    is clamped strictly below zero: G < 0 inside the domain.
    """
    if isinstance(domain, (Polygon, PolarComplement)):
        raise UnsupportedDomain("disc_max_green supports Disc, Annulus and their Moebius images")
    delta = geo.boundary_distance(domain, w)
    if not (0 < r <= delta * (1 + 1e-12)):
        raise RadiusTooLarge(f"r={r} exceeds boundary distance {delta}")
    dtheta = 2 * math.pi / n_angles
    theta = (np.arange(n_angles) + 0.5) * dtheta
    circle = w + r * np.exp(1j * theta)
    vals = green_values_raw(domain, w, circle)
    # Parabolic refinement through each discrete local maximum.
    left = np.roll(vals, 1)
    right = np.roll(vals, -1)
    is_max = (vals >= left) & (vals >= right)
    best = float(np.max(vals))
    idx = np.nonzero(is_max)[0]
    denom = right[idx] - 2 * vals[idx] + left[idx]
    ok = denom < -1e-300
    offset = np.zeros(len(idx))
    offset[ok] = 0.5 * dtheta * (left[idx][ok] - right[idx][ok]) / denom[ok]
    offset = np.clip(offset, -dtheta, dtheta)
    refined_pts = w + r * np.exp(1j * (theta[idx] + offset))
    refined_vals = green_values_raw(domain, w, refined_pts)
    if len(refined_vals):
        best = max(best, float(np.max(refined_vals)))
    second = np.abs(right - 2 * vals + left) / dtheta**2
    margin = min(float(np.max(second)) * dtheta**2 / 8.0, 1e-8)
    return min(best + margin, -1e-15)


def boundary_flux(domain: Domain, w: Point, n: int) -> float:
    """Flux of the outward normal derivative of G(., w) over the boundary.

    One-sided second-order differences along inward normals, step tied to
    the node spacing; trapezoid quadrature per circle (spectrally accurate
    for these smooth periodic integrands).  Converges to 2*pi.
    """
    if not isinstance(domain, (Disc, Annulus)):
        raise UnsupportedDomain("boundary_flux supports Disc and Annulus")
    if n < 64:
        raise ValueError("need at least 64 quadrature nodes")
    if not geo.contains(domain, w):
        raise PointOutsideDomain(f"{w} outside domain")
    samples = geo.boundary_sample(domain, n)
    pts = np.array([p for p, _ in samples])
    nrm = np.array([v for _, v in samples])
    if isinstance(domain, Disc):
        weights = np.full(n, 2 * math.pi * domain.radius / n)
        spacing = weights
    else:
        q = domain.q
        n_outer = int(round(n / (1.0 + q)))
        n_outer = min(max(n_outer, 1), n - 1)
        n_inner = n - n_outer
        weights = np.concatenate(
            [np.full(n_outer, 2 * math.pi / n_outer), np.full(n_inner, 2 * math.pi * q / n_inner)]
        )
        spacing = weights
    h = 1e-4 * spacing
    g_half = green_values_raw(domain, w, pts - 0.5 * h * nrm)
    g_full = green_values_raw(domain, w, pts - h * nrm)
    # G = 0 on the boundary; (G(-h) - 4 G(-h/2)) / h = G_n + O(h^2).
    g_n = (g_full - 4.0 * g_half) / h
    return float(np.sum(g_n * weights))


# ---------------------------------------------------------------------------
# Critical points
# ---------------------------------------------------------------------------


def gradient_grid_minima(domain: Domain, w: Point, grid_size: int = 512) -> list[complex]:
    """Coarse localization of the zeros of grad G: local minima of |f'| on a lattice.

    Excludes a pole neighborhood of radius 10 cells and filters out minima
    that are incompatible with an actual zero (|f'| should be of order
    |f''| * cell size near one).  Returned points seed the Newton polish.
    """
    core, coeffs = geo.flatten_moebius(domain)
    if isinstance(core, (Polygon, PolarComplement)):
        raise UnsupportedDomain("gradient scan needs a series Green function")
    if isinstance(domain, MoebiusImage):
        zeta_w = geo.moebius_inverse(coeffs, w)
        seeds = gradient_grid_minima(core, zeta_w, grid_size)
        return [complex(geo.moebius_forward(coeffs, s)) for s in seeds]
    x0, x1, y0, y1 = geo.bounding_box(domain)
    xs = np.linspace(x0, x1, grid_size)
    ys = np.linspace(y0, y1, grid_size)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    Z = X + 1j * Y
    h = max((x1 - x0), (y1 - y0)) / (grid_size - 1)
    inside = geo.contains_mask(domain, Z) & (np.abs(Z - w) > 10 * h)
    mag = np.full(Z.shape, np.inf)
    if np.any(inside):
        mag[inside] = np.abs(green_fprime_raw(domain, w, Z[inside]))
    local = np.ones(Z.shape, dtype=bool)
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            if dx == dy == 0:
                continue
            shifted = np.full(Z.shape, np.inf)
            sx = slice(max(dx, 0), Z.shape[0] + min(dx, 0))
            tx = slice(max(-dx, 0), Z.shape[0] + min(-dx, 0))
            sy = slice(max(dy, 0), Z.shape[1] + min(dy, 0))
            ty = slice(max(-dy, 0), Z.shape[1] + min(-dy, 0))
            shifted[tx, ty] = mag[sx, sy]
            local &= mag <= shifted
    cand = np.nonzero(local & inside & np.isfinite(mag))
    points: list[complex] = []
    for i, j in zip(*cand):
        z0 = complex(Z[i, j])
        f2 = abs(complex(green_fsecond_raw(domain, w, np.asarray(z0))))
        if mag[i, j] > 3.0 * h * f2 + 1e-12:
            continue  # spurious minimum: |f'| too large for a nearby zero
        if all(abs(z0 - p) > 3 * h for p in points):
            points.append(z0)
    points.sort(key=lambda p: abs(complex(green_fprime_raw(domain, w, np.asarray(p)))))
    return points


def critical_points(
    domain: Domain, w: Point, grid_size: int = 512, residual_tol: float = 1e-9
) -> list[CriticalPoint]:
    """All zeros of grad G(., w), Newton-refined from the grid scan seeds.

    Simply connected domains have none: an empty list is returned for a
    disc (or Moebius image of one).  The local order n (G = t0 + Re(u^n h)
    after recentering) is estimated from the decay rate of |grad G| on
    shrinking circles.
    """
    core, coeffs = geo.flatten_moebius(domain)
    if isinstance(core, (Polygon, PolarComplement)):
        raise UnsupportedDomain("critical_points needs a series Green function")
    if not geo.contains(domain, w):
        raise PointOutsideDomain(f"{w} outside domain")
    if isinstance(core, Disc):
        return []
    zeta_w = geo.moebius_inverse(coeffs, w) if isinstance(domain, MoebiusImage) else w
    seeds = gradient_grid_minima(core, zeta_w, grid_size)
    found: list[tuple[complex, float]] = []
    for seed in seeds:
        zc = seed
        ok = False
        for _ in range(60):
            fp = complex(green_fprime_raw(core, zeta_w, np.asarray(zc)))
            if abs(fp) < 1e-13:
                ok = True
                break
            fs = complex(green_fsecond_raw(core, zeta_w, np.asarray(zc)))
            if fs == 0:
                break
            step = fp / fs
            zc = zc - step
            if abs(step) < 1e-15:
                ok = True
                break
        resid = abs(complex(green_fprime_raw(core, zeta_w, np.asarray(zc))))
        if not ok and resid > residual_tol:
            raise ConvergenceFailure(f"Newton stalled at residual {resid} from seed {seed}")
        if geo.contains(core, zc) and all(abs(zc - p) > 1e-8 for p, _ in found):
            found.append((zc, resid))
    results = []
    for zc, resid in found:
        order = _estimate_order(core, zeta_w, zc)
        level = float(green_values_raw(core, zeta_w, np.asarray(zc)))
        if isinstance(domain, MoebiusImage):
            z_img = complex(geo.moebius_forward(coeffs, zc))
            scale = abs(geo.moebius_fprime(coeffs, zc))
            results.append(CriticalPoint(z_img, level, resid / scale, order))
        else:
            results.append(CriticalPoint(zc, level, resid, order))
    results.sort(key=lambda cp: (cp.level, cp.location.real, cp.location.imag))
    return results


def _estimate_order(core: Domain, w: Point, z0: complex) -> int:
    """Least-squares slope of log max|f'| vs log rho on shrinking circles."""
    radii = np.logspace(-4, -2, 7)
    angles = np.exp(1j * np.linspace(0, 2 * math.pi, 32, endpoint=False))
    logs = []
    for rho in radii:
        ring = z0 + rho * angles
        logs.append(math.log(float(np.max(np.abs(green_fprime_raw(core, w, ring))))))
    slope = np.polyfit(np.log(radii), np.array(logs), 1)[0]
    return max(2, int(round(slope)) + 1)
