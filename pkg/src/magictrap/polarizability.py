"""Dynamic polarizabilities, a.c. Stark shifts, and magic-wavelength search.

The scalar polarizability of state i is a sum over every catalog line
touching i, counter-rotating term retained:

    alpha(omega) = 1/(3(2J_i+1)) * sum_k |<i||d||k>|^2 * 2 w_ki/(w_ki^2 - w^2)

with signed w_ki = w_k - w_i so downward couplings enter with w_ki < 0.
Vector and tensor parts carry the standard angular-momentum weights (6-j
symbols over the partner J); they are implemented for J <= 1, which covers
every state resolved here. Everything internal is in atomic units.

Field convention: U = -alpha * I / (2 eps0 c) with I the local
time-averaged intensity. Hyperpolarizability O(E^4) is omitted throughout.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .angular import wigner_6j
from .atomdata import Species, TransitionLine
from .constants import (HARTREE_HZ, PLANCK, POLARIZABILITY_AU, SPEED_OF_LIGHT,
                        VACUUM_PERMITTIVITY)
from .errors import PoleError, ValidationError
from .fieldtrap import LinearPolarization, Polarization

# Relative detuning below which a requested wavelength is rejected as
# sitting on a catalog resonance.
POLE_GUARD = 1e-7

# Bisection refinement target for magic-wavelength crossings (relative in
# wavelength). Essentially machine precision: steep crossings wedged between
# two poles need the full float resolution to push the re-evaluated residual
# |delta alpha| below 1e-6 a.u.
REFINE_TOL = 4e-16

DEFAULT_SCAN_POINTS = 2000


@dataclass(frozen=True)
class PolarizabilityResult:
    state: str
    wavelength_m: float
    alpha_scalar_au: float
    alpha_scalar_si: float            # C m^2 / V
    alpha_vector_au: float
    alpha_tensor_au: float
    per_m_au: dict                    # m -> alpha_m (a.u.) for the requested polarization

    def per_m_si(self, m: int) -> float:
        return self.per_m_au[m] * POLARIZABILITY_AU


@dataclass(frozen=True)
class StarkShift:
    state: str
    potential_j: float                # negative = trapping toward high intensity
    shift_hz: float


@dataclass(frozen=True)
class MagicPoint:
    wavelength_m: float
    states: tuple[str, str]
    residual_au: float                # |alpha1 - alpha2| re-evaluated at the root
    bracket_m: tuple[float, float]


class _StateTerms:
    """Per-line arrays for one state: signed w_ki (a.u.), d^2 (a.u.), J_k."""

    def __init__(self, species: Species, state: str):
        level = species.level(state)
        lines = species.lines_touching(state)
        self.state = state
        self.J = level.J
        self.lines: list[TransitionLine] = list(lines)
        omega, d2, j_partner = [], [], []
        for ln in lines:
            sign = 1.0 if ln.lower == state else -1.0
            omega.append(sign * ln.frequency_hz / HARTREE_HZ)
            d2.append(ln.d_au**2)
            partner = ln.upper if ln.lower == state else ln.lower
            j_partner.append(species.level(partner).J)
        self.omega_au = np.asarray(omega)
        self.d2_au = np.asarray(d2)
        self.j_partner = np.asarray(j_partner)

    def guard_check(self, omega_au: float) -> None:
        if self.omega_au.size == 0:
            return
        rel = np.abs(omega_au - np.abs(self.omega_au)) / np.abs(self.omega_au)
        hit = np.argmin(rel)
        if rel[hit] < POLE_GUARD:
            ln = self.lines[int(hit)]
            raise PoleError(
                f"wavelength within pole guard band of line "
                f"{ln.lower}-{ln.upper} ({1e9 * SPEED_OF_LIGHT / ln.frequency_hz:.4f} nm)",
                line=ln)


def _omega_au(wavelength_m: float) -> float:
    if wavelength_m <= 0:
        raise ValidationError("wavelength must be > 0")
    return (SPEED_OF_LIGHT / wavelength_m) / HARTREE_HZ


def _scalar_sum(terms: _StateTerms, omega):
    """Scalar line sum on a scalar or array omega (a.u.)."""
    w = np.asarray(omega)[..., None]
    num = 2.0 * terms.omega_au * terms.d2_au
    res = (num / (terms.omega_au**2 - w**2)).sum(axis=-1)
    return res / (3.0 * (2.0 * terms.J + 1.0))


def _vector_sum(terms: _StateTerms, omega):
    J = terms.J
    if J == 0:
        return np.zeros(np.shape(omega))
    pref = math.sqrt(6.0 * J / ((J + 1.0) * (2.0 * J + 1.0)))
    weights = np.array([
        (-1.0) ** round(J + jk + 1) * wigner_6j(1, 1, 1, J, jk, J)
        for jk in terms.j_partner])
    w = np.asarray(omega)[..., None]
    res = (weights * terms.d2_au * 2.0 * w
           / (terms.omega_au**2 - w**2)).sum(axis=-1)
    return pref * res


def _tensor_sum(terms: _StateTerms, omega):
    J = terms.J
    if J in (0, 0.5):
        return np.zeros(np.shape(omega))
    pref = math.sqrt(10.0 * J * (2.0 * J - 1.0)
                     / (3.0 * (J + 1.0) * (2.0 * J + 1.0) * (2.0 * J + 3.0)))
    weights = np.array([
        (-1.0) ** round(J + jk) * wigner_6j(1, 2, 1, J, jk, J)
        for jk in terms.j_partner])
    w = np.asarray(omega)[..., None]
    res = (weights * terms.d2_au * 2.0 * terms.omega_au
           / (terms.omega_au**2 - w**2)).sum(axis=-1)
    return pref * res


def alpha_scalar(species: Species, state: str, wavelength_m: float) -> PolarizabilityResult:
    """Scalar dynamic polarizability of ``state`` at ``wavelength_m``.

    Raises PoleError when the wavelength falls inside the guard band of a
    catalog line of the state.
    """
    terms = _StateTerms(species, state)
    w = _omega_au(wavelength_m)
    terms.guard_check(w)
    a_s = float(_scalar_sum(terms, w))
    return PolarizabilityResult(
        state=state, wavelength_m=wavelength_m,
        alpha_scalar_au=a_s, alpha_scalar_si=a_s * POLARIZABILITY_AU,
        alpha_vector_au=0.0, alpha_tensor_au=0.0,
        per_m_au={0: a_s} if species.level(state).J == 0 else {})


def alpha_m_resolved(species: Species, state: str, wavelength_m: float,
                     pol: Polarization) -> PolarizabilityResult:
    """Sublevel-resolved polarizability under a given light polarization.

    alpha_m = alpha_s + A cos(kappa) (m/2J) alpha_v
              + [(3m^2 - J(J+1)) / (J(2J-1))] * [(3 cos^2 theta_p - 1)/2] alpha_t

    Only J = 0 and J = 1 states are supported; for J = 0 the result is the
    scalar value with a single m = 0 entry.
    """
    level = species.level(state)
    if level.J not in (0.0, 1.0):
        raise ValidationError(
            f"alpha_m_resolved supports J in {{0, 1}}, state {state} has J={level.J}")
    if level.J == 0.0:
        return alpha_scalar(species, state, wavelength_m)

    terms = _StateTerms(species, state)
    w = _omega_au(wavelength_m)
    terms.guard_check(w)
    a_s = float(_scalar_sum(terms, w))
    a_v = float(_vector_sum(terms, w))
    a_t = float(_tensor_sum(terms, w))

    J = level.J
    circ = pol.circular_degree
    geom = pol.tensor_angle_factor
    per_m = {}
    for m in (-1, 0, 1):
        tensor_weight = (3.0 * m * m - J * (J + 1.0)) / (J * (2.0 * J - 1.0))
        per_m[m] = (a_s + circ * (m / (2.0 * J)) * a_v
                    + tensor_weight * geom * a_t)
    return PolarizabilityResult(
        state=state, wavelength_m=wavelength_m,
        alpha_scalar_au=a_s, alpha_scalar_si=a_s * POLARIZABILITY_AU,
        alpha_vector_au=a_v, alpha_tensor_au=a_t, per_m_au=per_m)


def stark_shift(alpha: PolarizabilityResult, intensity_w_m2: float,
                m: int | None = None) -> StarkShift:
    """a.c. Stark shift U = -alpha_eff I / (2 eps0 c) for time-averaged I.

    ``m`` selects a per_m entry; default is the scalar polarizability.
    """
    if intensity_w_m2 < 0:
        raise ValidationError("intensity must be >= 0")
    if m is None:
        a_si = alpha.alpha_scalar_si
    else:
        a_si = alpha.per_m_si(m)
    u = -a_si * intensity_w_m2 / (2.0 * VACUUM_PERMITTIVITY * SPEED_OF_LIGHT)
    return StarkShift(alpha.state, u, u / PLANCK)


def differential_clock_shift(species: Species, state1: str, state2: str,
                             wavelength_m: float, intensity_w_m2: float) -> float:
    """Trap-induced shift of the 1->2 transition in Hz:
    delta nu = -(alpha2 - alpha1) I / (2 eps0 c h). Zero at a magic point."""
    a1 = alpha_scalar(species, state1, wavelength_m)
    a2 = alpha_scalar(species, state2, wavelength_m)
    diff_si = a2.alpha_scalar_si - a1.alpha_scalar_si
    return -diff_si * intensity_w_m2 / (2.0 * VACUUM_PERMITTIVITY * SPEED_OF_LIGHT * PLANCK)


def _alpha_eval(terms: _StateTerms, omega, pol: Polarization, m: int | None):
    """alpha (a.u.) on a scalar/array omega: scalar part, or sublevel m."""
    a_s = _scalar_sum(terms, omega)
    if m is None or terms.J == 0:
        return a_s
    J = terms.J
    if J != 1.0:
        raise ValidationError(f"sublevel-resolved crossing needs J in {{0, 1}}, got J={J}")
    if abs(m) > J:
        raise ValidationError(f"|m| = {abs(m)} exceeds J = {J}")
    a_v = _vector_sum(terms, omega)
    a_t = _tensor_sum(terms, omega)
    tensor_weight = (3.0 * m * m - J * (J + 1.0)) / (J * (2.0 * J - 1.0))
    return (a_s + pol.circular_degree * (m / (2.0 * J)) * a_v
            + tensor_weight * pol.tensor_angle_factor * a_t)


def _delta_alpha_grid(terms1: _StateTerms, terms2: _StateTerms,
                      wavelengths_m: np.ndarray, jobs: int = 1,
                      pol: Polarization = LinearPolarization(),
                      m1: int | None = None, m2: int | None = None) -> np.ndarray:
    omega = (SPEED_OF_LIGHT / wavelengths_m) / HARTREE_HZ

    def chunk(idx):
        return (_alpha_eval(terms1, omega[idx], pol, m1)
                - _alpha_eval(terms2, omega[idx], pol, m2))

    if jobs <= 1 or omega.size < 64:
        return chunk(slice(None))
    out = np.empty_like(omega)
    bounds = np.linspace(0, omega.size, jobs + 1, dtype=int)
    slices = [slice(bounds[i], bounds[i + 1]) for i in range(jobs)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        for sl, res in zip(slices, pool.map(chunk, slices)):
            out[sl] = res
    return out


def _poles_in(terms: _StateTerms, lo_m: float, hi_m: float) -> list[float]:
    """Wavelengths (m) of catalog resonances of the state inside (lo, hi)."""
    poles = []
    for w in np.abs(terms.omega_au):
        lam = SPEED_OF_LIGHT / (w * HARTREE_HZ)
        if lo_m < lam < hi_m:
            poles.append(lam)
    return poles


def find_magic(species: Species, state1: str, state2: str,
               search: tuple[float, float],
               pol: Polarization | None = None,
               grid_points: int = DEFAULT_SCAN_POINTS,
               jobs: int = 1,
               m1: int | None = None, m2: int | None = None) -> list[MagicPoint]:
    """All wavelengths in ``search`` where the two states' polarizabilities
    cross, refined by bisection.

    By default the crossing condition uses scalar polarizabilities; passing
    ``m1``/``m2`` (with ``pol``) resolves specific sublevels of J = 1
    states instead. The interval is split at every catalog pole of either
    state; each pole-free segment is scanned on a log-spaced grid and sign
    changes are bisected to a relative wavelength tolerance of 1e-12 (well
    inside the documented 1e-9). An empty list means no crossing; identical
    states are rejected.
    """
    if state1 == state2:
        raise ValidationError("state1 = state2: difference is identically zero")
    lo, hi = search
    if not (0 < lo < hi):
        raise ValidationError(f"bad search interval ({lo}, {hi})")
    if pol is None:
        pol = LinearPolarization()

    terms1 = _StateTerms(species, state1)
    terms2 = _StateTerms(species, state2)

    def delta(lams):
        return _delta_alpha_grid(terms1, terms2,
                                 np.atleast_1d(np.asarray(lams, dtype=float)),
                                 jobs, pol, m1, m2)

    # split at poles, shaving a guard margin so no sample sits on a resonance;
    # endpoints handed in on a pole are nudged inward the same way
    all_poles = sorted(set(_poles_in(terms1, 0.0, math.inf)
                           + _poles_in(terms2, 0.0, math.inf)))
    for p in all_poles:
        if abs(lo - p) < 2.0 * POLE_GUARD * p:
            lo = p * (1.0 + 2.0 * POLE_GUARD)
        if abs(hi - p) < 2.0 * POLE_GUARD * p:
            hi = p * (1.0 - 2.0 * POLE_GUARD)
    if hi <= lo:
        return []
    poles = [p for p in all_poles if lo < p < hi]
    edges = [lo]
    for p in poles:
        edges.extend([p * (1.0 - 2.0 * POLE_GUARD), p * (1.0 + 2.0 * POLE_GUARD)])
    edges.append(hi)

    points: list[MagicPoint] = []
    for seg_lo, seg_hi in zip(edges[0::2], edges[1::2]):
        if seg_hi <= seg_lo:
            continue
        n = max(8, int(round(grid_points * math.log(seg_hi / seg_lo) / math.log(hi / lo))))
        grid = np.geomspace(seg_lo, seg_hi, n)
        values = delta(grid)
        sign = np.sign(values)
        for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
            a, b = float(grid[i]), float(grid[i + 1])
            fa = float(values[i])
            bracket = (a, b)
            while (b - a) / b > REFINE_TOL:
                mid = 0.5 * (a + b)
                if mid <= a or mid >= b:
                    break  # no representable point left between the brackets
                fm = float(delta(mid)[0])
                if fm == 0.0:
                    a = b = mid
                    break
                if (fm > 0) == (fa > 0):
                    a, fa = mid, fm
                else:
                    b = mid
            root = 0.5 * (a + b)
            points.append(MagicPoint(
                wavelength_m=root, states=(state1, state2),
                residual_au=abs(float(delta(root)[0])), bracket_m=bracket))
    points.sort(key=lambda p: p.wavelength_m)
    return points


def scan_delta_alpha(species: Species, state1: str, state2: str,
                     lo_m: float, hi_m: float, points: int = 200,
                     jobs: int = 1):
    """(wavelengths, alpha1_au, alpha2_au, delta_au) on a log-spaced grid.

    Grid points that land inside a pole guard band are dropped.
    """
    if state1 == state2:
        raise ValidationError("state1 = state2: difference is identically zero")
    terms1 = _StateTerms(species, state1)
    terms2 = _StateTerms(species, state2)
    lams = np.geomspace(lo_m, hi_m, points)
    omega = (SPEED_OF_LIGHT / lams) / HARTREE_HZ
    keep = np.ones(lams.shape, dtype=bool)
    for terms in (terms1, terms2):
        for w in np.abs(terms.omega_au):
            keep &= np.abs(omega - w) / w >= POLE_GUARD
    lams = lams[keep]
    omega = omega[keep]
    a1 = _scalar_sum(terms1, omega)
    a2 = _scalar_sum(terms2, omega)
    if jobs > 1:  # delta recomputed chunked only to honor the jobs contract
        d = _delta_alpha_grid(terms1, terms2, lams, jobs)
    else:
        d = a1 - a2
    return lams, a1, a2, d
