"""Frequency-domain class membership for realizations.

Membership of F in a positive-real style class is decided by (a) an
analyticity test on the poles of the given realization and (b) a slack sweep
over a frequency grid on the imaginary axis plus the point at infinity.
Boundary-only sampling is justified by the maximum principle for these
classes; the grid density is the documented approximation knob.

Alongside the sweep live the structure-preserving transforms between the
positive and bounded families (Cayley, the two affine maps, left
conjugation) and the extremal-weight searches (largest scalar weight,
largest weight along a ray, strict-positivity margin), all grid+bisection
based.
"""

import math
from dataclasses import dataclass

import numpy as np

from .hermat import hermitian_power, psd_tolerance, require_hermitian
from .qmi import ClassSpec, class_form, membership_slack_matrix
from .realization import (
    Realization,
    adjoint_realization,
    evaluate_grid,
    poles,
)

__all__ = [
    "FrequencyGrid",
    "MembershipReport",
    "ExtremalWeight",
    "Disk",
    "DiskPair",
    "sweep_membership",
    "beta_max",
    "t_ray_max",
    "sp_margin",
    "cayley_function",
    "affine_hb_maps",
    "left_conjugate",
    "disk_params",
    "canonical_check",
]

POLE_SKIP_TOL = 1e-8  # grid points this close to a pole are skipped and reported


@dataclass(frozen=True)
class FrequencyGrid:
    """Nonnegative sample frequencies (rad/s) plus the point at infinity."""

    omegas: np.ndarray
    include_infinity: bool = True

    def __post_init__(self):
        om = np.asarray(self.omegas, dtype=float).ravel()
        if om.size == 0:
            raise ValueError("frequency grid must be nonempty")
        if not np.all(np.isfinite(om)):
            raise ValueError("frequency grid must be finite; infinity is a flag")
        if np.any(om < 0):
            raise ValueError("frequency grid must be nonnegative")
        om = np.sort(om)
        object.__setattr__(self, "omegas", om)

    @classmethod
    def default(cls, points: int = 401) -> "FrequencyGrid":
        """0 plus `points` log-spaced frequencies in [1e-6, 1e6]."""
        om = np.concatenate([[0.0], np.logspace(-6.0, 6.0, points)])
        return cls(omegas=om, include_infinity=True)


@dataclass(frozen=True)
class MembershipReport:
    member: bool
    min_slack: float
    argmin_omega: float
    analyticity_ok: bool
    pole_omegas: tuple = ()
    points_used: int = 0


@dataclass(frozen=True)
class ExtremalWeight:
    """Result of a bisection for the largest admissible weight scale.

    ``empty`` is set when no strictly positive scale passes, i.e. the
    function is merely positive.
    """

    value: float
    empty: bool


def _grid_or_default(grid) -> FrequencyGrid:
    return grid if grid is not None else FrequencyGrid.default()


def _sweep_points(R: Realization, grid: FrequencyGrid):
    """Evaluation points, skipping pole-proximate frequencies.

    Returns (omegas_used, values, skipped_omegas). For realizations with
    complex coefficients the grid is mirrored to negative frequencies.
    """
    om = grid.omegas
    if not R.is_real:
        om = np.unique(np.concatenate([-om[::-1], om]))
    svals = 1j * om
    lam = np.linalg.eigvals(R.A) if R.n else np.zeros(0, dtype=complex)
    if lam.size:
        dist = np.abs(svals[:, None] - lam[None, :]).min(axis=1)
        keep = dist > POLE_SKIP_TOL
    else:
        keep = np.ones(om.size, dtype=bool)
    values = evaluate_grid(R, svals[keep])
    return om[keep], values, tuple(om[~keep])


def _batched_slack(form, values: np.ndarray, side: str = "right"):
    """Per-point (lambda_min, lambda_max, tau_psd) of the membership slack."""
    E = values
    Ec = E.conj().transpose(0, 2, 1)
    lin = form.V @ E + Ec @ form.V
    if side == "right":
        quad = Ec @ (form.X @ E)
    else:
        quad = E @ (form.X @ Ec)
    S = lin + quad + form.Y
    S = 0.5 * (S + S.conj().transpose(0, 2, 1))
    w = np.linalg.eigvalsh(S)
    lo, hi = w[:, 0].real, w[:, -1].real
    tau = 1e-9 * (1.0 + np.maximum(np.abs(lo), np.abs(hi)))
    return lo, hi, tau


def sweep_membership(
    R: Realization, spec: ClassSpec, grid: FrequencyGrid | None = None, side: str = "right"
) -> MembershipReport:
    """Grid membership test of the transfer function against a class.

    Analyticity is required strictly (Hurwitz poles) for the quantitative
    classes HP, HB and for SP; for P and PO poles may sit on the imaginary
    axis, in which case the offending grid points are skipped and reported.
    PO additionally demands the slack vanish at every surviving point (at
    least three must survive); SP delegates to the shift margin.
    """
    grid = _grid_or_default(grid)
    if R.p != R.m:
        raise ValueError("class membership requires a square transfer function")
    info = poles(R)
    strict = spec.tag in ("HP", "HB", "SP")
    analyticity_ok = info.hurwitz if strict else info.analytic_in_cr

    omegas, values, skipped = _sweep_points(R, grid)
    form = class_form(spec if spec.tag != "SP" else ClassSpec("P"), dim=R.m)
    lo, hi, tau = _batched_slack(form, values, side=side)
    om_list = list(omegas)
    lo = list(lo)
    hi = list(hi)
    tau = list(tau)
    if grid.include_infinity:
        S = membership_slack_matrix(form, R.D, side=side)
        w = np.linalg.eigvalsh(S)
        om_list.append(math.inf)
        lo.append(float(w[0].real))
        hi.append(float(w[-1].real))
        tau.append(psd_tolerance(S))
    lo = np.asarray(lo)
    hi = np.asarray(hi)
    tau = np.asarray(tau)
    om_arr = np.asarray(om_list)

    if lo.size == 0:
        return MembershipReport(
            member=False,
            min_slack=math.nan,
            argmin_omega=math.nan,
            analyticity_ok=analyticity_ok,
            pole_omegas=skipped,
            points_used=0,
        )

    k = int(np.lexsort((om_arr, lo))[0])
    min_slack = float(lo[k])
    argmin = float(om_arr[k])

    if spec.tag == "PO":
        equal = np.all(np.abs(lo) <= tau) and np.all(np.abs(hi) <= tau)
        member = analyticity_ok and lo.size >= 3 and bool(equal)
    elif spec.tag == "SP":
        member = analyticity_ok and sp_margin(R, grid=grid) > 0.0
    else:
        member = analyticity_ok and bool(np.all(lo >= -tau))
    return MembershipReport(
        member=member,
        min_slack=min_slack,
        argmin_omega=argmin,
        analyticity_ok=analyticity_ok,
        pole_omegas=skipped,
        points_used=int(lo.size),
    )


# ---------------------------------------------------------------------------
# extremal weights


def beta_max(R: Realization, grid: FrequencyGrid | None = None, tol: float = 1e-8) -> ExtremalWeight:
    """Largest beta in [0, 1) whose scalar-weight sweep passes, by bisection.

    A function that is positive but not quantitatively so comes back as
    value 0 with the ``empty`` flag set.
    """
    grid = _grid_or_default(grid)
    if not poles(R).hurwitz:
        return ExtremalWeight(0.0, True)

    def member(b: float) -> bool:
        return sweep_membership(R, ClassSpec("HP", b), grid).member

    if not member(0.0):
        return ExtremalWeight(0.0, True)
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if member(mid):
            lo = mid
        else:
            hi = mid
    if lo < tol:
        return ExtremalWeight(0.0, True)
    return ExtremalWeight(lo, False)


def t_ray_max(
    R: Realization,
    T_dir,
    grid: FrequencyGrid | None = None,
    tol: float = 1e-8,
) -> ExtremalWeight:
    """Largest t with t * T_dir < I and a passing sweep, along a weight ray."""
    grid = _grid_or_default(grid)
    T_dir = require_hermitian(T_dir, "T_dir")
    w = np.linalg.eigvalsh(T_dir)
    if w[0] < -psd_tolerance(T_dir) or w[-1] <= psd_tolerance(T_dir):
        raise ValueError("T_dir must be a nonzero positive semidefinite direction")
    if not poles(R).hurwitz:
        return ExtremalWeight(0.0, True)
    # back off the open constraint t * T_dir < I far enough that the form
    # matrix keeps its balanced inertia at the probe point
    t_hi = (1.0 - 1e-8) / float(w[-1])

    def member(t: float) -> bool:
        return sweep_membership(R, ClassSpec("HP", t * T_dir), grid).member

    if not member(0.0):
        return ExtremalWeight(0.0, True)
    lo, hi = 0.0, t_hi
    if member(t_hi):
        return ExtremalWeight(t_hi, False)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if member(mid):
            lo = mid
        else:
            hi = mid
    if lo < tol:
        return ExtremalWeight(0.0, True)
    return ExtremalWeight(lo, False)


def sp_margin(R: Realization, tol: float = 1e-8, grid: FrequencyGrid | None = None) -> float:
    """Largest eps >= 0 such that F(s - eps) still passes the positivity sweep.

    Bisection over [0, -max Re lambda(A)); a non-Hurwitz realization has no
    margin and returns 0.
    """
    grid = _grid_or_default(grid)
    info = poles(R)
    if not info.hurwitz or R.n == 0:
        # constant functions are entire; margin is capped only by positivity
        if R.n == 0:
            base = sweep_membership(R, ClassSpec("P"), grid)
            return math.inf if base.member else 0.0
        return 0.0
    eps_max = -float(info.eigenvalues.real.max())

    def member(eps: float) -> bool:
        shifted = Realization(R.A + eps * np.eye(R.n), R.B, R.C, R.D)
        return sweep_membership(shifted, ClassSpec("P"), grid).member

    if not member(0.0):
        return 0.0
    lo, hi = 0.0, eps_max
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if member(mid):
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# transforms


def cayley_function(R: Realization) -> Realization:
    """Realization of (I - F)(I + F)^{-1}; involutive on transfer functions."""
    if R.p != R.m:
        raise ValueError("Cayley transform requires a square transfer function")
    eye = np.eye(R.m)
    IpD = eye + R.D
    if R.m and 1.0 / np.linalg.cond(IpD) < 1e-12:
        raise ValueError("Cayley transform undefined: -1 in the spectrum of D")
    W = np.linalg.inv(IpD)
    return Realization(
        A=R.A - R.B @ W @ R.C,
        B=R.B @ W,
        C=-2.0 * W @ R.C,
        D=2.0 * W - eye,
    )


def _expand_weight(T, m: int) -> np.ndarray:
    if np.isscalar(T):
        return float(T) * np.eye(m, dtype=complex)
    return require_hermitian(T, "T")


def affine_hb_maps(R: Realization, T) -> tuple[Realization, Realization]:
    """The two affine companions of F inside the hyper-bounded class.

    G2 = (I + T^{-1})^{-1/2} (F - T^{-1}) (I + T^{-1})^{-1/2} and G3 = -G2.
    Both inherit HB(T) membership from HP(T) membership of F. The weight
    must be nonsingular (0 < T < I).
    """
    if R.p != R.m:
        raise ValueError("affine maps require a square transfer function")
    T = _expand_weight(T, R.m)
    w = np.linalg.eigvalsh(T)
    if w[0] <= psd_tolerance(T):
        raise ValueError("affine maps require a nonsingular weight (T > 0)")
    if w[-1] >= 1.0:
        raise ValueError("weight must satisfy T < I")
    Ti = hermitian_power(T, -1)
    scale = hermitian_power(np.eye(R.m) + Ti, -0.5)
    G2 = Realization(
        A=R.A.copy(),
        B=R.B @ scale,
        C=scale @ R.C,
        D=scale @ (R.D - Ti) @ scale,
    )
    G3 = Realization(A=G2.A.copy(), B=G2.B.copy(), C=-G2.C, D=-G2.D)
    return G2, G3


def left_conjugate(R: Realization, T) -> Realization:
    """Realization of (I - T^2)^{-1/2} (F(conj(s)))* (I - T^2)^{1/2}.

    Built on the adjoint system (A*, C*, B*, D*); membership in the
    weighted class is preserved in both directions.
    """
    if R.p != R.m:
        raise ValueError("left conjugation requires a square transfer function")
    T = _expand_weight(T, R.m)
    w = np.linalg.eigvalsh(T)
    if w[0] < -psd_tolerance(T) or w[-1] >= 1.0:
        raise ValueError("weight must satisfy 0 <= T < I")
    eye = np.eye(R.m)
    W = hermitian_power(eye - T @ T, 0.5)
    Wi = hermitian_power(eye - T @ T, -0.5)
    adj = adjoint_realization(R)
    return Realization(A=adj.A, B=adj.B @ W, C=Wi @ adj.C, D=Wi @ adj.D @ W)


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float


@dataclass(frozen=True)
class DiskPair:
    """Scalar geometry of a weight beta: the sub-unit disk and its Cayley image."""

    center_disk: Disk
    inv_disk: Disk | None
    half_plane: bool

    def __iter__(self):
        yield self.center_disk
        yield self.inv_disk


def disk_params(beta: float) -> DiskPair:
    """Centered disk D(0, sqrt(1-b)/sqrt(1+b)) and its image D(1/b, sqrt(1-b^2)/b).

    At beta = 0 the image degenerates to the right half-plane and the
    ``half_plane`` flag is set.
    """
    beta = float(beta)
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"beta must lie in [0, 1), got {beta}")
    center = Disk(0.0 + 0.0j, math.sqrt(1.0 - beta) / math.sqrt(1.0 + beta))
    if beta == 0.0:
        return DiskPair(center_disk=center, inv_disk=None, half_plane=True)
    inv = Disk(1.0 / beta + 0.0j, math.sqrt(1.0 - beta * beta) / beta)
    return DiskPair(center_disk=center, inv_disk=inv, half_plane=False)


_RIGHT_HALF_PLANE_SAMPLES = tuple(
    complex(sig, om)
    for sig in (0.1, 1.0, 10.0)
    for om in (0.0, 0.5, 2.0, 50.0)
)


def canonical_check(R: Realization, T, grid: FrequencyGrid | None = None) -> bool:
    """True for members whose slack vanishes identically on the imaginary axis.

    The defining inequality must hold with equality (within 10x the PSD zero
    band) at every surviving grid frequency while remaining nonnegative at
    interior right-half-plane sample points. Non-members are simply not
    canonical.
    """
    grid = _grid_or_default(grid)
    T = _expand_weight(T, R.m)
    spec = ClassSpec("HP", T)
    report = sweep_membership(R, spec, grid)
    if not report.member:
        return False
    form = class_form(spec, dim=R.m)
    _, values, _ = _sweep_points(R, grid)
    lo, hi, tau = _batched_slack(form, values)
    if not (np.all(np.abs(lo) <= 10 * tau) and np.all(np.abs(hi) <= 10 * tau)):
        return False
    interior = evaluate_grid(R, np.asarray(_RIGHT_HALF_PLANE_SAMPLES))
    lo_i, _, tau_i = _batched_slack(form, interior)
    return bool(np.all(lo_i >= -tau_i))
