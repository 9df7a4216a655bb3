"""State-space certificates for quantitative positive-real membership.

A Hermitian H > 0 certifies that the transfer function of R = [[A, B], [C, D]]
lies in the weighted class with weight 0 <= T < I when the block matrix

    S(H) = diag(-H, I) R + R* diag(-H, I) - G* diag(T, T) G,
    G = [[C, D], [0, I]]

is positive semidefinite. Verification is a single Hermitian eigensolve.
The search for H goes through an algebraic Riccati equation (the Schur
complement of the D-block of S) solved by the Hamiltonian invariant
subspace when that block is definite, with a projected spectral ascent as
the fallback; both extremal Riccati solutions and their midpoint are kept
as candidates, the midpoint typically giving a strictly interior slack.

Certified realization arrays are nonsingular for nonsingular weights, and
their plain matrix inverses are certified by the *same* (H, T); that reuse,
and the eigenvalue split of the array it relies on, are exposed here too.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .hermat import hermitian_power, min_eig, psd_tolerance, require_hermitian
from .realization import (
    Realization,
    array_inverse,
    decode_matrix,
    encode_matrix,
    pbh_test,
    similarity,
)

__all__ = [
    "Certificate",
    "InertiaSplitReport",
    "kyp_slack_matrix",
    "verify_certificate",
    "find_certificate",
    "observability_inertia_check",
    "invert_with_certificate",
    "normalize_internally_passive",
    "certificate_to_dict",
    "certificate_from_dict",
    "validate_certificate",
]


@dataclass
class Certificate:
    """A verified (H, T) pair with the achieved smallest slack eigenvalue."""

    H: np.ndarray
    T: np.ndarray
    slack: float
    method: str = "user-supplied"


def _expand_weight(T, m: int) -> np.ndarray:
    if T is None:
        return np.zeros((m, m), dtype=complex)
    if np.isscalar(T):
        beta = float(T)
        if not 0.0 <= beta < 1.0:
            raise ValueError(f"scalar weight must lie in [0, 1), got {beta}")
        return beta * np.eye(m, dtype=complex)
    T = require_hermitian(T, "T")
    if T.shape != (m, m):
        raise ValueError(f"weight must be {m}x{m}")
    w = np.linalg.eigvalsh(T)
    if w[0] < -psd_tolerance(T) or w[-1] >= 1.0:
        raise ValueError("weight must satisfy 0 <= T < I")
    return T


def _gamma(R: Realization) -> np.ndarray:
    return np.block(
        [
            [R.C, R.D],
            [np.zeros((R.m, R.n)), np.eye(R.m)],
        ]
    )


def kyp_slack_matrix(R: Realization, H, T) -> np.ndarray:
    """The (n+m) x (n+m) Hermitian slack of the certificate inequality."""
    if R.p != R.m:
        raise ValueError("certification requires a square realization array")
    H = require_hermitian(H, "H")
    if H.shape != (R.n, R.n):
        raise ValueError(f"H must be {R.n}x{R.n}")
    T = _expand_weight(T, R.m)
    J = np.block(
        [
            [-H, np.zeros((R.n, R.m))],
            [np.zeros((R.m, R.n)), np.eye(R.m)],
        ]
    )
    G = _gamma(R)
    TT = np.block(
        [[T, np.zeros_like(T)], [np.zeros_like(T), T]]
    )
    S = J @ R.array + R.array.conj().T @ J - G.conj().T @ TT @ G
    return 0.5 * (S + S.conj().T)


def verify_certificate(R: Realization, H, T) -> float:
    """Smallest eigenvalue of the certificate slack; >= -tau certifies membership."""
    H = require_hermitian(H, "H")
    if R.n and np.linalg.eigvalsh(H)[0] <= psd_tolerance(H):
        raise ValueError("certificate matrix H must be positive definite")
    return min_eig(kyp_slack_matrix(R, H, T))


# ---------------------------------------------------------------------------
# certificate search


def _care_extremal(R: Realization, T: np.ndarray):
    """Extremal Hermitian solutions of the certificate Riccati equation.

    Eliminating the (definite) D-block of S(H) by a Schur complement turns
    S(H) >= 0 into a Riccati inequality in H; equality gives

        H Abar + Abar* H - H Rr H - Qbar = 0

    whose solutions are read off the stable / antistable invariant subspaces
    of the Hamiltonian [[Abar, -Rr], [Qbar, -Abar*]]. Raises when the
    D-block is not definite or the Hamiltonian touches the imaginary axis.
    """
    n, m = R.n, R.m
    A, B, C, D = R.A, R.B, R.C, R.D
    eye = np.eye(m)
    W = D + D.conj().T - T - D.conj().T @ T @ D
    W = 0.5 * (W + W.conj().T)
    if np.linalg.eigvalsh(W)[0] <= psd_tolerance(W):
        raise np.linalg.LinAlgError("D-block of the slack is not positive definite")
    Wi = np.linalg.inv(W)
    K = (eye - T @ D).conj().T  # = I - D* T
    Abar = -A + B @ Wi @ K @ C
    Rr = B @ Wi @ B.conj().T
    Qbar = C.conj().T @ T @ C + C.conj().T @ K.conj().T @ Wi @ K @ C
    Qbar = 0.5 * (Qbar + Qbar.conj().T)
    M = np.block([[Abar, -Rr], [Qbar, -Abar.conj().T]])
    ev = np.linalg.eigvals(M)
    if np.abs(ev.real).min() <= 1e-9 * (1.0 + np.abs(ev).max()):
        raise np.linalg.LinAlgError("Hamiltonian spectrum touches the imaginary axis")

    sols = []
    for sort in ("lhp", "rhp"):
        TT, Z, sdim = scipy.linalg.schur(M, output="complex", sort=sort)
        if sdim != n:
            raise np.linalg.LinAlgError("invariant subspace has wrong dimension")
        X = Z[:n, :n]
        Y = Z[n:, :n]
        if 1.0 / np.linalg.cond(X) < 1e-12:
            raise np.linalg.LinAlgError("invariant subspace basis is singular")
        Hs = Y @ np.linalg.inv(X)
        sols.append(0.5 * (Hs + Hs.conj().T))
    return sols[0], sols[1]


def _ascent_candidates(R: Realization, T: np.ndarray, seed: int, restarts: int):
    """Starting points for the spectral ascent."""
    n = R.n
    rng = np.random.default_rng(seed)
    seeds = [np.eye(n)]
    # deflated-weight Riccati solutions make good warm starts near the boundary
    for shrink in (1e-3, 1e-2, 5e-2):
        try:
            Hm, Hp = _care_extremal(R, (1.0 - shrink) * T)
            seeds.append(0.5 * (Hm + Hp))
        except np.linalg.LinAlgError:
            continue
    for _ in range(restarts):
        G = rng.standard_normal((n, n))
        if not R.is_real:
            G = G + 1j * rng.standard_normal((n, n))
        H0 = G @ G.conj().T + 0.1 * np.eye(n)
        seeds.append(H0 * (n / np.trace(H0).real))
    return seeds


def _spectral_ascent(R: Realization, T: np.ndarray, H0: np.ndarray, iterations: int):
    """Subgradient ascent of lambda_min(S(H)) over H = L L* + tau I.

    L is kept lower triangular; the step follows the 1/k schedule. Returns
    the best (slack, H) seen.
    """
    n = R.n
    tau = 1e-10
    Hsym = 0.5 * (H0 + H0.conj().T)
    lo = float(np.linalg.eigvalsh(Hsym)[0])
    jitter = max(0.0, 2.0 * tau - lo) + 1e-12
    L = np.linalg.cholesky(Hsym + (jitter - tau) * np.eye(n))

    def slack_of(Lcur):
        H = Lcur @ Lcur.conj().T + tau * np.eye(n)
        S = kyp_slack_matrix(R, H, T)
        w, V = np.linalg.eigh(S)
        return H, S, float(w[0]), V[:, 0]

    best_H, _, best_slack, _ = slack_of(L)
    step0 = 0.5 * (1.0 + np.linalg.norm(L))
    for k in range(1, iterations + 1):
        H, S, lam, v = slack_of(L)
        if lam > best_slack:
            best_slack, best_H = lam, H
        v1, v2 = v[: R.n], v[R.n :]
        w_vec = R.A @ v1 + R.B @ v2
        P = -(np.outer(w_vec, v1.conj()) + np.outer(v1, w_vec.conj()))
        grad = np.tril(2.0 * P @ L)
        gnorm = np.linalg.norm(grad)
        if gnorm < 1e-14:
            break
        L = L + (step0 / k) * grad / gnorm
    return best_slack, best_H


def find_certificate(
    R: Realization,
    T,
    seed: int = 0,
    restarts: int = 5,
    iterations: int = 2000,
    infeasible_slack: float = -1e-6,
) -> Certificate | None:
    """Search for a positive definite H certifying weight T.

    Returns None when no H with slack above ``infeasible_slack`` is found;
    this is *not* a proof of non-membership (a frequency-sweep witness is).
    Non-minimal realizations only draw a warning, since the converse
    direction of the certificate theory needs minimality.
    """
    if R.p != R.m:
        raise ValueError("certification requires a square realization array")
    T = _expand_weight(T, R.m)
    if R.n == 0:
        # no state: the slack matrix is constant in H
        slack = min_eig(kyp_slack_matrix(R, np.zeros((0, 0)), T))
        if slack >= infeasible_slack:
            return Certificate(H=np.zeros((0, 0)), T=T, slack=slack, method="riccati")
        return None
    if not pbh_test(R).minimal:
        warnings.warn(
            "realization is not minimal; certificate search may be conservative",
            stacklevel=2,
        )

    candidates: list[tuple[float, np.ndarray, str]] = []

    def _consider(H, method):
        H = 0.5 * (H + H.conj().T)
        if np.linalg.eigvalsh(H)[0] <= psd_tolerance(H):
            return
        candidates.append((verify_certificate(R, H, T), H, method))

    try:
        Hm, Hp = _care_extremal(R, T)
        _consider(Hm, "riccati")
        _consider(Hp, "riccati")
        _consider(0.5 * (Hm + Hp), "riccati")
    except np.linalg.LinAlgError:
        pass

    best = max(candidates, key=lambda c: c[0]) if candidates else None
    boundary_noise = 1e-9 * (1.0 + np.linalg.norm(R.array))
    if best is None or best[0] < -boundary_noise:
        for H0 in _ascent_candidates(R, T, seed, restarts):
            slack, H = _spectral_ascent(R, T, H0, iterations)
            _consider(H, "spectral-ascent")
        best = max(candidates, key=lambda c: c[0]) if candidates else None

    if best is None or best[0] < infeasible_slack:
        return None
    slack, H, method = best
    return Certificate(H=H, T=T, slack=slack, method=method)


# ---------------------------------------------------------------------------
# structural consequences of a certificate


@dataclass(frozen=True)
class InertiaSplitReport:
    """Observability transfer and half-plane eigenvalue split of the array."""

    obs_ac: bool
    obs_rq: bool
    left_count: int
    right_count: int
    split_defined: bool

    @property
    def eig_split(self) -> tuple[int, int]:
        return (self.left_count, self.right_count)


def observability_inertia_check(R: Realization, H, T) -> InertiaSplitReport:
    """Observability of (A, C) versus (R, Q), and the array eigenvalue split.

    Q is the weighted quadratic term of the certificate inequality. For a
    nonsingular weight the two observability verdicts coincide, and a
    certified observable array has exactly n eigenvalues in the open left
    half-plane and m in the open right one; an eigenvalue inside the zero
    band leaves the split undefined.
    """
    T = _expand_weight(T, R.m)
    obs_ac = pbh_test(R).observable
    G = _gamma(R)
    TT = np.block([[T, np.zeros_like(T)], [np.zeros_like(T), T]])
    Q = G.conj().T @ TT @ G
    M = R.array
    k = R.n + R.m
    lam = np.linalg.eigvals(M)
    obs_rq = True
    eye = np.eye(k)
    for lv in lam:
        stack = np.vstack([M - lv * eye, Q])
        sv = np.linalg.svd(stack, compute_uv=False)
        rank = int(np.sum(sv > 1e-9 * sv[0])) if sv[0] > 0 else 0
        if rank < k:
            obs_rq = False
            break
    tau = psd_tolerance(M)
    left = int(np.sum(lam.real < -tau))
    right = int(np.sum(lam.real > tau))
    return InertiaSplitReport(
        obs_ac=obs_ac,
        obs_rq=obs_rq,
        left_count=left,
        right_count=right,
        split_defined=(left + right == k),
    )


def invert_with_certificate(R: Realization, H, T) -> tuple[Realization, float]:
    """Array-invert a certified realization and re-verify with the same (H, T).

    The slack of the inverse is the original slack congruence-transported by
    the inverse array, so positive semidefiniteness carries over exactly.
    """
    T = _expand_weight(T, R.m)
    w = np.linalg.eigvalsh(T)
    if w[0] <= psd_tolerance(T):
        raise ValueError("certificate reuse under inversion requires T > 0")
    slack = verify_certificate(R, H, T)
    tau = psd_tolerance(kyp_slack_matrix(R, H, T))
    if slack < -tau:
        raise ValueError(
            f"input certificate does not verify (slack {slack:.3e}); nothing to reuse"
        )
    R_hat = array_inverse(R)
    return R_hat, verify_certificate(R_hat, H, T)


def normalize_internally_passive(R: Realization, H) -> Realization:
    """State change x -> H^{1/2} x, turning a certificate (H, T) into (I, T).

    The slack matrix transforms by congruence with diag(H^{-1/2}, I), so the
    certified inequality survives with identity certificate. Realizations
    already certified by H = I are returned unchanged.
    """
    H = require_hermitian(H, "H")
    if R.n == 0:
        return R
    if np.linalg.eigvalsh(H)[0] <= psd_tolerance(H):
        raise ValueError("H must be positive definite")
    # similarity with V = H^{-1/2}: A -> H^{1/2} A H^{-1/2}, B -> H^{1/2} B
    return similarity(R, hermitian_power(H, -0.5))


# ---------------------------------------------------------------------------
# certificate files


def certificate_to_dict(cert: Certificate) -> dict:
    return {
        "H": encode_matrix(cert.H),
        "T": encode_matrix(cert.T),
        "slack": cert.slack,
        "method": cert.method,
    }


def _decode_square(rows) -> np.ndarray:
    if not rows:
        return np.zeros((0, 0), dtype=complex)
    return decode_matrix(rows)


def certificate_from_dict(data: dict) -> Certificate:
    return Certificate(
        H=_decode_square(data["H"]),
        T=_decode_square(data["T"]),
        slack=float(data["slack"]),
        method=str(data.get("method", "user-supplied")),
    )


def validate_certificate(R: Realization, cert: Certificate) -> float:
    """Recompute the slack and check it matches the stored value to 1e-9."""
    slack = verify_certificate(R, cert.H, cert.T)
    if abs(slack - cert.slack) > 1e-9 * (1.0 + abs(cert.slack)):
        raise ValueError(
            f"stored slack {cert.slack!r} does not match recomputed {slack!r}"
        )
    return slack
