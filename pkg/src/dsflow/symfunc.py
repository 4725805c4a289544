"""Elementary symmetric functions of principal-curvature vectors.

Everything here works on plain ``numpy`` arrays.  The batched helpers
(`sigma_batch`, `minors_batch`) accept arrays of shape ``(..., n)`` and
evaluate one curvature vector per trailing row; the scalar entry points
(`sigma`, `sigma_minor`, ...) wrap them for single vectors.

sigma_k is evaluated by the running-product recursion
``e_j <- e_j + lam_i * e_{j-1}`` which is exact in O(n*k) operations; for
the small n used here (n <= 8) this is preferable to Newton identities.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import ConeError, DomainError

#: absolute tolerance for closure-cone membership decisions
TOL_CONE = 1e-12


def b_nk(n: int, k: int) -> float:
    """Normalization (C(n,k))**(1/k), the value of sigma_k**(1/k) at (1,...,1)."""
    return comb(n, k) ** (1.0 / k)


def sigma_batch(lam: np.ndarray, kmax: int) -> np.ndarray:
    """All sigma_j(lam) for j = 0..kmax, batched over leading axes.

    lam has shape (..., n); the result has shape (..., kmax+1) with
    result[..., j] = sigma_j.
    """
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    if not 0 <= kmax <= n:
        raise DomainError(f"kmax={kmax} out of range for n={n}")
    e = np.zeros(lam.shape[:-1] + (kmax + 1,))
    e[..., 0] = 1.0
    for i in range(n):
        top = min(i + 1, kmax)
        for j in range(top, 0, -1):
            e[..., j] += lam[..., i] * e[..., j - 1]
    return e


def minors_batch(lam: np.ndarray, kmax: int) -> np.ndarray:
    """All sigma_j(lam | i) for j = 0..kmax and every deleted index i.

    lam has shape (..., n); the result has shape (..., n, kmax+1) with
    result[..., i, j] = sigma_j of lam with entry i removed.  Uses the
    deflation s_j = e_j - lam_i * s_{j-1} of the full polynomial.
    """
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    e = sigma_batch(lam, min(kmax, n))
    s = np.zeros(lam.shape[:-1] + (n, kmax + 1))
    s[..., :, 0] = 1.0
    for j in range(1, kmax + 1):
        ej = e[..., j] if j <= n else 0.0
        s[..., :, j] = ej[..., None] - lam * s[..., :, j - 1]
    return s


def sigma(lam, k: int) -> float:
    """k-th elementary symmetric function of the entries of lam (sigma_0 = 1)."""
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    if not 0 <= k <= n:
        raise DomainError(f"k={k} out of range 0..{n}")
    return float(sigma_batch(lam, k)[..., k])


def sigma_minor(lam, k: int, i: int) -> float:
    """sigma_k of lam with entry i deleted."""
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    if not 0 <= k <= n - 1:
        raise DomainError(f"k={k} out of range 0..{n - 1}")
    if not -n <= i < n:
        raise DomainError(f"index i={i} invalid for n={n}")
    return float(minors_batch(lam, k)[..., i, k])


@dataclass
class SymDerivatives:
    """Value and first derivatives of sigma_k and of F = sigma_k**(1/k).

    grad[i] = sigma_{k-1}(lam | i) and power_grad[i] = dF/dlam_i.
    power_value / power_grad are NaN-free only when sigma_k > 0.
    """

    value: float
    grad: np.ndarray
    power_value: float
    power_grad: np.ndarray


def sym_derivatives(lam, k: int, power: bool = True) -> SymDerivatives:
    """Gradient of sigma_k and of F = sigma_k**(1/k) at lam.

    Raises ConeError when power quantities are requested but sigma_k <= 0.
    """
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    if not 1 <= k <= n:
        raise DomainError(f"k={k} out of range 1..{n}")
    mins = minors_batch(lam, k - 1)
    grad = mins[..., :, k - 1]
    value = sigma(lam, k)
    if power:
        if value <= 0.0:
            raise ConeError(f"sigma_{k} = {value:.6e} <= 0: F undefined")
        power_value = value ** (1.0 / k)
        power_grad = (1.0 / k) * value ** (1.0 / k - 1.0) * grad
    else:
        power_value = np.nan
        power_grad = np.full_like(grad, np.nan)
    return SymDerivatives(value=value, grad=grad,
                          power_value=power_value, power_grad=power_grad)


def gamma_cone_test(lam, k: int, strict: bool = True,
                    tol_cone: float = TOL_CONE) -> bool:
    """Membership of lam in the Garding cone Gamma_k.

    Strict: sigma_j > 0 for all 1 <= j <= k.  Closure: sigma_j >= -tol_cone.
    """
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    if not 1 <= k <= n:
        raise DomainError(f"k={k} out of range 1..{n}")
    e = sigma_batch(lam, k)
    if strict:
        return bool(np.all(e[..., 1:] > 0.0))
    return bool(np.all(e[..., 1:] >= -tol_cone))


def maclaurin_gap(lam, k: int, l: int) -> float:
    """Signed Maclaurin defect (sigma_k/C(n,k))**(1/k) - (sigma_l/C(n,l))**(1/l).

    Non-positive on Gamma_k for 1 <= l < k, zero iff lam = c(1,...,1).
    For l = 0 the second term is taken as 1 (sigma_0/C(n,0) = 1 raised to
    any power); the sign guarantee then only holds for normalized vectors.
    """
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    if not (0 <= l < k <= n):
        raise DomainError(f"need k > l >= 0, got k={k}, l={l}")
    if not gamma_cone_test(lam, k, strict=True):
        raise ConeError(f"lam not in Gamma_{k}")
    hi = (sigma(lam, k) / comb(n, k)) ** (1.0 / k)
    lo = 1.0 if l == 0 else (sigma(lam, l) / comb(n, l)) ** (1.0 / l)
    return hi - lo


def identity_suite(lam, k: int) -> dict:
    """Absolute residuals of the classical sigma_k identities at lam.

    Keys:
      euler      : sum_i lam_i sigma_{k-1}(lam|i) - k sigma_k
      count      : sum_i sigma_k(lam|i) - (n-k) sigma_k
      square     : sum_i sigma_{k-1}(lam|i) lam_i^2 - (sigma_k sigma_1 - (k+1) sigma_{k+1})
    """
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    if not 1 <= k <= n - 1:
        raise DomainError(f"k={k} out of range 1..{n - 1}")
    e = sigma_batch(lam, k + 1)
    mins = minors_batch(lam, k)
    g = mins[..., :, k - 1]
    euler = float(np.sum(lam * g, axis=-1) - k * e[..., k])
    count = float(np.sum(mins[..., :, k], axis=-1) - (n - k) * e[..., k])
    square = float(np.sum(g * lam ** 2, axis=-1)
                   - (e[..., k] * e[..., 1] - (k + 1) * e[..., k + 1]))
    return {"euler": euler, "count": count, "square": square}


def sigma2_second_derivatives(lam) -> np.ndarray:
    """Hessian d^2 sigma_2 / dlam_p dlam_r: ones off the diagonal, zeros on it.

    Only k = 2 is provided; the solver never needs second derivatives, this
    exists to pin down the sign conventions of the curvature Hessian formula
    against a finite-difference check.
    """
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    return np.ones((n, n)) - np.eye(n)
