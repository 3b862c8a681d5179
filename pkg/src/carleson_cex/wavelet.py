"""Band-limited Meyer-type profile.

The profile is the even, real, nonnegative function

    psi_hat(xi) = omega(|xi|),

    omega(t) = sin(pi/2 * nu(3 t - 1))        for 1/3 <= t <= 2/3
             = cos(pi/2 * nu(3 t / 2 - 1))    for 2/3 <  t <  4/3
             = 0                              otherwise,

where ``nu`` is a ramp on ``[0, 1]`` with ``nu(x) + nu(1 - x) = 1``.  Two ramps
are provided: a degree-7 polynomial (C^3 at the end points, exact closed-form
values) and a C-infinity ramp built from ``exp(-1/x)``.

Values outside the open support are returned as exact zeros so that sparsity
of derived spectra is exact.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "Ramp",
    "WaveletProfile",
    "eval_nu",
    "eval_psi_hat",
    "DEFAULT_PROFILE",
    "SMOOTH_PROFILE",
    "SUPPORT_LO",
    "SUPPORT_HI",
]

SUPPORT_LO = 1.0 / 3.0
SUPPORT_HI = 4.0 / 3.0


class Ramp(str, enum.Enum):
    """Ramp kinds understood by :func:`eval_nu`."""

    POLYNOMIAL_C3 = "polynomial-C3"
    SMOOTH_CINF = "smooth-Cinf"

    @classmethod
    def parse(cls, value: "str | Ramp") -> "Ramp":
        if isinstance(value, Ramp):
            return value
        for member in cls:
            if member.value == value or member.name.lower() == str(value).lower():
                return member
        raise DomainError(f"unknown ramp kind {value!r}; expected one of "
                          f"{[m.value for m in cls]}")


@dataclass(frozen=True)
class WaveletProfile:
    """Profile ``psi_hat`` parametrised by its ramp.

    The object is a small immutable value; it is hashable and can be shared
    freely between threads.
    """

    ramp: Ramp = Ramp.POLYNOMIAL_C3

    def __post_init__(self):
        object.__setattr__(self, "ramp", Ramp.parse(self.ramp))

    def nu(self, x):
        return eval_nu(self.ramp, x)

    def __call__(self, xi):
        return eval_psi_hat(self, xi)


DEFAULT_PROFILE = WaveletProfile(Ramp.POLYNOMIAL_C3)
SMOOTH_PROFILE = WaveletProfile(Ramp.SMOOTH_CINF)


def _nu_poly_low(x):
    return x**4 * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x)))


def _nu_poly(x):
    # the polynomial cancels near x = 1; use nu(x) = 1 - nu(1 - x) there,
    # where 1 - x is exact for x >= 1/2
    return np.where(x <= 0.5, _nu_poly_low(x), 1.0 - _nu_poly_low(1.0 - x))


def _nu_smooth(x):
    # sigma(x) = exp(-1/x) for x > 0 and 0 at x = 0
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        s0 = np.where(x > 0.0, np.exp(-1.0 / np.where(x > 0.0, x, 1.0)), 0.0)
        y = 1.0 - x
        s1 = np.where(y > 0.0, np.exp(-1.0 / np.where(y > 0.0, y, 1.0)), 0.0)
        return s0 / (s0 + s1)


def _nu_array(ramp: Ramp, x: np.ndarray) -> np.ndarray:
    if ramp is Ramp.POLYNOMIAL_C3:
        out = _nu_poly(x)
    else:
        out = _nu_smooth(x)
    # end points are pinned exactly
    out = np.where(x <= 0.0, 0.0, np.where(x >= 1.0, 1.0, out))
    return out


def eval_nu(ramp: "Ramp | str", x):
    """Evaluate the ramp.

    Parameters
    ----------
    ramp : Ramp or str
        Ramp kind.
    x : float or array_like
        Points in ``[0, 1]``.

    Returns
    -------
    float or ndarray
        ``nu(x)``; exactly 0 at ``x = 0`` and exactly 1 at ``x = 1``.

    Raises
    ------
    DomainError
        If any point lies outside ``[0, 1]`` (or is not finite).
    """
    ramp = Ramp.parse(ramp)
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("eval_nu expects x in [0, 1]")
    out = _nu_array(ramp, arr)
    if np.ndim(x) == 0:
        return float(out)
    return out


def eval_psi_hat(profile: WaveletProfile, xi):
    """Evaluate ``psi_hat(xi)`` for any real ``xi``.

    Parameters
    ----------
    profile : WaveletProfile
    xi : float or array_like

    Returns
    -------
    float or ndarray
        Values in ``[0, 1]``, exactly zero for ``|xi|`` outside ``(1/3, 4/3)``.
    """
    t = np.abs(np.asarray(xi, dtype=float))
    ramp = profile.ramp
    rising = (t > SUPPORT_LO) & (t <= 2.0 / 3.0)
    falling = (t > 2.0 / 3.0) & (t < SUPPORT_HI)
    out = np.zeros_like(t)
    if np.any(rising):
        arg = np.clip(3.0 * t[rising] - 1.0, 0.0, 1.0)
        out[rising] = np.sin(0.5 * np.pi * _nu_array(ramp, arg))
    if np.any(falling):
        # cos(pi/2 nu(b)) rewritten as sin(pi/2 nu(1 - b)) so that the value
        # decays to an exact zero at the outer edge instead of cos(pi/2) dust
        arg = np.clip(2.0 - 1.5 * t[falling], 0.0, 1.0)
        out[falling] = np.sin(0.5 * np.pi * _nu_array(ramp, arg))
    if np.ndim(xi) == 0:
        return float(out)
    return out
