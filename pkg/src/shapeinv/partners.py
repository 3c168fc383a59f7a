"""Partner potentials, shape invariance, and factorization residuals.

A superpotential W(x, m) generates the pair

    V(x, m)      = W^2 - W' + d
    Vtilde(x, m) = W^2 + W' + d

and a family is shape invariant when Vtilde(x, m) = V(x, m-1) + R(m-1) with
R independent of x. Closed-form coefficient records for both potentials are
available for every family, expressed in the family's (f, h) basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import FamilyError
from .families import Family, FamilyKind

__all__ = [
    "Superpotential", "PotentialPair", "potential_V", "potential_Vtilde",
    "pair_from_family", "shape_invariance_residual", "closed_form_potentials",
    "PotentialRecord", "classify_L_sequence", "LSequenceClass",
    "factorization_residuals",
]


class Superpotential:
    """W(x, m) together with its exact x derivative."""

    def __init__(self, evaluate: Callable, derivative_x: Callable):
        self._evaluate = evaluate
        self._derivative = derivative_x

    @classmethod
    def from_family(cls, family: Family) -> "Superpotential":
        return cls(family.k, family.k_prime)

    def evaluate(self, x, m):
        return self._evaluate(x, m)

    __call__ = evaluate

    def derivative_x(self, x, m):
        return self._derivative(x, m)


def potential_V(W: Superpotential, d: float = 0.0) -> Callable:
    """x, m -> W^2 - W' + d."""
    def V(x, m):
        w = W.evaluate(x, m)
        return w * w - W.derivative_x(x, m) + d
    return V


def potential_Vtilde(W: Superpotential, d: float = 0.0) -> Callable:
    """x, m -> W^2 + W' + d."""
    def Vt(x, m):
        w = W.evaluate(x, m)
        return w * w + W.derivative_x(x, m) + d
    return Vt


@dataclass(frozen=True)
class PotentialPair:
    """A superpotential with its two partner potentials and the energy offset d."""

    W: Superpotential
    d: float = 0.0

    def V(self, x, m):
        w = self.W.evaluate(x, m)
        return w * w - self.W.derivative_x(x, m) + self.d

    def Vtilde(self, x, m):
        w = self.W.evaluate(x, m)
        return w * w + self.W.derivative_x(x, m) + self.d


def pair_from_family(family: Family, d=None) -> PotentialPair:
    if d is None:
        d = family.params.d
    return PotentialPair(W=Superpotential.from_family(family), d=float(d))


def shape_invariance_residual(pp: PotentialPair, family: Family, m, x):
    """Vtilde(x, m) - V(x, m-1) - R(m-1); identically zero for a shape-invariant pair."""
    m = float(m)
    return pp.Vtilde(x, m) - pp.V(x, m - 1.0) - family.R(m - 1.0)


# ---------------------------------------------------------------------------
# closed-form potential records

_COEFF_KEYS = ("f2", "fh", "h2", "f", "const")


@dataclass(frozen=True)
class PotentialRecord:
    """Coefficients of V - d and Vtilde - d in the basis {f^2, f h, h^2, f, 1}.

    The bare-f entry is nonzero only for inverse-power families. basis says
    whether (f, h) are the generic finite-B blocks or the B = infinity limit
    forms.
    """

    basis: str
    V: dict
    Vtilde: dict
    R_at_m: float
    m: float
    family: Family

    def _eval(self, coeffs, x):
        bs = self.family.basis()
        f = np.asarray(bs.f(x), dtype=float)
        h = np.asarray(bs.h(x), dtype=float)
        out = (coeffs["f2"] * f * f + coeffs["fh"] * f * h
               + coeffs["h2"] * h * h + coeffs["f"] * f + coeffs["const"])
        return float(out) if out.ndim == 0 else out

    def V_minus_d(self, x):
        return self._eval(self.V, x)

    def Vtilde_minus_d(self, x):
        return self._eval(self.Vtilde, x)

    def to_json(self) -> dict:
        return {
            "basis": self.basis,
            "V": {k: self.V[k] for k in _COEFF_KEYS},
            "Vtilde": {k: self.Vtilde[k] for k in _COEFF_KEYS},
            "R_at_m": self.R_at_m,
        }


def _zeros():
    return {k: 0.0 for k in _COEFF_KEYS}


def closed_form_potentials(family: Family, m) -> PotentialRecord:
    """Exact expansion of the partner pair in the family's (f, h) basis."""
    m = float(m)
    p = family.params
    limit = p.B.is_infinite
    c = p.sign.c
    a = p.sign.a
    V, Vt = _zeros(), _zeros()
    if family.kind is FamilyKind.AFFINE:
        if p.sign.kind == "zero":
            Bc = 1.0 if limit else p.B.value
            V["h2"] = Vt["h2"] = p.b * p.b
            V["f2"] = (p.D + m * Bc) * (p.D + (m + 1.0) * Bc)
            Vt["f2"] = (p.D + m * Bc) * (p.D + (m - 1.0) * Bc)
            V["fh"] = 2.0 * p.b * (p.D + (m + 0.5) * Bc)
            Vt["fh"] = 2.0 * p.b * (p.D + (m - 0.5) * Bc)
            V["const"] = -p.b
            Vt["const"] = p.b
        else:
            beta = p.b + m * a
            if p.sign.kind == "pos":
                kappa = 1.0 if limit else p.B.value ** 2 - 1.0
            else:
                kappa = 1.0 if limit else p.B.value ** 2 + 1.0
            V["f2"] = Vt["f2"] = beta * beta / (c * c)
            V["fh"] = (p.D / c) * (2.0 * beta + a)
            Vt["fh"] = (p.D / c) * (2.0 * beta - a)
            V["h2"] = p.D * p.D - kappa * beta
            Vt["h2"] = p.D * p.D + kappa * beta
    else:
        if m == 0.0:
            raise FamilyError("inverse-power family is undefined at m = 0")
        q = p.q
        if p.sign.kind == "pos":
            kappa = 1.0 if limit else p.B.value ** 2 - 1.0
            V["const"] = Vt["const"] = q * q / (m * m) + m * m * c * c
            V["f"] = Vt["f"] = 2.0 * q * c
            V["h2"] = -m * (m + 1.0) * c * c * kappa
            Vt["h2"] = -m * (m - 1.0) * c * c * kappa
        elif p.sign.kind == "zero":
            Bc = 1.0 if limit else p.B.value
            V["const"] = Vt["const"] = q * q / (m * m)
            V["f"] = Vt["f"] = 2.0 * q * Bc
            V["f2"] = m * (m + 1.0) * Bc * Bc
            Vt["f2"] = m * (m - 1.0) * Bc * Bc
        else:
            kappa = 1.0 if limit else p.B.value ** 2 + 1.0
            V["const"] = Vt["const"] = q * q / (m * m) - m * m * c * c
            V["f"] = Vt["f"] = -2.0 * q * c
            V["h2"] = m * (m + 1.0) * c * c * kappa
            Vt["h2"] = m * (m - 1.0) * c * c * kappa
    return PotentialRecord(basis="limit" if limit else "generic",
                           V=V, Vtilde=Vt, R_at_m=family.R(m), m=m, family=family)


# ---------------------------------------------------------------------------
# spectral symbol classification and factorization residuals

@dataclass(frozen=True)
class LSequenceClass:
    """Monotonicity of L along the orbit m -> m - 1, plus the probed values."""

    kind: str  # 'decreasing' | 'increasing' | 'other'
    values: tuple


def classify_L_sequence(family: Family, m0, steps: int = 2) -> LSequenceClass:
    """Probe L(m0), L(m0 - 1), ..., L(m0 - steps) and classify the trend.

    Every probed parameter must be admissible; an orbit that hits a point
    where L is undefined (inverse-power families at m = 0) raises the
    family's own error. Fewer than two probed values classify as 'other'.
    """
    m0 = float(m0)
    values = tuple(family.L(m0 - j) for j in range(max(int(steps), 1) + 1))
    if len(values) < 2:
        return LSequenceClass("other", values)
    diffs = [values[i + 1] - values[i] for i in range(len(values) - 1)]
    if all(dv < 0 for dv in diffs):
        return LSequenceClass("decreasing", values)
    if all(dv > 0 for dv in diffs):
        return LSequenceClass("increasing", values)
    return LSequenceClass("other", values)


def factorization_residuals(family: Family, m, x, d=None):
    """Two residuals tying k, L, and the potentials together; both vanish.

    With r(x, m) = -(V(x, m) - d) - L(m):
      r1 = r(x, m) + r(x, m-1) + 2 k(x, m)^2 + 2 L(m)
      r2 = r(x, m) - r(x, m-1) - 2 k'(x, m)
    """
    m = float(m)
    if d is None:
        d = family.params.d
    pp = pair_from_family(family, d)
    r_m = -(pp.V(x, m) - d) - family.L(m)
    r_prev = -(pp.V(x, m - 1.0) - d) - family.L(m - 1.0)
    k_val = family.k(x, m)
    r1 = r_m + r_prev + 2.0 * k_val * k_val + 2.0 * family.L(m)
    r2 = r_m - r_prev - 2.0 * family.k_prime(x, m)
    return r1, r2
