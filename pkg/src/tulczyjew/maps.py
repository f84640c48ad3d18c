"""Trivialized Tulczyjew-triple maps and momentum maps.

Vector-space case (``Q = R^n``): points of ``TT*Q``, ``T*TQ`` and ``T*T*Q``
are four n-tuples in a :class:`VSPoint4` whose ``space`` tag fixes the slot
meaning:

    TTcoT   (q, p, qdot, pdot)
    coTT    (q, v, a, b)       a covector a dq + b dv at (q, v)
    coTcoT  (q, p, r, s)       a covector r dq + s dp at (q, p)

Lie-group case: ``TT*G`` and ``T*T*G`` are left-trivialized as
``((g, pi), (omega, pidot))`` and ``((g, pi), (pitilde, omega))``; the
quotients by ``G`` at momentum zero are both identified with ``g* x g``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, WrongSpaceTag
from .lie import GroupElement, _as_group, _vec, ad_star, coadjoint_action

TTCOT = "TTcoT"
COTT = "coTT"
COTCOT = "coTcoT"
SPACES = (TTCOT, COTT, COTCOT)


@dataclass(frozen=True, eq=False)
class VSPoint4:
    q: np.ndarray
    p: np.ndarray
    qdot: np.ndarray
    pdot: np.ndarray
    space: str

    def __post_init__(self):
        if self.space not in SPACES:
            raise WrongSpaceTag(f"unknown space tag {self.space!r}")
        slots = [np.atleast_1d(np.asarray(s, dtype=float)) for s in self.slots]
        n = slots[0].shape
        if any(s.shape != n or s.ndim != 1 for s in slots):
            raise DimensionMismatch(f"slot shapes differ: {[s.shape for s in slots]}")
        for name, s in zip(("q", "p", "qdot", "pdot"), slots):
            object.__setattr__(self, name, s)

    @property
    def slots(self):
        return (self.q, self.p, self.qdot, self.pdot)

    @property
    def n(self):
        return self.q.shape[0]

    def as_array(self):
        return np.stack(self.slots)

    def equals(self, other):
        return self.space == other.space and np.array_equal(self.as_array(), other.as_array())


def _expect(pt, space):
    if pt.space != space:
        raise WrongSpaceTag(f"expected a point of {space}, got {pt.space}")


def vs_tulczyjew_A(pt):
    """``A_Q: TT*Q -> T*TQ``, ``(q, p, qdot, pdot) -> (q, qdot, pdot, p)``."""
    _expect(pt, TTCOT)
    return VSPoint4(pt.q, pt.qdot, pt.pdot, pt.p, COTT)


def vs_tulczyjew_A_inv(pt):
    _expect(pt, COTT)
    q, v, a, b = pt.slots
    return VSPoint4(q, b, v, a, TTCOT)


def vs_flat(pt):
    """``b_omega: TT*Q -> T*T*Q``, ``(q, p, qdot, pdot) -> (q, p, -pdot, qdot)``."""
    _expect(pt, TTCOT)
    return VSPoint4(pt.q, pt.p, -pt.pdot, pt.qdot, COTCOT)


def vs_flat_inv(pt):
    _expect(pt, COTCOT)
    q, p, r, s = pt.slots
    return VSPoint4(q, p, s, -r, TTCOT)


def vs_R(pt):
    """``R: T*TQ -> T*T*Q``, ``(q, v, a, b) -> (q, b, -a, v)``; equals ``flat o A^{-1}``."""
    _expect(pt, COTT)
    q, v, a, b = pt.slots
    return VSPoint4(q, b, -a, v, COTCOT)


def vs_R_inv(pt):
    _expect(pt, COTCOT)
    q, p, r, s = pt.slots
    return VSPoint4(q, s, -r, p, COTT)


def r_pairing_residual(alpha, W, Wbar):
    """Residual of the pairing identity that defines ``R``.

    ``alpha = (q, v, a, b)`` in ``T*TQ``; ``W = (q, b, dq, dp)`` a tangent
    vector to ``T*Q`` at ``v*(alpha) = (q, b)``; ``Wbar = (q, v, dq, dv)`` a
    tangent vector to ``TQ`` at ``(q, v)`` with the same base velocity ``dq``.
    Returns ``<R alpha, W> + <alpha, Wbar> - <W, Wbar>^T``.
    """
    _expect(alpha, COTT)
    q, v, a, b = alpha.slots
    Wq, Wp, Wdq, Wdp = (np.asarray(s, dtype=float) for s in W)
    Bq, Bv, Bdq, Bdv = (np.asarray(s, dtype=float) for s in Wbar)
    if not (np.array_equal(Wq, q) and np.array_equal(Wp, b)):
        raise ValueError("W must be based at v*(alpha) = (q, b)")
    if not (np.array_equal(Bq, q) and np.array_equal(Bv, v)):
        raise ValueError("Wbar must be based at (q, v)")
    if not np.array_equal(Wdq, Bdq):
        raise ValueError("W and Wbar must project to the same vector on Q")
    r = vs_R(alpha)
    lhs = r.qdot @ Wdq + r.pdot @ Wdp
    pairing = a @ Bdq + b @ Bdv
    tangent_pairing = Wdp @ v + b @ Bdv
    return float(lhs - (-pairing + tangent_pairing))


# ---------------------------------------------------------------- group case


@dataclass(frozen=True, eq=False)
class GrpTTstar:
    """Left-trivialized point ``((g, pi), (omega, pidot))`` of ``TT*G``."""

    g: GroupElement
    pi: np.ndarray
    omega: np.ndarray
    pidot: np.ndarray

    def __post_init__(self):
        _check_dims(self.g, self.pi, self.omega, self.pidot)


@dataclass(frozen=True, eq=False)
class GrpTstarTstar:
    """Left-trivialized point ``((g, pi), (pitilde, omega))`` of ``T*T*G``."""

    g: GroupElement
    pi: np.ndarray
    pitilde: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        _check_dims(self.g, self.pi, self.pitilde, self.omega)


def _check_dims(g, *vectors):
    dims = {np.shape(v) for v in vectors}
    if len(dims) != 1 or (g.dim,) not in dims:
        raise DimensionMismatch(f"inconsistent dims: group {g.dim}, vectors {sorted(dims)}")


@dataclass(frozen=True, eq=False)
class ReducedPoint:
    """A point ``(pi, omega)`` of ``g* x g``."""

    pi: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=float)
        omega = np.asarray(self.omega, dtype=float)
        if pi.shape != omega.shape or pi.ndim != 1:
            raise DimensionMismatch(f"pi {pi.shape} and omega {omega.shape} disagree")
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "omega", omega)


@dataclass(frozen=True, eq=False)
class ProductState:
    """A point ``(pi, x, p)`` of ``g* x T*R^n``."""

    pi: np.ndarray
    x: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if x.shape != p.shape:
            raise DimensionMismatch(f"x {x.shape} and p {p.shape} disagree")
        object.__setattr__(self, "pi", np.asarray(self.pi, dtype=float))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "p", p)

    def as_array(self):
        return np.concatenate([self.pi, self.x, self.p])


def grp_point(A, g, pi, omega, pidot):
    """Convenience constructor that resolves ``g`` and checks dims."""
    return GrpTTstar(
        _as_group(A, g), _vec(A, pi, "covector"), _vec(A, omega), _vec(A, pidot, "covector")
    )


def grp_flat(A, pt):
    """``b_{omega_G}((g, pi), (omega, pidot)) = ((g, pi), (-pidot + ad*_omega pi, omega))``."""
    pitilde = -pt.pidot + ad_star(A, pt.omega, pt.pi)
    return GrpTstarTstar(pt.g, pt.pi, pitilde, pt.omega)


def grp_flat_inv(A, pt):
    pidot = ad_star(A, pt.omega, pt.pi) - pt.pitilde
    return GrpTTstar(pt.g, pt.pi, pt.omega, pidot)


def left_translate(g0, pt):
    """Trivialized left action of ``g0`` on either group-point type."""
    if isinstance(pt, GrpTTstar):
        return GrpTTstar(g0.compose(pt.g), pt.pi, pt.omega, pt.pidot)
    if isinstance(pt, GrpTstarTstar):
        return GrpTstarTstar(g0.compose(pt.g), pt.pi, pt.pitilde, pt.omega)
    raise TypeError(f"cannot left-translate {type(pt).__name__}")


def momentum_TstarG(A, g, pi):
    """Spatial momentum ``J(g, pi) = Ad*_{g^{-1}} pi``."""
    return coadjoint_action(A, g, pi)


def momentum_TTstarG(A, pt):
    """``J((g, pi), (omega, pidot)) = Ad*_{g^{-1}}(pidot - ad*_omega pi)``."""
    return coadjoint_action(A, pt.g, pt.pidot - ad_star(A, pt.omega, pt.pi))


def momentum_TstarTstarG(A, pt):
    """``J((g, pi), (pitilde, omega)) = Ad*_{g^{-1}} pitilde``."""
    return coadjoint_action(A, pt.g, pt.pitilde)


def reduced_flat0(rp):
    """The reduced flat map; the identity on ``g* x g`` in this trivialization."""
    return ReducedPoint(rp.pi, rp.omega)


def reduced_flat0_inv(rp):
    return ReducedPoint(rp.pi, rp.omega)


def psi0(rp):
    """Identification of the zero-level quotient with ``T*(T*G/G)``; the identity here."""
    return ReducedPoint(rp.pi, rp.omega)


def psi0_inv(rp):
    return ReducedPoint(rp.pi, rp.omega)


def xi(A, rp):
    """``Xi(pi, omega) = (pi, ad*_omega pi)``, landing in ``T(T*G/G) = g* x g*``."""
    return rp.pi, ad_star(A, rp.omega, rp.pi)


def sharp(A, pi, dphi):
    """Poisson sharp map of ``g*`` applied to a differential ``dphi`` at ``pi``.

    Built as ``Xi o [b_0]^{-1} o Psi_0^{-1}`` so the reduced triple commutes
    by construction.
    """
    return xi(A, reduced_flat0_inv(psi0_inv(ReducedPoint(pi, dphi))))


def xi_product(A, rp, X):
    """``Xi((pi, omega), X) = ((pi, ad*_omega pi), X)`` with ``X`` passed through."""
    return xi(A, rp), X
