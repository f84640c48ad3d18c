"""Finite-dimensional real Lie algebras given by structure constants.

Algebra elements (``xi``, ``omega``) and dual elements (``pi``) are plain 1-D
numpy arrays of coordinates in the algebra's fixed basis.  Structure
constants are held as ``c[i, j, k] = c^k_{ij}`` (0-based), so that

    [x, y]_k = sum_{ij} c^k_{ij} x_i y_j
    (ad*_omega pi)_j = sum_{ik} c^k_{ij} omega_i pi_k

Group elements are represented through their adjoint matrix ``Ad_g``; the
exponential ``Ad_{exp xi} = exp(ad_xi)`` is computed by scaling and squaring.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._backend import kernels
from .errors import (
    AntisymmetryViolation,
    DimensionMismatch,
    InvalidGroupElement,
    JacobiViolation,
    UnknownAlgebra,
)

JACOBI_TOL = 1e-12
ANTISYMMETRY_TOL = 1e-12
GROUP_TOL = 1e-10

BUILTIN_NAMES = ("so3", "se3", "sl2", "heisenberg3", "abelian(n)")


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """A validated Lie algebra. Construct through :func:`make_algebra`."""

    dim: int
    c: np.ndarray = field(repr=False)
    name: str = "custom"

    def ad(self, xi):
        """Matrix of ``ad_xi`` acting on algebra coordinates."""
        return kernels.ad_matrix(self.c, _vec(self, xi))

    def __repr__(self):
        return f"LieAlgebra(name={self.name!r}, dim={self.dim})"


def _vec(A, x, what="vector"):
    x = np.asarray(x, dtype=float)
    if x.shape != (A.dim,):
        raise DimensionMismatch(
            f"{what} of shape {x.shape} does not match algebra {A.name} of dim {A.dim}"
        )
    return x


def _jacobi_tensor(c):
    # J[i,j,k,l] = sum_m c^m_ij c^l_mk + c^m_jk c^l_mi + c^m_ki c^l_mj
    t = np.einsum("ijm,mkl->ijkl", c, c)
    return t + np.einsum("jkm,mil->ijkl", c, c) + np.einsum("kim,mjl->ijkl", c, c)


def make_algebra(dim, structure_constants, name="custom"):
    """Validate structure constants and wrap them as a :class:`LieAlgebra`.

    ``structure_constants[i, j, k]`` is ``c^k_{ij}`` with 0-based indices.
    Raises :class:`AntisymmetryViolation` or :class:`JacobiViolation`
    naming the worst offending (1-based) index and its residual.
    """
    if not isinstance(dim, (int, np.integer)) or dim < 1:
        raise DimensionMismatch(f"dim must be a positive integer, got {dim!r}")
    c = np.array(structure_constants, dtype=float)
    if c.shape != (dim, dim, dim):
        raise DimensionMismatch(f"structure constants shaped {c.shape}, expected {(dim,) * 3}")
    if not np.all(np.isfinite(c)):
        raise ValueError("structure constants must be finite")

    sym = np.abs(c + c.transpose(1, 0, 2))
    worst = np.unravel_index(np.argmax(sym), sym.shape)
    if sym[worst] > ANTISYMMETRY_TOL:
        i, j, k = (int(n) + 1 for n in worst)
        raise AntisymmetryViolation(
            f"c^{k}_({i},{j}) + c^{k}_({j},{i}) = {sym[worst]:.3e} is not zero",
            index=(i, j, k),
            residual=float(sym[worst]),
        )

    jac = np.abs(_jacobi_tensor(c))
    worst = np.unravel_index(np.argmax(jac), jac.shape)
    if jac[worst] > JACOBI_TOL:
        idx = tuple(int(n) + 1 for n in worst)
        raise JacobiViolation(
            f"Jacobi identity fails at (i,j,k,l)={idx} with residual {jac[worst]:.3e}",
            index=idx,
            residual=float(jac[worst]),
        )

    c.setflags(write=False)
    return LieAlgebra(dim=int(dim), c=c, name=name)


def jacobi_residual(A):
    """Largest absolute Jacobi sum over all index quadruples (0 means valid)."""
    return float(np.max(np.abs(_jacobi_tensor(A.c))))


def _levi_civita():
    eps = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[i, j, k] = 1.0
        eps[j, i, k] = -1.0
    return eps


def _builtin_constants(name):
    if name == "so3":
        return 3, _levi_civita()
    if name == "se3":
        # e1..e3 rotations, e4..e6 translations
        eps = _levi_civita()
        c = np.zeros((6, 6, 6))
        c[:3, :3, :3] = eps
        c[:3, 3:, 3:] = eps
        c[3:, :3, 3:] = eps
        return 6, c
    if name == "sl2":
        # e1 = h, e2 = e, e3 = f: [h,e] = 2e, [h,f] = -2f, [e,f] = h
        c = np.zeros((3, 3, 3))
        c[0, 1, 1], c[1, 0, 1] = 2.0, -2.0
        c[0, 2, 2], c[2, 0, 2] = -2.0, 2.0
        c[1, 2, 0], c[2, 1, 0] = 1.0, -1.0
        return 3, c
    if name == "heisenberg3":
        c = np.zeros((3, 3, 3))
        c[0, 1, 2], c[1, 0, 2] = 1.0, -1.0
        return 3, c
    m = re.fullmatch(r"abelian\((\d+)\)", name)
    if m and int(m.group(1)) >= 1:
        n = int(m.group(1))
        return n, np.zeros((n, n, n))
    raise UnknownAlgebra(f"unknown algebra {name!r}; builtins are {', '.join(BUILTIN_NAMES)}")


def builtin_algebra(name):
    """Return one of ``so3``, ``se3``, ``sl2``, ``heisenberg3``, ``abelian(n)``."""
    name = name.strip().replace(" ", "")
    dim, c = _builtin_constants(name)
    return make_algebra(dim, c, name=name)


def algebra_from_dict(data):
    """Build an algebra from the sparse JSON form ``{"dim", "c", "name"}``.

    Entries of ``c`` are ``[i, j, k, value]`` with 1-based indices meaning
    ``c^k_{ij} = value``.  The antisymmetric partner is filled in
    automatically; supplying both with inconsistent values is an error.
    """
    try:
        dim = int(data["dim"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError("algebra definition needs an integer 'dim'") from exc
    if dim < 1:
        raise DimensionMismatch(f"dim must be positive, got {dim}")
    c = np.zeros((dim, dim, dim))
    given = {}
    for entry in data.get("c", []):
        if len(entry) != 4:
            raise ValueError(f"structure-constant entry {entry!r} is not [i, j, k, value]")
        i, j, k = (int(n) for n in entry[:3])
        v = float(entry[3])
        if not all(1 <= n <= dim for n in (i, j, k)):
            raise DimensionMismatch(f"index {(i, j, k)} out of range 1..{dim}")
        i, j, k = i - 1, j - 1, k - 1
        if (i, j, k) in given and given[(i, j, k)] != v:
            raise AntisymmetryViolation(
                f"c^{k + 1}_({i + 1},{j + 1}) given twice with different values",
                index=(i + 1, j + 1, k + 1),
            )
        partner = given.get((j, i, k))
        if partner is not None and abs(partner + v) > ANTISYMMETRY_TOL:
            raise AntisymmetryViolation(
                f"c^{k + 1}_({i + 1},{j + 1}) = {v} conflicts with "
                f"c^{k + 1}_({j + 1},{i + 1}) = {partner}",
                index=(i + 1, j + 1, k + 1),
                residual=abs(partner + v),
            )
        if i == j and v != 0.0:
            raise AntisymmetryViolation(
                f"diagonal constant c^{k + 1}_({i + 1},{i + 1}) must vanish",
                index=(i + 1, j + 1, k + 1),
                residual=abs(v),
            )
        given[(i, j, k)] = v
        c[i, j, k] = v
        c[j, i, k] = -v
    return make_algebra(dim, c, name=str(data.get("name", "custom")))


def algebra_to_dict(A):
    """Sparse JSON form of ``A`` listing each independent constant once (i < j)."""
    entries = []
    for i in range(A.dim):
        for j in range(i + 1, A.dim):
            for k in range(A.dim):
                v = float(A.c[i, j, k])
                if v != 0.0:
                    entries.append([i + 1, j + 1, k + 1, v])
    return {"dim": A.dim, "c": entries, "name": A.name}


def load_algebra(source):
    """Resolve a builtin name, a JSON file path or an inline dict to an algebra."""
    if isinstance(source, LieAlgebra):
        return source
    if isinstance(source, dict):
        return algebra_from_dict(source)
    source = str(source)
    path = Path(source)
    if source.endswith(".json") or path.is_file():
        with open(path) as fh:
            return algebra_from_dict(json.load(fh))
    return builtin_algebra(source)


def bracket(A, x, y):
    return kernels.bracket(A.c, _vec(A, x), _vec(A, y))


def ad_star(A, omega, pi):
    """Coadjoint infinitesimal action: ``<ad*_omega pi, eta> = <pi, [omega, eta]>``."""
    return kernels.ad_star(A.c, _vec(A, omega), _vec(A, pi, "covector"))


def pair(pi, xi):
    pi = np.asarray(pi, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if pi.shape != xi.shape or pi.ndim != 1:
        raise DimensionMismatch(f"cannot pair shapes {pi.shape} and {xi.shape}")
    return float(pi @ xi)


def expm(a):
    """Matrix exponential (scaling and squaring, Taylor truncation at 1e-16)."""
    return kernels.expm(np.asarray(a, dtype=float))


def group_adjoint(A, xi):
    """``Ad_{exp xi} = exp(ad_xi)`` as a ``dim x dim`` matrix."""
    return expm(A.ad(xi))


@dataclass(frozen=True, eq=False)
class GroupElement:
    """A group element carried by its adjoint matrix.

    ``xi`` is kept when the element was built from exponential coordinates.
    Use :meth:`exp`, :meth:`from_adjoint` or :meth:`identity` to construct.
    """

    ad: np.ndarray
    ad_inv: np.ndarray
    xi: np.ndarray | None = None

    @classmethod
    def identity(cls, dim):
        return cls(ad=np.eye(dim), ad_inv=np.eye(dim), xi=np.zeros(dim))

    @classmethod
    def exp(cls, A, xi):
        xi = _vec(A, xi)
        if not np.all(np.isfinite(xi)):
            raise InvalidGroupElement("exponential coordinates must be finite")
        adx = A.ad(xi)
        return cls(ad=expm(adx), ad_inv=expm(-adx), xi=xi.copy())

    @classmethod
    def from_adjoint(cls, A, matrix, tol=GROUP_TOL):
        """Wrap an explicit adjoint matrix after checking it is one.

        The matrix must be invertible with ``Ad Ad^{-1} = I`` and must be a
        bracket automorphism, ``Ad[e_i, e_j] = [Ad e_i, Ad e_j]``, both to ``tol``.
        """
        m = np.array(matrix, dtype=float)
        if m.shape != (A.dim, A.dim):
            raise InvalidGroupElement(f"adjoint matrix shaped {m.shape}, expected {(A.dim, A.dim)}")
        if not np.all(np.isfinite(m)):
            raise InvalidGroupElement("adjoint matrix has non-finite entries")
        try:
            inv = np.linalg.inv(m)
        except np.linalg.LinAlgError as exc:
            raise InvalidGroupElement("adjoint matrix is singular") from exc
        if np.max(np.abs(m @ inv - np.eye(A.dim))) > tol:
            raise InvalidGroupElement("adjoint matrix is numerically singular")
        lhs = np.einsum("kl,ijl->ijk", m, A.c)
        rhs = np.einsum("ai,bj,abk->ijk", m, m, A.c)
        scale = max(1.0, float(np.max(np.abs(m))) ** 2)
        err = float(np.max(np.abs(lhs - rhs))) if A.dim else 0.0
        if err > tol * scale:
            raise InvalidGroupElement(
                f"matrix is not a Lie-algebra automorphism (residual {err:.3e})"
            )
        m.setflags(write=False)
        inv.setflags(write=False)
        return cls(ad=m, ad_inv=inv)

    @property
    def dim(self):
        return self.ad.shape[0]

    def compose(self, other):
        """Group product ``self * other``."""
        return GroupElement(ad=self.ad @ other.ad, ad_inv=other.ad_inv @ self.ad_inv)

    def inverse(self):
        xi = None if self.xi is None else -self.xi
        return GroupElement(ad=self.ad_inv, ad_inv=self.ad, xi=xi)


def _as_group(A, g):
    if isinstance(g, GroupElement):
        if g.dim != A.dim:
            raise InvalidGroupElement(f"group element of dim {g.dim} used with algebra dim {A.dim}")
        return g
    try:
        arr = np.asarray(g, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidGroupElement(f"cannot interpret {g!r} as a group element") from exc
    if arr.shape == (A.dim,):
        return GroupElement.exp(A, arr)
    if arr.shape == (A.dim, A.dim):
        return GroupElement.from_adjoint(A, arr)
    raise InvalidGroupElement(f"cannot interpret array of shape {arr.shape} as a group element")


def coadjoint_action(A, g, pi):
    """``Ad*_{g^{-1}} pi``, i.e. ``<Ad*_{g^{-1}} pi, xi> = <pi, Ad_{g^{-1}} xi>``.

    ``g`` may be a :class:`GroupElement`, exponential coordinates, or an
    adjoint matrix.
    """
    g = _as_group(A, g)
    pi = _vec(A, pi, "covector")
    return g.ad_inv.T @ pi
