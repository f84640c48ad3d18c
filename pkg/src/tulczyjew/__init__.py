"""Reduced Tulczyjew triple: trivialized symplectic maps, momentum maps and
Lie-Poisson / Euler-Poincare / Hamilton-Poincare dynamics on Lie algebras."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .dynamics import (
    IntegratorConfig,
    Trajectory,
    equivalence_run,
    euler_poincare_rhs,
    hp_product_rhs,
    integrate,
    lie_poisson_rhs,
    reconstruct,
    simulate_euler_poincare,
    simulate_lie_poisson,
    simulate_product,
)
from .lie import (
    GroupElement,
    LieAlgebra,
    ad_star,
    bracket,
    builtin_algebra,
    coadjoint_action,
    group_adjoint,
    jacobi_residual,
    make_algebra,
    pair,
)
from .models import (
    CustomHamiltonian,
    CustomLagrangian,
    QuadraticHamiltonian,
    QuadraticLagrangian,
    QuadraticProductHamiltonian,
    hamiltonian_from_lagrangian,
    legendre,
)
