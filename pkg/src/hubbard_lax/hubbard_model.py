"""Physical ladder space: site operators, the Hamiltonian, and the global
species swap.

Each site carries two qubits (sigma first, tau second), local basis ordered
(up-up, up-down, down-up, down-down); site j occupies tensor factor j, so the
full dimension is 4^n. Site operators are returned as scipy CSR matrices;
most consumers densify at small n.

Hamiltonian (n >= 2):

    H = sum_{j<n} [ 2(s+_j s-_{j+1} + s-_j s+_{j+1}) + (tau analog) ]
        + u sum_j sz_j tz_j + (mu_L/2)(sz_1 + tz_1) + (mu_R/2)(sz_n + tz_n)

equivalently a sum of bulk bond terms h_{j,j+1} (which carry u/2 per adjacent
site) plus left/right single-site pieces h_L, h_R that restore the full u on
the boundary sites and add the chemical potentials.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .linalg import PAULI, local4

SIGMA, TAU = 0, 1


@dataclass(frozen=True)
class HamiltonianSpec:
    n_sites: int
    u: float
    mu_L: float = 0.0
    mu_R: float = 0.0

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError("Hamiltonian needs n_sites >= 2")


def phys_dim(n: int) -> int:
    return 4**n


def site_operator(n: int, j: int, species: int, s: str) -> sp.csr_matrix:
    """Operator s (one of +,-,0,z) acting on the sigma (species=0) or tau
    (species=1) qubit of site j (1-based), identity elsewhere."""
    if not 1 <= j <= n:
        raise ValueError(f"site index {j} out of range 1..{n}")
    op = sp.csr_matrix(PAULI[s])
    eye2 = sp.identity(2, format="csr", dtype=complex)
    factors = []
    for i in range(1, n + 1):
        for q in (SIGMA, TAU):
            factors.append(op if (i == j and q == species) else eye2)
    out = factors[0]
    for f in factors[1:]:
        out = sp.kron(out, f, format="csr")
    return out


def hop_bond(species: int) -> np.ndarray:
    """Free hopping 2(x+_1 x-_2 + x-_1 x+_2) on two adjacent sites (16x16)."""
    if species == SIGMA:
        a, b = local4("+", "0"), local4("-", "0")
    else:
        a, b = local4("0", "+"), local4("0", "-")
    return 2.0 * (np.kron(a, b) + np.kron(b, a))


def h_bond(u: float) -> np.ndarray:
    """Bulk bond term on two adjacent sites: both hoppings plus
    (u/2)(sz tz (x) 1 + 1 (x) sz tz)."""
    zz = local4("z", "z")
    eye4 = np.eye(4)
    return (
        hop_bond(SIGMA)
        + hop_bond(TAU)
        + 0.5 * u * (np.kron(zz, eye4) + np.kron(eye4, zz))
    )


def h_left(u: float, mu_L: float) -> np.ndarray:
    """Left boundary single-site piece: (u/2) sz tz + (mu_L/2)(sz + tz)."""
    return 0.5 * u * local4("z", "z") + 0.5 * mu_L * (local4("z", "0") + local4("0", "z"))


def h_right(u: float, mu_R: float) -> np.ndarray:
    return 0.5 * u * local4("z", "z") + 0.5 * mu_R * (local4("z", "0") + local4("0", "z"))


def build_hamiltonian(spec: HamiltonianSpec, dense: bool = False):
    """Assemble H as a sparse CSR matrix (or dense on request)."""
    n, u = spec.n_sites, spec.u
    H = sp.csr_matrix((phys_dim(n), phys_dim(n)), dtype=complex)
    for j in range(1, n):
        for q in (SIGMA, TAU):
            H = H + 2.0 * (
                site_operator(n, j, q, "+") @ site_operator(n, j + 1, q, "-")
                + site_operator(n, j, q, "-") @ site_operator(n, j + 1, q, "+")
            )
    for j in range(1, n + 1):
        H = H + u * (site_operator(n, j, SIGMA, "z") @ site_operator(n, j, TAU, "z"))
    H = H + 0.5 * spec.mu_L * (
        site_operator(n, 1, SIGMA, "z") + site_operator(n, 1, TAU, "z")
    )
    H = H + 0.5 * spec.mu_R * (
        site_operator(n, n, SIGMA, "z") + site_operator(n, n, TAU, "z")
    )
    return H.toarray() if dense else H.tocsr()


def spin_flip_G(n: int) -> sp.csr_matrix:
    """Global species swap: exchanges the sigma and tau qubits at every site.
    G sigma^s G = tau^s, G^2 = identity."""
    # local 4x4 swap of the two qubits
    swap = np.zeros((4, 4))
    for a in range(2):
        for b in range(2):
            swap[2 * b + a, 2 * a + b] = 1.0
    out = sp.csr_matrix(swap)
    blk = sp.csr_matrix(swap)
    for _ in range(n - 1):
        out = sp.kron(out, blk, format="csr")
    return out


def total_magnetization(n: int, species: int) -> sp.csr_matrix:
    out = sp.csr_matrix((phys_dim(n), phys_dim(n)), dtype=complex)
    for j in range(1, n + 1):
        out = out + site_operator(n, j, species, "z")
    return out.tocsr()
