"""Internal integration engine for the reset-model master equations.

The state is stored in "slab" layout: rho[a*M + b, l, m] = <a,l|rho|b,m>,
i.e. one (L, L) ladder slab per ordered machine-level pair (a, b).  In this
layout every generator term is either elementwise, a ladder shift by one
site (the degenerate-pair coupling), or a small machine-pair linear map (the
reset channels), so one fused pass evaluates the whole right-hand side.

The generator is linear and time-independent, so the classic RK4 step equals
its own Taylor polynomial, rho <- (1 + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24) rho,
evaluated in Horner form: four sweeps of  w = rho + c * L[src]  with
c = h/4, h/3, h/2, h.  (Equality with the textbook k1..k4 form is exact in
exact arithmetic and is asserted by the test suite numerically.)

Machine-pair slabs that start exactly zero and are unreachable from nonzero
slabs through the generator's read dependencies stay exactly zero, so the
kernels skip them.  The reachability closure is computed from the same
coefficient tables the kernels read -- a dataflow argument, not a physics
assumption -- and falls back to "all slabs" for dense initial states.

A numba-jitted kernel is used when numba imports (and the environment
variable TINYHEAT_FORCE_NUMPY is unset); a pure-numpy sweep with identical
semantics is the fallback and the reference for equivalence tests.
"""

from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised indirectly via HAVE_NUMBA branches
    if os.environ.get("TINYHEAT_FORCE_NUMPY"):
        raise ImportError("numba disabled by TINYHEAT_FORCE_NUMPY")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    njit = None
    HAVE_NUMBA = False


class KernelTables:
    """Precomputed coefficient tables for one model's generator."""

    def __init__(self, model):
        M = model.machine_dim
        L = model.ladder_size
        self.M = M
        self.L = L
        self.MM = M * M
        self.eml = np.ascontiguousarray(model.site_energies())
        self.total_rate = float(sum(ch.rate for ch in model.resets))
        self.ig = 1j * model.g
        self.mA, self.mB = model.pair
        # combined reset map on machine pairs, minus nothing: the -p*rho decay
        # lives in the elementwise diagonal factor alongside -i(e_a - e_b)
        T = np.zeros((M, M, M, M))
        for ch in model.resets:
            T += ch.rate * ch.machine_tensor(M)
        self.Tmat = np.ascontiguousarray(T.reshape(self.MM, self.MM))
        ptr = np.zeros(self.MM + 1, dtype=np.int64)
        src, val = [], []
        for row in range(self.MM):
            for col in range(self.MM):
                if self.Tmat[row, col] != 0.0:
                    src.append(col)
                    val.append(self.Tmat[row, col])
            ptr[row + 1] = len(src)
        self.ptr = ptr
        self.csrc = np.array(src, dtype=np.int64)
        self.cval = np.array(val, dtype=np.float64)

    def slab_deps(self):
        """deps[dest] = set of slab indices the kernel reads to update dest."""
        M, mA, mB = self.M, self.mA, self.mB
        deps = [set() for _ in range(self.MM)]
        for ab in range(self.MM):
            a, b = divmod(ab, M)
            deps[ab].add(ab)
            for k in range(self.ptr[ab], self.ptr[ab + 1]):
                deps[ab].add(int(self.csrc[k]))
            if self.ig != 0:
                if a == mA:
                    deps[ab].add(mB * M + b)
                if a == mB:
                    deps[ab].add(mA * M + b)
                if b == mA:
                    deps[ab].add(a * M + mB)
                if b == mB:
                    deps[ab].add(a * M + mA)
        return deps

    def closure(self, nonzero_slabs):
        """Boolean mask of slabs reachable from ``nonzero_slabs``."""
        deps = self.slab_deps()
        active = set(int(s) for s in nonzero_slabs)
        changed = True
        while changed:
            changed = False
            for ab in range(self.MM):
                if ab not in active and deps[ab] & active:
                    active.add(ab)
                    changed = True
        mask = np.zeros(self.MM, dtype=np.bool_)
        for ab in active:
            mask[ab] = True
        return mask


def to_slabs(rho, M, L):
    """Square (dim, dim) density matrix -> contiguous (M*M, L, L) slabs."""
    r4 = np.asarray(rho, dtype=np.complex128).reshape(M, L, M, L)
    return np.ascontiguousarray(r4.transpose(0, 2, 1, 3)).reshape(M * M, L, L)


def from_slabs(slabs, M, L):
    """Contiguous (M*M, L, L) slabs -> square (dim, dim) density matrix."""
    r4 = slabs.reshape(M, M, L, L).transpose(0, 2, 1, 3)
    return np.ascontiguousarray(r4).reshape(M * L, M * L)


def stage_numpy(src, base, out, tables, c, active):
    """out = base + c * L[src], vectorized numpy reference implementation."""
    M, L, MM = tables.M, tables.L, tables.MM
    eml = tables.eml
    ig = tables.ig
    mA, mB = tables.mA, tables.mB
    r4 = src.reshape(M, M, L, L)
    dfac = (-1j) * (eml[:, None, :, None] - eml[None, :, None, :]) - tables.total_rate
    deriv = dfac * r4
    deriv += (tables.Tmat @ src.reshape(MM, L * L)).reshape(M, M, L, L)
    if ig != 0:
        deriv[mA, :, : L - 1, :] -= ig * r4[mB, :, 1:, :]
        deriv[mB, :, 1:, :] -= ig * r4[mA, :, : L - 1, :]
        deriv[:, mA, :, : L - 1] += ig * r4[:, mB, :, 1:]
        deriv[:, mB, :, 1:] += ig * r4[:, mA, :, : L - 1]
    deriv = deriv.reshape(MM, L, L)
    for ab in range(MM):
        if active[ab]:
            np.multiply(deriv[ab], c, out=out[ab])
            out[ab] += base[ab]
    return out


if HAVE_NUMBA:

    @njit(cache=True)
    def _stage_jit(src, base, out, eml, P, ig, mA, mB, M, ptr, csrc, cval, c, active):
        MM, L, _ = src.shape
        for ab in range(MM):
            if not active[ab]:
                continue
            a = ab // M
            b = ab % M
            rowA = a == mA
            rowB = a == mB
            colA = b == mA
            colB = b == mB
            iA = a * M + mB
            iB = a * M + mA
            jA = mB * M + b
            jB = mA * M + b
            for l in range(L):
                ea = eml[a, l]
                for m in range(L):
                    w = ea - eml[b, m]
                    z = src[ab, l, m]
                    v = complex(-P * z.real + w * z.imag, -P * z.imag - w * z.real)
                    for k in range(ptr[ab], ptr[ab + 1]):
                        v += cval[k] * src[csrc[k], l, m]
                    if rowA and l < L - 1:
                        v -= ig * src[jA, l + 1, m]
                    if rowB and l > 0:
                        v -= ig * src[jB, l - 1, m]
                    if colA and m < L - 1:
                        v += ig * src[iA, l, m + 1]
                    if colB and m > 0:
                        v += ig * src[iB, l, m - 1]
                    out[ab, l, m] = base[ab, l, m] + c * v


def stage(src, base, out, tables, c, active, force_numpy=False):
    """Dispatch one Horner sweep to the jitted kernel or the numpy fallback."""
    if HAVE_NUMBA and not force_numpy:
        _stage_jit(
            src, base, out,
            tables.eml, tables.total_rate, tables.ig,
            tables.mA, tables.mB, tables.M,
            tables.ptr, tables.csrc, tables.cval,
            c, active,
        )
        return out
    return stage_numpy(src, base, out, tables, c, active)


def rhs_slabs(src, tables, active=None, force_numpy=False):
    """L[src] in slab layout (base = 0, c = 1): the master-equation RHS."""
    if active is None:
        active = np.ones(tables.MM, dtype=np.bool_)
    base = np.zeros_like(src)
    out = np.zeros_like(src)
    return stage(src, base, out, tables, 1.0, active, force_numpy=force_numpy)


def run_steps(rho, wA, wB, tables, dt, nsteps, active, force_numpy=False):
    """Advance ``rho`` by ``nsteps`` RK4 steps in place (ping-pong buffers).

    Returns the (possibly swapped) (rho, wA, wB) buffer triple; the first
    entry always holds the current state.
    """
    c1, c2, c3, c4 = dt / 4.0, dt / 3.0, dt / 2.0, dt
    for _ in range(nsteps):
        stage(rho, rho, wA, tables, c1, active, force_numpy)
        stage(wA, rho, wB, tables, c2, active, force_numpy)
        stage(wB, rho, wA, tables, c3, active, force_numpy)
        stage(wA, rho, wB, tables, c4, active, force_numpy)
        rho, wB = wB, rho
    return rho, wA, wB
