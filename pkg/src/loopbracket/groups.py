"""Matrix groups and the trace-form calculus used everywhere else.

Seven classical kinds over R and C share one interface: a GroupSpec names
the kind and signature, and this module hands out real bases of the Lie
algebra, random samples, membership residuals, and the variation F of the
invariant function f(g) = Re tr(g).

Conventions.  The pairing is <x, y> = Re tr(xy): R-bilinear, symmetric,
and nondegenerate (indefinite in general) on each algebra below.  The
variation F(g) is the pairing-dual of the right differential of f,

    d/dt f(g exp(t x)) |_{t=0} = <F(g), x>   for every algebra element x,

which comes out as F(g) = g for the two GL kinds and F(g) = (g - g^-1)/2
for the kinds cut out by a form.  Decorated versions Fhat/fhat insert a
word of algebra elements after g and satisfy the chain rule

    <Fhat(g; x_1..x_k), y> = fhat(g; x_1..x_k, y) = Re tr(g x_1 .. x_k y).

All matrices are complex128 internally; the real kinds keep zero imaginary
part and their membership residuals include a reality term.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

KINDS = ("GL_R", "GL_C", "O_pq", "O_C", "U_pq", "Sp_R", "Sp_pq")

_REAL_KINDS = {"GL_R", "O_pq", "Sp_R"}
_GL_KINDS = {"GL_R", "GL_C"}
_SIGNED_KINDS = {"O_pq", "U_pq", "Sp_pq"}


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class GroupSpec:
    """One of the seven supported matrix groups.

    n is the defining dimension.  It equals the matrix size except for
    Sp_pq, which is realized by 2n x 2n complex matrices with n = p + q.
    """

    kind: str
    n: int
    p: int = 0
    q: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise GroupError(f"unknown group kind {self.kind!r}")
        if self.n < 1:
            raise GroupError("n must be positive")
        if self.kind in _SIGNED_KINDS:
            if self.p < 0 or self.q < 0 or self.p + self.q != self.n:
                raise GroupError(f"{self.kind} needs p >= 0, q >= 0, p + q = n")
        elif (self.p, self.q) != (0, 0):
            raise GroupError(f"{self.kind} takes no signature")
        if self.kind == "Sp_R" and self.n % 2:
            raise GroupError("Sp_R needs even n")

    @property
    def matrix_dim(self) -> int:
        return 2 * self.n if self.kind == "Sp_pq" else self.n

    @property
    def is_real(self) -> bool:
        return self.kind in _REAL_KINDS


def _signature_matrix(p: int, q: int) -> np.ndarray:
    return np.diag(np.r_[np.ones(p), -np.ones(q)]).astype(complex)


def form_matrices(spec: GroupSpec) -> tuple[np.ndarray, ...]:
    """Defining form(s) of the group; () for the GL kinds.

    O_pq/U_pq: diag(I_p, -I_q).  O_C: identity.  Sp_R: the standard
    symplectic form.  Sp_pq: the Hermitian form H = diag(D, D) together
    with the quaternionic structure J = [[0, -I], [I, 0]].
    """
    if spec.kind in _GL_KINDS:
        return ()
    if spec.kind in ("O_pq", "U_pq"):
        return (_signature_matrix(spec.p, spec.q),)
    if spec.kind == "O_C":
        return (np.eye(spec.n, dtype=complex),)
    n = spec.n
    if spec.kind == "Sp_R":
        m = n // 2
        z, i = np.zeros((m, m)), np.eye(m)
        return (np.block([[z, i], [-i, z]]).astype(complex),)
    d = _signature_matrix(spec.p, spec.q)
    h = np.block([[d, np.zeros_like(d)], [np.zeros_like(d), d]])
    z, i = np.zeros((n, n)), np.eye(n)
    j = np.block([[z, -i], [i, z]]).astype(complex)
    return (h, j)


def _fro(x) -> float:
    return float(np.linalg.norm(x))


def membership_residual(spec: GroupSpec, g: np.ndarray) -> float:
    """Frobenius-norm distance of g from the defining group equations."""
    g = np.asarray(g, dtype=complex)
    r = _fro(g.imag) if spec.is_real else 0.0
    if spec.kind in _GL_KINDS:
        return r
    if spec.kind in ("O_pq", "O_C"):
        (j,) = form_matrices(spec)
        return r + _fro(g.T @ j @ g - j)
    if spec.kind == "U_pq":
        (j,) = form_matrices(spec)
        return r + _fro(g.conj().T @ j @ g - j)
    if spec.kind == "Sp_R":
        (om,) = form_matrices(spec)
        return r + _fro(g.T @ om @ g - om)
    h, j = form_matrices(spec)
    return _fro(g.conj().T @ h @ g - h) + _fro(g @ j - j @ g.conj())


def algebra_residual(spec: GroupSpec, x: np.ndarray) -> float:
    """Frobenius-norm distance of x from the linearized group equations."""
    x = np.asarray(x, dtype=complex)
    r = _fro(x.imag) if spec.is_real else 0.0
    if spec.kind in _GL_KINDS:
        return r
    if spec.kind in ("O_pq", "O_C"):
        (j,) = form_matrices(spec)
        return r + _fro(x.T @ j + j @ x)
    if spec.kind == "U_pq":
        (j,) = form_matrices(spec)
        return r + _fro(x.conj().T @ j + j @ x)
    if spec.kind == "Sp_R":
        (om,) = form_matrices(spec)
        return r + _fro(x.T @ om + om @ x)
    h, j = form_matrices(spec)
    return _fro(x.conj().T @ h + h @ x) + _fro(x @ j - j @ x.conj())


def algebra_dim(spec: GroupSpec) -> int:
    n = spec.n
    return {
        "GL_R": n * n,
        "GL_C": 2 * n * n,
        "O_pq": n * (n - 1) // 2,
        "O_C": n * (n - 1),
        "U_pq": n * n,
        "Sp_R": n * (n + 1) // 2,
        "Sp_pq": n * (2 * n + 1),
    }[spec.kind]


def _eij(n, i, j):
    e = np.zeros((n, n), dtype=complex)
    e[i, j] = 1.0
    return e


_BASIS_CACHE: dict[GroupSpec, tuple[np.ndarray, ...]] = {}


def algebra_basis(spec: GroupSpec) -> tuple[np.ndarray, ...]:
    """Real basis of the Lie algebra, as complex arrays.

    Closed-form bases for six kinds; sp(p, q) is cut out by projecting a
    gl basis onto the joint fixed space of its two commuting involutions
    and orthonormalizing the result.
    """
    if spec in _BASIS_CACHE:
        return _BASIS_CACHE[spec]
    n = spec.n
    basis: list[np.ndarray] = []
    if spec.kind == "GL_R":
        basis = [_eij(n, i, j) for i in range(n) for j in range(n)]
    elif spec.kind == "GL_C":
        for i in range(n):
            for j in range(n):
                basis.append(_eij(n, i, j))
                basis.append(1j * _eij(n, i, j))
    elif spec.kind == "O_pq":
        (j,) = form_matrices(spec)
        for a in range(n):
            for b in range(a + 1, n):
                basis.append(j @ (_eij(n, a, b) - _eij(n, b, a)))
    elif spec.kind == "O_C":
        for a in range(n):
            for b in range(a + 1, n):
                e = _eij(n, a, b) - _eij(n, b, a)
                basis.extend([e, 1j * e])
    elif spec.kind == "U_pq":
        (j,) = form_matrices(spec)
        herm = [_eij(n, a, a) for a in range(n)]
        for a in range(n):
            for b in range(a + 1, n):
                herm.append(_eij(n, a, b) + _eij(n, b, a))
                herm.append(1j * (_eij(n, a, b) - _eij(n, b, a)))
        basis = [1j * j @ h for h in herm]
    elif spec.kind == "Sp_R":
        (om,) = form_matrices(spec)
        for a in range(n):
            for b in range(a, n):
                s = _eij(n, a, b) + _eij(n, b, a)
                basis.append(om @ s)
    else:
        basis = _sp_pq_basis(spec)
    out = tuple(basis)
    assert len(out) == algebra_dim(spec)
    for x in out:
        assert algebra_residual(spec, x) < 1e-12
    _BASIS_CACHE[spec] = out
    return out


def _sp_pq_basis(spec: GroupSpec) -> list[np.ndarray]:
    h, j = form_matrices(spec)
    d = spec.matrix_dim

    def project(x):
        t1 = -h @ x.conj().T @ h           # h is its own inverse
        t2 = -j @ x.conj() @ j             # j^-1 = -j
        t12 = -h @ t2.conj().T @ h
        return (x + t1 + t2 + t12) / 4.0

    cols = []
    for a in range(d):
        for b in range(d):
            for e in (_eij(d, a, b), 1j * _eij(d, a, b)):
                v = project(e)
                cols.append(np.r_[v.real.ravel(), v.imag.ravel()])
    u, s, _ = np.linalg.svd(np.array(cols).T)
    rank = int(np.sum(s > 1e-8 * s[0]))
    out = []
    for k in range(rank):
        w = u[:, k]
        out.append((w[: d * d] + 1j * w[d * d:]).reshape(d, d))
    return out


def random_algebra_element(spec: GroupSpec, rng: np.random.Generator,
                           scale: float = 1.0) -> np.ndarray:
    basis = algebra_basis(spec)
    coef = rng.standard_normal(len(basis))
    x = sum(c * e for c, e in zip(coef, basis))
    return scale * x / np.sqrt(len(basis))


def random_element(spec: GroupSpec, rng: np.random.Generator,
                   scale: float = 0.5) -> np.ndarray:
    """exp of a random algebra element; stays in the identity component."""
    return expm(random_algebra_element(spec, rng, scale))


def invariant_f(spec: GroupSpec, g: np.ndarray) -> float:
    """f(g) = Re tr(g), the class function all loop evaluations use."""
    return float(np.trace(g).real)


def pairing(x: np.ndarray, y: np.ndarray) -> float:
    """<x, y> = Re tr(xy)."""
    return float(np.trace(np.asarray(x) @ np.asarray(y)).real)


def variation(spec: GroupSpec, g: np.ndarray) -> np.ndarray:
    """F(g): dual of d/dt f(g e^{tx}) with respect to <, > on the algebra."""
    g = np.asarray(g, dtype=complex)
    if spec.kind in _GL_KINDS:
        return g
    return (g - np.linalg.inv(g)) / 2.0


def variation_hat(spec: GroupSpec, g: np.ndarray, xs=()) -> np.ndarray:
    """Decorated variation Fhat(g; x_1..x_k); k = 0 reduces to F(g).

    GL kinds: g x_1 .. x_k.  Form kinds: the symmetrized combination
    (g x_1 .. x_k + (-1)^{k+1} x_k .. x_1 g^-1) / 2, which lands back in
    the algebra and keeps the chain rule exact.
    """
    g = np.asarray(g, dtype=complex)
    acc = g.copy()
    for x in xs:
        acc = acc @ x
    if spec.kind in _GL_KINDS:
        return acc
    rev = np.linalg.inv(g)
    for x in xs:
        rev = np.asarray(x) @ rev
    return (acc + (-1.0) ** (len(xs) + 1) * rev) / 2.0


def f_hat(spec: GroupSpec, g: np.ndarray, xs=(), r: float = 1.0) -> float:
    """Decorated trace fhat(g; x_1..x_k) = r Re tr(g x_1 .. x_k)."""
    acc = np.asarray(g, dtype=complex)
    for x in xs:
        acc = acc @ x
    return r * float(np.trace(acc).real)


_PON_CACHE: dict[GroupSpec, tuple[tuple[np.ndarray, ...], tuple[float, ...]]] = {}


def pairing_orthonormal_basis(spec: GroupSpec):
    """Basis u_i of the algebra with <u_i, u_j> = sign_i delta_ij.

    Indefinite Gram-Schmidt with largest-|self-pairing| pivoting; when
    every remaining vector is null the pair with the largest mutual
    pairing is replaced by its sum and difference, which are not.
    """
    if spec in _PON_CACHE:
        return _PON_CACHE[spec]
    work = [np.asarray(b, dtype=complex) for b in algebra_basis(spec)]
    out: list[np.ndarray] = []
    signs: list[float] = []
    while work:
        selfs = [pairing(v, v) for v in work]
        k = int(np.argmax(np.abs(selfs)))
        scale = max(_fro(work[k]) ** 2, 1e-30)
        if abs(selfs[k]) > 1e-10 * scale:
            v = work.pop(k)
            s = 1.0 if selfs[k] > 0 else -1.0
            u = v / np.sqrt(abs(selfs[k]))
            out.append(u)
            signs.append(s)
            work = [w - s * pairing(w, u) * u for w in work]
            continue
        # all remaining vectors are null for <, >; mix the best pair
        best, bi, bj = 0.0, -1, -1
        for i in range(len(work)):
            for j in range(i + 1, len(work)):
                p = abs(pairing(work[i], work[j]))
                if p > best:
                    best, bi, bj = p, i, j
        if bi < 0 or best < 1e-12 * scale:
            raise GroupError("degenerate pairing on algebra basis")
        vi, vj = work[bi], work[bj]
        work[bi], work[bj] = vi + vj, vi - vj
    res = (tuple(out), tuple(signs))
    _PON_CACHE[spec] = res
    return res


def project_to_algebra(spec: GroupSpec, v: np.ndarray) -> np.ndarray:
    """Pairing-orthogonal projection of a gl matrix onto the algebra."""
    basis, signs = pairing_orthonormal_basis(spec)
    v = np.asarray(v, dtype=complex)
    acc = np.zeros_like(v)
    for u, s in zip(basis, signs):
        acc = acc + s * pairing(v, u) * u
    return acc


def variation_generic(spec: GroupSpec, g: np.ndarray) -> np.ndarray:
    """Generic route to F(g): project g onto the algebra.

    Works because d/dt f(g e^{tx}) = <g, x> on all of gl and the pairing
    is nondegenerate on the algebra; agrees with the closed forms.
    """
    return project_to_algebra(spec, np.asarray(g, dtype=complex))
