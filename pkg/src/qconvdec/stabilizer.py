"""Stabilizer specifications for [n,k,m] quantum convolutional codes and
their equivalent classical transfer polynomials.

Conventions fixed across the package:

- binary symplectic encoding I=(0|0), X=(1|0), Z=(0|1), Y=(1|1); an error
  frame stores bit 2i = X component of qubit i, bit 2i+1 = Z component.
- generator block b of the Pauli string maps to the coefficient of D^b.
- the syndrome stream is the block-domain convolution
  sigma_i(D) = sum_c [A_c(D) Q_ic(D) + B_c(D) P_ic(D)],
  where A_c/B_c are the X/Z bit streams of qubit lane c. This matches
  streaming the interleaved frame through the transfer polynomial transpose
  and taking the odd-phase outputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .algebra import (
    GF2, GF4, W, WBAR, LaurentPoly, Poly, RatMatrix, RationalFn,
)


class SpecError(ValueError):
    """Malformed or inconsistent stabilizer specification."""


class F4LinearityError(SpecError):
    """The generator row space is not GF(4)-linear; no F4 equivalent exists."""


PAULIS = "IXYZ"
PAULI_TO_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
BITS_TO_PAULI = {v: k for k, v in PAULI_TO_BITS.items()}
# fixed GF(4) labeling: I->0, Y->1, X->w, Z->w^2
PAULI_TO_GF4 = {"I": 0, "Y": 1, "X": W, "Z": WBAR}
GF4_TO_PAULI = {v: k for k, v in PAULI_TO_GF4.items()}


class ErrorFrame:
    """Binary error pattern on a qubit frame (X bit then Z bit per qubit)."""

    __slots__ = ("bits",)

    def __init__(self, bits: np.ndarray | Iterable[int]):
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.ndim != 1 or arr.size % 2:
            raise ValueError("frame needs an even, flat bit vector")
        self.bits = arr

    @classmethod
    def zeros(cls, num_qubits: int) -> "ErrorFrame":
        return cls(np.zeros(2 * num_qubits, dtype=np.uint8))

    @classmethod
    def from_pauli(cls, pauli: str) -> "ErrorFrame":
        bits = np.zeros(2 * len(pauli), dtype=np.uint8)
        for i, ch in enumerate(pauli.upper()):
            try:
                x, z = PAULI_TO_BITS[ch]
            except KeyError:
                raise ValueError(f"invalid Pauli character {ch!r}") from None
            bits[2 * i] = x
            bits[2 * i + 1] = z
        return cls(bits)

    @property
    def num_qubits(self) -> int:
        return self.bits.size // 2

    def to_pauli(self) -> str:
        b = self.bits
        return "".join(BITS_TO_PAULI[(int(b[2 * i]), int(b[2 * i + 1]))]
                       for i in range(self.num_qubits))

    def x_part(self) -> np.ndarray:
        return self.bits[0::2]

    def z_part(self) -> np.ndarray:
        return self.bits[1::2]

    def __xor__(self, other: "ErrorFrame") -> "ErrorFrame":
        return ErrorFrame(self.bits ^ other.bits)

    def bit_weight(self) -> int:
        return int(self.bits.sum())

    def qubit_weight(self) -> int:
        """Number of non-identity Paulis."""
        return int((self.x_part() | self.z_part()).sum())

    def blocks(self, n: int) -> np.ndarray:
        """(blocks, 2n) view: per block [a_0..a_{n-1}, b_0..b_{n-1}]."""
        if self.num_qubits % n:
            raise ValueError("frame length is not a whole number of blocks")
        nb = self.num_qubits // n
        x = self.x_part().reshape(nb, n)
        z = self.z_part().reshape(nb, n)
        return np.concatenate([x, z], axis=1)

    @classmethod
    def from_blocks(cls, blocks: np.ndarray) -> "ErrorFrame":
        nb, twon = blocks.shape
        n = twon // 2
        bits = np.zeros(2 * nb * n, dtype=np.uint8)
        bits[0::2] = blocks[:, :n].reshape(-1)
        bits[1::2] = blocks[:, n:].reshape(-1)
        return cls(bits)

    def __eq__(self, other) -> bool:
        return isinstance(other, ErrorFrame) and np.array_equal(self.bits, other.bits)

    def __repr__(self) -> str:
        return f"ErrorFrame({self.to_pauli()})"


def pauli_to_bits(pauli: str) -> ErrorFrame:
    return ErrorFrame.from_pauli(pauli)


def bits_to_pauli(frame: ErrorFrame) -> str:
    return frame.to_pauli()


@dataclass(frozen=True)
class StabilizerSpec:
    """[n,k,m] quantum convolutional code given by its block-0 generators."""

    n: int
    k: int
    m: int
    generators: tuple[str, ...]
    # coefficient tensors, shape (m+1, n-k, n)
    p_coeffs: np.ndarray = field(repr=False, compare=False, default=None)
    q_coeffs: np.ndarray = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        n, k, m = self.n, self.k, self.m
        if not (0 < k < n) and not (k == 0 and n > 0):
            raise SpecError(f"bad parameters n={n} k={k}")
        if m < 0:
            raise SpecError("memory parameter must be >= 0")
        gens = tuple(g.upper() for g in self.generators)
        if len(gens) != n - k:
            raise SpecError(f"expected {n - k} generators, got {len(gens)}")
        glen = n * (m + 1)
        p = np.zeros((m + 1, n - k, n), dtype=np.uint8)
        q = np.zeros((m + 1, n - k, n), dtype=np.uint8)
        for i, g in enumerate(gens):
            if len(g) != glen:
                raise SpecError(
                    f"generator {i + 1} has length {len(g)}, expected {glen}")
            for pos, ch in enumerate(g):
                if ch not in PAULIS:
                    raise SpecError(f"invalid Pauli character {ch!r}")
                b, c = divmod(pos, n)
                x, z = PAULI_TO_BITS[ch]
                p[b, i, c] = x
                q[b, i, c] = z
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "p_coeffs", p)
        object.__setattr__(self, "q_coeffs", q)
        if self._symplectic_rank() < n - k:
            raise SpecError("generators are not independent")

    def _symplectic_rank(self) -> int:
        rows = np.concatenate(
            [self.p_coeffs.transpose(1, 0, 2).reshape(self.n - self.k, -1),
             self.q_coeffs.transpose(1, 0, 2).reshape(self.n - self.k, -1)],
            axis=1).copy()
        r = 0
        nr, nc = rows.shape
        for c in range(nc):
            sel = next((i for i in range(r, nr) if rows[i, c]), None)
            if sel is None:
                continue
            rows[[r, sel]] = rows[[sel, r]]
            for i in range(nr):
                if i != r and rows[i, c]:
                    rows[i] ^= rows[r]
            r += 1
        return r

    @property
    def block_qubits(self) -> int:
        return self.n

    def p_matrix(self) -> RatMatrix:
        """P(D), (n-k) x n polynomial matrix."""
        return self._poly_matrix(self.p_coeffs)

    def q_matrix(self) -> RatMatrix:
        return self._poly_matrix(self.q_coeffs)

    def _poly_matrix(self, coeffs: np.ndarray) -> RatMatrix:
        rows = []
        for i in range(self.n - self.k):
            rows.append([Poly(coeffs[:, i, c].tolist(), GF2)
                         for c in range(self.n)])
        return RatMatrix.from_polys(rows)


def parse_stabilizer(text: str) -> StabilizerSpec:
    """Parse the stabilizer spec file format.

    Header line ``qcc n=<int> k=<int> m=<int>``, then n-k lines of Pauli
    strings of length n(m+1). Lines starting with ``#`` are comments.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise SpecError("empty stabilizer document")
    head = lines[0].split()
    if not head or head[0] != "qcc":
        raise SpecError("missing 'qcc' header line")
    params = {}
    for tok in head[1:]:
        if "=" not in tok:
            raise SpecError(f"bad header token {tok!r}")
        key, val = tok.split("=", 1)
        try:
            params[key] = int(val)
        except ValueError:
            raise SpecError(f"bad header value {tok!r}") from None
    try:
        n, k, m = params["n"], params["k"], params["m"]
    except KeyError as exc:
        raise SpecError(f"header missing {exc}") from None
    return StabilizerSpec(n=n, k=k, m=m, generators=tuple(lines[1:]))


@dataclass(frozen=True)
class SymplecticCheck:
    ok: bool
    witness: tuple[int, int, LaurentPoly] | None = None


def check_symplectic(spec: StabilizerSpec) -> SymplecticCheck:
    """Check commutation of all generator shifts and report the first nonzero
    Laurent entry as a witness on failure.

    Entry (i, j) is sum_c [P_ic(D) Q_jc(1/D) + Q_ic(D) P_jc(1/D)]; its D^d
    coefficient is the symplectic product of generator i with generator j
    shifted by d blocks. Note the second term carries 1/D on the *transposed*
    factor; with both 1/D factors on the same side the diagonal would vanish
    identically in characteristic 2 and self-overlap anticommutation would go
    undetected.
    """
    P = spec.p_matrix()
    Q = spec.q_matrix()
    Pl = [[LaurentPoly.from_poly(e.num) for e in row] for row in P.entries]
    Ql = [[LaurentPoly.from_poly(e.num) for e in row] for row in Q.entries]
    Pl_inv = [[e.invert_variable() for e in row] for row in Pl]
    Ql_inv = Q.substitute_inverse()
    r = spec.n - spec.k
    for i in range(r):
        for j in range(r):
            acc = LaurentPoly({}, GF2)
            for c in range(spec.n):
                acc = acc + Pl[i][c] * Ql_inv[j][c]
                acc = acc + Ql[i][c] * Pl_inv[j][c]
            if not acc.is_zero():
                return SymplecticCheck(False, (i, j, acc))
    return SymplecticCheck(True)


def binary_transfer(spec: StabilizerSpec) -> RatMatrix:
    """Equivalent binary transfer polynomial H_b(D) = P(D^2) + D Q(D^2)."""
    P = spec.p_matrix().substitute_square()
    Q = spec.q_matrix().substitute_square()
    D = RationalFn(Poly.D(GF2))
    rows = []
    for i in range(spec.n - spec.k):
        rows.append([P.entries[i][c] + D * Q.entries[i][c]
                     for c in range(spec.n)])
    return RatMatrix(rows, GF2)


# Pauli -> GF(4) map used internally by the quaternary decode path. It is the
# conjugate of the row labeling so that the syndrome former is H_q^T itself
# (no conjugation in the streaming circuits).
PAULI_TO_GF4_DECODE = {"I": 0, "X": 1, "Y": W, "Z": WBAR}
GF4_DECODE_TO_PAULI = {v: k for k, v in PAULI_TO_GF4_DECODE.items()}
# per-qubit (x, z) bits -> decode symbol: value conj(x | z<<1) in GF4 encoding
XZ_TO_GF4_DECODE = np.zeros((2, 2), dtype=np.uint8)
for _pl, _v in PAULI_TO_GF4_DECODE.items():
    _x, _z = PAULI_TO_BITS[_pl]
    XZ_TO_GF4_DECODE[_x, _z] = _v


@dataclass(frozen=True)
class QuaternaryTransfer:
    """GF(4) equivalent of a stabilizer spec.

    ``hq`` is the (n-k)/2 x n transfer polynomial. ``syndrome_map`` is the
    invertible GF(2) matrix taking the per-block GF(4) syndrome symbol bits
    (x_1, y_1, ..., x_r, y_r) to the measured binary syndrome bits, i.e.
    sigma = syndrome_map @ bits(sigma*).
    """

    hq: RatMatrix
    syndrome_map: np.ndarray
    syndrome_map_inv: np.ndarray

    @property
    def f4_rows(self) -> int:
        return self.hq.rows

    def binary_to_f4_syndrome(self, sigma: np.ndarray) -> np.ndarray:
        """(blocks, n-k) binary -> (blocks, (n-k)/2) GF(4) symbols."""
        bits = (sigma @ self.syndrome_map_inv.T) % 2
        r = self.f4_rows
        out = np.zeros((sigma.shape[0], r), dtype=np.uint8)
        for j in range(r):
            out[:, j] = bits[:, 2 * j] | (bits[:, 2 * j + 1] << 1)
        return out

    def f4_to_binary_syndrome(self, symbols: np.ndarray) -> np.ndarray:
        r = self.f4_rows
        bits = np.zeros((symbols.shape[0], 2 * r), dtype=np.uint8)
        for j in range(r):
            bits[:, 2 * j] = symbols[:, j] & 1
            bits[:, 2 * j + 1] = symbols[:, j] >> 1
        return (bits @ self.syndrome_map.T) % 2


def quaternary_transfer(spec: StabilizerSpec) -> QuaternaryTransfer:
    """Derive the GF(4) transfer polynomial H_q, or refuse when the generator
    row space is not GF(4)-linear (not closed under scaling by w)."""
    nk = spec.n - spec.k
    if nk % 2:
        raise F4LinearityError("odd generator count cannot be GF(4)-linear")
    ncoef = (spec.m + 1) * spec.n
    # generator rows as GF(4) vectors: entry = p + w*q per (power, lane)
    rows4 = np.zeros((nk, ncoef), dtype=np.uint8)
    for i in range(nk):
        vals = spec.p_coeffs[:, i, :] | (spec.q_coeffs[:, i, :] << 1)
        rows4[i] = vals.reshape(-1)

    def to_bits(vec4):
        out = np.zeros(2 * ncoef, dtype=np.uint8)
        out[0::2] = vec4 & 1
        out[1::2] = vec4 >> 1
        return out

    span = [to_bits(rows4[i]) for i in range(nk)]

    def in_span(vec):
        basis = np.array(span, dtype=np.uint8).copy()
        v = vec.copy()
        r = 0
        for c in range(basis.shape[1]):
            sel = next((i for i in range(r, basis.shape[0]) if basis[i, c]), None)
            if sel is None:
                continue
            basis[[r, sel]] = basis[[sel, r]]
            for i in range(basis.shape[0]):
                if i != r and basis[i, c]:
                    basis[i] ^= basis[r]
            if v[c]:
                v ^= basis[r]
            r += 1
        return not v.any()

    wmul = np.array([GF4.mul(W, a) for a in range(4)], dtype=np.uint8)
    for i in range(nk):
        if not in_span(to_bits(wmul[rows4[i]])):
            raise F4LinearityError(
                "generator row space is not closed under w-scaling; "
                "use the binary transfer polynomial instead")

    # GF(4) row reduction with coefficient tracking: rows4 = C @ basis
    basis = []
    combos = []  # combos[i][j]: coefficient of basis[j] in rows4[i]
    work = [rows4[i].copy() for i in range(nk)]
    track = [[0] * nk for _ in range(nk)]
    pivots = []
    for i in range(nk):
        vec = work[i]
        coeff = [0] * nk
        coeff_self = 1
        for bj, (pv, bvec, bcoef) in enumerate(zip(pivots, basis, combos)):
            f = vec[pv]
            if f:
                vec = vec ^ np.array([GF4.mul(f, x) for x in bvec], dtype=np.uint8)
                for t in range(len(coeff)):
                    coeff[t] ^= GF4.mul(f, bcoef[t])
        nz = next((c for c in range(ncoef) if vec[c]), None)
        if nz is None:
            track[i] = coeff
            continue
        inv = GF4.inv(int(vec[nz]))
        bvec = np.array([GF4.mul(inv, x) for x in vec], dtype=np.uint8)
        pivots.append(nz)
        basis.append(bvec)
        bcoef = [0] * nk
        bcoef[len(basis) - 1] = 1
        combos.append(bcoef)
        coeff[len(basis) - 1] = GF4.inv(inv)  # original pivot value
        track[i] = coeff
    r = len(basis)
    if r != nk // 2:
        raise F4LinearityError(
            f"GF(4) rank {r} != {nk // 2}; row space is not GF(4)-linear")

    hq_rows = []
    for bvec in basis:
        vals = bvec.reshape(spec.m + 1, spec.n)
        hq_rows.append([Poly(vals[:, c].tolist(), GF4) for c in range(spec.n)])
    hq = RatMatrix.from_polys(hq_rows)

    # binary syndrome bits from GF(4) syndrome symbols:
    # sigma_i = Tr(sum_j c_ij sigma*_j), Tr(c*(x+yw)) = c1*x + (c0+c1)*y
    smap = np.zeros((nk, nk), dtype=np.uint8)
    for i in range(nk):
        for j in range(r):
            c = track[i][j]
            c0, c1 = c & 1, c >> 1
            smap[i, 2 * j] = c1
            smap[i, 2 * j + 1] = c0 ^ c1
    sinv = _gf2_inv(smap)
    if sinv is None:
        raise F4LinearityError("syndrome remap is singular")
    return QuaternaryTransfer(hq=hq, syndrome_map=smap, syndrome_map_inv=sinv)


def _gf2_inv(mat: np.ndarray) -> np.ndarray | None:
    nr = mat.shape[0]
    aug = np.concatenate([mat.copy(), np.eye(nr, dtype=np.uint8)], axis=1)
    r = 0
    for c in range(nr):
        sel = next((i for i in range(r, nr) if aug[i, c]), None)
        if sel is None:
            return None
        aug[[r, sel]] = aug[[sel, r]]
        for i in range(nr):
            if i != r and aug[i, c]:
                aug[i] ^= aug[r]
        r += 1
    return aug[:, nr:]


def syndrome_of(spec: StabilizerSpec, frame: ErrorFrame) -> np.ndarray:
    """Per-block syndrome bits, shape (blocks, n-k).

    Block-domain convolution of the frame with the generator coefficients;
    bit (j, i) pairs X parts against Q and Z parts against P. Identical to
    streaming the frame through the realized H_b^T circuit and keeping the
    odd-phase outputs (cross-checked in the test suite).
    """
    if frame.num_qubits % spec.n:
        raise ValueError("frame length is not a whole number of blocks")
    eb = frame.blocks(spec.n)
    nb = eb.shape[0]
    n, nk = spec.n, spec.n - spec.k
    a = eb[:, :n]
    b = eb[:, n:]
    out = np.zeros((nb, nk), dtype=np.uint8)
    for d in range(spec.m + 1):
        qa = spec.q_coeffs[d].T  # (n, n-k)
        pb = spec.p_coeffs[d].T
        contrib = (a[: nb - d] @ qa + b[: nb - d] @ pb) % 2
        out[d:] ^= contrib.astype(np.uint8)
    return out


def syndrome_blocks_full(spec: StabilizerSpec, frame: ErrorFrame,
                         extra_blocks: int | None = None) -> np.ndarray:
    """Like :func:`syndrome_of` but extends the output window by
    ``extra_blocks`` (default m) to include the full convolution support."""
    if extra_blocks is None:
        extra_blocks = spec.m
    eb = frame.blocks(spec.n)
    nb = eb.shape[0]
    n, nk = spec.n, spec.n - spec.k
    a, b = eb[:, :n], eb[:, n:]
    out = np.zeros((nb + extra_blocks, nk), dtype=np.uint8)
    for d in range(spec.m + 1):
        qa = spec.q_coeffs[d].T
        pb = spec.p_coeffs[d].T
        contrib = (a @ qa + b @ pb) % 2
        out[d:d + nb] ^= contrib.astype(np.uint8)
    return out


EXAMPLE_311_TEXT = """\
# [3,1,1] quantum convolutional code, rate 1/3
qcc n=3 k=1 m=1
XXXXZY
ZZZZYX
"""


def example_311() -> StabilizerSpec:
    """The rate-1/3 [3,1,1] code used throughout the test suite."""
    return parse_stabilizer(EXAMPLE_311_TEXT)
