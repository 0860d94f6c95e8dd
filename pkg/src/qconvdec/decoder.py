"""End-to-end syndrome decoding for quantum convolutional codes: syndrome in,
maximum-likelihood error pattern out, via one Viterbi pass.

The decode trellis is built over the full kernel of the measured-syndrome
map, which contains the classical codeword space together with the stabilizer
degeneracy directions; a single zero-terminated Viterbi pass over it finds a
minimum-weight error pattern among *all* patterns with the measured syndrome.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import RatMatrix
from .circuits import (
    CandidateBuilder, CodeBundle, TransferSystem, block_parity_matrix,
    block_syndrome, coset_code_rows, derive_bundle, polynomial_kernel_basis,
    with_isf,
)
from .stabilizer import (
    ErrorFrame, GF4_DECODE_TO_PAULI, SpecError, StabilizerSpec,
    XZ_TO_GF4_DECODE, binary_transfer, check_symplectic,
    quaternary_transfer, syndrome_of,
)
from .trellis import BranchMetric, DecodeResult, Trellis, build_trellis, \
    viterbi_decode


@dataclass(frozen=True)
class DecodedError:
    """Error estimate for one frame."""

    frame: ErrorFrame
    path_metric: int
    tie_count: int


class SyndromeDecoder:
    """Binary-path decoder for an [n,k,m] stabilizer convolutional code.

    Frames are padded with n(m+1) known-clean qubits before measurement; the
    syndrome passed to :meth:`decode` covers the padded span (one (n-k)-bit
    group per block)."""

    def __init__(self, spec: StabilizerSpec, isf_matrix: RatMatrix | None = None,
                 validate: bool = True):
        if validate:
            res = check_symplectic(spec)
            if not res.ok:
                raise SpecError(f"generators do not commute: witness {res.witness}")
        self.spec = spec
        self.hb = binary_transfer(spec)
        bundle = derive_bundle(self.hb)
        if isf_matrix is not None:
            bundle = with_isf(bundle, isf_matrix)
        self.bundle = bundle
        self.parity = block_parity_matrix(self.hb)
        rows = coset_code_rows(self.hb)
        self.coset_generator = TransferSystem(RatMatrix.from_polys(rows),
                                              role="COSET-GEN")
        self.trellis: Trellis = build_trellis(self.coset_generator,
                                              kind="bit-paired")
        self.candidates = CandidateBuilder(bundle, interleaved=True)

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def pad_blocks(self) -> int:
        return self.spec.m + 1

    def pad_qubits(self) -> int:
        return self.spec.n * self.pad_blocks

    def padded_frame(self, frame: ErrorFrame) -> ErrorFrame:
        """Frame extended by the all-identity padding tail."""
        tail = np.zeros(2 * self.pad_qubits(), dtype=np.uint8)
        return ErrorFrame(np.concatenate([frame.bits, tail]))

    def measure(self, frame: ErrorFrame) -> np.ndarray:
        """Syndrome of a data frame over the padded span, (blocks, n-k)."""
        return syndrome_of(self.spec, self.padded_frame(frame))

    def measure_raw(self, frame: ErrorFrame) -> np.ndarray:
        """Syndrome of a frame that already covers the padded span."""
        return syndrome_of(self.spec, frame)

    def decode(self, sigma: np.ndarray, metric: BranchMetric | None = None,
               ) -> DecodedError:
        """ML error pattern for a measured syndrome (over the padded span)."""
        blocks = sigma.shape[0]
        W = self.candidates.build(sigma, blocks)
        res = viterbi_decode(self.trellis, W, metric)
        return DecodedError(frame=ErrorFrame.from_blocks(res.error),
                            path_metric=res.path_metric,
                            tie_count=res.tie_count)

    def candidate_and_decode(self, sigma: np.ndarray,
                             metric: BranchMetric | None = None,
                             ) -> tuple[np.ndarray, DecodeResult]:
        W = self.candidates.build(sigma, sigma.shape[0])
        return W, viterbi_decode(self.trellis, W, metric)


class SyndromeDecoderF4:
    """GF(4)-path decoder; available when the code is GF(4)-linear.

    Decodes the same measured binary syndrome by repacking two syndrome bits
    per block into one GF(4) symbol and running the quaternary trellis."""

    def __init__(self, spec: StabilizerSpec, validate: bool = True):
        if validate:
            res = check_symplectic(spec)
            if not res.ok:
                raise SpecError(f"generators do not commute: witness {res.witness}")
        self.spec = spec
        self.qt = quaternary_transfer(spec)
        self.hq = self.qt.hq
        self.bundle: CodeBundle = derive_bundle(self.hq)
        rows = polynomial_kernel_basis(self.hq, self.hq.cols - self.hq.rows)
        self.coset_generator = TransferSystem(RatMatrix.from_polys(rows),
                                              role="COSET-GEN")
        self.trellis = build_trellis(self.coset_generator, kind="gf4")
        self.candidates = CandidateBuilder(self.bundle, interleaved=False)

    @property
    def pad_blocks(self) -> int:
        return self.spec.m + 1

    def measure(self, frame: ErrorFrame) -> np.ndarray:
        tail = np.zeros(2 * self.spec.n * self.pad_blocks, dtype=np.uint8)
        return syndrome_of(self.spec, ErrorFrame(
            np.concatenate([frame.bits, tail])))

    def frame_to_symbols(self, frame: ErrorFrame) -> np.ndarray:
        """(blocks, n) GF(4) symbols in the decode labeling."""
        blocks = frame.blocks(self.spec.n)
        n = self.spec.n
        return XZ_TO_GF4_DECODE[blocks[:, :n], blocks[:, n:]]

    def symbols_to_frame(self, symbols: np.ndarray) -> ErrorFrame:
        n = self.spec.n
        blocks = np.zeros((symbols.shape[0], 2 * n), dtype=np.uint8)
        for v, pauli in GF4_DECODE_TO_PAULI.items():
            mask = symbols == v
            if pauli in ("X", "Y"):
                blocks[:, :n][mask] = 1
            if pauli in ("Z", "Y"):
                blocks[:, n:][mask] = 1
        return ErrorFrame.from_blocks(blocks)

    def f4_syndrome(self, frame: ErrorFrame) -> np.ndarray:
        """GF(4) syndrome stream of a (padded) frame: symbols through H_q^T."""
        sym = self.frame_to_symbols(frame)
        return block_syndrome(self.hq, sym)

    def decode(self, sigma: np.ndarray, metric: BranchMetric | None = None,
               ) -> DecodedError:
        """Decode a measured *binary* syndrome over the padded span."""
        sym = self.qt.binary_to_f4_syndrome(sigma)
        W = self.candidates.build(sym, sym.shape[0])
        res = viterbi_decode(self.trellis, W, metric)
        return DecodedError(frame=self.symbols_to_frame(res.error),
                            path_metric=res.path_metric,
                            tie_count=res.tie_count)
