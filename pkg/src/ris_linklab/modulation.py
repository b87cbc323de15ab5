"""Constellations, Gray bit labels, and maximum-likelihood detection.

Three constellation families are supported:

* ``PSK``   — unit-circle points ``exp(2j*pi*m/M)``, Gray-labelled around
  the circle.
* ``QAM``   — square lattice ``{±1, ±3, ...}^2`` normalized to unit average
  energy, Gray-labelled independently along each axis.
* ``AP_PHASE`` — the phase book ``w_m = 2*pi*m/M`` used when the reflecting
  surface itself encodes a message by rotating all elements by a common
  phase.  Points coincide with PSK; the ``phases`` field exposes ``w_m``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ConstellationKind",
    "Constellation",
    "DetectionResult",
    "build_constellation",
    "detect_ml",
]


class ConstellationKind(enum.Enum):
    PSK = "psk"
    QAM = "qam"
    AP_PHASE = "ap_phase"


def _gray_label(index: int, width: int) -> str:
    return format(index ^ (index >> 1), f"0{width}b")


def _is_power_of_two(m: int) -> bool:
    return m >= 2 and (m & (m - 1)) == 0


@dataclass(frozen=True)
class Constellation:
    """An M-ary symbol set with unit average energy and Gray bit labels."""

    kind: ConstellationKind
    order: int
    points: np.ndarray
    bit_labels: tuple[str, ...]
    phases: np.ndarray | None = None
    _bit_distance: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        labels = np.array([[int(b) for b in label] for label in self.bit_labels], dtype=np.uint8)
        # Hamming distances between every pair of labels, used for bit-error counting.
        table = (labels[:, None, :] != labels[None, :, :]).sum(axis=2).astype(np.int64)
        object.__setattr__(self, "_bit_distance", table)

    @property
    def bits_per_symbol(self) -> int:
        return self.order.bit_length() - 1

    def bit_distance(self, i: int, j: int) -> int:
        """Hamming distance between the bit labels of symbols i and j."""
        return int(self._bit_distance[i, j])

    @property
    def bit_distance_table(self) -> np.ndarray:
        return self._bit_distance


def build_constellation(kind: ConstellationKind, order: int) -> Constellation:
    """Construct a Gray-labelled constellation of the given kind and order.

    ``order`` must be a power of two (>= 2); QAM additionally requires a
    square layout, i.e. order in {4, 16, 64, 256, ...}.
    """
    if not _is_power_of_two(order):
        raise ValueError(f"order must be a power of two >= 2, got {order}")
    bits = order.bit_length() - 1

    if kind in (ConstellationKind.PSK, ConstellationKind.AP_PHASE):
        phases = 2.0 * np.pi * np.arange(order) / order
        points = np.exp(1j * phases)
        labels = tuple(_gray_label(m, bits) for m in range(order))
        return Constellation(
            kind=kind,
            order=order,
            points=points,
            bit_labels=labels,
            phases=phases if kind is ConstellationKind.AP_PHASE else None,
        )

    if kind is ConstellationKind.QAM:
        side = math.isqrt(order)
        if side * side != order:
            raise ValueError(f"QAM requires a square power-of-two order (4, 16, 64, ...), got {order}")
        levels = 2.0 * np.arange(side) - (side - 1)
        # Unit average energy: mean of (i^2 + q^2) over the lattice is 2(M-1)/3.
        scale = 1.0 / np.sqrt(2.0 * (order - 1) / 3.0)
        points = np.empty(order, dtype=complex)
        labels = []
        half = bits // 2
        for row in range(side):
            for col in range(side):
                points[row * side + col] = scale * (levels[col] + 1j * levels[row])
                labels.append(_gray_label(col, half) + _gray_label(row, half))
        return Constellation(kind=kind, order=order, points=points, bit_labels=tuple(labels))

    raise ValueError(f"unknown constellation kind: {kind!r}")


@dataclass(frozen=True)
class DetectionResult:
    """Outcome of one maximum-likelihood decision."""

    symbol_index: int
    constellation: Constellation

    def bit_errors_vs(self, reference_index: int) -> int:
        """Number of bit errors relative to the transmitted symbol index."""
        return self.constellation.bit_distance(self.symbol_index, reference_index)


def detect_ml(
    received: complex,
    gain: complex,
    energy: float,
    constellation: Constellation,
) -> DetectionResult:
    """Coherent maximum-likelihood detection against a known channel gain.

    Returns the index minimizing ``|received - sqrt(energy)*gain*point|**2``.
    Ties break toward the lowest symbol index.
    """
    if not (np.isfinite(energy) and energy > 0):
        raise ValueError(f"energy must be finite and > 0, got {energy}")
    if not (np.isfinite(np.real(received)) and np.isfinite(np.imag(received))):
        raise ValueError("received sample must be finite")
    if not (np.isfinite(np.real(gain)) and np.isfinite(np.imag(gain))):
        raise ValueError("gain must be finite")
    hypotheses = np.sqrt(energy) * gain * constellation.points
    index = int(np.argmin(np.abs(received - hypotheses) ** 2))
    return DetectionResult(symbol_index=index, constellation=constellation)
