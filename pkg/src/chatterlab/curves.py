"""Piecewise polynomial curves in local time, one polynomial per coordinate."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial

__all__ = ["CurvePiece", "PiecewiseCurve"]


@dataclass(frozen=True)
class CurvePiece:
    t_start: float
    duration: float
    coords: tuple  # Polynomial in local time s = t - t_start
    controls: tuple = ()

    @property
    def t_end(self) -> float:
        return self.t_start + self.duration

    def position(self, s) -> np.ndarray:
        return np.array([p(s) for p in self.coords])

    def velocity(self, s) -> np.ndarray:
        return np.array([p.deriv()(s) for p in self.coords])


@dataclass(frozen=True)
class PiecewiseCurve:
    pieces: tuple
    # each piece has constant norm of velocity (constant-control arcs)
    constant_speed: bool = False
    _starts: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_starts", np.array([p.t_start for p in self.pieces]))

    @property
    def t0(self) -> float:
        return self.pieces[0].t_start

    @property
    def t1(self) -> float:
        return self.pieces[-1].t_end

    @property
    def dimension(self) -> int:
        return len(self.pieces[0].coords)

    def _locate(self, t):
        i = int(np.clip(np.searchsorted(self._starts, t, side="right") - 1, 0, len(self.pieces) - 1))
        piece = self.pieces[i]
        return piece, min(max(t - piece.t_start, 0.0), piece.duration)

    def position(self, t: float) -> np.ndarray:
        piece, s = self._locate(t)
        return piece.position(s)

    def velocity(self, t: float) -> np.ndarray:
        piece, s = self._locate(t)
        return piece.velocity(s)

    def start(self) -> np.ndarray:
        return self.pieces[0].position(0.0)

    def end(self) -> np.ndarray:
        last = self.pieces[-1]
        return last.position(last.duration)

    def sample(self, ts: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
        """Positions and velocities at times ``ts`` (vectorised per piece)."""
        ts = np.asarray(ts, dtype=float)
        idx = np.clip(np.searchsorted(self._starts, ts, side="right") - 1, 0, len(self.pieces) - 1)
        pos = np.empty((ts.size, self.dimension))
        vel = np.empty_like(pos)
        for k in np.unique(idx):
            sel = idx == k
            piece = self.pieces[k]
            s = np.clip(ts[sel] - piece.t_start, 0.0, piece.duration)
            for j, p in enumerate(piece.coords):
                pos[sel, j] = p(s)
                vel[sel, j] = p.deriv()(s)
        return pos, vel

    def switch_times(self) -> list[float]:
        out = []
        for a, b in zip(self.pieces, self.pieces[1:]):
            if a.controls != b.controls:
                out.append(b.t_start)
        return out

    def max_joint_gap(self) -> float:
        """Largest position jump between consecutive pieces."""
        gap = 0.0
        for a, b in zip(self.pieces, self.pieces[1:]):
            gap = max(gap, float(np.max(np.abs(a.position(a.duration) - b.position(0.0)))))
        return gap


def poly(coeffs) -> Polynomial:
    return Polynomial(np.asarray(coeffs, dtype=float))
