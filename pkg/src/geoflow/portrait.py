"""Ternary phase portraits of three-strategy dynamics as plain SVG."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .errors import DimensionalityLimit

SIZE = 600.0
MARGIN = 40.0
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def _fmt(v: float) -> str:
    return format(float(v), ".9g")


def corners(size: float = SIZE, margin: float = MARGIN) -> np.ndarray:
    """Planar positions of e1 (top), e2 (bottom left), e3 (bottom right)."""
    side = size - 2 * margin
    h = side * np.sqrt(3) / 2
    top = margin + (size - 2 * margin - h) / 2
    return np.array([[size / 2, top], [margin, top + h], [size - margin, top + h]])


def to_plane(X, size: float = SIZE) -> np.ndarray:
    return np.atleast_2d(np.asarray(X, dtype=float)) @ corners(size)


def _thin(P: np.ndarray, max_points: int = 1500) -> np.ndarray:
    if len(P) <= max_points:
        return P
    idx = np.unique(np.r_[np.linspace(0, len(P) - 1, max_points).astype(int), len(P) - 1])
    return P[idx]


def _arrow(P: np.ndarray, color: str) -> str | None:
    """Arrowhead at the middle of a polyline, pointing along the motion."""
    i = len(P) // 2
    j = min(i + max(1, len(P) // 50), len(P) - 1)
    d = P[j] - P[i]
    L = np.hypot(*d)
    if L < 1e-9:
        return None
    d /= L
    nrm = np.array([-d[1], d[0]])
    tip = P[i] + 6 * d
    a = P[i] - 4 * d + 4 * nrm
    b = P[i] - 4 * d - 4 * nrm
    pts = " ".join(f"{_fmt(q[0])},{_fmt(q[1])}" for q in (tip, a, b))
    return f'<polygon points="{pts}" fill="{color}"/>'


def render_portrait(trajectories, rest_points=(), nash=(), title: str = "") -> str:
    """SVG 1.1 document with the simplex, orbits and rest points.

    ``trajectories`` are state arrays of shape (T, 3). Rest points that are
    also in ``nash`` are drawn filled, the others hollow.
    """
    C = corners()
    out = ['<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_fmt(SIZE)}" '
           f'height="{_fmt(SIZE)}" viewBox="0 0 {_fmt(SIZE)} {_fmt(SIZE)}">']
    if title:
        out.append(f"<title>{escape(title)}</title>")
    tri = " ".join(f"{_fmt(c[0])},{_fmt(c[1])}" for c in C)
    out.append(f'<polygon points="{tri}" fill="none" stroke="black" stroke-width="1.5"/>')
    for k, (c, dx, dy) in enumerate(zip(C, (0, -14, 14), (-10, 18, 18))):
        out.append(f'<text x="{_fmt(c[0] + dx)}" y="{_fmt(c[1] + dy)}" font-family="sans-serif" '
                   f'font-size="14" text-anchor="middle">e{k + 1}</text>')
    for k, X in enumerate(trajectories):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != 3:
            raise DimensionalityLimit("portraits need three-strategy states")
        color = COLORS[k % len(COLORS)]
        P = _thin(to_plane(X))
        if np.ptp(P, axis=0).max() < 1e-6:
            out.append(f'<circle cx="{_fmt(P[0, 0])}" cy="{_fmt(P[0, 1])}" r="3" fill="{color}"/>')
            continue
        pts = " ".join(f"{_fmt(p[0])},{_fmt(p[1])}" for p in P)
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1"/>')
        head = _arrow(P, color)
        if head:
            out.append(head)
    nash = [np.asarray(q) for q in nash]
    for x in rest_points:
        p = to_plane(x)[0]
        filled = any(np.allclose(x, q, atol=1e-9) for q in nash)
        fill = "black" if filled else "white"
        out.append(f'<circle cx="{_fmt(p[0])}" cy="{_fmt(p[1])}" r="5" fill="{fill}" '
                   f'stroke="black" stroke-width="1.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
