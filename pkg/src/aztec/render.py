"""SVG and ASCII pictures of tilings."""

from __future__ import annotations

import numpy as np

from .shuffling import EMPTY, E, N, S, W, DominoTiling, _black_grid, diamond_mask

__all__ = ["COLOURS", "GLYPHS", "render_svg", "render_ascii"]

# S and E carry the particles and are drawn dark
COLOURS = {N: "#dfe8f3", W: "#f3e6d8", S: "#2f5d8a", E: "#9c3d2a"}
GLYPHS = {N: "^", S: "v", E: ">", W: "<", EMPTY: "."}


def render_svg(tiling: DominoTiling, particles: bool = False, cell: int = 8, comment: str | None = None) -> str:
    """One rectangle per domino on a canvas with the diamond outline.

    With ``particles=True`` a dot marks the black square of every S and E
    domino. ``comment`` is embedded verbatim as an XML comment (run metadata).
    """
    n = tiling.order
    g = tiling.grid
    size = 2 * (n + 1) * cell
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    if comment:
        parts.insert(1, f"<!-- {comment.replace('--', '- -')} -->")
    if n:
        black = _black_grid(n)
        # top-left square of each domino: N and W start on black, S and E on white
        for code, horizontal in ((N, True), (S, True), (E, False), (W, False)):
            colour = black if code in (N, W) else ~black
            first = (g == code) & colour
            w, h = (2 * cell, cell) if horizontal else (cell, 2 * cell)
            rs, cs = np.nonzero(first)
            fill = COLOURS[code]
            parts.append(f'<g fill="{fill}" stroke="#333" stroke-width="{max(cell / 16, 0.25):g}">')
            parts.extend(f'<rect x="{(c + 1) * cell}" y="{(r + 1) * cell}" width="{w}" height="{h}"/>'
                         for r, c in zip(rs.tolist(), cs.tolist()))
            parts.append("</g>")
        if particles:
            rs, cs = np.nonzero(((g == S) | (g == E)) & black)
            rad = cell * 0.3
            parts.append('<g fill="#f5d547">')
            parts.extend(f'<circle cx="{(c + 1.5) * cell:g}" cy="{(r + 1.5) * cell:g}" r="{rad:g}"/>'
                         for r, c in zip(rs.tolist(), cs.tolist()))
            parts.append("</g>")
    m = (n + 1) * cell
    pts = f"{m},0 {2 * m},{m} {m},{2 * m} 0,{m}"
    parts.append(f'<polygon points="{pts}" fill="none" stroke="#888" stroke-dasharray="{cell / 2:g}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_ascii(tiling: DominoTiling) -> str:
    """One character per square: ``^`` N, ``v`` S, ``>`` E, ``<`` W; blank outside the diamond."""
    n = tiling.order
    inside = diamond_mask(n)
    rows = []
    for r in range(2 * n):
        rows.append("".join(GLYPHS[int(v)] if inside[r, c] else " " for c, v in enumerate(tiling.grid[r])).rstrip())
    return "\n".join(rows) + "\n"
