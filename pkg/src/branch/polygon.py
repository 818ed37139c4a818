"""Point-in-polygon membership for visual split rules.

Interiors follow the even-odd rule; points on a polygon edge or vertex count
as inside. Polygons are sequences of (x, y) vertices, implicitly closed.
"""

from __future__ import annotations

Point = tuple[float, float]


def on_segment(p: Point, a: Point, b: Point) -> bool:
    """True when p lies on the closed segment a-b."""
    (px, py), (ax, ay), (bx, by) = p, a, b
    cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    if cross != 0.0:
        return False
    return min(ax, bx) <= px <= max(ax, bx) and min(ay, by) <= py <= max(ay, by)


def point_in_polygon(p: Point, polygon) -> bool:
    px, py = p
    n = len(polygon)
    for i in range(n):
        if on_segment(p, polygon[i], polygon[(i + 1) % n]):
            return True
    # Even-odd ray cast toward +x. The half-open comparison on y makes each
    # vertex count for exactly one of its two edges.
    inside = False
    for i in range(n):
        ax, ay = polygon[i]
        bx, by = polygon[(i + 1) % n]
        if (ay > py) != (by > py):
            x_at = ax + (py - ay) * (bx - ax) / (by - ay)
            if px < x_at:
                inside = not inside
    return inside


def point_in_any(p: Point, polygons) -> bool:
    return any(point_in_polygon(p, poly) for poly in polygons)
