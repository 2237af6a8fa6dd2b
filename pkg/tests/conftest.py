import numpy as np
import pytest
from scipy.spatial import ConvexHull

from anisospec import Polygon2D, regular_polygon


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def unit_square():
    return Polygon2D([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])


@pytest.fixture
def right_triangle():
    # legs of length 1 along the axes
    return Polygon2D([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])


@pytest.fixture
def l_shape():
    # unit squares [0,1]^2, [1,2]x[0,1], [0,1]x[1,2]; area 3
    return Polygon2D([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])


@pytest.fixture
def u_shape():
    # 3x2 rectangle minus the open notch (1,2)x(1,2]; area 5
    return Polygon2D([(0, 0), (3, 0), (3, 2), (2, 2), (2, 1), (1, 1), (1, 2), (0, 2)])


@pytest.fixture
def hexagon():
    return regular_polygon(6)


def random_convex_polygon(rng, n_points: int = 12, scale: float = 1.0) -> Polygon2D:
    """Convex hull of random points; counter-clockwise by construction."""
    pts = rng.normal(size=(n_points, 2)) * scale
    hull = ConvexHull(pts)
    return Polygon2D(pts[hull.vertices])


def random_star_polygon(rng, n: int = 10, r_min: float = 0.3, r_max: float = 1.5) -> Polygon2D:
    """Star-shaped (generally non-convex) polygon around the origin.

    Stratified angles keep every angular gap strictly below pi, which makes
    the angularly sorted chain simple by construction.
    """
    ang = (np.arange(n) + rng.uniform(0.1, 0.9, size=n)) * 2.0 * np.pi / n
    rad = rng.uniform(r_min, r_max, size=n)
    V = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
    return Polygon2D(V)


def point_in_polygon(poly: Polygon2D, pts: np.ndarray) -> np.ndarray:
    """Even-odd ray casting, vectorized over query points."""
    V = poly.vertices
    P = V
    Q = np.roll(V, -1, axis=0)
    x = pts[:, 0][:, None]
    y = pts[:, 1][:, None]
    px, py = P[:, 0][None, :], P[:, 1][None, :]
    qx, qy = Q[:, 0][None, :], Q[:, 1][None, :]
    cond = (py <= y) != (qy <= y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = px + (y - py) * (qx - px) / (qy - py)
    hits = cond & (x < xint)
    return np.sum(hits, axis=1) % 2 == 1
