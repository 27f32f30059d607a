"""Geometry of the round sphere: points, grids, regions, measures, density tests."""

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from lslab.specfun import gauss_legendre_nodes

NORTH = np.array([0.0, 0.0, 1.0])
SOUTH = np.array([0.0, 0.0, -1.0])
FOUR_PI = 4.0 * math.pi


class SamplingError(ValueError):
    """Center/axis sampling too coarse for a reliable extremum."""


# -- points ----------------------------------------------------------------------------


def sph2cart(theta, phi):
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def cart2sph(xyz):
    """(theta, phi) of unit vectors; theta via atan2 for accuracy at the poles."""
    xyz = np.asarray(xyz, dtype=float)
    rho = np.hypot(xyz[..., 0], xyz[..., 1])
    theta = np.arctan2(rho, xyz[..., 2])
    phi = np.mod(np.arctan2(xyz[..., 1], xyz[..., 0]), 2.0 * math.pi)
    return theta, phi


def point(theta, phi):
    """Unit vector at spherical angles; roundoff-level components are snapped
    to zero so that e.g. ``point(pi, 0)`` is exactly the south pole."""
    p = sph2cart(theta, phi)
    p = np.where(np.abs(p) < 1e-15, 0.0, p)
    return unit(p)


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def geodesic_distance(a, b):
    """Great-circle distance, stable near 0 and pi (atan2 of |a x b| and a.b)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    cross = np.linalg.norm(np.cross(a, b), axis=-1)
    dot = np.sum(a * b, axis=-1)
    return np.arctan2(cross, dot)


def tube_distance(x, axis):
    """Angular distance from ``x`` to the great circle with unit normal ``axis``."""
    x = np.asarray(x, dtype=float)
    axis = np.asarray(axis, dtype=float)
    dot = np.abs(np.sum(x * axis, axis=-1))
    cross = np.linalg.norm(np.cross(x, axis), axis=-1)
    return np.arctan2(dot, cross)


def rotation_to(z):
    """Rotation matrix ``R`` with ``R @ NORTH == z`` (deterministic choice)."""
    z = unit(z)
    c = z[2]
    if c > 1.0 - 1e-15:
        return np.eye(3)
    if c < -1.0 + 1e-15:
        return np.diag([1.0, -1.0, -1.0])
    # rotate about k = north x z by the angle between them
    k = np.array([-z[1], z[0], 0.0])
    s = np.linalg.norm(k)
    k = k / s
    K = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + s * K + (1.0 - c) * (K @ K)


def random_rotation(rng):
    """Uniform random rotation from a numpy Generator (QR of a Gaussian matrix)."""
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def fibonacci_sphere(n):
    """``n`` near-uniform points (golden-angle spiral)."""
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)


def lattice_spacing(n):
    return math.sqrt(FOUR_PI / n)


def vol_ball(s):
    return 2.0 * math.pi * (1.0 - math.cos(s))


def vol_tube(w):
    return FOUR_PI * math.sin(w)


# -- quadrature grids ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Gauss-Legendre (in cos theta) x uniform azimuth product rule.

    ``theta_breaks`` splits the colatitude range into panels, each carrying
    ``n_theta`` Gauss nodes, so that cap boundaries at those colatitudes are
    resolved exactly.  ``frame`` maps grid coordinates to physical ones.
    """

    n_theta: int
    n_phi: int
    theta: np.ndarray
    w_theta: np.ndarray
    phi: np.ndarray
    frame: np.ndarray
    theta_breaks: tuple = ()

    @property
    def w_phi(self):
        return 2.0 * math.pi / self.n_phi

    @property
    def shape(self):
        return (self.theta.size, self.n_phi)

    @property
    def size(self):
        return self.theta.size * self.n_phi

    @property
    def weights(self):
        return np.repeat(self.w_theta * self.w_phi, self.n_phi)

    @property
    def standard(self):
        return np.array_equal(self.frame, np.eye(3))

    @property
    def local_nodes(self):
        th = np.repeat(self.theta, self.n_phi)
        ph = np.tile(self.phi, self.theta.size)
        return sph2cart(th, ph)

    @property
    def nodes(self):
        loc = self.local_nodes
        return loc if self.standard else loc @ self.frame.T

    def integrate(self, values):
        return float(np.real(np.sum(self.weights * np.asarray(values).ravel())))


def make_grid(n_theta, n_phi, theta_breaks=(), frame=None):
    """Product quadrature exact for spherical polynomials of degree
    ``<= min(2*n_theta - 1, n_phi - 1)``."""
    if n_theta < 2 or n_phi < 4:
        raise ValueError("make_grid needs n_theta >= 2 and n_phi >= 4")
    x, w = gauss_legendre_nodes(n_theta)
    edges = [0.0] + sorted(float(b) for b in theta_breaks) + [math.pi]
    if any(not 0.0 < b < math.pi for b in theta_breaks) or len(set(edges)) != len(edges):
        raise ValueError("theta_breaks must be distinct and inside (0, pi)")
    thetas, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        # panel in t = cos(theta) from cos(hi) to cos(lo)
        a, b = math.cos(hi), math.cos(lo)
        t = 0.5 * (b - a) * x + 0.5 * (b + a)
        thetas.append(np.arccos(np.clip(t, -1.0, 1.0)))
        weights.append(0.5 * (b - a) * w)
    theta = np.concatenate(thetas)
    w_theta = np.concatenate(weights)
    order = np.argsort(theta, kind="stable")
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    frame = np.eye(3) if frame is None else np.asarray(frame, dtype=float)
    return QuadratureGrid(
        n_theta=n_theta,
        n_phi=n_phi,
        theta=theta[order],
        w_theta=w_theta[order],
        phi=phi,
        frame=frame,
        theta_breaks=tuple(sorted(theta_breaks)),
    )


# -- regions -----------------------------------------------------------------------------


class Region:
    """Base class of the region algebra; subclasses implement ``contains``."""

    def contains(self, pts):
        raise NotImplementedError

    def rotate(self, R):
        raise NotImplementedError

    def min_scale(self):
        """Smallest radius/halfwidth in the tree (for resolution policies)."""
        return math.pi

    def axial_breaks(self):
        """Colatitudes of boundaries that are circles of latitude, if all are."""
        return None


@dataclass(frozen=True, eq=False)
class All(Region):
    def contains(self, pts):
        return np.ones(np.shape(pts)[:-1], dtype=bool)

    def rotate(self, R):
        return self

    def axial_breaks(self):
        return ()


@dataclass(frozen=True, eq=False)
class Cap(Region):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        if not 0.0 < self.radius <= math.pi:
            raise ValueError("cap radius must lie in (0, pi]")
        object.__setattr__(self, "center", unit(self.center))

    def contains(self, pts):
        return geodesic_distance(pts, self.center) <= self.radius

    def rotate(self, R):
        return Cap(R @ self.center, self.radius)

    def min_scale(self):
        return self.radius

    def axial_breaks(self):
        if np.allclose(self.center, NORTH, atol=1e-15):
            return (self.radius,) if self.radius < math.pi else ()
        if np.allclose(self.center, SOUTH, atol=1e-15):
            return (math.pi - self.radius,) if self.radius < math.pi else ()
        return None


@dataclass(frozen=True, eq=False)
class Tube(Region):
    axis: np.ndarray
    halfwidth: float

    def __post_init__(self):
        if not 0.0 < self.halfwidth < math.pi / 2:
            raise ValueError("tube halfwidth must lie in (0, pi/2)")
        object.__setattr__(self, "axis", unit(self.axis))

    def contains(self, pts):
        return tube_distance(pts, self.axis) <= self.halfwidth

    def rotate(self, R):
        return Tube(R @ self.axis, self.halfwidth)

    def min_scale(self):
        return self.halfwidth

    def axial_breaks(self):
        if abs(abs(self.axis[2]) - 1.0) < 1e-15:
            return (math.pi / 2 - self.halfwidth, math.pi / 2 + self.halfwidth)
        return None


@dataclass(frozen=True, eq=False)
class Band(Region):
    """Colatitude band ``theta1 <= theta <= theta2`` about ``axis``."""

    theta1: float
    theta2: float
    axis: np.ndarray = field(default_factory=lambda: NORTH.copy())

    def __post_init__(self):
        if not 0.0 <= self.theta1 < self.theta2 <= math.pi:
            raise ValueError("band needs 0 <= theta1 < theta2 <= pi")
        object.__setattr__(self, "axis", unit(self.axis))

    def contains(self, pts):
        d = geodesic_distance(pts, self.axis)
        return (d >= self.theta1) & (d <= self.theta2)

    def rotate(self, R):
        return Band(self.theta1, self.theta2, R @ self.axis)

    def min_scale(self):
        return 0.5 * (self.theta2 - self.theta1)

    def axial_breaks(self):
        if np.allclose(self.axis, NORTH, atol=1e-15):
            return tuple(b for b in (self.theta1, self.theta2) if 0.0 < b < math.pi)
        return None


@dataclass(frozen=True, eq=False)
class Complement(Region):
    inner: Region

    def contains(self, pts):
        return ~self.inner.contains(pts)

    def rotate(self, R):
        return Complement(self.inner.rotate(R))

    def min_scale(self):
        return self.inner.min_scale()

    def axial_breaks(self):
        return self.inner.axial_breaks()


@dataclass(frozen=True, eq=False)
class Union(Region):
    a: Region
    b: Region

    def contains(self, pts):
        return self.a.contains(pts) | self.b.contains(pts)

    def rotate(self, R):
        return Union(self.a.rotate(R), self.b.rotate(R))

    def min_scale(self):
        return min(self.a.min_scale(), self.b.min_scale())

    def axial_breaks(self):
        ba, bb = self.a.axial_breaks(), self.b.axial_breaks()
        if ba is None or bb is None:
            return None
        return tuple(sorted(set(ba) | set(bb)))


@dataclass(frozen=True, eq=False)
class Intersection(Union):
    def contains(self, pts):
        return self.a.contains(pts) & self.b.contains(pts)

    def rotate(self, R):
        return Intersection(self.a.rotate(R), self.b.rotate(R))


# -- measures ----------------------------------------------------------------------------


@dataclass(eq=False)
class Measure:
    """Density (per grid node, multiplying the quadrature weight) plus atoms."""

    grid: QuadratureGrid
    density: np.ndarray
    atoms: list = field(default_factory=list)

    def __post_init__(self):
        self.density = np.asarray(self.density, dtype=float).reshape(self.grid.size)
        if np.any(self.density < 0):
            raise ValueError("measure density must be nonnegative")
        self.atoms = [(unit(p), float(m)) for p, m in self.atoms]
        if any(m < 0 for _, m in self.atoms):
            raise ValueError("atom masses must be nonnegative")

    @property
    def atom_points(self):
        if not self.atoms:
            return np.zeros((0, 3))
        return np.array([p for p, _ in self.atoms])

    @property
    def atom_masses(self):
        return np.array([m for _, m in self.atoms], dtype=float)

    def total_mass(self):
        return float(np.sum(self.density * self.grid.weights) + self.atom_masses.sum())

    def scaled(self, c):
        return Measure(self.grid, c * self.density, [(p, c * m) for p, m in self.atoms])

    def __add__(self, other):
        if other.grid is not self.grid:
            raise ValueError("measures live on different grids")
        return Measure(self.grid, self.density + other.density, self.atoms + other.atoms)

    def with_atom(self, p, mass):
        return Measure(self.grid, self.density, self.atoms + [(p, mass)])

    def is_axisymmetric(self):
        """True when the density is constant along every grid latitude and there are no atoms."""
        if self.atoms:
            return False
        d = self.density.reshape(self.grid.shape)
        return bool(np.all(d == d[:, :1]))


def lebesgue(grid):
    return Measure(grid, np.ones(grid.size))


def region_indicator(spec, grid):
    """``1_A dV`` sampled pointwise (closed regions, no partial cells)."""
    return Measure(grid, spec.contains(grid.nodes).astype(float))


# -- density conditions --------------------------------------------------------------


class Condition(enum.Enum):
    REL_DENSE = "dense"
    REL_SPARSE = "sparse"
    SYM_DENSE = "symdense"
    TGCC = "tgcc"
    TUBE_SPARSE = "tube"

    @property
    def is_lower_bound(self):
        return self in (Condition.REL_DENSE, Condition.SYM_DENSE, Condition.TGCC)

    @property
    def uses_tubes(self):
        return self in (Condition.TGCC, Condition.TUBE_SPARSE)


@dataclass
class DensityReport:
    condition: Condition
    lam: float
    r: float
    worst_ratio: float
    witness: np.ndarray
    n_centers: int
    reliable: bool
    scale: float

    def as_row(self):
        th, ph = cart2sph(self.witness)
        return {
            "condition": self.condition.value,
            "lambda": self.lam,
            "r": self.r,
            "scale": self.scale,
            "worst_ratio": self.worst_ratio,
            "witness_theta": float(th),
            "witness_phi": float(ph),
            "n_centers": self.n_centers,
            "reliable": self.reliable,
        }


def _local_ball_rule(s, n_r, n_a):
    x, w = gauss_legendre_nodes(n_r)
    a, b = math.cos(s), 1.0
    t = 0.5 * (b - a) * x + 0.5 * (b + a)
    rho = np.arccos(t)
    ang = 2.0 * math.pi * (np.arange(n_a) + 0.5) / n_a
    pts = sph2cart(np.repeat(rho, n_a), np.tile(ang, n_r))
    wts = np.repeat(0.5 * (b - a) * w * 2.0 * math.pi / n_a, n_a)
    return pts, wts


def _local_tube_rule(wdt, n_w, n_a):
    x, w = gauss_legendre_nodes(n_w)
    h = math.sin(wdt)
    t = h * x
    th = np.arccos(t)
    ang = 2.0 * math.pi * (np.arange(n_a) + 0.5) / n_a
    pts = sph2cart(np.repeat(th, n_a), np.tile(ang, n_w))
    wts = np.repeat(h * w * 2.0 * math.pi / n_a, n_a)
    return pts, wts


def _region_ball_fraction(region, centers, s, frame, resolution, chunk=512):
    n_r, n_a = resolution
    loc, wts = _local_ball_rule(s, n_r, n_a)
    vol = wts.sum()
    out = np.empty(len(centers))
    for i0 in range(0, len(centers), chunk):
        cs = centers[i0 : i0 + chunk]
        frames = np.array([frame @ rotation_to(frame.T @ c) for c in cs])
        pts = np.einsum("cij,pj->cpi", frames, loc)
        inside = region.contains(pts)
        out[i0 : i0 + chunk] = inside.astype(float) @ wts / vol
    return out


def _region_tube_fraction(region, axes, w, frame, resolution, chunk=128):
    n_w, n_a = resolution
    loc, wts = _local_tube_rule(w, n_w, n_a)
    vol = wts.sum()
    out = np.empty(len(axes))
    for i0 in range(0, len(axes), chunk):
        ax = axes[i0 : i0 + chunk]
        frames = np.array([frame @ rotation_to(frame.T @ a) for a in ax])
        pts = np.einsum("cij,pj->cpi", frames, loc)
        out[i0 : i0 + chunk] = region.contains(pts).astype(float) @ wts / vol
    return out


def _measure_ball_mass(measure, centers, s):
    chord = 2.0 * math.sin(s / 2.0) * (1.0 + 1e-13)
    nodes = measure.grid.nodes
    wd = measure.density * measure.grid.weights
    keep = wd > 0
    tree = cKDTree(nodes[keep])
    wk = wd[keep]
    mass = np.zeros(len(centers))
    hits = tree.query_ball_point(centers, chord)
    for i, idx in enumerate(hits):
        if idx:
            sel = np.array(idx)
            d = geodesic_distance(nodes[keep][sel], centers[i])
            mass[i] = wk[sel][d <= s].sum()
    if measure.atoms:
        ap, am = measure.atom_points, measure.atom_masses
        d = geodesic_distance(centers[:, None, :], ap[None, :, :])
        mass += (d <= s).astype(float) @ am
    return mass


def _measure_tube_mass(measure, axes, w, chunk=256):
    nodes = measure.grid.nodes
    wd = measure.density * measure.grid.weights
    keep = wd > 0
    nk, wk = nodes[keep], wd[keep]
    sw = math.sin(w)
    mass = np.zeros(len(axes))
    for i0 in range(0, len(axes), chunk):
        ax = axes[i0 : i0 + chunk]
        mass[i0 : i0 + chunk] = (np.abs(nk @ ax.T) <= sw).T.astype(float) @ wk
    if measure.atoms:
        ap, am = measure.atom_points, measure.atom_masses
        mass += (np.abs(axes @ ap.T) <= sw).astype(float) @ am
    return mass


def density_report(
    target,
    condition,
    lam,
    r,
    centers=None,
    frame=None,
    resolution=None,
    max_centers=400_000,
):
    """Worst sampled ratio ``mass(ball or tube) / vol(ball or tube)``.

    Balls have radius ``r/lam``; tubes (TGCC, tube-sparse) have halfwidth
    ``r * lam**-0.5``.  ``centers`` may be an int (Fibonacci lattice size),
    an explicit ``(n, 3)`` array, or None for a lattice with spacing a
    quarter of the radius.  Region targets use a local quadrature inside
    each ball/tube; measure targets sum their grid nodes and atoms.
    """
    condition = Condition(condition) if not isinstance(condition, Condition) else condition
    if lam < 1 or r <= 0:
        raise ValueError("density_report needs lam >= 1 and r > 0")
    frame = np.eye(3) if frame is None else np.asarray(frame, dtype=float)
    tubes = condition.uses_tubes
    scale = r / math.sqrt(lam) if tubes else r / lam
    if tubes and scale >= math.pi / 2:
        raise ValueError("tube halfwidth must be < pi/2")
    scale = min(scale, math.pi)
    explicit = centers is not None and not isinstance(centers, (int, np.integer))
    if explicit:
        pts = unit(np.atleast_2d(centers))
        reliable = False
    else:
        if centers is None:
            n = int(math.ceil(FOUR_PI / (scale / 4.0) ** 2))
            if n > max_centers:
                raise SamplingError(
                    f"lattice at spacing {scale / 4:.3g} needs {n} centers; pass explicit centers"
                )
        else:
            n = int(centers)
        if lattice_spacing(n) > scale:
            raise SamplingError("center lattice spacing exceeds the ball/tube radius")
        pts = fibonacci_sphere(n) @ frame.T
        if tubes:
            # axes +a and -a give the same great circle
            pts = pts[(pts @ frame[:, 2]) >= 0.0]
        reliable = lattice_spacing(n) <= scale / 4.0

    if isinstance(target, Region):
        if tubes:
            res = resolution or (16, 512)
            ratio = _region_tube_fraction(target, pts, scale, frame, res)
        else:
            res = resolution or (16, 32)
            ratio = _region_ball_fraction(target, pts, scale, frame, res)
            if condition is Condition.SYM_DENSE:
                ratio = ratio + _region_ball_fraction(target, -pts, scale, frame, res)
    else:
        if tubes:
            ratio = _measure_tube_mass(target, pts, scale) / vol_tube(scale)
        else:
            ratio = _measure_ball_mass(target, pts, scale) / vol_ball(scale)
            if condition is Condition.SYM_DENSE:
                ratio = ratio + _measure_ball_mass(target, -pts, scale) / vol_ball(scale)

    i = int(np.argmin(ratio)) if condition.is_lower_bound else int(np.argmax(ratio))
    return DensityReport(
        condition=condition,
        lam=float(lam),
        r=float(r),
        worst_ratio=float(ratio[i]),
        witness=pts[i],
        n_centers=len(pts),
        reliable=reliable,
        scale=scale,
    )


def density_curve(target, condition, lam, r_list, **kw):
    """Full ``r -> worst_ratio`` curve at one frequency."""
    return [density_report(target, condition, lam, r, **kw) for r in r_list]
