"""Named experiments: each returns tables (CSV rows) and declared checks.

Every check records a short claim (``anchor``), the expected exponent or
bound, the measured value, the tolerance and a pass flag.  Outputs are
deterministic: fixed seeds, fixed iteration order, floats written with 17
significant digits.
"""

import csv
import json
import math
import os
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from lslab import geom, interval1d, kernels
from lslab.extremal import carleson_constant_2, exact_grid, ls_constant_2, ratio_p
from lslab.geom import NORTH, SOUTH, Cap, Complement, Condition, Union, density_report, make_grid
from lslab.rng import SplitMix64
from lslab.specfun import gauss_legendre_nodes, wallis_l2n
from lslab.spectrum import (
    band_basis,
    band_limit_degree,
    basis_matrix,
    beam,
    eigenfrequency,
    eigenspace_basis,
    evaluate,
    evaluate_at,
    gradient_norm_samples,
    harmonic_extension,
    lp_norm,
    random_band_function,
    zonal,
    zonal_closed_form,
)

DEGREES = (16, 32, 64, 128, 256)


class ConfigError(ValueError):
    pass


# -- slope fits ----------------------------------------------------------------------------


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r_squared: float
    n_points: int


def slope_fit(xs, ys):
    """Ordinary least squares of ``log y`` on ``log x``."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size != y.size or x.size < 3:
        raise ValueError("slope_fit needs at least 3 matching points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("slope_fit needs positive inputs")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, min(1.0, 1.0 - float(np.sum(resid**2)) / ss_tot))
    return SlopeFit(float(slope), float(intercept), r2, int(x.size))


# -- results -------------------------------------------------------------------------------


@dataclass
class Check:
    name: str
    anchor: str
    expected: str
    measured: float
    tolerance: str
    passed: bool

    def as_dict(self):
        return {
            "name": self.name,
            "anchor": self.anchor,
            "expected": self.expected,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "pass": bool(self.passed),
        }


@dataclass
class ExperimentResult:
    name: str
    tables: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    fits: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def check(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def summary(self):
        return {
            "experiment": self.name,
            "pass": self.passed,
            "checks": [c.as_dict() for c in self.checks],
            "fits": {k: asdict(v) for k, v in self.fits.items()},
        }


def _slope_check(name, anchor, fit, expected, tol):
    return Check(name, anchor, f"slope {expected:.6g}", fit.slope, f"+-{tol:g}", abs(fit.slope - expected) <= tol)


def _upper_check(name, anchor, measured, bound, what="value"):
    return Check(name, anchor, f"{what} <= {bound:.6g}", float(measured), "none", bool(measured <= bound))


def _lower_check(name, anchor, measured, bound, what="value"):
    return Check(name, anchor, f"{what} >= {bound:.6g}", float(measured), "none", bool(measured >= bound))


def _spread(values):
    v = np.asarray(values, dtype=float)
    return float(v.max() / v.min())


def format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_table(rows, path):
    with open(path, "w", newline="") as fh:
        if not rows:
            return
        w = csv.writer(fh, lineterminator="\n")
        keys = list(rows[0].keys())
        w.writerow(keys)
        for r in rows:
            w.writerow([format_value(r[k]) for k in keys])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else str(obj)
    return obj


def write_result(result, out_dir):
    """``<name>__<table>.csv`` per table plus ``<name>__summary.json``."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for table, rows in result.tables.items():
        path = os.path.join(out_dir, f"{result.name}__{table}.csv")
        write_table(rows, path)
        paths.append(path)
    path = os.path.join(out_dir, f"{result.name}__summary.json")
    with open(path, "w") as fh:
        json.dump(_jsonable(result.summary()), fh, indent=2)
        fh.write("\n")
    paths.append(path)
    return paths


# -- configuration -------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    name: str = ""
    lambdas: list = None
    degrees: list = None
    p: list = None
    t: list = None
    angles: list = None
    region: str = None
    measure: str = None
    seed: int = 0
    oversample: int = 2
    n_funcs: int = None
    out: str = None

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        for key in ("lambdas", "degrees", "p", "t", "angles"):
            if key in d and not isinstance(d[key], list):
                raise ConfigError(f"{key} must be a list")
        if "seed" in d and not isinstance(d["seed"], int):
            raise ConfigError("seed must be an integer")
        return cls(**d)

    @classmethod
    def from_toml(cls, path):
        import tomli

        with open(path, "rb") as fh:
            return cls.from_dict(tomli.load(fh))

    def get(self, key, default):
        v = getattr(self, key)
        return default if v is None else v


def _p_value(p):
    return math.inf if (isinstance(p, str) and p in ("inf", "infinity")) else float(p)


# -- grids for axisymmetric integrands -----------------------------------------------------


def _axial_grid(n, p, breaks=(), oversample=2):
    """Colatitude rule for integrands depending on theta only: ``|P_n|^p`` is
    a polynomial of degree ``p n`` for even ``p``; odd ``p`` is oversampled."""
    n_theta = max(oversample * (n + 2), int(math.ceil(p * n / 2.0)) + 2)
    return make_grid(n_theta, 8, breaks)


def _two_caps(R):
    return Complement(Union(Cap(NORTH, R), Cap(SOUTH, R)))


# -- sphere experiments --------------------------------------------------------------------


def exp_zonal_norms(cfg):
    degrees = cfg.get("degrees", list(DEGREES))
    ps = [_p_value(p) for p in cfg.get("p", [2, 3, 4, 6, 8])]
    res = ExperimentResult("zonal-norms")
    rows, norms = [], {p: [] for p in ps}
    l2_err = 0.0
    for n in degrees:
        Z = zonal(n, NORTH)
        lam = eigenfrequency(n)
        for p in ps:
            g = _axial_grid(n, p, oversample=cfg.oversample)
            v = lp_norm(Z, p, geom.lebesgue(g), values=evaluate(Z, g))
            norms[p].append(v)
            rows.append({"n": n, "lambda_n": lam, "p": p, "norm": v})
            if p == 2:
                l2_err = max(l2_err, abs(v - math.sqrt((2 * n + 1) / (4 * math.pi) / lam)))
    res.tables["norms"] = rows
    lams = [eigenfrequency(n) for n in degrees]
    anchor = "zonal L^p norms: bounded below the critical exponent 4, growth exponent 1/2 - 2/p above it"
    for p in ps:
        fit = slope_fit(lams, norms[p])
        res.fits[f"p={p:g}"] = fit
        if p < 4:
            res.checks.append(_slope_check(f"slope_p{p:g}", anchor, fit, 0.0, 0.05))
        elif p > 4 and math.isfinite(p):
            res.checks.append(_slope_check(f"slope_p{p:g}", anchor, fit, 0.5 - 2.0 / p, 0.05))
    if 4.0 in ps:
        kink = [v**4 / math.log(n) for v, n in zip(norms[4.0], degrees)]
        for row, k in zip([r for r in rows if r["p"] == 4.0], kink):
            row["norm4_over_log"] = k
        res.checks.append(
            _upper_check("p4_log_kink", "at p = 4 the fourth power grows like log(lambda)", _spread(kink), 3.0, "max/min of ||Z||_4^4/log n")
        )
    if 2.0 in ps:
        res.checks.append(_upper_check("l2_closed_form", "reproducing-kernel identity for the zonal L^2 norm", l2_err, 1e-10, "abs error"))
    return res


def exp_beam_norms(cfg):
    degrees = cfg.get("degrees", list(DEGREES))
    ps = [_p_value(p) for p in cfg.get("p", [2, 4, 6, 8])]
    res = ExperimentResult("beam-norms")
    rows, norms = [], {p: [] for p in ps}
    l2_err, closed_err, tube_min = 0.0, 0.0, math.inf
    for n in degrees:
        G = beam(n, NORTH)
        lam = eigenfrequency(n)
        for p in ps:
            g = _axial_grid(n, p, oversample=cfg.oversample)
            v = lp_norm(G, p, geom.lebesgue(g), values=evaluate(G, g))
            norms[p].append(v)
            row = {"n": n, "lambda_n": lam, "p": p, "norm": v}
            if p == 2:
                l2_err = max(l2_err, abs(v - 1.0))
            if math.isfinite(p) and p % 2 == 0:
                exact = (wallis_l2n(int(n * p / 2)) / wallis_l2n(n) ** (p / 2)) ** (1.0 / p)
                closed_err = max(closed_err, abs(v / exact - 1.0))
            rows.append(row)
        w = 3.0 / math.sqrt(n)
        tube = geom.Tube(NORTH, w)
        g = exact_grid(n, tube)
        mass = ratio_p(G, geom.region_indicator(tube, g), 2)
        tube_min = min(tube_min, mass)
        rows.append({"n": n, "lambda_n": lam, "p": "tube_mass_2", "norm": mass})
    res.tables["norms"] = rows
    lams = [eigenfrequency(n) for n in degrees]
    anchor = "Gaussian beam L^p norms grow with exponent (1/2)(1/2 - 1/p)"
    for p in ps:
        if not math.isfinite(p):
            continue
        fit = slope_fit(lams, norms[p])
        res.fits[f"p={p:g}"] = fit
        res.checks.append(_slope_check(f"slope_p{p:g}", anchor, fit, 0.5 * (0.5 - 1.0 / p), 0.05))
    res.checks.append(_upper_check("l2_normalised", "beam is L^2-normalised", l2_err, 1e-10, "max |norm - 1|"))
    res.checks.append(_upper_check("closed_form", "beam norms match the Wallis closed form", closed_err, 1e-8, "max rel error"))
    res.checks.append(_lower_check("tube_mass", "beam mass concentrates in the 3/sqrt(n) tube", tube_min, 0.99, "min mass fraction"))
    return res


def exp_zonal_decay(cfg):
    degrees = cfg.get("degrees", list(DEGREES))
    res = ExperimentResult("zonal-decay")
    rows, prof = [], []
    for n in degrees:
        lam = eigenfrequency(n)
        d = np.linspace(1.0 / lam, 0.75 * math.pi, 4001)
        pts = geom.sph2cart(d, np.zeros_like(d))
        Z = np.abs(zonal_closed_form(n, NORTH, pts))
        v = Z * np.sqrt(1.0 + lam * d) / lam
        i = int(np.argmax(v))
        prof.append(float(v[i]))
        rows.append({"n": n, "lambda_n": lam, "sup_profile": float(v[i]), "argmax_distance": float(d[i])})
    res.tables["profile"] = rows
    res.fits["profile"] = slope_fit([eigenfrequency(n) for n in degrees], prof)
    res.checks.append(
        _upper_check(
            "bounded",
            "|Z| (1 + lambda d)^{1/2} / lambda stays bounded for 1/lambda <= d <= 3 pi/4",
            max(prof) / prof[0],
            2.0,
            "sweep max / first value",
        )
    )
    return res


def exp_ls2_cap_complement(cfg):
    lambdas = cfg.get("lambdas", [16, 20, 24, 28, 32])
    res = ExperimentResult("ls2-cap-complement")
    rows = []
    vals = {"c/lambda": [], "c*lambda^-1/2": []}
    for lam in lambdas:
        basis = band_basis(lam)
        for rule, R in (("c/lambda", 2.0 / lam), ("c*lambda^-1/2", 2.0 / math.sqrt(lam))):
            v = ls_constant_2(Complement(Cap(NORTH, R)), basis).value
            vals[rule].append(v)
            rows.append({"lambda": float(lam), "rule": rule, "radius": R, "ls2": v})
    res.tables["ls2"] = rows
    dense, sparse = vals["c/lambda"], vals["c*lambda^-1/2"]
    res.checks.append(
        _lower_check("dense_bounded_below", "removing balls of radius c/lambda keeps a uniform constant", min(dense) / dense[0], 0.5, "min / first")
    )
    mono = all(b < a for a, b in zip(sparse, sparse[1:]))
    res.checks.append(
        Check("sparse_monotone", "removing caps of radius c lambda^-1/2 destroys the constant", "strictly decreasing", float(mono), "none", mono)
    )
    res.checks.append(_lower_check("sparse_decay", "constant decays from the first to the last frequency", sparse[0] / sparse[-1], 3.0, "first / last"))
    return res


def _symdense_centers(xi, n=4000):
    return np.vstack([xi[None, :], geom.fibonacci_sphere(n)])


def exp_ls_eigen_smallp(cfg):
    degrees = cfg.get("degrees", list(DEGREES))
    res = ExperimentResult("ls-eigen-smallp")
    rows = []
    for n in degrees:
        lam = eigenfrequency(n)
        R = lam**-0.5 / math.log(lam)
        A = _two_caps(R)
        ls = ls_constant_2(A, eigenspace_basis(n)).value
        rep = density_report(A, Condition.SYM_DENSE, lam, 1.0, centers=_symdense_centers(NORTH))
        g = exact_grid(n, A)
        zr = ratio_p(zonal(n, NORTH), geom.region_indicator(A, g), 2)
        rows.append({"n": n, "lambda_n": lam, "radius": R, "ls2": ls, "symdense_ratio": rep.worst_ratio, "zonal_ratio_2": zr})
    res.tables["ls2"] = rows
    anchor = "eigenspaces keep an L^2 constant on sets that fail symmetric density"
    res.checks.append(_lower_check("ls2_last", anchor, rows[-1]["ls2"], 0.9, f"ls2 at n={degrees[-1]}"))
    res.checks.append(_upper_check("symdense_fails", anchor, max(r["symdense_ratio"] for r in rows), 0.1, "max symdense ratio"))
    big = [r["zonal_ratio_2"] for r in rows if r["n"] >= 64]
    if big:
        res.checks.append(_upper_check("zonal_ratio", "zonal functions keep their L^2 mass", max(abs(1 - v) for v in big), 0.05, "max |1 - ratio|"))
    return res


def exp_ls_eigen_largep(cfg):
    degrees = cfg.get("degrees", list(DEGREES))
    p = _p_value(cfg.get("p", [6])[0])
    res = ExperimentResult("ls-eigen-largep")
    rows = []
    for n in degrees:
        lam = eigenfrequency(n)
        R = lam ** (-1.0 / 3.0)
        A = _two_caps(R)
        g = _axial_grid(n, p, A.axial_breaks(), cfg.oversample)
        r = ratio_p(zonal(n, NORTH), geom.region_indicator(A, g), p)
        rep = density_report(A, Condition.SYM_DENSE, lam, 1.0, centers=_symdense_centers(NORTH))
        rows.append({"n": n, "lambda_n": lam, "radius": R, "p": p, "ratio_p": r, "symdense_ratio": rep.worst_ratio})
    res.tables["ratios"] = rows
    fit = slope_fit([r["lambda_n"] for r in rows], [r["ratio_p"] for r in rows])
    res.fits["ratio_p"] = fit
    res.checks.append(
        _upper_check("decay", "above the critical exponent, zonal mass escapes sets failing symmetric density", fit.slope, -0.5, "slope")
    )
    res.checks.append(_upper_check("symdense_fails", "the cap family fails symmetric density", max(r["symdense_ratio"] for r in rows), 0.0, "max ratio"))
    return res


def _ball_measure(lam, c, nmax):
    ball = Cap(NORTH, 1.0 / lam)
    g = exact_grid(nmax, ball)
    return geom.region_indicator(ball, g).scaled(c)


def exp_carleson_dichotomy(cfg):
    lambdas = cfg.get("lambdas", [16, 32, 64, 128, 256])
    band_lambdas = [lam for lam in lambdas if lam <= 128]
    res = ExperimentResult("carleson-dichotomy")
    rows = []
    eig, band = [], []
    for lam in lambdas:
        n = band_limit_degree(lam)
        v = carleson_constant_2(_ball_measure(lam, math.log(lam), n), eigenspace_basis(n)).value
        eig.append(v)
        rows.append({"lambda": float(lam), "space": f"eig:{n}", "carleson2": v})
    for lam in band_lambdas:
        b = band_basis(lam)
        v = carleson_constant_2(_ball_measure(lam, math.log(lam), b.nmax), b).value
        band.append(v)
        rows.append({"lambda": float(lam), "space": f"band:{lam:g}", "carleson2": v})
    res.tables["carleson2"] = rows
    fit = slope_fit(lambdas, eig)
    res.fits["eigenspace"] = fit
    res.checks.append(
        _upper_check("eigenspace_decreasing", "log(lambda)-weighted balls: eigenspace constants vanish", fit.slope, -0.3, "slope (-0.5 +- 0.2)")
    )
    nondec = all(b >= a for a, b in zip(band, band[1:]))
    res.checks.append(
        Check("band_nondecreasing", "log(lambda)-weighted balls: band constants grow", "nondecreasing", float(nondec), "none", nondec)
    )
    return res


def exp_carleson_largep(cfg):
    degrees = cfg.get("degrees", list(DEGREES))
    p = _p_value(cfg.get("p", [6])[0])
    res = ExperimentResult("carleson-largep")
    rows = []
    for n in degrees:
        lam = eigenfrequency(n)
        ball = Cap(NORTH, 1.0 / lam)
        g = _axial_grid(n, p, ball.axial_breaks(), cfg.oversample)
        mu = geom.region_indicator(ball, g).scaled(lam**2)
        r = ratio_p(zonal(n, NORTH), mu, p)
        rep = density_report(mu, Condition.REL_SPARSE, lam, 1.0, centers=NORTH[None, :])
        rows.append({"n": n, "lambda_n": lam, "p": p, "ratio_p": r, "sparse_ratio": rep.worst_ratio})
    res.tables["ratios"] = rows
    fit = slope_fit([r["lambda_n"] for r in rows], [r["ratio_p"] for r in rows])
    res.fits["ratio_p"] = fit
    res.checks.append(
        _lower_check("growth", "above the critical exponent, non-sparse ball measures blow up on zonal functions", fit.slope, 0.5, "slope")
    )
    return res


def checkerboard():
    """``{x y z >= 0}``: the union of the four octants with an even number of negative signs."""
    def octant(sx, sy, sz):
        caps = [Cap(s * e, math.pi / 2) for s, e in zip((sx, sy, sz), np.eye(3))]
        return geom.Intersection(caps[0], geom.Intersection(caps[1], caps[2]))

    o = [octant(1, 1, 1), octant(1, -1, -1), octant(-1, 1, -1), octant(-1, -1, 1)]
    return Union(Union(o[0], o[1]), Union(o[2], o[3]))


def beam_axes():
    return np.vstack([np.eye(3), geom.fibonacci_sphere(5)])


def exp_tgcc_beam(cfg):
    degrees = cfg.get("degrees", [64, 256])
    res = ExperimentResult("tgcc-beam")
    sets = {"hemisphere": Cap(NORTH, math.pi / 2), "checkerboard": checkerboard()}
    rows, trows = [], []
    for name, A in sets.items():
        rep = density_report(A, Condition.TGCC, 64, 1.0, resolution=(8, 256))
        trows.append({"set": name, "lambda": 64.0, "r": 1.0, "tgcc_ratio": rep.worst_ratio, "n_axes": rep.n_centers})
        for n in degrees:
            for j, axis in enumerate(beam_axes()):
                G = beam(n, axis)
                g = exact_grid(n, frame=G.frame)
                r = ratio_p(G, geom.region_indicator(A, g), 2)
                rows.append({"set": name, "n": n, "axis": j, "ratio_2": r})
    res.tables["beam_ratios"] = rows
    res.tables["tgcc"] = trows
    for t in trows:
        res.checks.append(_lower_check(f"tgcc_{t['set']}", "test set satisfies the tube condition with rho = 1/2", t["tgcc_ratio"], 0.45, "tube ratio"))
    res.checks.append(
        _lower_check("beam_retention", "sets satisfying the tube condition retain beam mass", min(r["ratio_2"] for r in rows), 0.2, "min ratio_2")
    )

    nrows = []
    for n in cfg.get("lambdas", list(DEGREES)):
        lam = eigenfrequency(n)
        mu = _ball_measure(lam, lam**1.5, n)
        v = carleson_constant_2(mu, eigenspace_basis(n)).value
        rep = density_report(mu, Condition.TUBE_SPARSE, lam, 1.0)
        nrows.append({"n": n, "lambda_n": lam, "carleson2": v, "tube_ratio": rep.worst_ratio, "reliable": rep.reliable})
    res.tables["non_sufficiency"] = nrows
    fit = slope_fit([r["lambda_n"] for r in nrows], [r["carleson2"] for r in nrows])
    res.fits["non_sufficiency"] = fit
    anchor = "a lambda^{3/2}-weighted ball satisfies the tube condition yet is not Carleson on eigenspaces"
    res.checks.append(_upper_check("tube_condition", anchor, max(r["tube_ratio"] for r in nrows), 2.0, "max tube ratio"))
    res.checks.append(_slope_check("carleson_growth", anchor, fit, 0.5, 0.1))
    return res


def exp_weyl(cfg):
    lambdas = cfg.get("lambdas", list(np.arange(10.0, 100.0 + 1e-9, 0.5)))
    res = ExperimentResult("weyl")
    pts = geom.unit(SplitMix64(cfg.seed).normal(9).reshape(3, 3))
    rows, ratios, trace_err = [], [], 0.0
    for lam in lambdas:
        sf = kernels.spectral_function(lam)
        b = band_basis(lam)
        tr = np.sum(np.abs(basis_matrix(b, pts)) ** 2, axis=1)
        trace_err = max(trace_err, float(np.max(np.abs(tr - sf))))
        ratios.append(kernels.weyl_ratio(lam))
        rows.append({"lambda": float(lam), "N": b.nmax, "spectral_function": sf, "weyl_ratio": ratios[-1], "trace_at_x": float(tr[0])})
    res.tables["weyl"] = rows
    anchor = "spectral function is two-sided comparable to the Weyl term lambda^2/(4 pi)"
    res.checks.append(_lower_check("weyl_lower", anchor, min(ratios), 0.8, "min ratio"))
    res.checks.append(_upper_check("weyl_upper", anchor, max(ratios), 1.25, "max ratio"))
    res.checks.append(_upper_check("trace", "closed form (N+1)^2/(4 pi) equals the basis trace", trace_err, 1e-9, "max abs error"))
    return res


def _fd_gradient_error(t, dists, h=1e-5):
    worst = 0.0
    for d in dists:
        fd = (kernels.heat_kernel_cos(t, math.cos(d + h)) - kernels.heat_kernel_cos(t, math.cos(d - h))) / (2 * h)
        an = kernels.heat_kernel_gradient(t, d)
        worst = max(worst, abs(abs(fd) - an) / an)
    return worst


def exp_heat_gaussian(cfg):
    ts = cfg.get("t", list(np.geomspace(1e-3, 1.0, 13)))
    res = ExperimentResult("heat-gaussian")
    prof = kernels.gaussian_bound_profile(ts)
    res.tables["profile"] = prof
    sup = [r["sup_profile"] for r in prof]
    res.checks.append(
        _upper_check("gaussian_uniform", "heat kernel obeys a uniform Gaussian upper bound with c = 1/5", _spread(sup), 10.0, "max/min profile")
    )
    cons, diag_ok, drows = 0.0, True, []
    for t in (1e-3, 1e-2, 1e-1):
        N = kernels.truncation_degree(t)
        g = make_grid(N + 2, 8)
        vals = kernels.heat_kernel_cos(t, np.cos(np.repeat(g.theta, g.n_phi)))
        cons = max(cons, abs(g.integrate(vals) - 1.0))
    for t in np.geomspace(1e-3, 0.1, 7):
        v = float(kernels.heat_kernel_cos(t, 1.0)) * t
        lo, hi = 0.9 / (4 * math.pi), 1.2 / (4 * math.pi) * (1 + 10 * t)
        diag_ok &= lo <= v <= hi
        drows.append({"t": float(t), "diag_times_t": v, "lower": lo, "upper": hi})
    res.tables["diagonal"] = drows
    res.checks.append(_upper_check("conservation", "heat semigroup conserves mass", cons, 1e-10, "max abs error"))
    res.checks.append(Check("diagonal_two_sided", "diagonal behaves like 1/(4 pi t)", "t p(t,x,x) in band", float(diag_ok), "none", diag_ok))

    t, s = 0.05, 0.07
    N = max(kernels.truncation_degree(t), kernels.truncation_degree(s))
    g = make_grid(N + 2, 2 * N + 3)
    x, y = geom.point(0.7, 0.3), geom.point(2.1, 4.0)
    w = g.nodes
    lhs = g.integrate(kernels.heat_kernel_cos(t, w @ x) * kernels.heat_kernel_cos(s, w @ y))
    semi = abs(lhs - float(kernels.heat_kernel_cos(t + s, x @ y)))
    res.checks.append(_upper_check("semigroup", "semigroup identity", semi, 1e-8, "abs error"))

    grows = kernels.gradient_bound_profile([1e-2, 1e-1])
    res.tables["gradient"] = grows
    res.checks.append(
        _upper_check("gradient_uniform", "heat kernel gradient obeys a Gaussian bound with t^{-3/2}", _spread([r["sup_profile"] for r in grows]), 20.0, "max/min")
    )
    fd = max(_fd_gradient_error(tt, [0.05, 0.2, 0.6]) for tt in (1e-2, 1e-1))
    res.checks.append(_upper_check("gradient_fd", "analytic gradient matches finite differences", fd, 1e-6, "max rel error"))
    return res


def exp_heat_complex(cfg):
    angles = cfg.get("angles", [-1.0, -0.5, 0.0, 0.5, 1.0])
    ts = cfg.get("t", list(np.geomspace(1e-2, 1.0, 9)))
    res = ExperimentResult("heat-complex")
    rows = kernels.complex_bound_profile(angles, ts)
    res.tables["profile"] = rows
    res.checks.append(
        _upper_check("complex_uniform", "complex-time heat kernel obeys a Gaussian bound", _spread([r["sup_profile"] for r in rows]), 50.0, "max/min")
    )
    d = np.linspace(0, math.pi, 201)
    conj = 0.0
    for a in angles:
        for t in ts:
            z = t * np.exp(1j * a)
            p1 = kernels.heat_kernel_cos(np.conj(z), np.cos(d))
            p2 = np.conj(kernels.heat_kernel_cos(z, np.cos(d)))
            conj = max(conj, float(np.max(np.abs(p1 - p2))))
    res.checks.append(_upper_check("conjugate_symmetry", "p(conj z) = conj p(z)", conj, 1e-12, "max abs error"))
    real = kernels.gaussian_bound_profile(ts)
    zero = [r for r in rows if r["theta_angle"] == 0.0]
    if zero:
        err = max(abs(a["sup_profile"] - b["sup_profile"]) / b["sup_profile"] for a, b in zip(zero, real))
        res.checks.append(_upper_check("real_axis", "zero angle reduces to the real profile", err, 1e-12, "max rel error"))
    return res


def exp_kernel_decay(cfg):
    lambdas = cfg.get("lambdas", [32, 64, 128])
    res = ExperimentResult("kernel-decay")
    psi = kernels.MultiplierSpec.plateau(0.5, 1.0)
    rows = []
    for lam in lambdas:
        full = kernels.decay_profile(psi, lam)
        half = kernels.decay_profile(psi, lam, distances=np.linspace(0.0, math.pi / 2, 4001))
        rows.append({"lambda": float(lam), "range": "sphere", "sup_profile": full["sup_profile"], "argmax_distance": full["argmax_distance"]})
        rows.append({"lambda": float(lam), "range": "hemisphere", "sup_profile": half["sup_profile"], "argmax_distance": half["argmax_distance"]})
    res.tables["profile"] = rows
    sphere = [r["sup_profile"] for r in rows if r["range"] == "sphere"]
    res.checks.append(
        _upper_check("order4_uniform", "smooth multiplier kernels decay like (1 + lambda d)^-4 at scale lambda^2", _spread(sphere), 2.0, "max/min over lambda")
    )
    lam_top = max(lambdas)
    orders = {s.shape: kernels.decay_order(s, lam_top) for s in (psi, kernels.MultiplierSpec.hard())}
    res.tables["decay_order"] = [{"lambda": float(lam_top), "shape": k, "order": v} for k, v in orders.items()]
    res.checks.append(_lower_check("plateau_order", "smooth cutoffs decay fast", orders["plateau"], 3.5, "fitted order"))
    res.checks.append(_upper_check("hard_order", "hard cutoffs decay slowly", orders["hard"], 1.5, "fitted order"))
    diag = []
    for lam in (16, 32, 64, 128):
        k0 = float(kernels.multiplier_kernel_cos(psi, lam, 1.0))
        kpi = float(kernels.multiplier_kernel_cos(psi, lam, -1.0))
        diag.append({"lambda": float(lam), "diag": k0, "antipode": kpi, "lower": lam**2 / (8 * math.pi), "upper": lam**2 / (2 * math.pi)})
    res.tables["diagonal"] = diag
    ok = all(0.9 * r["lower"] <= r["diag"] <= r["upper"] and abs(r["antipode"]) <= r["diag"] for r in diag)
    res.checks.append(Check("diagonal", "multiplier kernel diagonal is comparable to lambda^2", "in [0.9 lam^2/(8pi), lam^2/(2pi)]", float(ok), "none", ok))
    return res


def exp_bernstein(cfg):
    lambdas = cfg.get("lambdas", [16, 32, 64, 128])
    ps = [_p_value(p) for p in cfg.get("p", [1, 2, "inf"])]
    n_funcs = cfg.get("n_funcs", 20)
    res = ExperimentResult("bernstein")
    rows = []
    per = {p: [] for p in ps}
    for lam in lambdas:
        b = band_basis(lam)
        g = exact_grid(b.nmax, oversample=cfg.oversample)
        leb = geom.lebesgue(g)
        worst = {p: 0.0 for p in ps}
        for i in range(n_funcs):
            f = random_band_function(lam, cfg.seed + i, b)
            v = evaluate(f, g)
            dv = gradient_norm_samples(f, g)
            for p in ps:
                r = lp_norm(f, p, leb, values=dv) / (lam * lp_norm(f, p, leb, values=v))
                worst[p] = max(worst[p], r)
        for p in ps:
            per[p].append(worst[p])
            rows.append({"lambda": float(lam), "p": p, "max_ratio": worst[p]})
    res.tables["ratios"] = rows
    for p in ps:
        res.checks.append(
            _upper_check(f"uniform_p{p:g}", "Bernstein: ||grad f||_p <= C lambda ||f||_p", _spread(per[p]), 3.0, "max/min over lambda")
        )
    return res


def exp_meanvalue(cfg):
    lambdas = cfg.get("lambdas", [16, 32])
    n_funcs = cfg.get("n_funcs", 20)
    r = 1.0
    res = ExperimentResult("meanvalue")
    x, w = gauss_legendre_nodes(12)
    rows, per = [], []
    for lam in lambdas:
        s = r / lam
        pts, wts = geom._local_ball_rule(s, 12, 32)
        tn, tw = s * x, s * w
        worst = 0.0
        for i in range(n_funcs):
            f = random_band_function(lam, cfg.seed + i)
            center = abs(complex(evaluate_at(f, NORTH[None, :])[0])) ** 2
            integral = 0.0
            for tj, wj in zip(tn, tw):
                h = evaluate_at(harmonic_extension(f, tj), pts)
                integral += wj * float(np.sum(wts * np.abs(h) ** 2))
            ratio = center / ((lam / r) ** 3 * integral)
            worst = max(worst, ratio)
            rows.append({"lambda": float(lam), "seed": cfg.seed + i, "ratio": ratio})
        per.append(worst)
    res.tables["ratios"] = rows
    anchor = "mean-value inequality for the harmonic extension"
    res.checks.append(_upper_check("envelope", anchor, max(per), 200.0, "max ratio"))
    res.checks.append(_upper_check("stable", anchor, _spread(per), 3.0, "max/min over lambda"))
    return res


def exp_boundary_1d(cfg):
    lambdas = cfg.get("lambdas", [8, 16, 32, 64, 128, 256])
    res = ExperimentResult("boundary-1d")
    rows = interval1d.dirichlet_counterexample(lambdas)
    res.tables["counterexample"] = rows
    dir_rows = [r for r in rows if r["bc"] == "dirichlet"]
    neu_rows = [r for r in rows if r["bc"] == "neumann"]
    anchor = "Dirichlet vanishing hides boundary atoms; Neumann does not"
    res.checks.append(_upper_check("dirichlet_one", anchor, max(r["carleson2"] for r in dir_rows) - 1.0, 1e-12, "max carleson2 - 1"))
    sp_ok = all(r["sparsity_ratio"] == 1.0 + r["lambda"] for r in rows)
    res.checks.append(Check("sparsity_ratio", "boundary atom breaks relative sparsity", "1 + lambda", float(sp_ok), "exact", sp_ok))
    fit = slope_fit([r["lambda"] for r in neu_rows], [r["carleson2"] - 1.0 for r in neu_rows])
    res.fits["neumann_excess"] = fit
    res.fits["neumann_raw"] = slope_fit([r["lambda"] for r in neu_rows], [r["carleson2"] for r in neu_rows])
    res.checks.append(_slope_check("neumann_slope", "Neumann constant grows linearly", fit, 1.0, 0.05))

    inner = interval1d.dirichlet_counterexample(lambdas, z=math.pi / 2)
    res.tables["interior_atom"] = inner
    ifit = slope_fit([r["lambda"] for r in inner if r["bc"] == "dirichlet"], [r["carleson2"] - 1.0 for r in inner if r["bc"] == "dirichlet"])
    res.fits["dirichlet_interior_excess"] = ifit
    res.checks.append(_slope_check("interior_slope", "interior atoms are seen under Dirichlet conditions", ifit, 1.0, 0.1))

    nb = interval1d.near_boundary_sweep(n_funcs=cfg.get("n_funcs", 50), seed=cfg.seed)
    res.tables["near_boundary"] = nb
    maxima = [r["max_ratio_over_delta"] for r in nb]
    res.checks.append(
        _upper_check("near_boundary", "Dirichlet functions are small near the boundary", max(maxima) / float(np.median(maxima)), 2.0, "max / median")
    )
    ts = list(np.geomspace(1e-3, 0.3, 12))
    hd = interval1d.neumann_heat_diag(ts)
    res.tables["heat_diag"] = hd
    interior = [r["diag_times_sqrt_t"] for r in hd if r["x"] > 0]
    res.checks.append(_upper_check("neumann_diag", "Neumann heat diagonal is two-sided t^{-1/2}", _spread(interior), 4.0, "max/min"))
    dz = interval1d.neumann_heat_diag(ts, (0.0,), "dirichlet")
    res.tables["heat_diag_dirichlet"] = dz
    zero = max(abs(r["diag_times_sqrt_t"]) for r in dz)
    res.checks.append(_upper_check("dirichlet_zero", "Dirichlet heat diagonal vanishes at the boundary", zero, 0.0, "max |p(t,0,0)|"))
    return res


EXPERIMENTS = {
    "zonal-norms": exp_zonal_norms,
    "beam-norms": exp_beam_norms,
    "zonal-decay": exp_zonal_decay,
    "ls2-cap-complement": exp_ls2_cap_complement,
    "ls-eigen-smallp": exp_ls_eigen_smallp,
    "ls-eigen-largep": exp_ls_eigen_largep,
    "carleson-dichotomy": exp_carleson_dichotomy,
    "carleson-largep": exp_carleson_largep,
    "tgcc-beam": exp_tgcc_beam,
    "weyl": exp_weyl,
    "heat-gaussian": exp_heat_gaussian,
    "heat-complex": exp_heat_complex,
    "kernel-decay": exp_kernel_decay,
    "bernstein": exp_bernstein,
    "meanvalue": exp_meanvalue,
    "boundary-1d": exp_boundary_1d,
}


def run_experiment(name, config=None, out_dir=None):
    """Run a named experiment; write CSV/JSON when ``out_dir`` is given."""
    if name not in EXPERIMENTS:
        raise KeyError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    cfg = config or ExperimentConfig(name=name)
    if cfg.name and cfg.name != name:
        raise ConfigError(f"config is for {cfg.name!r}, not {name!r}")
    result = EXPERIMENTS[name](cfg)
    out_dir = out_dir or cfg.out
    if out_dir:
        write_result(result, out_dir)
    return result
