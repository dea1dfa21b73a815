"""Target kernels: the log-density abstraction and the benchmark registry.

Every kernel works in log space (log K, never K) so that deep tails underflow
to -inf instead of rounding to zero. A kernel provides three evaluation
surfaces:

* ``log_eval(x)`` - scalar, the defining contract;
* ``log_eval_many(X)`` - vectorized over rows, used by quadrature and the
  slice rejection loop;
* an optional conditional *profile*: given a coordinate and the remaining
  values it returns a cheap closure for the 1-D section. Profiles are
  algebraic rearrangements of the full kernel (differences stay at rounding
  level) and exist purely for speed; ``Conditional1D.__call__`` always goes
  through the exact reassembled point.

Registered kernels also carry packed parameter arrays for the compiled
engine; arbitrary user kernels run on the numpy path only.
"""

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LogKernel",
    "Conditional1D",
    "conditional_1d",
    "make_kernel",
    "list_kernels",
    "KERNEL_NAMES",
]

LOG2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class PackedKernel:
    """Flat arrays handed to the compiled engine (see nbkernels)."""

    trio: str
    params: np.ndarray
    dmat: np.ndarray
    dvec: np.ndarray


class LogKernel:
    """A finite-dimensional unnormalized log-density.

    ``log_eval_many`` must return -inf (never NaN) outside the support and be
    deterministic. The normalizing constant is *not* part of the kernel; it
    is estimated on the fly by the support machinery.
    """

    def __init__(self, name, dim, log_eval_many, params=None, *, profile_factory=None, packed=None):
        if dim < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        self.name = str(name)
        self.dim = int(dim)
        self.params = dict(params or {})
        self._many = log_eval_many
        self._profile_factory = profile_factory
        self.packed = packed

    @classmethod
    def from_callable(cls, name, dim, fn, vectorized=False, params=None):
        """Wrap a user-supplied log-kernel callable (scalar by default)."""
        if vectorized:
            many = fn
        else:
            def many(X):
                return np.array([fn(row) for row in X], dtype=float)
        return cls(name, dim, many, params)

    def log_eval(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"kernel {self.name!r} has dim {self.dim}, got point of shape {x.shape}")
        return float(self._many(x[None, :])[0])

    def log_eval_many(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=float)
        return np.asarray(self._many(X), dtype=float)

    def __repr__(self):
        return f"LogKernel({self.name!r}, dim={self.dim})"


@dataclass
class Conditional1D:
    """1-D section of a kernel: g(z) = log K(..., z at `coord`, ...).

    ``fixed`` holds the other dim-1 coordinate values. Calling the object
    evaluates the exact reassembled point; ``eval_many`` uses the kernel's
    fast profile when one exists.
    """

    base: LogKernel
    coord: int
    fixed: np.ndarray
    _template: np.ndarray = field(init=False, repr=False)
    _profile: object = field(init=False, repr=False, default=None)

    def __post_init__(self):
        m = self.base.dim
        if not 0 <= self.coord < m:
            raise IndexError(f"coord {self.coord} out of range for dim {m}")
        fixed = np.asarray(self.fixed, dtype=float)
        if fixed.shape != (m - 1,):
            raise ValueError(f"fixed must have length {m - 1}, got shape {fixed.shape}")
        if not np.all(np.isfinite(fixed)):
            raise ValueError("fixed values must be finite")
        self.fixed = fixed
        template = np.empty(m)
        template[: self.coord] = fixed[: self.coord]
        template[self.coord] = 0.0
        template[self.coord + 1 :] = fixed[self.coord :]
        self._template = template
        if self.base._profile_factory is not None:
            self._profile = self.base._profile_factory(self.coord, template)

    def __call__(self, z: float) -> float:
        point = self._template.copy()
        point[self.coord] = z
        return self.base.log_eval(point)

    def eval_many(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if self._profile is not None:
            return self._profile(z)
        X = np.repeat(self._template[None, :], z.size, axis=0)
        X[:, self.coord] = z
        return self.base.log_eval_many(X)


def conditional_1d(kernel: LogKernel, coord: int, fixed) -> Conditional1D:
    """View of ``kernel`` along coordinate ``coord`` with the rest pinned."""
    return Conditional1D(kernel, coord, np.asarray(fixed, dtype=float))


# ---------------------------------------------------------------------------
# registered benchmark kernels


def _beta_mixture():
    # three shifted/scaled Beta components; weights sum to 1 so the kernel
    # integrates to 1 over the real line
    comps = (
        (0.3, 5.0, 0.5, 1.0, math.log(2.0)),
        (0.4, 1.0, 2.0, 2.0, -math.log(6.0)),
        (0.3, -5.0, 1.0, 0.5, math.log(2.0)),
    )

    def many(X):
        x = X[:, 0]
        out = np.full(x.shape, -np.inf)
        for w, shift, a, b, log_beta in comps:
            u = 0.5 * (x + shift)
            term = np.full(x.shape, -np.inf)
            inside = (u > 0.0) & (u < 1.0)
            if np.any(inside):
                ui = u[inside]
                term[inside] = (
                    math.log(w) + math.log(0.5) - log_beta
                    + (a - 1.0) * np.log(ui)
                    + (b - 1.0) * np.log1p(-ui)
                )
            out = np.logaddexp(out, term)
        return out

    def profile(j, template):
        return lambda z: many(z[:, None])

    return LogKernel(
        "beta_mixture", 1, many,
        profile_factory=profile,
        packed=PackedKernel("beta_mixture", np.empty(0), np.empty((0, 0)), np.empty(0)),
    )


def _rosenbrock():
    def many(X):
        x1 = X[:, 0]
        x2 = X[:, 1]
        return -x1 * x1 / 10.0 - x2 * x2 / 10.0 - 2.0 * (x2 - x1 * x1) ** 2

    def profile(j, template):
        if j == 0:
            x2 = template[1]
            return lambda z: -z * z / 10.0 - x2 * x2 / 10.0 - 2.0 * (x2 - z * z) ** 2
        x1 = template[0]
        c = -x1 * x1 / 10.0
        return lambda z: c - z * z / 10.0 - 2.0 * (z - x1 * x1) ** 2

    return LogKernel(
        "rosenbrock", 2, many,
        profile_factory=profile,
        packed=PackedKernel("rosenbrock", np.empty(0), np.empty((0, 0)), np.empty(0)),
    )


def _ackley(dim, a, b, c, temp, box):
    def many(X):
        s2 = np.mean(X * X, axis=1)
        sc = np.mean(np.cos(c * X), axis=1)
        f = -a * np.exp(-b * np.sqrt(s2)) - np.exp(sc) + a + math.e
        inside = np.all(np.abs(X) <= box, axis=1)
        return np.where(inside, -f / temp, -np.inf)

    def profile(j, template):
        others_in = True
        s2r = 0.0
        scr = 0.0
        for i in range(dim):
            if i == j:
                continue
            xi = template[i]
            others_in = others_in and abs(xi) <= box
            s2r += xi * xi
            scr += math.cos(c * xi)

        def g(z):
            if not others_in:
                return np.full(z.shape, -np.inf)
            s2 = (s2r + z * z) / dim
            sc = (scr + np.cos(c * z)) / dim
            f = -a * np.exp(-b * np.sqrt(s2)) - np.exp(sc) + a + math.e
            return np.where(np.abs(z) <= box, -f / temp, -np.inf)

        return g

    return LogKernel(
        "ackley", dim, many,
        params={"dim": dim, "a": a, "b": b, "c": c, "temp": temp, "box": box},
        profile_factory=profile,
        packed=PackedKernel(
            "ackley",
            np.array([float(dim), a, b, c, temp, box]),
            np.empty((0, 0)), np.empty(0),
        ),
    )


def _radial_exp(dim):
    def many(X):
        return -np.sqrt(np.sum(X * X, axis=1))

    def profile(j, template):
        s2r = float(np.sum(template * template) - template[j] * template[j])

        def g(z):
            return -np.sqrt(s2r + z * z)

        return g

    return LogKernel(
        "radial_exp", dim, many,
        params={"dim": dim},
        profile_factory=profile,
        packed=PackedKernel("radial_exp", np.array([float(dim)]), np.empty((0, 0)), np.empty(0)),
    )


def _lasso_bridge(data, lam, alpha):
    Z = np.ascontiguousarray(data.design, dtype=float)
    y = np.ascontiguousarray(data.response, dtype=float)
    n_obs, p = Z.shape
    col_sq = np.sum(Z * Z, axis=0)

    def many(X):
        beta = X[:, 1:]
        resid = y[None, :] - X[:, :1] - beta @ Z.T
        loss = np.sum(resid * resid, axis=1) / (2.0 * n_obs)
        pen = lam * np.sum(np.abs(beta) ** alpha, axis=1)
        return -(loss + pen)

    def profile(j, template):
        b0 = template[0]
        beta = template[1:]
        if j == 0:
            r = y - Z @ beta
            sr = float(np.sum(r))
            sr2 = float(np.sum(r * r))
            pen = lam * float(np.sum(np.abs(beta) ** alpha))

            def g0(z):
                loss = (sr2 - 2.0 * z * sr + n_obs * z * z) / (2.0 * n_obs)
                return -(loss + pen)

            return g0

        jz = j - 1
        r = y - b0 - Z @ beta + Z[:, jz] * beta[jz]
        sr2 = float(np.sum(r * r))
        srz = float(np.sum(r * Z[:, jz]))
        szz = float(col_sq[jz])
        pen_rest = lam * (float(np.sum(np.abs(beta) ** alpha)) - abs(beta[jz]) ** alpha)

        def g(z):
            loss = (sr2 - 2.0 * z * srz + z * z * szz) / (2.0 * n_obs)
            return -(loss + pen_rest + lam * np.abs(z) ** alpha)

        return g

    return LogKernel(
        "lasso_bridge", p + 1, many,
        params={"lam": lam, "alpha": alpha, "n_obs": n_obs, "n_pred": p},
        profile_factory=profile,
        packed=PackedKernel(
            "lasso_bridge",
            np.array([float(n_obs), float(p), lam, alpha]),
            Z, y,
        ),
    )


def _funnel(dim, sigma, mu):
    # last coordinate drives the scale of the first dim-1 coordinates
    v_const = -0.5 * math.log(2.0 * math.pi * sigma * sigma)

    def many(X):
        v = X[:, -1]
        r2 = np.sum((X[:, :-1] - mu) ** 2, axis=1)
        ev = np.exp(np.minimum(-v, 700.0))
        with np.errstate(over="ignore"):
            quad = 0.5 * ev * r2
        return (
            -v * v / (2.0 * sigma * sigma) + v_const
            - 0.5 * (dim - 1) * (LOG2PI + v)
            - quad
        )

    def profile(j, template):
        if j == dim - 1:
            s = float(np.sum((template[:-1] - mu) ** 2))

            def gv(v):
                ev = np.exp(np.minimum(-v, 700.0))
                with np.errstate(over="ignore"):
                    quad = 0.5 * ev * s
                return -v * v / (2.0 * sigma * sigma) + v_const - 0.5 * (dim - 1) * (LOG2PI + v) - quad

            return gv

        v = template[-1]
        rest = float(np.sum((template[:-1] - mu) ** 2) - (template[j] - mu) ** 2)
        half_prec = 0.5 * math.exp(min(-v, 700.0))
        head = -v * v / (2.0 * sigma * sigma) + v_const - 0.5 * (dim - 1) * (LOG2PI + v)

        def g(z):
            return head - half_prec * (rest + (z - mu) ** 2)

        return g

    return LogKernel(
        "funnel", dim, many,
        params={"dim": dim, "sigma": sigma, "mu": mu},
        profile_factory=profile,
        packed=PackedKernel("funnel", np.array([float(dim), sigma, mu]), np.empty((0, 0)), np.empty(0)),
    )


def _hybrid_rosenbrock(a, b):
    const = 0.5 * math.log(b) - math.log(math.pi)

    def many(X):
        x1 = X[:, 0]
        x2 = X[:, 1]
        return -((x1 - a) ** 2) - b * (x2 - x1 * x1) ** 2 + const

    def profile(j, template):
        if j == 0:
            x2 = template[1]
            return lambda z: -((z - a) ** 2) - b * (x2 - z * z) ** 2 + const
        x1 = template[0]
        c = -((x1 - a) ** 2) + const
        m = x1 * x1
        return lambda z: c - b * (z - m) ** 2

    return LogKernel(
        "hybrid_rosenbrock", 2, many,
        params={"a": a, "b": b},
        profile_factory=profile,
        packed=PackedKernel("hybrid_rosenbrock", np.array([a, b]), np.empty((0, 0)), np.empty(0)),
    )


def _squiggle(dim, a):
    # shear map z1 = x1, z_i = x_i + sin(a*x1); unit Jacobian, diagonal
    # normal in z with variances (5, 1/2, ..., 1/2)
    const = -0.5 * math.log(2.0 * math.pi * 5.0) - 0.5 * (dim - 1) * math.log(math.pi)

    def many(X):
        x1 = X[:, 0]
        s = np.sin(a * x1)
        zi = X[:, 1:] + s[:, None]
        return -x1 * x1 / 10.0 - np.sum(zi * zi, axis=1) + const

    def profile(j, template):
        if j == 0:
            sx = float(np.sum(template[1:]))
            sx2 = float(np.sum(template[1:] ** 2))

            def g1(z):
                s = np.sin(a * z)
                return -z * z / 10.0 - (sx2 + 2.0 * s * sx + (dim - 1) * s * s) + const

            return g1

        s = math.sin(a * template[0])
        rest = float(np.sum((template[1:] + s) ** 2) - (template[j] + s) ** 2)
        head = -template[0] ** 2 / 10.0 - rest + const

        def g(z):
            return head - (z + s) ** 2

        return g

    return LogKernel(
        "squiggle", dim, many,
        params={"dim": dim, "a": a},
        profile_factory=profile,
        packed=PackedKernel("squiggle", np.array([float(dim), a]), np.empty((0, 0)), np.empty(0)),
    )


def _allen_cahn(dim, beta, a):
    ds = 1.0 / dim
    b = 1.0 / a
    cg = a / (2.0 * ds)
    cw = b * ds / 4.0

    def many(X):
        xp = np.zeros((X.shape[0], dim + 2))
        xp[:, 1:-1] = X
        grad = np.sum(np.diff(xp, axis=1) ** 2, axis=1)
        well = np.sum((1.0 - X * X) ** 2, axis=1)
        return -beta * (cg * grad + cw * well)

    def profile(j, template):
        left = template[j - 1] if j > 0 else 0.0
        right = template[j + 1] if j < dim - 1 else 0.0
        xj = template[j]
        base = float(many(template[None, :])[0])
        own = -beta * (cg * ((xj - left) ** 2 + (right - xj) ** 2) + cw * (1.0 - xj * xj) ** 2)
        const = base - own

        def g(z):
            return const - beta * (cg * ((z - left) ** 2 + (right - z) ** 2) + cw * (1.0 - z * z) ** 2)

        return g

    return LogKernel(
        "allen_cahn", dim, many,
        params={"dim": dim, "beta": beta, "a": a},
        profile_factory=profile,
        packed=PackedKernel("allen_cahn", np.array([float(dim), beta, a]), np.empty((0, 0)), np.empty(0)),
    )


_REGISTRY = {
    "beta_mixture": {
        "defaults": {},
        "positive": (),
        "dim": lambda p: 1,
        "requires_data": False,
        "build": lambda p, data: _beta_mixture(),
    },
    "rosenbrock": {
        "defaults": {},
        "positive": (),
        "dim": lambda p: 2,
        "requires_data": False,
        "build": lambda p, data: _rosenbrock(),
    },
    "ackley": {
        "defaults": {"dim": 2, "a": 20.0, "b": 0.2, "c": 2.0 * math.pi, "temp": 1.0, "box": 5.0},
        "positive": ("dim", "a", "b", "temp", "box"),
        "dim": lambda p: int(p["dim"]),
        "requires_data": False,
        "build": lambda p, data: _ackley(int(p["dim"]), p["a"], p["b"], p["c"], p["temp"], p["box"]),
    },
    "radial_exp": {
        "defaults": {"dim": 10},
        "positive": ("dim",),
        "dim": lambda p: int(p["dim"]),
        "requires_data": False,
        "build": lambda p, data: _radial_exp(int(p["dim"])),
    },
    "lasso_bridge": {
        "defaults": {"lam": 0.1, "alpha": 1.0},
        "positive": ("alpha",),
        "dim": lambda p: None,
        "requires_data": True,
        "build": lambda p, data: _lasso_bridge(data, p["lam"], p["alpha"]),
    },
    "funnel": {
        "defaults": {"dim": 10, "sigma": 3.0, "mu": 0.0},
        "positive": ("dim", "sigma"),
        "dim": lambda p: int(p["dim"]),
        "requires_data": False,
        "build": lambda p, data: _funnel(int(p["dim"]), p["sigma"], p["mu"]),
    },
    "hybrid_rosenbrock": {
        "defaults": {"a": 1.0, "b": 0.1},
        "positive": ("b",),
        "dim": lambda p: 2,
        "requires_data": False,
        "build": lambda p, data: _hybrid_rosenbrock(p["a"], p["b"]),
    },
    "squiggle": {
        "defaults": {"dim": 3, "a": 1.5},
        "positive": ("dim",),
        "dim": lambda p: int(p["dim"]),
        "requires_data": False,
        "build": lambda p, data: _squiggle(int(p["dim"]), p["a"]),
    },
    "allen_cahn": {
        "defaults": {"dim": 10, "beta": 1.0, "a": 0.1},
        "positive": ("dim", "beta", "a"),
        "dim": lambda p: int(p["dim"]),
        "requires_data": False,
        "build": lambda p, data: _allen_cahn(int(p["dim"]), p["beta"], p["a"]),
    },
}

KERNEL_NAMES = tuple(_REGISTRY)


def make_kernel(name: str, params=None, data=None) -> LogKernel:
    """Build a registered kernel by name.

    ``params`` overrides the registry defaults (unknown keys are rejected),
    ``data`` is the RegressionData required by ``lasso_bridge``.
    """
    if name not in _REGISTRY:
        raise ValueError(f"unknown kernel {name!r}; known: {', '.join(KERNEL_NAMES)}")
    entry = _REGISTRY[name]
    merged = dict(entry["defaults"])
    for key, val in (params or {}).items():
        if key not in merged:
            raise ValueError(f"kernel {name!r} has no parameter {key!r}")
        merged[key] = val
    for key in entry["positive"]:
        if not merged[key] > 0:
            raise ValueError(f"kernel {name!r} parameter {key!r} must be positive")
    if name == "lasso_bridge":
        if data is None:
            raise ValueError("lasso_bridge requires regression data")
        if merged["lam"] < 0:
            raise ValueError("lam must be >= 0")
    return entry["build"](merged, data)


def list_kernels():
    """Stable-ordered metadata for every registered kernel."""
    rows = []
    for name in KERNEL_NAMES:
        entry = _REGISTRY[name]
        dim = entry["dim"](entry["defaults"]) if not entry["requires_data"] else None
        rows.append(
            {
                "name": name,
                "dim": dim if dim is not None else "data-dependent",
                "params": dict(entry["defaults"]),
                "requires_data": entry["requires_data"],
            }
        )
    return rows
