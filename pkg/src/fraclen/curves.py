"""Compact C^1 parametric curves in R^n.

A curve is one regular C^1 chart ``s -> point(s)`` on ``[s0, s1]``, optionally
periodic (closed).  Five kinds are supported: ``segment``, ``circle_arc``,
``helix``, ``fourier`` and ``spline``.  The first four have analytic
evaluators and derivatives; splines are C^2 cubics (natural end conditions
when open, periodic when closed).

Curves are immutable after construction and safe to share across workers.
Only a single connected component is supported (one chart); multi-component
manifolds are out of scope.
"""

import hashlib

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .errors import CurveSpecError, QuadratureError
from .geometry import check_ambient_dim, make_perp_pair, unit

KIND_SEGMENT = 0
KIND_CIRCLE_ARC = 1
KIND_HELIX = 2
KIND_FOURIER = 3
KIND_SPLINE = 4

KIND_NAMES = {
    "segment": KIND_SEGMENT,
    "circle_arc": KIND_CIRCLE_ARC,
    "helix": KIND_HELIX,
    "fourier": KIND_FOURIER,
    "spline": KIND_SPLINE,
}

_TWO_PI = 2.0 * np.pi


class Curve:
    """Regular parametric curve with exact tangents.

    Construct through :func:`make_curve`; the constructor trusts its inputs.

    Attributes
    ----------
    kind : str
    dim : int
    s0, s1 : float
        Parameter range.
    closed : bool
    spec : dict
        The validated spec this curve was built from.
    """

    def __init__(self, kind, dim, s0, s1, closed, data, aux, spec, pp=None):
        self.kind = kind
        self.kind_code = KIND_NAMES[kind]
        self.dim = dim
        self.s0 = float(s0)
        self.s1 = float(s1)
        self.closed = bool(closed)
        self.data = np.ascontiguousarray(data, dtype=float)
        self.aux = np.ascontiguousarray(aux, dtype=float)
        self.spec = spec
        self._pp = pp
        self._scale = None

    # -- evaluation ---------------------------------------------------------

    def point(self, s):
        """Evaluate the curve at parameter(s) ``s``; shape (..., dim)."""
        s = np.asarray(s, dtype=float)
        k = self.kind_code
        if k == KIND_SEGMENT:
            p0, p1 = self.data
            return p0 + s[..., None] * (p1 - p0)
        if k == KIND_CIRCLE_ARC:
            c, e1, e2 = self.data
            radius, a0, a1 = self.aux
            ang = a0 + s[..., None] * (a1 - a0)
            return c + radius * (np.cos(ang) * e1 + np.sin(ang) * e2)
        if k == KIND_HELIX:
            c, a1, a2, a3 = self.data
            radius, pitch = self.aux
            t = s[..., None]
            return c + radius * np.cos(t) * a1 + radius * np.sin(t) * a2 + pitch * t * a3
        if k == KIND_FOURIER:
            return self._fourier_eval(s, deriv=False)
        return self._pp(s)

    def velocity(self, s):
        """Derivative of :meth:`point` with respect to the parameter."""
        s = np.asarray(s, dtype=float)
        k = self.kind_code
        if k == KIND_SEGMENT:
            p0, p1 = self.data
            return np.broadcast_to(p1 - p0, s.shape + (self.dim,)).copy()
        if k == KIND_CIRCLE_ARC:
            _, e1, e2 = self.data
            radius, a0, a1 = self.aux
            span = a1 - a0
            ang = a0 + s[..., None] * span
            return radius * span * (-np.sin(ang) * e1 + np.cos(ang) * e2)
        if k == KIND_HELIX:
            _, a1, a2, a3 = self.data
            radius, pitch = self.aux
            t = s[..., None]
            return -radius * np.sin(t) * a1 + radius * np.cos(t) * a2 + pitch * a3
        if k == KIND_FOURIER:
            return self._fourier_eval(s, deriv=True)
        return self._pp(s, 1)

    def _fourier_eval(self, s, deriv):
        const = self.data[0]
        n_harm = (self.data.shape[0] - 1) // 2
        phase = _TWO_PI * s[..., None, None]  # (..., 1, 1)
        ks = np.arange(1, n_harm + 1, dtype=float)[:, None]  # (K, 1)
        cos_rows = self.data[1 : 1 + n_harm]
        sin_rows = self.data[1 + n_harm :]
        if deriv:
            out = np.sum(
                _TWO_PI * ks * (-np.sin(phase * ks) * cos_rows + np.cos(phase * ks) * sin_rows),
                axis=-2,
            )
        else:
            out = const + np.sum(
                np.cos(phase * ks) * cos_rows + np.sin(phase * ks) * sin_rows, axis=-2
            )
        return out

    def tangent(self, s):
        """Unit tangent(s) at parameter(s) ``s``."""
        v = self.velocity(s)
        return v / np.linalg.norm(v, axis=-1, keepdims=True)

    # -- global quantities --------------------------------------------------

    def speed(self, s):
        return np.linalg.norm(self.velocity(s), axis=-1)

    def arclength(self, tol=1e-9):
        """Total arclength by adaptive quadrature of the speed.

        Raises
        ------
        QuadratureError
            If the quadrature does not reach absolute error ``tol``; the
            exception carries the best estimate.
        """
        if tol <= 0:
            raise ValueError("tol must be positive")
        val, err, info = quad(
            lambda s: float(self.speed(np.asarray(s))),
            self.s0,
            self.s1,
            epsabs=0.1 * tol,
            epsrel=0.0,
            limit=400,
            full_output=True,
        )[:3]
        if err > tol:
            raise QuadratureError(
                f"arclength quadrature error {err:g} exceeds tol {tol:g}", val
            )
        return float(val)

    def bounding_radius(self, center=None):
        """Radius R with max_s |point(s) - center| <= R (center defaults to 0).

        Dense sampling plus a Lipschitz margin of half a step at the maximal
        sampled speed.
        """
        m = 8192
        s = np.linspace(self.s0, self.s1, m + 1)
        x = self.point(s)
        if center is not None:
            x = x - np.asarray(center, dtype=float)
        max_speed = float(np.max(self.speed(s)))
        margin = 0.5 * max_speed * (self.s1 - self.s0) / m
        return float(np.max(np.linalg.norm(x, axis=-1)) + margin)

    def scale(self):
        """Characteristic length used to make tolerances relative."""
        if self._scale is None:
            s = np.linspace(self.s0, self.s1, 257)
            x = self.point(s)
            ext = np.linalg.norm(x.max(axis=0) - x.min(axis=0))
            self._scale = float(max(ext, 1e-30))
        return self._scale

    def digest(self):
        """Short content hash of the defining data, for output headers."""
        h = hashlib.sha256()
        h.update(self.kind.encode())
        h.update(np.int64(self.dim).tobytes())
        h.update(self.data.tobytes())
        h.update(self.aux.tobytes())
        h.update(np.float64([self.s0, self.s1]).tobytes())
        return h.hexdigest()[:16]

    def kernel_repr(self):
        """(kind_code, data, aux, s0, s1) arrays consumed by the hot kernels."""
        return self.kind_code, self.data, self.aux, self.s0, self.s1


def _as_vec(spec, key, n):
    try:
        v = np.asarray(spec[key], dtype=float).reshape(n)
    except KeyError:
        raise CurveSpecError(f"missing required key '{key}'") from None
    except (TypeError, ValueError):
        raise CurveSpecError(f"key '{key}' is not a length-{n} vector") from None
    if not np.all(np.isfinite(v)):
        raise CurveSpecError(f"key '{key}' has non-finite components")
    return v


def _as_scalar(spec, key, default=None):
    if key not in spec:
        if default is not None:
            return default
        raise CurveSpecError(f"missing required key '{key}'")
    try:
        x = float(np.asarray(spec[key], dtype=float).reshape(()))
    except (TypeError, ValueError):
        raise CurveSpecError(f"key '{key}' is not a scalar") from None
    if not np.isfinite(x):
        raise CurveSpecError(f"key '{key}' is not finite")
    return x


def make_curve(spec):
    """Build a :class:`Curve` from a spec mapping.

    The spec is a dict with keys ``kind``, ``dimension`` and kind-specific
    parameters; see the curve-file schema in the README for the full list.

    Raises
    ------
    CurveSpecError
        On any invalid or inconsistent parameter.
    """
    if "kind" not in spec:
        raise CurveSpecError("missing required key 'kind'")
    kind = str(spec["kind"])
    if kind not in KIND_NAMES:
        raise CurveSpecError(f"unknown curve kind '{kind}'")
    try:
        n = check_ambient_dim(spec.get("dimension", 0))
    except Exception as exc:
        raise CurveSpecError(f"bad dimension: {exc}") from None

    if kind == "segment":
        p0 = _as_vec(spec, "start", n)
        p1 = _as_vec(spec, "end", n)
        if np.linalg.norm(p1 - p0) == 0.0:
            raise CurveSpecError("segment endpoints must be distinct")
        curve = Curve(kind, n, 0.0, 1.0, False, np.stack([p0, p1]), np.zeros(0), spec)

    elif kind == "circle_arc":
        c = _as_vec(spec, "center", n)
        radius = _as_scalar(spec, "radius")
        if radius <= 0:
            raise CurveSpecError("arc radius must be positive")
        a0 = _as_scalar(spec, "angle_start", 0.0)
        a1 = _as_scalar(spec, "angle_end", _TWO_PI)
        if a1 <= a0:
            raise CurveSpecError("angle_end must exceed angle_start")
        try:
            e1, e2 = make_perp_pair(_as_vec(spec, "axis1", n), _as_vec(spec, "axis2", n))
        except ValueError as exc:
            raise CurveSpecError(f"bad arc axes: {exc}") from None
        closed = abs((a1 - a0) - _TWO_PI) < 1e-10
        curve = Curve(
            kind, n, 0.0, 1.0, closed, np.stack([c, e1, e2]), np.array([radius, a0, a1]), spec
        )

    elif kind == "helix":
        c = _as_vec(spec, "center", n)
        radius = _as_scalar(spec, "radius")
        pitch = _as_scalar(spec, "pitch")
        if radius <= 0:
            raise CurveSpecError("helix radius must be positive")
        t0 = _as_scalar(spec, "t_start", 0.0)
        t1 = _as_scalar(spec, "t_end", _TWO_PI)
        if t1 <= t0:
            raise CurveSpecError("t_end must exceed t_start")
        a1 = _as_vec(spec, "axis1", n) if "axis1" in spec else np.eye(n)[0]
        a2 = _as_vec(spec, "axis2", n) if "axis2" in spec else np.eye(n)[1]
        a3 = _as_vec(spec, "axis3", n) if "axis3" in spec else np.eye(n)[2]
        a1, a2 = make_perp_pair(a1, a2)
        a3 = a3 - (a3 @ a1) * a1 - (a3 @ a2) * a2
        try:
            a3 = unit(a3)
        except ValueError:
            raise CurveSpecError("helix axes are not linearly independent") from None
        curve = Curve(
            kind, n, t0, t1, False, np.stack([c, a1, a2, a3]), np.array([radius, pitch]), spec
        )

    elif kind == "fourier":
        const = _as_vec(spec, "const", n)
        cos_rows, sin_rows = [], []
        k = 1
        while f"cos{k}" in spec or f"sin{k}" in spec:
            cos_rows.append(_as_vec(spec, f"cos{k}", n) if f"cos{k}" in spec else np.zeros(n))
            sin_rows.append(_as_vec(spec, f"sin{k}", n) if f"sin{k}" in spec else np.zeros(n))
            k += 1
        if not cos_rows:
            raise CurveSpecError("fourier curve needs at least one cos1/sin1 harmonic")
        data = np.vstack([const[None, :], np.array(cos_rows), np.array(sin_rows)])
        curve = Curve(kind, n, 0.0, 1.0, True, data, np.zeros(0), spec)

    else:  # spline
        nodes = spec.get("node")
        if nodes is None:
            raise CurveSpecError("spline curve needs 'node' rows")
        nodes = np.asarray(nodes, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != n or nodes.shape[0] < 4:
            raise CurveSpecError("spline needs >= 4 nodes of the stated dimension")
        if not np.all(np.isfinite(nodes)):
            raise CurveSpecError("spline nodes must be finite")
        closed = bool(spec.get("closed", False))
        if closed:
            if np.linalg.norm(nodes[0] - nodes[-1]) > 0:
                nodes = np.vstack([nodes, nodes[0]])
            bc = "periodic"
        else:
            bc = "natural"
        t = np.linspace(0.0, 1.0, nodes.shape[0])
        pp = CubicSpline(t, nodes, axis=0, bc_type=bc)
        # Pack piecewise coefficients for the jitted evaluator: rows 4*i + j
        # hold the (t - t_i)^(3-j) coefficient vector of interval i.
        m = len(t) - 1
        data = np.ascontiguousarray(pp.c.transpose(1, 0, 2).reshape(4 * m, n))
        curve = Curve(kind, n, 0.0, 1.0, closed, data, t.copy(), spec, pp=pp)

    _check_regular(curve)
    return curve


def _check_regular(curve):
    s = np.linspace(curve.s0, curve.s1, 513)
    sp = curve.speed(s)
    if float(np.min(sp)) <= 1e-12 * curve.scale():
        raise CurveSpecError("curve parametrization is not regular (vanishing speed)")
    if curve.closed:
        gap = np.linalg.norm(curve.point(np.asarray(curve.s0)) - curve.point(np.asarray(curve.s1)))
        tgap = np.linalg.norm(
            curve.tangent(np.asarray(curve.s0)) - curve.tangent(np.asarray(curve.s1))
        )
        if gap > 1e-10 * curve.scale() or tgap > 1e-10:
            raise CurveSpecError("closed curve does not match up at the seam")


def transform_curve(curve, rotation=None, translation=None):
    """Rigid motion of a curve: returns ``make_curve`` of the transformed spec.

    ``rotation`` is an (n, n) orthogonal matrix, ``translation`` an n-vector.
    """
    n = curve.dim
    Q = np.eye(n) if rotation is None else np.asarray(rotation, dtype=float)
    v = np.zeros(n) if translation is None else np.asarray(translation, dtype=float)
    spec = dict(curve.spec)

    def pt(key):
        spec[key] = Q @ np.asarray(spec[key], dtype=float) + v

    def vec(key):
        if key in spec:
            spec[key] = Q @ np.asarray(spec[key], dtype=float)

    if curve.kind == "segment":
        pt("start")
        pt("end")
    elif curve.kind == "circle_arc":
        pt("center")
        vec("axis1")
        vec("axis2")
    elif curve.kind == "helix":
        pt("center")
        for key in ("axis1", "axis2", "axis3"):
            if key not in spec:
                spec[key] = np.eye(n)[("axis1", "axis2", "axis3").index(key)]
            vec(key)
    elif curve.kind == "fourier":
        pt("const")
        k = 1
        while f"cos{k}" in spec or f"sin{k}" in spec:
            vec(f"cos{k}")
            vec(f"sin{k}")
            k += 1
    else:
        nodes = np.asarray(spec["node"], dtype=float)
        spec["node"] = nodes @ Q.T + v
    return make_curve(spec)


def scale_curve(curve, lam):
    """Dilate a curve about the origin by factor ``lam > 0``."""
    lam = float(lam)
    if lam <= 0:
        raise ValueError("scale factor must be positive")
    spec = dict(curve.spec)
    if curve.kind == "segment":
        spec["start"] = lam * np.asarray(spec["start"], dtype=float)
        spec["end"] = lam * np.asarray(spec["end"], dtype=float)
    elif curve.kind in ("circle_arc", "helix"):
        spec["center"] = lam * np.asarray(spec["center"], dtype=float)
        spec["radius"] = lam * float(np.asarray(spec["radius"]).reshape(()))
        if curve.kind == "helix":
            spec["pitch"] = lam * float(np.asarray(spec["pitch"]).reshape(()))
    elif curve.kind == "fourier":
        k = 1
        spec["const"] = lam * np.asarray(spec["const"], dtype=float)
        while f"cos{k}" in spec or f"sin{k}" in spec:
            for key in (f"cos{k}", f"sin{k}"):
                if key in spec:
                    spec[key] = lam * np.asarray(spec[key], dtype=float)
            k += 1
    else:
        spec["node"] = lam * np.asarray(spec["node"], dtype=float)
    return make_curve(spec)


def parse_curve_file(path):
    """Parse the key-value curve file format into a spec dict.

    Lines are ``key: value [value ...]``; ``#`` starts a comment; the ``node``
    key may repeat (one spline node per line).  See README for the schema.
    """
    spec = {}
    nodes = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if ":" not in line:
                raise CurveSpecError(f"{path}:{lineno}: expected 'key: value'")
            key, _, value = line.partition(":")
            key = key.strip()
            value = value.strip()
            if key == "kind":
                spec["kind"] = value
            elif key == "closed":
                if value not in ("true", "false"):
                    raise CurveSpecError(f"{path}:{lineno}: closed must be true/false")
                spec["closed"] = value == "true"
            elif key == "dimension":
                try:
                    spec["dimension"] = int(value)
                except ValueError:
                    raise CurveSpecError(f"{path}:{lineno}: bad dimension") from None
            else:
                try:
                    vals = [float(tok) for tok in value.split()]
                except ValueError:
                    raise CurveSpecError(f"{path}:{lineno}: bad numeric value") from None
                if key == "node":
                    nodes.append(vals)
                elif key in spec:
                    raise CurveSpecError(f"{path}:{lineno}: duplicate key '{key}'")
                else:
                    spec[key] = vals[0] if len(vals) == 1 else vals
    if nodes:
        spec["node"] = nodes
    return spec


def load_curve(path):
    """Parse and build a curve from a curve file."""
    return make_curve(parse_curve_file(path))
