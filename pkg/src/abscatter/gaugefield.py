"""Vector potentials, the flux functional, gauge transformations, eikonal phases.

A potential is the singular flux part alpha*(-x2, x1)/|x|^2 plus a smooth
short-range part A' and a scalar potential V.  The built-in analytic family
keeps every oracle in closed form:

* A' swirl bumps: curls of Gaussian stream functions (divergence free, zero
  net circulation, analytic magnetic field);
* A' gradient pieces: exact differentials of Gaussian mixtures (zero field);
* V: Gaussian mixtures.

The eikonal phase of a ray is
    Phi_s(x, xi) = -s * int_0^inf A(x + s*t*xi) . xi dt,       s = +1 or -1,
defined off the backward cone (s * xhat.xihat >= -1 + delta with delta = 0.1).
The flux part has the closed form -s*alpha*(x cross xi)*atan2(|x cross xi|,
s*x.xi)/|x cross xi|; the smooth part is Gauss-Legendre quadrature truncated
where the Gaussian envelopes drop below 1e-13.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, FluxConvergenceWarning, SamplingError, SchemaError

__all__ = [
    "GaussianBump",
    "GaussianScalar",
    "ScalarMixture",
    "VectorPotential",
    "GaugeElement",
    "FluxResult",
    "flux",
    "winding_number",
    "gauge_transform",
    "EikonalPhase",
    "eikonal_phase",
    "phase_gradient",
    "phase_gradient_check",
    "gradient_formula",
    "ray_field_integral",
    "phase_decomposition",
    "save_potential_json",
    "load_potential_json",
]

# Region parameter for eikonal phases: |x| > DELTA_REGION, |xi| > DELTA_REGION
# and s * xhat.xihat >= -1 + DELTA_REGION.
DELTA_REGION = 0.1

# Gaussian envelopes are treated as zero beyond this many widths.
_ENVELOPE_CUT = 8.5


def _pts(x) -> tuple[np.ndarray, bool]:
    a = np.asarray(x, dtype=float)
    if a.ndim == 1:
        return a.reshape(1, 2), True
    if a.ndim != 2 or a.shape[1] != 2:
        raise DomainError("points must be a 2-vector or an (n, 2) array")
    return a, False


@dataclass(frozen=True)
class GaussianBump:
    """Divergence-free swirl: the curl of a Gaussian stream function."""

    center: tuple[float, float]
    strength: float
    width: float

    def __post_init__(self):
        if not self.width > 0.0:
            raise DomainError("bump width must be positive")

    def vector(self, x) -> np.ndarray:
        p, single = _pts(x)
        d = p - np.asarray(self.center)
        env = self.strength * np.exp(-(d * d).sum(axis=1) / (2.0 * self.width ** 2)) / self.width ** 2
        out = np.stack([-d[:, 1] * env, d[:, 0] * env], axis=1)
        return out[0] if single else out

    def curl(self, x) -> np.ndarray:
        p, single = _pts(x)
        d = p - np.asarray(self.center)
        rho2 = (d * d).sum(axis=1)
        env = self.strength * np.exp(-rho2 / (2.0 * self.width ** 2))
        out = env * (2.0 / self.width ** 2 - rho2 / self.width ** 4)
        return out[0] if single else out


@dataclass(frozen=True)
class GaussianScalar:
    """Gaussian scalar component for L fields and V potentials."""

    center: tuple[float, float]
    strength: float
    width: float

    def __post_init__(self):
        if not self.width > 0.0:
            raise DomainError("component width must be positive")

    def value(self, x) -> np.ndarray:
        p, single = _pts(x)
        d = p - np.asarray(self.center)
        out = self.strength * np.exp(-(d * d).sum(axis=1) / (2.0 * self.width ** 2))
        return out[0] if single else out

    def gradient(self, x) -> np.ndarray:
        p, single = _pts(x)
        d = p - np.asarray(self.center)
        env = self.strength * np.exp(-(d * d).sum(axis=1) / (2.0 * self.width ** 2))
        out = -d * (env / self.width ** 2)[:, None]
        return out[0] if single else out


@dataclass(frozen=True)
class ScalarMixture:
    """Finite sum of Gaussian scalars with analytic gradient."""

    components: tuple[GaussianScalar, ...] = ()

    def __call__(self, x):
        p, single = _pts(x)
        out = np.zeros(p.shape[0])
        for c in self.components:
            out += c.value(p)
        return float(out[0]) if single else out

    def gradient(self, x):
        p, single = _pts(x)
        out = np.zeros_like(p)
        for c in self.components:
            out += c.gradient(p)
        return out[0] if single else out

    def __add__(self, other: "ScalarMixture") -> "ScalarMixture":
        return ScalarMixture(self.components + other.components)


@dataclass(frozen=True)
class VectorPotential:
    """Flux part alpha*(-x2, x1)/|x|^2 plus smooth A' = swirls + grad(L), and V."""

    alpha: float
    bumps: tuple[GaussianBump, ...] = ()
    grad_l: ScalarMixture = ScalarMixture()
    v: ScalarMixture = ScalarMixture()
    obstacle_radius: float = 0.0

    def flux_part(self, x) -> np.ndarray:
        p, single = _pts(x)
        r2 = (p * p).sum(axis=1)
        out = self.alpha * np.stack([-p[:, 1], p[:, 0]], axis=1) / r2[:, None]
        return out[0] if single else out

    def aprime(self, x) -> np.ndarray:
        p, single = _pts(x)
        out = np.zeros_like(p)
        for b in self.bumps:
            out += b.vector(p)
        out += self.grad_l.gradient(p)
        return out[0] if single else out

    def a_total(self, x) -> np.ndarray:
        p, single = _pts(x)
        out = self.flux_part(p) + self.aprime(p)
        return out[0] if single else out

    def b_field(self, x) -> np.ndarray:
        """Magnetic field of A' (the flux part carries none away from 0)."""
        p, single = _pts(x)
        out = np.zeros(p.shape[0])
        for b in self.bumps:
            out += b.curl(p)
        return float(out[0]) if single else out

    def v_value(self, x):
        return self.v(x)

    def envelope_radius(self) -> float:
        """Distance from the origin beyond which every smooth piece is < ~1e-13."""
        rad = 0.0
        comps = [(b.center, b.width) for b in self.bumps]
        comps += [(c.center, c.width) for c in self.grad_l.components]
        for center, width in comps:
            rad = max(rad, math.hypot(*center) + _ENVELOPE_CUT * width)
        return rad

    def to_config(self) -> dict:
        return {
            "alpha": self.alpha,
            "bumps": [{"center": list(b.center), "strength": b.strength, "width": b.width}
                      for b in self.bumps],
            "gradL": [{"center": list(c.center), "strength": c.strength, "width": c.width}
                      for c in self.grad_l.components],
            "V": [{"center": list(c.center), "strength": c.strength, "width": c.width}
                  for c in self.v.components],
            "R0": self.obstacle_radius,
        }

    @classmethod
    def from_config(cls, cfg: dict) -> "VectorPotential":
        try:
            def gauss(entry):
                return GaussianScalar(center=tuple(float(t) for t in entry["center"]),
                                      strength=float(entry["strength"]),
                                      width=float(entry["width"]))

            bumps = tuple(GaussianBump(center=tuple(float(t) for t in e["center"]),
                                       strength=float(e["strength"]),
                                       width=float(e["width"]))
                          for e in cfg.get("bumps", []))
            return cls(alpha=float(cfg["alpha"]),
                       bumps=bumps,
                       grad_l=ScalarMixture(tuple(gauss(e) for e in cfg.get("gradL", []))),
                       v=ScalarMixture(tuple(gauss(e) for e in cfg.get("V", []))),
                       obstacle_radius=float(cfg.get("R0", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad potential config: {exc}") from exc


def save_potential_json(pot: VectorPotential, path) -> None:
    with open(path, "w", encoding="ascii") as f:
        json.dump(pot.to_config(), f, indent=2)
        f.write("\n")


def load_potential_json(path) -> VectorPotential:
    with open(path, "r", encoding="ascii") as f:
        return VectorPotential.from_config(json.load(f))


@dataclass(frozen=True)
class GaugeElement:
    """Unimodular gauge g(x) = exp(i*(winding*theta(x) + L(x)))."""

    winding: int
    l_field: ScalarMixture = ScalarMixture()

    def __call__(self, x) -> np.ndarray:
        p, single = _pts(x)
        phase = self.winding * np.arctan2(p[:, 1], p[:, 0]) + np.asarray(self.l_field(p))
        out = np.exp(1j * phase)
        return complex(out[0]) if single else out


@dataclass(frozen=True)
class FluxResult:
    estimate: float
    sequence: tuple[float, ...]


def flux(pot: VectorPotential, radii, nodes: int = 2048) -> FluxResult:
    """(1/2pi) * circulation of A over circles |x| = r, reported per radius.

    The estimate is the largest-radius value; a FluxConvergenceWarning fires
    when the top two radii still differ by more than 1e-3.
    """
    radii = np.asarray(radii, dtype=float)
    if radii.size == 0 or np.any(np.diff(radii) <= 0.0):
        raise DomainError("radii must be a nonempty ascending sequence")
    if radii[0] <= pot.obstacle_radius:
        raise DomainError("radii must exceed the obstacle radius")
    if nodes < 1024:
        raise DomainError("flux quadrature needs >= 1024 nodes")
    th = 2.0 * math.pi * np.arange(nodes) / nodes
    tangent = np.stack([-np.sin(th), np.cos(th)], axis=1)
    seq = []
    for r in radii:
        pts = r * np.stack([np.cos(th), np.sin(th)], axis=1)
        a = pot.a_total(pts)
        circ = float((a * tangent).sum() * r * (2.0 * math.pi / nodes))
        seq.append(circ / (2.0 * math.pi))
    if len(seq) >= 2 and abs(seq[-1] - seq[-2]) > 1e-3:
        warnings.warn(
            f"flux values at the top radii differ by {abs(seq[-1] - seq[-2]):.2e}",
            FluxConvergenceWarning,
        )
    return FluxResult(estimate=seq[-1], sequence=tuple(seq))


def winding_number(g, radius: float, samples: int = 1024, max_doublings: int = 8) -> int:
    """Total phase increment of g around |x| = radius, divided by 2*pi.

    Works from sampled values only.  Accepted samplings must keep successive
    phase jumps below pi/2: jumps in [pi/2, pi] trigger refinement, and the
    margin guards against jumps past pi, which alias back into (-pi, pi] and
    would corrupt the count silently (SamplingError past the refinement cap).
    """
    if radius <= 0.0:
        raise DomainError("radius must be positive")
    n = samples
    for _ in range(max_doublings + 1):
        th = 2.0 * math.pi * np.arange(n + 1) / n
        pts = radius * np.stack([np.cos(th), np.sin(th)], axis=1)
        vals = np.asarray(g(pts), dtype=complex)
        if np.any(np.abs(vals) < 1e-12):
            raise DomainError("gauge values must be unimodular (nonzero)")
        jumps = np.angle(vals[1:] / vals[:-1])
        if float(np.max(np.abs(jumps))) < 0.5 * math.pi:
            total = float(jumps.sum()) / (2.0 * math.pi)
            n_int = round(total)
            if abs(total - n_int) > 0.1:
                raise SamplingError(f"phase increment {total:.4f} is not near an integer")
            return int(n_int)
        n *= 2
    raise SamplingError("phase jumps stayed >= pi/2 after refinement cap")


def gauge_transform(pot: VectorPotential, g: GaugeElement) -> VectorPotential:
    """A -> A - i g^-1 dg: flux gains the winding, A' gains grad(L); V unchanged."""
    return VectorPotential(alpha=pot.alpha + g.winding,
                           bumps=pot.bumps,
                           grad_l=pot.grad_l + g.l_field,
                           v=pot.v,
                           obstacle_radius=pot.obstacle_radius)


@lru_cache(maxsize=8)
def _leggauss(nodes: int):
    x, w = np.polynomial.legendre.leggauss(nodes)
    return x, w


def _gl(f, lo: float, hi: float, nodes: int) -> float:
    x, w = _leggauss(nodes)
    t = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    return float(0.5 * (hi - lo) * np.sum(w * f(t)))


@dataclass(frozen=True)
class EikonalPhase:
    """Phase-correction integral along forward (+) or backward (-) rays.

    s_max overrides the automatic Gaussian-envelope truncation of the smooth
    part; nodes sets the Gauss-Legendre order.
    """

    sign: int
    potential: VectorPotential
    s_max: float | None = None
    nodes: int = 800

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise DomainError("sign must be +1 or -1")
        if self.nodes < 64:
            raise DomainError("need >= 64 quadrature nodes")


def _check_region(sign: int, x: np.ndarray, xi: np.ndarray) -> None:
    nx = float(np.hypot(*x))
    nxi = float(np.hypot(*xi))
    if nx <= DELTA_REGION or nxi <= DELTA_REGION:
        raise DomainError(f"|x| and |xi| must exceed {DELTA_REGION}")
    cosang = float(x @ xi) / (nx * nxi)
    if sign * cosang < -1.0 + DELTA_REGION:
        raise DomainError(
            f"(x, xi) in the backward cone: sign*cos = {sign * cosang:.4f} < {-1 + DELTA_REGION}"
        )


def _smooth_ray_cut(pot: VectorPotential, x: np.ndarray, xi: np.ndarray) -> float:
    """Ray parameter beyond which all smooth components of A' are negligible."""
    cut = 0.1
    nxi = float(np.hypot(*xi))
    comps = [(b.center, b.width) for b in pot.bumps]
    comps += [(c.center, c.width) for c in pot.grad_l.components]
    for center, width in comps:
        d = math.hypot(x[0] - center[0], x[1] - center[1])
        cut = max(cut, (d + _ENVELOPE_CUT * width) / nxi)
    return cut


def eikonal_phase(phase: EikonalPhase, x, xi) -> float:
    """Phi_s(x, xi) = -s * int_0^inf A(x + s*t*xi) . xi dt on the allowed region."""
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    _check_region(phase.sign, x, xi)
    pot = phase.potential
    s = phase.sign

    cross = float(x[0] * xi[1] - x[1] * xi[0])
    dot = float(x @ xi)
    dcross = abs(cross)
    if dcross > 1e-14:
        ray_int = math.atan2(dcross, s * dot) / dcross
    else:
        ray_int = 1.0 / (s * dot)
    val = -s * pot.alpha * cross * ray_int

    if pot.bumps or pot.grad_l.components:
        cut = phase.s_max if phase.s_max is not None else _smooth_ray_cut(pot, x, xi)

        def integrand(t):
            pts = x[None, :] + s * t[:, None] * xi[None, :]
            return pot.aprime(pts) @ xi

        val += -s * _gl(integrand, 0.0, cut, phase.nodes)
    return val


def phase_gradient(phase: EikonalPhase, x, xi, step: float | None = None) -> np.ndarray:
    """Central-difference gradient of the phase in x (step 1e-5 * (1 + |x|))."""
    x = np.asarray(x, dtype=float)
    h = step if step is not None else 1e-5 * (1.0 + float(np.hypot(*x)))
    grad = np.empty(2)
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        grad[i] = (eikonal_phase(phase, x + e, xi) - eikonal_phase(phase, x - e, xi)) / (2.0 * h)
    return grad


def phase_gradient_check(phase: EikonalPhase, x, xi) -> float:
    """|xi . (grad_x Phi - A(x))|; zero for exact phases, <= 1e-6 here."""
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    grad = phase_gradient(phase, x, xi)
    return abs(float(xi @ (grad - phase.potential.a_total(x))))


def ray_field_integral(pot: VectorPotential, x, xi, sign: int, nodes: int = 800) -> float:
    """int_0^inf B(x + sign*t*xi) dt along the phase ray (smooth part only)."""
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if not pot.bumps:
        return 0.0
    cut = _smooth_ray_cut(pot, x, xi)

    def integrand(t):
        pts = x[None, :] + sign * t[:, None] * xi[None, :]
        return pot.b_field(pts)

    return _gl(integrand, 0.0, cut, nodes)


def gradient_formula(phase: EikonalPhase, x, xi) -> np.ndarray:
    """Closed-form gradient: (-s*xi2*I_B + A1, +s*xi1*I_B + A2), I_B the ray field integral."""
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    s = phase.sign
    ib = ray_field_integral(phase.potential, x, xi, s, nodes=phase.nodes)
    a = phase.potential.a_total(x)
    return np.array([-s * xi[1] * ib + a[0], s * xi[0] * ib + a[1]])


def phase_decomposition(phase: EikonalPhase, x, xi) -> float:
    """Three-term split of the phase for globally smooth potentials.

        Phi_s = -s*(x cross xi) * int_0^inf int_0^1 B(tau*x + s*t*xi) dtau dt
                + int_0^1 x . A(tau*x) dtau
                - s * int_0^inf A(s*t*xi) . xi dt

    The split moves integration paths through the origin, so it requires the
    smooth family (alpha = 0); the singular flux part breaks the boundary
    terms the rearrangement relies on.
    """
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    _check_region(phase.sign, x, xi)
    pot = phase.potential
    if pot.alpha != 0.0:
        raise DomainError("decomposition identity requires a smooth potential (alpha = 0)")
    s = phase.sign
    nxi = float(np.hypot(*xi))

    rad = pot.envelope_radius()
    cut = (float(np.hypot(*x)) + rad) / nxi + 0.1
    tx, tw = _leggauss(128)
    tau = 0.5 * tx + 0.5
    tauw = 0.5 * tw

    def b_slice(t):
        # int_0^1 B(tau*x + s*t*xi) dtau for each t
        pts = tau[:, None, None] * x[None, None, :] + s * t[None, :, None] * xi[None, None, :]
        bb = pot.b_field(pts.reshape(-1, 2)).reshape(tau.size, t.size)
        return tauw @ bb

    cross = float(x[0] * xi[1] - x[1] * xi[0])
    term1 = -s * cross * _gl(b_slice, 0.0, cut, phase.nodes)

    def radial(tauv):
        pts = tauv[:, None] * x[None, :]
        return (pot.aprime(pts) * x[None, :]).sum(axis=1)

    term2 = _gl(radial, 0.0, 1.0, 256)

    cut0 = (rad + 0.1) / nxi

    def axis(t):
        pts = s * t[:, None] * xi[None, :]
        return pot.aprime(pts) @ xi

    term3 = -s * _gl(axis, 0.0, cut0, phase.nodes)
    return term1 + term2 + term3
