"""Lacunary witness families of normalized indicators.

Level j uses ``phi_j = g_{a_j}`` with tolerance ``gamma_j = eps 2^-j`` and
three sets, all symmetric about 0 and stored by their positive halves:

* time side ``G_j = [eta_j/a_j, 1/a_j)`` (mass of phi_j) and ``E_j = [0, eta_j/a_j)``,
* frequency side ``Ghat_j = [nuL_j a_j, nuR_j a_j)`` (mass of F phi_j),
* rearrangement side ``I_j = [deltaL_j a_j, deltaR_j a_j)``.

Every frequency-side inequality is scale free, so it is certified once on
the reference profile (scale 1) and holds verbatim at scale ``a_j``.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import DomainError, UnresolvedError, ValidationError
from .fourier import (
    ReferenceProfile,
    Resolution,
    check_exponent,
    cube_test_function,
    reference_profile,
    sinc_sum_enclosure,
)
from .lorentz import Bracket, LorentzIndex, conjugate, lorentz_norm_enclosure, lorentz_power_enclosure, lp_norm_pc
from .measure import RearrangementEnclosure, rearrange_enclosure

__all__ = [
    "LevelCertificate",
    "WitnessLevel",
    "WitnessFamily",
    "find_eta",
    "find_frequency_window",
    "find_rearrangement_window",
    "next_scale",
    "certify_level",
    "check_disjointness",
    "build_family",
    "family_from_certificate",
    "level_brackets_at_scale",
    "certificate_hash",
]

SAFETY = 0.99
THETA = 0.75
DELTA_SAFETY = 0.5
SCALE_MARGIN = Fraction(1001, 1000)
SEED_WINDOW = (0.25, 16.0)
# Searches aim this fraction below their budget so certified margins are not
# at rounding level.
SEARCH_SLACK = 1e-3
_BISECT_STEPS = 40


def find_eta(p: float, gamma: float, safety: float = SAFETY) -> float:
    """``safety * (1 - (1-gamma)^p)``: then ``||g_1 chi_{eta<|t|<1}||_p > 1 - gamma``."""
    check_exponent(p)
    if not 0 < gamma < 1:
        raise DomainError("gamma must lie in (0, 1)")
    return safety * (1.0 - (1.0 - gamma) ** p)


def _restricted(profile: ReferenceProfile, region) -> RearrangementEnclosure:
    return rearrange_enclosure(profile.grid.restrict(region))


def _off_region(nuL, nuR):
    return ((0.0, nuL), (nuR, math.inf))


def _norm_hi(profile, region, idx=None) -> float:
    idx = idx or profile.index
    return lorentz_norm_enclosure(_restricted(profile, region), idx).hi


def _log_bisect(ok, fail, passes, steps=_BISECT_STEPS):
    """Move the certified end ``ok`` toward ``fail``; returns the final ``ok``."""
    for _ in range(steps):
        mid = math.sqrt(ok * fail)
        if mid in (ok, fail):
            break
        if passes(mid):
            ok = mid
        else:
            fail = mid
    return ok


def find_frequency_window(
    p: float,
    gamma: float,
    profile: ReferenceProfile,
    *,
    theta: float = THETA,
    seed: tuple = SEED_WINDOW,
) -> tuple:
    """Window ``(nuL, nuR)`` whose complement carries a (p',p) norm of
    ``F g_1`` at most ``c_p^lo * gamma / 2`` (certified upper bracket).

    ``nuR`` is found first with budget ``theta`` times the total, then
    ``nuL`` fills the rest. A seed that already certifies is returned as is.
    The search aims at ``1 - SEARCH_SLACK`` of the budget.
    """
    p = check_exponent(p)
    if abs(profile.p - p) > 1e-15:
        raise DomainError("profile was built for a different p")
    if not 0 < gamma <= 1:
        raise DomainError("gamma must lie in (0, 1]")
    budget = profile.cp.lo * gamma / 2 * (1 - SEARCH_SLACK)
    nuL, nuR = seed
    if _norm_hi(profile, _off_region(nuL, nuR)) <= budget:
        return float(nuL), float(nuR)

    high_ok = lambda r: _norm_hi(profile, ((r, math.inf),)) <= theta * budget
    limit = 1e3 * profile.grid.cutoff
    r = nuR
    while not high_ok(r):
        r *= 2
        if r > limit:
            raise UnresolvedError(
                "high-frequency tail never certifies",
                achieved=_norm_hi(profile, ((r, math.inf),)),
            )
    if r > nuR:
        r = _log_bisect(r, r / 2, high_ok)

    both_ok = lambda l: _norm_hi(profile, _off_region(l, r)) <= budget
    l = nuL
    while not both_ok(l):
        l /= 4
        if l < 1e-300:
            raise UnresolvedError("low-frequency part never certifies", achieved=_norm_hi(profile, _off_region(l, r)))
    if l < nuL:
        l = _log_bisect(l, 4 * l, both_ok)
    return float(l), float(r)


def _invert_cumulative(bps, vals, cum, beta, s, q):
    k = int(np.searchsorted(cum, q, side="right")) - 1
    k = min(max(k, 0), vals.size - 1)
    return (bps[k] ** beta + beta * (q - cum[k]) / vals[k] ** s) ** (1.0 / beta)


def find_rearrangement_window(
    p: float,
    gamma: float,
    profile: ReferenceProfile,
    nuL: float,
    nuR: float,
    *,
    safety: float = DELTA_SAFETY,
) -> tuple:
    """Window ``(deltaL, deltaR)`` in the rearrangement variable on which the
    certified lower bracket of ``int t^{p/p'-1} ((F g_1 chi_window)^*)^p dt``
    still reaches ``(c_p^hi (1-gamma))^p``.

    The cumulative integral of the lower step rearrangement is inverted in
    closed form; ``safety`` is the share of the excess over the target given
    up at the two ends (half each).
    """
    p = check_exponent(p)
    if not 0 < nuL < nuR:
        raise DomainError("need 0 < nuL < nuR")
    idx = profile.index
    h = _restricted(profile, ((nuL, nuR),))
    bps, vals = h.lower.arrays()
    beta, s = idx.beta, idx.s
    pw = bps ** beta
    cum = np.concatenate([[0.0], np.cumsum(vals ** s * (pw[1:] - pw[:-1]) / beta)])
    total = lorentz_power_enclosure(h, idx).lo
    target = (profile.cp.hi * (1.0 - gamma)) ** p
    excess = min(total, float(cum[-1])) - target
    if excess <= 0:
        raise UnresolvedError(
            "window carries too little of the norm",
            achieved=max(total, 0.0) ** (1.0 / p),
        )
    give = safety * excess / 2
    dL = _invert_cumulative(bps, vals, cum, beta, s, give)
    dR = _invert_cumulative(bps, vals, cum, beta, s, float(cum[-1]) - give)
    got = lorentz_power_enclosure(h, idx, (dL, dR)).lo
    if not (0 < dL < dR < 2 * (nuR - nuL)) or got < target:
        raise UnresolvedError("rearrangement window failed to certify", achieved=got ** (1.0 / p))
    return float(dL), float(dR)


def _smallest_rational_at_least(x: Fraction, max_denominator: int) -> Fraction:
    best = None
    for q in range(1, max_denominator + 1):
        cand = Fraction(-((-x.numerator * q) // x.denominator), q)
        if best is None or cand < best:
            best = cand
    return best


def next_scale(prev, eta_next, nuL_next, deltaL_next, margin=SCALE_MARGIN, max_denominator: int = 1) -> Fraction:
    """Smallest rational with denominator <= ``max_denominator`` that is at
    least ``margin * a_prev * max(1/eta_prev, nuR_prev/nuL_next, deltaR_prev/deltaL_next)``.

    ``prev`` needs attributes ``a, eta, nuR, deltaR``. ``eta_next`` does not
    enter the rule (only the predecessor's eta does) but is validated.
    """
    for v in (eta_next, nuL_next, deltaL_next):
        if not v > 0:
            raise DomainError("thresholds must be positive")
    margin = Fraction(margin)
    if margin < 1:
        raise DomainError("margin must be >= 1")
    if max_denominator < 1 or max_denominator > 10 ** 5:
        raise DomainError("max_denominator must lie in [1, 1e5]")
    factor = max(
        1 / Fraction(prev.eta),
        Fraction(prev.nuR) / Fraction(nuL_next),
        Fraction(prev.deltaR) / Fraction(deltaL_next),
    )
    return _smallest_rational_at_least(Fraction(prev.a) * factor * margin, max_denominator)


@dataclass(frozen=True)
class LevelCertificate:
    """Scale-free certified values for one level (see module docstring)."""

    time_value: float
    time_margin: float
    e_norm: float
    e_margin: float
    off_upper: float
    off_margin: float
    window_lower: float
    window_margin: float
    lebesgue_window_lower: float
    lebesgue_off_upper: float

    @property
    def passed(self) -> bool:
        return min(self.time_margin, self.e_margin, self.off_margin, self.window_margin) > 0

    def margins(self) -> dict:
        return {
            "time": self.time_margin,
            "e_norm": self.e_margin,
            "off": self.off_margin,
            "window": self.window_margin,
        }


def certify_level(profile: ReferenceProfile, gamma, eta, nuL, nuR, deltaL, deltaR) -> LevelCertificate:
    p = profile.p
    g1 = cube_test_function(1, p)
    time_value = lp_norm_pc(g1.restrict(((-1, -eta), (eta, 1))), p)
    e_norm = lp_norm_pc(g1.restrict(((-eta, eta),)), p)
    idx = profile.index
    leb = LorentzIndex(conjugate(p), conjugate(p))
    off = _restricted(profile, _off_region(nuL, nuR))
    win = _restricted(profile, ((nuL, nuR),))
    off_upper = lorentz_norm_enclosure(off, idx).hi
    window_lower = lorentz_norm_enclosure(win, idx, (deltaL, deltaR)).lo
    return LevelCertificate(
        time_value=time_value,
        time_margin=time_value - (1 - gamma),
        e_norm=e_norm,
        e_margin=gamma - e_norm,
        off_upper=off_upper,
        off_margin=profile.cp.lo * gamma / 2 - off_upper,
        window_lower=window_lower,
        window_margin=window_lower - profile.cp.hi * (1 - gamma),
        lebesgue_window_lower=lorentz_norm_enclosure(win, leb).lo,
        lebesgue_off_upper=lorentz_norm_enclosure(off, leb).hi,
    )


@dataclass(frozen=True)
class WitnessLevel:
    j: int
    gamma: float
    a: Fraction
    eta: float
    nuL: float
    nuR: float
    deltaL: float
    deltaR: float
    cert: Optional[LevelCertificate] = None

    def __post_init__(self):
        if self.j < 1:
            raise DomainError("level index starts at 1")
        if not self.a > 0:
            raise DomainError("scale must be positive")
        if not 0 < self.eta < 1:
            raise ValidationError("eta must lie in (0, 1)")
        if not 0 < self.nuL < self.nuR:
            raise ValidationError("need 0 < nuL < nuR")
        if not 0 < self.deltaL < self.deltaR < 2 * (self.nuR - self.nuL):
            raise ValidationError("need 0 < deltaL < deltaR < 2 (nuR - nuL)")
        object.__setattr__(self, "a", Fraction(self.a))

    # positive halves of the symmetric sets, with exact endpoints
    @property
    def G(self) -> tuple:
        return (Fraction(self.eta) / self.a, 1 / self.a)

    @property
    def E(self) -> tuple:
        return (Fraction(0), Fraction(self.eta) / self.a)

    @property
    def Ghat(self) -> tuple:
        return (Fraction(self.nuL) * self.a, Fraction(self.nuR) * self.a)

    @property
    def I(self) -> tuple:
        return (Fraction(self.deltaL) * self.a, Fraction(self.deltaR) * self.a)

    def to_dict(self) -> dict:
        d = {
            "j": self.j,
            "gamma": self.gamma,
            "a": str(self.a),
            "eta": self.eta,
            "nuL": self.nuL,
            "nuR": self.nuR,
            "deltaL": self.deltaL,
            "deltaR": self.deltaR,
        }
        if self.cert is not None:
            c = self.cert
            d["certified"] = {
                "time": {"value": c.time_value, "target": 1 - self.gamma, "margin": c.time_margin},
                "e_norm": {"value": c.e_norm, "target": self.gamma, "margin": c.e_margin},
                "off_window": {"upper": c.off_upper, "margin": c.off_margin},
                "window": {"lower": c.window_lower, "margin": c.window_margin},
                "lebesgue": {"window_lower": c.lebesgue_window_lower, "off_upper": c.lebesgue_off_upper},
            }
        return d


def _separated(iv1, iv2) -> bool:
    return iv1[1] < iv2[0] or iv2[1] < iv1[0]


def check_disjointness(levels) -> dict:
    """Exact pairwise disjointness of G, Ghat and I across levels."""
    out = {}
    for name in ("G", "Ghat", "I"):
        ivs = [getattr(l, name) for l in levels]
        out[name] = all(_separated(ivs[i], ivs[k]) for i in range(len(ivs)) for k in range(i + 1, len(ivs)))
    return out


def _canonical(doc) -> bytes:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False).encode()


def certificate_hash(doc: dict) -> str:
    return hashlib.sha256(_canonical(doc)).hexdigest()


@dataclass(frozen=True, eq=False)
class WitnessFamily:
    p: float
    epsilon: float
    levels: tuple
    cp: Bracket
    profile: Optional[ReferenceProfile] = field(default=None, repr=False)
    parameters: dict = field(default_factory=dict)
    reverification: Optional[dict] = None
    d: int = 1

    @property
    def J(self) -> int:
        return len(self.levels)

    @property
    def disjointness(self) -> dict:
        return check_disjointness(self.levels)

    @property
    def certified(self) -> bool:
        return (
            all(l.cert is not None and l.cert.passed for l in self.levels)
            and all(self.disjointness.values())
            and (self.reverification is None or self.reverification["preserved"])
        )

    @property
    def scales(self) -> list:
        return [l.a for l in self.levels]

    def certificate(self) -> dict:
        doc = {
            "kind": "witness-family",
            "p": self.p,
            "epsilon": self.epsilon,
            "d": self.d,
            "J": self.J,
            "cp": self.cp.to_dict(),
            "levels": [l.to_dict() for l in self.levels],
            "disjoint": self.disjointness,
            "parameters": self.parameters,
            "certified": self.certified,
        }
        if self.profile is not None:
            doc["profile"] = self.profile.to_json()
        if self.reverification is not None:
            doc["reverification"] = self.reverification
        return doc

    @property
    def sha256(self) -> str:
        return certificate_hash(self.certificate())

    def reverify(self, resolution: Resolution) -> dict:
        """Recompute every level certificate on a profile at ``resolution``
        and report whether each margin kept its sign."""
        prof = reference_profile(self.p, resolution=resolution)
        rows = []
        preserved = True
        for l in self.levels:
            c = certify_level(prof, l.gamma, l.eta, l.nuL, l.nuR, l.deltaL, l.deltaR)
            ok = all((m > 0) == (l.cert.margins()[k] > 0) for k, m in c.margins().items())
            preserved = preserved and ok and c.passed
            rows.append({"j": l.j, "margins": c.margins(), "preserved": ok})
        return {"resolution": resolution.to_dict(), "cp": prof.cp.to_dict(), "levels": rows, "preserved": preserved}


def build_family(
    p: float,
    epsilon: float,
    J: int,
    resolution: Optional[Resolution] = None,
    *,
    profile: Optional[ReferenceProfile] = None,
    theta: float = THETA,
    margin=SCALE_MARGIN,
    max_denominator: int = 1,
    reverify: bool = False,
) -> WitnessFamily:
    """Build and certify ``J`` levels with ``gamma_j = epsilon 2^-j``.

    Raises :class:`UnresolvedError` (with ``level``) when some inequality
    cannot be certified at the given resolution.
    """
    p = check_exponent(p)
    if not 0 < epsilon < 1:
        raise DomainError("epsilon must lie in (0, 1)")
    if not (isinstance(J, int) and J >= 1):
        raise DomainError("J must be a positive integer")
    if profile is None:
        profile = reference_profile(p, resolution=resolution)
    levels = []
    for j in range(1, J + 1):
        gamma = epsilon / 2 ** j
        eta = min(find_eta(p, gamma), SAFETY * gamma ** p)
        try:
            nuL, nuR = find_frequency_window(p, gamma, profile, theta=theta)
            if levels:
                nuL = min(nuL, levels[-1].nuL)
                nuR = max(nuR, levels[-1].nuR)
            dL, dR = find_rearrangement_window(p, gamma, profile, nuL, nuR)
        except UnresolvedError as exc:
            raise UnresolvedError(f"level {j}: {exc}", achieved=exc.achieved, level=j) from exc
        a = Fraction(1) if not levels else next_scale(levels[-1], eta, nuL, dL, margin, max_denominator)
        cert = certify_level(profile, gamma, eta, nuL, nuR, dL, dR)
        if not cert.passed:
            raise UnresolvedError(f"level {j} failed to certify: {cert.margins()}", achieved=cert.margins(), level=j)
        levels.append(WitnessLevel(j, gamma, a, eta, nuL, nuR, dL, dR, cert))
    params = {
        "theta": theta,
        "scale_margin": str(Fraction(margin)),
        "max_denominator": max_denominator,
        "eta_safety": SAFETY,
        "delta_safety": DELTA_SAFETY,
        "resolution": profile.resolution.to_dict(),
    }
    fam = WitnessFamily(p, epsilon, tuple(levels), profile.cp, profile, params)
    if reverify:
        fam = WitnessFamily(p, epsilon, fam.levels, fam.cp, profile, params, fam.reverify(profile.resolution.refined()))
    return fam


def family_from_certificate(doc: dict) -> WitnessFamily:
    """Rebuild a family (thresholds and stored certified values) from JSON."""
    if doc.get("kind") != "witness-family":
        raise ValidationError("not a witness-family certificate")
    levels = []
    for d in doc["levels"]:
        cert = None
        if "certified" in d:
            c = d["certified"]
            cert = LevelCertificate(
                c["time"]["value"], c["time"]["margin"], c["e_norm"]["value"], c["e_norm"]["margin"],
                c["off_window"]["upper"], c["off_window"]["margin"], c["window"]["lower"], c["window"]["margin"],
                c["lebesgue"]["window_lower"], c["lebesgue"]["off_upper"],
            )
        levels.append(WitnessLevel(d["j"], d["gamma"], Fraction(d["a"]), d["eta"], d["nuL"], d["nuR"],
                                   d["deltaL"], d["deltaR"], cert))
    return WitnessFamily(
        doc["p"], doc["epsilon"], tuple(levels), Bracket(doc["cp"]["lo"], doc["cp"]["hi"]),
        None, doc.get("parameters", {}), doc.get("reverification"), doc.get("d", 1),
    )


def level_brackets_at_scale(level: WitnessLevel, p: float, resolution: Resolution) -> dict:
    """Off-window upper and windowed lower brackets of ``F g_{a_j}`` computed
    directly at scale ``a_j`` on a stretched grid, without the scaling law."""
    a = float(level.a)
    amp = (2.0 / a) ** (1.0 / conjugate(p))
    grid = sinc_sum_enclosure(resolution.edges() * a, [a], [amp])
    idx = LorentzIndex.fourier_target(p)
    gh = (level.nuL * a, level.nuR * a)
    off = lorentz_norm_enclosure(rearrange_enclosure(grid.restrict(((0.0, gh[0]), (gh[1], math.inf)))), idx)
    win = lorentz_norm_enclosure(
        rearrange_enclosure(grid.restrict((gh,))), idx, (level.deltaL * a, level.deltaR * a)
    )
    return {"off": off, "window": win}
