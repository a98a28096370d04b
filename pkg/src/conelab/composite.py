"""Bipartite composites: min/max tensor cones, the complex-matrix composite,
and the classical composite, with marginals, conditioning maps, and steering.

Coordinates: a bipartite element is the flattened dA x dB matrix of its
coefficients in the product of the factor coordinate bases, so the pairing
with a product functional eA (x) eB is eA^T M eB.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exact
from .axioms import AxiomVerdict, FAILS, HOLDS
from .cones import (DEFAULT_TOL, ConeError, ConeModel, EJACone,
                    PolyhedralCone, PositiveMap, SharedCornerCone, System,
                    UnsupportedQuery, face_dimension, is_extremal_ray,
                    is_order_isomorphism, validate_measurement)
from .eja import JordanAlgebra, SimpleFactor, complex_herm

MIN_TENSOR = "min"
MAX_TENSOR = "max"
HILBERT = "hilbert"
CLASSICAL = "classical"


def _pure_effect_minimizing(factor: SimpleFactor, x: np.ndarray):
    """(value, pure effect) minimizing <e, x> over normalized pure effects."""
    dec = factor.spectral(x)
    k = int(np.argmin(dec.eigenvalues))
    p = dec.idempotents[k]
    e = 2.0 * p if factor.family == "spin" else p
    return float(dec.eigenvalues[k]), e


class LinearImageCone(ConeModel):
    """Cone obtained from another cone by an orthogonal change of coordinates;
    x belongs here exactly when R @ x belongs to the wrapped cone."""

    def __init__(self, inner: ConeModel, rot: np.ndarray):
        self.inner = inner
        self.rot = np.asarray(rot, dtype=float)
        self.dim = self.rot.shape[1]
        if not np.allclose(self.rot.T @ self.rot, np.eye(self.dim), atol=1e-10):
            raise ConeError("coordinate change must be orthogonal")

    def member(self, x, tol=DEFAULT_TOL):
        self._check_dim(x)
        return self.inner.member(self.rot @ x, tol)

    def margin(self, x):
        return self.inner.margin(self.rot @ x)

    def dual_member(self, e, tol=DEFAULT_TOL):
        return self.inner.dual_member(self.rot @ e, tol)

    def generators(self):
        return [self.rot.T @ g for g in self.inner.generators()]

    def sample_extremal(self, rng):
        return self.rot.T @ self.inner.sample_extremal(rng)

    def face_span_basis(self, x, tol):
        return [self.rot.T @ b for b in self.inner.face_span_basis(self.rot @ x, tol)]


class MaxTensorCone(ConeModel):
    """All bipartite elements nonnegative against product effects.  Membership
    is a sampling certificate: a negative pairing is a hard rejection, while a
    nonnegative minimum over sampled and locally minimized product effects is
    acceptance at sampling strength only."""

    def __init__(self, comp: "CompositeSystem", samples: int = 200,
                 sweeps: int = 25, seed: int = 23):
        self.comp = comp
        self.dim = comp.dim
        self.samples = samples
        self.sweeps = sweeps
        self.seed = seed

    def pairing_minimum(self, x: np.ndarray) -> float:
        comp = self.comp
        m = x.reshape(comp.dimA, comp.dimB)
        rng = np.random.default_rng(self.seed)
        best = np.inf
        fa = comp._simple_factor(comp.factorA)
        fb = comp._simple_factor(comp.factorB)
        if fa is not None and fb is not None:
            # alternating exact minimization over pure product effects
            for _ in range(8):
                f = comp.factorB.cone.sample_extremal(rng)
                if fb.family == "spin":
                    f = 2.0 * f
                for _ in range(self.sweeps):
                    _, e = _pure_effect_minimizing(fa, m @ f)
                    _, f = _pure_effect_minimizing(fb, m.T @ e)
                best = min(best, float(e @ m @ f))
            return best
        for _ in range(self.samples):
            e = self._dual_sample(comp.factorA, rng)
            f = self._dual_sample(comp.factorB, rng)
            best = min(best, float(e @ m @ f))
        return best

    @staticmethod
    def _dual_sample(system: System, rng) -> np.ndarray:
        cone = system.cone
        if isinstance(cone, PolyhedralCone):
            facets = [np.array([float(v) for v in f])
                      for f in cone.data.facets()]
            w = rng.random(len(facets))
            return sum(wi * f for wi, f in zip(w, facets))
        if isinstance(cone, EJACone):
            w = cone.sample_extremal(rng)
            out = w.copy()
            for s in cone.algebra.summands:
                if s.factor.family == "spin":
                    out[s.sl] = 2.0 * w[s.sl]
            return out
        raise UnsupportedQuery("no dual sampler for this factor cone")

    def member(self, x, tol=DEFAULT_TOL):
        self._check_dim(x)
        return self.pairing_minimum(x) >= -tol

    def margin(self, x):
        return self.pairing_minimum(x)

    def generators(self):
        return self.comp.product_generators()

    def sample_extremal(self, rng):
        return self.comp.product_state(
            self.comp.factorA.cone.sample_extremal(rng),
            self.comp.factorB.cone.sample_extremal(rng))

    def face_span_basis(self, x, tol):
        comp = self.comp
        wa = marginal_of(comp, x, "A")
        wb = marginal_of(comp, x, "B")
        ua = float(comp.factorA.unit @ wa)
        if ua <= tol:
            raise UnsupportedQuery("zero element has the trivial face")
        prod = comp.product_state(wa, wb) / ua
        if np.max(np.abs(prod - x)) > 1e-7 * max(1.0, np.max(np.abs(x))):
            raise UnsupportedQuery("face span only available at product states")
        ba = comp.factorA.cone.face_span_basis(wa, tol)
        bb = comp.factorB.cone.face_span_basis(wb, tol)
        return [np.outer(a, b).ravel() for a in ba for b in bb]


class CompositeSystem:
    """Two factor systems joined by one of the four composite models."""

    def __init__(self, factorA: System, factorB: System, model: str):
        if model not in (MIN_TENSOR, MAX_TENSOR, HILBERT, CLASSICAL):
            raise ConeError(f"unknown composite model: {model}")
        self.factorA = factorA
        self.factorB = factorB
        self.model = model
        self.dimA = factorA.dim
        self.dimB = factorB.dim
        self.dim = self.dimA * self.dimB
        self.unit = np.kron(factorA.unit, factorB.unit)
        self.cone = self._build_cone()
        self.system = System(self.cone, self.unit,
                             f"{factorA.label} (x) {factorB.label} [{model}]")

    @staticmethod
    def _simple_factor(system: System) -> SimpleFactor | None:
        cone = system.cone
        if isinstance(cone, EJACone) and cone.algebra.is_simple():
            return cone.algebra.factors[0]
        return None

    @staticmethod
    def _classical_size(system: System) -> int | None:
        cone = system.cone
        if isinstance(cone, EJACone) and all(
                f.family == "real" and f.rank == 1
                for f in cone.algebra.factors):
            return len(cone.algebra.factors)
        return None

    def _build_cone(self) -> ConeModel:
        if self.model == CLASSICAL:
            if self._classical_size(self.factorA) is None or \
                    self._classical_size(self.factorB) is None:
                raise ConeError("classical composite requires simplex factors")
            rays = [[Fraction(int(i == k)) for i in range(self.dim)]
                    for k in range(self.dim)]
            return PolyhedralCone(rays)
        if self.model == HILBERT:
            fa = self._simple_factor(self.factorA)
            fb = self._simple_factor(self.factorB)
            if fa is None or fb is None or fa.family != "complex" \
                    or fb.family != "complex":
                raise ConeError("the quantum composite requires complex "
                                "matrix factors")
            glob = complex_herm(fa.rank * fb.rank)
            gf = glob.factors[0]
            rot = np.zeros((glob.dim, self.dim))
            for i in range(self.dimA):
                for j in range(self.dimB):
                    prod = np.kron(fa._basis[i], fb._basis[j])
                    rot[:, i * self.dimB + j] = gf.from_matrix(prod)
            return LinearImageCone(EJACone(glob), rot)
        if self.model == MIN_TENSOR:
            ca, cb = self.factorA.cone, self.factorB.cone
            if isinstance(ca, PolyhedralCone) and isinstance(cb, PolyhedralCone):
                rays = []
                for ra in ca.data.rays:
                    for rb in cb.data.rays:
                        rays.append([a * b for a in ra for b in rb])
                return PolyhedralCone(rays)
            raise UnsupportedQuery("exact min-tensor cone needs polyhedral "
                                   "factors")
        return MaxTensorCone(self)

    # -- elements ------------------------------------------------------------

    def product_state(self, wa: np.ndarray, wb: np.ndarray) -> np.ndarray:
        wa = np.asarray(wa, dtype=float)
        wb = np.asarray(wb, dtype=float)
        if wa.shape != (self.dimA,) or wb.shape != (self.dimB,):
            raise ConeError("dimension mismatch in product state")
        return np.outer(wa, wb).ravel()

    def product_effect(self, ea: np.ndarray, eb: np.ndarray) -> np.ndarray:
        ea = np.asarray(ea, dtype=float)
        eb = np.asarray(eb, dtype=float)
        if ea.shape != (self.dimA,) or eb.shape != (self.dimB,):
            raise ConeError("dimension mismatch in product effect")
        return np.kron(ea, eb)

    def product_generators(self) -> list[np.ndarray]:
        return [self.product_state(a, b)
                for a in self.factorA.cone.generators()
                for b in self.factorB.cone.generators()]

    def sample_state(self, rng) -> np.ndarray:
        if isinstance(self.cone, LinearImageCone):
            inner = self.cone.inner
            return self.cone.rot.T @ inner.algebra.random_positive(rng)
        gens = self.product_generators()
        w = rng.random(len(gens))
        return sum(wi * g for wi, g in zip(w, gens))

    def sample_pure(self, rng) -> np.ndarray:
        w = self.cone.sample_extremal(rng)
        return w / float(self.unit @ w)


def marginal_of(comp: CompositeSystem, wab: np.ndarray, side: str) -> np.ndarray:
    wab = np.asarray(wab, dtype=float)
    m = wab.reshape(comp.dimA, comp.dimB)
    if side == "A":
        return m @ comp.factorB.unit
    if side == "B":
        return m.T @ comp.factorA.unit
    raise ConeError("side must be 'A' or 'B'")


@dataclass
class ConditioningMap:
    """e on A  |->  sub-normalized conditional state of B."""
    matrix: np.ndarray
    state: np.ndarray

    def __call__(self, e: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(e, dtype=float)


def conditioning_map(comp: CompositeSystem, wab: np.ndarray) -> ConditioningMap:
    wab = np.asarray(wab, dtype=float)
    m = wab.reshape(comp.dimA, comp.dimB)
    cmap = ConditioningMap(m.T.copy(), wab.copy())
    lhs = cmap(comp.factorA.unit)
    rhs = marginal_of(comp, wab, "B")
    if np.max(np.abs(lhs - rhs)) > 0:
        raise ConeError("conditioning map fails the marginal identity")
    return cmap


INFEASIBLE = "infeasible"


def steer(comp: CompositeSystem, wab: np.ndarray, ensemble: list[np.ndarray],
          tol: float = 1e-8):
    """Measurement on A whose conditional states realize the ensemble, the
    string 'infeasible' when none exists, or UnsupportedQuery when this
    solver cannot decide."""
    wab = np.asarray(wab, dtype=float)
    cmap = conditioning_map(comp, wab)
    wb = marginal_of(comp, wab, "B")
    ens = [np.asarray(w, dtype=float) for w in ensemble]
    for w in ens:
        if not comp.factorB.cone.member(w, max(tol, 1e-8)):
            raise ConeError("ensemble member outside the B cone")
    if np.max(np.abs(sum(ens) - wb)) > tol:
        raise ConeError("ensemble does not sum to the B marginal")

    mt = cmap.matrix  # dimB x dimA
    # image check: targets outside the range of the conditioning map are
    # unreachable regardless of effect constraints
    for w in ens:
        sol, res, *_ = np.linalg.lstsq(mt, w, rcond=None)
        if np.max(np.abs(mt @ sol - w)) > max(tol, 1e-8):
            return INFEASIBLE

    if comp.dimA == comp.dimB and \
            np.linalg.matrix_rank(mt, tol=1e-10) == comp.dimA:
        inv = np.linalg.inv(mt)
        effects = [inv @ w for w in ens]
        if validate_measurement(comp.factorA, effects, max(tol, 1e-8)):
            return effects
        return INFEASIBLE

    ca = comp.factorA.cone
    if isinstance(ca, PolyhedralCone):
        return _steer_lp(comp, mt, ens, tol)
    raise UnsupportedQuery("solver unsupported for singular conditioning "
                           "maps over non-polyhedral factors")


def _steer_lp(comp: CompositeSystem, mt: np.ndarray, ens, tol):
    """Exact feasibility over effect coordinates: each effect is a nonnegative
    combination of A facet normals, effects sum to the unit."""
    ca: PolyhedralCone = comp.factorA.cone
    facets = ca.data.facets()
    nf = len(facets)
    k = len(ens)
    da, db = comp.dimA, comp.dimB

    def frac(x):
        return Fraction(float(x)).limit_denominator(10**9)

    mt_x = [[frac(mt[i, j]) for j in range(da)] for i in range(db)]
    fmat = [[facets[j][i] for j in range(nf)] for i in range(da)]  # da x nf
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for idx, w in enumerate(ens):
        for i in range(db):
            row = [Fraction(0)] * (nf * k)
            for j in range(nf):
                row[idx * nf + j] = sum(
                    (mt_x[i][a] * facets[j][a] for a in range(da)),
                    Fraction(0))
            rows.append(row)
            rhs.append(frac(w[i]))
    for a in range(da):
        row = [Fraction(0)] * (nf * k)
        for idx in range(k):
            for j in range(nf):
                row[idx * nf + j] = fmat[a][j]
        rows.append(row)
        rhs.append(frac(comp.factorA.unit[a]))
    sol = exact.feasible_nonneg(rows, rhs)
    if sol is None:
        return INFEASIBLE
    effects = []
    for idx in range(k):
        e = np.zeros(da)
        for j in range(nf):
            e += float(sol[idx * nf + j]) * np.array(
                [float(v) for v in facets[j]])
        effects.append(e)
    return effects


def steering_order_iso_check(comp: CompositeSystem, wab: np.ndarray,
                             tol: float = DEFAULT_TOL,
                             ensembles: int = 20, seed: int = 7) -> AxiomVerdict:
    """Injective conditioning map with interior marginal gives an order
    isomorphism onto the B cone; then every ensemble of the marginal is
    steerable, spot-verified on random ensembles."""
    wab = np.asarray(wab, dtype=float)
    wb = marginal_of(comp, wab, "B")
    if comp.factorB.cone.margin(wb) <= tol:
        raise ConeError("steering check requires an interior B marginal")
    cmap = conditioning_map(comp, wab)
    rank = int(np.linalg.matrix_rank(cmap.matrix, tol=1e-10))
    if rank < comp.dimA:
        return AxiomVerdict("steering-order-iso", FAILS, violation={
            "rank": rank, "needed": comp.dimA},
            detail="conditioning map is not injective")
    pmap = PositiveMap(cmap.matrix, comp.factorA, comp.factorB)
    verdict = is_order_isomorphism(pmap, tol=tol, seed=seed)
    if not verdict.ok:
        return AxiomVerdict("steering-order-iso", FAILS, violation={
            "direction": verdict.direction, "point": verdict.violation})
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(ensembles):
        ens = random_ensemble(comp.factorB, wb, 3, rng)
        effects = steer(comp, wab, ens, tol=1e-8)
        if effects == INFEASIBLE:
            return AxiomVerdict("steering-order-iso", FAILS, violation={
                "ensemble": ens}, detail="spot ensemble not steerable")
        for e, w in zip(effects, ens):
            worst = max(worst, float(np.max(np.abs(cmap(e) - w))))
    return AxiomVerdict(
        "steering-order-iso", HOLDS, witness=pmap, margin=worst,
        detail="injective conditioning map with interior marginal is an "
               "order isomorphism; every ensemble of the marginal is "
               f"steerable (spot-verified on {ensembles} ensembles)")


def random_ensemble(system: System, target: np.ndarray, parts: int,
                    rng) -> list[np.ndarray]:
    """Random decomposition of target into `parts` cone members."""
    out = []
    rest = target.copy()
    for _ in range(parts - 1):
        cand = system.cone.sample_extremal(rng)
        cand = cand / max(float(system.unit @ cand), 1e-12)
        hi = 1.0
        while hi > 1e-6 and not system.cone.member(rest - hi * cand, 1e-12):
            hi *= 0.5
        take = 0.5 * hi * rng.random()
        out.append(take * cand)
        rest = rest - take * cand
    out.append(rest)
    return out


def canonical_self_steering_state(comp: CompositeSystem) -> np.ndarray:
    """Bipartite element steering its own marginal: the conditioning map is
    1/rank of the identity in trace-form coordinates (for the quantum model,
    the maximally entangled state, whose conditioning map is the scaled
    transpose)."""
    n = comp._classical_size(comp.factorA)
    if comp.model == CLASSICAL:
        if n != comp._classical_size(comp.factorB):
            raise ConeError("classical factors must have equal size")
        return np.eye(n).ravel() / n
    fa = comp._simple_factor(comp.factorA)
    fb = comp._simple_factor(comp.factorB)
    if fa is None or fb is None:
        raise ConeError("canonical self-steering state needs simple factors; "
                        "construct per summand and mix for direct sums")
    if fa.descriptor() != fb.descriptor():
        raise ConeError("factors must be isomorphic")
    if comp.model == HILBERT:
        r = fa.rank
        vec = np.zeros(r * r)
        vec[:: r + 1] = 1.0 / np.sqrt(r)
        rho = np.outer(vec, vec)
        m = np.zeros((comp.dimA, comp.dimB))
        for i in range(comp.dimA):
            for j in range(comp.dimB):
                m[i, j] = float(np.real(np.trace(
                    rho @ np.kron(fa._basis[i], fb._basis[j]))))
        return m.ravel()
    if comp.dimA != comp.dimB:
        raise ConeError("factors must share coordinates")
    state = np.eye(comp.dimA).ravel() / fa.rank
    if comp.model == MAX_TENSOR:
        if comp.cone.margin(state) < -DEFAULT_TOL:
            raise ConeError("identity-conditioning element rejected by the "
                            "product-effect certificate")
        return state
    if comp.cone.member(state, 1e-8):
        return state
    raise ConeError("identity-conditioning element lies outside the "
                    "min-tensor cone for these factors")


def purity_preservation_check(comp: CompositeSystem, wa: np.ndarray,
                              wb: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Is the product of two pure factor states extremal in the composite?"""
    wa = np.asarray(wa, dtype=float)
    wb = np.asarray(wb, dtype=float)
    if not is_extremal_ray(comp.factorA.cone, wa, tol):
        raise ConeError("first factor state is not pure")
    if not is_extremal_ray(comp.factorB.cone, wb, tol):
        raise ConeError("second factor state is not pure")
    w = comp.product_state(wa, wb)
    cone = comp.cone
    if comp.model in (CLASSICAL, MIN_TENSOR):
        assert isinstance(cone, PolyhedralCone)
        return _extremal_among_generators(cone, w, tol)
    if comp.model == HILBERT:
        assert isinstance(cone, LinearImageCone)
        alg = cone.inner.algebra
        vals = alg.spectral(cone.rot @ w).eigenvalues
        scale = max(np.max(np.abs(vals)), 1e-12)
        return int(np.sum(np.abs(vals) > 1e-8 * scale)) == 1
    return face_dimension(cone, w, tol=tol) == 1


def _extremal_among_generators(cone: PolyhedralCone, w: np.ndarray,
                               tol: float) -> bool:
    """Exact LP: w is extremal iff it is not a nonnegative combination of the
    generators lying outside its ray."""
    wx = cone._to_exact(w, max(tol, 1e-8))
    others = []
    for r in cone.data.rays:
        lam = None
        for a, b in zip(wx, r):
            if b != 0:
                lam = a / b
                break
        if lam is not None and lam > 0 and [lam * b for b in r] == list(wx):
            continue
        others.append(r)
    if len(others) == len(cone.data.rays):
        # w is not itself a listed generator; decide by membership twice
        raise UnsupportedQuery("extremality LP expects w on a generator ray")
    cols = [[r[i] for r in others] for i in range(cone.dim)]
    return exact.feasible_nonneg(cols, list(wx)) is None


def local_tomography_report(comp: CompositeSystem) -> dict:
    """Dimension identity that characterizes local tomography."""
    return {
        "dim_A": comp.dimA,
        "dim_B": comp.dimB,
        "dim_AB": comp.dim,
        "locally_tomographic": comp.dim == comp.dimA * comp.dimB,
        "criterion": "dim V_AB = dim V_A dim V_B",
    }
