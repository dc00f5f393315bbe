"""Coefficient search: find integer Laurent polynomials with a given series.

The problem comes in as a support ansatz (points grouped into symmetry
orbits, one unknown coefficient per orbit, some orbits pinned to fixed
values) plus a target series prefix.  The search enumerates orbit
coefficients modulo one or more primes, pruning level by level: the order-r
constraint phi(r) = a_r only involves orbits whose points can take part in a
zero-sum r-fold product, so orbits are brought in exactly when they first
matter and partial assignments are tested with the mod-p constant-term
engine.  Surviving residue assignments are lifted to integers within a
height bound (CRT across primes first) and every lift is verified exactly
with the rational engine, so nothing modular is ever trusted in the output.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .laurent import (
    LaurentPoly,
    ParseError,
    PowerSeries,
    constant_term_series,
    format_rational,
    multiply_term_maps,
    normalize_rational,
    parse_rational,
)


class HeightBoundExceeded(RuntimeError):
    """Residue assignments survived, but no integer lift fits the height bound.

    `stats` carries the accumulated SearchStats when raised from search().
    """

    stats = None


def _is_prime(p):
    if not isinstance(p, int) or p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class CoefficientDomain:
    """What one orbit coefficient may be: free over Z, fixed, or a finite choice."""

    kind: str
    values: tuple = ()

    def __post_init__(self):
        if self.kind == "free":
            if self.values:
                raise ValueError("a free domain carries no values")
        elif self.kind == "fixed":
            if len(self.values) != 1:
                raise ValueError("a fixed domain needs exactly one value")
            object.__setattr__(self, "values", (normalize_rational(self.values[0]),))
        elif self.kind == "choice":
            vals = tuple(sorted(set(self.values)))
            if not vals:
                raise ValueError("a choice domain needs at least one value")
            if any(not isinstance(v, int) or isinstance(v, bool) for v in vals):
                raise ValueError("choice values must be integers")
            object.__setattr__(self, "values", vals)
        else:
            raise ValueError(f"unknown domain kind {self.kind!r}")

    @classmethod
    def free(cls):
        return cls("free")

    @classmethod
    def fixed(cls, value):
        return cls("fixed", (value,))

    @classmethod
    def choice(cls, *values):
        return cls("choice", tuple(values))

    def is_integral(self):
        if self.kind == "fixed":
            return isinstance(self.values[0], int)
        return True

    def describe(self):
        if self.kind == "free":
            return "free"
        if self.kind == "fixed":
            return f"fixed {format_rational(self.values[0])}"
        return "choice " + " ".join(str(v) for v in self.values)


@dataclass(frozen=True)
class OrbitSpec:
    """One symmetry orbit of support points sharing a single coefficient."""

    label: str
    points: tuple
    domain: CoefficientDomain

    def __post_init__(self):
        pts = tuple(sorted({tuple(int(x) for x in p) for p in self.points}))
        if not pts:
            raise ValueError(f"orbit {self.label!r} has no points")
        object.__setattr__(self, "points", pts)

    @property
    def representative(self):
        return self.points[0]


class SupportAnsatz:
    """A support set partitioned into orbits, each with a coefficient domain."""

    __slots__ = ("_n", "_orbits")

    def __init__(self, n, orbits):
        if not isinstance(n, int) or n < 1:
            raise ValueError("dimension must be a positive integer")
        specs = tuple(sorted(orbits, key=lambda s: s.representative))
        if not specs:
            raise ValueError("an ansatz needs at least one orbit")
        seen_points = set()
        seen_labels = set()
        for spec in specs:
            if spec.label in seen_labels:
                raise ValueError(f"duplicate orbit label {spec.label!r}")
            seen_labels.add(spec.label)
            for p in spec.points:
                if len(p) != n:
                    raise ValueError(f"point {p} does not have dimension {n}")
                if p in seen_points:
                    raise ValueError(f"point {p} appears in two orbits")
                seen_points.add(p)
        self._n = n
        self._orbits = specs

    @property
    def dimension(self):
        return self._n

    @property
    def orbits(self):
        return self._orbits

    def support(self):
        return tuple(sorted(p for spec in self._orbits for p in spec.points))

    def __eq__(self, other):
        if not isinstance(other, SupportAnsatz):
            return NotImplemented
        return self._n == other._n and self._orbits == other._orbits

    def __hash__(self):
        return hash((self._n, self._orbits))

    def __repr__(self):
        return f"SupportAnsatz(n={self._n}, orbits={len(self._orbits)})"

    def to_text(self):
        lines = [f"# dim {self._n}"]
        for spec in self._orbits:
            for p in spec.points:
                coords = " ".join(str(x) for x in p)
                lines.append(f"{coords} : {spec.label} : {spec.domain.describe()}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        declared = None
        groups = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("dim"):
                    try:
                        declared = int(body[3:].strip())
                    except ValueError:
                        raise ParseError("bad dimension declaration", lineno) from None
                continue
            parts = [part.strip() for part in line.split(":")]
            if len(parts) != 3:
                raise ParseError("expected '<point> : <label> : <domain>'", lineno)
            try:
                point = tuple(int(tok) for tok in parts[0].split())
            except ValueError:
                raise ParseError(f"bad point {parts[0]!r}", lineno) from None
            label = parts[1]
            if not label:
                raise ParseError("empty orbit label", lineno)
            domain = _parse_domain(parts[2], lineno)
            entry = groups.setdefault(label, (domain, []))
            if entry[0] != domain:
                raise ParseError(
                    f"orbit {label!r} has conflicting domain annotations", lineno
                )
            entry[1].append(point)
        if not groups:
            raise ParseError("empty ansatz input")
        if declared is None:
            declared = len(next(iter(groups.values()))[1][0])
        specs = [
            OrbitSpec(label, tuple(points), domain)
            for label, (domain, points) in groups.items()
        ]
        return cls(declared, specs)


def _parse_domain(text, lineno):
    parts = text.split()
    if not parts:
        raise ParseError("missing domain annotation", lineno)
    if parts[0] == "free":
        if len(parts) != 1:
            raise ParseError("'free' takes no arguments", lineno)
        return CoefficientDomain.free()
    if parts[0] == "fixed":
        if len(parts) != 2:
            raise ParseError("'fixed' takes exactly one value", lineno)
        return CoefficientDomain.fixed(parse_rational(parts[1], lineno))
    if parts[0] == "choice":
        if len(parts) < 2:
            raise ParseError("'choice' needs at least one value", lineno)
        try:
            values = tuple(int(tok) for tok in parts[1:])
        except ValueError:
            raise ParseError("choice values must be integers", lineno) from None
        return CoefficientDomain.choice(*values)
    raise ParseError(f"unknown domain kind {parts[0]!r}", lineno)


def _apply_matrix(matrix, point):
    return tuple(sum(row[j] * point[j] for j in range(len(point))) for row in matrix)


def orbits(points, generators):
    """Partition points into orbits under the group the generators produce.

    Each generator must map the point set into itself; since it is then a
    permutation of a finite set, closing under the generators alone already
    closes under their inverses.  Orbits come back sorted, each one a sorted
    tuple of points.
    """
    pts = sorted({tuple(int(x) for x in p) for p in points})
    if not pts:
        raise ValueError("no points to partition")
    n = len(pts[0])
    if any(len(p) != n for p in pts):
        raise ValueError("points have inconsistent dimensions")
    pset = set(pts)
    mats = []
    for g in generators:
        mat = tuple(tuple(int(x) for x in row) for row in g)
        if len(mat) != n or any(len(row) != n for row in mat):
            raise ValueError(f"generator must be a {n}x{n} integer matrix")
        for p in pts:
            q = _apply_matrix(mat, p)
            if q not in pset:
                raise ValueError(f"generator does not preserve the support: {p} -> {q}")
        mats.append(mat)
    remaining = set(pts)
    result = []
    for p in pts:
        if p not in remaining:
            continue
        orbit = {p}
        frontier = [p]
        while frontier:
            q = frontier.pop()
            for mat in mats:
                r = _apply_matrix(mat, q)
                if r not in orbit:
                    orbit.add(r)
                    frontier.append(r)
        remaining -= orbit
        result.append(tuple(sorted(orbit)))
    return tuple(result)


@dataclass(frozen=True)
class SearchConfig:
    """Target prefix plus the knobs of the modular search.

    `depth` is the modular matching depth (constraints phi(r) = a_r for
    r = 1..depth); `verify_depth` is the exact verification depth, so the
    target series must extend at least that far.
    """

    target: PowerSeries
    primes: tuple = (7,)
    height: int = 6
    depth: int = 4
    verify_depth: int = 8
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "primes", tuple(self.primes))
        if not self.primes:
            raise ValueError("at least one prime is required")
        if len(set(self.primes)) != len(self.primes):
            raise ValueError("primes must be distinct")
        for p in self.primes:
            if not _is_prime(p):
                raise ValueError(f"{p} is not prime")
        if self.height < 1:
            raise ValueError("height bound must be at least 1")
        if self.depth < 2:
            raise ValueError("modular depth must be at least 2")
        if self.verify_depth < self.depth:
            raise ValueError("verification depth must be at least the modular depth")
        if self.target.order < self.verify_depth:
            raise ValueError(
                f"target series order {self.target.order} is below the"
                f" verification depth {self.verify_depth}"
            )
        if self.target[0] != 1:
            raise ValueError("target series must have constant coefficient 1")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")


@dataclass(frozen=True)
class PrimeStats:
    prime: int
    depth: int
    enumerated: int
    survivors_per_level: tuple
    survivor_count: int


@dataclass(frozen=True)
class SearchStats:
    prime_stats: tuple
    residue_combinations: int
    lifts_tried: int
    exact_matches: int

    def to_document(self):
        lines = []
        for st in self.prime_stats:
            lines.append(f"prime.{st.prime}.assignments-enumerated: {st.enumerated}")
            for r, count in st.survivors_per_level:
                lines.append(f"prime.{st.prime}.survivors.r{r}: {count}")
            lines.append(f"prime.{st.prime}.survivors: {st.survivor_count}")
        lines.append(f"residue-combinations: {self.residue_combinations}")
        lines.append(f"lifts-tried: {self.lifts_tried}")
        lines.append(f"exact-matches: {self.exact_matches}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SearchResult:
    matches: tuple
    stats: SearchStats


def _involvement_levels(ansatz, depth):
    """First constraint level at which each orbit's coefficient matters.

    A point m takes part in phi(r) exactly when -m is a sum of r-1 support
    points, so the levels fall out of iterated sumsets of the support.
    Orbits that never matter within `depth` are absent from the result.
    """
    support = ansatz.support()
    origin = (0,) * ansatz.dimension
    reachable = {origin}
    levels = {}
    for r in range(1, depth + 1):
        for idx, spec in enumerate(ansatz.orbits):
            if idx in levels:
                continue
            if any(tuple(-x for x in m) in reachable for m in spec.points):
                levels[idx] = r
        if r < depth:
            reachable = {
                tuple(a + b for a, b in zip(s, m)) for s in reachable for m in support
            }
    return levels


def _modular_residue(value, p, context):
    frac = Fraction(value)
    if frac.denominator % p == 0:
        raise ValueError(f"{context} {value} is not defined modulo {p}")
    if frac.denominator == 1:
        return frac.numerator % p
    return frac.numerator * pow(frac.denominator, -1, p) % p


def _phi_mod(fmap, r, p, origin):
    reduce = lambda c: c % p
    power = {origin: 1}
    for _ in range(r):
        power = multiply_term_maps(power, fmap, reduce=reduce)
    return power.get(origin, 0)


def _assignment_plan(ansatz, p, depth):
    """Orbit assignment order and mod-p domains for one prime."""
    levels = _involvement_levels(ansatz, depth)
    undetermined = [
        (idx, spec)
        for idx, spec in enumerate(ansatz.orbits)
        if spec.domain.kind != "fixed"
    ]
    order = sorted(
        range(len(undetermined)),
        key=lambda k: (
            levels.get(undetermined[k][0], depth + 1),
            undetermined[k][1].representative,
        ),
    )
    domains = []
    for k in order:
        spec = undetermined[k][1]
        if spec.domain.kind == "free":
            domains.append(tuple(range(p)))
        else:
            domains.append(tuple(sorted({v % p for v in spec.domain.values})))
    return undetermined, order, domains, levels


def search_mod_p(ansatz, target, p, depth=None, _first_orbit_slice=None):
    """All orbit-coefficient assignments over Z/p matching the target prefix.

    Returns (survivors, stats).  Each survivor is a tuple of residues aligned
    with the non-fixed orbits in ansatz order.  Pruning is level by level in
    r; when the target has a non-integral coefficient and every coefficient
    domain is integral, that level eliminates everything (an integer
    polynomial has integer constant terms).
    """
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    if depth is None:
        depth = min(4, target.order)
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if depth > target.order:
        raise ValueError(f"target series order {target.order} is below depth {depth}")
    if target[0] != 1:
        raise ValueError("target series must have constant coefficient 1")

    integral = all(spec.domain.is_integral() for spec in ansatz.orbits)
    residue_wanted = {}
    unreachable = set()
    for r in range(1, depth + 1):
        value = Fraction(target[r])
        if value.denominator != 1 and integral:
            unreachable.add(r)
        else:
            residue_wanted[r] = _modular_residue(value, p, "target coefficient")

    base = {}
    for spec in ansatz.orbits:
        if spec.domain.kind == "fixed":
            res = _modular_residue(spec.domain.values[0], p, "fixed coefficient")
            if res:
                for point in spec.points:
                    base[point] = res

    undetermined, order, domains, levels = _assignment_plan(ansatz, p, depth)
    if _first_orbit_slice is not None and domains:
        domains = [tuple(_first_orbit_slice)] + domains[1:]

    origin = (0,) * ansatz.dimension
    partials = [()]
    assigned = 0
    enumerated = 0
    per_level = []
    for r in range(1, depth + 1):
        need = sum(
            1 for k in order if levels.get(undetermined[k][0], depth + 1) <= r
        )
        while assigned < need:
            domain = domains[assigned]
            partials = [part + (v,) for part in partials for v in domain]
            enumerated += len(partials)
            assigned += 1
        if r in unreachable:
            partials = []
        else:
            want = residue_wanted[r]
            kept = []
            for part in partials:
                fmap = dict(base)
                for k in range(assigned):
                    v = part[k]
                    if v:
                        for point in undetermined[order[k]][1].points:
                            fmap[point] = v
                if _phi_mod(fmap, r, p, origin) == want:
                    kept.append(part)
            partials = kept
        per_level.append((r, len(partials)))
        if not partials:
            break
    if partials:
        # orbits that never influence the checked prefix still need values
        while assigned < len(order):
            domain = domains[assigned]
            partials = [part + (v,) for part in partials for v in domain]
            enumerated += len(partials)
            assigned += 1
    position_of = [order.index(k) for k in range(len(order))]
    survivors = tuple(
        sorted(tuple(part[position_of[k]] for k in range(len(order))) for part in partials)
    )
    stats = PrimeStats(
        prime=p,
        depth=depth,
        enumerated=enumerated,
        survivors_per_level=tuple(per_level),
        survivor_count=len(survivors),
    )
    return survivors, stats


def _crt(residues, primes):
    """Residue and modulus of the combined congruence system."""
    value, modulus = residues[0] % primes[0], primes[0]
    for r, p in zip(residues[1:], primes[1:]):
        inv = pow(modulus, -1, p)
        t = ((r - value) * inv) % p
        value += modulus * t
        modulus *= p
    return value % modulus, modulus


def _symmetric_lifts(residue, modulus, height):
    """Integer lifts in [-height, height], symmetric representative first."""
    s = residue % modulus
    if s > modulus // 2:
        s -= modulus
    out = []
    step = 0
    while True:
        low, high = s - step * modulus, s + step * modulus
        if low < -height and high > height:
            break
        if -height <= low <= height:
            out.append(low)
        if step and -height <= high <= height:
            out.append(high)
        step += 1
    return out


def _assemble(ansatz, undetermined, values):
    terms = {}
    for spec in ansatz.orbits:
        if spec.domain.kind == "fixed":
            for point in spec.points:
                terms[point] = spec.domain.values[0]
    for (_, spec), v in zip(undetermined, values):
        for point in spec.points:
            terms[point] = v
    return LaurentPoly(ansatz.dimension, terms)


def lift_and_verify(per_prime, ansatz, config):
    """Lift surviving residues to integers and verify each lift exactly.

    `per_prime` maps each configured prime to its survivor tuples.  Residues
    are combined across primes by CRT per orbit, lifted within the height
    bound, assembled into polynomials, and accepted only when the exact
    constant-term series matches the target through config.verify_depth.
    Raises HeightBoundExceeded when residue combinations survive but not a
    single one admits an in-range lift.
    """
    primes = config.primes
    for p in primes:
        if p not in per_prime:
            raise ValueError(f"missing survivor list for prime {p}")
    undetermined = [
        (idx, spec)
        for idx, spec in enumerate(ansatz.orbits)
        if spec.domain.kind != "fixed"
    ]
    target = config.target
    matches = {}
    combinations = 0
    lifts_tried = 0
    range_blocked = 0
    for combo in itertools.product(*(per_prime[p] for p in primes)):
        combinations += 1
        option_lists = []
        blocked_by_range = False
        viable = True
        for pos, (_, spec) in enumerate(undetermined):
            value, modulus = _crt([assignment[pos] for assignment in combo], primes)
            if spec.domain.kind == "choice":
                options = [v for v in spec.domain.values if v % modulus == value]
            else:
                options = _symmetric_lifts(value, modulus, config.height)
                if not options:
                    blocked_by_range = True
            if not options:
                viable = False
                break
            option_lists.append(options)
        if not viable:
            if blocked_by_range:
                range_blocked += 1
            continue
        for values in itertools.product(*option_lists):
            lifts_tried += 1
            candidate = _assemble(ansatz, undetermined, values)
            series = constant_term_series(candidate, config.verify_depth)
            if all(series[i] == target[i] for i in range(config.verify_depth + 1)):
                matches.setdefault(candidate.to_text(), candidate)
    if not matches and lifts_tried == 0 and range_blocked > 0:
        exc = HeightBoundExceeded(
            f"{combinations} residue combinations survived modulo"
            f" {'x'.join(str(p) for p in primes)} but none lifts into"
            f" [-{config.height}, {config.height}]"
        )
        exc.combinations = combinations
        raise exc
    ordered = tuple(matches[key] for key in sorted(matches))
    return ordered, combinations, lifts_tried


def _mod_p_task(args):
    ansatz, target, p, depth, chunk = args
    return search_mod_p(ansatz, target, p, depth, _first_orbit_slice=chunk)


def _merged_prime_stats(p, depth, results, first_extension):
    """Combine chunked runs into the stats a single run would have produced.

    Levels before the first orbit assignment see the same shared trivial
    prefix in every chunk, so their counts must not be summed; from the first
    extension level on the partial assignments partition across chunks and
    summing is exact.
    """
    enumerated = sum(st.enumerated for _, st in results)
    by_level = {}
    for _, st in results:
        for r, count in st.survivors_per_level:
            if r < first_extension:
                by_level[r] = count
            else:
                by_level[r] = by_level.get(r, 0) + count
    per_level = tuple(sorted(by_level.items()))
    survivors = tuple(sorted(itertools.chain.from_iterable(s for s, _ in results)))
    return survivors, PrimeStats(
        prime=p,
        depth=depth,
        enumerated=enumerated,
        survivors_per_level=per_level,
        survivor_count=len(survivors),
    )


def _parallel_mod_p(ansatz, target, p, depth, threads):
    undetermined, order, domains, levels = _assignment_plan(ansatz, p, depth)
    if not domains:
        return search_mod_p(ansatz, target, p, depth)
    chunks = [domains[0][i::threads] for i in range(threads)]
    chunks = [c for c in chunks if c]
    if len(chunks) < 2:
        return search_mod_p(ansatz, target, p, depth)
    first_extension = levels.get(undetermined[order[0]][0], depth + 1)
    import multiprocessing

    with multiprocessing.Pool(len(chunks)) as pool:
        results = pool.map(
            _mod_p_task, [(ansatz, target, p, depth, chunk) for chunk in chunks]
        )
    return _merged_prime_stats(p, depth, results, first_extension)


def search(ansatz, config):
    """Full pipeline: per-prime modular search, CRT lift, exact verification.

    Returns a SearchResult whose stats always carry the per-prime pruning
    profile, even when nothing survives.  A HeightBoundExceeded raised during
    lifting carries the stats gathered so far in its `stats` attribute.
    """
    per_prime = {}
    prime_stats = []
    for p in config.primes:
        if config.threads > 1:
            survivors, stats = _parallel_mod_p(
                ansatz, config.target, p, config.depth, config.threads
            )
        else:
            survivors, stats = search_mod_p(ansatz, config.target, p, config.depth)
        per_prime[p] = survivors
        prime_stats.append(stats)
    try:
        matches, combinations, lifts_tried = lift_and_verify(per_prime, ansatz, config)
    except HeightBoundExceeded as exc:
        exc.stats = SearchStats(
            tuple(prime_stats), getattr(exc, "combinations", 0), 0, 0
        )
        raise
    stats = SearchStats(
        prime_stats=tuple(prime_stats),
        residue_combinations=combinations,
        lifts_tried=lifts_tried,
        exact_matches=len(matches),
    )
    return SearchResult(matches=matches, stats=stats)
