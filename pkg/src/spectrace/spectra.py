"""Construction and queries of eigenvalue spectra and their counting function.

A Spectrum is a lazily enumerable, nondecreasing stream of eigenfrequencies
omega_n with multiplicities; the eigenvalues are lambda_n = omega_n^2 (derived
by squaring, never stored).  Every constructor records a Weyl-type envelope
N(lambda) <= C1 + C2 lambda^{d/2} when one is known, which is what lets the
trace evaluators certify their truncation error.
"""

from __future__ import annotations

import bisect
import heapq
import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

__all__ = [
    "Spectrum",
    "CountingFunction",
    "SpectrumFormatError",
    "interval_spectrum",
    "torus_spectrum",
    "product_spectrum",
    "load_spectrum",
    "finite_spectrum",
    "counting",
]


class SpectrumFormatError(ValueError):
    """Raised when a spectrum file violates the file grammar."""


@dataclass(frozen=True)
class Spectrum:
    """An ordered eigenfrequency stream with multiplicities.

    Fields
    ------
    dim : geometric dimension d.
    label : provenance string (round-trips through the CLI spectrum syntax).
    envelope : optional (C1, C2) with N(lambda) <= C1 + C2 * lambda^{d/2};
        None means truncation cannot be certified.
    truncated_at : for finite data (e.g. loaded files) the largest omega the
        stream can produce; None for constructively infinite spectra.
    """

    dim: int
    label: str
    envelope: Optional[tuple[float, float]]
    truncated_at: Optional[float]
    _enumerate: Callable[[float], Iterable[tuple[float, int]]] = field(repr=False, compare=False)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")

    def up_to(self, omega_max: float) -> list[tuple[float, int]]:
        """All (omega, multiplicity) terms with omega <= omega_max, ascending.

        Deterministic: repeated calls yield identical lists.  The widest
        enumeration so far is cached (enumerations are prefix-compatible), so
        grid evaluations pay for one pass over the spectrum, not one per
        point; the cache is guarded by a lock so shared read-only use across
        threads stays safe.
        """
        if omega_max < 0 or math.isnan(omega_max):
            return []
        with self._lock:
            cached = self._cache.get("enum")
            if cached is not None and omega_max <= cached[0]:
                omegas, terms = cached[1], cached[2]
                return terms[: bisect.bisect_right(omegas, omega_max)]
            terms = list(self._enumerate(omega_max))
            self._cache["enum"] = (omega_max, [w for w, _ in terms], terms)
            return list(terms)


@dataclass(frozen=True)
class CountingFunction:
    """N(x) = number of eigenvalues lambda_n <= x, with multiplicity.

    A right-continuous nondecreasing step function; N(x) = 0 below the
    smallest eigenvalue.
    """

    backing: Spectrum

    def __call__(self, x: float) -> int:
        if x < 0 or math.isnan(x):
            return 0
        # enumerate slightly past sqrt(x) so the boundary eigenvalue is kept
        omega_hi = math.sqrt(x) * (1.0 + 1e-12) + 1e-12
        return sum(m for w, m in self.backing.up_to(omega_hi) if w * w <= x)


def counting(n: Union[CountingFunction, Spectrum], x: float) -> int:
    """Exact count of eigenvalues (with multiplicity) having lambda_n <= x."""
    cf = n if isinstance(n, CountingFunction) else CountingFunction(n)
    return cf(x)


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def interval_spectrum(length: float, bc: str) -> Spectrum:
    """Dirichlet or Neumann spectrum of -d^2/dx^2 on an interval.

    Dirichlet: omega_n = n pi / length for n >= 1.  Neumann adds the constant
    mode omega_0 = 0.  All multiplicities are 1.
    """
    if not (length > 0) or math.isinf(length):
        raise ValueError(f"length must be positive and finite, got {length}")
    bc = bc.lower()
    if bc not in ("dirichlet", "neumann"):
        raise ValueError(f"bc must be 'dirichlet' or 'neumann', got {bc!r}")
    step = math.pi / length
    neumann = bc == "neumann"

    def gen(omega_max: float):
        if neumann and omega_max >= 0.0:
            yield (0.0, 1)
        n_hi = int(omega_max / step) + 2
        for n in range(1, n_hi + 1):
            w = n * step
            if w > omega_max:
                break
            yield (w, 1)

    c1 = 1.0 if neumann else 0.0
    return Spectrum(
        dim=1,
        label=f"interval:length={length!r}:bc={bc}",
        envelope=(c1, length / math.pi),
        truncated_at=None,
        _enumerate=gen,
    )


def torus_spectrum(circumference: float) -> Spectrum:
    """Spectrum of the Laplacian on a circle: omega_0 = 0 once, then
    omega_n = 2 pi n / circumference with multiplicity 2."""
    if not (circumference > 0) or math.isinf(circumference):
        raise ValueError(f"circumference must be positive and finite, got {circumference}")
    step = 2.0 * math.pi / circumference

    def gen(omega_max: float):
        if omega_max >= 0.0:
            yield (0.0, 1)
        n_hi = int(omega_max / step) + 2
        for n in range(1, n_hi + 1):
            w = n * step
            if w > omega_max:
                break
            yield (w, 2)

    return Spectrum(
        dim=1,
        label=f"torus:circumference={circumference!r}",
        envelope=(1.0, circumference / math.pi),
        truncated_at=None,
        _enumerate=gen,
    )


def product_spectrum(a: Spectrum, b: Spectrum) -> Spectrum:
    """Direct product: eigenvalues add (omega = sqrt(wa^2 + wb^2)),
    multiplicities multiply, dimensions add.

    The merged stream is emitted in ascending order; terms whose computed
    eigenvalues collide as exactly equal floats are coalesced with summed
    multiplicity (tolerance 0 -- looser coalescing would corrupt counts).
    """
    if a.envelope is not None and b.envelope is not None:
        c1a, c2a = a.envelope
        c1b, c2b = b.envelope
        # lam^{da/2}, lam^{db/2} <= 1 + lam^{d/2} folds the cross terms in
        envelope = (
            c1a * c1b + c1a * c2b + c2a * c1b,
            c1a * c2b + c2a * c1b + c2a * c2b,
        )
    else:
        envelope = None
    cuts = [s.truncated_at for s in (a, b) if s.truncated_at is not None]
    truncated_at = min(cuts) if cuts else None

    def gen(omega_max: float):
        lam_max = omega_max * omega_max
        a_terms = a.up_to(omega_max)
        b_terms = b.up_to(omega_max)

        def row(wa: float, ma: int):
            la = wa * wa
            for wb, mb in b_terms:
                lam = la + wb * wb
                if lam > lam_max:
                    break
                yield (lam, ma * mb)

        merged = heapq.merge(*(row(wa, ma) for wa, ma in a_terms), key=lambda t: t[0])
        pending_lam = None
        pending_mult = 0
        for lam, mult in merged:
            if pending_lam is not None and lam == pending_lam:
                pending_mult += mult
                continue
            if pending_lam is not None:
                w = math.sqrt(pending_lam)
                if w <= omega_max:
                    yield (w, pending_mult)
            pending_lam, pending_mult = lam, mult
        if pending_lam is not None:
            w = math.sqrt(pending_lam)
            if w <= omega_max:
                yield (w, pending_mult)

    return Spectrum(
        dim=a.dim + b.dim,
        label=f"product:({a.label})x({b.label})",
        envelope=envelope,
        truncated_at=truncated_at,
        _enumerate=gen,
    )


def finite_spectrum(
    dim: int,
    terms: Sequence[tuple[float, int]],
    label: str = "finite",
    envelope: Optional[tuple[float, float]] = None,
) -> Spectrum:
    """A complete finite spectrum given literally as (omega, multiplicity) terms.

    With no explicit envelope the total multiplicity itself is the (exact)
    envelope, since the spectrum genuinely ends.
    """
    terms = [(float(w), int(m)) for w, m in terms]
    for (w, m), (w2, _) in zip(terms, terms[1:]):
        if w2 < w:
            raise ValueError("terms must be nondecreasing in omega")
    if any(w < 0 for w, _ in terms) or any(m < 1 for _, m in terms):
        raise ValueError("need omega >= 0 and multiplicity >= 1")
    if envelope is None:
        envelope = (float(sum(m for _, m in terms)), 0.0)
    last = terms[-1][0] if terms else 0.0

    def gen(omega_max: float):
        for w, m in terms:
            if w > omega_max:
                break
            yield (w, m)

    return Spectrum(dim=dim, label=label, envelope=envelope,
                    truncated_at=last, _enumerate=gen)


# ---------------------------------------------------------------------------
# File format
# ---------------------------------------------------------------------------

def load_spectrum(path) -> Spectrum:
    """Load a spectrum file.

    Grammar: UTF-8 text; '#' starts a comment; the first significant line is
    "dim <d>"; an optional "envelope <C1> <C2>" line may follow; every further
    line is "<omega> <multiplicity>" with omega nondecreasing.  The file is
    treated as a truncation of the true spectrum, so without an envelope line
    trace tail bounds cannot be certified.
    """
    with open(path, "r", encoding="utf-8") as fh:
        raw_lines = fh.readlines()

    dim: Optional[int] = None
    envelope: Optional[tuple[float, float]] = None
    terms: list[tuple[float, int]] = []
    prev_omega = -math.inf

    for lineno, raw in enumerate(raw_lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if dim is None:
            if fields[0] != "dim" or len(fields) != 2:
                raise SpectrumFormatError(
                    f"missing 'dim <d>' header at line {lineno}"
                )
            try:
                dim = int(fields[1])
            except ValueError:
                raise SpectrumFormatError(f"bad dimension at line {lineno}: {fields[1]!r}") from None
            if dim < 1:
                raise SpectrumFormatError(f"dimension must be positive at line {lineno}")
            continue
        if fields[0] == "envelope":
            if terms or envelope is not None or len(fields) != 3:
                raise SpectrumFormatError(f"misplaced envelope line at line {lineno}")
            try:
                c1, c2 = float(fields[1]), float(fields[2])
            except ValueError:
                raise SpectrumFormatError(f"bad envelope constants at line {lineno}") from None
            if c1 < 0 or c2 < 0:
                raise SpectrumFormatError(f"envelope constants must be nonnegative at line {lineno}")
            envelope = (c1, c2)
            continue
        if len(fields) != 2:
            raise SpectrumFormatError(
                f"expected '<omega> <multiplicity>' at line {lineno}, got {line!r}"
            )
        try:
            omega = float(fields[0])
            mult = int(fields[1])
        except ValueError:
            raise SpectrumFormatError(f"unparsable term at line {lineno}: {line!r}") from None
        if math.isnan(omega) or omega < 0:
            raise SpectrumFormatError(f"omega must be >= 0 at line {lineno}")
        if mult < 1:
            raise SpectrumFormatError(f"multiplicity must be >= 1 at line {lineno}")
        if omega < prev_omega:
            raise SpectrumFormatError(f"non-monotone at line {lineno}")
        prev_omega = omega
        terms.append((omega, mult))

    if dim is None:
        raise SpectrumFormatError("missing 'dim <d>' header (empty file)")

    last = terms[-1][0] if terms else 0.0

    def gen(omega_max: float):
        for w, m in terms:
            if w > omega_max:
                break
            yield (w, m)

    return Spectrum(dim=dim, label=f"file:{path}", envelope=envelope,
                    truncated_at=last, _enumerate=gen)
