"""Pipeline orchestration: sieve -> count -> bound -> analyze -> certify.

Orbits stream out of the sieve in ascending-mask order; each is counted
over every configured field on its cheapest member (point counts and
singular-point tallies are GL_3(F_2) invariants), filtered against the
keep rule, and survivors get the full treatment on the orbit-minimum mask
so the record's singular coordinates match its printed polynomial.
A record is emitted only when absolute irreducibility is not refuted and
some (q, g) pair inside the genus interval is within the configured margin
of the effective bound (genus 0 never qualifies).

The catalog is one JSON object per line, canonically sorted by
(degree, mask) and deduplicated by mask at finalization, so interrupted and
resumed runs converge to byte-identical files.  Checkpoints store the sieve
scan position plus the packed bit table and refuse to load under a changed
configuration.
"""

from __future__ import annotations

import json
import multiprocessing
import os
import struct
import warnings
from dataclasses import dataclass
from typing import Iterable

from .bounds import (
    BoundTable,
    GenusInconsistency,
    GenusInterval,
    genus_interval,
    load_lauter,
    smooth_model_range,
)
from .count import PointCount, PointCounter
from .gf2m import build_field
from .irred import certify_absolute
from .orbit import OrbitInfo, SieveEngine, orbit_of
from .polyrep import (
    PolyMask,
    format_poly,
    is_trivially_reducible,
    parse_mask_id,
    parse_poly,
)
from .singular import (
    SingularPoint,
    analyze_singular_point,
    blowup_points_estimate,
    check_theorem1,
)

SUPPORTED_FIELDS = tuple(1 << m for m in range(3, 12))

CHECKPOINT_MAGIC = b"CSCHKPT1"


class ConfigError(ValueError):
    """Invalid search configuration (CLI exit code 2)."""


class CheckpointError(RuntimeError):
    """Unusable or incompatible checkpoint file (CLI exit code 3)."""


@dataclass(frozen=True)
class SearchConfig:
    degree: int
    fields: tuple[int, ...]
    keep_margin: int = 15
    jobs: int = 1
    checkpoint_path: str | None = None
    lauter_path: str | None = None
    out_path: str | None = None
    use_tables: bool = True
    range_bits: int = 22  # sieve span per checkpoint interval
    stop_after_ranges: int | None = None  # testing hook: abort mid-run

    def __post_init__(self) -> None:
        if not 1 <= self.degree <= 6:
            raise ConfigError(f"degree must be 1..6, got {self.degree}")
        if not self.fields:
            raise ConfigError("at least one field is required")
        bad = [q for q in self.fields if q not in SUPPORTED_FIELDS]
        if bad:
            raise ConfigError(
                f"unsupported field orders {bad}; supported: {list(SUPPORTED_FIELDS)}"
            )
        if len(set(self.fields)) != len(self.fields):
            raise ConfigError("duplicate field orders")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        object.__setattr__(self, "fields", tuple(sorted(self.fields)))

    @property
    def long_run(self) -> bool:
        # Degree 6 over fields past 2^9 is the known multi-hour regime.
        return self.degree == 6 and any(q > 512 for q in self.fields)


@dataclass
class SearchStats:
    orbits_seen: int = 0
    orbits_trivial: int = 0
    counted: int = 0
    kept: int = 0
    dropped_threshold: int = 0
    dropped_reducible: int = 0
    dropped_inconsistent: int = 0


@dataclass(frozen=True)
class CurveRecord:
    """One catalog entry: a full per-orbit (or per-curve) analysis."""

    degree: int
    mask: int
    orbit_size: int
    counts: dict[int, PointCount]
    singular: tuple[SingularPoint, ...]
    blowups: dict[int, tuple[tuple[int, bool], ...]]  # q -> per-point (lower, exact)
    r_distinct: int
    genus: GenusInterval
    n_range: dict[int, tuple[int, int]]
    absolute: str
    certificate_field: int | None
    witness: str | None
    flags: tuple[str, ...]
    theorem1_ok: bool | None

    @property
    def poly(self) -> PolyMask:
        return PolyMask(self.degree, self.mask)

    def n_lo(self, q: int) -> int:
        return self.n_range[q][0]

    def to_json(self) -> str:
        obj = {
            "mask": self.poly.mask_id,
            "poly": format_poly(self.poly),
            "degree": self.degree,
            "orbit_size": self.orbit_size,
            "counts": {
                str(q): {
                    "total": pc.total,
                    "smooth": pc.smooth,
                    "singular": [list(p) for p in pc.singular_points],
                }
                for q, pc in sorted(self.counts.items())
            },
            "singular": [
                {
                    "q": s.q,
                    "point": list(s.point),
                    "k": s.k,
                    "multiplicity": s.multiplicity,
                    "cone_type": s.cone_type,
                    "ordinary": s.ordinary,
                }
                for s in self.singular
            ],
            "r_distinct": self.r_distinct,
            "genus": [self.genus.lo, self.genus.hi],
            "n_range": {str(q): list(v) for q, v in sorted(self.n_range.items())},
            "irreducibility": {
                "absolute": self.absolute,
                "k": self.certificate_field,
                "witness": self.witness,
            },
            "flags": list(self.flags),
            "theorem1_ok": self.theorem1_ok,
        }
        return json.dumps(obj, separators=(", ", ": "))

    @staticmethod
    def from_json(line: str) -> "CurveRecord":
        obj = json.loads(line)
        pm = parse_mask_id(obj["mask"])
        counts = {
            int(q): PointCount(
                q=int(q),
                total=c["total"],
                smooth=c["smooth"],
                singular_points=tuple(tuple(p) for p in c["singular"]),
            )
            for q, c in obj["counts"].items()
        }
        singular = tuple(
            SingularPoint(
                point=tuple(s["point"]),
                q=s["q"],
                k=s["k"],
                multiplicity=s["multiplicity"],
                cone=(),
                cone_type=s["cone_type"],
                ordinary=s["ordinary"],
            )
            for s in obj["singular"]
        )
        return CurveRecord(
            degree=obj["degree"],
            mask=pm.bits,
            orbit_size=obj["orbit_size"],
            counts=counts,
            singular=singular,
            blowups={},
            r_distinct=obj["r_distinct"],
            genus=GenusInterval(*obj["genus"]),
            n_range={int(q): tuple(v) for q, v in obj["n_range"].items()},
            absolute=obj["irreducibility"]["absolute"],
            certificate_field=obj["irreducibility"]["k"],
            witness=obj["irreducibility"]["witness"],
            flags=tuple(obj["flags"]),
            theorem1_ok=obj["theorem1_ok"],
        )


# -- per-curve analysis ---------------------------------------------------------


def distinct_singular_count(counts: dict[int, PointCount]) -> int:
    """Deduplicated lower bound on the number of singular points.

    F_2-rational points have the same {0,1} coordinates in every field table
    and are counted once; non-F_2-rational points cannot be identified across
    fields without embedding maps, so only the best single field's tally is
    added (each field's set consists of genuinely distinct points).
    """
    f2_points = set()
    best_other = 0
    for pc in counts.values():
        other = 0
        for p in pc.singular_points:
            if max(p) <= 1:
                f2_points.add(p)
            else:
                other += 1
        best_other = max(best_other, other)
    return len(f2_points) + best_other


class CurvePipeline:
    """Analysis of single curves over a fixed field set (shared counters)."""

    def __init__(self, fields: Iterable[int], bound_table: BoundTable,
                 use_tables: bool = True):
        self.orders = tuple(sorted(fields))
        self.bound_table = bound_table
        self.counters = {
            q: PointCounter(build_field(q.bit_length() - 1), use_tables=use_tables)
            for q in self.orders
        }

    def count_all(self, f: PolyMask) -> dict[int, PointCount]:
        return {q: self.counters[q].count(f) for q in self.orders}

    def quick_genus(self, d: int, counts: dict[int, PointCount]) -> GenusInterval:
        r = distinct_singular_count(counts)
        return genus_interval(d, r, {q: pc.smooth for q, pc in counts.items()})

    def meets_threshold(self, counts: dict[int, PointCount], gi: GenusInterval,
                        margin: int) -> bool:
        for q, pc in counts.items():
            for g in range(max(gi.lo, 1), gi.hi + 1):
                if pc.smooth >= self.bound_table.effective(q, g)[0] - margin:
                    return True
        return False

    def analyze(self, f: PolyMask, orbit_size: int) -> CurveRecord | None:
        """Full record for one curve; None when the genus interval is
        inconsistent (the curve cannot be absolutely irreducible)."""
        counts = self.count_all(f)
        r = distinct_singular_count(counts)
        try:
            gi = genus_interval(
                f.degree, r, {q: pc.smooth for q, pc in counts.items()}
            )
        except GenusInconsistency:
            return None

        flags: list[str] = []
        singular: list[SingularPoint] = []
        blowups: dict[int, tuple[tuple[int, bool], ...]] = {}
        credited: dict[int, int] = {}
        for q in self.orders:
            field = self.counters[q].field
            per_field = []
            credit = 0
            for p in counts[q].singular_points:
                s = analyze_singular_point(f, p, field)
                singular.append(s)
                est = blowup_points_estimate(s, field)
                per_field.append(est)
                if est[1]:
                    credit += est[0]
                else:
                    flags.append(
                        f"nonordinary-singularity q={q} point=({p[0]}:{p[1]}:{p[2]})"
                    )
            blowups[q] = tuple(per_field)
            credited[q] = credit

        n_range = {
            q: smooth_model_range(
                q, counts[q].smooth, credited[q], f.degree, r, gi.hi,
                self.bound_table,
            )
            for q in self.orders
        }

        status = certify_absolute(f)
        if any(lo > hi for lo, hi in n_range.values()):
            # Both ends are sound for absolutely irreducible curves, so a
            # crossed range proves reducibility, like a crossed genus interval.
            if status.absolute == "yes":
                raise RuntimeError(
                    f"certified curve {f.mask_id} has N_lo > N_hi; pipeline bug"
                )
            return None
        if status.absolute == "unknown":
            flags.append("irreducibility-unknown")
        if gi.lo < gi.hi:
            flags.append("genus-ambiguous")

        theorem1_ok: bool | None = None
        mults = _dedup_multiplicities(singular)
        if len(mults) >= 2:
            theorem1_ok = check_theorem1(mults, f.degree)

        return CurveRecord(
            degree=f.degree,
            mask=f.bits,
            orbit_size=orbit_size,
            counts=counts,
            singular=tuple(singular),
            blowups=blowups,
            r_distinct=r,
            genus=gi,
            n_range=n_range,
            absolute=status.absolute,
            certificate_field=status.certificate_field,
            witness=str(status.witness) if status.witness else None,
            flags=tuple(flags),
            theorem1_ok=theorem1_ok,
        )


def _dedup_multiplicities(singular: list[SingularPoint]) -> list[int]:
    """Multiplicities of the deduplicated singular set (see
    distinct_singular_count for the dedup rule)."""
    f2: dict[tuple[int, int, int], int] = {}
    per_field: dict[int, list[int]] = {}
    for s in singular:
        if max(s.point) <= 1:
            f2[s.point] = s.multiplicity
        else:
            per_field.setdefault(s.q, []).append(s.multiplicity)
    best: list[int] = max(per_field.values(), key=len, default=[])
    return list(f2.values()) + best


# -- worker pool plumbing ----------------------------------------------------------


_WORKER_PIPELINE: CurvePipeline | None = None
_WORKER_MARGIN: int = 15


def _process_orbits(batch: list[OrbitInfo]) -> tuple[list[CurveRecord], SearchStats]:
    pipe = _WORKER_PIPELINE
    assert pipe is not None
    stats = SearchStats()
    records: list[CurveRecord] = []
    for info in batch:
        stats.orbits_seen += 1
        if info.trivially_reducible:
            stats.orbits_trivial += 1
            continue
        eval_rep = info.eval_rep
        counts = pipe.count_all(eval_rep)
        stats.counted += 1
        try:
            gi = pipe.quick_genus(info.degree, counts)
        except GenusInconsistency:
            stats.dropped_inconsistent += 1
            continue
        if not pipe.meets_threshold(counts, gi, _WORKER_MARGIN):
            stats.dropped_threshold += 1
            continue
        record = pipe.analyze(info.rep, info.orbit_size)
        if record is None:
            stats.dropped_inconsistent += 1
            continue
        if record.absolute == "reducible":
            stats.dropped_reducible += 1
            continue
        if record.theorem1_ok is False:
            if record.absolute == "yes":
                raise RuntimeError(
                    f"certified curve {record.poly.mask_id} violates the "
                    "multiplicity-sum bound; pipeline bug"
                )
            stats.dropped_reducible += 1
            continue
        stats.kept += 1
        records.append(record)
    return records, stats


def _merge_stats(total: SearchStats, part: SearchStats) -> None:
    for name in vars(part):
        setattr(total, name, getattr(total, name) + getattr(part, name))


# -- checkpointing -------------------------------------------------------------------


def _checkpoint_save(path: str, cfg: SearchConfig, engine: SieveEngine) -> None:
    position, table = engine.pack_state()
    header = struct.pack(
        "<BBi", cfg.degree, len(cfg.fields), cfg.keep_margin
    ) + struct.pack(f"<{len(cfg.fields)}H", *cfg.fields) + struct.pack(
        "<QQ", position, len(table)
    )
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(header)
        fh.write(table)
    os.replace(tmp, path)


def _checkpoint_load(path: str, cfg: SearchConfig, engine: SieveEngine) -> None:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < len(CHECKPOINT_MAGIC) + 6 or not blob.startswith(CHECKPOINT_MAGIC):
        raise CheckpointError(f"{path}: bad checkpoint magic")
    off = len(CHECKPOINT_MAGIC)
    degree, n_fields, margin = struct.unpack_from("<BBi", blob, off)
    off += struct.calcsize("<BBi")
    fields = struct.unpack_from(f"<{n_fields}H", blob, off)
    off += n_fields * 2
    position, table_len = struct.unpack_from("<QQ", blob, off)
    off += struct.calcsize("<QQ")
    if degree != cfg.degree or fields != cfg.fields or margin != cfg.keep_margin:
        raise CheckpointError(
            f"{path}: checkpoint was written for degree={degree}, "
            f"fields={list(fields)}, margin={margin}; current config differs"
        )
    table = blob[off:]
    if len(table) != table_len:
        raise CheckpointError(
            f"{path}: truncated bit table ({len(table)} of {table_len} bytes)"
        )
    try:
        engine.restore_state(position, table)
    except ValueError as exc:
        raise CheckpointError(f"{path}: {exc}") from None


# -- the search driver ------------------------------------------------------------------


def run_search(cfg: SearchConfig, *, stats: SearchStats | None = None
               ) -> list[CurveRecord]:
    """Run the full pipeline and return the canonically sorted catalog.

    With cfg.out_path set, records are also streamed to the file as they are
    found and the file is rewritten in canonical order at the end.  With
    cfg.checkpoint_path set, progress resumes from a compatible checkpoint.
    """
    if cfg.long_run:
        warnings.warn(
            "degree-6 search over fields beyond 2^9 is a multi-hour run; "
            "checkpointing is recommended"
        )
    global _WORKER_PIPELINE, _WORKER_MARGIN
    bound_table = load_lauter(cfg.lauter_path)
    pipeline = CurvePipeline(cfg.fields, bound_table, use_tables=cfg.use_tables)
    _WORKER_PIPELINE = pipeline
    _WORKER_MARGIN = cfg.keep_margin

    engine = SieveEngine(cfg.degree)
    out_fh = None
    if cfg.checkpoint_path and os.path.exists(cfg.checkpoint_path):
        _checkpoint_load(cfg.checkpoint_path, cfg, engine)
    elif cfg.out_path and os.path.exists(cfg.out_path):
        os.remove(cfg.out_path)
    if cfg.out_path:
        out_fh = open(cfg.out_path, "a", encoding="utf-8")

    total_stats = stats if stats is not None else SearchStats()
    records: list[CurveRecord] = []
    span = 1 << cfg.range_bits
    pool = None
    try:
        if cfg.jobs > 1:
            # Build the monomial tables before forking so workers share the
            # parent's read-only pages instead of each building their own.
            for q in cfg.fields:
                pipeline.counters[q].monomial_table(cfg.degree)
                if cfg.degree > 1:
                    pipeline.counters[q].monomial_table(cfg.degree - 1)
            pool = multiprocessing.get_context("fork").Pool(cfg.jobs)
        ranges_done = 0
        while not engine.done:
            infos = engine.run_range(span)
            batches = [infos[i: i + 64] for i in range(0, len(infos), 64)]
            if pool is not None:
                results = pool.map(_process_orbits, batches)
            else:
                results = [_process_orbits(b) for b in batches]
            for recs, st in results:
                _merge_stats(total_stats, st)
                records.extend(recs)
                if out_fh is not None:
                    for rec in recs:
                        out_fh.write(rec.to_json() + "\n")
            if out_fh is not None:
                out_fh.flush()
            if cfg.checkpoint_path:
                _checkpoint_save(cfg.checkpoint_path, cfg, engine)
            ranges_done += 1
            if cfg.stop_after_ranges and ranges_done >= cfg.stop_after_ranges:
                raise InterruptedError(
                    f"stopped after {ranges_done} ranges (testing hook)"
                )
    finally:
        if pool is not None:
            pool.close()
            pool.join()
        if out_fh is not None:
            out_fh.close()

    if cfg.out_path:
        # A resumed run appended to an existing file; the file is the full
        # record set, the in-memory list only covers this process's ranges.
        records = read_catalog(cfg.out_path, lenient_tail=True)
    records = finalize_catalog(records)
    if cfg.out_path:
        write_catalog(cfg.out_path, records)
    return records


def finalize_catalog(records: Iterable[CurveRecord]) -> list[CurveRecord]:
    """Canonical order (degree, mask), first record wins on duplicate masks."""
    seen: dict[tuple[int, int], CurveRecord] = {}
    for rec in records:
        seen.setdefault((rec.degree, rec.mask), rec)
    return [seen[k] for k in sorted(seen)]


def write_catalog(path: str, records: list[CurveRecord]) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")
    os.replace(tmp, path)


def read_catalog(path: str, *, lenient_tail: bool = False) -> list[CurveRecord]:
    """Load a catalog file; lenient_tail tolerates one torn final line left
    behind by an interrupted writer (the range it came from gets rerun)."""
    out = []
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    for n, line in enumerate(lines):
        try:
            out.append(CurveRecord.from_json(line))
        except (json.JSONDecodeError, KeyError):
            if lenient_tail and n == len(lines) - 1:
                break
            raise
    return out


# -- single-curve verification -----------------------------------------------------------


def verify(poly: str | PolyMask, q: int, *, lauter_path: str | None = None,
           use_tables: bool = True) -> CurveRecord:
    """Full analysis of one curve over one field (regression entry point)."""
    if isinstance(poly, str):
        poly = poly.strip()
        f = parse_mask_id(poly) if poly.startswith("d") and ":" in poly \
            else parse_poly(poly)
    else:
        f = poly
    if f.degree > 6:
        raise ConfigError(f"degree {f.degree} exceeds 6")
    if f.bits == 0:
        raise ConfigError("zero polynomial")
    if is_trivially_reducible(f):
        raise ConfigError(f"{format_poly(f)} is trivially reducible")
    if q not in SUPPORTED_FIELDS and q not in (2, 4):
        raise ConfigError(f"unsupported field order {q}")
    bound_table = load_lauter(lauter_path)
    pipeline = CurvePipeline((q,), bound_table, use_tables=use_tables)
    record = pipeline.analyze(f, orbit_size=len(orbit_of(f)))
    if record is None:
        # Surface the inconsistency as a flagged record rather than an error:
        # corpus tooling reports it, nothing downstream trusts the bounds.
        counts = pipeline.count_all(f)
        r = distinct_singular_count(counts)
        return CurveRecord(
            degree=f.degree, mask=f.bits, orbit_size=len(orbit_of(f)),
            counts=counts, singular=(), blowups={}, r_distinct=r,
            genus=GenusInterval(0, (f.degree - 1) * (f.degree - 2) // 2),
            n_range={}, absolute="reducible", certificate_field=None,
            witness=None, flags=("bounds-inconsistent",), theorem1_ok=None,
        )
    return record


# -- reporting ------------------------------------------------------------------------------


def report(records: list[CurveRecord], bound_table: BoundTable | None = None,
           *, genus_range: tuple[int, int] = (1, 10)) -> str:
    """Best-vs-bound tally over (q, g) plus the ambiguous-genus appendix."""
    if not records:
        raise ValueError("empty catalog")
    bound_table = bound_table or load_lauter(None)
    orders = sorted({q for rec in records for q in rec.n_range})
    g_lo, g_hi = genus_range

    pinned: dict[tuple[int, int], int] = {}
    witness: dict[tuple[int, int], CurveRecord] = {}
    ambiguous: list[CurveRecord] = []
    for rec in records:
        if rec.genus.lo == rec.genus.hi:
            g = rec.genus.lo
            for q in rec.n_range:
                key = (q, g)
                if rec.n_lo(q) > pinned.get(key, -1):
                    pinned[key] = rec.n_lo(q)
                    witness[key] = rec
        else:
            ambiguous.append(rec)

    lines = []
    header = ["q".rjust(5)] + [
        f"best {g}".rjust(8) + f"bound {g}".rjust(9) + "gap".rjust(5)
        for g in range(g_lo, g_hi + 1)
    ]
    lines.append(" |".join(header))
    for q in orders:
        cells = [str(q).rjust(5)]
        for g in range(g_lo, g_hi + 1):
            bound, _src = bound_table.effective(q, g)
            best = pinned.get((q, g))
            if best is None:
                cells.append("—".rjust(8) + str(bound).rjust(9) + "—".rjust(5))
            else:
                cells.append(
                    str(best).rjust(8) + str(bound).rjust(9)
                    + str(bound - best).rjust(5)
                )
        lines.append(" |".join(cells))

    if ambiguous:
        lines.append("")
        lines.append("ambiguous genus (interval not pinned; best values not tallied):")
        for rec in sorted(ambiguous, key=lambda r: (r.degree, r.mask)):
            n_parts = ", ".join(
                f"q={q}: N>={rec.n_lo(q)}" for q in sorted(rec.n_range)
            )
            lines.append(
                f"  {rec.poly.mask_id} genus [{rec.genus.lo}, {rec.genus.hi}] "
                f"{n_parts}"
            )

    best_cells = sorted(k for k in pinned)
    if best_cells:
        lines.append("")
        lines.append("code parameters from pinned records (derived):")
        for q, g in best_cells:
            n = pinned[(q, g)]
            if n - 1 >= 2 * g and g >= 1:
                lines.append(
                    f"  (q={q}, g={g}, N={n}): [n, k-{g - 1}, n-k] codes for "
                    f"{2 * g} <= n <= {n - 1} and {2 * g - 2} < k < n"
                )
    return "\n".join(lines)
