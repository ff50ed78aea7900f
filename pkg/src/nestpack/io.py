"""Instance / solution serialization, SVG rendering, results tables.

Canonical instance format: a JSON document with ``bin{width,length}``,
optional ``rotations`` (degrees) and ``bin_bound``, and ``pieces`` as a
list of ``{id, vertices | parts, quantity?}``.  ``vertices`` is a list
of [x, y] pairs; ``parts`` (for pre-combined pieces) is a list of such
vertex lists.  Pieces are normalized on load: the first vertex moves to
the origin and vertex order becomes counterclockwise.  A secondary
plain-text importer accepts the common vertex-list layout used by the
public nesting datasets (per piece: a vertex-count line followed by
``x y`` pairs, with an optional leading piece-count line).

Solution files echo the solver configuration, record one placement per
atomic piece, and round-trip bit-exactly (coordinates are serialized via
``repr``, which is shortest-exact for doubles).
"""

from __future__ import annotations

import colorsys
import hashlib
import io as _io
import json
import math
import os
from typing import Iterable, Optional, Sequence

import numpy as np

from . import geometry
from .geometry import Tolerance
from .metrics import utilization
from .model import (BinState, Instance, Part, Piece, PositionTriplet,
                    Solution, realize_arrays)


class ParseError(ValueError):
    """Malformed instance document."""


class SolutionFormatError(ValueError):
    """Malformed or inconsistent solution document."""


class ChecksumMismatch(SolutionFormatError):
    """Solution paired with a different instance."""


DEFAULT_ROTATIONS = (0.0, 90.0, 180.0, 270.0)


# ---------------------------------------------------------------------------
# instances

def _normalize_rotations(values) -> tuple[float, ...]:
    out: list[float] = []
    for v in values:
        a = float(v) % 360.0
        if a not in out:
            out.append(a)
    if not out:
        raise ParseError("rotation set must not be empty")
    return tuple(out)


def _clean_polygon(verts, where: str, tol: Tolerance) -> np.ndarray:
    arr = np.asarray(verts, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 3:
        raise ParseError(f"{where}: vertices must be a list of >= 3 [x, y] pairs")
    if not np.isfinite(arr).all():
        raise ParseError(f"{where}: vertices must be finite numbers")
    arr = geometry.ensure_ccw(np.ascontiguousarray(arr))
    if not geometry.is_simple_polygon(arr, tol):
        raise ParseError(f"{where}: polygon is degenerate or self-intersecting")
    return arr


def _build_piece(pid: str, entry: dict, where: str, tol: Tolerance) -> Piece:
    if "vertices" in entry:
        arr = _clean_polygon(entry["vertices"], where, tol)
        arr = arr - arr[0]  # reference point to the origin
        return Piece.atomic(pid, np.ascontiguousarray(arr))
    if "parts" in entry:
        raw = entry["parts"]
        if not isinstance(raw, list) or not raw:
            raise ParseError(f"{where}: parts must be a non-empty list")
        arrs = [_clean_polygon(p, f"{where} part {k + 1}", tol)
                for k, p in enumerate(raw)]
        ref = arrs[0][0].copy()
        parts = []
        for k, arr in enumerate(arrs):
            local = arr - ref
            origin = local[0].copy()
            shape = np.ascontiguousarray(local - origin)
            parts.append(Part(f"{pid}#part{k + 1}", shape, 0.0,
                              (float(origin[0]), float(origin[1]))))
        return Piece(pid, parts)
    raise ParseError(f"{where}: piece needs 'vertices' or 'parts'")


def parse_instance(doc: dict, name: str = "", tol: Tolerance | None = None) -> Instance:
    if not isinstance(doc, dict):
        raise ParseError("instance document must be a JSON object")
    try:
        width = float(doc["bin"]["width"])
        length = float(doc["bin"]["length"])
    except (KeyError, TypeError, ValueError):
        raise ParseError("instance needs bin.width and bin.length") from None
    if not (width > 0 and length > 0):
        raise ParseError("bin dimensions must be positive")
    tol = tol or Tolerance.for_bin(width, length)
    rotations = _normalize_rotations(doc.get("rotations", DEFAULT_ROTATIONS))

    raw_pieces = doc.get("pieces")
    if not isinstance(raw_pieces, list) or not raw_pieces:
        raise ParseError("instance needs a non-empty pieces list")
    pieces: list[Piece] = []
    for idx, entry in enumerate(raw_pieces):
        if not isinstance(entry, dict):
            raise ParseError(f"piece {idx + 1}: must be an object")
        pid = str(entry.get("id", f"piece{idx + 1}"))
        qty = entry.get("quantity", 1)
        if not isinstance(qty, int) or qty < 1:
            raise ParseError(f"piece {pid!r}: quantity must be a positive integer")
        base = _build_piece(pid, entry, f"piece {pid!r}", tol)
        if qty == 1:
            pieces.append(base)
        else:
            for k in range(1, qty + 1):
                pieces.append(Piece(f"{pid}#{k}", [
                    Part(f"{pid}#{k}" if len(base.parts) == 1 else part.piece_id,
                         part.shape, part.rotation, part.translation)
                    for part in base.parts]))
    inst = Instance(pieces=tuple(pieces), width=width, length=length,
                    rotations=rotations, bin_bound=int(doc.get("bin_bound", 0)),
                    tol=tol, name=name)
    for p in inst.pieces:
        if not inst.fits_empty_bin(p):
            raise ParseError(
                f"piece {p.id!r} does not fit an empty bin under any allowed rotation")
    return inst


def parse_esicup_text(text: str, bin_width: float, bin_length: float,
                      rotations=None, name: str = "",
                      tol: Tolerance | None = None) -> Instance:
    """Plain-text vertex-list importer (count line + ``x y`` pairs per
    piece, optional leading total-count line, # / // comments)."""
    tokens: list[str] = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#") or stripped.startswith("//"):
            continue
        tokens.extend(stripped.split())

    def read_blocks(toks: list[str]) -> list[list[list[float]]]:
        polys = []
        i = 0
        while i < len(toks):
            try:
                m = int(toks[i])
            except ValueError:
                raise ParseError(
                    f"expected a vertex count, got {toks[i]!r} (token {i + 1})")
            if m < 3:
                raise ParseError(f"vertex count {m} at token {i + 1} is below 3")
            i += 1
            if i + 2 * m > len(toks):
                raise ParseError(
                    f"piece with {m} vertices truncated at token {i + 1}")
            verts = []
            for k in range(m):
                try:
                    x = float(toks[i + 2 * k])
                    y = float(toks[i + 2 * k + 1])
                except ValueError:
                    raise ParseError(
                        f"bad coordinate near token {i + 2 * k + 1}") from None
                verts.append([x, y])
            i += 2 * m
            polys.append(verts)
        if not polys:
            raise ParseError("no pieces found")
        return polys

    try:
        polys = read_blocks(tokens)
    except ParseError as first_err:
        # retry treating the first token as a total piece count
        if tokens:
            try:
                count = int(tokens[0])
                polys = read_blocks(tokens[1:])
                if len(polys) != count:
                    raise ParseError(
                        f"header declares {count} pieces, found {len(polys)}")
            except ParseError:
                raise first_err from None
        else:
            raise
    doc = {
        "bin": {"width": bin_width, "length": bin_length},
        "rotations": list(rotations) if rotations else list(DEFAULT_ROTATIONS),
        "pieces": [{"id": f"piece{k + 1}", "vertices": v}
                   for k, v in enumerate(polys)],
    }
    return parse_instance(doc, name=name, tol=tol)


def load_instance(path, bin_width: Optional[float] = None,
                  bin_length: Optional[float] = None,
                  rotations=None) -> Instance:
    """Load .json documents directly; any other extension goes through
    the plain-text importer (which needs explicit bin dimensions)."""
    name = os.path.basename(str(path))
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if str(path).endswith(".json"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"{name}: invalid JSON ({e})") from None
        return parse_instance(doc, name=name)
    if bin_width is None or bin_length is None:
        raise ParseError(
            f"{name}: text instances need --bin-width and --bin-length")
    return parse_esicup_text(text, bin_width, bin_length,
                             rotations=rotations, name=name)


def instance_to_doc(instance: Instance) -> dict:
    pieces = []
    for p in instance.pieces:
        if len(p.polys) == 1:
            pieces.append({"id": p.id,
                           "vertices": [[float(x), float(y)] for x, y in p.polys[0]]})
        else:
            pieces.append({"id": p.id,
                           "parts": [[[float(x), float(y)] for x, y in poly]
                                     for poly in p.polys]})
    doc = {
        "bin": {"width": instance.width, "length": instance.length},
        "rotations": list(instance.rotations),
        "pieces": pieces,
    }
    if instance.bin_bound != len(instance.pieces):
        doc["bin_bound"] = instance.bin_bound
    return doc


def instance_checksum(instance: Instance) -> str:
    canon = json.dumps(instance_to_doc(instance), sort_keys=True,
                       separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def write_instance(instance: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_doc(instance), fh, indent=1)
        fh.write("\n")


# ---------------------------------------------------------------------------
# solutions

def solution_to_doc(solution: Solution, stats=None, config: dict | None = None) -> dict:
    inst = solution.instance
    placements = []
    for b in solution.bins:
        for piece, t in b.placements:
            placements.append({
                "piece": piece.id,
                "bin": b.index,
                "translation": [float(t.translation[0]), float(t.translation[1])],
                "rotation": float(t.rotation),
            })
    us = [utilization(b, inst.width, inst.length) for b in solution.bins]
    doc = {
        "format": "nestpack-solution",
        "version": 1,
        "instance_checksum": instance_checksum(inst),
        "variant": getattr(stats, "variant", None),
        "config": config or {},
        "bins_used": solution.n_bins,
        "placements": placements,
        "metrics": {
            "F": getattr(stats, "f_value", None),
            "K": getattr(stats, "k_value", None),
            "R_star": getattr(stats, "r_star", None),
            "bin_utilization": us,
        },
        "timings": {
            "merge_seconds": getattr(stats, "merge_seconds", 0.0),
            "total_seconds": getattr(stats, "total_seconds", 0.0),
        },
        "pieces_after_merge": getattr(stats, "pieces_after_merge", len(inst.pieces)),
        "merge_groups": getattr(stats, "merge_groups", {}),
    }
    return doc


def write_solution(solution: Solution, path, stats=None,
                   config: dict | None = None) -> dict:
    doc = solution_to_doc(solution, stats=stats, config=config)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    return doc


def read_solution(doc: dict, instance: Instance) -> tuple[Solution, dict]:
    """Rebuild a Solution against its instance; verifies the checksum and
    exact piece coverage."""
    if not isinstance(doc, dict) or doc.get("format") != "nestpack-solution":
        raise SolutionFormatError("not a solution document")
    want = instance_checksum(instance)
    got = doc.get("instance_checksum")
    if got != want:
        raise ChecksumMismatch(
            f"solution was produced for a different instance ({got} != {want})")
    placements = doc.get("placements")
    if not isinstance(placements, list):
        raise SolutionFormatError("placements must be a list")
    by_bin: dict[int, list[tuple[Piece, PositionTriplet]]] = {}
    seen: set[str] = set()
    for k, entry in enumerate(placements):
        try:
            pid = entry["piece"]
            b = int(entry["bin"])
            tx, ty = entry["translation"]
            rot = float(entry.get("rotation", 0.0))
        except (KeyError, TypeError, ValueError):
            raise SolutionFormatError(f"placement {k + 1}: malformed") from None
        piece = instance.piece_by_id.get(pid)
        if piece is None:
            raise SolutionFormatError(f"placement {k + 1}: unknown piece {pid!r}")
        if pid in seen:
            raise SolutionFormatError(f"piece {pid!r} placed twice")
        seen.add(pid)
        by_bin.setdefault(b, []).append(
            (piece, PositionTriplet(b, (float(tx), float(ty)), rot)))
    missing = sorted({p.id for p in instance.pieces} - seen)
    if missing:
        raise SolutionFormatError(f"missing piece(s): {', '.join(missing[:5])}")
    bins = tuple(
        BinState(i, instance.width, instance.length, tuple(by_bin[i]))
        for i in sorted(by_bin))
    meta = {
        "variant": doc.get("variant"),
        "metrics": doc.get("metrics", {}),
        "timings": doc.get("timings", {}),
        "pieces_after_merge": doc.get("pieces_after_merge"),
        "merge_groups": doc.get("merge_groups", {}),
        "config": doc.get("config", {}),
    }
    return Solution(instance, bins), meta


def load_solution(path, instance: Instance) -> tuple[Solution, dict]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise SolutionFormatError(f"invalid JSON ({e})") from None
    return read_solution(doc, instance)


# ---------------------------------------------------------------------------
# SVG rendering

_GOLDEN_ANGLE = 137.50776405003785


def _fill_color(hue_index: int, shade: int = 0) -> str:
    h = (hue_index * _GOLDEN_ANGLE) % 360.0
    light = 0.62 + 0.10 * (shade % 3 - 1)
    r, g, b = colorsys.hls_to_rgb(h / 360.0, light, 0.65)
    return f"#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}"


def render_svg(solution: Solution, instance: Instance, out_dir,
               merge_groups: dict[str, list[str]] | None = None) -> list[str]:
    """One SVG per bin plus an index SVG; returns the written paths.

    Pieces get one fill per id; atomic pieces that came out of the same
    merged composite share a hue family.
    """
    os.makedirs(out_dir, exist_ok=True)
    W, L = instance.width, instance.length
    scale = 1000.0 / W
    height = L * scale

    group_of: dict[str, str] = {}
    for gid, members in (merge_groups or {}).items():
        for pid in members:
            group_of[pid] = gid
    hue_of: dict[str, int] = {}
    group_size: dict[str, int] = {}
    shade_of: dict[str, int] = {}

    def style_for(pid: str) -> str:
        key = group_of.get(pid, pid)
        if key not in hue_of:
            hue_of[key] = len(hue_of)
        if pid not in shade_of:
            shade_of[pid] = group_size.get(key, 0)
            group_size[key] = shade_of[pid] + 1
        return _fill_color(hue_of[key], shade_of[pid])

    written: list[str] = []
    bin_files: list[tuple[int, float, str]] = []
    for b in solution.bins:
        u = utilization(b, W, L)
        buf = _io.StringIO()
        buf.write(
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{1000}" '
            f'height="{height + 40:.2f}" viewBox="0 0 1000 {height + 40:.2f}">\n')
        buf.write(f'  <rect x="0" y="0" width="1000" height="{height:.6g}" '
                  f'fill="#fafafa" stroke="#222" stroke-width="1.5"/>\n')
        for piece, t in b.placements:
            color = style_for(piece.id)
            for verts in realize_arrays(piece, t):
                pts = " ".join(
                    f"{float(x) * scale!r},{(L - float(y)) * scale!r}"
                    for x, y in verts)
                buf.write(f'  <polygon points="{pts}" fill="{color}" '
                          f'fill-opacity="0.85" stroke="#333" stroke-width="0.8">'
                          f'<title>{piece.id}</title></polygon>\n')
        buf.write(f'  <text x="8" y="{height + 26:.2f}" font-family="sans-serif" '
                  f'font-size="18">bin {b.index}  U={u:.4f}</text>\n')
        buf.write("</svg>\n")
        fname = os.path.join(out_dir, f"bin_{b.index:03d}.svg")
        with open(fname, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
        written.append(fname)
        bin_files.append((b.index, u, os.path.basename(fname)))

    n = len(bin_files)
    cell = 1000.0 / max(n, 1)
    ih = min(cell * L / W, 240.0)
    buf = _io.StringIO()
    buf.write(f'<svg xmlns="http://www.w3.org/2000/svg" width="1000" '
              f'height="{ih + 50:.2f}" viewBox="0 0 1000 {ih + 50:.2f}">\n')
    if n == 0:
        buf.write('  <text x="8" y="24" font-family="sans-serif" '
                  'font-size="16">empty solution (0 bins)</text>\n')
    for k, (idx, u, fname) in enumerate(bin_files):
        x = k * cell
        w = cell * 0.9
        h = w * L / W if w * L / W <= ih else ih
        buf.write(f'  <rect x="{x + cell * 0.05:.2f}" y="6" width="{w:.2f}" '
                  f'height="{h:.2f}" fill="#e8eef7" stroke="#222"/>\n')
        buf.write(f'  <text x="{x + cell * 0.05:.2f}" y="{h + 30:.2f}" '
                  f'font-family="sans-serif" font-size="13">'
                  f'bin {idx} U={u:.3f} ({fname})</text>\n')
    buf.write("</svg>\n")
    fname = os.path.join(out_dir, "index.svg")
    with open(fname, "w", encoding="utf-8") as fh:
        fh.write(buf.getvalue())
    written.append(fname)
    return written


# ---------------------------------------------------------------------------
# benchmark tables

BENCH_COLUMNS = ("instance", "variant", "status", "N", "F", "K",
                 "pieces_after_merge", "merge_time", "total_time")
_NUMERIC = ("N", "F", "K", "pieces_after_merge", "merge_time", "total_time")
_TIMING = ("merge_time", "total_time")


def _fmt(col: str, value) -> str:
    if value is None or value == "":
        return ""
    if col in _TIMING:
        return f"{float(value):.3f}"
    if col in ("N", "pieces_after_merge"):
        f = float(value)
        return str(int(f)) if f == int(f) else repr(f)
    return repr(float(value))


def write_bench_csv(rows: Sequence[dict], path=None) -> str:
    """Tabular results plus a summary block (average, min, quartiles by
    linear interpolation, max per numeric column).  Needs >= 1 row."""
    if not rows:
        raise ValueError("write_bench_csv needs at least one row")
    lines = [",".join(BENCH_COLUMNS)]
    for row in rows:
        cells = [str(row.get("instance", "")), str(row.get("variant", "")),
                 str(row.get("status", "ok"))]
        cells += [_fmt(c, row.get(c)) for c in _NUMERIC]
        lines.append(",".join(cells))

    ok = [r for r in rows if r.get("status", "ok") == "ok"]
    if ok:
        lines.append("# summary")
        lines.append("stat," + ",".join(_NUMERIC))
        stats_rows = [
            ("average", np.mean),
            ("min", np.min),
            ("Q1", lambda v: np.quantile(v, 0.25)),
            ("median", lambda v: np.quantile(v, 0.5)),
            ("Q3", lambda v: np.quantile(v, 0.75)),
            ("max", np.max),
        ]
        for label, fn in stats_rows:
            cells = [label]
            for col in _NUMERIC:
                vals = np.array([float(r[col]) for r in ok
                                 if r.get(col) is not None], dtype=float)
                cells.append(_fmt(col, float(fn(vals))) if vals.size else "")
            lines.append(",".join(cells))
    content = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(content)
    return content
