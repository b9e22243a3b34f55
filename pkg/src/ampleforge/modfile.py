"""The plain-text module file format.

    # optional comments
    ring p=5 n=2 vars=x,y,z
    name three-points          (optional)
    gens [0]
    rels [[x*y, x*z, y*z]]

``gens`` lists generator degrees; ``rels`` is the relation matrix as rows
(row i = generator slot i), entries in the polynomial syntax, ``0`` for a
zero entry.  One matrix row per generator.  Parsing is whitespace-tolerant
and reports line/column positions; printing is canonical, so
parse(print(M)) round-trips byte-identically.
"""

from __future__ import annotations

import re

from .modules import FreeModule, GradedCompatibilityError, GradedMap, PresentedModule
from .ring import GradedRing, PolyParseError, format_poly, parse_poly


class ModuleFileError(ValueError):
    def __init__(self, line: int, col: int, msg: str):
        self.line = line
        self.col = col
        super().__init__(f"line {line}, column {col}: {msg}")


_RING_RE = re.compile(
    r"ring\s+p=(\d+)\s+n=(\d+)\s+vars=([A-Za-z0-9_,\s]+?)\s*$"
)


def _strip_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if body.strip():
            yield lineno, body


def _parse_bracket_list(text: str, lineno: int):
    """Parse [a, b, ...] with nesting depth 1 or 2, returning nested lists
    of (string, column) leaves."""
    items: list = []
    stack = [items]
    token = ""
    token_col = None
    for col, ch in enumerate(text, start=1):
        if ch == "[":
            if len(stack) > 2:
                raise ModuleFileError(lineno, col, "brackets nested too deep")
            new: list = []
            stack[-1].append(new)
            stack.append(new)
        elif ch == "]":
            if token.strip():
                stack[-1].append((token.strip(), token_col))
            token, token_col = "", None
            if len(stack) == 1:
                raise ModuleFileError(lineno, col, "unbalanced ']'")
            stack.pop()
        elif ch == ",":
            if token.strip():
                stack[-1].append((token.strip(), token_col))
            token, token_col = "", None
        else:
            if token == "" and not ch.isspace():
                token_col = col
            token += ch
    if len(stack) != 1:
        raise ModuleFileError(lineno, len(text), "unbalanced '['")
    if token.strip():
        raise ModuleFileError(lineno, len(text), "trailing content after ']'")
    if not items:
        raise ModuleFileError(lineno, 1, "empty bracket list")
    return items[0] if len(items) == 1 else items


def parse_module(data: bytes | str) -> PresentedModule:
    """Parse UTF-8 module text into a validated PresentedModule."""
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    ring = None
    name = ""
    gens = None
    rel_rows = None
    pending = None  # (keyword, lineno, buffer) for multi-line brackets

    def finish(keyword, lineno, buf):
        nonlocal gens, rel_rows
        parsed = _parse_bracket_list(buf, lineno)
        if keyword == "gens":
            gens = []
            for leaf in parsed:
                if isinstance(leaf, list):
                    raise ModuleFileError(lineno, 1, "gens must be a flat list")
                tok, col = leaf
                try:
                    gens.append(int(tok))
                except ValueError:
                    raise ModuleFileError(lineno, col, f"bad degree {tok!r}")
        else:
            rel_rows = []
            for leaf in parsed:
                if not isinstance(leaf, list):
                    tok, col = leaf
                    raise ModuleFileError(
                        lineno, col, "rels must be a list of rows"
                    )
                rel_rows.append(leaf)

    for lineno, body in _strip_lines(text):
        if pending is not None:
            keyword, start, buf = pending
            buf += " " + body.strip()
            if buf.count("[") == buf.count("]"):
                finish(keyword, start, buf)
                pending = None
            else:
                pending = (keyword, start, buf)
            continue
        stripped = body.strip()
        if stripped.startswith("ring"):
            m = _RING_RE.match(stripped)
            if not m:
                raise ModuleFileError(lineno, 1, "bad ring header")
            p, n = int(m.group(1)), int(m.group(2))
            names = tuple(v.strip() for v in m.group(3).split(","))
            try:
                ring = GradedRing(p, n + 1, names)
            except Exception as e:
                raise ModuleFileError(lineno, 1, str(e))
        elif stripped.startswith("name"):
            name = stripped[4:].strip()
        elif stripped.startswith("gens") or stripped.startswith("rels"):
            keyword = stripped[:4]
            rest = stripped[4:].strip()
            if rest.count("[") == rest.count("]") and rest:
                finish(keyword, lineno, rest)
            else:
                pending = (keyword, lineno, rest)
        else:
            raise ModuleFileError(lineno, 1, f"unknown directive {stripped.split()[0]!r}")
    if pending is not None:
        raise ModuleFileError(pending[1], 1, f"unterminated {pending[0]} list")
    if ring is None:
        raise ModuleFileError(1, 1, "missing ring header")
    if gens is None:
        raise ModuleFileError(1, 1, "missing gens list")

    generators = FreeModule(ring, gens)
    if not rel_rows:
        return PresentedModule(generators, None, name=name)
    if len(rel_rows) != len(gens):
        raise ModuleFileError(
            1, 1, f"rels has {len(rel_rows)} rows for {len(gens)} generators"
        )
    ncols = len(rel_rows[0])
    polys = []
    for i, row in enumerate(rel_rows):
        if len(row) != ncols:
            raise ModuleFileError(1, 1, f"ragged relation row {i}")
        out_row = []
        for tok, col in row:
            if tok == "0":
                out_row.append(None)
                continue
            try:
                out_row.append(parse_poly(ring, tok))
            except PolyParseError as e:
                raise ModuleFileError(0, col, f"entry ({i},{len(out_row)}): {e}")
        polys.append(out_row)

    # column degrees from any nonzero entry; graded compatibility is checked
    # by the GradedMap constructor
    src_twists = []
    for j in range(ncols):
        deg = None
        for i in range(len(gens)):
            e = polys[i][j]
            if e is not None and not e.is_zero():
                deg = e.degree() + gens[i]
                break
        src_twists.append(deg if deg is not None else 0)
    try:
        rel = GradedMap(FreeModule(ring, src_twists), generators, polys)
    except GradedCompatibilityError as e:
        raise ModuleFileError(0, 0, str(e))
    return PresentedModule(generators, rel, name=name)


def format_module(M: PresentedModule) -> str:
    """Canonical printer; output re-parses to an equal presentation."""
    ring = M.ring
    lines = [
        f"ring p={ring.p} n={ring.projective_dim} vars={','.join(ring.names)}"
    ]
    if M.name:
        lines.append(f"name {M.name}")
    lines.append("gens [" + ", ".join(str(t) for t in M.generators.twists) + "]")
    if M.relations.source.rank:
        rows = []
        for i in range(M.generators.rank):
            cells = []
            for j in range(M.relations.source.rank):
                e = M.relations.matrix[i][j]
                cells.append("0" if e is None else format_poly(e))
            rows.append("[" + ", ".join(cells) + "]")
        lines.append("rels [" + ", ".join(rows) + "]")
    return "\n".join(lines) + "\n"
