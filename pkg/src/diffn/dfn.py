"""Reader and writer for the DFN-1 text format.

Object files carry a header ``dfn-object v1 field=<p|Q> n=<n> dim=<d>`` and
d rows of eps.  Morphism files carry ``dfn-morphism v1 field=.. n=.. rows=..
cols=..``, ``src=`` and ``dst=`` lines naming object files (relative to the
morphism file), then the matrix.  Sequence files are ``dfn-ses v1`` with
``i=`` and ``p=`` lines naming morphism files.  Blank lines and lines
starting with ``#`` are ignored.
"""

from __future__ import annotations

import os
from pathlib import Path

from .core import DiffMorphism, DiffObject, ShortExactSeq
from .errors import DegreeMismatch, FieldMismatch, FormatError
from .exactla import FieldSpec, Matrix


def _content_lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def _parse_header(line: str, kind: str, keys: tuple[str, ...]) -> dict[str, str]:
    words = line.split()
    if words[:2] != [f"dfn-{kind}", "v1"]:
        raise FormatError(f"expected header 'dfn-{kind} v1 ...', got {line!r}")
    fields = {}
    for word in words[2:]:
        key, sep, value = word.partition("=")
        if not sep:
            raise FormatError(f"malformed header field {word!r}")
        fields[key] = value
    missing = [k for k in keys if k not in fields]
    if missing:
        raise FormatError(f"header is missing {', '.join(missing)}")
    return fields


def _int_field(fields: dict[str, str], key: str) -> int:
    try:
        value = int(fields[key])
    except ValueError:
        raise FormatError(f"{key}={fields[key]!r} is not an integer") from None
    if value < 0:
        raise FormatError(f"{key} must be non-negative")
    return value


def _parse_field(text: str) -> FieldSpec:
    try:
        return FieldSpec.parse(text)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def _parse_matrix(field: FieldSpec, lines: list[str], rows: int, cols: int) -> Matrix:
    if len(lines) != rows:
        raise FormatError(f"expected {rows} matrix rows, found {len(lines)}")
    data = []
    for ln in lines:
        words = ln.split()
        if len(words) != cols:
            raise FormatError(f"expected {cols} entries per row, found {len(words)}: {ln!r}")
        for w in words:
            if field.p is not None and "/" in w:
                raise FormatError(f"GF({field.p}) entries must be integers, got {w!r}")
            try:
                data.append(field.canonical(w))
            except (ValueError, ZeroDivisionError):
                raise FormatError(f"bad matrix entry {w!r}") from None
    return Matrix.from_flat(field, rows, cols, data)


def _format_entry(x) -> str:
    return str(x)


def format_matrix(m: Matrix) -> list[str]:
    return [" ".join(_format_entry(x) for x in row) for row in m.tolist()]


# -- objects ---------------------------------------------------------------------

def parse_object(text: str) -> DiffObject:
    lines = _content_lines(text)
    if not lines:
        raise FormatError("empty object file")
    h = _parse_header(lines[0], "object", ("field", "n", "dim"))
    field = _parse_field(h["field"])
    n, d = _int_field(h, "n"), _int_field(h, "dim")
    return DiffObject(field, n, _parse_matrix(field, lines[1:], d, d))


def dump_object(x: DiffObject) -> str:
    head = f"dfn-object v1 field={x.field} n={x.n} dim={x.dim}"
    return "\n".join([head, *format_matrix(x.eps)]) + "\n"


# -- morphisms -------------------------------------------------------------------

def _split_morphism(text: str):
    lines = _content_lines(text)
    if len(lines) < 3:
        raise FormatError("morphism file needs a header, src= and dst= lines")
    h = _parse_header(lines[0], "morphism", ("field", "n", "rows", "cols"))
    refs = {}
    for ln in lines[1:3]:
        key, sep, value = ln.partition("=")
        if not sep or key not in ("src", "dst") or not value:
            raise FormatError(f"expected src=<path> / dst=<path>, got {ln!r}")
        refs[key] = value
    if set(refs) != {"src", "dst"}:
        raise FormatError("morphism file needs both src= and dst=")
    return h, refs, lines[3:]


def parse_morphism(text: str, src: DiffObject, dst: DiffObject) -> DiffMorphism:
    h, _, body = _split_morphism(text)
    field = _parse_field(h["field"])
    n = _int_field(h, "n")
    if src.field != field or dst.field != field:
        raise FieldMismatch("morphism field differs from its endpoints")
    if src.n != n or dst.n != n:
        raise DegreeMismatch("morphism degree differs from its endpoints")
    rows, cols = _int_field(h, "rows"), _int_field(h, "cols")
    return DiffMorphism(src, dst, _parse_matrix(field, body, rows, cols))


def dump_morphism(f: DiffMorphism, src_ref: str, dst_ref: str) -> str:
    head = f"dfn-morphism v1 field={f.field} n={f.n} rows={f.mat.rows} cols={f.mat.cols}"
    return "\n".join([head, f"src={src_ref}", f"dst={dst_ref}", *format_matrix(f.mat)]) + "\n"


# -- files -------------------------------------------------------------------------

def read_object(path) -> DiffObject:
    return parse_object(_read(path))


def read_morphism(path) -> DiffMorphism:
    path = Path(path)
    _, refs, _ = _split_morphism(_read(path))
    src = read_object(path.parent / refs["src"])
    dst = read_object(path.parent / refs["dst"])
    return parse_morphism(_read(path), src, dst)


def read_ses(path) -> ShortExactSeq:
    path = Path(path)
    lines = _content_lines(_read(path))
    if not lines or lines[0].split() != ["dfn-ses", "v1"]:
        raise FormatError("expected header 'dfn-ses v1'")
    refs = dict(ln.partition("=")[::2] for ln in lines[1:])
    if set(refs) != {"i", "p"} or len(lines) != 3:
        raise FormatError("ses file needs exactly i=<path> and p=<path>")
    return ShortExactSeq(read_morphism(path.parent / refs["i"]), read_morphism(path.parent / refs["p"]))


def read_any(path):
    """Dispatch on the header keyword."""
    lines = _content_lines(_read(path))
    kind = lines[0].split()[0] if lines else ""
    readers = {"dfn-object": read_object, "dfn-morphism": read_morphism, "dfn-ses": read_ses}
    if kind not in readers:
        raise FormatError(f"{path}: unknown DFN-1 header {kind!r}")
    return readers[kind](path)


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise FormatError(f"{path} is not UTF-8 text") from None


def write_object(path, x: DiffObject) -> Path:
    path = Path(path)
    path.write_text(dump_object(x), encoding="utf-8")
    return path


def write_morphism(path, f: DiffMorphism, src_path, dst_path) -> Path:
    """Write f, referencing endpoint files relative to the morphism file."""
    path = Path(path)
    src_ref = _relative(Path(src_path), path.parent)
    dst_ref = _relative(Path(dst_path), path.parent)
    path.write_text(dump_morphism(f, src_ref, dst_ref), encoding="utf-8")
    return path


def write_morphism_bundle(prefix, f: DiffMorphism) -> dict[str, Path]:
    """Write f with its endpoints as <prefix>.src.dfn, <prefix>.dst.dfn, <prefix>.dfn."""
    prefix = Path(prefix)
    src = write_object(prefix.with_name(prefix.name + ".src.dfn"), f.src)
    dst = write_object(prefix.with_name(prefix.name + ".dst.dfn"), f.dst)
    mor = write_morphism(prefix.with_name(prefix.name + ".dfn"), f, src, dst)
    return {"src": src, "dst": dst, "morphism": mor}


def write_ses(path, ses: ShortExactSeq, i_path, p_path) -> Path:
    path = Path(path)
    body = f"dfn-ses v1\ni={_relative(Path(i_path), path.parent)}\np={_relative(Path(p_path), path.parent)}\n"
    path.write_text(body, encoding="utf-8")
    return path


def _relative(target: Path, base: Path) -> str:
    return os.path.relpath(target, base if str(base) else ".")


def dump_bundle(items: dict[str, object]) -> str:
    """Inline several DFN-1 documents, each preceded by ``--- <name>.dfn``.

    Morphisms reference their endpoints by the names used in ``items``;
    :func:`split_bundle` writes the documents back out as separate files.
    """
    names = {}
    for name, item in items.items():
        if isinstance(item, DiffObject):
            names[id(item)] = name
    out = []
    for name, item in items.items():
        if isinstance(item, DiffObject):
            doc = dump_object(item)
        elif isinstance(item, DiffMorphism):
            src = names.get(id(item.src))
            dst = names.get(id(item.dst))
            if src is None or dst is None:
                raise FormatError(f"bundle entry {name}: endpoints must be bundled too")
            doc = dump_morphism(item, f"{src}.dfn", f"{dst}.dfn")
        else:
            raise TypeError(f"cannot serialize {type(item).__name__}")
        out.append(f"--- {name}.dfn\n{doc}")
    return "".join(out)


def split_bundle(text: str, directory) -> list[Path]:
    directory = Path(directory)
    written, current, buf = [], None, []

    def flush():
        if current is not None:
            path = directory / Path(current).name
            path.write_text("".join(buf), encoding="utf-8")
            written.append(path)

    for line in text.splitlines(keepends=True):
        if line.startswith("--- "):
            flush()
            current, buf = line[4:].strip(), []
        elif current is not None:
            buf.append(line)
    flush()
    return written
