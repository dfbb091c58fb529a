"""Flat key-value text files.

Format: one ``key = value`` pair per line, ``#`` starts a comment,
blank lines are ignored.  Keys may be dotted (``window.lengths``).
Values are stored verbatim; writers use ``repr`` for floats so that
round-trips are lossless.
"""

from .errors import ValidationError


def parse_kv(text, source="<string>"):
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{source}: line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ValidationError(f"{source}: line {lineno}: empty key")
        if key in out:
            raise ValidationError(f"{source}: line {lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def read_kv(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_kv(fh.read(), source=str(path))


def format_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(format_value(v) for v in value)
    return str(value)


def write_kv(path, mapping):
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in mapping.items():
            fh.write(f"{key} = {format_value(value)}\n")
